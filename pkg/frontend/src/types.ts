export type Mode = "f_e" | "s_k" | "s_f" | "blur_rate";
export type Condition = "full" | "contrast";

export interface SessionDescriptor {
  session_id: string;
  stimulus: string;
  mode: Mode;
  condition: Condition;
  blur_rate: number;
  value: number;
  range: [number, number];
  accepted_value: number | null;
  history_length: number;
  rendering: boolean;
  preview_url: string;
}

export interface SessionState extends SessionDescriptor {
  history: { t: number; param: string; value: number }[];
}

export interface ExportCell {
  stimulus: string;
  blur_rate: number;
  mode: Mode;
  condition: Condition;
  n: number;
  mean: number;
  sem: number | null;
  values: number[];
}

export interface ExportPayload {
  cells: ExportCell[];
}

/** Client-side mirror of one session; values are server truth plus an
 * optimistic display value while an update is in flight. */
export interface UiSessionState {
  sessionId: string;
  mode: Mode;
  value: number;
  range: [number, number];
  accepted: boolean;
  previewUrl: string;
  previewStale: boolean;
  offline: boolean;
  /** accepted history values for the sparkline */
  history: number[];
}
