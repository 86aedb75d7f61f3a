import type { ApiClient } from "./api.js";
import type { Condition, ExportPayload } from "./types.js";

/** The blind blur-rate validation task: for every stimulus the participant
 * adjusts blur_rate under both enhancement conditions (full noise pipeline
 * vs contrast-only), starting from no foveation, in randomized order and
 * without seeing which condition is on screen. */

export interface ValidationTrial {
  stimulus: string;
  /** hidden condition; the UI shows only the opaque label */
  condition: Condition;
  label: string;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function shuffled<T>(items: T[], seed: number): T[] {
  const rand = mulberry32(seed);
  const out = [...items];
  for (let i = out.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [out[i], out[j]] = [out[j], out[i]];
  }
  return out;
}

export function buildValidationPlan(
  stimuli: string[],
  seed: number,
): ValidationTrial[] {
  const trials: ValidationTrial[] = [];
  for (const stimulus of stimuli) {
    for (const condition of ["full", "contrast"] as Condition[]) {
      trials.push({ stimulus, condition, label: "" });
    }
  }
  const plan = shuffled(trials, seed);
  return plan.map((t, i) => ({ ...t, label: `trial ${i + 1}` }));
}

export function startValidationTrial(api: ApiClient, trial: ValidationTrial) {
  // blur_rate mode starts at 0: no foveation until the participant adds it
  return api.createSession({
    stimulus: trial.stimulus,
    mode: "blur_rate",
    condition: trial.condition,
  });
}

export interface ValidationSummaryRow {
  stimulus: string;
  condition: Condition;
  meanBlurRate: number;
  n: number;
}

/** The reveal: per-scene mean accepted blur rates by condition. */
export function summarizeValidation(
  payload: ExportPayload,
): ValidationSummaryRow[] {
  return payload.cells
    .filter((c) => c.mode === "blur_rate")
    .map((c) => ({
      stimulus: c.stimulus,
      condition: c.condition,
      meanBlurRate: c.mean,
      n: c.n,
    }))
    .sort(
      (a, b) =>
        a.stimulus.localeCompare(b.stimulus) ||
        a.condition.localeCompare(b.condition),
    );
}
