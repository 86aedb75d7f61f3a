import { ApiClient } from "./api.js";
import { UiSession } from "./session.js";
import { sparklinePoints } from "./sparkline.js";
import type { Mode, UiSessionState } from "./types.js";
import {
  buildValidationPlan,
  startValidationTrial,
  summarizeValidation,
  type ValidationTrial,
} from "./validation.js";

const api = new ApiClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

let session: UiSession | null = null;
let validationPlan: ValidationTrial[] = [];
let validationIndex = -1;

function render(state: UiSessionState): void {
  el<HTMLImageElement>("preview").src = state.previewUrl;
  el("stale").style.visibility = state.previewStale ? "visible" : "hidden";
  el("offline").style.display = state.offline ? "block" : "none";
  el("value").textContent = state.accepted
    ? `${state.value.toFixed(4)} (accepted)`
    : state.value.toFixed(4);
  const slider = el<HTMLInputElement>("slider");
  slider.min = String(state.range[0]);
  slider.max = String(state.range[1]);
  slider.step = String((state.range[1] - state.range[0]) / 100);
  slider.value = String(state.value);
  slider.disabled = state.accepted;
  drawSparkline(state.history, state.range);
}

function drawSparkline(history: number[], range: [number, number]): void {
  const canvas = el<HTMLCanvasElement>("sparkline");
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    return;
  }
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const points = sparklinePoints(history, canvas.width, canvas.height, range);
  if (points.length < 2) {
    return;
  }
  ctx.beginPath();
  points.forEach((p, i) => (i ? ctx.lineTo(p.x, p.y) : ctx.moveTo(p.x, p.y)));
  ctx.strokeStyle = "#2277cc";
  ctx.stroke();
}

async function refreshStimuli(): Promise<void> {
  const select = el<HTMLSelectElement>("stimulus");
  try {
    const { stimuli } = await api.listStimuli();
    select.innerHTML = "";
    for (const s of stimuli) {
      const opt = document.createElement("option");
      opt.value = s;
      opt.textContent = s;
      select.appendChild(opt);
    }
    el("offline").style.display = "none";
  } catch {
    el("offline").style.display = "block";
  }
}

async function startSession(): Promise<void> {
  const stimulus = el<HTMLSelectElement>("stimulus").value;
  const mode = el<HTMLSelectElement>("mode").value as Mode;
  const blurRate = Number(el<HTMLSelectElement>("blur").value);
  el("task").textContent = `adjust ${mode}`;
  session = await UiSession.create(
    api,
    { stimulus, mode, blur_rate: blurRate },
    render,
  );
}

async function startValidation(): Promise<void> {
  if (validationIndex < 0) {
    const { stimuli } = await api.listStimuli();
    validationPlan = buildValidationPlan(stimuli, Date.now() & 0xffff);
    validationIndex = 0;
  } else {
    validationIndex += 1;
  }
  const trial = validationPlan[validationIndex % validationPlan.length];
  // the condition stays hidden: show only the opaque trial label
  el("task").textContent =
    `${trial.label}: raise the blur rate as far as the right half still ` +
    `matches; press Enter when done`;
  const desc = await startValidationTrial(api, trial);
  session = await UiSession.restore(api, desc.session_id, render);
}

async function showExport(): Promise<void> {
  const payload = await api.getExport();
  const rows = summarizeValidation(payload);
  el("export").textContent = JSON.stringify(
    { summary: rows, raw: payload },
    null,
    2,
  );
}

function wire(): void {
  el("start").addEventListener("click", () => void startSession());
  el("validate").addEventListener("click", () => void startValidation());
  el("export-btn").addEventListener("click", () => void showExport());
  el<HTMLImageElement>("preview").addEventListener("wheel", (ev) => {
    ev.preventDefault();
    session?.handleWheel(ev.deltaY);
  });
  el<HTMLInputElement>("slider").addEventListener("input", (ev) => {
    session?.adjustTo(Number((ev.target as HTMLInputElement).value));
  });
  window.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") {
      void session?.acceptOnEnter();
    }
  });
  void refreshStimuli();
}

wire();
