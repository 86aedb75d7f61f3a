import { describe, expect, it } from "vitest";

import type { ExportPayload } from "../src/types.js";
import {
  buildValidationPlan,
  shuffled,
  summarizeValidation,
} from "../src/validation.js";

describe("validation task", () => {
  it("covers both conditions for every stimulus", () => {
    const plan = buildValidationPlan(["a", "b", "c"], 7);
    expect(plan).toHaveLength(6);
    for (const s of ["a", "b", "c"]) {
      const conds = plan.filter((t) => t.stimulus === s).map((t) => t.condition);
      expect(conds.sort()).toEqual(["contrast", "full"]);
    }
  });

  it("randomizes order deterministically per seed", () => {
    const a = buildValidationPlan(["a", "b", "c", "d"], 1);
    const b = buildValidationPlan(["a", "b", "c", "d"], 1);
    const c = buildValidationPlan(["a", "b", "c", "d"], 2);
    expect(a.map((t) => `${t.stimulus}:${t.condition}`)).toEqual(
      b.map((t) => `${t.stimulus}:${t.condition}`),
    );
    expect(a.map((t) => `${t.stimulus}:${t.condition}`)).not.toEqual(
      c.map((t) => `${t.stimulus}:${t.condition}`),
    );
  });

  it("labels hide the condition", () => {
    const plan = buildValidationPlan(["a", "b"], 3);
    for (const t of plan) {
      expect(t.label).not.toContain("full");
      expect(t.label).not.toContain("contrast");
    }
  });

  it("shuffle is a permutation", () => {
    const out = shuffled([1, 2, 3, 4, 5, 6, 7], 9);
    expect([...out].sort()).toEqual([1, 2, 3, 4, 5, 6, 7]);
  });

  it("summarize exposes per-scene mean blur rates", () => {
    const payload: ExportPayload = {
      cells: [
        {
          stimulus: "a", blur_rate: 0, mode: "blur_rate", condition: "full",
          n: 2, mean: 0.5, sem: 0.05, values: [0.45, 0.55],
        },
        {
          stimulus: "a", blur_rate: 0, mode: "blur_rate", condition: "contrast",
          n: 2, mean: 0.4, sem: 0.02, values: [0.38, 0.42],
        },
        {
          stimulus: "a", blur_rate: 0.34, mode: "f_e", condition: "full",
          n: 1, mean: 0.2, sem: null, values: [0.2],
        },
      ],
    };
    const rows = summarizeValidation(payload);
    expect(rows).toHaveLength(2); // f_e cell filtered out
    expect(rows[0]).toMatchObject({ stimulus: "a", condition: "contrast", meanBlurRate: 0.4 });
    expect(rows[1]).toMatchObject({ stimulus: "a", condition: "full", meanBlurRate: 0.5 });
  });
});
