import { describe, expect, it } from "vitest";

import { clampToRange, stepForRange, wheelNotches } from "../src/wheel.js";

describe("wheel adjustment", () => {
  it("one step is range/100", () => {
    expect(stepForRange([0, 0.4])).toBeCloseTo(0.004, 12);
    expect(stepForRange([0, 45])).toBeCloseTo(0.45, 12);
    expect(stepForRange([1, 6.81])).toBeCloseTo(0.0581, 12);
  });

  it("wheel up is one notch up", () => {
    expect(wheelNotches(-120)).toBe(1);
    expect(wheelNotches(120)).toBe(-1);
    expect(wheelNotches(0)).toBe(0);
  });

  it("clamps to the range", () => {
    expect(clampToRange(0.5, [0, 0.4])).toBe(0.4);
    expect(clampToRange(-1, [0, 0.4])).toBe(0);
    expect(clampToRange(0.2, [0, 0.4])).toBe(0.2);
  });
});
