/** Mouse-wheel adjustment: one notch moves the value by range/100. */

export function stepForRange(range: [number, number]): number {
  return (range[1] - range[0]) / 100;
}

/** Wheel up (negative deltaY) increases the value by one notch. */
export function wheelNotches(deltaY: number): number {
  if (deltaY === 0) {
    return 0;
  }
  return deltaY < 0 ? 1 : -1;
}

export function clampToRange(value: number, range: [number, number]): number {
  return Math.min(Math.max(value, range[0]), range[1]);
}
