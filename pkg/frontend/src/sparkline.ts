/** History sparkline geometry (pure; the DOM layer draws the points). */

export interface Point {
  x: number;
  y: number;
}

export function sparklinePoints(
  values: number[],
  width: number,
  height: number,
  range?: [number, number],
): Point[] {
  if (values.length === 0) {
    return [];
  }
  const lo = range ? range[0] : Math.min(...values);
  const hi = range ? range[1] : Math.max(...values);
  const span = hi - lo || 1;
  const dx = values.length > 1 ? width / (values.length - 1) : 0;
  return values.map((v, i) => ({
    x: i * dx,
    y: height - ((v - lo) / span) * height,
  }));
}
