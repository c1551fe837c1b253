// Canvas pixels <-> the model's logical frame.
//
// The model works in unit-height coordinates with y growing upward; the
// canvas is pixels with y growing downward. One uniform scale maps the
// logical box [0, aspect] x [0, 1] onto the canvas with a margin.

import type { Point } from "./types.js";

export interface Frame {
  width: number;
  height: number;
  margin: number;
}

const usable = (f: Frame) => f.height - 2 * f.margin;

export function toLogical(p: Point, f: Frame): Point {
  const s = usable(f);
  return {
    x: (p.x - f.margin) / s,
    y: (f.height - f.margin - p.y) / s,
    ...(p.t_ms !== undefined ? { t_ms: p.t_ms } : {}),
  };
}

export function toCanvas(p: Point, f: Frame): Point {
  const s = usable(f);
  return {
    x: f.margin + p.x * s,
    y: f.height - f.margin - p.y * s,
    ...(p.t_ms !== undefined ? { t_ms: p.t_ms } : {}),
  };
}

export function strokeToLogical(points: Point[], f: Frame): [number, number][] {
  return points.map((p) => {
    const q = toLogical(p, f);
    return [q.x, q.y];
  });
}

export function strokeToCanvas(points: [number, number][], f: Frame): Point[] {
  return points.map(([x, y]) => toCanvas({ x, y }, f));
}
