// Pointer-event stream -> committed strokes.
//
// Down starts a stroke, moves extend it, up commits it. A tap with no
// movement still commits a single-point stroke. Timestamps are kept
// monotone even if the browser hands us equal event times.

import type { Point, UiStroke } from "./types.js";

export interface PointerSample {
  x: number;
  y: number;
  t_ms: number;
}

export class StrokeCapture {
  private current: Point[] | null = null;
  private lastT = -Infinity;

  get drawing(): boolean {
    return this.current !== null;
  }

  /** Points of the in-progress stroke, for live rendering. */
  get pending(): Point[] {
    return this.current ? [...this.current] : [];
  }

  down(s: PointerSample): void {
    this.current = [];
    this.lastT = -Infinity;
    this.push(s);
  }

  move(s: PointerSample): void {
    if (!this.current) return; // moves before down are not ours
    this.push(s);
  }

  /** Ends the stroke. Returns null if no stroke was in progress. */
  up(): UiStroke | null {
    if (!this.current) return null;
    const stroke: UiStroke = { points: this.current, committed: true };
    this.current = null;
    return stroke;
  }

  private push(s: PointerSample): void {
    const t = Math.max(s.t_ms, this.lastT + 1e-3);
    this.lastT = t;
    this.current!.push({ x: s.x, y: s.y, t_ms: t });
  }
}
