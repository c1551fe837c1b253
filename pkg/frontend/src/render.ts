// Canvas drawing. Everything takes a structural 2-D context so tests can
// pass a recording fake; the browser passes the real one.

import { densityGrid, normalized } from "./heatmap.js";
import { strokeToCanvas, toCanvas, type Frame } from "./transform.js";
import type { CandidateStroke, Point, PositionMixture, UiStroke } from "./types.js";

export interface Ctx2D {
  lineWidth: number;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  globalAlpha: number;
  font: string;
  lineCap: string;
  lineJoin: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  save(): void;
  restore(): void;
}

export const INK_COLOR = "#1f1f1f";
export const GENERATED_COLOR = "#0a6cff";
export const CANDIDATE_COLORS = ["#e03131", "#f08c00", "#2f9e44", "#9c36b5", "#0c8599", "#e8590c"];

function polyline(ctx: Ctx2D, pts: Point[]): void {
  ctx.beginPath();
  ctx.moveTo(pts[0].x, pts[0].y);
  for (let i = 1; i < pts.length; i++) ctx.lineTo(pts[i].x, pts[i].y);
  ctx.stroke();
}

function dot(ctx: Ctx2D, p: Point, r: number): void {
  ctx.beginPath();
  ctx.arc(p.x, p.y, r, 0, 2 * Math.PI);
  ctx.fill();
}

export function renderStrokes(ctx: Ctx2D, strokes: UiStroke[], f: Frame): void {
  ctx.save();
  ctx.lineWidth = 2.5;
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  for (const s of strokes) {
    const generated = s.generatedStep !== undefined;
    const pts = s.points.map((p) => toCanvas(p, f));
    ctx.strokeStyle = generated ? GENERATED_COLOR : INK_COLOR;
    ctx.fillStyle = generated ? GENERATED_COLOR : INK_COLOR;
    if (pts.length === 1) {
      dot(ctx, pts[0], 2.5); // a tap is still a stroke
    } else {
      polyline(ctx, pts);
    }
    if (generated) {
      // step badge at the stroke's start, as in hands-off completion
      ctx.font = "11px sans-serif";
      ctx.fillText(String(s.generatedStep), pts[0].x + 5, pts[0].y - 5);
    }
  }
  ctx.restore();
}

/** The stroke being drawn right now, already in canvas pixels. */
export function renderPending(ctx: Ctx2D, pts: Point[]): void {
  if (pts.length < 2) return;
  ctx.save();
  ctx.lineWidth = 2.5;
  ctx.lineCap = "round";
  ctx.strokeStyle = INK_COLOR;
  polyline(ctx, pts);
  ctx.restore();
}

/** Alpha-blended density cells over the drawing area. */
export function renderHeatmap(
  ctx: Ctx2D,
  mixture: PositionMixture,
  f: Frame,
  cells = 48,
): void {
  const aspect = f.width / f.height;
  const grid = {
    xMin: -0.25 * aspect,
    xMax: 1.25 * aspect,
    yMin: -0.25,
    yMax: 1.25,
    nx: cells,
    ny: cells,
  };
  const values = normalized(densityGrid(mixture, grid));
  const dx = (grid.xMax - grid.xMin) / grid.nx;
  const dy = (grid.yMax - grid.yMin) / grid.ny;
  ctx.save();
  ctx.fillStyle = "#ff6b00";
  for (let j = 0; j < grid.ny; j++) {
    for (let i = 0; i < grid.nx; i++) {
      const v = values[j * grid.nx + i];
      if (v < 0.02) continue; // skip invisible cells
      const a = toCanvas({ x: grid.xMin + i * dx, y: grid.yMin + (j + 1) * dy }, f);
      const b = toCanvas({ x: grid.xMin + (i + 1) * dx, y: grid.yMin + j * dy }, f);
      ctx.globalAlpha = 0.45 * v;
      ctx.fillRect(a.x, a.y, b.x - a.x, b.y - a.y);
    }
  }
  ctx.restore();
}

export function renderCandidates(
  ctx: Ctx2D,
  candidates: CandidateStroke[],
  f: Frame,
  selected?: number,
): void {
  ctx.save();
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  candidates.forEach((c, i) => {
    ctx.strokeStyle = CANDIDATE_COLORS[i % CANDIDATE_COLORS.length];
    ctx.lineWidth = i === selected ? 3.5 : 2;
    ctx.globalAlpha = i === selected ? 1.0 : 0.75;
    polyline(ctx, strokeToCanvas(c.points, f));
  });
  ctx.restore();
}
