// Start-position heatmap math. The server sends raw mixture parameters;
// density is evaluated client-side so resolution follows the canvas.

import type { PositionMixture } from "./types.js";

const TWO_PI = 2 * Math.PI;

/** Density of a diagonal-covariance Gaussian mixture at (x, y). */
export function density(m: PositionMixture, x: number, y: number): number {
  let total = 0;
  for (let i = 0; i < m.weights.length; i++) {
    const [mx, my] = m.means[i];
    const [sx, sy] = m.scales[i];
    const zx = (x - mx) / sx;
    const zy = (y - my) / sy;
    total += (m.weights[i] / (TWO_PI * sx * sy)) * Math.exp(-0.5 * (zx * zx + zy * zy));
  }
  return total;
}

export interface GridSpec {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
  nx: number;
  ny: number;
}

/** Cell-center density values, row-major with y varying slowest. */
export function densityGrid(m: PositionMixture, g: GridSpec): Float64Array {
  const out = new Float64Array(g.nx * g.ny);
  const dx = (g.xMax - g.xMin) / g.nx;
  const dy = (g.yMax - g.yMin) / g.ny;
  for (let j = 0; j < g.ny; j++) {
    const y = g.yMin + (j + 0.5) * dy;
    for (let i = 0; i < g.nx; i++) {
      const x = g.xMin + (i + 0.5) * dx;
      out[j * g.nx + i] = density(m, x, y);
    }
  }
  return out;
}

/** Scales values into [0, 1] by the grid peak; an all-zero grid stays zero. */
export function normalized(values: Float64Array): Float64Array {
  let peak = 0;
  for (const v of values) peak = Math.max(peak, v);
  const out = new Float64Array(values.length);
  if (peak === 0) return out;
  for (let i = 0; i < values.length; i++) out[i] = values[i] / peak;
  return out;
}
