import { describe, expect, it } from "vitest";

import { density, densityGrid, normalized } from "../src/heatmap";
import type { PositionMixture } from "../src/types";

// fixed two-component diagonal mixture used for all oracle checks
const MIX: PositionMixture = {
  weights: [0.6, 0.4],
  means: [
    [0.2, 0.3],
    [0.7, 0.8],
  ],
  scales: [
    [0.05, 0.1],
    [0.2, 0.15],
  ],
};

describe("density", () => {
  it("matches a 50-digit reference at 5 grid cells", () => {
    // cell centers of a 10x10 grid on the unit square, row-major
    // (index = j*10 + i, center = ((i+0.5)/10, (j+0.5)/10));
    // expected values computed independently at 50-digit precision
    const cases: Array<[number, number, number]> = [
      [0.05, 0.05, 0.0093219727064385108],
      [0.35, 0.25, 0.18778850530669429],
      [0.75, 0.35, 0.022848726391996895],
      [0.55, 0.55, 0.39941720180795284],
      [0.95, 0.95, 0.58927642032454013],
    ];
    const grid = densityGrid(MIX, { xMin: 0, xMax: 1, yMin: 0, yMax: 1, nx: 10, ny: 10 });
    for (const [x, y, want] of cases) {
      expect(density(MIX, x, y)).toBeCloseTo(want, 12);
      const idx = Math.round((y * 10 - 0.5)) * 10 + Math.round(x * 10 - 0.5);
      expect(grid[idx]).toBeCloseTo(want, 12);
    }
  });

  it("integrates to about 1 over a wide grid", () => {
    const g = { xMin: -2, xMax: 3, yMin: -2, yMax: 3, nx: 250, ny: 250 };
    const values = densityGrid(MIX, g);
    const cell = (5 / 250) * (5 / 250);
    let mass = 0;
    for (const v of values) mass += v * cell;
    expect(mass).toBeCloseTo(1.0, 3);
  });

  it("peaks near the heavier component", () => {
    expect(density(MIX, 0.2, 0.3)).toBeGreaterThan(density(MIX, 0.7, 0.8));
  });
});

describe("normalized", () => {
  it("maps the peak to 1 and preserves ratios", () => {
    const values = new Float64Array([1, 2, 4]);
    const out = normalized(values);
    expect([...out]).toEqual([0.25, 0.5, 1]);
  });

  it("leaves an all-zero grid at zero", () => {
    const out = normalized(new Float64Array(4));
    expect([...out]).toEqual([0, 0, 0, 0]);
  });
});
