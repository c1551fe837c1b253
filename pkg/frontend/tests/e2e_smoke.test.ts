// End-to-end smoke against a real server: train a throwaway checkpoint via
// the CLI, serve it, drive /suggest and /rollout through the app, and check
// a numbered generated stroke lands on the canvas. Slower than the unit
// suite but still bounded: tiny model, a few dozen training steps.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { App } from "../src/app";
import { ApiClient } from "../src/client";
import { GENERATED_COLOR, type Ctx2D } from "../src/render";
import type { Frame } from "../src/transform";

const PY = process.env.PYTHON ?? "python3";

// small enough to train in seconds; quality does not matter for the contract
const TINY_CONFIG = {
  total_steps: 30,
  batch_size: 8,
  seed: 1,
  eval_every: 30,
  lr_schedule: "exponential_decay",
  lr0: 1e-3,
  dtype: "float32",
  codec: {
    latent_dim: 4,
    enc_layers: 1,
    d_model: 16,
    d_ff: 32,
    heads: 2,
    dec_layers: 1,
    dec_width: 32,
    dec_components: 3,
    t_samples_per_stroke: 8,
  },
  relational: { layers: 1, d_model: 16, d_ff: 32, heads: 2, gmm_components: 3 },
};

class CountingCtx implements Ctx2D {
  lineWidth = 1;
  strokeStyle = "";
  fillStyle = "";
  globalAlpha = 1;
  font = "";
  lineCap = "";
  lineJoin = "";
  strokes: string[] = [];
  texts: string[] = [];

  clearRect() {
    this.strokes = [];
    this.texts = [];
  }
  beginPath() {}
  moveTo() {}
  lineTo() {}
  stroke() {
    this.strokes.push(this.strokeStyle);
  }
  arc() {}
  fill() {}
  fillRect() {}
  fillText(t: string) {
    this.texts.push(t);
  }
  save() {}
  restore() {}
}

let workDir: string;
let server: ChildProcess | null = null;
let base: string;

function run(args: string[]): void {
  const out = spawnSync(PY, ["-m", "cose.cli", ...args], { encoding: "utf-8" });
  if (out.status !== 0) {
    throw new Error(`cose ${args[0]} failed:\n${out.stdout}\n${out.stderr}`);
  }
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "canvas-ui-e2e-"));
  const data = join(workDir, "corpus.ndjson");
  const cfg = join(workDir, "config.json");
  writeFileSync(cfg, JSON.stringify(TINY_CONFIG));
  run(["synth", "--out", data, "--n", "8", "--seed", "5"]);
  run(["train", "--data", data, "--config", cfg, "--out", workDir]);

  const port = 8900 + Math.floor(Math.random() * 500);
  base = `http://127.0.0.1:${port}`;
  server = spawn(PY, ["-m", "cose.cli", "serve", "--ckpt", workDir, "--port", String(port)], {
    stdio: "ignore",
  });

  const client = new ApiClient(base);
  const deadline = Date.now() + 60_000;
  for (;;) {
    try {
      await client.health();
      break;
    } catch {
      if (Date.now() > deadline) throw new Error("server never became healthy");
      await new Promise((r) => setTimeout(r, 300));
    }
  }
});

afterAll(() => {
  server?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

describe("live server", () => {
  const frame: Frame = { width: 640, height: 480, margin: 40 };

  it("suggests strokes for a drawn box", async () => {
    const app = new App({ client: new ApiClient(base), ctx: new CountingCtx(), frame });
    app.pointerDown({ x: 200, y: 300, t_ms: 0 });
    for (const [x, y] of [
      [400, 300],
      [400, 200],
      [200, 200],
      [200, 300],
    ]) {
      app.pointerMove({ x, y, t_ms: 10 });
    }
    app.pointerUp();

    await app.fetchSuggestions();
    expect(app.view).not.toBeNull();
    expect(app.view!.candidates.length).toBeGreaterThan(0);
    expect(app.view!.candidates.length).toBeLessThanOrEqual(6);
    const weights = app.view!.candidates.map((c) => c.position_weight);
    expect([...weights].sort((a, b) => b - a)).toEqual(weights);
  });

  it("rollout puts a numbered generated stroke on the canvas", async () => {
    const ctx = new CountingCtx();
    const app = new App({ client: new ApiClient(base), ctx, frame });
    app.pointerDown({ x: 150, y: 350, t_ms: 0 });
    app.pointerMove({ x: 380, y: 220, t_ms: 16 });
    app.pointerUp();

    await app.runRollout(2, 0, 0.5);
    const strokes = app.store.committed;
    expect(strokes).toHaveLength(3);
    expect(strokes[1].generatedStep).toBe(1);
    expect(strokes[2].generatedStep).toBe(2);
    // the canvas actually shows them: two generated polylines, badges 1 and 2
    expect(ctx.strokes.filter((c) => c === GENERATED_COLOR)).toHaveLength(2);
    expect(ctx.texts).toEqual(["1", "2"]);

    // same seed, same bytes: a replay appends identical strokes
    const again = new App({ client: new ApiClient(base), ctx: new CountingCtx(), frame });
    again.pointerDown({ x: 150, y: 350, t_ms: 0 });
    again.pointerMove({ x: 380, y: 220, t_ms: 16 });
    again.pointerUp();
    await again.runRollout(2, 0, 0.5);
    expect(again.store.committed).toEqual(strokes);
  });

  it("accepting a live suggestion grows the next request", async () => {
    const client = new ApiClient(base);
    const app = new App({ client, ctx: new CountingCtx(), frame });
    app.pointerDown({ x: 100, y: 400, t_ms: 0 });
    app.pointerMove({ x: 300, y: 250, t_ms: 12 });
    app.pointerUp();

    await app.fetchSuggestions();
    app.accept(0);
    expect(app.store.committed).toHaveLength(2);
    await app.fetchSuggestions(); // server must accept the grown context
    expect(app.view).not.toBeNull();
  });
});
