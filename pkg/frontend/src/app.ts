// The interactive loop, DOM-free: pointer samples in, canvas calls out.
// main.ts binds this to real browser elements; tests drive it directly
// with a recording context and a mocked client.

import { ApiError, Superseded, type RolloutOptions, type SuggestOptions } from "./client.js";
import { StrokeCapture, type PointerSample } from "./capture.js";
import { CanvasStore } from "./state.js";
import { renderCandidates, renderHeatmap, renderPending, renderStrokes, type Ctx2D } from "./render.js";
import { strokeToLogical, type Frame } from "./transform.js";
import type { RolloutResponse, SuggestResponse, SuggestionView } from "./types.js";

/** The slice of the HTTP client the app needs; tests pass a fake. */
export interface SuggestionClient {
  suggest(strokes: [number, number][][], opts?: SuggestOptions): Promise<SuggestResponse>;
  rollout(strokes: [number, number][][], opts: RolloutOptions): Promise<RolloutResponse>;
}

export interface AppOptions {
  client: SuggestionClient;
  ctx: Ctx2D;
  frame: Frame;
  /** Non-blocking notification channel; defaults to a no-op. */
  onToast?: (message: string) => void;
}

export class App {
  readonly store = new CanvasStore();
  readonly capture = new StrokeCapture();
  view: SuggestionView | null = null;
  /** When false the model is unreachable and only drawing works. */
  online = true;

  private readonly client: SuggestionClient;
  private readonly ctx: Ctx2D;
  private readonly frame: Frame;
  private readonly toast: (message: string) => void;

  constructor(opts: AppOptions) {
    this.client = opts.client;
    this.ctx = opts.ctx;
    this.frame = opts.frame;
    this.toast = opts.onToast ?? (() => {});
  }

  // -- drawing ------------------------------------------------------------

  pointerDown(s: PointerSample): void {
    this.capture.down(s);
    this.redraw();
  }

  pointerMove(s: PointerSample): void {
    if (!this.capture.drawing) return;
    this.capture.move(s);
    this.redraw();
  }

  pointerUp(): void {
    const stroke = this.capture.up();
    if (!stroke) return;
    const logical = strokeToLogical(stroke.points, this.frame);
    this.store.commit(
      logical.map(([x, y], i) => ({ x, y, t_ms: stroke.points[i].t_ms ?? i })),
    );
    this.dropStaleView();
    this.redraw();
  }

  // -- suggestions --------------------------------------------------------

  get canSuggest(): boolean {
    return this.online && !this.store.isEmpty;
  }

  async fetchSuggestions(): Promise<void> {
    if (!this.canSuggest) return;
    const revision = this.store.revision;
    try {
      const resp = await this.client.suggest(this.store.wireStrokes());
      // view invariant: candidates ordered by weight, heaviest first
      const candidates = [...resp.suggestions].sort(
        (a, b) =>
          b.position_weight - a.position_weight || b.embedding_weight - a.embedding_weight,
      );
      this.view = { heatmap: resp.position_mixture, candidates, revision };
    } catch (err) {
      if (err instanceof Superseded) return; // a newer request took over
      this.view = null;
      this.toast(err instanceof ApiError ? `suggest failed: ${err.message}` : "server unreachable");
    }
    this.redraw();
  }

  /** Click-to-accept. Stale views prompt a re-fetch instead of applying. */
  accept(index: number): void {
    if (!this.view) return;
    const result = this.store.accept(this.view, index);
    if (!result.ok) {
      if (result.reason === "stale") {
        this.view = null;
        this.toast("canvas changed since these suggestions; fetch again");
        this.redraw();
      }
      return;
    }
    this.view = null;
    this.redraw();
  }

  rejectAll(): void {
    this.view = null;
    this.redraw();
  }

  // -- hands-off completion ----------------------------------------------

  async runRollout(steps: number, seed = 0, temperature = 1.0): Promise<void> {
    if (!this.online || this.store.isEmpty || steps < 1) return;
    try {
      const resp = await this.client.rollout(this.store.wireStrokes(), {
        steps,
        seed,
        temperature,
      });
      this.store.applyRollout(resp);
      this.dropStaleView();
    } catch (err) {
      this.toast(err instanceof ApiError ? `rollout failed: ${err.message}` : "server unreachable");
    }
    this.redraw();
  }

  // -- history ------------------------------------------------------------

  undo(): void {
    if (this.store.undo()) {
      this.dropStaleView();
      this.redraw();
    }
  }

  redo(): void {
    if (this.store.redo()) {
      this.dropStaleView();
      this.redraw();
    }
  }

  clear(): void {
    this.store.clear();
    this.dropStaleView();
    this.redraw();
  }

  // -- painting -----------------------------------------------------------

  redraw(): void {
    this.ctx.clearRect(0, 0, this.frame.width, this.frame.height);
    if (this.view) renderHeatmap(this.ctx, this.view.heatmap, this.frame);
    renderStrokes(this.ctx, this.store.committed, this.frame);
    if (this.view) {
      renderCandidates(this.ctx, this.view.candidates, this.frame, this.view.selected);
    }
    renderPending(this.ctx, this.capture.pending);
  }

  /** A view only survives if the canvas is exactly the state it was fetched on. */
  private dropStaleView(): void {
    if (this.view && this.view.revision !== this.store.revision) this.view = null;
  }
}
