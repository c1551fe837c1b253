// Canvas state machine: committed strokes plus undo/redo.
//
// All strokes live in the model's logical coordinates. Undo and redo are
// pure stacks of deep snapshots, and each snapshot carries its revision,
// so undoing an accept restores the exact pre-accept state, revision
// included. That is what lets accept / undo / accept re-apply cleanly
// while a view fetched against some other state stays rejected.

import type { Point, RolloutResponse, SuggestionView, UiStroke } from "./types.js";

interface Snapshot {
  strokes: UiStroke[];
  revision: number;
}

export type AcceptResult = { ok: true } | { ok: false; reason: "stale" | "bad-index" };

const copyStroke = (s: UiStroke): UiStroke => ({
  points: s.points.map((p) => ({ ...p })),
  committed: s.committed,
  ...(s.generatedStep !== undefined ? { generatedStep: s.generatedStep } : {}),
});

export class CanvasStore {
  private strokes: UiStroke[] = [];
  private rev = 0;
  private nextRev = 1;
  private undoStack: Snapshot[] = [];
  private redoStack: Snapshot[] = [];

  get revision(): number {
    return this.rev;
  }

  get committed(): UiStroke[] {
    return this.strokes.map(copyStroke);
  }

  get isEmpty(): boolean {
    return this.strokes.length === 0;
  }

  get canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  get canRedo(): boolean {
    return this.redoStack.length > 0;
  }

  /** Strokes as the wire format wants them: bare [x, y] lists. */
  wireStrokes(): [number, number][][] {
    return this.strokes.map((s) => s.points.map((p): [number, number] => [p.x, p.y]));
  }

  commit(points: Point[]): void {
    if (points.length === 0) throw new Error("empty stroke");
    this.mutate((strokes) => {
      strokes.push({ points: points.map((p) => ({ ...p })), committed: true });
    });
  }

  /** Commits candidate `index` of `view` as a generated stroke. */
  accept(view: SuggestionView, index: number): AcceptResult {
    if (view.revision !== this.rev) return { ok: false, reason: "stale" };
    if (index < 0 || index >= view.candidates.length) return { ok: false, reason: "bad-index" };
    const candidate = view.candidates[index];
    this.mutate((strokes) => {
      strokes.push(this.generatedStroke(candidate.points, strokes));
    });
    return { ok: true };
  }

  /** Appends the strokes a rollout generated, numbering them in order. */
  applyRollout(resp: RolloutResponse): void {
    if (resp.generated_indices.length === 0) return;
    this.mutate((strokes) => {
      for (const i of resp.generated_indices) {
        const points = resp.strokes[i];
        if (!points) throw new Error(`rollout index ${i} out of range`);
        strokes.push(this.generatedStroke(points, strokes));
      }
    });
  }

  clear(): void {
    if (this.strokes.length === 0) return;
    this.mutate((strokes) => {
      strokes.length = 0;
    });
  }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (!prev) return false;
    this.redoStack.push(this.snapshot());
    this.restore(prev);
    return true;
  }

  redo(): boolean {
    const next = this.redoStack.pop();
    if (!next) return false;
    this.undoStack.push(this.snapshot());
    this.restore(next);
    return true;
  }

  private generatedStroke(points: [number, number][], among: UiStroke[]): UiStroke {
    const step = Math.max(0, ...among.map((s) => s.generatedStep ?? 0)) + 1;
    return {
      points: points.map(([x, y]) => ({ x, y })),
      committed: true,
      generatedStep: step,
    };
  }

  private snapshot(): Snapshot {
    return { strokes: this.strokes.map(copyStroke), revision: this.rev };
  }

  private restore(s: Snapshot): void {
    this.strokes = s.strokes.map(copyStroke);
    this.rev = s.revision;
  }

  private mutate(fn: (strokes: UiStroke[]) => void): void {
    this.undoStack.push(this.snapshot());
    this.redoStack.length = 0; // a new edit forks history
    fn(this.strokes);
    this.rev = this.nextRev++;
  }
}
