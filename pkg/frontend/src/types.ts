// Shared types. Server payload shapes mirror the inference service exactly;
// everything else is client-side state.

export interface Point {
  x: number;
  y: number;
  t_ms?: number;
}

/** A stroke as the user draws it: raw canvas pixels until committed. */
export interface UiStroke {
  points: Point[];
  committed: boolean;
  /** Set on strokes the model drew; used for styling and the step badge. */
  generatedStep?: number;
}

/** Diagonal Gaussian mixture over 2-D starts, as the server sends it. */
export interface PositionMixture {
  weights: number[];
  means: [number, number][];
  scales: [number, number][];
}

export interface CandidateStroke {
  points: [number, number][];
  position_weight: number;
  embedding_weight: number;
}

export interface SuggestResponse {
  position_mixture: PositionMixture;
  suggestions: CandidateStroke[];
}

export interface RolloutResponse {
  strokes: [number, number][][];
  generated_indices: number[];
}

export interface HealthResponse {
  status: string;
  checkpoint: string;
  latent_dim: number;
  parameters: number;
}

/** What the suggestion overlay shows, pinned to the canvas state it came from. */
export interface SuggestionView {
  heatmap: PositionMixture;
  candidates: CandidateStroke[];
  selected?: number;
  /** Revision of the canvas when fetched; stale views must not be accepted. */
  revision: number;
}
