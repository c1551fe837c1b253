"""Turning a trained model into next-stroke suggestions and full rollouts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gmm
from .codec import StrokeEmbedding
from .ink import Drawing, Stroke
from .model import DrawingModel
from .relational import DrawingContext


@dataclass(frozen=True)
class Suggestion:
    """One candidate next stroke with the mixture weights that produced it."""

    stroke: Stroke
    position_weight: float
    embedding_weight: float


def suggest(
    model: DrawingModel,
    context: DrawingContext,
    n_positions: int = 3,
    n_per_position: int = 2,
    n_points: int = 50,
) -> list[Suggestion]:
    """Deterministic next-stroke proposals for an existing drawing.

    The heaviest components of the position mixture give candidate start
    points; at each one, the heaviest components of the code mixture are
    decoded along their means. Returns n_positions * n_per_position
    suggestions, ordered by position weight then code weight.
    """
    if n_positions < 1 or n_per_position < 1:
        raise ValueError("n_positions and n_per_position must be >= 1")
    pos = model.predict_position(context)
    pos_order = gmm.component_order(pos).cpu().numpy()[:n_positions]
    out: list[Suggestion] = []
    for pi in pos_order:
        start = pos.means[pi].cpu().numpy().astype(np.float64)
        emb_mix = model.predict_embedding(context, start)
        emb_order = gmm.component_order(emb_mix).cpu().numpy()[:n_per_position]
        for ei in emb_order:
            lat = emb_mix.means[ei].cpu().numpy().astype(np.float64)
            stroke = model.reconstruct(StrokeEmbedding(lat, start), n_points)
            out.append(
                Suggestion(
                    stroke,
                    float(pos.weights[pi]),
                    float(emb_mix.weights[ei]),
                )
            )
    return out


@dataclass(frozen=True)
class RolloutResult:
    """Seed plus generated strokes; generated_indices marks the new ones."""

    drawing: Drawing
    generated_indices: tuple[int, ...]


def rollout(
    model: DrawingModel,
    seed_drawing: Drawing,
    steps: int,
    rng,
    temperature: float = 1.0,
    n_points: int = 50,
) -> RolloutResult:
    """Autoregressive generation starting from a seed drawing.

    Each step samples a start from the position mixture, then a code from
    the code mixture conditioned on it, decodes the stroke, and feeds the
    sampled (code, start) pair back into the context. steps=0 returns the
    seed unchanged. Pass an integer seed or a numpy Generator; the same
    seed reproduces the same rollout.
    """
    if len(seed_drawing) < 1:
        raise ValueError("rollout needs at least one seed stroke")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    context = model.encode_drawing(seed_drawing)
    embeddings = list(context.embeddings)
    strokes = list(seed_drawing.strokes)
    generated: list[int] = []
    for _ in range(steps):
        ctx = DrawingContext(embeddings)
        start = gmm.sample(model.predict_position(ctx), rng, temperature)
        code = gmm.sample(model.predict_embedding(ctx, start), rng, temperature)
        emb = StrokeEmbedding(code, start)
        strokes.append(model.reconstruct(emb, n_points))
        generated.append(len(strokes) - 1)
        embeddings.append(emb)
    return RolloutResult(Drawing(strokes), tuple(generated))
