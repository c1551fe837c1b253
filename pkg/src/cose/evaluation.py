"""Model evaluation: chamfer distances, next-stroke prediction quality and
clustering structure of the learned stroke codes."""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, asdict

import numpy as np
import torch
from sklearn.cluster import KMeans
from sklearn.metrics import silhouette_score

from . import gmm
from .codec import StrokeCodec, StrokeEmbedding
from .ink import Drawing
from .model import DrawingModel
from .relational import DrawingContext

DEFAULT_SILHOUETTE_KS = (5, 10, 15, 20, 25)
DEFAULT_SILHOUETTE_METRICS = ("euclidean", "cosine")


def chamfer_distance(a, b) -> float:
    """Symmetric mean of squared nearest-neighbour distances.

    0.5 * (mean over a of the squared distance to the closest point of b,
    plus the same with the roles swapped). Inputs are (n, d) and (m, d).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError("chamfer_distance expects (n, d) and (m, d) arrays")
    if len(a) == 0 or len(b) == 0:
        raise ValueError("chamfer_distance needs non-empty point sets")
    d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=-1)
    return 0.5 * (float(d2.min(axis=1).mean()) + float(d2.min(axis=0).mean()))


def reconstruction_chamfer(model: DrawingModel, drawings: list[Drawing]) -> float:
    """Mean chamfer distance between strokes and their reconstructions.

    Every stroke is encoded and decoded back on a grid of its own length.
    Single-point strokes are skipped; there is nothing to reconstruct.
    """
    scores = []
    with torch.no_grad():
        for d in drawings:
            latents, _ = model.codec.encode_strokes(d.strokes)
            lat_np = latents.cpu().numpy()
            for i, s in enumerate(d.strokes):
                if len(s) < 2:
                    continue
                emb = StrokeEmbedding(lat_np[i], s.points[0])
                rec = model.codec.reconstruct(emb, len(s))
                scores.append(chamfer_distance(s.points, rec.points))
    if not scores:
        raise ValueError("no strokes with >= 2 points to evaluate")
    return float(np.mean(scores))


def stochastic_chamfer(
    codec: StrokeCodec,
    latent_mixture: gmm.GMMParams,
    start,
    target,
    rng: np.random.Generator,
    n_decode: int = 10,
    temperature: float = 1.0,
) -> float:
    """Best-of-mixture chamfer distance for one predicted stroke.

    Draws one latent code per mixture component (the n_decode heaviest),
    decodes each at the target's length anchored at the true start, and
    keeps the smallest chamfer distance against the target points.
    temperature=0 decodes the component means themselves.
    """
    target = np.asarray(target, dtype=np.float64)
    if target.ndim != 2 or len(target) < 2:
        raise ValueError("target stroke must have at least 2 points")
    order = gmm.component_order(latent_mixture).cpu().numpy()[:n_decode]
    means = latent_mixture.means.detach().cpu().numpy()[order]
    scales = latent_mixture.scales.detach().cpu().numpy()[order]
    if temperature <= 0.0:
        lats = means
    else:
        eps = rng.standard_normal(means.shape)
        lats = means + scales * np.sqrt(temperature) * eps

    C, n = len(lats), len(target)
    dtype = codec.dtype
    lat_t = torch.as_tensor(lats, dtype=dtype)
    start_t = torch.as_tensor(
        np.array(start, dtype=np.float64)[None], dtype=dtype
    ).expand(C, 2)
    t = torch.linspace(0.0, 1.0, n, dtype=dtype)[None].expand(C, n)
    with torch.no_grad():
        params = codec.decode_params(t, lat_t, start_t)
    top = params.weights.argmax(dim=-1)  # (C, n)
    ar = torch.arange(n)
    best = np.inf
    for c in range(C):
        pts = params.means[c, ar, top[c]].cpu().numpy()
        best = min(best, chamfer_distance(target, pts))
    return best


def prediction_chamfer(
    model: DrawingModel,
    drawings: list[Drawing],
    seed: int = 0,
    n_decode: int = 10,
    temperature: float = 1.0,
) -> float:
    """Next-stroke prediction quality over incrementally grown contexts.

    For each drawing with K >= 2 strokes and each k in 1..K-1, the first k
    strokes (their ground-truth codes) form the context; the model predicts
    the code of stroke k+1 given its true start position, and the decoded
    candidates are scored with stochastic_chamfer.
    """
    rng = np.random.default_rng(seed)
    scores = []
    for d in drawings:
        if len(d) < 2:
            warnings.warn("skipping drawing with fewer than 2 strokes")
            continue
        with torch.no_grad():
            latents, _ = model.codec.encode_strokes(d.strokes)
        lat_np = latents.cpu().numpy()
        for k in range(1, len(d)):
            target = d.strokes[k]
            if len(target) < 2:
                continue
            ctx = DrawingContext(
                [StrokeEmbedding(lat_np[i], d.strokes[i].points[0]) for i in range(k)]
            )
            mixture = model.predict_embedding(ctx, target.points[0])
            scores.append(
                stochastic_chamfer(
                    model.codec,
                    mixture,
                    target.points[0],
                    target.points,
                    rng,
                    n_decode=n_decode,
                    temperature=temperature,
                )
            )
    if not scores:
        raise ValueError("no predictable strokes in the corpus")
    return float(np.mean(scores))


# ---------------------------------------------------------------------------
# Clustering quality


def cluster_silhouette(X, k: int, metric: str = "euclidean", seed: int = 0) -> float:
    """Silhouette score of a k-means fit (k-means++ init, 10 restarts).

    Degenerate fits with empty clusters are retried with fresh seeds, at
    most 10 times. The metric only affects the scoring; the clustering
    itself is always euclidean.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("expected a (n, d) array")
    if len(X) <= k:
        raise ValueError(f"need more than {k} points to form {k} clusters")
    labels = None
    for attempt in range(10):
        km = KMeans(n_clusters=k, init="k-means++", n_init=10, random_state=seed + attempt)
        labels = km.fit_predict(X)
        if len(np.unique(labels)) == k:
            break
    if labels is None or len(np.unique(labels)) < 2:
        raise ValueError("clustering produced fewer than 2 populated clusters")
    return float(silhouette_score(X, labels, metric=metric))


def silhouette_grid(
    X,
    ks=DEFAULT_SILHOUETTE_KS,
    metrics=DEFAULT_SILHOUETTE_METRICS,
    seed: int = 0,
) -> dict[str, float]:
    """Silhouette scores over a grid of cluster counts and scoring metrics.

    Cluster counts that are not below the sample count are skipped.
    """
    out: dict[str, float] = {}
    for k in ks:
        if k >= len(X):
            continue
        for metric in metrics:
            out[f"k={k}/{metric}"] = cluster_silhouette(X, k, metric=metric, seed=seed)
    if not out:
        raise ValueError("no feasible cluster count for this sample size")
    return out


def embedding_silhouette(
    model: DrawingModel,
    drawings: list[Drawing],
    ks=DEFAULT_SILHOUETTE_KS,
    metrics=DEFAULT_SILHOUETTE_METRICS,
    seed: int = 0,
) -> tuple[float, dict[str, float]]:
    """Clusters all stroke codes of a corpus; returns (best score, full grid)."""
    lats = []
    with torch.no_grad():
        for d in drawings:
            latents, _ = model.codec.encode_strokes(d.strokes)
            lats.append(latents.cpu().numpy())
    X = np.concatenate(lats)
    grid = silhouette_grid(X, ks=ks, metrics=metrics, seed=seed)
    return max(grid.values()), grid


# ---------------------------------------------------------------------------
# Reports


@dataclass
class EvalReport:
    recon_cd: float
    pred_cd: float
    silhouette: float
    silhouette_grid: dict[str, float]
    n_drawings: int
    n_strokes: int
    model_fingerprint: str

    def to_dict(self) -> dict:
        return asdict(self)


def model_fingerprint(model: DrawingModel) -> str:
    """Short stable digest of the architecture configuration."""
    blob = json.dumps(
        {
            "codec": model.codec_cfg.to_dict(),
            "relational": model.relational_cfg.to_dict(),
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def evaluate_model(
    model: DrawingModel,
    drawings: list[Drawing],
    seed: int = 0,
    n_decode: int = 10,
    temperature: float = 1.0,
    ks=DEFAULT_SILHOUETTE_KS,
    metrics=DEFAULT_SILHOUETTE_METRICS,
) -> EvalReport:
    """Runs the full evaluation battery on a corpus."""
    recon = reconstruction_chamfer(model, drawings)
    pred = prediction_chamfer(
        model, drawings, seed=seed, n_decode=n_decode, temperature=temperature
    )
    best, grid = embedding_silhouette(model, drawings, ks=ks, metrics=metrics, seed=seed)
    return EvalReport(
        recon_cd=recon,
        pred_cd=pred,
        silhouette=best,
        silhouette_grid=grid,
        n_drawings=len(drawings),
        n_strokes=sum(len(d) for d in drawings),
        model_fingerprint=model_fingerprint(model),
    )
