"""Digital ink data handling: strokes, drawings, resampling, augmentation.

A stroke is an ordered polyline captured between pen-down and pen-up, a
drawing is a collection of strokes. Everything here is plain numpy and
side-effect free so it can run inside parallel data-loading workers.

Interchange format is NDJSON, one drawing per line:

    {"strokes": [[[x, y], ...], ...]}            # or [x, y, t_ms] triplets
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class ParseError(ValueError):
    """Raised when an NDJSON drawing file cannot be parsed."""


@dataclass(frozen=True)
class Stroke:
    """Ordered sequence of 2D pen positions, optionally timestamped (ms)."""

    points: np.ndarray                 # (T, 2) float64
    times: np.ndarray | None = None    # (T,) float64, non-decreasing

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError(f"stroke points must have shape (T>=1, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("stroke contains non-finite coordinates")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.times is not None:
            ts = np.asarray(self.times, dtype=np.float64)
            if ts.shape != (pts.shape[0],):
                raise ValueError(f"times must have shape ({pts.shape[0]},), got {ts.shape}")
            if not np.all(np.isfinite(ts)):
                raise ValueError("stroke contains non-finite timestamps")
            if np.any(np.diff(ts) < 0):
                raise ValueError("timestamps must be non-decreasing")
            ts = ts.copy()
            ts.setflags(write=False)
            object.__setattr__(self, "times", ts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def start(self) -> np.ndarray:
        """First point of the stroke, the translational anchor."""
        return np.array(self.points[0])

    def translated(self, offset: Sequence[float]) -> "Stroke":
        return Stroke(self.points + np.asarray(offset, dtype=np.float64), self.times)

    def transformed(self, matrix: np.ndarray) -> "Stroke":
        """Applies a 2x2 linear map about the origin."""
        return Stroke(self.points @ np.asarray(matrix, dtype=np.float64).T, self.times)


@dataclass(frozen=True)
class Drawing:
    """Collection of strokes. Stroke order is stored but not semantic."""

    strokes: list[Stroke]

    def __post_init__(self):
        if len(self.strokes) < 1:
            raise ValueError("drawing must contain at least one stroke")
        object.__setattr__(self, "strokes", list(self.strokes))

    def __len__(self) -> int:
        return len(self.strokes)

    @property
    def start_positions(self) -> np.ndarray:
        """(K, 2) array of per-stroke start positions (first points)."""
        return np.stack([s.points[0] for s in self.strokes])

    def all_points(self) -> np.ndarray:
        return np.concatenate([s.points for s in self.strokes])

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        pts = self.all_points()
        return pts.min(axis=0), pts.max(axis=0)

    def map_strokes(self, fn) -> "Drawing":
        return Drawing([fn(s) for s in self.strokes])


@dataclass(frozen=True)
class AugmentParams:
    """Random-affine augmentation ranges; each step fires with `probability`."""

    rotation_range: tuple[float, float] = (-np.pi / 2, np.pi / 2)
    scale_range: tuple[float, float] = (0.5, 2.5)
    shear_range: tuple[float, float] = (-0.3, 0.3)
    probability: float = 0.3

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("probability must be within [0, 1]")
        if min(self.scale_range) <= 0.0:
            raise ValueError("scale_range must be positive")


# ---------------------------------------------------------------------------
# NDJSON I/O


def _where(line_no: int) -> str:
    return f" at line {line_no}" if line_no else ""


def _stroke_from_json(raw, line_no: int, stroke_idx: int) -> Stroke:
    try:
        arr = np.asarray(raw, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ParseError(f"stroke {stroke_idx}{_where(line_no)}: not numeric") from e
    if arr.size == 0:
        raise ParseError(f"empty stroke{_where(line_no)}")
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ParseError(
            f"stroke {stroke_idx}{_where(line_no)}: expected [x, y] or [x, y, t] "
            f"rows, got shape {arr.shape}"
        )
    times = arr[:, 2] if arr.shape[1] == 3 else None
    try:
        return Stroke(arr[:, :2], times)
    except ValueError as e:
        raise ParseError(f"stroke {stroke_idx}{_where(line_no)}: {e}") from e


def drawing_from_json(obj, line_no: int = 0) -> Drawing:
    """Parses one {"strokes": [[[x, y], ...], ...]} object."""
    if not isinstance(obj, dict) or "strokes" not in obj:
        raise ParseError(f"missing 'strokes' key{_where(line_no)}")
    raw_strokes = obj["strokes"]
    if not isinstance(raw_strokes, list) or len(raw_strokes) == 0:
        raise ParseError(f"'strokes' must be a non-empty list{_where(line_no)}")
    strokes = [_stroke_from_json(raw, line_no, i) for i, raw in enumerate(raw_strokes)]
    return Drawing(strokes)


def load_drawings(path, format: str = "ndjson") -> list[Drawing]:
    """Reads one drawing per NDJSON line. Raises ParseError on bad input."""
    if format != "ndjson":
        raise ValueError(f"unsupported format: {format!r}")
    drawings = []
    with open(path, "r") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"line {line_no}: invalid JSON ({e.msg})") from e
            drawings.append(drawing_from_json(obj, line_no))
    return drawings


def drawing_to_json(d: Drawing) -> dict:
    strokes = []
    for s in d.strokes:
        if s.times is not None:
            rows = np.concatenate([s.points, s.times[:, None]], axis=1)
        else:
            rows = s.points
        strokes.append(rows.tolist())
    return {"strokes": strokes}


def save_drawings(path, drawings: Iterable[Drawing]) -> None:
    with open(path, "w") as f:
        for d in drawings:
            f.write(json.dumps(drawing_to_json(d)))
            f.write("\n")


# ---------------------------------------------------------------------------
# Normalization and resampling


def normalize_drawing(d: Drawing) -> Drawing:
    """Scales a drawing uniformly so its bounding-box height is 1.

    Zero-height drawings are scaled by 1/width instead; drawings with zero
    extent in both axes are returned unchanged.
    """
    lo, hi = d.bounding_box()
    height = hi[1] - lo[1]
    width = hi[0] - lo[0]
    if height > 0.0:
        scale = 1.0 / height
    elif width > 0.0:
        scale = 1.0 / width
    else:
        return d
    return d.map_strokes(lambda s: Stroke(s.points * scale, s.times))


def resample_stroke(s: Stroke, step_ms: float = 20.0) -> Stroke:
    """Resamples a timestamped stroke on a regular time grid.

    Output points sit at t0, t0+step, ...; the first and last input points
    are always retained. Linear interpolation between input samples.
    """
    if s.times is None:
        raise ValueError(
            "stroke has no timestamps; use spatial_resample for timestamp-free data"
        )
    if len(s) == 1:
        return Stroke(s.points, s.times)
    t0, t_last = s.times[0], s.times[-1]
    if t_last <= t0:
        # Degenerate duration: keep the endpoints only.
        return Stroke(np.stack([s.points[0], s.points[-1]]), np.array([t0, t_last]))
    n_steps = int(np.floor((t_last - t0) / step_ms))
    grid = t0 + step_ms * np.arange(n_steps + 1)
    xs = _interp_with_ties(grid, s.times, s.points[:, 0])
    ys = _interp_with_ties(grid, s.times, s.points[:, 1])
    pts = np.stack([xs, ys], axis=1)
    pts[0] = s.points[0]
    times = grid
    if grid[-1] < t_last:
        pts = np.concatenate([pts, s.points[-1:][:]])
        times = np.concatenate([times, [t_last]])
    else:
        pts[-1] = s.points[-1]
    return Stroke(pts, times)


def _interp_with_ties(query: np.ndarray, xp: np.ndarray, fp: np.ndarray) -> np.ndarray:
    """np.interp with repeated sample times resolved to the later sample."""
    if np.all(np.diff(xp) > 0):
        return np.interp(query, xp, fp)
    keep = np.concatenate([np.diff(xp) > 0, [True]])
    return np.interp(query, xp[keep], fp[keep])


def spatial_resample(s: Stroke, n: int) -> Stroke:
    """Resamples a stroke to n points equally spaced in cumulative arc length."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if len(s) < 2:
        raise ValueError("spatial_resample requires a stroke of at least 2 points")
    seg = np.linalg.norm(np.diff(s.points, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total == 0.0:
        pts = np.repeat(s.points[:1], n, axis=0)
    else:
        targets = np.linspace(0.0, total, n)
        xs = np.interp(targets, cum, s.points[:, 0])
        ys = np.interp(targets, cum, s.points[:, 1])
        pts = np.stack([xs, ys], axis=1)
    pts[0] = s.points[0]
    pts[-1] = s.points[-1]
    return Stroke(pts)


def augment_drawing(d: Drawing, p: AugmentParams, rng: np.random.Generator) -> Drawing:
    """Random rotate -> scale -> shear of the whole drawing about the origin.

    Each transform fires independently with p.probability. Start positions
    move with the strokes, so the Drawing invariant is preserved.
    """
    matrix = np.eye(2)
    if rng.random() < p.probability:
        angle = rng.uniform(*p.rotation_range)
        c, s_ = np.cos(angle), np.sin(angle)
        matrix = np.array([[c, -s_], [s_, c]]) @ matrix
    if rng.random() < p.probability:
        factor = rng.uniform(*p.scale_range)
        matrix = np.array([[factor, 0.0], [0.0, factor]]) @ matrix
    if rng.random() < p.probability:
        shear = rng.uniform(*p.shear_range)
        matrix = np.array([[1.0, shear], [0.0, 1.0]]) @ matrix
    if np.array_equal(matrix, np.eye(2)):
        return d
    return d.map_strokes(lambda s: s.transformed(matrix))


# ---------------------------------------------------------------------------
# Curve parameterization and batching


def curve_point(s: Stroke, t: float) -> np.ndarray:
    """Point on the stroke at curve parameter t in [0, 1].

    The parameter maps to the normalized point index (point i sits at
    t = i/(T-1)) with piecewise-linear interpolation in between.
    """
    return curve_points(s, np.array([t]))[0]


def curve_points(s: Stroke, ts: np.ndarray) -> np.ndarray:
    """Vectorized curve_point: (S,) parameters -> (S, 2) points."""
    ts = np.asarray(ts, dtype=np.float64)
    if np.any((ts < 0.0) | (ts > 1.0)):
        raise ValueError("curve parameter t must lie in [0, 1]")
    T = len(s)
    if T == 1:
        return np.repeat(s.points[:1], ts.shape[0], axis=0)
    pos = ts * (T - 1)
    i0 = np.minimum(np.floor(pos).astype(int), T - 2)
    frac = (pos - i0)[:, None]
    return s.points[i0] * (1.0 - frac) + s.points[i0 + 1] * frac


def make_batch(
    strokes: Sequence[Stroke], max_len: int
) -> tuple[np.ndarray, np.ndarray]:
    """Pads strokes into a rectangular (B, L, 2) array with a validity mask.

    Strokes longer than max_len are spatially resampled down to max_len.
    L is the longest resulting stroke length.
    """
    capped = [
        spatial_resample(s, max_len) if len(s) > max_len else s for s in strokes
    ]
    lengths = [len(s) for s in capped]
    L = max(lengths)
    batch = np.zeros((len(capped), L, 2), dtype=np.float64)
    mask = np.zeros((len(capped), L), dtype=bool)
    for i, s in enumerate(capped):
        batch[i, : len(s)] = s.points
        mask[i, : len(s)] = True
    return batch, mask
