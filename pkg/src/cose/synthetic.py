"""Seeded generator of small diagram-like drawings (boxes, circles, arrows).

Desk-scale stand-in for real diagram corpora: every drawing places two or
three shapes on a coarse grid and connects consecutive shapes with arrows.
Used by the overfit tests and the demos; deterministic under the seed.
"""

from __future__ import annotations

import numpy as np

from .ink import Drawing, Stroke, normalize_drawing

_SLOTS = np.array(
    [[0.0, 0.0], [0.9, 0.0], [1.8, 0.0], [0.0, 0.9], [0.9, 0.9], [1.8, 0.9]]
)


def box_stroke(center, width: float, height: float, n_points: int = 16) -> Stroke:
    """Closed rectangle drawn clockwise from the top-left corner."""
    cx, cy = center
    w2, h2 = width / 2.0, height / 2.0
    corners = np.array(
        [
            [cx - w2, cy + h2],
            [cx + w2, cy + h2],
            [cx + w2, cy - h2],
            [cx - w2, cy - h2],
            [cx - w2, cy + h2],
        ]
    )
    return _resample_polyline(corners, n_points)


def circle_stroke(center, radius: float, n_points: int = 16) -> Stroke:
    """Closed circle drawn counter-clockwise from the rightmost point."""
    theta = np.linspace(0.0, 2.0 * np.pi, n_points)
    pts = np.stack(
        [center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)],
        axis=1,
    )
    return Stroke(pts)


def arrow_stroke(p_from, p_to, n_points: int = 16, head: float = 0.08) -> Stroke:
    """Straight connector with a V-shaped head at the destination."""
    p_from = np.asarray(p_from, dtype=np.float64)
    p_to = np.asarray(p_to, dtype=np.float64)
    direction = p_to - p_from
    length = np.linalg.norm(direction)
    if length == 0.0:
        raise ValueError("arrow endpoints coincide")
    u = direction / length
    left = np.array([-u[1], u[0]])
    head = min(head, 0.45 * length)
    wing_a = p_to - u * head + left * head * 0.6
    wing_b = p_to - u * head - left * head * 0.6
    path = np.stack([p_from, p_to, wing_a, p_to, wing_b])
    return _resample_polyline(path, n_points)


def _resample_polyline(path: np.ndarray, n_points: int) -> Stroke:
    seg = np.linalg.norm(np.diff(path, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, cum[-1], n_points)
    xs = np.interp(targets, cum, path[:, 0])
    ys = np.interp(targets, cum, path[:, 1])
    pts = np.stack([xs, ys], axis=1)
    pts[0], pts[-1] = path[0], path[-1]
    return Stroke(pts)


def _shape_at(slot, kind: int, size: float, n_points: int) -> Stroke:
    if kind == 0:
        return box_stroke(slot, 0.5 * size, 0.36 * size, n_points)
    return circle_stroke(slot, 0.24 * size, n_points)


def _boundary_point(slot, kind: int, size: float, towards) -> np.ndarray:
    """Point where an arrow should attach when leaving the shape at `slot`."""
    direction = np.asarray(towards, dtype=np.float64) - slot
    direction /= np.linalg.norm(direction)
    if kind == 0:
        half = np.array([0.25 * size, 0.18 * size])
        scale = np.min(half / np.maximum(np.abs(direction), 1e-9))
    else:
        scale = 0.24 * size
    return slot + direction * scale * 1.15


def synthetic_drawing(rng: np.random.Generator, n_points: int = 16) -> Drawing:
    """One diagram: 2-3 shapes in distinct slots, arrows between them."""
    n_shapes = 2 if rng.random() < 0.75 else 3
    slot_idx = rng.choice(len(_SLOTS), size=n_shapes, replace=False)
    slots = _SLOTS[slot_idx]
    kinds = rng.integers(0, 2, size=n_shapes)
    sizes = rng.choice([0.8, 1.0, 1.25], size=n_shapes)
    strokes = [
        _shape_at(slots[i], int(kinds[i]), float(sizes[i]), n_points)
        for i in range(n_shapes)
    ]
    for i in range(n_shapes - 1):
        a = _boundary_point(slots[i], int(kinds[i]), float(sizes[i]), slots[i + 1])
        b = _boundary_point(slots[i + 1], int(kinds[i + 1]), float(sizes[i + 1]), slots[i])
        strokes.append(arrow_stroke(a, b, n_points))
    return normalize_drawing(Drawing(strokes))


def synthetic_corpus(
    n_drawings: int = 32, seed: int = 7, n_points: int = 16
) -> list[Drawing]:
    """Seeded list of diagram drawings; the overfit test corpus."""
    rng = np.random.default_rng(seed)
    return [synthetic_drawing(rng, n_points) for _ in range(n_drawings)]
