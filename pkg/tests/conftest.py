"""Shared fixtures, including the session-scoped toy training runs.

The trained fixtures are expensive (a couple of minutes each on one CPU
core), so they are built once per session and shared between the
acceptance suite and the trained-behavior tests.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import pytest
import torch

torch.set_num_threads(1)

from cose.codec import CodecConfig
from cose.evaluation import prediction_chamfer, reconstruction_chamfer
from cose.ink import Drawing, Stroke
from cose.model import DrawingModel
from cose.relational import RelationalConfig
from cose.synthetic import box_stroke, synthetic_corpus
from cose.trainer import TrainConfig, train

TOY_STEPS = 2000


def toy_train_config(total_steps: int = TOY_STEPS, **relational_overrides) -> TrainConfig:
    """Small-but-real model sized so a 2k-step run fits a single CPU core."""
    codec = CodecConfig(
        latent_dim=8,
        enc_layers=3,
        d_model=32,
        d_ff=64,
        heads=4,
        dec_layers=3,
        dec_width=128,
        dec_components=10,
    )
    rel_kwargs = dict(layers=2, d_model=32, d_ff=64, heads=4, gmm_components=10)
    rel_kwargs.update(relational_overrides)
    relational = RelationalConfig(**rel_kwargs)
    return TrainConfig(
        total_steps=total_steps,
        batch_size=32,
        seed=1,
        eval_every=TOY_STEPS,
        n_subsets=8,
        lr_schedule="exponential_decay",
        lr0=1e-3,
        dtype="float32",
        codec=codec,
        relational=relational,
    )


@dataclass
class ToyRun:
    model: DrawingModel
    config: TrainConfig
    history: list
    train_seconds: float
    recon_cd: float
    pred_cd: float
    eval_seconds: float


def _run_toy(corpus, **relational_overrides) -> ToyRun:
    cfg = toy_train_config(**relational_overrides)
    t0 = time.time()
    result = train(cfg, corpus)
    t_train = time.time() - t0
    t0 = time.time()
    recon = reconstruction_chamfer(result.model, corpus)
    pred = prediction_chamfer(result.model, corpus, seed=0)
    t_eval = time.time() - t0
    return ToyRun(result.model, cfg, result.history, t_train, recon, pred, t_eval)


@pytest.fixture(scope="session")
def toy_corpus() -> list[Drawing]:
    return synthetic_corpus(n_drawings=32, seed=7)


@pytest.fixture(scope="session")
def run_conditioned(toy_corpus) -> ToyRun:
    """Overfit run with the standard model (start-conditioned code predictor)."""
    return _run_toy(toy_corpus)


@pytest.fixture(scope="session")
def run_unconditioned(toy_corpus) -> ToyRun:
    """Same run with the code predictor blind to the next start position."""
    return _run_toy(toy_corpus, condition_on_start=False)


@pytest.fixture(scope="session")
def run_single_component(toy_corpus) -> ToyRun:
    """Same run with single-component prediction mixtures."""
    return _run_toy(toy_corpus, gmm_components=1)


def two_box_corpus(n_drawings: int = 16, seed: int = 11) -> list[Drawing]:
    """Drawings of two identical boxes, the second always 0.7 to the right.

    The continuation is unambiguous, so a trained model's position mixture
    has to put its dominant mass on the second box's start.
    """
    rng = np.random.default_rng(seed)
    drawings = []
    for _ in range(n_drawings):
        cx, cy = rng.uniform(0.2, 0.5), rng.uniform(0.3, 0.7)
        w = rng.uniform(0.15, 0.3)
        first = box_stroke((cx, cy), w, w, n_points=16)
        second = box_stroke((cx + 0.7, cy), w, w, n_points=16)
        drawings.append(Drawing([first, second]))
    return drawings


@dataclass
class TwoBoxRun:
    model: DrawingModel
    corpus: list
    train_seconds: float


@pytest.fixture(scope="session")
def two_box_run() -> TwoBoxRun:
    # 600 steps is deliberate: long enough to lock onto the offset, short
    # enough that the position mixture has not yet collapsed its scales
    corpus = two_box_corpus()
    cfg = toy_train_config(total_steps=600)
    cfg.batch_size = 16
    cfg.eval_every = 10 ** 6
    t0 = time.time()
    result = train(cfg, corpus)
    return TwoBoxRun(result.model, corpus, time.time() - t0)


@dataclass
class OverfitStrokeRun:
    model: DrawingModel
    stroke: Stroke
    train_seconds: float


@pytest.fixture(scope="session")
def overfit_stroke_run() -> OverfitStrokeRun:
    """A decoder driven to memorize one smooth stroke.

    Dense t sampling (32 per step) and a slightly aggressive decaying lr
    push the endpoint means well below the 0.01 contract in about half a
    minute of CPU time.
    """
    grid = np.linspace(0.0, 1.0, 20)
    stroke = Stroke(np.stack([grid, 0.3 * np.sin(2 * np.pi * grid)], axis=1))
    cfg = TrainConfig(
        total_steps=5000,
        batch_size=1,
        seed=3,
        eval_every=10 ** 6,
        lr_schedule="exponential_decay",
        lr0=2e-3,
        decay_rate=0.7,
        decay_steps=1000,
        dtype="float64",
        codec=CodecConfig(
            latent_dim=8,
            enc_layers=2,
            d_model=32,
            d_ff=64,
            heads=4,
            dec_layers=3,
            dec_width=128,
            dec_components=5,
            t_samples_per_stroke=32,
        ),
        relational=RelationalConfig(
            layers=1, d_model=8, d_ff=16, heads=2, gmm_components=2
        ),
    )
    t0 = time.time()
    result = train(cfg, [Drawing([stroke])])
    return OverfitStrokeRun(result.model, stroke, time.time() - t0)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


def random_stroke(rng: np.random.Generator, n: int) -> Stroke:
    pts = np.cumsum(rng.normal(scale=0.1, size=(n, 2)), axis=0) + rng.normal(size=2)
    return Stroke(pts)
