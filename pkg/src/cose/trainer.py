"""Joint training of the stroke codec and the relational predictors.

One optimizer step covers the reconstruction objective over all strokes of
the batch plus the two relational objectives over freshly drawn context
subsets. Randomness is re-derived from (seed, step) every step, so resuming
from a checkpoint continues the exact same trajectory.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
import torch

from .codec import CodecConfig, MAX_STROKE_LEN
from .ink import AugmentParams, Drawing, augment_drawing, drawing_to_json, make_batch
from .model import DrawingModel
from .relational import RelationalConfig, make_training_subsets, relational_loss_batch

CHECKPOINT_SCHEMA = "cose-checkpoint"
CHECKPOINT_VERSION = 1
CHECKPOINT_FILENAME = "checkpoint.pt"


class TrainingDiverged(RuntimeError):
    """Raised when a step produces a non-finite loss."""


class CheckpointError(RuntimeError):
    """Raised on malformed or incompatible checkpoint files."""


@dataclass
class TrainConfig:
    total_steps: int = 2000
    batch_size: int = 128
    seed: int = 1
    eval_every: int = 500
    n_subsets: int = 32
    lr_schedule: str = "transformer_warmup"  # or "exponential_decay"
    warmup_steps: int = 4000
    lr0: float = 1e-3
    decay_rate: float = 0.96
    decay_steps: int = 1000
    stop_gradient: bool = True
    augment: bool = False
    dtype: str = "float64"
    codec: CodecConfig = field(default_factory=CodecConfig)
    relational: RelationalConfig = field(default_factory=RelationalConfig)

    def __post_init__(self):
        if self.batch_size < 1 or self.total_steps < 1:
            raise ValueError("batch_size and total_steps must be >= 1")
        if self.lr_schedule not in ("transformer_warmup", "exponential_decay"):
            raise ValueError(f"unknown lr_schedule {self.lr_schedule!r}")
        if isinstance(self.codec, dict):
            self.codec = CodecConfig.from_dict(self.codec)
        if isinstance(self.relational, dict):
            self.relational = RelationalConfig.from_dict(self.relational)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


def lr_at(step: int, cfg: TrainConfig) -> float:
    """Learning rate at a given step (first optimizer update is step 1)."""
    if step < 0:
        raise ValueError("step must be >= 0")
    if cfg.lr_schedule == "transformer_warmup":
        if step == 0:
            return 0.0
        scale = cfg.codec.d_model ** -0.5
        return scale * min(step ** -0.5, step * cfg.warmup_steps ** -1.5)
    return cfg.lr0 * cfg.decay_rate ** (step / cfg.decay_steps)


def _step_rng(cfg: TrainConfig, step: int, stream: int = 0) -> np.random.Generator:
    # Seeded from (seed, stream, step): every step draws from a fresh
    # generator, so resumed runs replay the identical randomness.
    return np.random.default_rng((cfg.seed, stream, step))


def _select_batch(corpus: list[Drawing], cfg: TrainConfig, rng) -> list[Drawing]:
    if cfg.batch_size >= len(corpus):
        batch = list(corpus)
    else:
        idx = rng.choice(len(corpus), size=cfg.batch_size, replace=False)
        batch = [corpus[i] for i in idx]
    if cfg.augment:
        params = AugmentParams()
        batch = [augment_drawing(d, params, rng) for d in batch]
    return batch


def train_step(
    model: DrawingModel,
    optimizer: torch.optim.Optimizer,
    drawings: list[Drawing],
    cfg: TrainConfig,
    step: int,
) -> dict:
    """One optimizer step over a batch of drawings; returns scalar metrics."""
    if not drawings:
        raise ValueError("empty batch")
    rng = _step_rng(cfg, step)
    dtype = model.dtype

    strokes = [s for d in drawings for s in d.strokes]
    abs_batch, mask = make_batch(strokes, MAX_STROKE_LEN)
    rel_batch = (abs_batch - abs_batch[:, 0:1, :]) * mask[:, :, None]
    starts = abs_batch[:, 0, :]

    abs_t = torch.as_tensor(abs_batch, dtype=dtype)
    rel_t = torch.as_tensor(rel_batch, dtype=dtype)
    mask_t = torch.as_tensor(mask)
    starts_t = torch.as_tensor(starts, dtype=dtype)

    for name, p in model.named_parameters():
        if not torch.isfinite(p).all():
            raise TrainingDiverged(f"non-finite parameter {name} entering step {step}")

    try:
        latents = model.codec.encode_batch(rel_t, mask_t)
        recon = model.codec.reconstruction_loss_batch(
            abs_t, mask_t, latents, starts_t, rng
        )

        ctx_source = latents.detach() if cfg.stop_gradient else latents
        pos_nll, emb_nll = _relational_losses(
            model, drawings, ctx_source, starts_t, cfg, rng
        )
    except ValueError as exc:
        # finite weights can still overflow the forward pass; surface that
        # as divergence so the caller dumps the offending batch
        raise TrainingDiverged(f"forward pass failed at step {step}: {exc}") from exc

    total = recon + pos_nll + emb_nll
    if not torch.isfinite(total):
        raise TrainingDiverged(
            f"non-finite loss at step {step}: recon={float(recon)}, "
            f"pos={float(pos_nll)}, emb={float(emb_nll)}"
        )

    lr = lr_at(step, cfg)
    for group in optimizer.param_groups:
        group["lr"] = lr
    optimizer.zero_grad(set_to_none=True)
    total.backward()
    optimizer.step()

    for name, p in model.named_parameters():
        if not torch.isfinite(p).all():
            raise TrainingDiverged(f"non-finite parameter {name} after step {step}")

    return {
        "step": step,
        "recon_nll": float(recon.detach()),
        "pos_nll": float(pos_nll.detach()),
        "emb_nll": float(emb_nll.detach()),
        "lr": lr,
    }


def _relational_losses(model, drawings, latents, starts, cfg, rng):
    """Builds the on-the-fly subset batch and scores both predictors."""
    dtype = model.dtype
    D = model.codec_cfg.latent_dim
    offsets = np.cumsum([0] + [len(d) for d in drawings])
    contexts: list[np.ndarray] = []
    targets: list[int] = []
    for i, d in enumerate(drawings):
        for ctx_idx, tgt in make_training_subsets(len(d), rng, cfg.n_subsets):
            contexts.append(ctx_idx + offsets[i])
            targets.append(tgt + offsets[i])
    if not contexts:
        zero = torch.zeros((), dtype=dtype)
        return zero, zero

    Kmax = max(len(c) for c in contexts)
    P = len(contexts)
    gather = np.zeros((P, Kmax), dtype=np.int64)
    mask = np.zeros((P, Kmax), dtype=bool)
    for i, c in enumerate(contexts):
        gather[i, : len(c)] = c
        mask[i, : len(c)] = True
    gather_t = torch.as_tensor(gather)
    mask_t = torch.as_tensor(mask)
    ctx_latents = latents[gather_t] * mask_t[:, :, None].to(dtype)
    ctx_starts = starts[gather_t] * mask_t[:, :, None].to(dtype)
    tgt_idx = torch.as_tensor(np.asarray(targets))
    return relational_loss_batch(
        model.relational,
        ctx_latents,
        ctx_starts,
        mask_t,
        starts[tgt_idx],
        latents[tgt_idx],
    )


@dataclass
class TrainResult:
    model: DrawingModel
    history: list[dict]


def train(
    cfg: TrainConfig,
    corpus: list[Drawing],
    out_dir: str | os.PathLike | None = None,
    model: DrawingModel | None = None,
    optimizer_state: dict | None = None,
    start_step: int = 0,
    log_every: int = 0,
) -> TrainResult:
    """Runs (or resumes) training; writes NDJSON metrics and checkpoints.

    With the same config, corpus and seed the run is fully deterministic,
    and resuming from a saved checkpoint continues the identical trajectory.
    """
    if not corpus:
        raise ValueError("empty corpus")
    if model is None:
        model = DrawingModel.create(
            cfg.codec, cfg.relational, seed=cfg.seed, dtype=cfg.dtype
        )
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.lr0)
    if optimizer_state is not None:
        optimizer.load_state_dict(optimizer_state)

    out_path = Path(out_dir) if out_dir is not None else None
    metrics_file = None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)
        metrics_file = open(out_path / "metrics.ndjson", "a")

    history: list[dict] = []
    try:
        for step in range(start_step + 1, cfg.total_steps + 1):
            batch = _select_batch(corpus, cfg, _step_rng(cfg, step, stream=1))
            try:
                metrics = train_step(model, optimizer, batch, cfg, step)
            except TrainingDiverged:
                if out_path is not None:
                    _dump_batch(out_path / f"diverged_step_{step}.ndjson", batch)
                raise
            history.append(metrics)
            if metrics_file is not None:
                metrics_file.write(json.dumps(metrics) + "\n")
                metrics_file.flush()
            if log_every and step % log_every == 0:
                print(
                    f"step {step}: recon={metrics['recon_nll']:.4f} "
                    f"pos={metrics['pos_nll']:.4f} emb={metrics['emb_nll']:.4f} "
                    f"lr={metrics['lr']:.2e}"
                )
            if out_path is not None and (
                step % cfg.eval_every == 0 or step == cfg.total_steps
            ):
                save_checkpoint(model, cfg, step, out_path, optimizer=optimizer)
    finally:
        if metrics_file is not None:
            metrics_file.close()
    return TrainResult(model, history)


def _dump_batch(path: Path, batch: list[Drawing]) -> None:
    with open(path, "w") as f:
        for d in batch:
            f.write(json.dumps(drawing_to_json(d)) + "\n")


# ---------------------------------------------------------------------------
# Checkpointing


def _checkpoint_path(path) -> Path:
    p = Path(path)
    if p.is_dir() or p.suffix == "":
        return p / CHECKPOINT_FILENAME
    return p


def save_checkpoint(
    model: DrawingModel,
    cfg: TrainConfig,
    step: int,
    path,
    optimizer: torch.optim.Optimizer | None = None,
) -> Path:
    """Writes a self-describing checkpoint; returns the file path."""
    target = _checkpoint_path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    state = model.state_dict()
    payload = {
        "schema": CHECKPOINT_SCHEMA,
        "version": CHECKPOINT_VERSION,
        "step": int(step),
        "train_config": cfg.to_dict(),
        "shapes": {k: list(v.shape) for k, v in state.items()},
        "state_dict": state,
        "optimizer": optimizer.state_dict() if optimizer is not None else None,
    }
    torch.save(payload, target)
    return target


@dataclass
class Checkpoint:
    model: DrawingModel
    config: TrainConfig
    step: int
    optimizer_state: dict | None
    path: Path


def load_checkpoint(path) -> Checkpoint:
    """Restores a checkpoint, validating schema, version and shapes."""
    target = _checkpoint_path(path)
    if not target.exists():
        raise CheckpointError(f"no checkpoint at {target}")
    payload = torch.load(target, weights_only=True)
    if payload.get("schema") != CHECKPOINT_SCHEMA:
        raise CheckpointError(f"not a recognised checkpoint: {target}")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"checkpoint version {payload.get('version')} unsupported "
            f"(expected {CHECKPOINT_VERSION})"
        )
    cfg = TrainConfig.from_dict(payload["train_config"])
    state = payload["state_dict"]
    shapes = payload.get("shapes", {})
    if set(shapes) != set(state):
        raise CheckpointError("checkpoint shape table does not match parameters")
    for k, v in state.items():
        if list(v.shape) != list(shapes[k]):
            raise CheckpointError(
                f"shape mismatch for {k}: table says {shapes[k]}, tensor is "
                f"{list(v.shape)}"
            )
    model = DrawingModel(cfg.codec, cfg.relational)
    model = model.to({"float32": torch.float32, "float64": torch.float64}[cfg.dtype])
    try:
        model.load_state_dict(state)
    except RuntimeError as e:
        raise CheckpointError(f"incompatible checkpoint parameters: {e}") from e
    return Checkpoint(model, cfg, int(payload["step"]), payload.get("optimizer"), target)
