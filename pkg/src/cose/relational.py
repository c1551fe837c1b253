"""Order-invariant predictors over sets of stroke embeddings.

Two transformers with identical topology but different inputs and heads:
one maps the context set to a 2-D mixture over the next start position, the
other additionally conditions on that start position and emits a mixture
over the next latent code. Neither uses positional encoding or look-ahead
masking by default, so the context is treated as a set.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np
import torch
from torch import Tensor, nn

from . import gmm
from .codec import StrokeEmbedding
from .transformer import TransformerStack, last_valid, mean_valid


@dataclass
class RelationalConfig:
    layers: int = 6
    d_model: int = 64
    d_ff: int = 256
    heads: int = 4
    dropout: float = 0.0
    gmm_components: int = 10
    positional_encoding: bool = False  # True recovers the order-aware variant
    condition_on_start: bool = True
    readout: str = "mean"  # "mean" pools over elements; "last" reads the final one

    def __post_init__(self):
        for name in ("layers", "d_model", "d_ff", "heads", "gmm_components"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.readout not in ("mean", "last"):
            raise ValueError("readout must be 'mean' or 'last'")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RelationalConfig":
        return cls(**d)


@dataclass(frozen=True)
class DrawingContext:
    """The set of already-drawn strokes, as (latent, start) embeddings."""

    embeddings: list[StrokeEmbedding]

    def __post_init__(self):
        if len(self.embeddings) < 1:
            raise ValueError("context must contain at least one stroke")
        dims = {e.dim for e in self.embeddings}
        if len(dims) != 1:
            raise ValueError(f"mixed latent dimensions in context: {sorted(dims)}")
        object.__setattr__(self, "embeddings", list(self.embeddings))

    def __len__(self) -> int:
        return len(self.embeddings)

    @property
    def latent_dim(self) -> int:
        return self.embeddings[0].dim

    def latents(self) -> np.ndarray:
        return np.stack([e.latent for e in self.embeddings])

    def starts(self) -> np.ndarray:
        return np.stack([e.start for e in self.embeddings])


class SetPredictor(nn.Module):
    """Set transformer with a Gaussian-mixture head over `out_dim` variables."""

    def __init__(self, cfg: RelationalConfig, in_dim: int, out_dim: int):
        super().__init__()
        self.cfg = cfg
        self.out_dim = out_dim
        self.net = TransformerStack(
            in_dim=in_dim,
            d_model=cfg.d_model,
            d_ff=cfg.d_ff,
            heads=cfg.heads,
            layers=cfg.layers,
            positional_encoding=cfg.positional_encoding,
            causal=False,
            dropout=cfg.dropout,
        )
        self.head = nn.Linear(cfg.d_model, cfg.gmm_components * (1 + 2 * out_dim))

    def forward(self, ctx: Tensor, mask: Tensor | None) -> gmm.GMMParams:
        """ctx: (B, K, in_dim); mask: (B, K) valid. Returns a (B,)-batched GMM."""
        feats = self.net(ctx, mask)
        if self.cfg.readout == "mean":
            pooled = mean_valid(feats, mask)
        else:
            pooled = last_valid(feats, mask)
        raw = self.head(pooled).view(-1, self.cfg.gmm_components, 1 + 2 * self.out_dim)
        raw_w = raw[..., 0]
        raw_mu = raw[..., 1 : 1 + self.out_dim]
        raw_sigma = raw[..., 1 + self.out_dim :]
        return gmm.from_raw(raw_w, raw_mu, raw_sigma)


class RelationalModel(nn.Module):
    """Bundles the position predictor and the latent-code predictor."""

    def __init__(self, cfg: RelationalConfig, latent_dim: int):
        super().__init__()
        self.cfg = cfg
        self.latent_dim = latent_dim
        self.position_model = SetPredictor(cfg, in_dim=latent_dim + 2, out_dim=2)
        emb_in = latent_dim + 2 + (2 if cfg.condition_on_start else 0)
        self.embedding_model = SetPredictor(cfg, in_dim=emb_in, out_dim=latent_dim)

    @property
    def dtype(self) -> torch.dtype:
        return self.position_model.head.weight.dtype

    # -- batched tensor paths (training) -----------------------------------

    def position_params(
        self, ctx_latents: Tensor, ctx_starts: Tensor, mask: Tensor | None
    ) -> gmm.GMMParams:
        ctx = torch.cat([ctx_latents, ctx_starts], dim=-1)
        return self.position_model(ctx, mask)

    def embedding_params(
        self,
        ctx_latents: Tensor,
        ctx_starts: Tensor,
        mask: Tensor | None,
        next_start: Tensor,
    ) -> gmm.GMMParams:
        parts = [ctx_latents, ctx_starts]
        if self.cfg.condition_on_start:
            K = ctx_latents.shape[1]
            parts.append(next_start.unsqueeze(1).expand(-1, K, -1))
        return self.embedding_model(torch.cat(parts, dim=-1), mask)

    # -- single-context API -------------------------------------------------

    def _ctx_tensors(self, ctx: DrawingContext) -> tuple[Tensor, Tensor]:
        if ctx.latent_dim != self.latent_dim:
            raise ValueError(
                f"context latent dim {ctx.latent_dim} != model latent dim {self.latent_dim}"
            )
        lat = torch.as_tensor(ctx.latents()[None], dtype=self.dtype)
        st = torch.as_tensor(ctx.starts()[None], dtype=self.dtype)
        return lat, st

    def predict_position(self, ctx: DrawingContext) -> gmm.GMMParams:
        """2-D mixture over the next stroke's start position."""
        lat, st = self._ctx_tensors(ctx)
        with torch.no_grad():
            params = self.position_params(lat, st, None)
        return params.select(0)

    def predict_embedding(self, ctx: DrawingContext, next_start) -> gmm.GMMParams:
        """Latent-dim mixture over the next stroke's code, given its start."""
        lat, st = self._ctx_tensors(ctx)
        ns = torch.as_tensor(
            np.array(next_start, dtype=np.float64)[None], dtype=self.dtype
        )
        with torch.no_grad():
            params = self.embedding_params(lat, st, None, ns)
        return params.select(0)


# ---------------------------------------------------------------------------
# Training subsets and loss


def make_training_subsets(
    n_strokes: int, rng: np.random.Generator, n_subsets: int = 32
) -> list[tuple[np.ndarray, int]]:
    """(context indices, target index) pairs for one drawing of K strokes.

    Half the subsets keep the drawing order: a prefix of H ~ U{1..K-1}
    strokes predicts stroke H+1. The other half sample H context strokes
    without replacement and a target uniformly from the complement. Returns
    an empty list for K < 2 (nothing to predict).
    """
    K = n_strokes
    if K < 2:
        return []
    pairs: list[tuple[np.ndarray, int]] = []
    n_ordered = n_subsets // 2
    for _ in range(n_ordered):
        H = int(rng.integers(1, K))
        pairs.append((np.arange(H), H))
    for _ in range(n_subsets - n_ordered):
        H = int(rng.integers(1, K))
        perm = rng.permutation(K)
        context = np.sort(perm[:H])
        target = int(rng.choice(perm[H:]))
        pairs.append((context, target))
    return pairs


def prediction_nll(
    position_params: gmm.GMMParams,
    embedding_params: gmm.GMMParams,
    target_start: Tensor,
    target_latent: Tensor,
) -> tuple[Tensor, Tensor]:
    """Per-pair negative log-likelihoods of the two prediction heads."""
    pos_nll = -gmm.log_likelihood(position_params, target_start)
    emb_nll = -gmm.log_likelihood(embedding_params, target_latent)
    return pos_nll, emb_nll


def relational_loss_batch(
    model: RelationalModel,
    ctx_latents: Tensor,
    ctx_starts: Tensor,
    mask: Tensor,
    target_starts: Tensor,
    target_latents: Tensor,
) -> tuple[Tensor, Tensor]:
    """Mean position/embedding NLLs over a padded batch of context sets.

    Callers are responsible for detaching the latent tensors when encoder
    gradients must be blocked.
    """
    pos_params = model.position_params(ctx_latents, ctx_starts, mask)
    emb_params = model.embedding_params(ctx_latents, ctx_starts, mask, target_starts)
    pos_nll, emb_nll = prediction_nll(
        pos_params, emb_params, target_starts, target_latents
    )
    return pos_nll.mean(), emb_nll.mean()


def relational_loss(
    model: RelationalModel,
    pairs: list[tuple[DrawingContext, StrokeEmbedding]],
) -> Tensor:
    """Teacher-forced loss over (context, target embedding) pairs."""
    if not pairs:
        raise ValueError("relational loss needs at least one pair")
    dtype = model.dtype
    Kmax = max(len(ctx) for ctx, _ in pairs)
    D = model.latent_dim
    B = len(pairs)
    lat = torch.zeros(B, Kmax, D, dtype=dtype)
    st = torch.zeros(B, Kmax, 2, dtype=dtype)
    mask = torch.zeros(B, Kmax, dtype=torch.bool)
    tgt_lat = torch.zeros(B, D, dtype=dtype)
    tgt_st = torch.zeros(B, 2, dtype=dtype)
    for i, (ctx, target) in enumerate(pairs):
        k = len(ctx)
        lat[i, :k] = torch.as_tensor(ctx.latents(), dtype=dtype)
        st[i, :k] = torch.as_tensor(ctx.starts(), dtype=dtype)
        mask[i, :k] = True
        tgt_lat[i] = torch.as_tensor(target.latent, dtype=dtype)
        tgt_st[i] = torch.as_tensor(target.start, dtype=dtype)
    pos_nll, emb_nll = relational_loss_batch(model, lat, st, mask, tgt_st, tgt_lat)
    return pos_nll + emb_nll
