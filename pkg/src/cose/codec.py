"""Stroke auto-encoder: transformer encoder to a fixed-size latent code,
curve-parameterized MLP decoder back to point distributions.

The encoder sees a stroke translated to the origin, so the latent code is
translation-invariant by construction; the start position travels alongside
it. The decoder maps (t, code) to a 2-D Gaussian mixture whose means are
anchored at the start position; evaluating a grid of t values reproduces
the stroke at any desired resolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np
import torch
from torch import Tensor, nn

from . import gmm
from .ink import Stroke, make_batch
from .transformer import TransformerStack, last_valid

MAX_STROKE_LEN = 200


@dataclass
class CodecConfig:
    latent_dim: int = 8
    enc_layers: int = 6
    d_model: int = 64
    d_ff: int = 128
    heads: int = 4
    dropout: float = 0.0
    dec_layers: int = 4
    dec_width: int = 512
    dec_components: int = 20
    t_samples_per_stroke: int = 4
    mse_t_samples: int = 100
    positional_encoding: bool = True
    causal_mask: bool = True
    reconstruction_objective: str = "gmm_nll"  # or "mse"
    isotropic_scales: bool = False

    def __post_init__(self):
        if self.latent_dim < 1:
            raise ValueError("latent_dim must be >= 1")
        for name in ("enc_layers", "d_model", "d_ff", "heads", "dec_layers",
                     "dec_width", "dec_components", "t_samples_per_stroke"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.reconstruction_objective not in ("gmm_nll", "mse"):
            raise ValueError("reconstruction_objective must be 'gmm_nll' or 'mse'")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CodecConfig":
        return cls(**d)


@dataclass(frozen=True)
class StrokeEmbedding:
    """Latent code plus the start position it was separated from."""

    latent: np.ndarray  # (D,)
    start: np.ndarray   # (2,)

    def __post_init__(self):
        # np.array, not asarray: always own a writable copy so downstream
        # tensor conversion never aliases a read-only stroke buffer.
        lat = np.array(self.latent, dtype=np.float64)
        st = np.array(self.start, dtype=np.float64)
        if lat.ndim != 1:
            raise ValueError("latent must be a vector")
        if st.shape != (2,):
            raise ValueError("start must have shape (2,)")
        if not (np.all(np.isfinite(lat)) and np.all(np.isfinite(st))):
            raise ValueError("embedding contains non-finite values")
        object.__setattr__(self, "latent", lat)
        object.__setattr__(self, "start", st)

    @property
    def dim(self) -> int:
        return self.latent.shape[0]


class StrokeCodec(nn.Module):
    """Encoder/decoder pair over strokes."""

    def __init__(self, cfg: CodecConfig):
        super().__init__()
        self.cfg = cfg
        self.encoder = TransformerStack(
            in_dim=2,
            d_model=cfg.d_model,
            d_ff=cfg.d_ff,
            heads=cfg.heads,
            layers=cfg.enc_layers,
            positional_encoding=cfg.positional_encoding,
            causal=cfg.causal_mask,
            dropout=cfg.dropout,
        )
        self.latent_proj = nn.Linear(cfg.d_model, cfg.latent_dim)
        scale_dims = 1 if cfg.isotropic_scales else 2
        self.out_per_component = 1 + 2 + scale_dims
        mlp: list[nn.Module] = []
        width_in = 1 + cfg.latent_dim
        for _ in range(cfg.dec_layers):
            mlp += [nn.Linear(width_in, cfg.dec_width), nn.ReLU()]
            width_in = cfg.dec_width
        mlp.append(nn.Linear(width_in, cfg.dec_components * self.out_per_component))
        self.decoder = nn.Sequential(*mlp)

    @property
    def dtype(self) -> torch.dtype:
        return self.latent_proj.weight.dtype

    # -- encoding ----------------------------------------------------------

    def encode_batch(self, rel_points: Tensor, mask: Tensor | None) -> Tensor:
        """Origin-relative padded points (B, L, 2) -> latent codes (B, D)."""
        feats = self.encoder(rel_points, mask)
        return self.latent_proj(last_valid(feats, mask))

    def encode_strokes(self, strokes: list[Stroke]) -> tuple[Tensor, Tensor]:
        """Encodes a list of strokes into (latents (B, D), starts (B, 2)).

        The start subtraction happens in float64 before any learned layer,
        which is what makes the latent code exactly translation-invariant.
        """
        rel = [Stroke(s.points - s.points[0], None) for s in strokes]
        batch, mask = make_batch(rel, MAX_STROKE_LEN)
        starts = np.stack([s.points[0] for s in strokes])
        rel_t = torch.as_tensor(batch, dtype=self.dtype)
        mask_t = torch.as_tensor(mask)
        latents = self.encode_batch(rel_t, mask_t)
        return latents, torch.as_tensor(starts, dtype=self.dtype)

    def encode(self, s: Stroke) -> StrokeEmbedding:
        """Single-stroke encoding to (latent, start)."""
        with torch.no_grad():
            latents, _ = self.encode_strokes([s])
        return StrokeEmbedding(latents[0].cpu().numpy(), s.points[0])

    def encode_features(self, s: Stroke) -> Tensor:
        """Per-step top-layer features (T, d_model); probe for masking tests."""
        rel = s.points - s.points[0]
        x = torch.as_tensor(rel[None], dtype=self.dtype)
        with torch.no_grad():
            feats = self.encoder(x, None)
        return feats[0]

    # -- decoding ----------------------------------------------------------

    def decode_params(self, t: Tensor, latents: Tensor, starts: Tensor) -> gmm.GMMParams:
        """Raw decoder pass. t: (B, S); latents: (B, D); starts: (B, 2).

        Returns a (B, S)-batched 2-D mixture whose means are offset by the
        start position; weights and scales do not depend on it.
        """
        B, S = t.shape
        lat = latents.unsqueeze(1).expand(B, S, -1)
        inp = torch.cat([t.unsqueeze(-1), lat], dim=-1)
        raw = self.decoder(inp).view(B, S, self.cfg.dec_components, self.out_per_component)
        raw_w = raw[..., 0]
        raw_mu = raw[..., 1:3]
        raw_sigma = raw[..., 3:]
        if self.cfg.isotropic_scales:
            raw_sigma = raw_sigma.expand(*raw_sigma.shape[:-1], 2)
        params = gmm.from_raw(raw_w, raw_mu, raw_sigma)
        means = params.means + starts[:, None, None, :]
        return gmm.GMMParams(params.weights, means, params.scales)

    def decode(self, emb: StrokeEmbedding, t: float) -> gmm.GMMParams:
        """Point distribution at curve parameter t for one embedding."""
        if not 0.0 <= t <= 1.0:
            raise ValueError("curve parameter t must lie in [0, 1]")
        lat = torch.as_tensor(emb.latent[None], dtype=self.dtype)
        start = torch.as_tensor(emb.start[None], dtype=self.dtype)
        tt = torch.full((1, 1), float(t), dtype=self.dtype)
        with torch.no_grad():
            params = self.decode_params(tt, lat, start)
        return params.select((0, 0))

    def reconstruct(
        self,
        emb: StrokeEmbedding,
        n: int,
        mode: str = "mean",
        rng: np.random.Generator | None = None,
    ) -> Stroke:
        """Decodes the embedding on a regular t grid of n >= 2 points.

        mode="mean" takes the highest-weight component's mean; mode="sample"
        draws from the mixture at every t. Output length is exactly n; there
        is no stop token, the caller controls resolution.
        """
        if n < 2:
            raise ValueError("n must be >= 2")
        lat = torch.as_tensor(emb.latent[None], dtype=self.dtype)
        start = torch.as_tensor(emb.start[None], dtype=self.dtype)
        t = torch.linspace(0.0, 1.0, n, dtype=self.dtype).unsqueeze(0)
        with torch.no_grad():
            params = self.decode_params(t, lat, start)
        if mode == "mean":
            top = params.weights.argmax(dim=-1)  # (1, n)
            idx0 = torch.zeros_like(top)
            pts = params.means[idx0, torch.arange(n)[None], top][0]
            return Stroke(pts.cpu().numpy())
        if mode == "sample":
            if rng is None:
                raise ValueError("mode='sample' requires an rng")
            flat = gmm.GMMParams(
                params.weights[0], params.means[0], params.scales[0]
            )
            return Stroke(gmm.sample_batch(flat, rng))
        raise ValueError(f"unknown mode {mode!r}")

    # -- training objective ------------------------------------------------

    def reconstruction_loss_batch(
        self,
        points: Tensor,
        mask: Tensor,
        latents: Tensor,
        starts: Tensor,
        rng: np.random.Generator,
    ) -> Tensor:
        """Curve-sampling reconstruction objective over a padded stroke batch.

        Draws t ~ U[0,1] per stroke (4 samples for the likelihood objective,
        100 for mse), interpolates the target points and scores them under
        the decoded mixtures. Single-point strokes are excluded: there is no
        curve to interpolate.
        """
        B = points.shape[0]
        lengths = mask.sum(dim=1)
        usable = lengths >= 2
        if not bool(usable.any()):
            return torch.zeros((), dtype=self.dtype)
        nll_mode = self.cfg.reconstruction_objective == "gmm_nll"
        S = self.cfg.t_samples_per_stroke if nll_mode else self.cfg.mse_t_samples
        t = torch.as_tensor(rng.random((B, S)), dtype=self.dtype)
        targets = interpolate_batch(points, lengths, t)
        params = self.decode_params(t, latents, starts)
        if nll_mode:
            per_sample = -gmm.log_likelihood(params, targets)
        else:
            diff = gmm.mixture_mean(params) - targets
            per_sample = (diff * diff).sum(dim=-1)
        per_stroke = per_sample.mean(dim=1)
        return per_stroke[usable].mean()

    def reconstruction_loss(self, s: Stroke, rng: np.random.Generator) -> Tensor:
        """Single-stroke training objective (differentiable)."""
        if len(s) < 2:
            raise ValueError("reconstruction loss needs at least 2 points")
        latents, starts = self.encode_strokes([s])
        batch, mask = make_batch([s], MAX_STROKE_LEN)
        return self.reconstruction_loss_batch(
            torch.as_tensor(batch, dtype=self.dtype),
            torch.as_tensor(mask),
            latents,
            starts,
            rng,
        )


def interpolate_batch(points: Tensor, lengths: Tensor, t: Tensor) -> Tensor:
    """Piecewise-linear curve interpolation on padded strokes.

    points: (B, L, 2); lengths: (B,); t: (B, S) in [0, 1]. Matches
    ink.curve_points under the normalized point-index parameterization.
    """
    B, S = t.shape
    pos = t * (lengths - 1).clamp(min=0).unsqueeze(1).to(t.dtype)
    i0 = pos.floor().long()
    i0 = torch.minimum(i0, (lengths - 2).clamp(min=0).unsqueeze(1))
    i1 = torch.clamp(i0 + 1, max=points.shape[1] - 1)
    frac = (pos - i0.to(t.dtype)).unsqueeze(-1)
    rows = torch.arange(B).unsqueeze(1)
    p0 = points[rows, i0]
    p1 = points[rows, i1]
    return p0 * (1.0 - frac) + p1 * frac
