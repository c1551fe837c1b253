"""Full drawing model: stroke codec plus relational predictors."""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from .codec import CodecConfig, StrokeCodec, StrokeEmbedding
from .ink import Drawing, Stroke
from .relational import DrawingContext, RelationalConfig, RelationalModel

_DTYPES = {"float32": torch.float32, "float64": torch.float64}


class DrawingModel(nn.Module):
    """All trainable parameters, keyed by module path in the state dict."""

    def __init__(self, codec_cfg: CodecConfig, relational_cfg: RelationalConfig):
        super().__init__()
        self.codec_cfg = codec_cfg
        self.relational_cfg = relational_cfg
        self.codec = StrokeCodec(codec_cfg)
        self.relational = RelationalModel(relational_cfg, codec_cfg.latent_dim)

    @classmethod
    def create(
        cls,
        codec_cfg: CodecConfig | None = None,
        relational_cfg: RelationalConfig | None = None,
        seed: int = 0,
        dtype: str = "float64",
    ) -> "DrawingModel":
        """Builds a freshly initialized model, reproducible under the seed."""
        codec_cfg = codec_cfg or CodecConfig()
        relational_cfg = relational_cfg or RelationalConfig()
        torch.manual_seed(seed)
        model = cls(codec_cfg, relational_cfg)
        return model.to(_DTYPES[dtype])

    @property
    def dtype(self) -> torch.dtype:
        return self.codec.dtype

    # Convenience delegations, the operations people actually call.

    def encode(self, s: Stroke) -> StrokeEmbedding:
        return self.codec.encode(s)

    def encode_drawing(self, d: Drawing) -> DrawingContext:
        with torch.no_grad():
            latents, _ = self.codec.encode_strokes(d.strokes)
        embs = [
            StrokeEmbedding(latents[i].cpu().numpy(), s.points[0])
            for i, s in enumerate(d.strokes)
        ]
        return DrawingContext(embs)

    def decode(self, emb: StrokeEmbedding, t: float):
        return self.codec.decode(emb, t)

    def reconstruct(self, emb: StrokeEmbedding, n: int, mode: str = "mean", rng=None) -> Stroke:
        return self.codec.reconstruct(emb, n, mode=mode, rng=rng)

    def predict_position(self, ctx: DrawingContext):
        return self.relational.predict_position(ctx)

    def predict_embedding(self, ctx: DrawingContext, next_start):
        return self.relational.predict_embedding(ctx, next_start)

    def parameter_count(self) -> int:
        return sum(int(np.prod(p.shape)) for p in self.parameters())
