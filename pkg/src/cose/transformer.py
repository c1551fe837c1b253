"""Minimal post-norm transformer encoder stack.

Used in two modes: as a sequence encoder (sinusoidal positional encoding +
look-ahead masking) for strokes, and as a set encoder (neither) for the
relational predictors. Implemented by hand so masking, dtype and readout
behaviour are fully under our control on CPU.
"""

from __future__ import annotations

import math

import torch
from torch import Tensor, nn


def sinusoidal_encoding(length: int, d_model: int, dtype, device) -> Tensor:
    """Standard sin/cos positional table, shape (length, d_model)."""
    position = torch.arange(length, dtype=dtype, device=device).unsqueeze(1)
    half = torch.arange(0, d_model, 2, dtype=dtype, device=device)
    div = torch.exp(-half * (math.log(10000.0) / d_model))
    enc = torch.zeros(length, d_model, dtype=dtype, device=device)
    enc[:, 0::2] = torch.sin(position * div)
    enc[:, 1::2] = torch.cos(position * div)
    return enc


class MultiHeadSelfAttention(nn.Module):
    def __init__(self, d_model: int, heads: int):
        super().__init__()
        if d_model % heads != 0:
            raise ValueError("d_model must be divisible by heads")
        self.heads = heads
        self.head_dim = d_model // heads
        self.q_proj = nn.Linear(d_model, d_model)
        self.k_proj = nn.Linear(d_model, d_model)
        self.v_proj = nn.Linear(d_model, d_model)
        self.out_proj = nn.Linear(d_model, d_model)

    def forward(self, x: Tensor, attn_bias: Tensor | None) -> Tensor:
        # x: (B, L, d_model); attn_bias: (B, 1, L, L) additive, -inf blocks.
        B, L, _ = x.shape
        def split(t):
            return t.view(B, L, self.heads, self.head_dim).transpose(1, 2)
        q, k, v = split(self.q_proj(x)), split(self.k_proj(x)), split(self.v_proj(x))
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.head_dim)
        if attn_bias is not None:
            scores = scores + attn_bias
        attn = torch.softmax(scores, dim=-1)
        out = (attn @ v).transpose(1, 2).reshape(B, L, -1)
        return self.out_proj(out)


class EncoderLayer(nn.Module):
    def __init__(self, d_model: int, d_ff: int, heads: int, dropout: float):
        super().__init__()
        self.attn = MultiHeadSelfAttention(d_model, heads)
        self.ff = nn.Sequential(
            nn.Linear(d_model, d_ff), nn.ReLU(), nn.Linear(d_ff, d_model)
        )
        self.norm1 = nn.LayerNorm(d_model)
        self.norm2 = nn.LayerNorm(d_model)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: Tensor, attn_bias: Tensor | None) -> Tensor:
        x = self.norm1(x + self.dropout(self.attn(x, attn_bias)))
        x = self.norm2(x + self.dropout(self.ff(x)))
        return x


class TransformerStack(nn.Module):
    """Input projection + N post-norm encoder layers.

    positional_encoding=False and causal=False together give a set encoder
    whose per-element outputs are permutation-equivariant.
    """

    def __init__(
        self,
        in_dim: int,
        d_model: int,
        d_ff: int,
        heads: int,
        layers: int,
        positional_encoding: bool,
        causal: bool,
        dropout: float = 0.0,
    ):
        super().__init__()
        self.positional_encoding = positional_encoding
        self.causal = causal
        self.d_model = d_model
        self.in_proj = nn.Linear(in_dim, d_model)
        self.layers = nn.ModuleList(
            EncoderLayer(d_model, d_ff, heads, dropout) for _ in range(layers)
        )

    def attention_bias(self, mask: Tensor | None, L: int, dtype, device) -> Tensor | None:
        """Combines key-padding and look-ahead masks into an additive bias."""
        bias = None
        if mask is not None:
            bias = torch.zeros(mask.shape[0], 1, 1, L, dtype=dtype, device=device)
            bias = bias.masked_fill(~mask[:, None, None, :], float("-inf"))
            bias = bias.expand(-1, 1, L, L)
        if self.causal:
            look_ahead = torch.full((L, L), float("-inf"), dtype=dtype, device=device)
            look_ahead = torch.triu(look_ahead, diagonal=1)
            bias = look_ahead[None, None] if bias is None else bias + look_ahead
        return bias

    def forward(self, x: Tensor, mask: Tensor | None = None) -> Tensor:
        """x: (B, L, in_dim); mask: (B, L) bool, True marks valid positions.

        Returns per-position features (B, L, d_model). Outputs at padded
        positions are defined but meaningless; readouts must respect mask.
        """
        B, L, _ = x.shape
        h = self.in_proj(x)
        if self.positional_encoding:
            h = h + sinusoidal_encoding(L, self.d_model, h.dtype, h.device)
        bias = self.attention_bias(mask, L, h.dtype, h.device)
        for layer in self.layers:
            h = layer(h, bias)
        return h


def last_valid(features: Tensor, mask: Tensor | None) -> Tensor:
    """Per-sequence features at the last valid position: (B, L, D) -> (B, D)."""
    if mask is None:
        return features[:, -1]
    lengths = mask.sum(dim=1)
    idx = (lengths - 1).clamp(min=0)
    return features[torch.arange(features.shape[0]), idx]


def mean_valid(features: Tensor, mask: Tensor | None) -> Tensor:
    """Mask-aware mean over positions: (B, L, D) -> (B, D)."""
    if mask is None:
        return features.mean(dim=1)
    m = mask.to(features.dtype).unsqueeze(-1)
    return (features * m).sum(dim=1) / m.sum(dim=1)
