"""Gaussian mixture heads with diagonal covariance.

Shared by the curve decoder (2-D, 20 components) and the two relational
predictors (2-D and latent-dim, 10 components). All densities are computed
with torch so the losses stay differentiable; sampling goes through an
explicit numpy generator for reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import torch
from torch import Tensor

SCALE_FLOOR = 1e-4
SCALE_CEIL = 1e3

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GMMParams:
    """Mixture weights/means/scales; leading batch dimensions are allowed.

    weights: (..., M) on the simplex
    means:   (..., M, d)
    scales:  (..., M, d) positive (diagonal std deviations)
    """

    weights: Tensor
    means: Tensor
    scales: Tensor

    def __post_init__(self):
        if self.weights.shape != self.means.shape[:-1]:
            raise ValueError("weights and means have inconsistent shapes")
        if self.means.shape != self.scales.shape:
            raise ValueError("means and scales have inconsistent shapes")

    @property
    def n_components(self) -> int:
        return self.weights.shape[-1]

    @property
    def dim(self) -> int:
        return self.means.shape[-1]

    def select(self, index) -> "GMMParams":
        """Indexes into the leading batch dimensions."""
        return GMMParams(self.weights[index], self.means[index], self.scales[index])


def from_raw(raw_weights: Tensor, raw_means: Tensor, raw_scales: Tensor) -> GMMParams:
    """Maps unconstrained network outputs onto valid mixture parameters.

    weights = softmax(raw_weights); scales = exp(raw_scales) clamped to
    [SCALE_FLOOR, SCALE_CEIL]; means pass through.
    """
    for name, t in (("weights", raw_weights), ("means", raw_means), ("scales", raw_scales)):
        if not torch.isfinite(t).all():
            raise ValueError(f"non-finite raw {name}")
    weights = torch.softmax(raw_weights, dim=-1)
    log_bounds = (math.log(SCALE_FLOOR), math.log(SCALE_CEIL))
    scales = torch.exp(torch.clamp(raw_scales, *log_bounds))
    return GMMParams(weights, raw_means, scales)


def log_likelihood(g: GMMParams, x: Tensor) -> Tensor:
    """log p(x) under the mixture, via log-sum-exp over components.

    x: (..., d) broadcastable against the mixture's batch shape; returns (...).
    """
    z = (x.unsqueeze(-2) - g.means) / g.scales
    comp = -0.5 * (z * z).sum(dim=-1) - torch.log(g.scales).sum(dim=-1)
    comp = comp - 0.5 * g.dim * _LOG_2PI
    return torch.logsumexp(torch.log(g.weights) + comp, dim=-1)


def sample(
    g: GMMParams, rng: np.random.Generator, temperature: float = 1.0
) -> np.ndarray:
    """Draws one point from a single (unbatched) mixture.

    The component is drawn from weights with logits divided by temperature;
    the Gaussian scale is multiplied by sqrt(temperature). temperature=0
    collapses onto the most likely component's mean.
    """
    if g.weights.dim() != 1:
        raise ValueError("sample expects an unbatched GMMParams")
    weights = g.weights.detach().cpu().numpy().astype(np.float64)
    means = g.means.detach().cpu().numpy().astype(np.float64)
    scales = g.scales.detach().cpu().numpy().astype(np.float64)
    if temperature <= 0.0:
        return means[int(np.argmax(weights))].copy()
    logits = np.log(np.maximum(weights, 1e-300)) / temperature
    probs = np.exp(logits - logits.max())
    probs /= probs.sum()
    comp = int(rng.choice(len(probs), p=probs))
    eps = rng.standard_normal(means.shape[-1])
    return means[comp] + scales[comp] * math.sqrt(temperature) * eps


def sample_batch(
    g: GMMParams, rng: np.random.Generator, temperature: float = 1.0
) -> np.ndarray:
    """Vectorized sampling: one draw per mixture in a (B, M)-batched GMMParams."""
    weights = g.weights.detach().cpu().numpy().astype(np.float64)
    means = g.means.detach().cpu().numpy().astype(np.float64)
    scales = g.scales.detach().cpu().numpy().astype(np.float64)
    B, M = weights.shape
    if temperature <= 0.0:
        comp = np.argmax(weights, axis=-1)
    else:
        logits = np.log(np.maximum(weights, 1e-300)) / temperature
        probs = np.exp(logits - logits.max(axis=-1, keepdims=True))
        probs /= probs.sum(axis=-1, keepdims=True)
        u = rng.random((B, 1))
        comp = (np.cumsum(probs, axis=-1) < u).sum(axis=-1).clip(max=M - 1)
    mu = means[np.arange(B), comp]
    sigma = scales[np.arange(B), comp]
    if temperature <= 0.0:
        return mu
    eps = rng.standard_normal(mu.shape)
    return mu + sigma * math.sqrt(temperature) * eps


def component_order(g: GMMParams) -> Tensor:
    """Component indices by descending weight; ties keep the lower index."""
    return torch.argsort(g.weights, dim=-1, descending=True, stable=True)


def component_means(g: GMMParams) -> Tensor:
    """(M, d) means ordered by descending weight (unbatched mixtures)."""
    if g.weights.dim() != 1:
        raise ValueError("component_means expects an unbatched GMMParams")
    return g.means[component_order(g)]


def mixture_mean(g: GMMParams) -> Tensor:
    """Weight-averaged mean of the mixture, shape (..., d)."""
    return (g.weights.unsqueeze(-1) * g.means).sum(dim=-2)
