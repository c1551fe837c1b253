"""Attention stack: positional table, masking semantics, readouts."""

import math

import numpy as np
import pytest
import torch

from cose.transformer import (
    MultiHeadSelfAttention,
    TransformerStack,
    last_valid,
    mean_valid,
    sinusoidal_encoding,
)


def make_stack(posenc=False, causal=False, in_dim=3, layers=2, seed=0):
    torch.manual_seed(seed)
    return TransformerStack(
        in_dim=in_dim,
        d_model=16,
        d_ff=32,
        heads=4,
        layers=layers,
        positional_encoding=posenc,
        causal=causal,
    ).to(torch.float64)


class TestSinusoidalEncoding:
    def test_position_zero_alternates_zero_one(self):
        enc = sinusoidal_encoding(4, 8, torch.float64, "cpu")
        np.testing.assert_allclose(enc[0, 0::2].numpy(), 0.0)
        np.testing.assert_allclose(enc[0, 1::2].numpy(), 1.0)

    def test_matches_closed_form(self):
        d = 8
        enc = sinusoidal_encoding(5, d, torch.float64, "cpu")
        for pos in range(5):
            for i in range(d // 2):
                freq = 1.0 / (10000 ** (2 * i / d))
                assert enc[pos, 2 * i].item() == pytest.approx(math.sin(pos * freq))
                assert enc[pos, 2 * i + 1].item() == pytest.approx(math.cos(pos * freq))

    def test_distinct_rows(self):
        enc = sinusoidal_encoding(50, 16, torch.float64, "cpu")
        assert len({tuple(r.tolist()) for r in enc}) == 50


class TestAttention:
    def test_rejects_indivisible_heads(self):
        with pytest.raises(ValueError):
            MultiHeadSelfAttention(d_model=10, heads=3)

    def test_output_shape(self):
        torch.manual_seed(0)
        attn = MultiHeadSelfAttention(16, 4).to(torch.float64)
        out = attn(torch.randn(2, 5, 16, dtype=torch.float64), None)
        assert out.shape == (2, 5, 16)


class TestCausalMasking:
    def test_future_inputs_cannot_leak(self):
        """Perturbing position j leaves features before j bitwise unchanged."""
        stack = make_stack(posenc=True, causal=True)
        x = torch.randn(1, 6, 3, dtype=torch.float64)
        base = stack(x)
        for j in [2, 5]:
            x2 = x.clone()
            x2[0, j] += 1.0
            out = stack(x2)
            assert torch.equal(out[0, :j], base[0, :j])
            assert not torch.equal(out[0, j:], base[0, j:])

    def test_bidirectional_sees_everything(self):
        stack = make_stack(causal=False)
        x = torch.randn(1, 6, 3, dtype=torch.float64)
        base = stack(x)
        x2 = x.clone()
        x2[0, 5] += 1.0
        out = stack(x2)
        assert not torch.allclose(out[0, 0], base[0, 0])


class TestPaddingMask:
    def test_padded_positions_do_not_affect_valid_ones(self):
        stack = make_stack(posenc=True, causal=True)
        x = torch.randn(1, 4, 3, dtype=torch.float64)
        padded = torch.cat([x, torch.randn(1, 3, 3, dtype=torch.float64)], dim=1)
        mask = torch.tensor([[True] * 4 + [False] * 3])
        out_short = stack(x, torch.ones(1, 4, dtype=torch.bool))
        out_padded = stack(padded, mask)
        np.testing.assert_allclose(
            out_padded[0, :4].detach().numpy(),
            out_short[0].detach().numpy(),
            atol=1e-12,
        )

    def test_padding_content_irrelevant(self):
        stack = make_stack()
        x = torch.randn(2, 5, 3, dtype=torch.float64)
        mask = torch.tensor([[True, True, True, False, False]] * 2)
        x2 = x.clone()
        x2[:, 3:] = 99.0
        a, b = stack(x, mask), stack(x2, mask)
        assert torch.allclose(a[:, :3], b[:, :3], atol=1e-12)


class TestSetSymmetry:
    def test_equivariance_without_positions(self):
        stack = make_stack(posenc=False, causal=False)
        x = torch.randn(1, 7, 3, dtype=torch.float64)
        perm = torch.tensor([3, 0, 6, 1, 5, 2, 4])
        out = stack(x)
        out_perm = stack(x[:, perm])
        np.testing.assert_allclose(
            out_perm[0].detach().numpy(), out[0, perm].detach().numpy(), atol=1e-10
        )

    def test_positions_break_symmetry(self):
        stack = make_stack(posenc=True, causal=False)
        x = torch.randn(1, 7, 3, dtype=torch.float64)
        perm = torch.tensor([3, 0, 6, 1, 5, 2, 4])
        out = stack(x)
        out_perm = stack(x[:, perm])
        assert not torch.allclose(out_perm[0], out[0, perm], atol=1e-3)


class TestReadouts:
    def test_last_valid_indexing(self):
        feats = torch.arange(24, dtype=torch.float64).reshape(2, 4, 3)
        mask = torch.tensor([[True, True, False, False], [True] * 4])
        out = last_valid(feats, mask)
        np.testing.assert_array_equal(out[0].numpy(), feats[0, 1].numpy())
        np.testing.assert_array_equal(out[1].numpy(), feats[1, 3].numpy())

    def test_last_valid_no_mask(self):
        feats = torch.randn(2, 4, 3)
        assert torch.equal(last_valid(feats, None), feats[:, -1])

    def test_mean_valid_ignores_padding(self):
        feats = torch.ones(1, 3, 2, dtype=torch.float64)
        feats[0, 2] = 100.0
        mask = torch.tensor([[True, True, False]])
        np.testing.assert_allclose(mean_valid(feats, mask)[0].numpy(), [1.0, 1.0])

    def test_mean_valid_no_mask(self):
        feats = torch.randn(2, 4, 3, dtype=torch.float64)
        assert torch.allclose(mean_valid(feats, None), feats.mean(dim=1))


class TestDropoutConfig:
    def test_zero_dropout_is_deterministic_in_train_mode(self):
        stack = make_stack()
        stack.train()
        x = torch.randn(1, 5, 3, dtype=torch.float64)
        assert torch.equal(stack(x), stack(x))
