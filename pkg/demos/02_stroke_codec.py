"""One stroke in, one latent out, any resolution back.

The codec reads a stroke as a set of points tagged with arc-length progress,
squeezes it into a short latent vector plus the start position, and decodes
by evaluating a learned curve at any t in [0, 1]. Decoding does not replay
the input points, so we can ask for 5 points or 500 from the same latent.

Here we overfit a tiny codec on a single sine stroke so the story is visible
without a long training run (about half a minute on one core).
"""

import time

import numpy as np

from cose import CodecConfig, Drawing, RelationalConfig, Stroke, TrainConfig, train

# --- 1. the stroke to learn: a smooth sine, 20 points

grid = np.linspace(0.0, 1.0, 20)
stroke = Stroke(np.stack([grid, 0.3 * np.sin(2.0 * np.pi * grid)], axis=1))

cfg = TrainConfig(
    total_steps=5000,
    batch_size=1,
    seed=3,
    eval_every=10**6,
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
    relational=RelationalConfig(layers=1, d_model=8, d_ff=16, heads=2, gmm_components=2),
)

t0 = time.time()
model = train(cfg, [Drawing([stroke])]).model
print(f"trained {cfg.total_steps} steps in {time.time() - t0:.0f}s")

# --- 2. encode: a latent vector and a start position

emb = model.encode(stroke)
print(f"latent dim {emb.latent.shape[0]}, start {np.round(emb.start, 3)}")

# --- 3. decode at the original resolution and check the fit

recon = model.reconstruct(emb, n=20)
err = np.linalg.norm(recon.points - stroke.points, axis=1)
print(f"n=20 reconstruction: mean err {err.mean():.4f}, max {err.max():.4f}")

# --- 4. same latent, other resolutions

for n in (5, 100):
    r = model.reconstruct(emb, n=n)
    ends = np.linalg.norm(r.points[[0, -1]] - stroke.points[[0, -1]], axis=1)
    print(f"n={n}: {len(r)} points, endpoint err {ends.max():.4f}")

# --- 5. the latent is translation-free; the start carries position
# (bitwise equal when the shift is exact in floats; here it matches to
# rounding because adding 2.0 drops low bits of the coordinates)

shifted = Stroke(stroke.points + np.array([2.0, -1.0]))
emb2 = model.encode(shifted)
drift = np.abs(emb2.latent - emb.latent).max()
print(f"shift by (2, -1): latent drift {drift:.1e}, start now {np.round(emb2.start, 3)}")

# --- 6. decoding is a mixture; "sample" mode draws instead of taking means

noisy = model.reconstruct(emb, n=20, mode="sample", rng=np.random.default_rng(0))
spread = np.linalg.norm(noisy.points - recon.points, axis=1).mean()
print(f"sampled decode wobbles by {spread:.4f} on average")
