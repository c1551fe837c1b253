"""Train a small model on the built-in diagram corpus.

One optimizer drives three losses per step: reconstruction of each stroke
from its own latent, and the two relational heads scored on random
context/target splits of each drawing. The relational heads see detached
latents, so prediction pressure never reshapes the codec's latent space.

Writes metrics.ndjson and checkpoint.pt under demos/_out/toy/. Other demos
reuse that checkpoint instead of retraining. Takes about a minute.
"""

import json
import time

from _shared import TOY_DIR, toy_config
from cose import train
from cose.synthetic import synthetic_corpus

# --- 1. corpus and configuration

corpus = synthetic_corpus(n_drawings=32, seed=7)
n_strokes = sum(len(d) for d in corpus)
print(f"corpus: {len(corpus)} drawings, {n_strokes} strokes")

cfg = toy_config(total_steps=800)
TOY_DIR.mkdir(parents=True, exist_ok=True)
# metrics append across runs; start this one clean
(TOY_DIR / "metrics.ndjson").unlink(missing_ok=True)

# --- 2. train, logging every 100 steps

t0 = time.time()
result = train(cfg, corpus, out_dir=TOY_DIR, log_every=100)
print(f"trained {cfg.total_steps} steps in {time.time() - t0:.0f}s, "
      f"{result.model.parameter_count():,} parameters")

# --- 3. the metrics file has one json object per eval

lines = [json.loads(l) for l in (TOY_DIR / "metrics.ndjson").read_text().splitlines()]
first, last = lines[0], lines[-1]
for name in ("recon_nll", "pos_nll", "emb_nll"):
    print(f"{name}: {first[name]:8.3f} -> {last[name]:8.3f}")
print(f"checkpoint: {TOY_DIR / 'checkpoint.pt'}")

# --- 4. optional loss curve

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    pass
else:
    steps = [l["step"] for l in lines]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for name in ("recon_nll", "pos_nll", "emb_nll"):
        ax.plot(steps, [l[name] for l in lines], label=name)
    ax.set_xlabel("step")
    ax.set_ylabel("nll")
    ax.legend()
    fig.tight_layout()
    out = TOY_DIR / "losses.png"
    fig.savefig(out, dpi=120)
    print(f"loss curve: {out}")
