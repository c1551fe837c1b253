"""What the two relational heads see and say.

Given the strokes drawn so far, each head reads the same bag of
(latent, start) pairs and answers one question:

  * position head: where will the next stroke start? (2-D mixture)
  * embedding head: given that start, what will it look like? (latent mixture)

Both heads treat the context as a set, so the order you drew in does not
matter. An untrained model is enough to see the mechanics; demo 04 trains
one for real.
"""

import numpy as np

from cose import Drawing, DrawingModel
from cose.gmm import mixture_mean, sample
from cose.relational import make_training_subsets
from cose.synthetic import box_stroke, circle_stroke

model = DrawingModel.create(seed=0, dtype="float64")

# --- 1. a partial drawing and its context

strokes = [
    box_stroke((0.0, 0.5), 0.5, 0.36),
    circle_stroke((0.9, 0.5), 0.24),
    box_stroke((1.8, 0.5), 0.5, 0.36),
]
ctx = model.encode_drawing(Drawing(strokes))
print(f"context: {len(ctx)} strokes, latent dim {ctx.latent_dim}")

# --- 2. the position head emits a 2-D mixture over next starts

pos = model.predict_position(ctx)
print(f"position mixture: {len(pos.weights)} components, "
      f"means {tuple(pos.means.shape)}, scales {tuple(pos.scales.shape)}")
print(f"mixture mean: {np.round(mixture_mean(pos).detach().numpy(), 3)}")

# --- 3. stroke order does not matter

perm_ctx = model.encode_drawing(Drawing(strokes[::-1]))
pos2 = model.predict_position(perm_ctx)
diff = (pos.means - pos2.means).abs().max().item()
print(f"reversed drawing order: max change in mixture means {diff:.1e}")

# --- 4. the embedding head is conditioned on where the stroke will start

rng = np.random.default_rng(0)
start = sample(pos, rng)
emb_here = model.predict_embedding(ctx, start)
emb_there = model.predict_embedding(ctx, start + np.array([1.0, 0.0]))
shift = (emb_here.means - emb_there.means).abs().max().item()
print(f"sampled start {np.round(start, 3)}; moving it by (1, 0) "
      f"moves the latent mixture means by up to {shift:.3f}")

# --- 5. how training pairs contexts with targets

subsets = make_training_subsets(n_strokes=4, rng=np.random.default_rng(1), n_subsets=6)
for given, target in subsets:
    print(f"  context {[int(i) for i in given]} -> predict stroke {target}")
