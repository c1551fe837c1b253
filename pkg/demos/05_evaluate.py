"""Score a trained model: chamfer distances and latent-space structure.

Three numbers summarize a model. Reconstruction chamfer asks how closely
each stroke comes back from its own latent. Prediction chamfer hides one
stroke per drawing and asks the relational heads to redraw it; decoding is
stochastic, so the metric takes the best of several draws. The silhouette
score clusters the latents and reports how cleanly they separate, swept
over cluster counts and distance metrics.

Reuses the demo 04 checkpoint (training one if missing), then compares the
training corpus against drawings the model has never seen.
"""

import json

from _shared import TOY_DIR, toy_model
from cose import evaluate_model, prediction_chamfer, reconstruction_chamfer
from cose.synthetic import synthetic_corpus

model = toy_model()

# --- 1. the full report on the training corpus

seen = synthetic_corpus(n_drawings=32, seed=7)
report = evaluate_model(model, seen, seed=0)
print(f"model {report.model_fingerprint}: "
      f"{report.n_drawings} drawings, {report.n_strokes} strokes")
print(f"recon_cd   {report.recon_cd:.5f}")
print(f"pred_cd    {report.pred_cd:.5f}")
print(f"silhouette {report.silhouette:.3f} (best over the sweep)")
for key, score in sorted(report.silhouette_grid.items()):
    print(f"  {key:16s} {score:+.3f}")

# --- 2. fresh drawings from the same generator

unseen = synthetic_corpus(n_drawings=16, seed=99)
print(f"held out: recon_cd {reconstruction_chamfer(model, unseen):.5f}, "
      f"pred_cd {prediction_chamfer(model, unseen, seed=0):.5f}")

# --- 3. the report serializes for dashboards and regression diffs

out = TOY_DIR / "report.json"
out.write_text(json.dumps(report.to_dict(), indent=2))
print(f"wrote {out}")

# Same thing from the shell:
#
#   cose eval --ckpt demos/_out/toy --data corpus.ndjson --report report.json
