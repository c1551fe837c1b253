"""Helpers shared by the demo scripts: one toy model, trained on demand."""

from pathlib import Path

from cose import CodecConfig, RelationalConfig, TrainConfig, load_checkpoint, train
from cose.synthetic import synthetic_corpus
from cose.trainer import CHECKPOINT_FILENAME

OUT_DIR = Path(__file__).parent / "_out"
TOY_DIR = OUT_DIR / "toy"


def toy_config(total_steps: int = 800) -> TrainConfig:
    """Small enough to train on one CPU core in under a minute."""
    return TrainConfig(
        total_steps=total_steps,
        batch_size=32,
        seed=1,
        eval_every=total_steps,
        lr_schedule="exponential_decay",
        lr0=1e-3,
        dtype="float32",
        codec=CodecConfig(
            latent_dim=8,
            enc_layers=3,
            d_model=32,
            d_ff=64,
            heads=4,
            dec_layers=3,
            dec_width=128,
            dec_components=10,
        ),
        relational=RelationalConfig(
            layers=2, d_model=32, d_ff=64, heads=4, gmm_components=10
        ),
    )


def toy_checkpoint(retrain: bool = False) -> Path:
    """Path to a trained toy checkpoint, training one first if needed."""
    path = TOY_DIR / CHECKPOINT_FILENAME
    if path.exists() and not retrain:
        return path
    TOY_DIR.mkdir(parents=True, exist_ok=True)
    corpus = synthetic_corpus(n_drawings=32, seed=7)
    train(toy_config(), corpus, out_dir=TOY_DIR, log_every=100)
    return path


def toy_model():
    ckpt = load_checkpoint(toy_checkpoint())
    return ckpt.model
