"""Compositional stroke-based drawing model.

Drawings are sets of strokes. Each stroke is compressed into a small latent
code plus its start position; order-invariant predictors over the codes
drawn so far propose where the next stroke starts and what it looks like.
"""

from .codec import CodecConfig, StrokeCodec, StrokeEmbedding
from .evaluation import (
    EvalReport,
    chamfer_distance,
    cluster_silhouette,
    embedding_silhouette,
    evaluate_model,
    prediction_chamfer,
    reconstruction_chamfer,
    silhouette_grid,
    stochastic_chamfer,
)
from .gmm import GMMParams, log_likelihood, mixture_mean, sample
from .inference import RolloutResult, Suggestion, rollout, suggest
from .ink import (
    AugmentParams,
    Drawing,
    ParseError,
    Stroke,
    augment_drawing,
    curve_point,
    curve_points,
    drawing_from_json,
    drawing_to_json,
    load_drawings,
    normalize_drawing,
    resample_stroke,
    save_drawings,
    spatial_resample,
)
from .model import DrawingModel
from .relational import DrawingContext, RelationalConfig, RelationalModel
from .service import create_app, serve
from .synthetic import synthetic_corpus, synthetic_drawing
from .trainer import (
    Checkpoint,
    CheckpointError,
    TrainConfig,
    TrainingDiverged,
    load_checkpoint,
    lr_at,
    save_checkpoint,
    train,
    train_step,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentParams",
    "Checkpoint",
    "CheckpointError",
    "CodecConfig",
    "Drawing",
    "DrawingContext",
    "DrawingModel",
    "EvalReport",
    "GMMParams",
    "ParseError",
    "RelationalConfig",
    "RelationalModel",
    "RolloutResult",
    "Stroke",
    "StrokeCodec",
    "StrokeEmbedding",
    "Suggestion",
    "TrainConfig",
    "TrainingDiverged",
    "augment_drawing",
    "chamfer_distance",
    "cluster_silhouette",
    "create_app",
    "curve_point",
    "curve_points",
    "drawing_from_json",
    "drawing_to_json",
    "embedding_silhouette",
    "evaluate_model",
    "load_checkpoint",
    "load_drawings",
    "log_likelihood",
    "lr_at",
    "mixture_mean",
    "normalize_drawing",
    "prediction_chamfer",
    "reconstruction_chamfer",
    "resample_stroke",
    "rollout",
    "sample",
    "save_checkpoint",
    "save_drawings",
    "serve",
    "silhouette_grid",
    "spatial_resample",
    "stochastic_chamfer",
    "suggest",
    "synthetic_corpus",
    "synthetic_drawing",
    "train",
    "train_step",
]
