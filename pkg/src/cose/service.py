"""HTTP interface around a trained model.

Three endpoints: GET /health, POST /suggest (deterministic proposals plus
the raw position mixture for client-side heatmaps) and POST /rollout
(seeded sampling; the same request body always yields the same response).
Malformed input gets a 400 with a message; unexpected failures get a 500
carrying an opaque id that is also written to the log.
"""

from __future__ import annotations

import logging
import uuid

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .inference import rollout, suggest
from .ink import drawing_from_json
from .model import DrawingModel

logger = logging.getLogger("cose.service")


class SuggestRequest(BaseModel):
    strokes: list
    n_positions: int = Field(default=3, ge=1, le=10)
    n_per_position: int = Field(default=2, ge=1, le=10)
    n_points: int = Field(default=50, ge=2, le=500)


class RolloutRequest(BaseModel):
    strokes: list
    steps: int = Field(default=1, ge=0, le=50)
    seed: int = 0
    temperature: float = Field(default=1.0, ge=0.0, le=10.0)
    n_points: int = Field(default=50, ge=2, le=500)


def create_app(model: DrawingModel, checkpoint_id: str = "unknown") -> FastAPI:
    app = FastAPI(title="cose", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def _on_invalid_request(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        if errors:
            loc = ".".join(str(p) for p in errors[0].get("loc", ()))
            msg = f"invalid request: {loc}: {errors[0].get('msg', 'validation failed')}"
        else:
            msg = "invalid request"
        return JSONResponse(status_code=400, content={"error": msg})

    @app.exception_handler(ValueError)
    async def _on_bad_value(request: Request, exc: ValueError):
        # Covers ParseError from stroke decoding and range checks downstream.
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(Exception)
    async def _on_failure(request: Request, exc: Exception):
        err_id = uuid.uuid4().hex[:12]
        logger.error(
            "internal error %s on %s", err_id, request.url.path, exc_info=exc
        )
        return JSONResponse(
            status_code=500, content={"error": "internal error", "id": err_id}
        )

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "checkpoint": checkpoint_id,
            "latent_dim": model.codec_cfg.latent_dim,
            "parameters": model.parameter_count(),
        }

    @app.post("/suggest")
    def suggest_endpoint(req: SuggestRequest):
        drawing = drawing_from_json({"strokes": req.strokes})
        context = model.encode_drawing(drawing)
        position = model.predict_position(context)
        proposals = suggest(
            model,
            context,
            n_positions=req.n_positions,
            n_per_position=req.n_per_position,
            n_points=req.n_points,
        )
        return {
            "position_mixture": {
                "weights": position.weights.tolist(),
                "means": position.means.tolist(),
                "scales": position.scales.tolist(),
            },
            "suggestions": [
                {
                    "points": s.stroke.points.tolist(),
                    "position_weight": s.position_weight,
                    "embedding_weight": s.embedding_weight,
                }
                for s in proposals
            ],
        }

    @app.post("/rollout")
    def rollout_endpoint(req: RolloutRequest):
        drawing = drawing_from_json({"strokes": req.strokes})
        result = rollout(
            model,
            drawing,
            steps=req.steps,
            rng=req.seed,
            temperature=req.temperature,
            n_points=req.n_points,
        )
        return {
            "strokes": [s.points.tolist() for s in result.drawing.strokes],
            "generated_indices": list(result.generated_indices),
        }

    return app


def serve(
    model: DrawingModel,
    host: str = "127.0.0.1",
    port: int = 8080,
    checkpoint_id: str = "unknown",
) -> None:
    """Blocking uvicorn server around create_app."""
    import uvicorn

    uvicorn.run(
        create_app(model, checkpoint_id), host=host, port=port, log_level="warning"
    )
