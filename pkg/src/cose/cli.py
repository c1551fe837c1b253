"""Command-line entry points: ingest, train, eval, serve, synth."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .evaluation import evaluate_model
from .ink import (
    Drawing,
    ParseError,
    Stroke,
    load_drawings,
    normalize_drawing,
    resample_stroke,
    save_drawings,
)
from .service import serve
from .synthetic import synthetic_corpus
from .trainer import CheckpointError, TrainConfig, load_checkpoint, train


def _stroke_from_columns(entry, line_no: int, idx: int) -> Stroke:
    """One source stroke: [xs, ys] / [xs, ys, ts] or {"x": .., "y": .., "t": ..}."""
    if isinstance(entry, dict):
        if entry.get("x") is None or entry.get("y") is None:
            raise ParseError(f"line {line_no}, stroke {idx}: missing x/y arrays")
        cols = [entry["x"], entry["y"]]
        if entry.get("t") is not None:
            cols.append(entry["t"])
    elif isinstance(entry, (list, tuple)) and len(entry) in (2, 3):
        cols = list(entry)
    else:
        raise ParseError(f"line {line_no}, stroke {idx}: unrecognised stroke layout")
    try:
        arrs = [np.asarray(c, dtype=np.float64) for c in cols]
    except (TypeError, ValueError) as e:
        raise ParseError(f"line {line_no}, stroke {idx}: not numeric") from e
    if any(a.ndim != 1 for a in arrs) or len({len(a) for a in arrs}) != 1:
        raise ParseError(f"line {line_no}, stroke {idx}: ragged coordinate arrays")
    points = np.stack([arrs[0], arrs[1]], axis=1)
    times = arrs[2] if len(arrs) == 3 else None
    try:
        return Stroke(points, times)
    except ValueError as e:
        raise ParseError(f"line {line_no}, stroke {idx}: {e}") from e


def _cmd_ingest(args) -> int:
    """Converts column-oriented drawing dumps into the row-oriented NDJSON."""
    drawings = []
    with open(args.input) as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            if args.limit and len(drawings) >= args.limit:
                break
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"line {line_no}: invalid JSON ({e.msg})") from e
            raw = obj.get("drawing") if isinstance(obj, dict) else None
            if raw is None:
                raise ParseError(f"line {line_no}: missing 'drawing' key")
            strokes = [_stroke_from_columns(e, line_no, i) for i, e in enumerate(raw)]
            d = Drawing(strokes)
            if args.resample_ms > 0:
                d = d.map_strokes(
                    lambda s: resample_stroke(s, args.resample_ms)
                    if s.times is not None
                    else s
                )
            if args.normalize:
                d = normalize_drawing(d)
            drawings.append(d)
    save_drawings(args.out, drawings)
    print(f"wrote {len(drawings)} drawings to {args.out}")
    return 0


def _cmd_synth(args) -> int:
    drawings = synthetic_corpus(n_drawings=args.n, seed=args.seed)
    save_drawings(args.out, drawings)
    print(f"wrote {len(drawings)} synthetic drawings to {args.out}")
    return 0


def _cmd_train(args) -> int:
    corpus = load_drawings(args.data)
    if args.config:
        with open(args.config) as f:
            cfg = TrainConfig.from_dict(json.load(f))
    else:
        cfg = TrainConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.steps is not None:
        cfg.total_steps = args.steps
    result = train(cfg, corpus, out_dir=args.out, log_every=args.log_every)
    last = result.history[-1]
    print(
        f"finished {last['step']} steps: recon={last['recon_nll']:.4f} "
        f"pos={last['pos_nll']:.4f} emb={last['emb_nll']:.4f}"
    )
    print(f"checkpoint written to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    ckpt = load_checkpoint(args.ckpt)
    corpus = load_drawings(args.data)
    report = evaluate_model(ckpt.model, corpus, seed=args.seed)
    with open(args.report, "w") as f:
        json.dump(report.to_dict(), f, indent=2)
        f.write("\n")
    print(
        f"recon_cd={report.recon_cd:.5f} pred_cd={report.pred_cd:.5f} "
        f"silhouette={report.silhouette:.4f} ({report.n_drawings} drawings)"
    )
    print(f"report written to {args.report}")
    return 0


def _cmd_serve(args) -> int:
    ckpt = load_checkpoint(args.ckpt)
    print(f"serving checkpoint from step {ckpt.step} on {args.host}:{args.port}")
    serve(ckpt.model, host=args.host, port=args.port, checkpoint_id=str(ckpt.path))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cose", description="Compositional stroke-based drawing model."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="convert a raw drawing dump to NDJSON")
    p.add_argument("--format", choices=("didi", "quickdraw"), required=True)
    p.add_argument("--input", required=True, help="source NDJSON file")
    p.add_argument("--out", required=True, help="output NDJSON file")
    p.add_argument("--resample-ms", type=float, default=20.0,
                   help="temporal resampling step; 0 disables")
    p.add_argument("--no-normalize", dest="normalize", action="store_false",
                   help="skip unit-height normalization")
    p.add_argument("--limit", type=int, default=0, help="max drawings to convert")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("synth", help="generate the synthetic diagram corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train a model on an NDJSON corpus")
    p.add_argument("--data", required=True)
    p.add_argument("--config", help="JSON file with training settings")
    p.add_argument("--out", required=True, help="checkpoint/metrics directory")
    p.add_argument("--seed", type=int, help="overrides the configured seed")
    p.add_argument("--steps", type=int, help="overrides the configured step count")
    p.add_argument("--log-every", type=int, default=100)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on an NDJSON corpus")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report", required=True, help="output JSON report path")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="serve a checkpoint over HTTP")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, CheckpointError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
