"""Command-line interface: train on exported datasets, predict PGM masks."""

from __future__ import annotations

import argparse
import logging
import sys

from .predict import predict_to_pgm
from .train import TrainConfig, load_model, train


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="guidance-trainer",
        description="Waypoint-region predictor for grid planning datasets.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train on an exported dataset manifest")
    t.add_argument("--manifest", required=True)
    t.add_argument("--epochs", type=int, default=100)
    t.add_argument("--batch-size", type=int, default=128)
    t.add_argument("--learning-rate", type=float, default=1e-3)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--base-channels", type=int, default=16)
    t.add_argument("--out", default="model.pt")
    t.add_argument("--metrics", default=None, help="per-epoch metrics JSONL")

    p = sub.add_parser("predict", help="write a guidance mask for a map PPM")
    p.add_argument("--model", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=0.5)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    if args.command == "train":
        config = TrainConfig(
            manifest=args.manifest,
            epochs=args.epochs,
            batch_size=args.batch_size,
            learning_rate=args.learning_rate,
            seed=args.seed,
            base_channels=args.base_channels,
            model_out=args.out,
            metrics_out=args.metrics,
        )
        path, history = train(config)
        print(path)
        if history:
            print(f"final: {history[-1]}")
    else:
        model = load_model(args.model)
        predict_to_pgm(model, args.map, args.out, threshold=args.threshold)
        print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
