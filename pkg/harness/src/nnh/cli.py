"""Command-line interface: nnh train | predict | provide."""

from __future__ import annotations

import argparse
import sys

from .formats import LAYERS
from .model import TaggerConfig
from .predict import predict_records
from .provide import provide_embeddings
from .train import train_tagger


def _cmd_train(args: argparse.Namespace) -> int:
    layers = tuple(args.layers.split(",")) if args.layers else tuple(LAYERS)
    config = TaggerConfig(
        cells=args.cells,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        lr_decay=args.lr_decay,
        batch_size=args.batch_size,
        layers=layers,
        seed=args.seed,
    )
    log = train_tagger(args.records, args.labels, config, args.model, args.log)
    losses = log["epoch_losses"]
    print(f"trained {config.epochs} epochs, loss {losses[0]:.4f} -> {losses[-1]:.4f}")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    count = predict_records(args.model, args.records, args.out, batch_size=args.batch_size)
    print(f"predicted {count} sentences")
    return 0


def _cmd_provide(args: argparse.Namespace) -> int:
    mode = "static" if args.static else "mock" if args.mock else None
    if mode is None:
        print("error: choose --mock or --static <vectors>", file=sys.stderr)
        return 2
    count = provide_embeddings(
        args.embed_in, args.embed_out, mode=mode, dim=args.dim, static_path=args.static
    )
    print(f"wrote {count} records")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nnh", description="Neural NER tagger and embedding provider")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the tagger on records plus labels")
    p_train.add_argument("--records", action="append", required=True, help="record file (repeatable)")
    p_train.add_argument("--labels", required=True, help="two-column labeled sentences")
    p_train.add_argument("--model", required=True, help="model artifact output path")
    p_train.add_argument("--log", default=None, help="JSON training-log path")
    p_train.add_argument("--layers", default=None, help="comma-separated input layers (default all three)")
    p_train.add_argument("--cells", type=int, default=2048)
    p_train.add_argument("--epochs", type=int, default=10)
    p_train.add_argument("--learning-rate", type=float, default=1e-4)
    p_train.add_argument("--lr-decay", type=float, default=1e-5)
    p_train.add_argument("--batch-size", type=int, default=32)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.set_defaults(func=_cmd_train)

    p_pred = sub.add_parser("predict", help="write predictions for record files")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--records", action="append", required=True)
    p_pred.add_argument("--out", required=True)
    p_pred.add_argument("--batch-size", type=int, default=32)
    p_pred.set_defaults(func=_cmd_predict)

    p_prov = sub.add_parser("provide", help="answer an embedding request file")
    p_prov.add_argument("--embed-in", required=True)
    p_prov.add_argument("--embed-out", required=True)
    p_prov.add_argument("--mock", action="store_true", help="hash-derived context-free vectors")
    p_prov.add_argument("--static", default=None, help="word2vec text file to serve")
    p_prov.add_argument("--dim", type=int, default=32, help="mock vector dimension")
    p_prov.add_argument("--seed", type=int, default=0, help="reserved for model-backed modes")
    p_prov.set_defaults(func=_cmd_provide)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
