"""Command-line interface.

Conventions match the augmentation CLI: stdout carries only data (one
JSON object per command), diagnostics go to stderr.  Exit codes:
0 success, 1 data/resource error, 64 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from csaug_finetune import __version__
from csaug_finetune.config import MODES, SELECTIONS, FinetuneConfig
from csaug_finetune.data import read_examples
from csaug_finetune.errors import ConfigurationError, FinetuneError
from csaug_finetune.train import evaluate_checkpoint, finetune

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse parser that raises instead of exiting, so main() owns exit codes."""

    def error(self, message):
        raise _UsageError(message)


def cmd_finetune(args) -> int:
    config = FinetuneConfig(
        base_model=args.base_model,
        mode=args.mode,
        max_epochs=args.max_epochs,
        patience=args.patience,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        frozen_layers=args.frozen_layers,
        alpha=args.alpha,
        beta=args.beta,
        selection=args.selection,
        max_length=args.max_length,
        seed=args.seed,
        num_workers=args.workers,
    )
    train = read_examples(args.train)
    dev = read_examples(args.dev)
    log = None if args.quiet else sys.stderr
    result = finetune(config, train, dev, args.out, log=log)
    print(
        f"best epoch {result.best_epoch} "
        f"({config.selection} metric {result.best_metric:.4f}), "
        f"{result.epochs_run} epoch(s) run, wrote {result.checkpoint_path}",
        file=sys.stderr,
    )
    print(json.dumps(
        {
            "best_epoch": result.best_epoch,
            "best_metric": result.best_metric,
            "selection": config.selection,
            "epochs_run": result.epochs_run,
            "stopped_early": result.stopped_early,
            "checkpoint": str(result.checkpoint_path),
            "metrics": str(result.metrics_path),
        },
        sort_keys=True,
    ))
    return EXIT_OK


def cmd_eval(args) -> int:
    examples = read_examples(args.data)
    metrics = evaluate_checkpoint(args.run, examples, batch_size=args.batch_size)
    print(json.dumps(metrics, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="csaug-finetune",
        description="Joint intent/slot BERT fine-tuning on multiatis-tsv corpora.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("finetune", help="fine-tune a joint model and keep the best epoch")
    p.add_argument("--train", required=True, help="training set (multiatis-tsv)")
    p.add_argument("--dev", required=True, help="dev set for model selection (multiatis-tsv)")
    p.add_argument("--out", required=True, help="run directory for checkpoint and metrics")
    p.add_argument("--base-model", default="bert-base-multilingual-uncased",
                   help="model id or local directory (default %(default)s)")
    p.add_argument("--mode", choices=MODES, default="english-only",
                   help="data recipe the training file was produced with")
    p.add_argument("--max-epochs", type=int, default=25)
    p.add_argument("--patience", type=int, default=5)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--learning-rate", type=float, default=5e-5)
    p.add_argument("--frozen-layers", type=int, default=8,
                   help="transformer layers to freeze, 0..12 (default %(default)s)")
    p.add_argument("--alpha", type=float, default=1.0, help="intent loss weight")
    p.add_argument("--beta", type=float, default=0.6, help="slot loss weight")
    p.add_argument("--selection", choices=SELECTIONS, default="intent",
                   help="dev metric that picks the best epoch")
    p.add_argument("--max-length", type=int, default=128,
                   help="subword truncation length (default %(default)s)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=0, help="data-loading workers")
    p.add_argument("--quiet", action="store_true", help="suppress per-epoch progress")
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("eval", help="score a finished run on a dataset")
    p.add_argument("--run", required=True, help="run directory written by finetune")
    p.add_argument("--data", required=True, help="dataset to score (multiatis-tsv)")
    p.add_argument("--batch-size", type=int, default=32)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            print(parser.format_help(), file=sys.stderr, end="")
            return EXIT_USAGE
        return args.func(args)
    except _UsageError as exc:
        print(f"csaug-finetune: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigurationError as exc:
        print(f"csaug-finetune: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FinetuneError as exc:
        print(f"csaug-finetune: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
