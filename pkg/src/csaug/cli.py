"""Command-line interface.

Conventions: stdout carries only data (TSV or JSON lines), all diagnostics
go to stderr.  Exit codes: 0 success, 1 data/validation error, 2 provider
failure, 64 usage error.  Every command that takes --seed is reproducible
bit for bit across runs and worker counts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from csaug import __version__
from csaug.augment import (
    LEVELS,
    AugmentationConfig,
    augment_dataset,
    plan_languages,
)
from csaug.corpus import FORMATS, compute_stats, format_dataset, read_dataset, write_dataset
from csaug.chunker import slot_chunks
from csaug.errors import (
    AugmentationError,
    ConfigurationError,
    CsaugError,
    DuplicateLexiconEntry,
    ProviderUnavailable,
    RateLimited,
    UnsupportedLanguage,
)
from csaug.families import family_rows
from csaug.translate import parse_provider

EXIT_OK = 0
EXIT_DATA = 1
EXIT_PROVIDER = 2
EXIT_USAGE = 64

TOKEN_ENV = "CSAUG_HTTP_TOKEN"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse parser that raises instead of exiting, so main() owns exit codes."""

    def error(self, message):
        raise _UsageError(message)


def load_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` config file; '#' starts a comment line."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    out: dict[str, str] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path} line {ln}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not key:
            raise ConfigurationError(f"{path} line {ln}: empty key")
        out[key] = value.strip().strip('"')
    return out


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {raw!r}")


def _codes(values: list[str] | None) -> frozenset[str]:
    out: set[str] = set()
    for v in values or []:
        out.update(c.strip() for c in v.split(",") if c.strip())
    return frozenset(out)


class _Resolver:
    """Flag value if given, else config file value, else default."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, name: str, default, cast=None):
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        if name in self.config:
            raw = self.config[name]
            return cast(raw) if cast else raw
        return default


def _echo(command: str, pairs: list[tuple[str, object]]) -> None:
    rendered = " ".join(f"{k}={v if v not in (None, '') else '-'}" for k, v in pairs)
    print(f"{command}: {rendered}", file=sys.stderr)


def cmd_augment(args: argparse.Namespace) -> int:
    r = _Resolver(args)
    input_path = r.get("input", None)
    if input_path is None:
        raise _UsageError("augment requires -i/--input (flag or config file)")
    provider_spec = r.get("provider", None)
    if provider_spec is None:
        raise _UsageError("augment requires --provider (flag or config file)")
    output = r.get("output", "-")
    fmt = r.get("format", "multiatis-tsv")
    level = r.get("level", "chunk")
    k = r.get("k", 5, int)
    allow = args.allow if args.allow is not None else None
    if allow is None and "allow" in r.config:
        allow = [r.config["allow"]]
    exclude = args.exclude if args.exclude is not None else None
    if exclude is None and "exclude" in r.config:
        exclude = [r.config["exclude"]]
    family = r.get("family", None)
    include_original = r.get("include_original", True, _parse_bool)
    seed = r.get("seed", 0, int)
    workers = r.get("workers", 1, int)
    cache_dir = r.get("cache_dir", None)
    audit = r.get("audit", None)
    repair = r.get("repair", False, _parse_bool)
    dry_run = r.get("dry_run", False, _parse_bool)
    source_lang = r.get("source_lang", "en")

    cfg = AugmentationConfig(
        level=level,
        k=k,
        allowed_languages=_codes(allow),
        excluded_languages=_codes(exclude),
        family=family,
        include_original=include_original,
        seed=seed,
    )
    provider = parse_provider(
        provider_spec, token=os.environ.get(TOKEN_ENV), cache_dir=cache_dir
    )
    ds = read_dataset(input_path, fmt, repair=repair, language=source_lang)
    _echo(
        "augment",
        [
            ("input", input_path),
            ("output", output),
            ("format", fmt),
            ("level", cfg.level),
            ("k", cfg.k),
            ("provider", provider_spec),
            ("allow", ",".join(sorted(cfg.allowed_languages))),
            ("exclude", ",".join(sorted(cfg.excluded_languages))),
            ("family", cfg.family),
            ("include_original", str(cfg.include_original).lower()),
            ("seed", cfg.seed),
            ("workers", workers),
            ("cache_dir", cache_dir),
            ("audit", audit),
            ("repair", str(repair).lower()),
            ("dry_run", str(dry_run).lower()),
            ("source_lang", source_lang),
            ("utterances", len(ds)),
        ],
    )

    if dry_run:
        for row in plan_languages(ds, cfg, provider):
            sys.stdout.write(json.dumps(row, sort_keys=True) + "\n")
        print(f"dry-run: planned {len(ds)} x k={cfg.k} utterances", file=sys.stderr)
        return EXIT_OK

    done = 0

    def progress(_i: int, total: int) -> None:
        nonlocal done
        done += 1
        if done % 50 == 0 or done == total:
            print(f"augmented {done}/{total}", file=sys.stderr)

    out_ds = augment_dataset(
        ds, cfg, provider, workers=workers, audit_path=audit, progress=progress
    )
    if output == "-":
        sys.stdout.write(format_dataset(out_ds, fmt))
    else:
        write_dataset(out_ds, output, fmt)
    print(f"wrote {len(out_ds)} utterances", file=sys.stderr)
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    ds = read_dataset(args.input, args.format, repair=args.repair)
    st = compute_stats(ds)
    rows = [
        ("utterances", st.utterance_count),
        ("tokens", st.token_count),
        ("intents", st.intent_count),
        ("slot_types", st.slot_type_count),
        ("slot_tags", st.slot_tag_count),
    ]
    for key, value in rows:
        sys.stdout.write(f"{key}\t{value}\n")
    print(f"stats: {args.input} ({args.format})", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    if args.output and not args.repair:
        raise _UsageError("validate -o requires --repair")
    ds = read_dataset(args.input, args.format, repair=args.repair)
    if args.repair and args.output:
        write_dataset(ds, args.output, args.format)
        print(
            f"ok: {len(ds)} utterances (repaired file written to {args.output})",
            file=sys.stderr,
        )
    else:
        print(f"ok: {len(ds)} utterances", file=sys.stderr)
    return EXIT_OK


def cmd_chunks(args: argparse.Namespace) -> int:
    ds = read_dataset(args.input, args.format, repair=args.repair)
    first = True
    for u in ds:
        if not first:
            sys.stdout.write("\n")
        first = False
        sys.stdout.write(f"# id = {u.id}\n")
        for c in slot_chunks(u):
            kind = c.slot_type if c.slot_type is not None else "O"
            sys.stdout.write(f"{c.start}..{c.end}\t{kind}\t{c.text}\n")
    print(f"chunks: {len(ds)} utterances", file=sys.stderr)
    return EXIT_OK


def cmd_families(_args: argparse.Namespace) -> int:
    for name, members in family_rows():
        sys.stdout.write(f"{name}\t{','.join(members)}\n")
    return EXIT_OK


def cmd_toy_train(args: argparse.Namespace) -> int:
    from csaug.toy import JointTrainingConfig, ToyJointModel, save_model, train

    ds = read_dataset(args.input, args.format, repair=args.repair)
    cfg = JointTrainingConfig(
        alpha=args.alpha,
        beta=args.beta,
        lr=args.lr,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
        patience=args.patience,
    )
    model = ToyJointModel.for_dataset(ds, dim=args.dim, ngram=args.ngram)
    _echo(
        "toy-train",
        [
            ("input", args.input),
            ("output", args.output),
            ("dim", args.dim),
            ("ngram", args.ngram),
            ("alpha", cfg.alpha),
            ("beta", cfg.beta),
            ("lr", cfg.lr),
            ("epochs", cfg.epochs),
            ("batch_size", cfg.batch_size),
            ("seed", cfg.seed),
            ("patience", cfg.patience),
            ("utterances", len(ds)),
            ("intents", len(model.intents)),
            ("tags", len(model.tags)),
        ],
    )
    result = train(model, ds, cfg)
    sys.stdout.write("epoch\tloss\tintent_loss\tslot_loss\n")
    for epoch, (total, li, lsl) in enumerate(
        zip(result.losses, result.intent_losses, result.slot_losses)
    ):
        sys.stdout.write(f"{epoch}\t{total:.6f}\t{li:.6f}\t{lsl:.6f}\n")
    save_model(model, args.output)
    print(
        f"trained {result.epochs_run} epochs, final loss {result.losses[-1]:.6f}, "
        f"model written to {args.output}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_toy_eval(args: argparse.Namespace) -> int:
    from csaug.toy import evaluate, load_model

    model = load_model(args.model)
    ds = read_dataset(args.input, args.format, repair=args.repair)
    ev = evaluate(model, ds)
    sys.stdout.write(f"metric\tintent_accuracy\t{ev.intent_accuracy:.6f}\n")
    sys.stdout.write(f"metric\tslot_precision\t{ev.span.precision:.6f}\n")
    sys.stdout.write(f"metric\tslot_recall\t{ev.span.recall:.6f}\n")
    sys.stdout.write(f"metric\tslot_f1\t{ev.span.f1:.6f}\n")
    sys.stdout.write(f"metric\ttoken_f1\t{ev.token.f1:.6f}\n")
    for intent, (correct, total) in ev.per_intent.items():
        sys.stdout.write(f"intent\t{intent}\t{correct}\t{total}\t{correct / total:.6f}\n")
    for slot_type, prf in ev.per_type.items():
        sys.stdout.write(
            f"slot_type\t{slot_type}\t{prf.precision:.6f}\t{prf.recall:.6f}\t{prf.f1:.6f}\n"
        )
    print(f"evaluated {len(ds)} utterances", file=sys.stderr)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    from csaug.toy import SyntheticCorpusSpec, generate_synthetic

    spec = SyntheticCorpusSpec(
        families=args.families,
        languages_per_family=args.languages_per_family,
        shared_root_within=args.shared_within,
        shared_root_across=args.shared_across,
        templates=args.templates,
        slot_types=args.slot_types,
        values_per_type=args.values_per_type,
        train_size=args.train_size,
        dev_size=args.dev_size,
        test_size=args.test_size,
        seed=args.seed,
    )
    corpus = generate_synthetic(spec)
    out = Path(args.out)
    corpus.write_datasets(out / "datasets")
    corpus.write_lexicons(out / "lexicons")
    print(
        f"wrote {len(corpus.datasets)} datasets and {len(corpus.lexicons)} lexicons "
        f"under {out} (languages: {','.join(corpus.languages)})",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from csaug.service import create_app

    provider = None
    if args.provider:
        provider = parse_provider(
            args.provider,
            token=os.environ.get(TOKEN_ENV),
            cache_dir=args.cache_dir,
        )
    app = create_app(provider)
    print(f"serving on http://{args.host}:{args.port}", file=sys.stderr)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def _add_io_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="dataset file to read")
    p.add_argument(
        "--format", choices=FORMATS, default="multiatis-tsv", help="dataset file format"
    )
    p.add_argument(
        "--repair",
        action="store_true",
        help="rewrite illegal I-x labels to B-x instead of failing",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="csaug", description="code-switching data augmentation")
    parser.add_argument("--version", action="version", version=f"csaug {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    p = sub.add_parser("augment", help="code-switch a dataset")
    p.add_argument("-i", "--input", help="input dataset file")
    p.add_argument("-o", "--output", help="output file, '-' for stdout (default)")
    p.add_argument("--format", choices=FORMATS, help="dataset file format")
    p.add_argument("--level", choices=LEVELS, help="switching granularity")
    p.add_argument("--k", type=int, help="code-switched copies per utterance")
    p.add_argument("--provider", help="lex:<dir> or http:<base-url>")
    p.add_argument(
        "--allow", action="append", metavar="CODES", help="comma-separated language pool"
    )
    p.add_argument(
        "--exclude",
        action="append",
        metavar="CODES",
        help="comma-separated languages to keep out of the pool",
    )
    p.add_argument("--family", help="restrict the pool to one language family")
    p.add_argument(
        "--include-original",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="keep source utterances in the output (default: yes)",
    )
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument("--workers", type=int, help="parallel workers (default 1)")
    p.add_argument("--cache-dir", help="translation cache directory")
    p.add_argument("--audit", help="write a JSON-lines audit log here")
    p.add_argument(
        "--dry-run",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="print the language plan as JSON lines; no translation calls",
    )
    p.add_argument(
        "--repair",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="rewrite illegal I-x labels to B-x instead of failing",
    )
    p.add_argument("--source-lang", help="language code of the input (default en)")
    p.add_argument("--config", help="key = value config file; flags win")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("stats", help="dataset statistics")
    _add_io_args(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("validate", help="check a dataset file")
    _add_io_args(p)
    p.add_argument("-o", "--output", help="with --repair: write the repaired dataset here")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("chunks", help="print chunk decompositions")
    _add_io_args(p)
    p.set_defaults(func=cmd_chunks)

    p = sub.add_parser("families", help="list language families")
    p.set_defaults(func=cmd_families)

    p = sub.add_parser("toy-train", help="train the toy joint model")
    _add_io_args(p)
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.add_argument("--dim", type=int, default=4096, help="hashed feature buckets")
    p.add_argument("--ngram", type=int, default=3, help="character n-gram size")
    p.add_argument("--alpha", type=float, default=1.0, help="intent loss weight")
    p.add_argument("--beta", type=float, default=0.6, help="slot loss weight")
    p.add_argument("--lr", type=float, default=8.0, help="learning rate")
    p.add_argument("--epochs", type=int, default=40)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--patience", type=int, default=None, help="stop after N epochs without improvement"
    )
    p.set_defaults(func=cmd_toy_train)

    p = sub.add_parser("toy-eval", help="evaluate a toy model")
    _add_io_args(p)
    p.add_argument("-m", "--model", required=True, help="model file from toy-train")
    p.set_defaults(func=cmd_toy_eval)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--families", type=int, default=3)
    p.add_argument("--languages-per-family", type=int, default=2)
    p.add_argument("--templates", type=int, default=6)
    p.add_argument("--slot-types", type=int, default=5)
    p.add_argument("--values-per-type", type=int, default=10)
    p.add_argument("--train-size", type=int, default=200)
    p.add_argument("--dev-size", type=int, default=40)
    p.add_argument("--test-size", type=int, default=100)
    p.add_argument("--shared-within", type=float, default=0.8)
    p.add_argument("--shared-across", type=float, default=0.1)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--provider", help="backing provider for /translate and /languages")
    p.add_argument("--cache-dir", help="translation cache directory")
    p.set_defaults(func=cmd_serve)

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
        print(f"csaug: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProviderUnavailable, RateLimited, UnsupportedLanguage) as exc:
        print(f"csaug: provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except AugmentationError as exc:
        print(f"csaug: {exc}", file=sys.stderr)
        return EXIT_PROVIDER if exc.provider_failure else EXIT_DATA
    except DuplicateLexiconEntry as exc:
        print(f"csaug: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConfigurationError as exc:
        print(f"csaug: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CsaugError as exc:
        print(f"csaug: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
