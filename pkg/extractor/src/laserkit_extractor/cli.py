"""Command line for the extractor: checkpoint + corpus TSVs in, dataset out."""

from __future__ import annotations

import argparse
import logging
import sys

from laserkit.errors import ConfigError, DataError

from .extract import ExtractionSpec, Pooling, extract


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="laserkit-extract",
        description="Extract per-layer contextual embeddings for sense-annotated "
        "tokens into the laserkit interchange format.",
    )
    p.add_argument("--model", required=True, help="checkpoint id or local path")
    p.add_argument("--corpus", required=True, action="append",
                   help="occurrence TSV; repeatable")
    p.add_argument("--out", required=True)
    p.add_argument("--pooling", choices=[m.value for m in Pooling], default="mean")
    p.add_argument("--max-tokens", type=int, default=512, dest="max_tokens")
    p.add_argument("--device", default="cpu")
    p.add_argument("--all-tokens", action="store_true",
                   help="also extract unannotated tokens")
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr)
    args = build_parser().parse_args(argv)
    spec_kwargs = dict(
        model_id=args.model,
        corpus_paths=args.corpus,
        subword_pooling=args.pooling,
        max_sentence_tokens=args.max_tokens,
        device=args.device,
        annotated_only=not args.all_tokens,
    )
    try:
        spec = ExtractionSpec(**spec_kwargs)
        stats = extract(spec, args.out)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    print(
        f"extracted {stats.n_occurrences} occurrences from {stats.n_sentences} "
        f"sentences (alignment drops: {stats.dropped_alignment}, "
        f"truncation drops: {stats.dropped_truncation})"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
