"""Command-line entry points: preprocess, mine-phrases, check."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .convert import PreprocessJob, preprocess_corpus
from .phrases import mine_phrases, write_lexicon
from .roundtrip import check_roundtrip


def _cmd_preprocess(args) -> int:
    job = PreprocessJob(input_path=args.input, fmt=args.format, lm=args.lm,
                        out_path=args.out, dim=args.dim)
    stats = preprocess_corpus(job)
    print(json.dumps(stats))
    report = check_roundtrip(args.out)
    if not report.passed:
        print(report.summary(), file=sys.stderr)
        return 2
    return 0


def _cmd_mine_phrases(args) -> int:
    phrases = mine_phrases(args.corpus, min_count=args.min_count,
                           max_len=args.max_len, pmi_floor=args.pmi_floor)
    write_lexicon(phrases, args.out)
    print(f"wrote {len(phrases)} phrases to {args.out}")
    return 0


def _cmd_check(args) -> int:
    report = check_roundtrip(args.corpus)
    print(report.summary())
    return 0 if report.passed else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corpusprep",
        description="Turn raw text or CoNLL files into tagger-ready corpus "
                    "JSONL, mine phrase lexicons, and verify output files.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="convert raw input to corpus JSONL")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("plain", "conll"), default="plain")
    p.add_argument("--lm", default="hash",
                   help="'hash' or a locally cached transformers model id")
    p.add_argument("--dim", type=int, default=64,
                   help="embedding width for the hash encoder")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("mine-phrases", help="build a phrase lexicon")
    p.add_argument("--corpus", required=True)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--pmi-floor", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mine_phrases)

    p = sub.add_parser("check", help="verify a corpus JSONL file")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=_cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
