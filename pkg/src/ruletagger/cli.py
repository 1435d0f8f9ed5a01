"""Command-line entry points: run, apply-rules, eval, explain."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import driver, rules
from .corpus import load_corpus, load_phrase_lexicon, validate_corpus
from .driver import BootstrapConfig
from .rules import load_rules_jsonl, load_seed_rules


def _cmd_run(args) -> int:
    config = BootstrapConfig.load(args.config) if args.config else BootstrapConfig()
    train = load_corpus(args.train)
    report = validate_corpus(train)
    if not report.passed:
        print(report.summary(), file=sys.stderr)
        return 2
    dev = load_corpus(args.dev) if args.dev else None
    seeds = load_seed_rules(args.seeds)
    lexicon = load_phrase_lexicon(args.phrases) if args.phrases else None
    artifacts = driver.bootstrap(config, train, seeds, dev_corpus=dev,
                                 lexicon=lexicon, out_dir=args.out)
    print(f"done: {len(artifacts.ruleset)} rules, "
          f"{len(artifacts.predictions)} predictions, "
          f"best iteration {artifacts.best_iteration}")
    return 0


def _cmd_apply_rules(args) -> int:
    config = BootstrapConfig.load(args.config) if args.config else BootstrapConfig()
    corpus = load_corpus(args.corpus)
    seeds = load_seed_rules(args.seeds) if args.seeds else None
    ruleset = load_rules_jsonl(args.rules, seeds=seeds)
    lexicon = load_phrase_lexicon(args.phrases) if args.phrases else None
    spans = driver.apply_ruleset_to_corpus(ruleset, corpus, config, lexicon)
    with open(args.out, "w", encoding="utf-8") as fh:
        for sid, s, e, lab in spans:
            fh.write(json.dumps({"sentence": sid, "start": s, "end": e,
                                 "label": lab, "confidence": 1.0},
                                sort_keys=True) + "\n")
    print(f"wrote {len(spans)} rule-matched spans to {args.out}")
    return 0


def _load_predictions(path) -> list[driver.PredSpan]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            out.append((rec["sentence"], rec["start"], rec["end"], rec["label"]))
    return out


def _cmd_eval(args) -> int:
    predicted = _load_predictions(args.pred)
    gold_corpus = load_corpus(args.gold)
    if not gold_corpus.has_gold():
        print("gold corpus has no entity annotations", file=sys.stderr)
        return 2
    gold = driver.gold_spans(gold_corpus)
    metrics = (driver.boundary_prf(predicted, gold) if args.boundary_only
               else driver.micro_prf(predicted, gold))
    print(json.dumps(metrics.to_json(), indent=2, sort_keys=True))
    return 0


def _cmd_explain(args) -> int:
    run_dir = Path(args.run)
    src = run_dir / "explanations.jsonl"
    if not src.exists():
        print(f"no explanations.jsonl in {run_dir}", file=sys.stderr)
        return 2
    Path(args.out).write_text(src.read_text())
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ruletagger",
        description="Bootstrapped logical-rule induction and span tagging.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the full bootstrap loop")
    p.add_argument("--train", required=True)
    p.add_argument("--dev")
    p.add_argument("--seeds", required=True)
    p.add_argument("--phrases")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("apply-rules", help="label a corpus with a rule file only")
    p.add_argument("--rules", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--seeds")
    p.add_argument("--phrases")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_apply_rules)

    p = sub.add_parser("eval", help="score predictions against a gold corpus")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--boundary-only", action="store_true")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("explain", help="export rule explanations from a run")
    p.add_argument("--run", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_explain)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
