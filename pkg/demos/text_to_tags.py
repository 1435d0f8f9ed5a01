"""Raw text to tagged entities, end to end across both packages.

Preprocesses plain sentences into corpus JSONL with the hash encoder,
mines a phrase lexicon, writes seed rules, runs a short bootstrap, and
prints what the rules plus tagger labeled.  Sixty sentences is far below
the scale the loop is built for, so expect a few noisy rules and labels
alongside the correct ones -- an honest picture of weak supervision.

Run:  python demos/text_to_tags.py
"""

import json
import tempfile
from pathlib import Path

from corpusprep.convert import PreprocessJob, preprocess_corpus
from corpusprep.phrases import mine_phrases, write_lexicon
from ruletagger import cli

# Twelve templates, five uses each; entity forms repeat ten times apiece.
# With min_count=8 only the entity bigrams survive phrase mining.
SENTENCES = [
    "The patient suffered from {d} for months.",
    "Nurses noted {d} in the older ward.",
    "A diagnosis of {d} was confirmed by the clinic.",
    "Records mention {d} after the first visit.",
    "Severe {d} remained a risk after surgery.",
    "Doctors monitored {d} throughout the winter.",
    "Doses of {c} were administered to every patient.",
    "The pharmacy stocked {c} in small vials.",
    "Treatment with {c} improved outcomes in the trial.",
    "Researchers measured {c} against a control.",
    "Exposure to {c} may cause harm over time.",
    "Labels warned about {c} near the cap.",
]
DISEASES = ["fibrosis", "anemia", "chronic fatigue"]
CHEMICALS = ["zorafenib", "acmezole", "delta cortexin"]

SEEDS = [
    {"type": "TokenString", "pattern": "fibrosis", "label": "Disease"},
    {"type": "TokenString", "pattern": "chronic fatigue", "label": "Disease"},
    {"type": "TokenString", "pattern": "zorafenib", "label": "Chemical"},
    {"type": "TokenString", "pattern": "delta cortexin", "label": "Chemical"},
]


def build_text():
    lines = []
    for i in range(60):
        template = SENTENCES[i % len(SENTENCES)]
        filler = (DISEASES if "{d}" in template else CHEMICALS)[i % 3]
        lines.append(template.format(d=filler, c=filler))
    return " ".join(lines)


def main():
    workdir = Path(tempfile.mkdtemp(prefix="text_to_tags_"))
    print(f"working in {workdir}\n")

    raw = workdir / "input.txt"
    raw.write_text(build_text())
    corpus = workdir / "corpus.jsonl"
    stats = preprocess_corpus(PreprocessJob(str(raw), fmt="plain",
                                            out_path=str(corpus), dim=32))
    print(f"preprocessed: {stats}")

    phrases = mine_phrases(corpus, min_count=8, max_len=3)
    lexicon = workdir / "phrases.txt"
    write_lexicon(phrases, lexicon)
    print(f"mined {len(phrases)} phrases, e.g. {phrases[:4]}")

    seeds = workdir / "seeds.json"
    seeds.write_text(json.dumps(SEEDS))
    config = workdir / "config.json"
    config.write_text(json.dumps({"iterations": 4, "epochs": 60, "k0": 3,
                                  "seed": 0}))
    out = workdir / "run"
    rc = cli.main(["run", "--train", str(corpus), "--dev", str(corpus),
                   "--seeds", str(seeds), "--phrases", str(lexicon),
                   "--config", str(config), "--out", str(out)])
    assert rc == 0

    rules = [json.loads(l) for l in (out / "rules.jsonl").read_text().splitlines()]
    print(f"\nlearned {len(rules)} rules; top examples:")
    for rec in rules[:5]:
        conj = " AND ".join(f"{c['type']}={c['pattern']}"
                            for c in rec["conjuncts"])
        print(f"  {conj} -> {rec['label']}  (precision {rec['precision']})")

    labeled = [json.loads(l)
               for l in (out / "explanations.jsonl").read_text().splitlines()]
    shown = set()
    print("\nsample labeled spans:")
    for e in labeled:
        if e["span"] in shown:
            continue
        shown.add(e["span"])
        origin = "rules+model" if not e["model_only"] else "model-only"
        print(f"  [{e['span']}] = {e['label']} ({origin})")
        if len(shown) >= 8:
            break


if __name__ == "__main__":
    main()
