"""Bootstrapped logical-rule induction and span tagging."""

from .candidates import (CandidateIndex, SpanCandidate, build_candidate_index,
                         enumerate_spans, initial_negative_spans,
                         merge_phrase_spans)
from .corpus import (Corpus, PhraseLexicon, Sentence, TokenRecord,
                     load_corpus, load_phrase_lexicon, save_corpus,
                     validate_corpus)
from .driver import (BootstrapConfig, Metrics, RunArtifacts, bootstrap,
                     boundary_prf, decode_predictions, explain, micro_prf)
from .learner import k_schedule, rlogf_score, rule_stats, select_new_rules
from .rules import (Rule, RuleSet, SimplePattern, WeakLabel, apply_rules,
                    enumerate_rule_candidates, extract_simple_patterns,
                    load_seed_rules, rule_matches)
from .selection import (HighPrecisionSet, SelectionParams, confidence_score,
                        dynamic_threshold, global_score, instance_embedding,
                        local_score, select_labels)
from .tagger import (NEG_LABEL, SpanPrediction, TaggerHyper, TaggerParams,
                     predict_corpus, predict_span, span_representation,
                     top_confident, train_tagger)

__all__ = [name for name in dir() if not name.startswith("_")]
