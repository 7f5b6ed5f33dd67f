"""Two-stage classification pipeline and the cross-validated experiment grid.

Stage 1 separates objective from subjective posts; stage 2 assigns positive or
negative to the subjective ones. Each stage owns its dictionary, stemming trie
and classifier, all built from training posts only.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .classify import (
    NBModel,
    SVMHyperparams,
    SVMModel,
    predict_nb,
    predict_svm,
    train_nb,
    train_svm,
)
from .corpus import (
    GOLD_LABELS,
    LABEL_NEGATIVE,
    LABEL_OBJECTIVE,
    LABEL_POSITIVE,
    Corpus,
    Post,
    split_folds,
)
from .features import (
    METRICS,
    NGRAM_SIZES,
    RULE_MODE_OFF,
    RULE_MODE_SIGNED,
    RULE_MODE_TAG,
    RULE_MODES,
    FeatureDictionary,
    FeatureVector,
    RuleLexicons,
    ZeroTotalCountError,
    build_dictionary,
    compute_metric,
    extract_counts,
    rule_adjusted_tokens,
)
from .ioutil import atomic_write_text
from .preprocess import StopList, SuffixTrie, build_suffix_trie, remove_stop_words, stem_tokens, tokenize

logger = logging.getLogger(__name__)

CLASSIFIER_NB = "nb"
CLASSIFIER_SVM = "svm"
CLASSIFIERS = (CLASSIFIER_NB, CLASSIFIER_SVM)

RULE_SCOPE_NEGATION = "negation-only"
RULE_SCOPE_EMPHASIS = "emphasis-only"
RULE_SCOPE_BOTH = "both"
RULE_SCOPES = (RULE_SCOPE_NEGATION, RULE_SCOPE_EMPHASIS, RULE_SCOPE_BOTH)

LABEL_SUBJECTIVE = "subjective"

STAGE_SUBJECTIVITY = "subjectivity"
STAGE_POLARITY = "polarity"


@dataclass(frozen=True)
class PipelineConfig:
    """Everything that determines a trained pipeline besides the corpus itself."""

    metric: str = "ifrequency"
    classifier: str = CLASSIFIER_SVM
    ngrams: str = "unigrams"
    rule_mode: str = RULE_MODE_OFF
    rule_scope: str = RULE_SCOPE_BOTH
    stop_words: bool = False
    stemming: bool = False
    min_count: int = 5
    nb_smoothing: float = 1.0
    svm_lambda: float = 0.01
    svm_epochs: int = 30
    seed: int = 0

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"unknown classifier {self.classifier!r}")
        if self.ngrams not in NGRAM_SIZES:
            raise ValueError(f"unknown ngrams setting {self.ngrams!r}")
        if self.rule_mode not in RULE_MODES:
            raise ValueError(f"unknown rule_mode {self.rule_mode!r}")
        if self.rule_scope not in RULE_SCOPES:
            raise ValueError(f"unknown rule_scope {self.rule_scope!r}")
        if self.min_count < 1:
            raise ValueError(f"min_count must be positive, got {self.min_count}")

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "classifier": self.classifier,
            "ngrams": self.ngrams,
            "rule_mode": self.rule_mode,
            "rule_scope": self.rule_scope,
            "stop_words": self.stop_words,
            "stemming": self.stemming,
            "min_count": self.min_count,
            "nb_smoothing": self.nb_smoothing,
            "svm_lambda": self.svm_lambda,
            "svm_epochs": self.svm_epochs,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        return cls(**data)


@dataclass(frozen=True)
class StageModel:
    """One trained stage: its classes, dictionary, optional trie, and classifier."""

    name: str
    classes: tuple[str, str]  # (positive-role label, negative-role label)
    dictionary: FeatureDictionary
    nb: Optional[NBModel] = None
    svm: Optional[SVMModel] = None
    stem_trie: Optional[SuffixTrie] = None


@dataclass(frozen=True)
class TwoStageModel:
    config: PipelineConfig
    subjectivity: StageModel
    polarity: StageModel
    stop_list: Optional[StopList] = None
    rules: Optional[RuleLexicons] = None  # already narrowed to config.rule_scope


@dataclass(frozen=True)
class PostClassification:
    label: str  # objective | positive | negative
    subjectivity_score: float
    polarity_score: Optional[float]  # None when stage 1 said objective


def scoped_rules(rules: Optional[RuleLexicons], scope: str) -> Optional[RuleLexicons]:
    """Narrow the lexicons to the configured rule scope."""
    if rules is None:
        return None
    if scope == RULE_SCOPE_NEGATION:
        return RuleLexicons(negatory=rules.negatory, emphasizer=frozenset())
    if scope == RULE_SCOPE_EMPHASIS:
        return RuleLexicons(negatory=frozenset(), emphasizer=rules.emphasizer)
    return rules


def _base_tokens(text: str, config: PipelineConfig, stop_list: Optional[StopList]) -> list[str]:
    tokens = tokenize(text)
    if config.stop_words:
        assert stop_list is not None
        tokens = remove_stop_words(tokens, stop_list)
    return tokens


def vectorize(
    tokens: Sequence[str],
    dictionary: FeatureDictionary,
    config: PipelineConfig,
    rules: Optional[RuleLexicons],
    post_id: str = "?",
) -> FeatureVector:
    """Counts -> metric vector, with the two pipeline-level fallbacks.

    A zero total count under frequency metrics maps to an empty vector (logged);
    negative values are dropped for NB, whose event model cannot take them (the
    SVM consumes signed values as-is).
    """
    counts = extract_counts(tokens, dictionary, rules, config.rule_mode)
    try:
        vec = compute_metric(config.metric, counts, dictionary)
    except ZeroTotalCountError:
        logger.warning(
            "post %s: zero total in-dictionary count under metric %r; using empty vector",
            post_id,
            config.metric,
        )
        vec = FeatureVector(values={}, metric=config.metric)
    if config.classifier == CLASSIFIER_NB:
        vec = FeatureVector(
            values={i: v for i, v in vec.values.items() if v > 0}, metric=vec.metric
        )
    return vec


def _train_stage(
    name: str,
    classes: tuple[str, str],
    posts: Sequence[Post],
    labels: Sequence[str],
    config: PipelineConfig,
    stop_list: Optional[StopList],
    rules: Optional[RuleLexicons],
) -> StageModel:
    token_seqs = [_base_tokens(p.text, config, stop_list) for p in posts]
    trie: Optional[SuffixTrie] = None
    if config.stemming:
        vocabulary = {t for seq in token_seqs for t in seq}
        trie = build_suffix_trie(vocabulary)
        token_seqs = [stem_tokens(trie, seq) for seq in token_seqs]
    dict_streams = [rule_adjusted_tokens(seq, rules, config.rule_mode) for seq in token_seqs]
    dictionary = build_dictionary(dict_streams, NGRAM_SIZES[config.ngrams], config.min_count)
    vectors = [
        vectorize(seq, dictionary, config, rules, post_id=p.id)
        for seq, p in zip(token_seqs, posts)
    ]
    if config.classifier == CLASSIFIER_NB:
        nb = train_nb(
            vectors,
            list(labels),
            smoothing=config.nb_smoothing,
            vocab_size=dictionary.size,
            classes=classes,
        )
        return StageModel(name=name, classes=classes, dictionary=dictionary, nb=nb, stem_trie=trie)
    signs = [1 if lab == classes[0] else -1 for lab in labels]
    svm = train_svm(
        vectors,
        signs,
        lambda_=config.svm_lambda,
        epochs=config.svm_epochs,
        seed=config.seed,
        vocab_size=dictionary.size,
    )
    return StageModel(name=name, classes=classes, dictionary=dictionary, svm=svm, stem_trie=trie)


def train_two_stage(
    corpus: Corpus,
    config: PipelineConfig,
    stop_list: Optional[StopList] = None,
    rules: Optional[RuleLexicons] = None,
) -> TwoStageModel:
    """Train both stages from the corpus's labeled posts.

    Stage 1 sees every labeled post with positive/negative collapsed to
    "subjective"; stage 2 sees only the positive/negative posts. Dictionaries,
    tries and classifiers are functions of this corpus alone.
    """
    if config.stop_words and stop_list is None:
        raise ValueError("config enables stop_words but no stop list was provided")
    if config.rule_mode != RULE_MODE_OFF and rules is None:
        raise ValueError(f"config sets rule_mode={config.rule_mode!r} but no rule lexicons were provided")
    rules = scoped_rules(rules, config.rule_scope) if config.rule_mode != RULE_MODE_OFF else None

    labeled = corpus.labeled()
    for gold in GOLD_LABELS:
        if not any(p.label == gold for p in labeled):
            raise ValueError(f"no training posts labeled {gold!r}")

    subj_labels = [
        LABEL_SUBJECTIVE if p.label in (LABEL_POSITIVE, LABEL_NEGATIVE) else LABEL_OBJECTIVE
        for p in labeled
    ]
    subjectivity = _train_stage(
        STAGE_SUBJECTIVITY,
        (LABEL_SUBJECTIVE, LABEL_OBJECTIVE),
        labeled,
        subj_labels,
        config,
        stop_list,
        rules,
    )
    polar_posts = [p for p in labeled if p.label in (LABEL_POSITIVE, LABEL_NEGATIVE)]
    polarity = _train_stage(
        STAGE_POLARITY,
        (LABEL_POSITIVE, LABEL_NEGATIVE),
        polar_posts,
        [p.label for p in polar_posts],
        config,
        stop_list,
        rules,
    )
    return TwoStageModel(
        config=config,
        subjectivity=subjectivity,
        polarity=polarity,
        stop_list=stop_list if config.stop_words else None,
        rules=rules,
    )


def _predict_stage(
    stage: StageModel,
    tokens: Sequence[str],
    config: PipelineConfig,
    rules: Optional[RuleLexicons],
    post_id: str = "?",
) -> tuple[str, float]:
    stage_tokens = stem_tokens(stage.stem_trie, list(tokens)) if stage.stem_trie else list(tokens)
    vec = vectorize(stage_tokens, stage.dictionary, config, rules, post_id=post_id)
    if config.classifier == CLASSIFIER_NB:
        assert stage.nb is not None
        pred = predict_nb(stage.nb, vec)
        return str(pred.label), pred.score
    assert stage.svm is not None
    pred = predict_svm(stage.svm, vec)
    label = stage.classes[0] if pred.label == 1 else stage.classes[1]
    return label, pred.score


def classify_post(model: TwoStageModel, text: str, post_id: str = "?") -> PostClassification:
    """Stage 1 decides objective vs subjective; stage 2 runs only on subjective posts."""
    tokens = _base_tokens(text, model.config, model.stop_list)
    subj_label, subj_score = _predict_stage(
        model.subjectivity, tokens, model.config, model.rules, post_id
    )
    if subj_label == LABEL_OBJECTIVE:
        return PostClassification(
            label=LABEL_OBJECTIVE, subjectivity_score=subj_score, polarity_score=None
        )
    pol_label, pol_score = _predict_stage(model.polarity, tokens, model.config, model.rules, post_id)
    return PostClassification(
        label=pol_label, subjectivity_score=subj_score, polarity_score=pol_score
    )


def accuracy(predicted: Sequence[str], gold: Sequence[str]) -> float:
    """Fraction of exact matches between two equal-length non-empty label lists."""
    if len(predicted) != len(gold):
        raise ValueError(f"length mismatch: {len(predicted)} predictions vs {len(gold)} gold labels")
    if not gold:
        raise ValueError("cannot compute accuracy of empty lists")
    return sum(p == g for p, g in zip(predicted, gold)) / len(gold)


@dataclass(frozen=True)
class FoldEval:
    """Raw per-fold tallies; aggregation happens in aggregate_report."""

    subj_correct: int
    subj_total: int
    pol_correct: int
    pol_total: int
    e2e_correct: int
    e2e_total: int
    confusion: dict[str, dict[str, int]] = field(hash=False)


@dataclass(frozen=True)
class EvaluationReport:
    """Pooled accuracies come from summed fold tallies (so the end-to-end one
    equals confusion trace / total posts); the mean_* fields average the
    per-fold accuracies instead. With equal fold sizes the two coincide."""

    k: int
    fold_subjectivity: tuple[float, ...]
    fold_polarity: tuple[Optional[float], ...]
    fold_end_to_end: tuple[float, ...]
    subjectivity_accuracy: float
    polarity_accuracy: float
    end_to_end_accuracy: float
    mean_subjectivity: float
    mean_polarity: Optional[float]
    mean_end_to_end: float
    confusion: dict[str, dict[str, int]] = field(hash=False)
    n_posts: int = 0

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "fold_subjectivity": list(self.fold_subjectivity),
            "fold_polarity": list(self.fold_polarity),
            "fold_end_to_end": list(self.fold_end_to_end),
            "subjectivity_accuracy": self.subjectivity_accuracy,
            "polarity_accuracy": self.polarity_accuracy,
            "end_to_end_accuracy": self.end_to_end_accuracy,
            "mean_subjectivity": self.mean_subjectivity,
            "mean_polarity": self.mean_polarity,
            "mean_end_to_end": self.mean_end_to_end,
            "confusion": self.confusion,
            "n_posts": self.n_posts,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvaluationReport":
        return cls(
            k=data["k"],
            fold_subjectivity=tuple(data["fold_subjectivity"]),
            fold_polarity=tuple(data["fold_polarity"]),
            fold_end_to_end=tuple(data["fold_end_to_end"]),
            subjectivity_accuracy=data["subjectivity_accuracy"],
            polarity_accuracy=data["polarity_accuracy"],
            end_to_end_accuracy=data["end_to_end_accuracy"],
            mean_subjectivity=data["mean_subjectivity"],
            mean_polarity=data["mean_polarity"],
            mean_end_to_end=data["mean_end_to_end"],
            confusion=data["confusion"],
            n_posts=data["n_posts"],
        )


def evaluate_fold(
    train_corpus: Corpus,
    test_posts: Sequence[Post],
    config: PipelineConfig,
    stop_list: Optional[StopList] = None,
    rules: Optional[RuleLexicons] = None,
) -> FoldEval:
    """Train on train_corpus's labeled posts and evaluate on the held-out posts.

    Polarity-stage accuracy is measured against gold-subjective posts directly
    (not stage-1 survivors); end-to-end counts the final three-way label.
    """
    model = train_two_stage(train_corpus, config, stop_list, rules)
    subj_correct = subj_total = 0
    pol_correct = pol_total = 0
    e2e_correct = 0
    confusion = {g: {p: 0 for p in GOLD_LABELS} for g in GOLD_LABELS}
    for post in test_posts:
        tokens = _base_tokens(post.text, config, model.stop_list)
        gold_subj = (
            LABEL_SUBJECTIVE if post.label in (LABEL_POSITIVE, LABEL_NEGATIVE) else LABEL_OBJECTIVE
        )
        subj_label, _ = _predict_stage(model.subjectivity, tokens, config, model.rules, post.id)
        subj_total += 1
        subj_correct += subj_label == gold_subj
        pol_label = None
        if gold_subj == LABEL_SUBJECTIVE or subj_label == LABEL_SUBJECTIVE:
            pol_label, _ = _predict_stage(model.polarity, tokens, config, model.rules, post.id)
        if gold_subj == LABEL_SUBJECTIVE:
            pol_total += 1
            pol_correct += pol_label == post.label
        final = LABEL_OBJECTIVE if subj_label == LABEL_OBJECTIVE else pol_label
        e2e_correct += final == post.label
        confusion[post.label][final] += 1
    return FoldEval(
        subj_correct=subj_correct,
        subj_total=subj_total,
        pol_correct=pol_correct,
        pol_total=pol_total,
        e2e_correct=e2e_correct,
        e2e_total=len(test_posts),
        confusion=confusion,
    )


def aggregate_report(fold_evals: Sequence[FoldEval], k: int) -> EvaluationReport:
    """Pool fold tallies into one report; aggregate accuracies are micro-averaged
    so end-to-end accuracy equals the confusion-matrix trace over total posts."""
    confusion = {g: {p: 0 for p in GOLD_LABELS} for g in GOLD_LABELS}
    for ev in fold_evals:
        for g in GOLD_LABELS:
            for p in GOLD_LABELS:
                confusion[g][p] += ev.confusion[g][p]
    subj_total = sum(ev.subj_total for ev in fold_evals)
    pol_total = sum(ev.pol_total for ev in fold_evals)
    e2e_total = sum(ev.e2e_total for ev in fold_evals)
    fold_subj = tuple(ev.subj_correct / ev.subj_total for ev in fold_evals)
    fold_pol = tuple(
        (ev.pol_correct / ev.pol_total) if ev.pol_total else None for ev in fold_evals
    )
    fold_e2e = tuple(ev.e2e_correct / ev.e2e_total for ev in fold_evals)
    pol_defined = [a for a in fold_pol if a is not None]
    return EvaluationReport(
        k=k,
        fold_subjectivity=fold_subj,
        fold_polarity=fold_pol,
        fold_end_to_end=fold_e2e,
        subjectivity_accuracy=sum(ev.subj_correct for ev in fold_evals) / subj_total,
        polarity_accuracy=sum(ev.pol_correct for ev in fold_evals) / pol_total if pol_total else 0.0,
        end_to_end_accuracy=sum(ev.e2e_correct for ev in fold_evals) / e2e_total,
        mean_subjectivity=sum(fold_subj) / len(fold_subj),
        mean_polarity=sum(pol_defined) / len(pol_defined) if pol_defined else None,
        mean_end_to_end=sum(fold_e2e) / len(fold_e2e),
        confusion=confusion,
        n_posts=e2e_total,
    )


def cross_validate(
    corpus: Corpus,
    config: PipelineConfig,
    k: int = 10,
    stop_list: Optional[StopList] = None,
    rules: Optional[RuleLexicons] = None,
    stratified: bool = True,
) -> EvaluationReport:
    """k-fold cross validation; every fold rebuilds everything from its own training split."""
    plan = split_folds(corpus, k, config.seed, stratified=stratified)
    labeled = corpus.labeled()
    fold_evals: list[FoldEval] = []
    for fold in range(k):
        train_posts = tuple(p for p in labeled if plan.assignment[p.id] != fold)
        test_posts = [p for p in labeled if plan.assignment[p.id] == fold]
        for gold in GOLD_LABELS:
            if not any(p.label == gold for p in train_posts):
                raise ValueError(f"fold {fold}: no training posts labeled {gold!r}")
        fold_evals.append(
            evaluate_fold(Corpus(posts=train_posts), test_posts, config, stop_list, rules)
        )
    return aggregate_report(fold_evals, k)


# ---------------------------------------------------------------------------
# Experiment grids mirroring the four result tables
# ---------------------------------------------------------------------------

METRIC_ROW_NAMES = {
    "presence": "Presence",
    "count": "Count",
    "frequency": "Frequency",
    "ifrequency": "IFrequency",
}

NGRAM_ROW_NAMES = {
    "unigrams": "Unigrams only",
    "bigrams": "Bigrams only",
    "unigrams+bigrams": "Unigrams bigrams",
}

GRID_NAMES = ("table1", "table2", "table3", "table4")


@dataclass(frozen=True)
class GridCell:
    table: str
    block: str
    row: str
    classifier: str
    config: PipelineConfig


def grid_cells(table: str, base: PipelineConfig) -> list[GridCell]:
    """Expand a named experiment grid into concrete configs.

    table1: 4 metrics x 2 classifiers, unigrams, no preprocessing.
    table2: the same grid with stop-word removal and stemming enabled.
    table3: {unigrams, bigrams, both} x 2 classifiers for presence and ifrequency.
    table4: rule-bigram rows (baseline/negations/emphasizers/both) x 2 classifiers
            for presence (tag mode) and ifrequency (signed-count mode).
    """
    cells: list[GridCell] = []
    if table in ("table1", "table2"):
        preprocessing = table == "table2"
        for metric in METRICS:
            for clf in CLASSIFIERS:
                cfg = replace(
                    base,
                    metric=metric,
                    classifier=clf,
                    ngrams="unigrams",
                    rule_mode=RULE_MODE_OFF,
                    stop_words=preprocessing,
                    stemming=preprocessing,
                )
                cells.append(GridCell(table, "Accuracy", METRIC_ROW_NAMES[metric], clf, cfg))
    elif table == "table3":
        for metric in ("presence", "ifrequency"):
            for ngrams in ("unigrams", "bigrams", "unigrams+bigrams"):
                for clf in CLASSIFIERS:
                    cfg = replace(
                        base,
                        metric=metric,
                        classifier=clf,
                        ngrams=ngrams,
                        rule_mode=RULE_MODE_OFF,
                        stop_words=False,
                        stemming=False,
                    )
                    cells.append(
                        GridCell(table, METRIC_ROW_NAMES[metric], NGRAM_ROW_NAMES[ngrams], clf, cfg)
                    )
    elif table == "table4":
        rows = (
            ("Unigram", RULE_MODE_OFF, RULE_SCOPE_BOTH),
            ("Negations only", None, RULE_SCOPE_NEGATION),
            ("Emphasizers only", None, RULE_SCOPE_EMPHASIS),
            ("Both", None, RULE_SCOPE_BOTH),
        )
        for metric in ("presence", "ifrequency"):
            # tagging suits a presence representation; count-based metrics get
            # the signed occurrence adjustment instead
            block_mode = RULE_MODE_TAG if metric == "presence" else RULE_MODE_SIGNED
            for row_name, mode, scope in rows:
                for clf in CLASSIFIERS:
                    cfg = replace(
                        base,
                        metric=metric,
                        classifier=clf,
                        ngrams="unigrams",
                        rule_mode=mode if mode is not None else block_mode,
                        rule_scope=scope,
                        stop_words=False,
                        stemming=False,
                    )
                    cells.append(GridCell(table, METRIC_ROW_NAMES[metric], row_name, clf, cfg))
    else:
        raise ValueError(f"unknown grid {table!r}; expected one of {GRID_NAMES}")
    return cells


# ---------------------------------------------------------------------------
# Model serialization: versioned JSON with a dictionary fingerprint
# ---------------------------------------------------------------------------

MODEL_FORMAT = "opmine-two-stage"
MODEL_FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Raised when a model file cannot be parsed or fails its fingerprint check."""


def _dictionary_payload(dictionary: FeatureDictionary) -> dict:
    return {
        "ngrams": [list(g) for g in dictionary.ngrams_in_order()],
        "doc_freq": list(dictionary.doc_freq),
        "n_docs": dictionary.n_docs,
        "sizes": list(dictionary.ngram_sizes),
    }


def dictionary_fingerprint(dictionary: FeatureDictionary) -> str:
    blob = json.dumps(_dictionary_payload(dictionary), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _stage_payload(stage: StageModel, config: PipelineConfig) -> dict:
    payload: dict = {
        "classes": list(stage.classes),
        "dictionary": _dictionary_payload(stage.dictionary),
        "fingerprint": dictionary_fingerprint(stage.dictionary),
        "stem_vocabulary": sorted(stage.stem_trie.vocabulary) if stage.stem_trie else None,
    }
    if config.classifier == CLASSIFIER_NB:
        nb = stage.nb
        assert nb is not None
        payload["classifier"] = {
            "kind": CLASSIFIER_NB,
            "smoothing": nb.smoothing,
            "vocab_size": nb.vocab_size,
            "class_log_prior": {c: nb.class_log_prior[c] for c in nb.classes},
            "feature_log_likelihood": {
                c: nb.feature_log_likelihood[c].tolist() for c in nb.classes
            },
            "class_counts": {c: nb.class_counts[c] for c in nb.classes},
        }
    else:
        svm = stage.svm
        assert svm is not None
        payload["classifier"] = {
            "kind": CLASSIFIER_SVM,
            "lambda": svm.hyperparams.lambda_,
            "epochs": svm.hyperparams.epochs,
            "seed": svm.hyperparams.seed,
            "weights": svm.weights.tolist(),
            "bias": svm.bias,
            "n_pos": svm.n_pos,
            "n_neg": svm.n_neg,
        }
    return payload


def model_to_json(model: TwoStageModel) -> str:
    payload = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "tool_version": __version__,
        "config": model.config.to_dict(),
        "stop_words": sorted(model.stop_list.words) if model.stop_list else None,
        "rules": (
            {
                "negatory": sorted(model.rules.negatory),
                "emphasizer": sorted(model.rules.emphasizer),
            }
            if model.rules
            else None
        ),
        "stages": {
            STAGE_SUBJECTIVITY: _stage_payload(model.subjectivity, model.config),
            STAGE_POLARITY: _stage_payload(model.polarity, model.config),
        },
    }
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=1) + "\n"


def save_model(model: TwoStageModel, path: str | Path) -> None:
    atomic_write_text(Path(path), model_to_json(model))


def _dictionary_from_payload(payload: dict) -> FeatureDictionary:
    entries = {tuple(g): i for i, g in enumerate(payload["ngrams"])}
    return FeatureDictionary(
        entries=entries,
        doc_freq=tuple(payload["doc_freq"]),
        n_docs=payload["n_docs"],
        ngram_sizes=tuple(payload["sizes"]),
    )


def _stage_from_payload(name: str, payload: dict, config: PipelineConfig) -> StageModel:
    dictionary = _dictionary_from_payload(payload["dictionary"])
    actual = dictionary_fingerprint(dictionary)
    if actual != payload["fingerprint"]:
        raise ModelFormatError(
            f"stage {name!r}: dictionary fingerprint mismatch "
            f"(stored {payload['fingerprint'][:12]}..., computed {actual[:12]}...)"
        )
    classes = tuple(payload["classes"])
    trie = build_suffix_trie(payload["stem_vocabulary"]) if payload.get("stem_vocabulary") else None
    clf = payload["classifier"]
    if clf["kind"] == CLASSIFIER_NB:
        nb = NBModel(
            classes=classes,
            class_log_prior=dict(clf["class_log_prior"]),
            feature_log_likelihood={
                c: np.array(v, dtype=np.float64) for c, v in clf["feature_log_likelihood"].items()
            },
            smoothing=clf["smoothing"],
            vocab_size=clf["vocab_size"],
            class_counts=dict(clf["class_counts"]),
        )
        return StageModel(name=name, classes=classes, dictionary=dictionary, nb=nb, stem_trie=trie)
    svm = SVMModel(
        weights=np.array(clf["weights"], dtype=np.float64),
        bias=clf["bias"],
        hyperparams=SVMHyperparams(lambda_=clf["lambda"], epochs=clf["epochs"], seed=clf["seed"]),
        n_pos=clf["n_pos"],
        n_neg=clf["n_neg"],
    )
    return StageModel(name=name, classes=classes, dictionary=dictionary, svm=svm, stem_trie=trie)


def load_model(path: str | Path) -> TwoStageModel:
    try:
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"cannot parse model file {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path} is not a {MODEL_FORMAT} model file")
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {payload.get('format_version')!r}")
    config = PipelineConfig.from_dict(payload["config"])
    stop_list = StopList(words=frozenset(payload["stop_words"])) if payload.get("stop_words") else None
    rules = None
    if payload.get("rules"):
        rules = RuleLexicons(
            negatory=frozenset(payload["rules"]["negatory"]),
            emphasizer=frozenset(payload["rules"]["emphasizer"]),
        )
    return TwoStageModel(
        config=config,
        subjectivity=_stage_from_payload(
            STAGE_SUBJECTIVITY, payload["stages"][STAGE_SUBJECTIVITY], config
        ),
        polarity=_stage_from_payload(STAGE_POLARITY, payload["stages"][STAGE_POLARITY], config),
        stop_list=stop_list,
        rules=rules,
    )
