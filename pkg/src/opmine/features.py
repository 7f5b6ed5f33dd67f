"""Bag-of-features representation: n-gram dictionary, rule-bigram transforms, metrics.

Four metrics score a post against a fixed dictionary of m n-grams:

  presence_i  = 1 if t_i != 0 else absent
  count_i     = t_i
  frequency_i = t_i / sum_j t_j           (over the post's in-dictionary entries)
  ifreq_i     = frequency_i * ln(n_docs / doc_freq_i)

where t_i is the (possibly rule-adjusted, hence signed) occurrence count of the
i-th n-gram in the post.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

RULE_MODE_OFF = "off"
RULE_MODE_TAG = "tag"
RULE_MODE_SIGNED = "signed-count"
RULE_MODES = (RULE_MODE_OFF, RULE_MODE_TAG, RULE_MODE_SIGNED)

METRIC_PRESENCE = "presence"
METRIC_COUNT = "count"
METRIC_FREQUENCY = "frequency"
METRIC_IFREQUENCY = "ifrequency"
METRICS = (METRIC_PRESENCE, METRIC_COUNT, METRIC_FREQUENCY, METRIC_IFREQUENCY)

NGRAM_SIZES = {
    "unigrams": (1,),
    "bigrams": (2,),
    "unigrams+bigrams": (1, 2),
}

NEG_TAG = "NEG_"
EMP_TAG = "EMP_"

NGram = tuple[str, ...]


class ZeroTotalCountError(ValueError):
    """Frequency metrics are undefined when the post's counts sum to zero."""


@dataclass(frozen=True)
class RuleLexicons:
    """Negation and emphasis word sets; a word may not belong to both."""

    negatory: frozenset[str] = frozenset()
    emphasizer: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        overlap = self.negatory & self.emphasizer
        if overlap:
            raise ValueError(f"words in both rule lexicons: {sorted(overlap)}")


@dataclass(frozen=True)
class FeatureDictionary:
    """Ordered n-gram -> dense index map with training document frequencies."""

    entries: dict[NGram, int] = field(hash=False)
    doc_freq: tuple[int, ...]
    n_docs: int
    ngram_sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.doc_freq) != len(self.entries):
            raise ValueError("doc_freq length must match the number of entries")
        if sorted(self.entries.values()) != list(range(len(self.entries))):
            raise ValueError("entry indices must be dense 0..m-1")
        for i, df in enumerate(self.doc_freq):
            if not 1 <= df <= self.n_docs:
                raise ValueError(f"doc_freq[{i}]={df} outside [1, n_docs={self.n_docs}]")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def size(self) -> int:
        return len(self.entries)

    def index_of(self, ngram: NGram) -> Optional[int]:
        return self.entries.get(ngram)

    def ngrams_in_order(self) -> list[NGram]:
        return list(self.entries)


def _post_ngrams(tokens: Sequence[str], sizes: Iterable[int]) -> Iterable[NGram]:
    for n in sizes:
        for i in range(len(tokens) - n + 1):
            yield tuple(tokens[i : i + n])


def _rule_walk(tokens: Sequence[str], rules: RuleLexicons) -> list[tuple[str, int]]:
    """Consume rule words and attach weights to the tokens they modify.

    Returns (token, weight) pairs: +2 for emphasized, -1 for negated, +1 otherwise.
    A rule word binds the next non-rule token; between stacked rule words the
    nearer one wins and the farther is dropped. A trailing rule word, having
    nothing to modify, stays in the stream as an ordinary token.
    """
    out: list[tuple[str, int]] = []
    pending: Optional[str] = None  # last unconsumed rule word's kind
    pending_word: Optional[str] = None
    for token in tokens:
        if token in rules.negatory:
            pending, pending_word = "neg", token
        elif token in rules.emphasizer:
            pending, pending_word = "emp", token
        elif pending == "neg":
            out.append((token, -1))
            pending = pending_word = None
        elif pending == "emp":
            out.append((token, 2))
            pending = pending_word = None
        else:
            out.append((token, 1))
    if pending_word is not None:
        out.append((pending_word, 1))
    return out


def apply_rule_tags(tokens: Sequence[str], rules: RuleLexicons) -> list[str]:
    """Merge rule words into their successors: "not good" -> "NEG_good"."""
    merged = []
    for token, weight in _rule_walk(tokens, rules):
        if weight == -1:
            merged.append(NEG_TAG + token)
        elif weight == 2:
            merged.append(EMP_TAG + token)
        else:
            merged.append(token)
    return merged


def rule_adjusted_tokens(tokens: Sequence[str], rules: Optional[RuleLexicons], rule_mode: str) -> list[str]:
    """Token stream as seen by the dictionary builder under the given rule mode.

    Occurrence weights never reach the dictionary: it counts raw occurrences of
    the surviving tokens, so doc_freq keeps its "contains at least once" meaning.
    """
    if rule_mode == RULE_MODE_OFF:
        return list(tokens)
    if rules is None:
        raise ValueError(f"rule_mode={rule_mode!r} requires rule lexicons")
    if rule_mode == RULE_MODE_TAG:
        return apply_rule_tags(tokens, rules)
    if rule_mode == RULE_MODE_SIGNED:
        return [t for t, _ in _rule_walk(tokens, rules)]
    raise ValueError(f"unknown rule_mode {rule_mode!r}")


def build_dictionary(
    training_posts: Sequence[Sequence[str]],
    sizes: tuple[int, ...],
    min_count: int,
) -> FeatureDictionary:
    """Index every n-gram of the given sizes with total occurrence count >= min_count.

    Indices follow first-occurrence order over the training posts, so the
    dictionary is a pure function of the input sequence. Pruning is by total
    corpus occurrences, not document frequency.
    """
    if not training_posts:
        raise ValueError("cannot build a dictionary from zero training posts")
    if min_count < 1:
        raise ValueError(f"min_count must be positive, got {min_count}")
    totals: dict[NGram, int] = {}
    doc_freq: dict[NGram, int] = {}
    for tokens in training_posts:
        seen: set[NGram] = set()
        for gram in _post_ngrams(tokens, sizes):
            totals[gram] = totals.get(gram, 0) + 1
            seen.add(gram)
        for gram in seen:
            doc_freq[gram] = doc_freq.get(gram, 0) + 1
    entries = {gram: idx for idx, gram in enumerate(g for g, c in totals.items() if c >= min_count)}
    if not entries:
        raise ValueError(
            f"no n-gram reached min_count={min_count}; configuration is untrainable"
        )
    return FeatureDictionary(
        entries=entries,
        doc_freq=tuple(doc_freq[g] for g in entries),
        n_docs=len(training_posts),
        ngram_sizes=tuple(sizes),
    )


def extract_counts(
    tokens: Sequence[str],
    dictionary: FeatureDictionary,
    rules: Optional[RuleLexicons] = None,
    rule_mode: str = RULE_MODE_OFF,
) -> dict[int, int]:
    """Sparse signed occurrence counts of in-dictionary n-grams for one post.

    tag mode rewrites the stream (rule word merged into its successor) and then
    counts normally; signed-count mode weights each modified unigram occurrence
    (+2 emphasized, -1 negated) and drops entries whose weights cancel to zero.
    N-grams longer than one token always count +1 per occurrence over the
    surviving stream.
    """
    if rule_mode not in RULE_MODES:
        raise ValueError(f"unknown rule_mode {rule_mode!r}")
    if rule_mode != RULE_MODE_OFF and rules is None:
        raise ValueError(f"rule_mode={rule_mode!r} requires rule lexicons")

    counts: dict[int, int] = {}
    if rule_mode == RULE_MODE_SIGNED:
        assert rules is not None
        weighted = _rule_walk(tokens, rules)
        stream = [t for t, _ in weighted]
        for n in dictionary.ngram_sizes:
            if n == 1:
                for token, weight in weighted:
                    idx = dictionary.index_of((token,))
                    if idx is not None:
                        counts[idx] = counts.get(idx, 0) + weight
            else:
                for i in range(len(stream) - n + 1):
                    idx = dictionary.index_of(tuple(stream[i : i + n]))
                    if idx is not None:
                        counts[idx] = counts.get(idx, 0) + 1
        return {i: c for i, c in counts.items() if c != 0}

    stream = rule_adjusted_tokens(tokens, rules, rule_mode)
    for gram in _post_ngrams(stream, dictionary.ngram_sizes):
        idx = dictionary.index_of(gram)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    return counts


@dataclass(frozen=True)
class FeatureVector:
    """Sparse index -> value map for one post under one metric."""

    values: dict[int, float] = field(hash=False)
    metric: str

    def __len__(self) -> int:
        return len(self.values)


def metric_presence(counts: Mapping[int, int], m: int) -> FeatureVector:
    for idx in counts:
        if not 0 <= idx < m:
            raise ValueError(f"index {idx} out of range for dictionary size {m}")
    return FeatureVector(values={i: 1.0 for i, c in counts.items() if c != 0}, metric=METRIC_PRESENCE)


def metric_count(counts: Mapping[int, int]) -> FeatureVector:
    return FeatureVector(values={i: float(c) for i, c in counts.items() if c != 0}, metric=METRIC_COUNT)


def metric_frequency(counts: Mapping[int, int]) -> FeatureVector:
    total = sum(counts.values())
    if total == 0:
        raise ZeroTotalCountError("total in-dictionary count is zero")
    return FeatureVector(
        values={i: c / total for i, c in counts.items() if c != 0}, metric=METRIC_FREQUENCY
    )


def metric_ifrequency(counts: Mapping[int, int], dictionary: FeatureDictionary) -> FeatureVector:
    freq = metric_frequency(counts)
    values = {}
    for i, f in freq.values.items():
        idf = math.log(dictionary.n_docs / dictionary.doc_freq[i])
        if f * idf != 0.0:
            values[i] = f * idf
    return FeatureVector(values=values, metric=METRIC_IFREQUENCY)


def compute_metric(
    metric: str, counts: Mapping[int, int], dictionary: FeatureDictionary
) -> FeatureVector:
    if metric == METRIC_PRESENCE:
        return metric_presence(counts, dictionary.size)
    if metric == METRIC_COUNT:
        return metric_count(counts)
    if metric == METRIC_FREQUENCY:
        return metric_frequency(counts)
    if metric == METRIC_IFREQUENCY:
        return metric_ifrequency(counts, dictionary)
    raise ValueError(f"unknown metric {metric!r}")
