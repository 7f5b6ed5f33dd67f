import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opmine.features import (
    FeatureDictionary,
    RuleLexicons,
    ZeroTotalCountError,
    apply_rule_tags,
    build_dictionary,
    compute_metric,
    extract_counts,
    metric_count,
    metric_frequency,
    metric_ifrequency,
    metric_presence,
    rule_adjusted_tokens,
)

NEG = RuleLexicons(negatory=frozenset({"not"}))
EMP = RuleLexicons(emphasizer=frozenset({"very"}))
BOTH = RuleLexicons(negatory=frozenset({"not"}), emphasizer=frozenset({"very"}))


class TestBuildDictionary:
    def test_min_count_pruning(self):
        d = build_dictionary([["a", "b"], ["a", "c"], ["a"]], sizes=(1,), min_count=2)
        assert list(d.entries) == [("a",)]
        assert d.doc_freq == (3,)
        assert d.n_docs == 3

    def test_no_pruning(self):
        d = build_dictionary([["a", "b"], ["a", "c"], ["a"]], sizes=(1,), min_count=1)
        assert set(d.entries) == {("a",), ("b",), ("c",)}

    def test_adjacent_bigrams(self):
        d = build_dictionary([["a", "b", "c"]], sizes=(2,), min_count=1)
        assert set(d.entries) == {("a", "b"), ("b", "c")}

    def test_mixed_sizes(self):
        d = build_dictionary([["a", "b"]], sizes=(1, 2), min_count=1)
        assert set(d.entries) == {("a",), ("b",), ("a", "b")}

    def test_total_occurrences_not_doc_freq(self):
        # "b" appears 3 times in one post: total-count pruning keeps it at min_count=3
        d = build_dictionary([["b", "b", "b"], ["a"], ["a"], ["a"]], sizes=(1,), min_count=3)
        assert set(d.entries) == {("a",), ("b",)}
        assert d.doc_freq[d.entries[("b",)]] == 1

    def test_everything_pruned_is_an_error(self):
        with pytest.raises(ValueError, match="untrainable"):
            build_dictionary([["a"], ["b"]], sizes=(1,), min_count=5)

    def test_indices_dense_and_ordered(self):
        d = build_dictionary([["b", "a"], ["c", "a"]], sizes=(1,), min_count=1)
        assert list(d.entries.values()) == [0, 1, 2]
        assert list(d.entries) == [("b",), ("a",), ("c",)]  # first-occurrence order


class TestRuleTransforms:
    def test_tag_merges_negation(self):
        assert apply_rule_tags(["not", "good"], NEG) == ["NEG_good"]

    def test_tag_merges_emphasis(self):
        assert apply_rule_tags(["very", "good"], EMP) == ["EMP_good"]

    def test_nearer_rule_word_binds(self):
        assert apply_rule_tags(["not", "very", "good"], BOTH) == ["EMP_good"]

    def test_trailing_rule_word_stays(self):
        assert apply_rule_tags(["good", "not"], BOTH) == ["good", "not"]

    def test_dictionary_sees_merged_tokens(self):
        streams = [rule_adjusted_tokens(["not", "good"], NEG, "tag")]
        d = build_dictionary(streams, sizes=(1,), min_count=1)
        assert ("NEG_good",) in d.entries

    def test_rules_required_for_non_off_modes(self):
        d = build_dictionary([["a"]], sizes=(1,), min_count=1)
        with pytest.raises(ValueError, match="rule"):
            extract_counts(["a"], d, rules=None, rule_mode="tag")
        with pytest.raises(ValueError, match="rule"):
            rule_adjusted_tokens(["a"], None, "signed-count")


class TestExtractCounts:
    def test_plain_counting(self):
        d = build_dictionary([["a", "b", "a"]], sizes=(1,), min_count=1)
        counts = extract_counts(["a", "b", "a", "z"], d)
        assert counts == {d.entries[("a",)]: 2, d.entries[("b",)]: 1}

    def test_tag_mode_counts_merged_unigram(self):
        streams = [rule_adjusted_tokens(["not", "good"], NEG, "tag")]
        d = build_dictionary(streams, sizes=(1,), min_count=1)
        counts = extract_counts(["not", "good"], d, NEG, "tag")
        assert counts == {d.entries[("NEG_good",)]: 1}

    def test_signed_emphasis_counts_double(self):
        d = build_dictionary([["good", "good"]], sizes=(1,), min_count=1)
        counts = extract_counts(["very", "good", "good"], d, EMP, "signed-count")
        assert counts == {d.entries[("good",)]: 3}  # 2 + 1

    def test_signed_negation_cancels(self):
        d = build_dictionary([["good", "good"]], sizes=(1,), min_count=1)
        counts = extract_counts(["not", "good", "good"], d, NEG, "signed-count")
        assert counts == {}  # -1 + 1 = 0, entry absent

    def test_signed_negation_alone_is_minus_one(self):
        d = build_dictionary([["good"]], sizes=(1,), min_count=1)
        counts = extract_counts(["not", "good"], d, NEG, "signed-count")
        assert counts == {d.entries[("good",)]: -1}

    def test_signed_bigrams_over_consumed_stream(self):
        d = build_dictionary([["good", "movie"]], sizes=(1, 2), min_count=1)
        counts = extract_counts(["not", "good", "movie"], d, NEG, "signed-count")
        assert counts[d.entries[("good", "movie")]] == 1
        assert counts[d.entries[("good",)]] == -1
        assert counts[d.entries[("movie",)]] == 1

    def test_out_of_dictionary_ngrams_skipped(self):
        d = build_dictionary([["a"]], sizes=(1,), min_count=1)
        assert extract_counts(["z", "q"], d) == {}

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.sampled_from(["a", "b", "c", "not", "very"]), max_size=15))
    def test_signed_mode_with_empty_lexicons_equals_off(self, tokens):
        empty = RuleLexicons()
        d = build_dictionary([["a", "b", "c", "not", "very"]], sizes=(1, 2), min_count=1)
        assert extract_counts(tokens, d, empty, "signed-count") == extract_counts(tokens, d)


def _dict_with(doc_freq, n_docs):
    entries = {(f"w{i}",): i for i in range(len(doc_freq))}
    return FeatureDictionary(
        entries=entries, doc_freq=tuple(doc_freq), n_docs=n_docs, ngram_sizes=(1,)
    )


class TestMetrics:
    def test_presence(self):
        vec = metric_presence({3: 2, 7: 1}, m=10)
        assert vec.values == {3: 1.0, 7: 1.0}

    def test_presence_empty(self):
        assert metric_presence({}, m=4).values == {}

    def test_presence_of_signed_count(self):
        assert metric_presence({5: -1}, m=6).values == {5: 1.0}

    def test_count_identity(self):
        assert metric_count({3: 2}).values == {3: 2.0}
        assert metric_count({}).values == {}
        assert metric_count({5: -1}).values == {5: -1.0}

    def test_frequency(self):
        vec = metric_frequency({1: 2, 2: 1, 3: 1})
        assert vec.values == {1: 0.5, 2: 0.25, 3: 0.25}

    def test_frequency_single_feature(self):
        assert metric_frequency({1: 5}).values == {1: 1.0}

    def test_frequency_zero_denominator(self):
        with pytest.raises(ZeroTotalCountError):
            metric_frequency({1: 1, 2: -1})

    def test_ifrequency_hand_value(self):
        # freq = 0.5 with n_docs/doc_freq = 10 gives 0.5 * ln(10)
        d = _dict_with(doc_freq=[10, 100], n_docs=100)
        vec = metric_ifrequency({0: 1, 1: 1}, d)
        assert vec.values[0] == pytest.approx(1.151292546497023, abs=1e-12)

    def test_ifrequency_full_document_frequency_vanishes(self):
        d = _dict_with(doc_freq=[10, 100], n_docs=100)
        vec = metric_ifrequency({0: 1, 1: 1}, d)
        assert 1 not in vec.values  # ln(100/100) = 0, zero never stored

    def test_ifrequency_single_doc_corpus_all_zero(self):
        d = _dict_with(doc_freq=[1, 1], n_docs=1)
        assert metric_ifrequency({0: 3, 1: 1}, d).values == {}

    def test_presence_index_bounds(self):
        with pytest.raises(ValueError, match="out of range"):
            metric_presence({9: 1}, m=3)


counts_strategy = st.dictionaries(
    st.integers(min_value=0, max_value=9), st.integers(min_value=1, max_value=6), max_size=8
)


@settings(max_examples=200, deadline=None)
@given(counts_strategy)
def test_frequency_sums_to_one_for_nonnegative_counts(counts):
    if not counts:
        return
    vec = metric_frequency(counts)
    assert sum(vec.values.values()) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(counts_strategy, st.integers(min_value=2, max_value=5))
def test_presence_invariant_under_count_scaling(counts, factor):
    scaled = {i: c * factor for i, c in counts.items()}
    assert metric_presence(counts, m=10).values == metric_presence(scaled, m=10).values


# --- brute-force recount oracle -------------------------------------------

def brute_force_counts(tokens, dictionary):
    """Scan the token list once per dictionary entry; no shared code with extract_counts."""
    out = {}
    for gram, idx in dictionary.entries.items():
        n = len(gram)
        hits = sum(1 for i in range(len(tokens) - n + 1) if tuple(tokens[i : i + n]) == gram)
        if hits:
            out[idx] = hits
    return out


def brute_force_metric(metric, counts, dictionary):
    if metric == "presence":
        return {i: 1.0 for i, c in counts.items() if c != 0}
    if metric == "count":
        return {i: float(c) for i, c in counts.items()}
    total = sum(counts.values())
    freq = {i: c / total for i, c in counts.items()}
    if metric == "frequency":
        return freq
    out = {}
    for i, f in freq.items():
        v = f * math.log(dictionary.n_docs / dictionary.doc_freq[i])
        if v != 0.0:
            out[i] = v
    return out


@settings(max_examples=120, deadline=None)
@given(
    posts=st.lists(
        st.lists(st.sampled_from("abcdef"), min_size=1, max_size=12), min_size=2, max_size=6
    ),
    sizes=st.sampled_from([(1,), (2,), (1, 2)]),
)
def test_metrics_agree_with_brute_force(posts, sizes):
    try:
        dictionary = build_dictionary(posts, sizes=sizes, min_count=1)
    except ValueError:
        return  # e.g. bigrams requested but every post has a single token
    for tokens in posts:
        counts = extract_counts(tokens, dictionary)
        assert counts == brute_force_counts(tokens, dictionary)
        for metric in ("presence", "count"):
            assert compute_metric(metric, counts, dictionary).values == brute_force_metric(
                metric, counts, dictionary
            )
        if sum(counts.values()) != 0:
            for metric in ("frequency", "ifrequency"):
                got = compute_metric(metric, counts, dictionary).values
                want = brute_force_metric(metric, counts, dictionary)
                assert got.keys() == want.keys()
                for i in got:
                    assert got[i] == pytest.approx(want[i], abs=1e-12)


def test_rule_lexicons_must_be_disjoint():
    with pytest.raises(ValueError, match="both"):
        RuleLexicons(negatory=frozenset({"x"}), emphasizer=frozenset({"x"}))
