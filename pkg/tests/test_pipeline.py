import json

import pytest

from opmine.corpus import Corpus, Post, split_folds
from opmine.features import RuleLexicons
from opmine.pipeline import (
    EvaluationReport,
    ModelFormatError,
    PipelineConfig,
    accuracy,
    aggregate_report,
    classify_post,
    cross_validate,
    evaluate_fold,
    grid_cells,
    load_model,
    model_to_json,
    save_model,
    train_two_stage,
)
from opmine.preprocess import StopList, tokenize
from opmine.synthetic import generate_corpus, rule_lexicons


def tiny_corpus():
    return Corpus(
        posts=(
            Post(id="a", text="добро супер одлично", label="positive"),
            Post(id="b", text="лошо грозно ужасно", label="negative"),
            Post(id="c", text="факт вест извештај", label="objective"),
        )
    )


NB_CFG = PipelineConfig(metric="count", classifier="nb", min_count=1)


class TestConfig:
    def test_rejects_unknown_values(self):
        for bad in (
            {"metric": "tfidf"},
            {"classifier": "tree"},
            {"ngrams": "trigrams"},
            {"rule_mode": "on"},
            {"rule_scope": "none"},
            {"min_count": 0},
        ):
            with pytest.raises(ValueError):
                PipelineConfig(**bad)

    def test_dict_round_trip(self):
        cfg = PipelineConfig(metric="presence", classifier="nb", seed=9)
        assert PipelineConfig.from_dict(cfg.to_dict()) == cfg


class TestTrainTwoStage:
    def test_stage_training_subsets(self):
        model = train_two_stage(tiny_corpus(), NB_CFG)
        assert model.subjectivity.dictionary.n_docs == 3
        assert model.polarity.dictionary.n_docs == 2  # positive + negative posts only

    def test_missing_class_named(self):
        corpus = Corpus(posts=tiny_corpus().posts[:2])
        with pytest.raises(ValueError, match="objective"):
            train_two_stage(corpus, NB_CFG)

    def test_same_seed_identical_serialized_models(self, separable_corpus):
        cfg = PipelineConfig(metric="ifrequency", classifier="svm", min_count=2, svm_epochs=4)
        a = model_to_json(train_two_stage(separable_corpus, cfg))
        b = model_to_json(train_two_stage(separable_corpus, cfg))
        assert a == b

    def test_unlabeled_posts_ignored_in_training(self):
        with_extra = Corpus(posts=tiny_corpus().posts + (Post(id="u", text="добро добро"),))
        a = model_to_json(train_two_stage(tiny_corpus(), NB_CFG))
        b = model_to_json(train_two_stage(with_extra, NB_CFG))
        assert a == b

    def test_rule_mode_requires_lexicons(self):
        cfg = PipelineConfig(metric="presence", classifier="nb", rule_mode="tag", min_count=1)
        with pytest.raises(ValueError, match="lexicon"):
            train_two_stage(tiny_corpus(), cfg)

    def test_stop_flag_requires_list(self):
        cfg = PipelineConfig(metric="count", classifier="nb", stop_words=True, min_count=1)
        with pytest.raises(ValueError, match="stop"):
            train_two_stage(tiny_corpus(), cfg)

    def test_nb_accepts_signed_counts_via_clamping(self, separable_corpus):
        cfg = PipelineConfig(
            metric="count", classifier="nb", rule_mode="signed-count", min_count=2
        )
        model = train_two_stage(separable_corpus, cfg, rules=rule_lexicons())
        result = classify_post(model, separable_corpus.posts[0].text)
        assert result.label in ("positive", "negative", "objective")


class TestClassifyPost:
    def test_objective_short_circuits_polarity(self):
        model = train_two_stage(tiny_corpus(), NB_CFG)
        result = classify_post(model, "факт вест извештај")
        assert result.label == "objective"
        assert result.polarity_score is None

    def test_subjective_post_gets_polarity(self):
        model = train_two_stage(tiny_corpus(), NB_CFG)
        result = classify_post(model, "добро супер одлично")
        assert result.label == "positive"
        assert result.polarity_score is not None
        assert result.subjectivity_score != 0

    def test_empty_text_is_deterministic(self):
        model = train_two_stage(tiny_corpus(), NB_CFG)
        first = classify_post(model, "")
        again = classify_post(model, "")
        assert first == again
        assert first.label in ("positive", "negative", "objective")


class TestAccuracy:
    def test_exact_match_fraction(self):
        assert accuracy(["a", "b"], ["a", "b"]) == 1.0
        assert accuracy(["a", "b"], ["b", "a"]) == 0.0
        assert accuracy(["a", "b", "c", "d"], ["a", "b", "c", "x"]) == 0.75

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            accuracy(["a"], ["a", "b"])

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            accuracy([], [])


class TestCrossValidate:
    def test_separable_corpus_is_perfect(self, separable_corpus):
        cfg = PipelineConfig(metric="ifrequency", classifier="svm", min_count=2)
        report = cross_validate(separable_corpus, cfg, k=5)
        assert report.end_to_end_accuracy == 1.0
        assert report.subjectivity_accuracy == 1.0
        assert report.polarity_accuracy == 1.0

    def test_fold_error_identifies_fold(self):
        posts = [
            Post(id=f"s{i}", text=f"w{i} w{i+1} w{i+2}", label="positive" if i % 2 else "negative")
            for i in range(8)
        ]
        posts.append(Post(id="only-objective", text="факт вест", label="objective"))
        cfg = PipelineConfig(metric="count", classifier="nb", min_count=1)
        with pytest.raises(ValueError, match=r"fold \d"):
            cross_validate(Corpus(posts=tuple(posts)), cfg, k=2)

    def test_end_to_end_bounded_by_subjectivity_per_fold(self):
        noisy = generate_corpus(n_posts=120, seed=23, shared_fraction=0.6)
        cfg = PipelineConfig(metric="presence", classifier="nb", min_count=2)
        report = cross_validate(noisy, cfg, k=4)
        for e2e, subj in zip(report.fold_end_to_end, report.fold_subjectivity):
            assert e2e <= subj

    def test_confusion_matrix_consistency(self):
        noisy = generate_corpus(n_posts=120, seed=23, shared_fraction=0.6)
        cfg = PipelineConfig(metric="frequency", classifier="nb", min_count=2)
        report = cross_validate(noisy, cfg, k=4)
        trace = sum(report.confusion[lab][lab] for lab in report.confusion)
        total = sum(sum(row.values()) for row in report.confusion.values())
        assert total == len(noisy.labeled()) == report.n_posts
        assert report.end_to_end_accuracy == trace / total
        for lab, row in report.confusion.items():
            assert sum(row.values()) == sum(1 for p in noisy.labeled() if p.label == lab)

    def test_grid_reproducibility(self, separable_corpus):
        cfg = PipelineConfig(metric="presence", classifier="svm", min_count=2, svm_epochs=4)
        assert cross_validate(separable_corpus, cfg, k=3) == cross_validate(
            separable_corpus, cfg, k=3
        )

    def test_report_dict_round_trip(self, separable_corpus):
        cfg = PipelineConfig(metric="count", classifier="nb", min_count=2)
        report = cross_validate(separable_corpus, cfg, k=3)
        assert EvaluationReport.from_dict(json.loads(json.dumps(report.to_dict()))) == report


class TestNoLeakage:
    def test_deleting_test_posts_from_universe_changes_nothing(self):
        corpus = generate_corpus(n_posts=90, seed=31, shared_fraction=0.3)
        stop = StopList(frozenset({"vemos", "silno"}))
        cfg = PipelineConfig(
            metric="ifrequency",
            classifier="svm",
            min_count=2,
            stop_words=True,
            stemming=True,
            svm_epochs=5,
            seed=4,
        )
        k = 3
        report = cross_validate(corpus, cfg, k=k, stop_list=stop)
        plan = split_folds(corpus, k, cfg.seed, stratified=True)
        labeled = corpus.labeled()
        rebuilt = []
        for fold in range(k):
            test_posts = [p for p in labeled if plan.assignment[p.id] == fold]
            test_ids = {p.id for p in test_posts}
            universe = Corpus(posts=tuple(p for p in corpus if p.id not in test_ids))
            rebuilt.append(evaluate_fold(universe, test_posts, cfg, stop_list=stop))
        assert aggregate_report(rebuilt, k) == report

    def test_fold_dictionaries_contain_only_training_ngrams(self):
        corpus = generate_corpus(n_posts=60, seed=41)
        cfg = PipelineConfig(metric="presence", classifier="nb", min_count=1)
        plan = split_folds(corpus, 3, cfg.seed, stratified=True)
        labeled = corpus.labeled()
        for fold in range(3):
            train_posts = tuple(p for p in labeled if plan.assignment[p.id] != fold)
            model = train_two_stage(Corpus(posts=train_posts), cfg)
            subj_vocab = {t for p in train_posts for t in tokenize(p.text)}
            pol_vocab = {
                t
                for p in train_posts
                if p.label in ("positive", "negative")
                for t in tokenize(p.text)
            }
            assert all(g[0] in subj_vocab for g in model.subjectivity.dictionary.entries)
            assert all(g[0] in pol_vocab for g in model.polarity.dictionary.entries)


class TestGrids:
    def test_table1_shape(self):
        cells = grid_cells("table1", PipelineConfig())
        assert len(cells) == 8
        assert {c.row for c in cells} == {"Presence", "Count", "Frequency", "IFrequency"}
        assert {c.classifier for c in cells} == {"svm", "nb"}
        assert all(not c.config.stop_words and not c.config.stemming for c in cells)

    def test_table2_enables_preprocessing(self):
        cells = grid_cells("table2", PipelineConfig())
        assert len(cells) == 8
        assert all(c.config.stop_words and c.config.stemming for c in cells)

    def test_table3_rows(self):
        cells = grid_cells("table3", PipelineConfig())
        assert len(cells) == 12
        assert {c.block for c in cells} == {"Presence", "IFrequency"}
        rows = [c.row for c in cells if c.block == "Presence" and c.classifier == "svm"]
        assert rows == ["Unigrams only", "Bigrams only", "Unigrams bigrams"]

    def test_table4_rows_and_rule_modes(self):
        cells = grid_cells("table4", PipelineConfig())
        assert len(cells) == 16
        rows = [c.row for c in cells if c.block == "Presence" and c.classifier == "svm"]
        assert rows == ["Unigram", "Negations only", "Emphasizers only", "Both"]
        for c in cells:
            if c.row == "Unigram":
                assert c.config.rule_mode == "off"
            elif c.block == "Presence":
                assert c.config.rule_mode == "tag"
            else:
                assert c.config.rule_mode == "signed-count"
        scopes = {c.row: c.config.rule_scope for c in cells if c.block == "IFrequency"}
        assert scopes["Negations only"] == "negation-only"
        assert scopes["Emphasizers only"] == "emphasis-only"
        assert scopes["Both"] == "both"

    def test_unknown_grid(self):
        with pytest.raises(ValueError, match="table9"):
            grid_cells("table9", PipelineConfig())


class TestModelSerialization:
    def test_round_trip_preserves_predictions(self, tmp_path, separable_corpus):
        stop = StopList(frozenset({"vemos"}))
        cfg = PipelineConfig(
            metric="ifrequency",
            classifier="svm",
            min_count=2,
            stop_words=True,
            stemming=True,
            rule_mode="tag",
            svm_epochs=4,
        )
        model = train_two_stage(separable_corpus, cfg, stop_list=stop, rules=rule_lexicons())
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert model_to_json(loaded) == model_to_json(model)
        for post in separable_corpus.posts[:10]:
            assert classify_post(loaded, post.text) == classify_post(model, post.text)

    def test_nb_round_trip(self, tmp_path, separable_corpus):
        cfg = PipelineConfig(metric="presence", classifier="nb", min_count=2)
        model = train_two_stage(separable_corpus, cfg)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        for post in separable_corpus.posts[:10]:
            assert classify_post(loaded, post.text) == classify_post(model, post.text)

    def test_fingerprint_guards_dictionary_drift(self, tmp_path, separable_corpus):
        cfg = PipelineConfig(metric="count", classifier="nb", min_count=2)
        model = train_two_stage(separable_corpus, cfg)
        path = tmp_path / "model.json"
        save_model(model, path)
        payload = json.loads(path.read_text(encoding="utf-8"))
        payload["stages"]["subjectivity"]["dictionary"]["doc_freq"][0] += 1
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(ModelFormatError, match="fingerprint"):
            load_model(path)

    def test_corrupt_file_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ModelFormatError, match="parse"):
            load_model(path)
