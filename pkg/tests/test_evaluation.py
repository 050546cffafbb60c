import json
import logging
import math

import numpy as np
import pytest

from divsim import (
    Decision,
    EvaluationReport,
    MeasureSpec,
    build_model,
    build_test_sets,
    decide,
    default_k_grid,
    error_rate,
    evaluate_measures,
    make_latent_class_pairs,
    paired_t_test,
    run_curve,
    split_corpus,
)
from divsim.evaluation import (
    ReportRow,
    compare_measures,
    load_report_json,
    naive_curve_point,
    read_test_sets,
    summarize_ranges,
    unigram_baseline_rows,
    write_report_csv,
    write_report_json,
    write_test_sets,
)
from divsim.smoothing import Evidence

from conftest import counts_from


def small_experiment(seed=3):
    counts = make_latent_class_pairs(
        n_nouns=40, n_classes=4, n_verbs=40, tokens_per_noun=30, seed=seed
    )
    train, heldout = split_corpus(counts, 0.75, seed)
    model = build_model(train)
    sets = build_test_sets(model, heldout, 3, seed)
    return model, sets


class TestBuildTestSets:
    def heldout_fixture(self):
        # training: d and e are trained verbs unseen with n1; n1 saw a, b
        train = counts_from(
            [
                ("n1", "a", 10),
                ("n1", "b", 5),
                ("n2", "d", 9),
                ("n2", "e", 12),
                ("n2", "a", 1),
            ]
        )
        model = build_model(train)
        held = counts_from([("n1", "d", 1)])
        held.vocab = train.vocab
        # rebuild with shared vocab so ids line up
        held = counts_from([])
        held.vocab = train.vocab
        held.add("n1", "d", 1)
        return model, held

    def test_decoy_prefers_nearest_log_frequency(self):
        # freq(d)=9, candidates for decoy of (n1, d): e(12)? a,b seen with n1
        # albeit a also trained with n2: (n1, a) IS seen -> ineligible
        model, held = self.heldout_fixture()
        sets = build_test_sets(model, held, 2, seed=0)
        triples = [t for part in sets for t in part]
        assert len(triples) == 1
        t = triples[0]
        assert model.vocab.verbs.name_of(t.v1) == "d"
        assert model.vocab.verbs.name_of(t.v2) == "e"

    def test_decoy_log_rule_nine_vs_twelve(self):
        # v1 freq 10; eligible decoys freq 9 and 12 -> 9 wins
        train = counts_from(
            [("n1", "x", 1), ("m", "v1", 10), ("m", "lo", 9), ("m", "hi", 12)]
        )
        model = build_model(train)
        held = counts_from([])
        held.vocab = train.vocab
        held.add("n1", "v1", 1)
        sets = build_test_sets(model, held, 2, seed=0)
        t = [t for part in sets for t in part][0]
        assert model.vocab.verbs.name_of(t.v2) == "lo"
        assert abs(math.log(10) - math.log(9)) < abs(math.log(12) - math.log(10))

    def test_decoy_tie_breaks_lexicographically(self):
        # two decoys at identical frequency: ascending verb string wins
        train = counts_from(
            [("n1", "x", 1), ("m", "v1", 10), ("m", "zz", 9), ("m", "aa", 9)]
        )
        model = build_model(train)
        held = counts_from([])
        held.vocab = train.vocab
        held.add("n1", "v1", 1)
        sets = build_test_sets(model, held, 2, seed=0)
        t = [t for part in sets for t in part][0]
        assert model.vocab.verbs.name_of(t.v2) == "aa"

    def test_pairs_seen_in_training_are_discarded(self):
        train = counts_from([("n1", "a", 3), ("n1", "b", 2), ("m", "c", 4)])
        model = build_model(train)
        held = counts_from([])
        held.vocab = train.vocab
        held.add("n1", "a", 2)  # seen
        held.add("n1", "c", 1)  # unseen, decoy must be b? b seen with n1 -> none... c's decoys: a,b seen -> dropped
        with pytest.raises(ValueError, match="no test triples"):
            build_test_sets(model, held, 2, seed=0)

    def test_unknown_or_untrained_words_drop_with_warning(self, caplog):
        train = counts_from([("n1", "a", 3), ("m", "b", 2), ("m", "c", 2)])
        model = build_model(train)
        held = counts_from([])
        held.vocab = train.vocab
        held.add("ghost", "b", 1)  # noun never trained
        held.add("n1", "zzz", 1)  # verb never trained
        held.add("n1", "b", 1)  # fine: decoy c
        with caplog.at_level(logging.WARNING):
            sets = build_test_sets(model, held, 2, seed=0)
        assert sum(len(s) for s in sets) == 1
        messages = " ".join(r.message for r in caplog.records)
        assert "no trained distribution" in messages
        assert "unseen in training" in messages

    def test_partition_count_validated(self):
        model, held = self.heldout_fixture()
        with pytest.raises(ValueError, match="partitions"):
            build_test_sets(model, held, 1, seed=0)

    def test_triple_invariants_hold_exhaustively(self):
        model, sets = small_experiment()
        for part in sets:
            assert part, "empty partition"
            for t in part:
                dist = model.conditional(t.n)
                assert t.v1 != t.v2
                assert dist.get(t.v1) == 0.0, "v1 seen in training"
                assert dist.get(t.v2) == 0.0, "v2 seen in training"
                assert model.verb_unigram.get(t.v1, 0.0) > 0.0
                assert model.verb_unigram.get(t.v2, 0.0) > 0.0

    def test_round_robin_sizes_and_determinism(self):
        model, sets = small_experiment()
        sizes = [len(s) for s in sets]
        assert max(sizes) - min(sizes) <= 1
        model2, sets2 = small_experiment()
        assert [
            [(t.n, t.v1, t.v2) for t in part] for part in sets
        ] == [[(t.n, t.v1, t.v2) for t in part] for part in sets2]


class TestDecide:
    def test_majority_and_ties(self):
        assert decide(Evidence(3, 1, 5)) is Decision.V1
        assert decide(Evidence(1, 3, 5)) is Decision.V2
        assert decide(Evidence(0, 0, 5)) is Decision.TIE
        assert decide(Evidence(2, 2, 5)) is Decision.TIE


class TestErrorRate:
    def test_fixture(self):
        decisions = [Decision.V1, Decision.V1, Decision.V2, Decision.TIE]
        assert error_rate(decisions) == 0.375

    def test_extremes(self):
        assert error_rate([Decision.V1] * 7) == 0.0
        assert error_rate([Decision.TIE] * 4) == 0.5
        assert error_rate([Decision.V2] * 3) == 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            error_rate([])


class TestRunCurve:
    def test_matches_naive_composition_everywhere(self):
        model, sets = small_experiment()
        n = len(model.noun_set)
        k_grid = [1, 3, 7, n]
        for kind in ("l1", "js", "kl", "tau", "confusion", "skew"):
            spec = MeasureSpec(kind, 0.99)
            rows = run_curve(model, spec, sets, k_grid)
            for row in rows:
                want = naive_curve_point(model, spec, sets[row.partition], row.k)
                assert row.error_rate == want, (kind, row.k, row.partition)

    def test_full_k_collapse_across_measures(self):
        model, sets = small_experiment()
        n = len(model.noun_set)
        per_measure = {}
        for kind in ("l1", "l2", "cosine", "jaccard", "js", "kl", "confusion", "tau", "skew"):
            rows = run_curve(model, MeasureSpec(kind, 0.99), sets, [n])
            per_measure[kind] = [r.error_rate for r in sorted(rows, key=lambda r: r.partition)]
        reference = per_measure["l1"]
        for kind, errs in per_measure.items():
            assert errs == reference, kind

    def test_row_cardinality_and_fields(self):
        model, sets = small_experiment()
        rows = run_curve(model, MeasureSpec("js"), sets, [1, 5])
        assert len(rows) == 2 * len(sets)
        for row in rows:
            assert row.measure == "js"
            assert row.n_triples == len(sets[row.partition])
            assert 0.0 <= row.error_rate <= 1.0

    def test_k_out_of_range_rejected(self):
        model, sets = small_experiment()
        with pytest.raises(ValueError):
            run_curve(model, MeasureSpec("js"), sets, [0])
        with pytest.raises(ValueError):
            run_curve(model, MeasureSpec("js"), sets, [len(model.noun_set) + 1])


class TestUnigramBaselineRows:
    def test_error_constant_across_k(self):
        model, sets = small_experiment()
        rows = unigram_baseline_rows(model, sets, [1, 5, 9])
        by_partition = {}
        for row in rows:
            by_partition.setdefault(row.partition, set()).add(row.error_rate)
        assert all(len(v) == 1 for v in by_partition.values())
        assert len(rows) == 3 * len(sets)


class TestSummaries:
    def test_ranges(self):
        rows = [
            ReportRow("js", 5, 0, 0.2, 10),
            ReportRow("js", 5, 1, 0.4, 10),
            ReportRow("js", 5, 2, 0.3, 10),
        ]
        (r,) = summarize_ranges(rows)
        assert (r.measure, r.k) == ("js", 5)
        assert r.mean == pytest.approx(0.3)
        assert (r.min, r.max) == (0.2, 0.4)

    def test_default_k_grid(self):
        assert default_k_grid(1000) == [1, 5, 10, 25, 50, 100, 200, 400, 700, 1000]
        assert default_k_grid(30) == [1, 5, 10, 25, 30]
        assert default_k_grid(1) == [1]
        with pytest.raises(ValueError):
            default_k_grid(0)


class TestPairedTTest:
    def test_textbook_fixture(self):
        t, p, df = paired_t_test([1.0, 2.0, 3.0, 4.0, 5.0], [0.0] * 5)
        np.testing.assert_allclose(t, 4.242640687119285, rtol=1e-9)
        assert df == 4
        np.testing.assert_allclose(p, 0.013235599563682695, rtol=1e-9)

    def test_identical_samples(self):
        t, p, df = paired_t_test([0.1, 0.2, 0.3], [0.1, 0.2, 0.3])
        assert (t, p, df) == (0.0, 1.0, 2)

    def test_constant_nonzero_difference_degenerates(self):
        t, p, _ = paired_t_test([1.0, 1.0, 1.0], [0.0, 0.0, 0.0])
        assert t == math.inf and p == 0.0
        t, p, _ = paired_t_test([0.0, 0.0, 0.0], [1.0, 1.0, 1.0])
        assert t == -math.inf and p == 0.0

    def test_swap_negates_t_preserves_p(self):
        a = [0.3, 0.1, 0.4, 0.15]
        b = [0.2, 0.2, 0.1, 0.4]
        t1, p1, _ = paired_t_test(a, b)
        t2, p2, _ = paired_t_test(b, a)
        assert t1 == -t2
        np.testing.assert_allclose(p1, p2, rtol=1e-12)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            paired_t_test([1.0], [2.0])
        with pytest.raises(ValueError):
            paired_t_test([1.0, 2.0], [1.0])


class TestEvaluateMeasures:
    def test_full_report_shape(self):
        model, sets = small_experiment()
        specs = [MeasureSpec("js"), MeasureSpec("skew", 0.99)]
        report = evaluate_measures(model, specs, sets, [1, 5])
        assert len(report.rows) == 2 * 2 * len(sets)
        assert {r.measure for r in report.rows} == {"js", "skew"}
        assert len(report.ranges) == 4
        assert {(t.measure_a, t.measure_b) for t in report.ttests} == {("js", "skew")}
        for t in report.ttests:
            assert t.df == len(sets) - 1

    def test_compare_measures_missing_rows_rejected(self):
        rows = [ReportRow("js", 5, 0, 0.2, 4), ReportRow("js", 5, 1, 0.1, 4)]
        with pytest.raises(ValueError):
            compare_measures(rows, "js", "skew")


class TestReportIO:
    def make_report(self):
        report = EvaluationReport()
        report.rows = [ReportRow("js", 5, 0, 0.25, 8), ReportRow("js", 5, 1, 0.5, 8)]
        report.ranges = summarize_ranges(report.rows)
        report.ttests = [
            type(t)(**vars(t))
            for t in compare_measures(report.rows + [ReportRow("skew", 5, 0, 0.25, 8), ReportRow("skew", 5, 1, 0.25, 8)], "js", "skew")
        ]
        return report

    def test_csv_shape(self, tmp_path):
        path = tmp_path / "report.csv"
        write_report_csv(self.make_report(), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "measure,k,partition,error_rate,n_triples"
        assert lines[1] == "js,5,0,0.25,8"
        assert len(lines) == 3

    def test_empty_report_gives_header_only_csv(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_report_csv(EvaluationReport(), path)
        assert path.read_text().splitlines() == ["measure,k,partition,error_rate,n_triples"]

    def test_json_roundtrip(self, tmp_path):
        path = tmp_path / "report.json"
        report = self.make_report()
        write_report_json(report, path)
        back = load_report_json(path)
        assert back.rows == report.rows
        assert back.ranges == report.ranges
        assert back.ttests == report.ttests

    def test_json_handles_infinite_t(self, tmp_path):
        report = EvaluationReport()
        report.ttests = [
            type(t)(**vars(t))
            for t in compare_measures(
                [
                    ReportRow("a", 1, 0, 0.3, 4),
                    ReportRow("a", 1, 1, 0.3, 4),
                    ReportRow("b", 1, 0, 0.1, 4),
                    ReportRow("b", 1, 1, 0.1, 4),
                ],
                "a",
                "b",
            )
        ]
        path = tmp_path / "inf.json"
        write_report_json(report, path)
        assert load_report_json(path).ttests[0].t == math.inf


class TestTestSetIO:
    def test_roundtrip(self, tmp_path):
        model, sets = small_experiment()
        write_test_sets(model, sets, tmp_path / "sets")
        back = read_test_sets(model, tmp_path / "sets")
        assert [[(t.n, t.v1, t.v2) for t in part] for part in back] == [
            [(t.n, t.v1, t.v2) for t in part] for part in sets
        ]

    def test_missing_directory_content_rejected(self, tmp_path):
        (tmp_path / "empty").mkdir()
        model, _ = small_experiment()
        with pytest.raises(ValueError, match="no testset"):
            read_test_sets(model, tmp_path / "empty")
