"""Rank distance, venue experiments, award ranking, and corpus statistics."""

import itertools

import numpy as np
import pytest
import scipy.stats

from idtree.corpus import PaperRecord, ingest
from idtree.experiments import (
    RankedList,
    corpus_stats,
    fractional_gain_list,
    kendall_tau_distance,
    mean_reciprocal_rank,
    pearson,
    rank_by_measure,
    tot_experiment,
    venue_groups,
    z_experiment,
)
from idtree.synth import (
    broom_tree,
    gen_random_corpus,
    ideal_tree,
    make_tot_benchmark,
    make_z_benchmark,
)


def brute_force_kendall(a, b):
    """O(m^2) discordant-pair count over all unordered pairs."""
    pos_a = {x: i for i, x in enumerate(a)}
    pos_b = {x: i for i, x in enumerate(b)}
    items = sorted(pos_a)
    m = len(items)
    if m < 2:
        return 0.0
    discordant = 0
    for x, y in itertools.combinations(items, 2):
        if (pos_a[x] - pos_a[y]) * (pos_b[x] - pos_b[y]) < 0:
            discordant += 1
    return discordant / (m * (m - 1) / 2)


class TestKendall:
    def test_identical_lists(self):
        assert kendall_tau_distance("abcde", "abcde") == 0.0

    def test_exact_reversal(self):
        assert kendall_tau_distance(list("abcde"), list("edcba")) == 1.0

    def test_single_swap(self):
        # pairs: (x,y) discordant; (x,z), (y,z) concordant -> 1/3
        assert kendall_tau_distance(["x", "y", "z"], ["y", "x", "z"]) == pytest.approx(1 / 3)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            m = int(rng.integers(2, 33))
            items = [f"e{i}" for i in range(m)]
            a = list(rng.permutation(items))
            b = list(rng.permutation(items))
            assert kendall_tau_distance(a, b) == brute_force_kendall(a, b)

    def test_metric_axioms_on_random_triples(self):
        rng = np.random.default_rng(9)
        items = [f"e{i}" for i in range(10)]
        for _ in range(50):
            a, b, c = (list(rng.permutation(items)) for _ in range(3))
            assert kendall_tau_distance(a, a) == 0.0
            assert kendall_tau_distance(a, b) == kendall_tau_distance(b, a)
            assert (
                kendall_tau_distance(a, c)
                <= kendall_tau_distance(a, b) + kendall_tau_distance(b, c) + 1e-12
            )

    def test_invariant_under_relabeling(self):
        rng = np.random.default_rng(1)
        items = [f"e{i}" for i in range(12)]
        a = list(rng.permutation(items))
        b = list(rng.permutation(items))
        relabel = {x: f"R{x}" for x in items}
        assert kendall_tau_distance(a, b) == kendall_tau_distance(
            [relabel[x] for x in a], [relabel[x] for x in b]
        )

    def test_short_lists_are_zero(self):
        assert kendall_tau_distance(["a"], ["a"]) == 0.0
        assert kendall_tau_distance([], []) == 0.0

    def test_mismatched_sets_rejected(self):
        with pytest.raises(ValueError):
            kendall_tau_distance(["a", "b"], ["a", "c"])
        with pytest.raises(ValueError):
            kendall_tau_distance(["a", "a"], ["a", "a"])

    def test_discard_ties_mode(self):
        a = RankedList.from_scores({"x": 3.0, "y": 3.0, "z": 1.0}, "desc")
        b = RankedList.from_scores({"x": 1.0, "y": 2.0, "z": 3.0}, "desc")
        # (x, y) tied in a -> discarded; (x, z) and (y, z) both discordant
        assert kendall_tau_distance(a, b, tie_mode="discard-ties") == 1.0
        with pytest.raises(ValueError):
            kendall_tau_distance(["a", "b"], ["a", "b"], tie_mode="discard-ties")
        with pytest.raises(ValueError):
            kendall_tau_distance(a, b, tie_mode="half")


class TestRankedList:
    def test_orders_and_breaks_ties_by_id(self):
        ranked = RankedList.from_scores({"b": 2.0, "a": 2.0, "c": 5.0}, "desc")
        assert ranked.ids == ("c", "a", "b")
        ranked = RankedList.from_scores({"b": 2.0, "a": 2.0, "c": 5.0}, "asc")
        assert ranked.ids == ("a", "b", "c")

    def test_rank_of(self):
        ranked = RankedList.from_scores({"a": 1.0, "b": 2.0}, "desc")
        assert ranked.rank_of("b") == 1
        assert ranked.rank_of("a") == 2
        with pytest.raises(KeyError):
            ranked.rank_of("zz")

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            RankedList.from_scores([("a", 1.0), ("a", 2.0)], "desc")
        with pytest.raises(ValueError):
            RankedList.from_scores({"a": 1.0}, "sideways")


class TestMeanReciprocalRank:
    def test_arithmetic(self):
        assert mean_reciprocal_rank([1, 2, 4]) == pytest.approx(7 / 12)
        assert mean_reciprocal_rank([1, 1, 1]) == 1.0

    def test_errors(self):
        with pytest.raises(ValueError):
            mean_reciprocal_rank([])
        with pytest.raises(ValueError):
            mean_reciprocal_rank([0, 1])


def _corpus_with_citations(counts, year=2000, venue=None):
    """One paper per (id, count): cited `count` times by star citers."""
    records, edges = [], []
    for pid, count in counts.items():
        records.append(PaperRecord(pid, year, venue))
        for i in range(count):
            cid = f"{pid}.c{i:03d}"
            records.append(PaperRecord(cid, year + 1 + i % 4))
            edges.append((cid, pid))
    return ingest(edges, records)[0]


class TestRankByMeasure:
    def test_citation_ordering(self):
        corpus = _corpus_with_citations({"hi": 10, "lo": 3})
        ranked, excluded = rank_by_measure(["hi", "lo"], "citations", corpus)
        assert ranked.ids == ("hi", "lo")
        assert excluded == []

    def test_equal_scores_fall_back_to_id(self):
        corpus = _corpus_with_citations({"a": 4, "b": 4, "c": 4})
        ranked, _ = rank_by_measure(["c", "a", "b"], "citations", corpus)
        assert ranked.ids == ("a", "b", "c")

    def test_matches_naive_sort(self):
        corpus = gen_random_corpus(200, years=(1995, 2005), seed=8)
        cited = [p for p in corpus.paper_ids if corpus.citation_count(p) > 0][:20]
        ranked, _ = rank_by_measure(cited, "citations", corpus)
        naive = sorted(cited, key=lambda p: (-corpus.citation_count(p), p))
        assert list(ranked.ids) == naive

    def test_uncited_papers_excluded_and_reported(self, toy):
        snap = toy.snapshot(2001)  # p1, p2 not yet cited
        ranked, excluded = rank_by_measure(["P", "p1", "p2"], "nid", snap)
        assert ranked.ids == ("P",)
        assert excluded == ["p1", "p2"]

    def test_nid_ranks_ascending(self):
        records, edges = [], []
        for pid, shape in (("frag", broom_tree(9, 4)), ("tidy", ideal_tree(9))):
            records.append(PaperRecord(pid, 2000))
            for v in sorted(shape.parent):
                cid = f"{pid}.{v}"
                records.append(PaperRecord(cid, 2000 + shape.depth[v]))
                edges.append((cid, pid))
                if shape.parent[v] != "P":
                    edges.append((cid, f"{pid}.{shape.parent[v]}"))
        corpus, _ = ingest(edges, records)
        ranked, _ = rank_by_measure(["frag", "tidy"], "nid", corpus)
        assert ranked.ids == ("tidy", "frag")

    def test_unknown_measure(self, toy):
        with pytest.raises(ValueError):
            rank_by_measure(["P"], "h-index", toy)


class TestFractionalGain:
    def _schedule_corpus(self, schedule, pub_year=2000):
        # schedule: paper -> list of citation years
        records, edges = [], []
        for pid, years in schedule.items():
            records.append(PaperRecord(pid, pub_year))
            for i, y in enumerate(years):
                cid = f"{pid}.c{i:03d}"
                records.append(PaperRecord(cid, y))
                edges.append((cid, pid))
        return ingest(edges, records)[0]

    def test_arithmetic(self):
        corpus = self._schedule_corpus(
            {"a": [2001] * 10 + [2006] * 15, "b": [2001] * 4}
        )
        ranked, excluded = fractional_gain_list(["a", "b"], corpus, 2000, 5, 10)
        scores = dict(ranked.items)
        assert scores["a"] == pytest.approx(1.5)  # (25 - 10) / 10
        assert scores["b"] == 0.0
        assert excluded == []

    def test_zero_at_t1_excluded(self):
        corpus = self._schedule_corpus({"late": [2008, 2009], "ok": [2001, 2007]})
        ranked, excluded = fractional_gain_list(["late", "ok"], corpus, 2000, 5, 10)
        assert excluded == ["late"]
        assert ranked.ids == ("ok",)

    def test_planted_schedule_matches_arithmetic(self):
        rng = np.random.default_rng(12)
        schedule = {}
        for i in range(12):
            early = int(rng.integers(1, 6))
            late = int(rng.integers(0, 20))
            schedule[f"s{i:02d}"] = [2001 + j % 5 for j in range(early)] + [
                2006 + j % 5 for j in range(late)
            ]
        corpus = self._schedule_corpus(schedule)
        ranked, _ = fractional_gain_list(sorted(schedule), corpus, 2000, 5, 10)
        scores = dict(ranked.items)
        for pid, years in schedule.items():
            c1 = sum(1 for y in years if y <= 2005)
            c2 = len(years)
            assert scores[pid] == pytest.approx((c2 - c1) / c1)

    def test_absolute_mode(self):
        corpus = self._schedule_corpus({"a": [2001] * 2 + [2006] * 6})
        ranked, _ = fractional_gain_list(["a"], corpus, 2000, 5, 10, mode="absolute")
        assert dict(ranked.items)["a"] == 6.0

    def test_bad_horizons(self, toy):
        with pytest.raises(ValueError):
            fractional_gain_list(["P"], toy, 2000, 10, 5)


class TestZExperiment:
    def test_planted_benchmark_prefers_shape_ranking(self):
        corpus = make_z_benchmark(seed=0)
        report = z_experiment(corpus)
        assert len(report.venues) == 8
        for venue in report.venues:
            assert 0.0 <= venue.z_nid <= 1.0
            assert 0.0 <= venue.z_cite <= 1.0
            # shape ranking reproduces the planted gain order exactly
            assert venue.z_nid == 0.0
        assert report.mean_z_nid < report.mean_z_cite

    def test_determinism(self):
        corpus = make_z_benchmark(seed=3)
        a = z_experiment(corpus)
        b = z_experiment(corpus)
        assert a == b

    def test_parallel_matches_serial(self):
        corpus = make_z_benchmark(seed=1)
        assert z_experiment(corpus, jobs=2) == z_experiment(corpus, jobs=1)

    def test_citation_self_ranking_scores_zero(self):
        # gains strictly increase with early citations, so the citation
        # ranking reproduces the gain ranking: z_cite = 0
        records, edges = [], []
        plan = {"a": (9, 18), "b": (6, 9), "c": (3, 3)}
        for pid, (early, late) in plan.items():
            records.append(PaperRecord(pid, 2000, "SELF-2000"))
            for i in range(early):
                cid = f"{pid}.e{i:02d}"
                records.append(PaperRecord(cid, 2001 + i % 5))
                edges.append((cid, pid))
            for i in range(late):
                cid = f"{pid}.l{i:02d}"
                records.append(PaperRecord(cid, 2006 + i % 5))
                edges.append((cid, pid))
        corpus, _ = ingest(edges, records)
        report = z_experiment(corpus, year_range=(2000, 2000))
        (venue,) = report.venues
        assert venue.z_cite == 0.0
        assert venue.z_nid == 0.0  # all-star shapes tie at NID 0, id order matches

    def test_small_venues_skipped_and_reported(self):
        corpus = _corpus_with_citations({"solo": 4}, venue="TINY-2000")
        report = z_experiment(corpus, year_range=(2000, 2000))
        assert report.venues == ()
        assert len(report.skipped) == 1
        assert report.skipped[0][0] == "TINY-2000"

    def test_year_range_filters_venues(self):
        corpus = make_z_benchmark(seed=0)
        report = z_experiment(corpus, year_range=(1995, 1995))
        assert all(v.year == 1995 for v in report.venues)

    def test_venue_grouping_key_is_series_and_year(self):
        records = [
            PaperRecord("x", 2000, "JCDL-2000"),
            PaperRecord("y", 2001, "JCDL-2001"),
            PaperRecord("cx", 2001), PaperRecord("cy", 2002),
        ]
        corpus, _ = ingest([("cx", "x"), ("cy", "y")], records)
        groups = venue_groups(corpus)
        assert set(groups) == {("JCDL-2000", 2000), ("JCDL-2001", 2001)}

    def test_bad_horizons(self):
        with pytest.raises(ValueError):
            z_experiment(make_z_benchmark(seed=0), t1=10, t2=5)


class TestToTExperiment:
    def test_planted_benchmark_ranks(self):
        corpus, awardees = make_tot_benchmark()
        report = tot_experiment(corpus, awardees)
        assert sorted(c.rank_cite for c in report.cases) == [1, 1, 2, 2]
        assert [c.rank_nid for c in report.cases] == [1, 1, 1, 1]
        assert report.mrr_nid == 1.0
        assert report.mrr_cite == pytest.approx(0.75)
        assert all(c.cohort_size == 40 for c in report.cases)

    def test_top_ranked_awardee(self):
        corpus, awardees = make_tot_benchmark()
        case = tot_experiment(corpus, [awardees[0]]).cases[0]
        assert case.rank_cite == 1
        assert case.rank_nid == 1

    def test_awardee_below_cut_is_force_included(self):
        # 60-paper cohort, top ceil(3) by citations, awardee sits 5th.
        records, edges = [], []
        venue = "BIG-2000"
        counts = {f"f{i:02d}": 3 + i % 5 for i in range(55)}
        counts.update({"t1": 50, "t2": 45, "t3": 40, "t4": 35, "award": 16})
        for pid, n_cits in counts.items():
            records.append(PaperRecord(pid, 2000, venue))
            shape = (
                ideal_tree(n_cits) if pid == "award"
                else broom_tree(n_cits, k=min(5, n_cits - 1))
            )
            names = {"P": pid}
            for v in sorted(shape.parent):
                names[v] = f"{pid}.{v}"
            for v in sorted(shape.parent):
                records.append(PaperRecord(names[v], 2000 + shape.depth[v]))
                edges.append((names[v], pid))
                if shape.parent[v] != "P":
                    edges.append((names[v], names[shape.parent[v]]))
        corpus, _ = ingest(edges, records)
        report = tot_experiment(corpus, [("award", venue, 2000)])
        (case,) = report.cases
        assert case.cohort_size == 60
        assert set(case.competitor_ids) == {"t1", "t2", "t3", "award"}
        assert case.rank_cite == 4
        assert case.rank_nid == 1

    def test_missing_awardee_skipped(self):
        corpus, awardees = make_tot_benchmark()
        report = tot_experiment(corpus, [("ghost", "TT0-1998", 1998)] + awardees[:1])
        assert len(report.cases) == 1
        assert len(report.skipped) == 1
        assert report.skipped[0][0] == "ghost"

    def test_bad_pct(self):
        corpus, awardees = make_tot_benchmark()
        with pytest.raises(ValueError):
            tot_experiment(corpus, awardees, pct=0.0)


class TestCorpusStats:
    def test_all_star_corpus_depth_histogram(self):
        corpus = _corpus_with_citations({f"s{i:02d}": 2 + i for i in range(12)})
        stats = corpus_stats(corpus)
        assert stats.depth_hist == {1: 12}
        # breadth equals citation count for stars: a perfectly linear relation
        assert stats.correlations["breadth_vs_citations"] == pytest.approx(1.0)

    def test_correlations_match_reference_implementation(self):
        corpus = gen_random_corpus(400, years=(1990, 2010), bias=0.6, seed=21)
        stats = corpus_stats(corpus)
        b = [r.breadth for r in stats.reports]
        d = [r.depth for r in stats.reports]
        n = [r.n for r in stats.reports]
        assert stats.correlations["breadth_vs_citations"] == pytest.approx(
            scipy.stats.pearsonr(b, n).statistic, abs=1e-9
        )
        assert stats.correlations["depth_vs_citations"] == pytest.approx(
            scipy.stats.pearsonr(d, n).statistic, abs=1e-9
        )
        assert stats.correlations["depth_vs_breadth"] == pytest.approx(
            scipy.stats.pearsonr(d, b).statistic, abs=1e-9
        )

    def test_uncited_papers_counted(self, toy):
        stats = corpus_stats(toy)
        assert len(stats.reports) == 4  # p4, p5 have no citations
        assert stats.n_uncited == 2

    def test_pearson_degenerate_is_nan(self):
        assert np.isnan(pearson([1, 1, 1], [1, 2, 3]))
        assert np.isnan(pearson([2], [3]))

    def test_pearson_shape_mismatch(self):
        with pytest.raises(ValueError):
            pearson([1, 2], [1, 2, 3])
