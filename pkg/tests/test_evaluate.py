import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twseg.errors import LengthMismatchError
from twseg.evaluate import (
    OverlapMatrix,
    Segment,
    aggregate,
    evaluate_pair,
    f1,
    filter_background,
    hungarian_match,
    iou,
    match_across_videos,
    midpoint_hit,
    mof,
    overlap_matrix,
    purity,
    segments_from_labels,
)
from twseg.synth import SynthSpec, assignment_total, brute_force_assignment, generate
from twseg.types import GroundTruth, Partition


def gt_of(tokens, background="SIL"):
    return GroundTruth.from_tokens(list(tokens), background_label=background)


def part_of(labels):
    return Partition(np.asarray(labels))


class TestHungarian:
    def test_diagonal_optimum(self):
        m = hungarian_match(OverlapMatrix(np.array([[5, 0], [0, 7]])))
        assert m == {0: 0, 1: 1}

    def test_anti_diagonal(self):
        m = hungarian_match(OverlapMatrix(np.array([[0, 5], [7, 0]])))
        assert m == {0: 1, 1: 0}

    def test_matches_brute_force_on_random_matrices(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            p, g = rng.integers(1, 6, size=2)
            counts = OverlapMatrix(rng.integers(0, 30, size=(p, g)))
            ours = assignment_total(counts, hungarian_match(counts))
            oracle = assignment_total(counts, brute_force_assignment(counts))
            assert ours == oracle

    def test_rectangular_leaves_preds_unmatched(self):
        m = hungarian_match(OverlapMatrix(np.array([[9, 0], [8, 0], [0, 7]])))
        assert len(m) == 2
        assert len(set(m.values())) == 2


class TestMof:
    def test_perfect(self):
        assert mof(part_of([0, 1]), gt_of("ab"), {0: 0, 1: 1}) == 1.0

    def test_empty_mapping(self):
        assert mof(part_of([0, 1]), gt_of("ab"), {}) == 0.0

    def test_three_of_four(self):
        pred = part_of([0, 0, 1, 1])
        gt = gt_of("aaab")
        assert mof(pred, gt, {0: 0, 1: 1}) == 0.75

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            mof(part_of([0]), gt_of("ab"), {})


class TestIou:
    def test_perfect(self):
        assert iou(part_of([0, 1]), gt_of("ab"), {0: 0, 1: 1}) == 1.0

    def test_hand_example(self):
        pred = part_of([0, 0, 1, 1])
        gt = gt_of("aaab")
        expected = (2.0 / 3.0 + 1.0 / 2.0) / 2.0
        assert iou(pred, gt, {0: 0, 1: 1}) == pytest.approx(expected, abs=1e-12)

    def test_disjoint_is_zero(self):
        pred = part_of([0, 1])
        gt = gt_of("ab")
        assert iou(pred, gt, {0: 1, 1: 0}) == 0.0


class TestF1:
    def test_perfect(self):
        assert f1(part_of([0, 1]), gt_of("ab"), {0: 0, 1: 1}) == 1.0

    def test_empty_intersection_is_zero(self):
        assert f1(part_of([0, 1]), gt_of("ab"), {0: 1, 1: 0}) == 0.0

    def test_hand_example(self):
        pred = part_of([0, 0, 1, 1])
        gt = gt_of("aaab")
        assert f1(pred, gt, {0: 0, 1: 1}) == pytest.approx(0.75, abs=1e-12)

    def test_macro_option(self):
        pred = part_of([0, 0, 1, 1])
        gt = gt_of("aaab")
        # a: p=1, r=2/3 -> 0.8 ; b: p=1/2, r=1 -> 2/3
        expected = (0.8 + 2.0 / 3.0) / 2.0
        assert f1(pred, gt, {0: 0, 1: 1}, average="macro") == pytest.approx(expected)


class TestMidpointHit:
    def test_identical_segmentations(self):
        segs = [Segment(0, 0, 4), Segment(1, 5, 9)]
        assert midpoint_hit(segs, segs, {0: 0, 1: 1}) == (1.0, 1.0)

    def test_midpoint_in_background_is_miss(self):
        pred = [Segment(0, 0, 9)]
        gt = [Segment(1, 0, 6), Segment(0, 7, 9)]  # midpoint 4 lands on label 1
        p, r = midpoint_hit(pred, gt, {0: 0})
        assert (p, r) == (0.0, 0.0)

    def test_floor_midpoint_rule(self):
        gt = [Segment(0, 5, 20)]
        miss = [Segment(0, 0, 9)]   # midpoint 4, outside
        hit = [Segment(0, 2, 11)]   # midpoint 6, inside
        assert midpoint_hit(miss, gt, {0: 0}) == (0.0, 0.0)
        assert midpoint_hit(hit, gt, {0: 0}) == (1.0, 1.0)

    def test_each_gt_segment_claimed_once(self):
        pred = [Segment(0, 0, 3), Segment(1, 4, 5), Segment(0, 6, 9)]
        gt = [Segment(0, 0, 9)]
        mapping = {0: 0, 1: 0}
        p, r = midpoint_hit(pred, gt, mapping)
        assert p == pytest.approx(1 / 3)
        assert r == 1.0


class TestPurity:
    def test_relabeled_perfect(self):
        assert purity(part_of([1, 1, 0]), gt_of("aab")) == 1.0

    def test_one_cluster_two_equal_labels(self):
        assert purity(part_of([0, 0]), gt_of("ab")) == 0.5

    def test_matches_direct_recount(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            pred = part_of(_dense(rng.integers(0, 4, size=20)))
            gt_ids = rng.integers(0, 3, size=20)
            gt = GroundTruth(_dense(gt_ids), tuple("xyz"), "x")
            expected = 0.0
            for c in range(pred.num_clusters):
                members = gt.labels[pred.labels == c]
                if members.size:
                    expected += np.bincount(members).max()
            assert purity(pred, gt) == pytest.approx(expected / 20)


def _dense(raw):
    from twseg.types import relabel_dense

    return relabel_dense(raw).labels


class TestSegmentsFromLabels:
    def test_runs(self):
        segs = segments_from_labels(np.array([0, 0, 1, 1, 0]))
        assert segs == [Segment(0, 0, 1), Segment(1, 2, 3), Segment(0, 4, 4)]

    @given(st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=40))
    def test_cover_and_maximality(self, labels):
        segs = segments_from_labels(np.array(labels))
        assert segs[0].start == 0 and segs[-1].end == len(labels) - 1
        for a, b in zip(segs, segs[1:]):
            assert b.start == a.end + 1
            assert a.label != b.label


class TestFilterBackground:
    def test_tau_zero_identity(self):
        seq, gt = generate(SynthSpec(k=3, n=90, background_frac=0.3, seed=0))
        fseq, fgt, keep = filter_background(seq, gt, 0.0, seed=1)
        assert fseq.n == seq.n and np.array_equal(keep, np.arange(seq.n))

    def test_tau_one_removes_all_background(self):
        seq, gt = generate(SynthSpec(k=3, n=90, background_frac=0.3, seed=0))
        _, fgt, _ = filter_background(seq, gt, 1.0, seed=1)
        assert fgt.background_id is None or np.all(fgt.labels != fgt.background_id)

    def test_exact_removal_count(self):
        tokens = ["bg"] * 40 + ["a"] * 60
        gt = GroundTruth.from_tokens(tokens, background_label="bg")
        seq, _ = generate(SynthSpec(k=1, n=100, seed=3))
        fseq, fgt, keep = filter_background(seq, gt, 0.75, seed=0)
        assert fseq.n == 70
        assert keep.size == 70

    def test_deterministic_and_order_preserving(self):
        seq, gt = generate(SynthSpec(k=4, n=200, background_frac=0.5, seed=5))
        a = filter_background(seq, gt, 0.6, seed=11)
        b = filter_background(seq, gt, 0.6, seed=11)
        assert np.array_equal(a[2], b[2])
        assert np.all(np.diff(a[2]) > 0)

    def test_no_background_is_noop(self):
        seq, gt = generate(SynthSpec(k=2, n=50, seed=1))
        fseq, _, keep = filter_background(seq, gt, 0.9, seed=0)
        assert fseq.n == 50 and keep.size == 50


class TestAggregate:
    def test_video_vs_frame_mode(self):
        from twseg.types import EvalReport

        r1 = EvalReport(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, {}, 10)
        r2 = EvalReport(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, {}, 30)
        assert aggregate([r1, r2], "video").mof == pytest.approx(0.5)
        assert aggregate([r1, r2], "frame").mof == pytest.approx(0.25)

    def test_single_video_is_itself(self):
        from twseg.types import EvalReport

        r = EvalReport(0.7, 0.6, 0.5, 0.4, 0.3, 0.9, {}, 42)
        assert aggregate([r], "video") == EvalReport(0.7, 0.6, 0.5, 0.4, 0.3, 0.9, {}, 42)

    def test_equal_reports_invariant_to_mode(self):
        from twseg.types import EvalReport

        rs = [EvalReport(0.5, 0.5, 0.5, 0.5, 0.5, 0.5, {}, n) for n in (10, 20)]
        assert aggregate(rs, "video").mof == pytest.approx(aggregate(rs, "frame").mof)


class TestInvariants:
    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=60, deadline=None)
    def test_purity_at_least_mof(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 60))
        pred = part_of(_dense(rng.integers(0, rng.integers(1, 8), size=n)))
        gt = GroundTruth(_dense(rng.integers(0, rng.integers(1, 6), size=n)),
                         tuple(f"l{i}" for i in range(8)), "l0")
        rep = evaluate_pair(pred, gt)
        assert rep.purity >= rep.mof - 1e-12

    def test_mof_and_purity_relabeling_invariant(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            n = int(rng.integers(8, 40))
            pred = part_of(_dense(rng.integers(0, 5, size=n)))
            gt = GroundTruth(_dense(rng.integers(0, 4, size=n)),
                             tuple("abcd"), "a")
            base = evaluate_pair(pred, gt)
            for _ in range(10):
                perm = rng.permutation(pred.num_clusters)
                pred2 = part_of(perm[pred.labels])
                rep2 = evaluate_pair(pred2, gt)
                assert rep2.mof == pytest.approx(base.mof, abs=1e-12)
                assert rep2.purity == pytest.approx(base.purity, abs=1e-12)


class TestMatchAcrossVideos:
    def test_pooled_matching_differs_from_per_video(self):
        # Video 1: cluster 0 is 'a'; video 2: cluster 0 is mostly 'b'.
        gt1 = gt_of("aaaaa")
        gt2 = GroundTruth.from_tokens(list("bbba"), label_table=gt1.label_names)
        p1 = part_of([0, 0, 0, 0, 0])
        p2 = part_of([0, 0, 0, 1])
        pooled = match_across_videos([(p1, gt1), (p2, gt2)])
        assert pooled[0] == 0  # pooled: cluster 0 overlaps 'a' 5 times, 'b' 3 times
        per_video = hungarian_match(overlap_matrix(p2, gt2))
        assert per_video[0] == 1  # within video 2 alone, cluster 0 is 'b'
