import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from downsampling.blockgrid import BlockPartition
from downsampling.functions import Boxes, Checkerboard, Constant, Disk, Halfspace, MonotoneDNF, Negation
from downsampling.instances import random_instance
from downsampling.product_dist import Finite, ProductDistribution, bernoulli, gaussian, uniform
from downsampling.testers import (
    LN6,
    LN12,
    Transcript,
    alternation_depth,
    build_cover,
    convex_onesided_test,
    convex_sample_sizes,
    df_grid_size,
    df_monotonicity_test,
    diagonal_schedule,
    diagonal_test,
    distance_approximate,
    distance_sample_size,
    distance_to_monotone_2d,
    exact_distance_to_cover,
    grid_monotonicity_test,
    is_lattice_convex,
    is_monotone,
    pair_monotonicity_test,
    slice_distance_to_convex,
    tolerant_test,
)


def _zeros(V):
    return np.zeros(len(V))


def _ones(V):
    return np.ones(len(V))


def _unit_square_sample(f, n, rng):
    X = rng.random((n, 2))
    return X, f(X)


def _brute_force_distance_to_monotone(table):
    r, c = table.shape
    best = 1.0
    for bits in itertools.product([-1, 1], repeat=r * c):
        t = np.array(bits).reshape(r, c)
        if is_monotone(t[None])[0]:
            best = min(best, float(np.mean(t != table)))
    return best


class TestTranscripts:
    def test_replay_is_identical(self):
        f = random_instance("diagonal", np.random.default_rng(0), n=8, d=2)
        v = diagonal_test(f, 8, 2, 0.3, np.random.default_rng(5))
        tr = Transcript.from_lines(v.transcript.to_lines())
        again = diagonal_test(f, 8, 2, 0.3, tr.rng())
        assert again.transcript.to_lines() == v.transcript.to_lines()

    def test_failure_probabilities_surface(self, rng):
        v = grid_monotonicity_test(_zeros, 16, 2, 0.5, rng)
        assert [s.name for s in v.transcript.subtests] == ["identity", "diagonal-boundary", "pairs"]
        assert v.transcript.failure_prob == pytest.approx(3 / 6)
        assert v.transcript.to_lines()[-1].startswith("verdict accept")

    def test_incomplete_transcript(self):
        with pytest.raises(ValueError):
            Transcript.from_lines(["tester diagonal"])


class TestDiagonal:
    def test_schedule_rounds(self):
        sched = diagonal_schedule(0.25)
        assert len(sched) == 4
        assert sched[0] == (math.ceil(4 * 2 / 0.25 * LN6), math.ceil(8 * LN12))

    def test_zero_function_accepted(self, rng):
        for _ in range(50):
            assert diagonal_test(_zeros, 16, 2, 0.25, rng).accept

    def test_diagonal_functions_accepted(self, rng):
        for _ in range(50):
            f = random_instance("diagonal", rng, n=16, d=2, fill=1.0)
            assert diagonal_test(f, 16, 2, 0.25, rng).accept

    def test_all_ones_rejected(self, rng):
        rejects = sum(not diagonal_test(_ones, 16, 2, 0.25, rng).accept for _ in range(60))
        assert rejects >= 40

    @pytest.mark.parametrize("eps", [0.5, 0.25, 0.1, 0.03, 0.01])
    def test_query_budget(self, eps, rng):
        # each round costs at most 3 p_i q_i before ceilings, and p_i q_i <= 16 k ln6 ln12 / eps
        k = math.ceil(math.log2(4 / eps) - 1e-12)
        queries = diagonal_test(_zeros, 8, 2, eps, rng).transcript.queries
        assert queries == sum(p * q for p, q in diagonal_schedule(eps))
        assert queries <= 3 * 16 * LN6 * LN12 * k * k / eps
        assert k <= math.log2(1 / eps) + 3


class TestGridMonotonicity:
    def test_monotone_always_accepted(self, rng):
        for _ in range(30):
            f = random_instance("monotone-table", rng, n=20, d=2)
            assert grid_monotonicity_test(f, 20, 2, 0.25, rng).accept

    def test_anti_monotone_rejected(self, rng):
        f = Negation(Halfspace([1.0, 1.0], 63.0))
        rejects = sum(not grid_monotonicity_test(f, 64, 2, 0.25, rng).accept for _ in range(60))
        assert rejects >= 40

    def test_parity_rejected(self, rng):
        f = Checkerboard(1.0, np.zeros(2))
        rejects = sum(not grid_monotonicity_test(f, 16, 2, 0.25, rng).accept for _ in range(60))
        assert rejects >= 40

    def test_pairs_one_sided(self, rng):
        sub = pair_monotonicity_test(lambda V: V.sum(axis=1) >= 3, 4, 2, 0.5, rng)
        assert sub.passed and sub.queries == 2 * math.ceil(2 * 4 / 0.5)


class TestDistributionFreeMonotonicity:
    def test_monotone_gaussian_accepted(self, rng):
        for _ in range(20):
            f = random_instance("monotone-dnf", rng)
            assert df_monotonicity_test(f, ProductDistribution.iid(gaussian(), 2), 0.5, rng).accept

    def test_anti_monotone_rejected(self, rng):
        f = Negation(Halfspace([1.0, 1.0], 0.0))
        dist = ProductDistribution.iid(gaussian(), 2)
        rejects = sum(not df_monotonicity_test(f, dist, 0.25, rng).accept for _ in range(60))
        assert rejects >= 40

    def test_finite_majority_accepted(self, rng):
        dist = ProductDistribution.iid(bernoulli(0.5), 8)
        f = Halfspace(np.ones(8), 0.0)
        for _ in range(3):
            v = df_monotonicity_test(f, dist, 0.5, rng, grid_m=2064)
            assert v.accept and v.transcript.params["finite"]

    def test_sample_count(self, rng):
        # grid samples R d^2 / eps^2 ln(R d) with R = 16 d / eps + 2, plus bounded resampling
        for d, eps in [(1, 0.5), (2, 0.5), (2, 0.25)]:
            R = math.ceil(16 * d / eps - 1e-9) + 2
            v = df_monotonicity_test(Constant(1), ProductDistribution.iid(uniform(), d), eps, rng)
            grid = df_grid_size(R, d, eps)
            assert v.transcript.subtests[0].samples == grid
            assert grid <= R * d * d / eps**2 * math.log(R * d) + R
            assert v.transcript.samples <= grid + 10 * math.ceil(8 / eps * LN6)


class TestConvex:
    def _run(self, f, eps, rng):
        _, m, q = convex_sample_sizes(2, eps)
        X, y = _unit_square_sample(f, m + q, rng)
        return convex_onesided_test(X, y, eps, rng)

    def test_sizes(self):
        r, m, q = convex_sample_sizes(2, 0.25)
        assert r == 48 and m % r == 0 and q == math.ceil(2 * (48**2 + 4))

    def test_disk_and_plane_accepted(self, rng):
        for f in (Disk([0.5, 0.5], 0.3), Constant(1), Constant(-1)):
            for _ in range(5):
                assert self._run(f, 0.25, rng).accept

    def test_two_bars_rejected(self, rng):
        f = Boxes([[0, 0], [0, 0.7]], [[1, 0.3], [1, 1]])
        assert slice_distance_to_convex(f) == pytest.approx(0.3, abs=0.01)
        rejects = sum(not self._run(f, 0.2, rng).accept for _ in range(10))
        assert rejects >= 7

    def test_slice_bound_on_two_squares(self):
        f = Boxes([[0, 0], [0.55, 0.55]], [[0.45, 0.45], [1, 1]])
        assert slice_distance_to_convex(f, math.pi / 2) == pytest.approx(0.0, abs=0.01)
        assert slice_distance_to_convex(f, math.pi / 4) == pytest.approx(0.1416, abs=0.01)

    def test_dimension_limit(self, rng):
        with pytest.raises(ValueError):
            convex_onesided_test(np.zeros((10, 4)), np.ones(10), 0.5, rng)


class TestPredicates:
    def test_monotone(self):
        assert is_monotone(np.array([[[-1, 1], [1, 1]]]))[0]
        assert not is_monotone(np.array([[[1, -1], [1, 1]]]))[0]

    @given(st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=12))
    def test_alternation_depth_one_dim(self, xs):
        a = np.array(xs)
        assert alternation_depth(a[None])[0] == np.count_nonzero(a[1:] != a[:-1])

    def test_monotone_has_depth_at_most_one(self, rng):
        tables = np.stack([random_instance("monotone-table", rng, n=4, d=2).values for _ in range(20)])
        assert np.all(alternation_depth(tables) <= 1)

    def test_lattice_convexity(self):
        assert is_lattice_convex(np.array([[1, 1, 0], [1, 1, 0], [0, 0, 0]]))
        assert not is_lattice_convex(np.array([[1, 0, 1], [0, 0, 0], [0, 0, 0]]))
        assert is_lattice_convex(-np.ones((3, 3)))


class TestCovers:
    def test_exhaustive_counts(self):
        assert len(build_cover("monotone", 2, 2)) == 6
        assert len(build_cover("k-alternating", 4, 1, k=2)) == 14

    def test_structured_enumeration_matches_filter(self):
        assert len(build_cover("monotone", 3, 2)) == 20
        assert len(build_cover("monotone", 4, 2)) == 70
        assert len(build_cover("k-alternating", 3, 2, k=1)) == 38
        assert len(build_cover("k-alternating", 3, 2, k=2)) == 190

    def test_convex_cover_has_rectangles(self):
        cover = build_cover("convex", 3, 2)
        members = {tuple(m) for m in cover.members}
        for a, b, c, e in itertools.product(range(3), repeat=4):
            if a <= b and c <= e:
                t = -np.ones((3, 3), dtype=np.int8)
                t[a:b + 1, c:e + 1] = 1
                assert tuple(t.ravel()) in members
        assert len(cover) == 214

    def test_no_enumeration(self):
        with pytest.raises(ValueError):
            build_cover("convex", 8, 3)


class TestDistances:
    def test_dp_against_brute_force(self, rng):
        for _ in range(5):
            t = np.where(rng.random((3, 3)) < 0.5, 1, -1)
            assert distance_to_monotone_2d(t) == pytest.approx(_brute_force_distance_to_monotone(t))

    def test_checkerboard(self):
        board = np.fromfunction(lambda i, j: (-1.0) ** (i + j), (8, 8))
        assert distance_to_monotone_2d(board) == pytest.approx(0.4375)

    def test_member_has_zero_estimate(self, rng):
        cover = build_cover("monotone", 4, 2)
        t = cover.members[17].reshape(4, 4)
        V = rng.integers(0, 4, (500, 2))
        assert distance_approximate(V, t[tuple(V.T)], cover).value == 0

    def test_negated_member_against_exact(self, rng):
        cover = build_cover("monotone", 4, 2)
        t = -cover.members[30].reshape(4, 4)
        dist = ProductDistribution.iid(Finite(np.arange(4.0), np.full(4, 0.25)), 2)
        f = lambda X: t[tuple(X.astype(int).T)]
        exact = exact_distance_to_cover(f, dist, cover)
        assert exact == pytest.approx(distance_to_monotone_2d(t))
        n = distance_sample_size(len(cover), 0.1)
        V = rng.integers(0, 4, (n, 2))
        assert abs(distance_approximate(V, t[tuple(V.T)], cover).value - exact) <= 0.1

    def test_random_tables(self, rng):
        cover = build_cover("monotone", 3, 2)
        dist = ProductDistribution.iid(Finite(np.arange(3.0), np.full(3, 1 / 3)), 2)
        n = distance_sample_size(len(cover), 0.1)
        ok = 0
        for _ in range(60):
            t = np.where(rng.random((3, 3)) < 0.5, 1, -1)
            exact = exact_distance_to_cover(lambda X: t[tuple(X.astype(int).T)], dist, cover)
            V = rng.integers(0, 3, (n, 2))
            ok += abs(distance_approximate(V, t[tuple(V.T)], cover).value - exact) <= 0.1
        assert ok >= 50

    def test_sample_size(self):
        assert distance_sample_size(6, 0.1) == math.ceil(math.log(72) / 0.02)

    def test_requires_finite_distribution(self):
        with pytest.raises(ValueError):
            exact_distance_to_cover(Constant(1), ProductDistribution.iid(gaussian(), 2),
                                    build_cover("monotone", 2, 2))


class TestTolerant:
    def _samples(self, t, n, rng):
        V = rng.integers(0, t.shape[0], (n, t.ndim))
        return V, t[tuple(V.T)]

    def test_member_accepted(self, rng):
        cover = build_cover("monotone", 4, 2)
        t = cover.members[5].reshape(4, 4)
        n = distance_sample_size(len(cover), 0.1)
        acc = sum(tolerant_test(*self._samples(t, n, rng), cover, None, 0.1, 0.3).accept for _ in range(30))
        assert acc >= 25

    def test_far_rejected(self, rng):
        cover = build_cover("monotone", 4, 2)
        t = np.fromfunction(lambda i, j: (-1.0) ** (i + j), (4, 4))
        assert distance_to_monotone_2d(t) >= 0.3
        n = distance_sample_size(len(cover), 0.1)
        rej = sum(not tolerant_test(*self._samples(t, n, rng), cover, None, 0.1, 0.3).accept
                  for _ in range(30))
        assert rej >= 25

    def test_zero_tolerance_degenerates(self, rng):
        cover = build_cover("monotone", 4, 2)
        t = -cover.members[40].reshape(4, 4)
        n = distance_sample_size(len(cover), 0.1)
        assert not tolerant_test(*self._samples(t, n, rng), cover, None, 0.0, 0.2).accept

    def test_with_partition(self, rng):
        cover = build_cover("monotone", 2, 2)
        p = BlockPartition.from_cuts([[0.0], [0.0]])
        X = rng.standard_normal((2000, 2))
        y = MonotoneDNF(np.array([[0.0, 0.0]]))(X)
        assert tolerant_test(X, y, cover, p, 0.05, 0.2).accept

    def test_eps_order(self, rng):
        with pytest.raises(ValueError):
            tolerant_test(np.zeros((1, 2), int), np.ones(1), build_cover("monotone", 2, 2), None, 0.3, 0.1)
