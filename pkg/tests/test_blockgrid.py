import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from downsampling.blockgrid import (
    BlockPartition,
    DegenerateSampleError,
    GridFunction,
    all_cells,
    augmented_block_of,
    block_function,
    block_of,
    blockpoint_of,
    cell_masses,
    coarse_eval,
    empirical_distance,
    estimate_tv_to_uniform,
    grid_sample_size,
    induce_augmented_partition,
    induce_partition,
    partition_from_json,
    partition_to_json,
    tv_from_masses,
)
from downsampling.functions import Constant, Disk, Halfspace
from downsampling.product_dist import (
    AugmentedSample,
    ProductDistribution,
    augment,
    bernoulli,
    gaussian,
    uniform,
)
from downsampling.testers import is_monotone


def _tv_brute_force(masses):
    r, d = masses[0].size, len(masses)
    total = 0.0
    for v in all_cells(r, d):
        total += abs(np.prod([m[i] for m, i in zip(masses, v)]) - r**-d)
    return 0.5 * total


class TestInducePartition:
    def test_one_dim_cut(self):
        p = induce_partition([1.0, 2.0, 3.0, 4.0], 2)
        np.testing.assert_array_equal(p.cuts, [[2.0]])
        np.testing.assert_array_equal(block_of(p, [[2.0], [2.5]]), [[0], [1]])

    def test_two_dim_cuts(self, rng):
        X = np.stack([rng.permutation(np.arange(1.0, 7.0)) for _ in range(2)], axis=1)
        p = induce_partition(X, 3)
        np.testing.assert_array_equal(p.cuts, [[2.0, 4.0], [2.0, 4.0]])

    def test_r_must_divide_m(self):
        with pytest.raises(ValueError):
            induce_partition(np.arange(5.0), 2)

    def test_too_few_distinct_values(self):
        with pytest.raises(DegenerateSampleError):
            induce_partition([1.0, 1.0, 1.0, 2.0], 4)

    def test_ties_are_spread(self):
        p = induce_partition([1.0, 1.0, 2.0, 3.0], 2)
        assert p.perturbed == 1
        assert np.all(np.diff(p.cuts) > 0) if p.cuts.shape[1] > 1 else True

    def test_reps_lie_in_their_cells(self, rng):
        X = rng.standard_normal((120, 3))
        p = induce_partition(X, 6, rng)
        cells = all_cells(6, 3)
        np.testing.assert_array_equal(block_of(p, blockpoint_of(p, cells)), cells)

    def test_uniform_cell_masses(self, rng):
        good = 0
        dist = ProductDistribution.iid(uniform(0, 1), 1)
        for _ in range(100):
            p = induce_partition(dist.sample(4000, rng), 4)
            masses = cell_masses(p, dist)[0]
            good += np.all((masses >= 0.2) & (masses <= 0.3))
        assert good >= 95

    @given(st.lists(st.floats(-1e6, 1e6), min_size=12, max_size=12, unique=True),
           st.sampled_from([1, 2, 3, 4, 6, 12]))
    def test_equal_counts_per_cell(self, xs, r):
        p = induce_partition(xs, r)
        counts = np.bincount(block_of(p, xs)[:, 0], minlength=r)
        np.testing.assert_array_equal(counts, np.full(r, 12 // r))


class TestBlockOf:
    def test_boundary_goes_left(self):
        p = BlockPartition.from_cuts([[2.0]])
        np.testing.assert_array_equal(p.block_of([[2.0], [2.0000001]]), [[0], [1]])

    def test_extremes(self):
        p = BlockPartition.from_cuts([[-1.0, 0.0, 1.0]])
        np.testing.assert_array_equal(p.block_of([[-1e9], [1e9]]), [[0], [3]])

    def test_blockpoint(self):
        p = BlockPartition([[2.0]], [[1.5, 3.5]], [1.0], [4.0])
        np.testing.assert_allclose(p.blockpoint_of([[0]]), [[1.5]])

    def test_rejects_bad_reps(self):
        with pytest.raises(ValueError):
            BlockPartition([[2.0]], [[2.5, 3.5]], [1.0], [4.0])

    def test_rejects_out_of_range_cell(self):
        p = BlockPartition.from_cuts([[0.0]])
        with pytest.raises(IndexError):
            p.blockpoint_of([[2]])

    def test_cell_bounds(self):
        p = BlockPartition.from_cuts([[0.0, 1.0], [5.0, 6.0]])
        lo, hi = p.cell_bounds([[0, 1]])
        np.testing.assert_array_equal(lo, [[-np.inf, 5.0]])
        np.testing.assert_array_equal(hi, [[0.0, 6.0]])


class TestAugmentedPartition:
    def test_single_atom_split_by_tags(self, rng):
        A = augment(np.full((8, 1), 3.0), rng)
        p = induce_augmented_partition(A, 4)
        counts = np.bincount(p.block_of(A)[:, 0], minlength=4)
        np.testing.assert_array_equal(counts, [2, 2, 2, 2])

    def test_bernoulli_cells_uniform(self, rng):
        dist = ProductDistribution.iid(bernoulli(0.5), 1)
        p = induce_augmented_partition(augment(dist.sample(4000, rng), rng), 4)
        masses = cell_masses(p, dist)[0]
        np.testing.assert_allclose(masses, 0.25, atol=0.05)

    def test_continuous_cuts_agree(self, rng):
        X = rng.standard_normal((400, 2))
        plain = induce_partition(X, 8)
        aug = induce_augmented_partition(augment(X, rng), 8)
        np.testing.assert_array_equal(plain.cuts, aug.cut_base)

    def test_tags_straddle_cut(self, rng):
        A = augment(np.full((8, 1), 0.0), rng)
        p = induce_augmented_partition(A, 2)
        base, t = p.cut_base[0, 0], p.cut_tag[0, 0]
        assert 0 < t < 1
        cells = augmented_block_of(p, np.array([[base], [base]]), np.array([[0.0], [1.0]]))
        np.testing.assert_array_equal(cells[:, 0], [0, 1])

    def test_blockpoint_round_trip(self, rng):
        dist = ProductDistribution((bernoulli(0.3), gaussian()))
        p = induce_augmented_partition(augment(dist.sample(600, rng), rng), 6)
        cells = all_cells(6, 2)
        dims = np.arange(2)
        base = p.blockpoint_of(cells)
        tag = p.rep_tag[dims, cells]
        tb = p.rep_tb[dims, cells]
        np.testing.assert_array_equal(p.block_of(AugmentedSample(base, tag, tb)), cells)


class TestTotalVariation:
    def test_medians_give_zero(self):
        p = BlockPartition.from_cuts([[0.0]])
        est = estimate_tv_to_uniform(p, ProductDistribution.iid(gaussian(), 1))
        assert est.exact and est.value == pytest.approx(0.0, abs=1e-15)

    def test_sixty_forty(self):
        assert tv_from_masses([np.array([0.6, 0.4])]) == pytest.approx(0.1)

    def test_product_against_brute_force(self, rng):
        masses = [rng.dirichlet(np.ones(4)) for _ in range(3)]
        assert tv_from_masses(masses) == pytest.approx(_tv_brute_force(masses), abs=1e-14)

    def test_monte_carlo_matches_exact(self, rng):
        dist = ProductDistribution.iid(gaussian(), 2)
        p = BlockPartition.from_cuts([[-1.0, 0.0, 0.5], [-0.5, 0.0, 1.0]])
        exact = estimate_tv_to_uniform(p, dist).value
        mc = estimate_tv_to_uniform(p, dist, n=200_000, rng=rng, budget=0)
        assert not mc.exact
        assert abs(mc.value - exact) < 5 * mc.stderr + 2e-3

    def test_sized_gaussian_grid(self, rng):
        dist = ProductDistribution.iid(gaussian(), 2)
        m = grid_sample_size(8, 2, 0.1)
        assert m % 8 == 0
        ok = sum(estimate_tv_to_uniform(induce_partition(dist.sample(m, rng), 8), dist).value <= 0.1
                 for _ in range(12))
        assert ok >= 10


class TestGridFunctions:
    def test_constant(self):
        p = BlockPartition.from_cuts([[0.0, 1.0]] * 2)
        np.testing.assert_array_equal(block_function(Constant(1), p).table, np.ones((3, 3)))

    def test_threshold_table(self):
        p = BlockPartition([[1.0, 2.0, 3.0]], [[0.5, 1.5, 2.2, 3.5]], [0.0], [4.0])
        g = block_function(Halfspace([1.0], 2.5), p)
        np.testing.assert_array_equal(g.table, [-1, -1, -1, 1])
        g = block_function(Halfspace([1.0], 2.1), p)
        np.testing.assert_array_equal(g.table, [-1, -1, 1, 1])

    def test_monotone_stays_monotone(self, rng):
        p = induce_partition(rng.standard_normal((400, 2)), 4)
        for _ in range(20):
            f = Halfspace(np.abs(rng.standard_normal(2)), rng.standard_normal())
            assert is_monotone(block_function(f, p).table[None])[0]

    def test_coarse_eval_at_reps(self, rng):
        p = induce_partition(rng.standard_normal((90, 2)), 3)
        g = GridFunction(3, 2, table=np.where(rng.random((3, 3)) < 0.5, 1, -1))
        cells = all_cells(3, 2)
        np.testing.assert_array_equal(coarse_eval(g, p, blockpoint_of(p, cells)), g(cells))

    def test_lazy_matches_dense(self, rng):
        p = induce_partition(rng.standard_normal((60, 2)), 5)
        f = Disk([0.0, 0.0], 0.8)
        dense = block_function(f, p)
        lazy = block_function(f, p, budget=0)
        assert dense.dense and not lazy.dense
        np.testing.assert_array_equal(dense.table, lazy.table)

    def test_grid_function_validation(self):
        with pytest.raises(ValueError):
            GridFunction(2, 1, table=np.array([1, 0]))
        with pytest.raises(ValueError):
            GridFunction(2, 1)

    def test_empirical_distance(self, rng):
        dist = ProductDistribution.iid(uniform(0, 1), 1)
        f = Halfspace([1.0], 0.0)
        assert empirical_distance(f, f, dist, 1000, rng).value == 0
        assert empirical_distance(f, lambda X: -f(X), dist, 1000, rng).value == 1
        e = empirical_distance(f, Halfspace([1.0], 0.3), dist, 10_000, rng)
        assert abs(e.value - 0.3) < 0.02


class TestSerialization:
    def test_plain_round_trip(self, rng):
        p = induce_partition(rng.standard_normal((300, 3)), 5, rng)
        q = partition_from_json(partition_to_json(p))
        np.testing.assert_array_equal(p.cuts, q.cuts)
        np.testing.assert_array_equal(p.reps, q.reps)

    def test_augmented_round_trip(self, rng):
        A = augment(rng.integers(0, 3, (400, 2)).astype(float), rng)
        p = induce_augmented_partition(A, 4, rng)
        q = partition_from_json(partition_to_json(p))
        B = augment(rng.integers(0, 3, (500, 2)).astype(float), rng)
        np.testing.assert_array_equal(p.block_of(B), q.block_of(B))

    def test_rejects_unknown_format(self):
        with pytest.raises(ValueError):
            partition_from_json('{"format": "other", "version": 1}')
