import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from downsampling.product_dist import (
    Conditional,
    Finite,
    LabeledOracle,
    ProductDistribution,
    Target,
    augment,
    augmented_less,
    bernoulli,
    component_from_descriptor,
    gaussian,
    sample_labeled,
    sample_point,
    sign,
    trial_rng,
    uniform,
)
from downsampling.functions import Constant, Halfspace


class TestComponents:
    def test_finite_validation(self):
        with pytest.raises(ValueError):
            Finite([0.0, 1.0], [0.5, 0.6])
        with pytest.raises(ValueError):
            Finite([1.0, 0.0], [0.5, 0.5])
        with pytest.raises(ValueError):
            Finite([0.0, 1.0], [1.5, -0.5])
        with pytest.raises(ValueError):
            Finite([], [])

    def test_finite_cdf_and_left_cdf(self):
        c = Finite([-1.0, 2.0, 5.0], [0.2, 0.3, 0.5])
        np.testing.assert_allclose(c.cdf([-2, -1, 0, 2, 5, 9]), [0, 0.2, 0.2, 0.5, 1.0, 1.0])
        np.testing.assert_allclose(c.cdf_left([-1, 2, 5, 6]), [0, 0.2, 0.5, 1.0])

    def test_finite_mass_up_to_splits_atoms_by_tag(self):
        c = Finite([0.0, 1.0], [0.4, 0.6])
        np.testing.assert_allclose(c.mass_up_to([0.0, 0.0, 1.0], [0.0, 0.5, 0.25]), [0.0, 0.2, 0.55])

    def test_single_atom_always_returns_it(self, rng):
        c = Finite([3.0], [1.0])
        np.testing.assert_array_equal(c.sample(100, rng), np.full(100, 3.0))

    def test_finite_frequencies_match_weights(self, rng):
        w = np.array([0.1, 0.2, 0.3, 0.4])
        c = Finite(np.arange(4.0), w)
        x = c.sample(100_000, rng)
        freq = np.bincount(x.astype(int), minlength=4) / x.size
        chi2 = np.sum((freq - w) ** 2 / w) * x.size
        assert chi2 < 16.27  # 0.999 quantile with 3 degrees of freedom

    def test_gaussian_quantiles(self, rng):
        x = gaussian(1.0, 2.0).sample(200_000, rng)
        assert abs(x.mean() - 1.0) < 0.02
        assert abs(x.std() - 2.0) < 0.02

    def test_uniform_range(self, rng):
        x = uniform(0, 1).sample(10_000, rng)
        assert x.min() > 0 and x.max() < 1

    @pytest.mark.parametrize("desc", [
        {"gaussian": [0, 1]}, {"uniform": [0, 2]}, {"exponential": 1.5}, {"beta": [2, 3]},
        {"bernoulli": [0.3]}, {"finite": {"support": [0, 1], "weights": [0.5, 0.5]}},
    ])
    def test_descriptor_round_trip(self, desc, rng):
        c = component_from_descriptor(desc)
        c2 = component_from_descriptor(c.describe())
        a = c.sample(50, np.random.default_rng(1))
        b = c2.sample(50, np.random.default_rng(1))
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize("desc", [{"cauchy": [0, 1]}, {"gaussian": [0, 1], "uniform": [0, 1]},
                                      {"finite": {"support": [0]}}])
    def test_bad_descriptors(self, desc):
        with pytest.raises(ValueError):
            component_from_descriptor(desc)


class TestProductDistribution:
    def test_from_descriptor_forms(self):
        a = ProductDistribution.from_descriptor({"iid": {"gaussian": [0, 1]}, "d": 3})
        b = ProductDistribution.from_descriptor([{"gaussian": [0, 1]}] * 3)
        assert a.d == b.d == 3
        assert a.describe() == b.describe()
        with pytest.raises(ValueError):
            ProductDistribution.from_descriptor({"iid": {"gaussian": [0, 1]}})

    def test_flags(self):
        assert ProductDistribution.iid(bernoulli(0.5), 4).is_finite
        mixed = ProductDistribution((bernoulli(0.5), gaussian()))
        assert not mixed.is_finite and mixed.has_cdf

    def test_sample_point_ranges(self, rng):
        x = sample_point(ProductDistribution.iid(bernoulli(0.5), 1), rng)
        assert x[0] in (-1.0, 1.0)
        y = sample_point(ProductDistribution.iid(uniform(0, 1), 2), rng)
        assert y.shape == (2,) and np.all((0 <= y) & (y <= 1))

    def test_coordinates_are_uncorrelated(self, rng):
        X = ProductDistribution.iid(gaussian(), 3).sample(100_000, rng)
        C = np.corrcoef(X.T)
        assert np.abs(C[np.triu_indices(3, 1)]).max() < 0.02

    def test_same_stream_same_sample(self):
        dist = ProductDistribution.from_descriptor([{"exponential": 1}, {"uniform": [0, 1]}])
        np.testing.assert_array_equal(dist.sample(10, trial_rng(3, 4)), dist.sample(10, trial_rng(3, 4)))
        assert not np.array_equal(dist.sample(10, trial_rng(3, 4)), dist.sample(10, trial_rng(3, 5)))


class TestLabels:
    def test_sign_of_zero_is_plus(self):
        np.testing.assert_array_equal(sign(np.array([-1.0, 0.0, 2.0])), [-1, 1, 1])

    def test_noiseless_constant_target(self, rng):
        oracle = LabeledOracle(ProductDistribution.iid(gaussian(), 2), Target(Constant(1), 0.0))
        for _ in range(20):
            _, b = sample_labeled(oracle, rng)
            assert b == 1

    def test_flip_rate(self, rng):
        f = Halfspace([1.0, -1.0], 0.2)
        oracle = LabeledOracle(ProductDistribution.iid(gaussian(), 2), Target(f, 0.1))
        X, b = oracle.sample(100_000, rng)
        assert abs(np.mean(b != f(X)) - 0.1) < 0.01

    def test_fair_coin_labels(self, rng):
        oracle = LabeledOracle(ProductDistribution.iid(uniform(), 2),
                               Conditional(lambda X: np.full(len(X), 0.5)))
        _, b = oracle.sample(100_000, rng)
        assert abs(b.mean()) < 0.01

    def test_flip_prob_must_be_below_half(self):
        with pytest.raises(ValueError):
            Target(Constant(1), 0.5)

    def test_bayes_error_and_error_of(self, rng):
        f = Halfspace([1.0], 0.0)
        oracle = LabeledOracle(ProductDistribution.iid(gaussian(), 1), Target(f, 0.2))
        assert oracle.bayes_error().value == 0.2
        e = oracle.error_of(f, 10_000, rng)
        assert e.value == pytest.approx(0.2)  # exact label law: every point contributes 0.2
        flipped = oracle.error_of(lambda X: -f(X), 10_000, rng)
        assert flipped.value == pytest.approx(0.8)

    def test_conditional_bayes_error(self, rng):
        # P[+1 | x] = x on uniform[0,1]; Bayes error is E[min(x, 1-x)] = 1/4
        oracle = LabeledOracle(ProductDistribution.iid(uniform(), 1), Conditional(lambda X: X[:, 0]))
        e = oracle.bayes_error(rng, 200_000)
        assert abs(e.value - 0.25) < 3 * e.stderr + 1e-3


class TestAugmentation:
    def test_tags_in_unit_cube(self, rng):
        A = augment(rng.standard_normal((1000, 3)), rng)
        assert A.tag.min() >= 0 and A.tag.max() <= 1
        assert A.base.shape == A.tag.shape == A.tiebreak.shape

    def test_tag_mean(self, rng):
        A = augment(np.zeros((100_000, 2)), rng)
        np.testing.assert_allclose(A.tag.mean(axis=0), 0.5, atol=0.01)

    def test_equal_bases_compare_by_tag(self):
        assert augmented_less(1.0, 0.2, 5, 1.0, 0.3, 0)
        assert not augmented_less(1.0, 0.3, 0, 1.0, 0.2, 5)
        assert augmented_less(0.5, 0.9, 0, 1.0, 0.1, 0)
        assert augmented_less(1.0, 0.2, 1, 1.0, 0.2, 2)

    def test_augmented_order_is_strict_total(self, rng):
        X = rng.integers(0, 3, size=(5000, 1)).astype(float)
        A = augment(X, rng)
        keys = list(zip(A.base[:, 0], A.tag[:, 0], A.tiebreak[:, 0]))
        assert len(set(keys)) == len(keys)

    @given(st.lists(st.tuples(st.integers(0, 2), st.floats(0, 1), st.integers(0, 3)), min_size=2, max_size=2))
    def test_less_matches_tuple_order(self, pair):
        (a, b) = pair
        assert bool(augmented_less(*a, *b)) == (a < b)

    def test_point_view(self, rng):
        A = augment(np.array([[1.0, 2.0]]), rng)
        assert A[0].key(1)[0] == 2.0 and len(A) == 1
