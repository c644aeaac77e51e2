"""Product distributions on R^d, labeled-example oracles and augmented samples.

A product distribution is a tuple of independent one-dimensional components.
Continuous components are sampled through their inverse CDF; finite components
are given by a sorted support and a weight vector.  Every stochastic function
takes an explicit :class:`numpy.random.Generator` so experiments are
reproducible trial by trial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy import special

__all__ = [
    "Continuous",
    "Finite",
    "ProductDistribution",
    "uniform",
    "gaussian",
    "exponential",
    "beta",
    "bernoulli",
    "Target",
    "Conditional",
    "LabeledOracle",
    "AugmentedPoint",
    "AugmentedSample",
    "Estimate",
    "sample_point",
    "sample_points",
    "sample_labeled",
    "augment",
    "augmented_less",
    "trial_rng",
    "sign",
]


def sign(z: np.ndarray) -> np.ndarray:
    """Sign with ``sign(0) = +1``, returned as int8."""
    return np.where(np.asarray(z) >= 0, 1, -1).astype(np.int8)


def trial_rng(master: int, index: int) -> np.random.Generator:
    """Independent stream for trial ``index`` of an experiment seeded by ``master``."""
    return np.random.default_rng(np.random.SeedSequence([int(master), int(index)]))


def _open_uniform(n: int, rng: np.random.Generator) -> np.ndarray:
    # strictly inside (0, 1) so inverse CDFs never return infinities
    return (rng.integers(0, 2**53, size=n).astype(np.float64) + 0.5) / 2.0**53


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo estimate with its standard error."""

    value: float
    stderr: float
    n: int

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True, eq=False)
class Continuous:
    """One-dimensional continuous law given by its inverse CDF.

    ``cdf`` is optional; when present it enables exact cell-mass computations.
    """

    name: str
    params: tuple
    ppf: Callable[[np.ndarray], np.ndarray]
    cdf: Callable[[np.ndarray], np.ndarray] | None = None

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.asarray(self.ppf(_open_uniform(n, rng)), dtype=np.float64)

    def mass_up_to(self, base: np.ndarray, tag: np.ndarray | None = None) -> np.ndarray:
        """``P[(x, z) <= (base, tag)]`` in the augmented order; tags are irrelevant here."""
        if self.cdf is None:
            raise ValueError(f"component {self.name} has no CDF")
        base = np.asarray(base, dtype=np.float64)
        out = np.empty_like(base)
        out[base == -np.inf] = 0.0
        out[base == np.inf] = 1.0
        fin = np.isfinite(base)
        out[fin] = self.cdf(base[fin])
        return out

    def describe(self) -> dict:
        return {self.name: list(self.params)}


@dataclass(frozen=True, eq=False)
class Finite:
    """One-dimensional law on finitely many points."""

    support: np.ndarray
    weights: np.ndarray
    cumulative: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        s = np.asarray(self.support, dtype=np.float64).ravel()
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if s.size == 0 or s.size != w.size:
            raise ValueError("support and weights must be nonempty and of equal length")
        if np.any(np.diff(s) <= 0):
            raise ValueError("support points must be strictly increasing")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
        s.setflags(write=False)
        w.setflags(write=False)
        c = np.cumsum(w)
        c[-1] = 1.0
        c.setflags(write=False)
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "cumulative", c)

    @property
    def name(self) -> str:
        return "finite"

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(n)
        idx = np.searchsorted(self.cumulative, u, side="right")
        return self.support[np.minimum(idx, self.support.size - 1)]

    def cdf(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.support, np.asarray(x, dtype=np.float64), side="right")
        return np.concatenate([[0.0], self.cumulative])[idx]

    def cdf_left(self, x: np.ndarray) -> np.ndarray:
        """``P[X < x]``."""
        idx = np.searchsorted(self.support, np.asarray(x, dtype=np.float64), side="left")
        return np.concatenate([[0.0], self.cumulative])[idx]

    def mass_up_to(self, base: np.ndarray, tag: np.ndarray | None = None) -> np.ndarray:
        """``P[(x, z) <= (base, tag)]`` where ``z`` is a uniform tag.

        Without a tag this is the ordinary CDF.
        """
        base = np.asarray(base, dtype=np.float64)
        if tag is None:
            return self.cdf(base)
        left = self.cdf_left(base)
        atom = self.cdf(base) - left
        return left + atom * np.asarray(tag, dtype=np.float64)

    def describe(self) -> dict:
        return {"finite": {"support": self.support.tolist(), "weights": self.weights.tolist()}}


Component = Union[Continuous, Finite]


def uniform(a: float = 0.0, b: float = 1.0) -> Continuous:
    if not b > a:
        raise ValueError("uniform requires a < b")
    return Continuous(
        "uniform",
        (float(a), float(b)),
        ppf=lambda u: a + (b - a) * u,
        cdf=lambda x: np.clip((x - a) / (b - a), 0.0, 1.0),
    )


def gaussian(mu: float = 0.0, sigma: float = 1.0) -> Continuous:
    if not sigma > 0:
        raise ValueError("gaussian requires sigma > 0")
    return Continuous(
        "gaussian",
        (float(mu), float(sigma)),
        ppf=lambda u: mu + sigma * special.ndtri(u),
        cdf=lambda x: special.ndtr((x - mu) / sigma),
    )


def exponential(lam: float = 1.0) -> Continuous:
    if not lam > 0:
        raise ValueError("exponential requires lam > 0")
    return Continuous(
        "exponential",
        (float(lam),),
        ppf=lambda u: -np.log1p(-u) / lam,
        cdf=lambda x: np.where(x > 0, -np.expm1(-lam * np.maximum(x, 0.0)), 0.0),
    )


def beta(a: float, b: float) -> Continuous:
    if not (a > 0 and b > 0):
        raise ValueError("beta requires positive shape parameters")
    return Continuous(
        "beta",
        (float(a), float(b)),
        ppf=lambda u: special.betaincinv(a, b, u),
        cdf=lambda x: special.betainc(a, b, np.clip(x, 0.0, 1.0)),
    )


def bernoulli(p_plus: float = 0.5) -> Finite:
    """Law on ``{-1, +1}`` with ``P[+1] = p_plus``."""
    return Finite(np.array([-1.0, 1.0]), np.array([1.0 - p_plus, p_plus]))


_PRESETS = {
    "uniform": uniform,
    "gaussian": gaussian,
    "exponential": exponential,
    "beta": beta,
    "bernoulli": bernoulli,
}


def component_from_descriptor(desc: dict) -> Component:
    """Build a component from ``{"gaussian": [0, 1]}``-style descriptors."""
    if not isinstance(desc, dict) or len(desc) != 1:
        raise ValueError(f"component descriptor must be a one-key mapping, got {desc!r}")
    (name, args), = desc.items()
    if name == "finite":
        if set(args) != {"support", "weights"}:
            raise ValueError("finite component needs exactly 'support' and 'weights'")
        return Finite(np.asarray(args["support"]), np.asarray(args["weights"]))
    if name not in _PRESETS:
        raise ValueError(f"unknown component preset {name!r}")
    if isinstance(args, (int, float)):
        args = [args]
    return _PRESETS[name](*args)


@dataclass(frozen=True, eq=False)
class ProductDistribution:
    """mu = mu_1 x ... x mu_d."""

    components: tuple

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        if len(comps) < 1:
            raise ValueError("a product distribution needs d >= 1 components")
        for c in comps:
            if not isinstance(c, (Continuous, Finite)):
                raise TypeError(f"unsupported component {c!r}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def iid(cls, component: Component, d: int) -> "ProductDistribution":
        return cls((component,) * d)

    @classmethod
    def from_descriptor(cls, desc) -> "ProductDistribution":
        """Accepts a list of component descriptors or ``{"iid": comp, "d": d}``."""
        if isinstance(desc, dict):
            if set(desc) != {"iid", "d"}:
                raise ValueError("distribution mapping must have exactly keys 'iid' and 'd'")
            return cls.iid(component_from_descriptor(desc["iid"]), int(desc["d"]))
        return cls(tuple(component_from_descriptor(c) for c in desc))

    def describe(self) -> list:
        return [c.describe() for c in self.components]

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def is_finite(self) -> bool:
        return all(isinstance(c, Finite) for c in self.components)

    @property
    def has_cdf(self) -> bool:
        return all(isinstance(c, Finite) or c.cdf is not None for c in self.components)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` i.i.d. points as an ``(n, d)`` array, one component at a time."""
        out = np.empty((n, self.d), dtype=np.float64)
        for i, c in enumerate(self.components):
            out[:, i] = c.sample(n, rng)
        return out


def sample_point(dist: ProductDistribution, rng: np.random.Generator) -> np.ndarray:
    return dist.sample(1, rng)[0]


def sample_points(dist: ProductDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    return dist.sample(n, rng)


# ---------------------------------------------------------------------------
# labeled oracles


@dataclass(frozen=True, eq=False)
class Target:
    """Labels ``f(x)`` flipped independently with probability ``flip_prob``."""

    f: Callable[[np.ndarray], np.ndarray]
    flip_prob: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.flip_prob < 0.5:
            raise ValueError("flip_prob must lie in [0, 1/2)")

    def prob_plus(self, X: np.ndarray) -> np.ndarray:
        fx = np.asarray(self.f(X))
        return np.where(fx > 0, 1.0 - self.flip_prob, self.flip_prob)

    def draw(self, X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        fx = np.asarray(self.f(X)).astype(np.int8)
        flips = rng.random(X.shape[0]) < self.flip_prob
        return np.where(flips, -fx, fx).astype(np.int8)


@dataclass(frozen=True, eq=False)
class Conditional:
    """Arbitrary label law: ``P[b = +1 | x] = p_plus(x)``."""

    p_plus: Callable[[np.ndarray], np.ndarray]

    def prob_plus(self, X: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(self.p_plus(X), dtype=np.float64), 0.0, 1.0)

    def draw(self, X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        p = self.prob_plus(X)
        return np.where(rng.random(X.shape[0]) < p, 1, -1).astype(np.int8)


@dataclass(frozen=True, eq=False)
class LabeledOracle:
    marginal: ProductDistribution
    label_rule: Target | Conditional

    @property
    def d(self) -> int:
        return self.marginal.d

    def sample(self, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        X = self.marginal.sample(n, rng)
        return X, self.label_rule.draw(X, rng)

    def bayes_error(self, rng: np.random.Generator | None = None, n: int = 100_000) -> Estimate:
        """Error of the Bayes classifier, a lower bound on any class optimum.

        Exact for :class:`Target` rules (it equals the flip probability);
        Monte Carlo over the marginal for :class:`Conditional` rules.
        """
        if isinstance(self.label_rule, Target):
            return Estimate(self.label_rule.flip_prob, 0.0, 0)
        if rng is None:
            raise ValueError("a random stream is needed for conditional label rules")
        p = self.label_rule.prob_plus(self.marginal.sample(n, rng))
        v = np.minimum(p, 1.0 - p)
        return Estimate(float(v.mean()), float(v.std(ddof=1) / math.sqrt(n)), n)

    def error_of(self, h: Callable[[np.ndarray], np.ndarray], n: int, rng: np.random.Generator) -> Estimate:
        """``P[h(x) != b]`` estimated with the exact conditional label law."""
        X = self.marginal.sample(n, rng)
        p = self.label_rule.prob_plus(X)
        pred = np.asarray(h(X))
        loss = np.where(pred > 0, 1.0 - p, p)
        return Estimate(float(loss.mean()), float(loss.std(ddof=1) / math.sqrt(n)), n)


def sample_labeled(oracle: LabeledOracle, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    X, b = oracle.sample(1, rng)
    return X[0], int(b[0])


# ---------------------------------------------------------------------------
# augmented points


@dataclass(frozen=True, eq=False)
class AugmentedPoint:
    """A point with a uniform tag per coordinate and a secondary tie-break integer."""

    base: np.ndarray
    tag: np.ndarray
    tiebreak: np.ndarray

    def key(self, i: int) -> tuple[float, float, int]:
        return (float(self.base[i]), float(self.tag[i]), int(self.tiebreak[i]))


@dataclass(frozen=True, eq=False)
class AugmentedSample:
    """``n`` augmented points stored column-wise as ``(n, d)`` arrays."""

    base: np.ndarray
    tag: np.ndarray
    tiebreak: np.ndarray

    def __post_init__(self) -> None:
        if not (self.base.shape == self.tag.shape == self.tiebreak.shape):
            raise ValueError("base, tag and tiebreak must share a shape")

    def __len__(self) -> int:
        return self.base.shape[0]

    def __getitem__(self, i: int) -> AugmentedPoint:
        return AugmentedPoint(self.base[i], self.tag[i], self.tiebreak[i])


def augment(points: np.ndarray, rng: np.random.Generator) -> AugmentedSample:
    """Attach i.i.d. uniform tags (and tie-break integers) to ``points``."""
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    tag = rng.random(X.shape)
    tb = rng.integers(0, 2**64, size=X.shape, dtype=np.uint64)
    return AugmentedSample(X, tag, tb)


def augmented_less(a_base, a_tag, a_tb, b_base, b_tag, b_tb) -> np.ndarray:
    """Elementwise lexicographic ``(base, tag, tiebreak)`` comparison."""
    a_base, b_base = np.asarray(a_base), np.asarray(b_base)
    a_tag, b_tag = np.asarray(a_tag), np.asarray(b_tag)
    return (a_base < b_base) | (
        (a_base == b_base) & ((a_tag < b_tag) | ((a_tag == b_tag) & (np.asarray(a_tb) < np.asarray(b_tb))))
    )
