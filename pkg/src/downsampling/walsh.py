"""Walsh basis on ``[n]^d`` for ``n`` a power of two.

Points are written ``x in {0, ..., n-1}^d``.  For an index ``alpha`` in the
same set, ``psi_alpha(x) = prod_i (-1)^popcount(alpha_i & x_i)``, so the bits
of ``alpha_i`` select which bits of ``x_i`` enter the parity.  Coefficients
use the inner product ``<f, g> = E_x[f(x) g(x)]`` under the uniform law,
giving an orthonormal basis.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .product_dist import Estimate

__all__ = [
    "WalshSpectrum",
    "NoiseParams",
    "walsh_eval",
    "walsh_matrix",
    "fwht",
    "transform",
    "inverse_transform",
    "level_sizes",
    "stability",
    "noise_sensitivity_exact",
    "noise_sensitivity_mc",
    "noise_operator",
    "tail_weight",
    "feature_count",
    "low_degree_features",
    "feature_matrix",
]

TABLE_BUDGET = 2**24
FEATURE_BUDGET = 200_000


def _check_pow2(n: int) -> None:
    if n < 1 or n & (n - 1):
        raise ValueError(f"n={n} is not a power of two")


def walsh_matrix(n: int) -> np.ndarray:
    """``W[a, x] = (-1)^popcount(a & x)`` as an int8 ``(n, n)`` table."""
    _check_pow2(n)
    a = np.arange(n)
    bits = np.bitwise_and(a[:, None], a[None, :])
    par = np.zeros_like(bits)
    while bits.any():
        par ^= bits & 1
        bits >>= 1
    return (1 - 2 * par).astype(np.int8)


def walsh_eval(alpha, x, n: int) -> np.ndarray:
    """``psi_alpha(x)`` for one index against one or many points."""
    _check_pow2(n)
    a = np.asarray(alpha, dtype=np.int64)
    X = np.asarray(x, dtype=np.int64)
    if np.any((a < 0) | (a >= n)) or np.any((X < 0) | (X >= n)):
        raise ValueError("index and point coordinates must lie in [0, n)")
    W = walsh_matrix(n)
    vals = W[a, X]
    return np.prod(vals, axis=-1).astype(np.int8)


def fwht(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along one axis (natural order)."""
    x = np.moveaxis(np.asarray(x, dtype=np.float64), axis, -1)
    n = x.shape[-1]
    _check_pow2(n)
    shape = x.shape
    y = x.reshape(-1, n).copy()
    h = 1
    while h < n:
        y = y.reshape(-1, n // (2 * h), 2, h)
        a, b = y[:, :, 0, :], y[:, :, 1, :]
        y = np.stack([a + b, a - b], axis=2)
        h *= 2
    return np.moveaxis(y.reshape(shape), -1, axis)


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    n: int
    d: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if self.coeffs.shape != (self.n,) * self.d:
            raise ValueError("coefficient table has the wrong shape")

    def __getitem__(self, alpha) -> float:
        return float(self.coeffs[tuple(alpha)])

    @property
    def levels(self) -> np.ndarray:
        """``|alpha|`` for every index, shaped like :attr:`coeffs`."""
        return level_sizes(self.n, self.d)

    def weight(self) -> float:
        return float(np.sum(self.coeffs**2))


@dataclass(frozen=True)
class NoiseParams:
    """Resampling probability ``delta`` and the matching correlation ``rho``."""

    n: int
    delta: float

    @property
    def rho(self) -> float:
        return 1.0 - self.n * self.delta / (self.n - 1)


def level_sizes(n: int, d: int) -> np.ndarray:
    grids = np.indices((n,) * d)
    return (grids != 0).sum(axis=0)


def _check_table(table: np.ndarray) -> tuple[int, int]:
    t = np.asarray(table)
    d = t.ndim
    n = t.shape[0] if d else 1
    if d == 0 or any(s != n for s in t.shape):
        raise ValueError("table must be an n x ... x n array")
    _check_pow2(n)
    if t.size > TABLE_BUDGET:
        raise ValueError(f"table of size {t.size} exceeds budget {TABLE_BUDGET}")
    return n, d


def transform(table: np.ndarray) -> WalshSpectrum:
    """Coefficients ``<f, psi_alpha>`` via one butterfly pass per axis."""
    n, d = _check_table(table)
    out = np.asarray(table, dtype=np.float64)
    for ax in range(d):
        out = fwht(out, axis=ax) / n
    return WalshSpectrum(n, d, out)


def inverse_transform(spec: WalshSpectrum) -> np.ndarray:
    """``sum_alpha c_alpha psi_alpha`` evaluated on the whole grid."""
    _check_table(spec.coeffs)
    out = spec.coeffs
    for ax in range(spec.d):
        out = fwht(out, axis=ax)
    return out


def stability(spec: WalshSpectrum, rho: float) -> float:
    if not -1.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    return float(np.sum(np.power(rho, spec.levels) * spec.coeffs**2))


def noise_sensitivity_exact(spec: WalshSpectrum, delta: float) -> float:
    """``1/2 - 1/2 stab_rho`` with ``rho = 1 - n delta / (n - 1)``."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    return 0.5 - 0.5 * stability(spec, NoiseParams(spec.n, delta).rho)


def noise_operator(table: np.ndarray, rho: float) -> np.ndarray:
    """``T_rho f`` in the time domain.

    Each coordinate is kept with probability ``rho`` and otherwise redrawn
    uniformly from ``[n]``; per axis this is ``rho f + (1 - rho) mean_axis f``.
    """
    out = np.asarray(table, dtype=np.float64)
    for ax in range(out.ndim):
        out = rho * out + (1.0 - rho) * out.mean(axis=ax, keepdims=True)
    return out


def noise_sensitivity_mc(f, n: int, d: int, delta: float, trials: int,
                         rng: np.random.Generator) -> Estimate:
    """``P[f(u) != f(v)]`` with ``v_i = u_i`` w.p. ``1 - delta``, else uniform on ``[n] minus {u_i}``.

    ``f`` is a table of shape ``(n,)*d`` or a callable over ``(N, d)`` cell arrays.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    u = rng.integers(0, n, size=(trials, d))
    moved = rng.random((trials, d)) < delta
    shift = rng.integers(1, n, size=(trials, d)) if n > 1 else np.zeros((trials, d), dtype=np.int64)
    v = np.where(moved, (u + shift) % n, u)
    if callable(f):
        fu, fv = np.asarray(f(u)), np.asarray(f(v))
    else:
        t = np.asarray(f)
        fu, fv = t[tuple(u.T)], t[tuple(v.T)]
    diff = (fu > 0) != (fv > 0)
    p = float(diff.mean())
    return Estimate(p, math.sqrt(p * (1 - p) / trials), trials)


def tail_weight(spec: WalshSpectrum, t: float) -> float:
    """Squared weight on indices with at least ``t`` nonzero entries."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return float(np.sum(spec.coeffs[spec.levels >= t] ** 2))


def feature_count(n: int, d: int, t: int) -> int:
    return sum(math.comb(d, j) * (n - 1) ** j for j in range(min(t, d + 1)))


def low_degree_features(n: int, d: int, t: int, budget: int = FEATURE_BUDGET) -> np.ndarray:
    """All indices with fewer than ``t`` nonzero entries, as an ``(F, d)`` array."""
    _check_pow2(n)
    if t < 1:
        raise ValueError("t must be at least 1")
    count = feature_count(n, d, t)
    if count > budget:
        raise ValueError(f"{count} features exceed budget {budget}")
    out = np.zeros((count, d), dtype=np.int64)
    row = 0
    for j in range(min(t, d + 1)):
        if j == 0:
            row += 1
            continue
        vals = np.indices((n - 1,) * j).reshape(j, -1).T + 1
        for support in itertools.combinations(range(d), j):
            out[row:row + vals.shape[0], list(support)] = vals
            row += vals.shape[0]
    return out


def feature_matrix(features: np.ndarray, cells: np.ndarray, n: int) -> np.ndarray:
    """``Phi[s, f] = psi_{features[f]}(cells[s])`` as float64 ``(N, F)``."""
    W = walsh_matrix(n)
    A = np.asarray(features, dtype=np.int64)
    X = np.asarray(cells, dtype=np.int64)
    out = np.ones((X.shape[0], A.shape[0]), dtype=np.int8)
    for i in range(A.shape[1]):
        out *= W[X[:, i][:, None], A[:, i][None, :]]
    return out.astype(np.float64)
