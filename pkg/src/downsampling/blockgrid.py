"""Induced block partitions of R^d, grid functions and distribution distances.

Cells are indexed from 0, so a partition with ``r`` cells per dimension maps
points to ``{0, ..., r-1}^d``.  Per dimension the cuts ``a_1 < ... < a_{r-1}``
define half-open intervals ``(a_{j-1}, a_j]`` with ``a_0 = -inf`` and
``a_r = +inf``; a point equal to a cut belongs to the cell on its left.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .product_dist import (
    AugmentedSample,
    Estimate,
    ProductDistribution,
    augment,
    augmented_less,
)

log = logging.getLogger(__name__)

__all__ = [
    "DegenerateSampleError",
    "BlockPartition",
    "AugmentedBlockPartition",
    "ExtremeCellView",
    "GridFunction",
    "TVEstimate",
    "induce_partition",
    "induce_augmented_partition",
    "block_of",
    "blockpoint_of",
    "augmented_block_of",
    "cell_masses",
    "tv_from_masses",
    "estimate_tv_to_uniform",
    "block_function",
    "coarse_eval",
    "empirical_distance",
    "grid_sample_size",
    "all_cells",
    "partition_to_json",
    "partition_from_json",
]

FORMAT_VERSION = 1
DEFAULT_BUDGET = 2**22


class DegenerateSampleError(ValueError):
    """Raised when a sample has fewer than ``r`` distinct values in a dimension."""


def all_cells(r: int, d: int) -> np.ndarray:
    """Every cell of ``[r]^d`` in C order, shape ``(r**d, d)``."""
    return np.indices((r,) * d).reshape(d, -1).T.copy()


def grid_sample_size(r: int, d: int, tv: float, fail: float = 1 / 6, const: float = 18.0) -> int:
    """Samples for ``P[TV(block(mu), unif) > tv] <= fail``, rounded up to a multiple of ``r``.

    Solves ``4 r d exp(-tv^2 m / (const r d^2)) <= fail`` for ``m``.
    """
    m = const * r * d * d / (tv * tv) * math.log(4 * r * d / fail)
    return int(r * math.ceil(math.ceil(m) / r))


def _as_points(x, d: int) -> np.ndarray:
    X = np.asarray(x, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1) if X.size == d else X.reshape(-1, 1)
    if X.shape[1] != d:
        raise ValueError(f"expected points of dimension {d}, got shape {X.shape}")
    return X


def _as_cells(v, r: int, d: int) -> np.ndarray:
    V = np.asarray(v)
    if V.ndim == 1:
        V = V.reshape(1, -1) if V.size == d else V.reshape(-1, 1)
    if V.shape[1] != d:
        raise ValueError(f"expected cells of dimension {d}, got shape {V.shape}")
    if V.size and (V.min() < 0 or V.max() >= r):
        raise IndexError(f"cell index outside [0, {r})")
    return V.astype(np.int64)


def _extension(lo: np.ndarray, hi: np.ndarray, first: np.ndarray, last: np.ndarray):
    # probe window spanning three times the data range
    lo = np.minimum(lo, first)
    hi = np.maximum(hi, last)
    span = hi - lo
    span = np.where(span > 0, span, 1.0)
    return lo - span, hi + span


class _PartitionBase:
    r: int
    d: int

    def all_cells(self) -> np.ndarray:
        return all_cells(self.r, self.d)

    def _cut_bases(self) -> np.ndarray:
        raise NotImplementedError

    def cell_bounds(self, v) -> tuple[np.ndarray, np.ndarray]:
        """Lower and upper base values of each cell (``-inf``/``+inf`` at the extremes)."""
        V = _as_cells(v, self.r, self.d)
        cuts = self._cut_bases()
        padded = np.concatenate(
            [np.full((self.d, 1), -np.inf), cuts, np.full((self.d, 1), np.inf)], axis=1
        )
        dims = np.arange(self.d)
        return padded[dims, V], padded[dims, V + 1]

    def probe_bounds(self, v) -> tuple[np.ndarray, np.ndarray]:
        """Cell bounds with infinite sides replaced by the probe window."""
        low, high = self.cell_bounds(v)
        cuts = self._cut_bases()
        if cuts.shape[1]:
            first, last = cuts[:, 0], cuts[:, -1]
        else:
            first, last = self.lo, self.hi
        ext_lo, ext_hi = _extension(self.lo, self.hi, first, last)
        low = np.where(np.isinf(low), ext_lo, low)
        high = np.where(np.isinf(high), ext_hi, high)
        return low, high


@dataclass(frozen=True, eq=False)
class BlockPartition(_PartitionBase):
    """Per-dimension cuts ``(d, r-1)`` and representatives ``(d, r)``.

    ``lo``/``hi`` record the sampled data range per dimension and only serve
    to bound probes in the unbounded extreme cells.
    """

    cuts: np.ndarray
    reps: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    perturbed: int = 0

    augmented = False

    def __post_init__(self) -> None:
        cuts = np.array(self.cuts, dtype=np.float64, ndmin=2)
        reps = np.array(self.reps, dtype=np.float64, ndmin=2)
        d, r = reps.shape
        if cuts.shape != (d, r - 1):
            raise ValueError(f"cuts shape {cuts.shape} inconsistent with reps shape {reps.shape}")
        if np.any(np.diff(cuts, axis=1) <= 0):
            raise ValueError("cuts must be strictly increasing per dimension")
        padded = np.concatenate([np.full((d, 1), -np.inf), cuts, np.full((d, 1), np.inf)], axis=1)
        if not (np.all(reps > padded[:, :-1]) and np.all(reps <= padded[:, 1:])):
            raise ValueError("every representative must lie in its half-open interval")
        for name, arr in (("cuts", cuts), ("reps", reps)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        lo = np.array(self.lo, dtype=np.float64).reshape(d)
        hi = np.array(self.hi, dtype=np.float64).reshape(d)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_cuts(cls, cuts, reps=None) -> "BlockPartition":
        """Partition from explicit cuts; default representatives are interval midpoints,
        with the extreme cells represented one cut-gap beyond the outer cuts."""
        cuts = np.array(cuts, dtype=np.float64, ndmin=2)
        d, k = cuts.shape
        if reps is None:
            reps = np.empty((d, k + 1))
            for i in range(d):
                c = cuts[i]
                gap = (c[-1] - c[0]) / max(k - 1, 1) if k > 1 else 1.0
                gap = gap if gap > 0 else 1.0
                reps[i, 0] = c[0] - gap / 2 if k else 0.0
                if k:
                    reps[i, 1:k] = (c[:-1] + c[1:]) / 2
                    reps[i, k] = c[-1] + gap / 2
        if k:
            lo, hi = cuts[:, 0], cuts[:, -1]
        else:
            lo = hi = np.asarray(reps, dtype=np.float64)[:, 0]
        return cls(cuts, reps, lo, hi)

    @property
    def r(self) -> int:
        return self.reps.shape[1]

    @property
    def d(self) -> int:
        return self.reps.shape[0]

    def _cut_bases(self) -> np.ndarray:
        return self.cuts

    def block_of(self, x) -> np.ndarray:
        X = _as_points(x, self.d)
        out = np.empty(X.shape, dtype=np.int64)
        for i in range(self.d):
            out[:, i] = np.searchsorted(self.cuts[i], X[:, i], side="left")
        return out

    def blockpoint_of(self, v) -> np.ndarray:
        V = _as_cells(v, self.r, self.d)
        return self.reps[np.arange(self.d), V]


@dataclass(frozen=True, eq=False)
class AugmentedBlockPartition(_PartitionBase):
    """Cuts and representatives are augmented coordinates ``(base, tag, tiebreak)``.

    Representatives keep their augmented coordinates, but :meth:`blockpoint_of`
    returns only the base values.
    """

    cut_base: np.ndarray
    cut_tag: np.ndarray
    cut_tb: np.ndarray
    rep_base: np.ndarray
    rep_tag: np.ndarray
    rep_tb: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    augmented = True

    def __post_init__(self) -> None:
        conv = {
            "cut_base": np.float64,
            "cut_tag": np.float64,
            "cut_tb": np.uint64,
            "rep_base": np.float64,
            "rep_tag": np.float64,
            "rep_tb": np.uint64,
        }
        for name, dt in conv.items():
            arr = np.array(getattr(self, name), dtype=dt, ndmin=2)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        d, r = self.rep_base.shape
        if self.cut_base.shape != (d, r - 1) or self.cut_tag.shape != (d, r - 1):
            raise ValueError("augmented cut arrays have inconsistent shapes")
        a = (self.cut_base[:, :-1], self.cut_tag[:, :-1], self.cut_tb[:, :-1])
        b = (self.cut_base[:, 1:], self.cut_tag[:, 1:], self.cut_tb[:, 1:])
        if not np.all(augmented_less(*a, *b)):
            raise ValueError("augmented cuts must be strictly increasing")
        if np.any((self.cut_tag < 0) | (self.cut_tag > 1)):
            raise ValueError("tags must lie in [0, 1]")
        cells = self.block_of_dims(self.rep_base, self.rep_tag, self.rep_tb)
        if not np.array_equal(cells, np.broadcast_to(np.arange(r), (d, r))):
            raise ValueError("every representative must lie in its augmented interval")
        object.__setattr__(self, "lo", np.array(self.lo, dtype=np.float64).reshape(d))
        object.__setattr__(self, "hi", np.array(self.hi, dtype=np.float64).reshape(d))

    @property
    def r(self) -> int:
        return self.rep_base.shape[1]

    @property
    def d(self) -> int:
        return self.rep_base.shape[0]

    def _cut_bases(self) -> np.ndarray:
        return self.cut_base

    def _search(self, i: int, xb: np.ndarray, xt: np.ndarray, xtb: np.ndarray | None) -> np.ndarray:
        # number of cuts strictly below each point in the augmented order
        cb, ct, ctb = self.cut_base[i], self.cut_tag[i], self.cut_tb[i]
        lo = np.searchsorted(cb, xb, side="left")
        hi = np.searchsorted(cb, xb, side="right")
        out = lo.astype(np.int64)
        tie = np.nonzero(hi > lo)[0]
        if tie.size == 0:
            return out
        starts = lo[tie]
        for start in np.unique(starts):
            sel = tie[starts == start]
            end = hi[sel[0]]
            tags = ct[start:end]
            cnt = np.searchsorted(tags, xt[sel], side="left")
            # exact tag equality falls back to the tie-break integer
            eq = np.nonzero((cnt < tags.size) & (tags[np.minimum(cnt, tags.size - 1)] == xt[sel]))[0]
            for j in eq:
                xtj = np.uint64(0) if xtb is None else xtb[sel[j]]
                c = cnt[j]
                while c < tags.size and tags[c] == xt[sel[j]] and ctb[start + c] < xtj:
                    c += 1
                cnt[j] = c
            out[sel] = start + cnt
        return out

    def block_of_dims(self, base: np.ndarray, tag: np.ndarray, tb: np.ndarray | None) -> np.ndarray:
        """Vectorized cell lookup over arrays laid out as ``(d, n)``."""
        return np.stack(
            [self._search(i, base[i], tag[i], None if tb is None else tb[i]) for i in range(self.d)]
        )

    def block_of(self, base, tag=None, tiebreak=None) -> np.ndarray:
        """Cells of augmented points; ``base`` may also be an :class:`AugmentedSample`."""
        if isinstance(base, AugmentedSample):
            base, tag, tiebreak = base.base, base.tag, base.tiebreak
        if tag is None:
            raise ValueError("an augmented partition needs tags to locate points")
        X = _as_points(base, self.d)
        Z = np.asarray(tag, dtype=np.float64).reshape(X.shape)
        TB = None if tiebreak is None else np.asarray(tiebreak, dtype=np.uint64).reshape(X.shape)
        return self.block_of_dims(X.T, Z.T, None if TB is None else TB.T).T.copy()

    def blockpoint_of(self, v) -> np.ndarray:
        V = _as_cells(v, self.r, self.d)
        return self.rep_base[np.arange(self.d), V]


Partition = BlockPartition | AugmentedBlockPartition


def _perturb_ties(col: np.ndarray, r: int) -> tuple[np.ndarray, int]:
    s = np.sort(col)
    dup = np.concatenate([[False], s[1:] == s[:-1]])
    if not dup.any():
        return s, 0
    distinct = s.size - int(dup.sum())
    if distinct < r:
        raise DegenerateSampleError(f"only {distinct} distinct coordinates for r={r}")
    scale = 1e-12 * max(float(np.max(np.abs(s))), 1.0)
    # position within each run of equal values
    run_start = np.maximum.accumulate(np.where(~dup, np.arange(s.size), 0))
    offset = np.arange(s.size) - run_start
    s = s + offset * scale
    if np.any(np.diff(s) <= 0):
        raise DegenerateSampleError("tie perturbation collided with neighbouring coordinates")
    return s, int(dup.sum())


def _pick_reps(m: int, r: int, rng: np.random.Generator | None) -> np.ndarray:
    size = m // r
    if rng is None:
        return np.arange(r) * size + size - 1
    return np.arange(r) * size + rng.integers(0, size, size=r)


def induce_partition(samples, r: int, rng: np.random.Generator | None = None) -> BlockPartition:
    """Partition whose cuts are every ``(m/r)``-th order statistic per dimension.

    Representatives are drawn uniformly among the sampled coordinates inside
    each interval; with ``rng=None`` the largest sampled coordinate is used.
    Exact ties are spread by ``1e-12`` of the coordinate scale and logged.
    """
    X = np.asarray(samples, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    m, d = X.shape
    if r < 1 or m % r != 0:
        raise ValueError(f"r={r} must divide the sample size m={m}")
    cuts = np.empty((d, r - 1))
    reps = np.empty((d, r))
    perturbed = 0
    size = m // r
    for i in range(d):
        s, k = _perturb_ties(X[:, i], r)
        perturbed += k
        cuts[i] = s[size * np.arange(1, r) - 1]
        reps[i] = s[_pick_reps(m, r, rng)]
    if perturbed:
        log.warning("perturbed %d tied sample coordinates", perturbed)
    return BlockPartition(cuts, reps, X.min(axis=0), X.max(axis=0), perturbed)


def induce_augmented_partition(
    samples: AugmentedSample, r: int, rng: np.random.Generator | None = None
) -> AugmentedBlockPartition:
    """Augmented analogue of :func:`induce_partition` using the lexicographic order."""
    m, d = samples.base.shape
    if r < 1 or m % r != 0:
        raise ValueError(f"r={r} must divide the sample size m={m}")
    size = m // r
    cut_idx = size * np.arange(1, r) - 1
    rep_idx = _pick_reps(m, r, rng)
    arrays = {k: [] for k in ("cb", "ct", "ctb", "rb", "rt", "rtb")}
    for i in range(d):
        b, t, tb = samples.base[:, i], samples.tag[:, i], samples.tiebreak[:, i]
        order = np.lexsort((tb, t, b))
        b, t, tb = b[order], t[order], tb[order]
        if not np.all(augmented_less(b[:-1], t[:-1], tb[:-1], b[1:], t[1:], tb[1:])):
            raise DegenerateSampleError("augmented sample is not strictly ordered")
        arrays["cb"].append(b[cut_idx])
        arrays["ct"].append(t[cut_idx])
        arrays["ctb"].append(tb[cut_idx])
        arrays["rb"].append(b[rep_idx])
        arrays["rt"].append(t[rep_idx])
        arrays["rtb"].append(tb[rep_idx])
    st = {k: np.stack(v) for k, v in arrays.items()}
    return AugmentedBlockPartition(
        st["cb"], st["ct"], st["ctb"], st["rb"], st["rt"], st["rtb"],
        samples.base.min(axis=0), samples.base.max(axis=0),
    )


def block_of(p: BlockPartition, x) -> np.ndarray:
    return p.block_of(x)


def blockpoint_of(p: Partition, v) -> np.ndarray:
    return p.blockpoint_of(v)


def augmented_block_of(p: AugmentedBlockPartition, base, tag=None, tiebreak=None) -> np.ndarray:
    return p.block_of(base, tag, tiebreak)


def locate(p: Partition, X: np.ndarray, z: np.ndarray | None = None, tiebreak=None) -> np.ndarray:
    """Cells of points, with tags required exactly when ``p`` is augmented."""
    if p.augmented:
        if z is None:
            raise ValueError("a tag is required to locate points in an augmented partition")
        return p.block_of(X, z, tiebreak)
    if z is not None:
        raise ValueError("tags are only meaningful for augmented partitions")
    return p.block_of(X)


class ExtremeCellView:
    """View of an ``(r+2)``-partition whose outermost cells are set aside.

    Cells ``1..r`` in every coordinate are inner; a cell with some coordinate
    ``r+1`` is *upper*, and one with some coordinate ``0`` but none equal to
    ``r+1`` is *lower*.
    """

    def __init__(self, partition: Partition):
        if partition.r < 3:
            raise ValueError("an extreme-cell view needs at least 3 cells per dimension")
        self.partition = partition
        self.r = partition.r - 2
        self.d = partition.d

    def is_upper(self, V: np.ndarray) -> np.ndarray:
        return np.any(V == self.r + 1, axis=1)

    def is_lower(self, V: np.ndarray) -> np.ndarray:
        return np.any(V == 0, axis=1) & ~self.is_upper(V)

    def is_inner(self, V: np.ndarray) -> np.ndarray:
        return np.all((V >= 1) & (V <= self.r), axis=1)

    def corners(self, inner: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Infimal and supremal corners of inner cells given in ``{0..r-1}^d`` coordinates."""
        return self.partition.cell_bounds(np.asarray(inner) + 1)


# ---------------------------------------------------------------------------
# distances to uniform


@dataclass(frozen=True)
class TVEstimate:
    value: float
    stderr: float
    exact: bool


def cell_masses(p: Partition, dist: ProductDistribution) -> list[np.ndarray]:
    """Exact per-dimension cell masses (requires CDFs for every component)."""
    if dist.d != p.d:
        raise ValueError("distribution and partition dimensions differ")
    out = []
    for i, comp in enumerate(dist.components):
        if p.augmented:
            tag = p.cut_tag[i] if hasattr(comp, "cdf_left") else None
            F = comp.mass_up_to(p.cut_base[i], tag)
        else:
            F = comp.mass_up_to(p.cuts[i])
        F = np.concatenate([[0.0], F, [1.0]])
        out.append(np.clip(np.diff(F), 0.0, None))
    return out


def tv_from_masses(masses: list[np.ndarray]) -> float:
    """``0.5 * sum_v |prod_i p_i(v_i) - r^-d|`` via successive outer products."""
    r = masses[0].size
    P = np.asarray(masses[0], dtype=np.float64)
    for m in masses[1:]:
        P = np.multiply.outer(P, m)
    return 0.5 * float(np.abs(P - float(r) ** -len(masses)).sum())


def estimate_tv_to_uniform(
    p: Partition,
    dist: ProductDistribution,
    n: int = 100_000,
    rng: np.random.Generator | None = None,
    budget: int = 10**7,
) -> TVEstimate:
    """TV distance between ``block(mu)`` and the uniform law on the grid.

    Exact when every component has a CDF and ``r^d <= budget``; otherwise a
    plug-in Monte Carlo estimate with a delta-method standard error.
    """
    r, d = p.r, p.d
    if dist.has_cdf and r**d <= budget:
        return TVEstimate(tv_from_masses(cell_masses(p, dist)), 0.0, True)
    if rng is None:
        raise ValueError("Monte Carlo TV estimation needs a random stream")
    X = dist.sample(n, rng)
    if p.augmented:
        V = p.block_of(augment(X, rng))
    else:
        V = p.block_of(X)
    flat = np.ravel_multi_index(tuple(V.T), (r,) * d)
    keys, counts = np.unique(flat, return_counts=True)
    q = float(r) ** -d
    phat = counts / n
    tv = 0.5 * (np.abs(phat - q).sum() + (r**d - keys.size) * q)
    s = np.sign(phat - q)
    var = (np.sum(s * s * phat) - np.sum(s * phat) ** 2) / n
    return TVEstimate(float(tv), 0.5 * math.sqrt(max(var, 0.0)), False)


# ---------------------------------------------------------------------------
# grid functions


class GridFunction:
    """A total ``{-1, +1}``-valued function on ``{0..r-1}^d``.

    Either backed by a dense int8 table or by a query callable over cell
    arrays of shape ``(n, d)``.
    """

    def __init__(self, r: int, d: int, table: np.ndarray | None = None,
                 query: Callable[[np.ndarray], np.ndarray] | None = None):
        if (table is None) == (query is None):
            raise ValueError("provide exactly one of table or query")
        self.r, self.d = int(r), int(d)
        self._query = query
        self._table = None
        if table is not None:
            t = np.asarray(table)
            if t.shape != (self.r,) * self.d:
                raise ValueError(f"table shape {t.shape} is not ({r},)*{d}")
            if not np.all(np.abs(t) == 1):
                raise ValueError("grid function values must be +-1")
            t = t.astype(np.int8)
            t.setflags(write=False)
            self._table = t

    @property
    def dense(self) -> bool:
        return self._table is not None

    @property
    def table(self) -> np.ndarray:
        if self._table is None:
            return self(all_cells(self.r, self.d)).reshape((self.r,) * self.d)
        return self._table

    def __call__(self, v) -> np.ndarray:
        V = _as_cells(v, self.r, self.d)
        if self._table is not None:
            return self._table[tuple(V.T)]
        out = np.asarray(self._query(V))
        return np.where(out > 0, 1, -1).astype(np.int8)


def block_function(f: Callable[[np.ndarray], np.ndarray], p: Partition,
                   budget: int = DEFAULT_BUDGET) -> GridFunction:
    """``f^block = f o blockpoint``; dense when ``r^d <= budget``."""
    if p.r**p.d <= budget:
        cells = all_cells(p.r, p.d)
        vals = np.asarray(f(p.blockpoint_of(cells)))
        table = np.where(vals > 0, 1, -1).astype(np.int8).reshape((p.r,) * p.d)
        return GridFunction(p.r, p.d, table=table)
    return GridFunction(p.r, p.d, query=lambda V: f(p.blockpoint_of(V)))


def coarse_eval(g: GridFunction, p: Partition, x, z=None, tiebreak=None) -> np.ndarray:
    """``g(block(x))`` or, for augmented partitions, ``g(block(x, z))``."""
    X = _as_points(x, p.d)
    return g(locate(p, X, z, tiebreak))


def empirical_distance(f, g, dist: ProductDistribution, n: int, rng: np.random.Generator) -> Estimate:
    """Fraction of ``n`` i.i.d. points on which ``f`` and ``g`` disagree."""
    X = dist.sample(n, rng)
    diff = (np.asarray(f(X)) > 0) != (np.asarray(g(X)) > 0)
    p = float(diff.mean())
    return Estimate(p, math.sqrt(p * (1 - p) / n), n)


# ---------------------------------------------------------------------------
# serialization


def _ints(a: np.ndarray) -> list:
    return [[int(v) for v in row] for row in a]


def partition_to_json(p: Partition) -> str:
    """Exact text dump; floats are written with round-trip precision."""
    doc = {"format": "downsampling.partition", "version": FORMAT_VERSION}
    if p.augmented:
        doc.update(
            kind="augmented",
            cut_base=p.cut_base.tolist(), cut_tag=p.cut_tag.tolist(), cut_tb=_ints(p.cut_tb),
            rep_base=p.rep_base.tolist(), rep_tag=p.rep_tag.tolist(), rep_tb=_ints(p.rep_tb),
            lo=p.lo.tolist(), hi=p.hi.tolist(),
        )
    else:
        doc.update(kind="plain", cuts=p.cuts.tolist(), reps=p.reps.tolist(),
                   lo=p.lo.tolist(), hi=p.hi.tolist(), perturbed=p.perturbed)
    return json.dumps(doc, sort_keys=True)


def _rows(a, dtype, d=None) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    if arr.ndim == 1:
        arr = arr.reshape(d if d is not None else 1, -1)
    return arr


def partition_from_json(text: str) -> Partition:
    doc = json.loads(text)
    if doc.get("format") != "downsampling.partition" or doc.get("version") != FORMAT_VERSION:
        raise ValueError("not a version-1 partition dump")
    d = len(doc["lo"])
    if doc["kind"] == "plain":
        return BlockPartition(
            _rows(doc["cuts"], np.float64, d).reshape(d, -1), _rows(doc["reps"], np.float64, d),
            doc["lo"], doc["hi"], doc["perturbed"],
        )
    if doc["kind"] == "augmented":
        return AugmentedBlockPartition(
            _rows(doc["cut_base"], np.float64, d).reshape(d, -1),
            _rows(doc["cut_tag"], np.float64, d).reshape(d, -1),
            _rows(doc["cut_tb"], np.uint64, d).reshape(d, -1),
            _rows(doc["rep_base"], np.float64, d), _rows(doc["rep_tag"], np.float64, d),
            _rows(doc["rep_tb"], np.uint64, d), doc["lo"], doc["hi"],
        )
    raise ValueError(f"unknown partition kind {doc['kind']!r}")
