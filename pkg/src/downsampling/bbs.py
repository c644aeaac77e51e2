"""Counting blocks on which a function is non-constant, and closed-form bounds.

Probe counts only certify a lower bound on the true number of non-constant
blocks.  Exact counts come from geometric oracles: circle/box intersection
for disks, corner signs for halfspaces, separating axes for convex polygons,
and the infimal/supremal corner test for monotone functions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .blockgrid import AugmentedBlockPartition, all_cells
from .product_dist import Finite, ProductDistribution

__all__ = [
    "NonconstantCount",
    "BbsBound",
    "BudgetExceeded",
    "count_nonconstant_blocks",
    "corner_oracle_nonconstant",
    "disk_nonconstant",
    "halfspace_nonconstant",
    "polygon_nonconstant",
    "exact_nonconstant_count",
    "augmented_nonconstant_count",
    "bbs_bound",
    "min_r_for_epsilon",
]

PROBE_BUDGET = 2**24


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class NonconstantCount:
    count: int
    method: str
    probes_per_block: int | None = None
    flags: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.method not in ("probe", "corner-oracle", "analytic"):
            raise ValueError(f"unknown counting method {self.method!r}")
        if self.count < 0:
            raise ValueError("count must be nonnegative")


def _result(flags: np.ndarray, method: str, probes: int | None = None) -> NonconstantCount:
    return NonconstantCount(int(flags.sum()), method, probes, flags)


def count_nonconstant_blocks(f: Callable[[np.ndarray], np.ndarray], p, probes: int,
                             rng: np.random.Generator, budget: int = PROBE_BUDGET) -> NonconstantCount:
    """Flag a cell when ``probes`` uniform points inside it see both values.

    Unbounded cells are probed inside a window three times the data range.
    Probe ``k`` of every cell is drawn before probe ``k+1`` of any cell, so a
    larger ``probes`` with the same stream can only flag more cells.
    """
    if probes < 2:
        raise ValueError("need at least two probes per block")
    C = p.r**p.d
    if C * probes > budget:
        raise BudgetExceeded(f"{C} cells x {probes} probes exceeds budget {budget}")
    low, high = p.probe_bounds(all_cells(p.r, p.d))
    U = rng.random((probes, C, p.d))
    X = low[None] + U * (high - low)[None]
    vals = np.asarray(f(X.reshape(-1, p.d))).reshape(probes, C) > 0
    flags = vals.any(axis=0) & ~vals.all(axis=0)
    return _result(flags, "probe", probes)


def corner_oracle_nonconstant(f: Callable[[np.ndarray], np.ndarray], p) -> NonconstantCount:
    """Flag a cell when ``f`` differs at its infimal and supremal corners.

    The infimal corner is nudged one ulp inside the half-open cell.  Exact for
    monotone ``f``; a lower bound for k-alternating ``f``.
    """
    cells = all_cells(p.r, p.d)
    low, high = p.cell_bounds(cells)
    plow, phigh = p.probe_bounds(cells)
    low = np.where(np.isinf(low), plow, np.nextafter(low, np.inf))
    high = np.where(np.isinf(high), phigh, high)
    flags = (np.asarray(f(low)) > 0) != (np.asarray(f(high)) > 0)
    return _result(flags, "corner-oracle")


def disk_nonconstant(center, radius: float, p) -> NonconstantCount:
    """Cells where the circle splits the box into two positive-area parts."""
    c = np.asarray(center, dtype=np.float64)
    low, high = p.cell_bounds(all_cells(p.r, p.d))
    near = np.clip(c, low, high)
    dmin = np.sqrt(((near - c) ** 2).sum(axis=1))
    far = np.where(np.abs(low - c) > np.abs(high - c), low, high)
    with np.errstate(invalid="ignore"):
        dmax = np.sqrt(((far - c) ** 2).sum(axis=1))
    flags = (dmin < radius) & (dmax > radius)
    return _result(flags, "analytic")


def _box_range(w: np.ndarray, low: np.ndarray, high: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # range of w.x over boxes; zero weights contribute nothing even on infinite sides
    a = np.where(w > 0, w * low, np.where(w < 0, w * high, 0.0))
    b = np.where(w > 0, w * high, np.where(w < 0, w * low, 0.0))
    return a.sum(axis=1), b.sum(axis=1)


def halfspace_nonconstant(w, t: float, p) -> NonconstantCount:
    """``sign(w.x - t)`` is non-constant on a box iff its corner values straddle ``t``."""
    w = np.asarray(w, dtype=np.float64)
    low, high = p.cell_bounds(all_cells(p.r, p.d))
    mn, mx = _box_range(w, low, high)
    return _result((mn < t) & (mx > t), "analytic")


def _polygon_box_flags(vertices: np.ndarray, low: np.ndarray, high: np.ndarray) -> np.ndarray:
    V = np.asarray(vertices, dtype=np.float64)
    pmin, pmax = V.min(axis=0), V.max(axis=0)
    pad = (pmax - pmin).max() + 1.0
    lo = np.maximum(low, pmin - pad)
    hi = np.minimum(high, pmax + pad)
    corners = np.stack(
        [np.stack([np.where(bx, hi[:, 0], lo[:, 0]), np.where(by, hi[:, 1], lo[:, 1])], axis=1)
         for bx, by in ((0, 0), (1, 0), (1, 1), (0, 1))],
        axis=1,
    )  # (C, 4, 2)
    edges = np.roll(V, -1, axis=0) - V
    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
    axes = np.concatenate([normals, np.eye(2)])
    overlap = np.ones(low.shape[0], dtype=bool)
    for ax in axes:
        pv = V @ ax
        pb = corners @ ax
        overlap &= (pb.max(axis=1) > pv.min()) & (pb.min(axis=1) < pv.max())
    # box inside the polygon: every corner on the inner side of every edge
    area2 = np.sum(V[:, 0] * np.roll(V[:, 1], -1) - np.roll(V[:, 0], -1) * V[:, 1])
    orient = 1.0 if area2 > 0 else -1.0
    cross = (edges[None, None, :, 0] * (corners[:, :, None, 1] - V[None, None, :, 1])
             - edges[None, None, :, 1] * (corners[:, :, None, 0] - V[None, None, :, 0]))
    bounded = np.all(np.isfinite(low) & np.isfinite(high), axis=1)
    inside = bounded & np.all(orient * cross >= 0, axis=(1, 2))
    return overlap & ~inside


def polygon_nonconstant(vertices, p) -> NonconstantCount:
    """Cells cut by the boundary of a convex polygon (``d = 2``)."""
    if p.d != 2:
        raise ValueError("polygon oracle is two-dimensional")
    low, high = p.cell_bounds(all_cells(p.r, p.d))
    return _result(_polygon_box_flags(vertices, low, high), "analytic")


def exact_nonconstant_count(f, p) -> NonconstantCount:
    """Dispatch to the exact oracle matching ``f``'s family."""
    from . import functions as fn

    if isinstance(f, fn.Disk):
        return disk_nonconstant(f.center, f.radius, p)
    if isinstance(f, fn.Halfspace):
        return halfspace_nonconstant(f.w, f.t, p)
    if isinstance(f, fn.ConvexPolygon):
        return polygon_nonconstant(f.vertices, p)
    if getattr(f, "monotone", False):
        return corner_oracle_nonconstant(f, p)
    raise TypeError(f"no exact oracle for {type(f).__name__}")


def augmented_nonconstant_count(f, p: AugmentedBlockPartition, dist: ProductDistribution) -> NonconstantCount:
    """Exact count under mu-mass semantics for finite product distributions.

    A cell is non-constant when ``f`` takes both values on atoms that carry
    positive augmented mass inside it.
    """
    if not dist.is_finite:
        raise ValueError("mu-mass semantics are implemented for finite distributions")
    atoms = []
    for i, comp in enumerate(dist.components):
        assert isinstance(comp, Finite)
        lower = np.concatenate([[0.0], comp.mass_up_to(p.cut_base[i], p.cut_tag[i]), [1.0]])
        per_cell = []
        for j in range(p.r):
            a, b = lower[j], lower[j + 1]
            # atom s occupies [cdf_left(s), cdf(s)] of the augmented mass line
            lo_s = np.concatenate([[0.0], comp.cumulative[:-1]])
            hi_s = comp.cumulative
            hit = (np.minimum(b, hi_s) - np.maximum(a, lo_s)) > 0
            per_cell.append(comp.support[hit])
        atoms.append(per_cell)
    flags = np.zeros(p.r**p.d, dtype=bool)
    for idx, v in enumerate(itertools.product(range(p.r), repeat=p.d)):
        lists = [atoms[i][v[i]] for i in range(p.d)]
        if any(len(a) == 0 for a in lists):
            continue
        pts = np.array(list(itertools.product(*lists)), dtype=np.float64)
        vals = np.asarray(f(pts)) > 0
        flags[idx] = vals.any() and not vals.all()
    return _result(flags, "analytic")


# ---------------------------------------------------------------------------
# closed-form bounds


@dataclass(frozen=True)
class BbsBound:
    """Bound on the number of non-constant blocks, and the same as a cell fraction."""

    class_id: str
    r: int
    d: int
    k: int
    value: float

    @property
    def epsilon(self) -> float:
        return self.value / float(self.r) ** self.d


_PTF_CONST = 3.0 * math.sqrt(24.0)


def bbs_bound(class_id: str, r: int, d: int, k: int = 1, inner: str | None = None) -> BbsBound:
    """Closed-form block-boundary bounds.

    ``composed`` multiplies the bound of ``inner`` by ``k``.  For ``ptf`` the
    value is ``3 sqrt(24) d k r^(d-1)``, so :attr:`BbsBound.epsilon` is the
    least ``eps`` with ``r >= 3 sqrt(24) d k / eps``.
    """
    if min(r, d, k) < 1:
        raise ValueError("r, d and k must be positive")
    base = float(r) ** (d - 1)
    if class_id in ("monotone", "k-alternating"):
        kk = 1 if class_id == "monotone" else k
        value = kk * d * base
    elif class_id == "convex":
        value = 2 * d * k * base
    elif class_id == "halfspace":
        value = d * k * base
    elif class_id == "ptf":
        value = _PTF_CONST * d * k * base
    elif class_id == "composed":
        if inner is None:
            raise ValueError("composed bounds need an inner class")
        value = k * bbs_bound(inner, r, d, 1).value
    else:
        raise ValueError(f"unknown class {class_id!r}")
    return BbsBound(class_id, r, d, k, float(value))


def min_r_for_epsilon(class_id: str, d: int, k: int, eps: float) -> int:
    """Cells per dimension prescribed by each algorithm's analysis."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    rules = {
        "convex": 2 * d * k,
        "convex-tester": 6 * d,
        "df-monotonicity": 16 * d,
        "grid-monotonicity": 4 * d,
        "halfspace": d * k,
        "ptf": 9 * d * k,
        "ptf-bbs": _PTF_CONST * d * k,
        "k-alternating": d * k,
        "monotone": d,
    }
    if class_id not in rules:
        raise ValueError(f"unknown class {class_id!r}")
    # guard against 16/0.5 landing a hair above an integer
    return int(math.ceil(rules[class_id] / eps - 1e-9))
