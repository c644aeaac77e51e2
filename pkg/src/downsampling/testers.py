"""Property testers built on block partitions.

The four testers for monotone, diagonal and convex functions are one-sided:
a function that has the property is accepted for every random seed.
The distance approximator and the tolerant tester compare labeled samples
against an explicit cover of the class on the grid.

Query functions map an ``(N, d)`` array to values in ``{0, 1}`` or ``{-1, +1}``;
any positive value counts as ``1``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .bbs import min_r_for_epsilon
from .blockgrid import (
    ExtremeCellView,
    GridFunction,
    induce_augmented_partition,
    induce_partition,
)
from .product_dist import ProductDistribution, augment

__all__ = [
    "SubTest",
    "Transcript",
    "TestVerdict",
    "CoverSet",
    "diagonal_test",
    "diagonal_schedule",
    "pair_monotonicity_test",
    "grid_monotonicity_test",
    "df_monotonicity_test",
    "df_grid_size",
    "convex_sample_sizes",
    "convex_onesided_test",
    "is_monotone",
    "alternation_depth",
    "is_lattice_convex",
    "build_cover",
    "distance_sample_size",
    "distance_approximate",
    "exact_distance_to_cover",
    "tolerant_test",
    "distance_to_monotone_2d",
    "slice_distance_to_convex",
]

LN6 = math.log(6.0)
LN12 = math.log(12.0)


# ---------------------------------------------------------------------------
# transcripts


@dataclass
class SubTest:
    name: str
    passed: bool
    queries: int = 0
    samples: int = 0
    failure_prob: float = 0.0
    detail: dict = field(default_factory=dict)


@dataclass
class Transcript:
    """Everything needed to replay a run: tester name, parameters, the stream
    state at entry, and per-sub-test outcomes with their resource counts."""

    tester: str
    params: dict
    rng_state: dict
    subtests: list = field(default_factory=list)

    @property
    def queries(self) -> int:
        return sum(s.queries for s in self.subtests)

    @property
    def samples(self) -> int:
        return sum(s.samples for s in self.subtests)

    @property
    def failure_prob(self) -> float:
        return sum(s.failure_prob for s in self.subtests)

    def rng(self) -> np.random.Generator:
        """A stream positioned where the recorded run started."""
        bg = getattr(np.random, self.rng_state["bit_generator"])()
        bg.state = self.rng_state
        return np.random.Generator(bg)

    def to_lines(self) -> list[str]:
        lines = [
            "tester " + self.tester,
            "params " + json.dumps(self.params, sort_keys=True),
            "rng " + json.dumps(self.rng_state, sort_keys=True),
        ]
        for s in self.subtests:
            rec = {"name": s.name, "passed": s.passed, "queries": s.queries, "samples": s.samples,
                   "failure_prob": s.failure_prob, "detail": s.detail}
            lines.append("subtest " + json.dumps(rec, sort_keys=True))
        verdict = "accept" if all(s.passed for s in self.subtests) else "reject"
        lines.append(f"verdict {verdict} queries={self.queries} samples={self.samples}")
        return lines

    @classmethod
    def from_lines(cls, lines: list[str]) -> "Transcript":
        tester = params = state = None
        subs = []
        for line in lines:
            key, _, rest = line.partition(" ")
            if key == "tester":
                tester = rest
            elif key == "params":
                params = json.loads(rest)
            elif key == "rng":
                state = json.loads(rest)
            elif key == "subtest":
                subs.append(SubTest(**json.loads(rest)))
        if tester is None or params is None or state is None:
            raise ValueError("incomplete transcript")
        return cls(tester, params, state, subs)


@dataclass
class TestVerdict:
    accept: bool
    transcript: Transcript

    __test__ = False  # not a pytest class

    @property
    def decision(self) -> str:
        return "accept" if self.accept else "reject"


def _start(name: str, params: dict, rng: np.random.Generator) -> Transcript:
    return Transcript(name, params, rng.bit_generator.state)


def _finish(tr: Transcript) -> TestVerdict:
    return TestVerdict(all(s.passed for s in tr.subtests), tr)


def _ones(f: Callable, X: np.ndarray) -> np.ndarray:
    return np.asarray(f(X)).reshape(-1) > 0


# ---------------------------------------------------------------------------
# diagonal functions


def diagonal_schedule(eps: float) -> list[tuple[int, int]]:
    """``(p_i, q_i)`` for rounds ``i = 1..k`` with ``k = ceil(log2(4/eps))``."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    k = math.ceil(math.log2(4.0 / eps) - 1e-12)
    return [(math.ceil(k / (eps * 2.0 ** (i - 2)) * LN6), math.ceil(2.0 ** (i + 2) * LN12))
            for i in range(1, k + 1)]


def _diagonal_round(f: Callable, n: int, d: int, p: int, q: int, rng: np.random.Generator) -> bool:
    X = rng.integers(0, n, size=(p, d))
    lo = -X.min(axis=1)
    hi = n - 1 - X.max(axis=1)
    lam = rng.integers(lo[:, None], hi[:, None] + 1, size=(p, q))
    pts = X[:, None, :] + lam[:, :, None]
    ones = _ones(f, pts.reshape(-1, d)).reshape(p, q)
    big = np.iinfo(np.int64).max
    first = np.where(ones, lam, big).min(axis=1)
    last = np.where(ones, lam, -big).max(axis=1)
    # two distinct 1-valued points on one diagonal
    return not bool(np.any(ones.any(axis=1) & (first < last)))


def diagonal_test(f: Callable, n: int, d: int, eps: float, rng: np.random.Generator,
                  _tr: Transcript | None = None, _name: str = "diagonal") -> TestVerdict:
    """One-sided tester for having at most one 1-valued point per diagonal ``{x + t 1}``."""
    tr = _tr if _tr is not None else _start("diagonal", {"n": n, "d": d, "eps": eps}, rng)
    passed, queries = True, 0
    for p, q in diagonal_schedule(eps):
        passed &= _diagonal_round(f, n, d, p, q, rng)
        queries += p * q
    tr.subtests.append(SubTest(_name, passed, queries, 0, 1 / 6))
    return _finish(tr)


# ---------------------------------------------------------------------------
# monotonicity


def pair_monotonicity_test(h: Callable, r: int, d: int, eps: float, rng: np.random.Generator,
                           const: float = 1.0) -> SubTest:
    """Sample axis-parallel comparable pairs ``u <= v`` in ``[r]^d``; fail on ``h(u) > h(v)``."""
    pairs = math.ceil(const * d * r / eps)
    U = rng.integers(0, r, size=(pairs, d))
    axis = rng.integers(0, d, size=pairs)
    a = rng.integers(0, r, size=pairs)
    b = rng.integers(0, r - 1, size=pairs)
    b = np.where(b >= a, b + 1, b)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    V = U.copy()
    rows = np.arange(pairs)
    U[rows, axis] = lo
    V[rows, axis] = hi
    hv = _ones(h, np.concatenate([U, V]))
    violated = bool(np.any(hv[:pairs] & ~hv[pairs:]))
    return SubTest("pairs", not violated, 2 * pairs, 0, 1 / 6, {"pairs": pairs})


def grid_monotonicity_test(f: Callable, n: int, d: int, eps: float, rng: np.random.Generator,
                           pair_const: float = 1.0) -> TestVerdict:
    """One-sided monotonicity tester on ``[n]^d`` via ``r = ceil(4d/eps)`` blocks per axis.

    When ``r`` does not divide ``n`` the domain is padded to the next multiple
    of ``r``; the padded function reads ``f`` at the coordinatewise clamp to
    ``[n]^d``, which keeps monotone functions monotone.
    """
    r = min_r_for_epsilon("grid-monotonicity", d, 1, eps)
    N = r * math.ceil(n / r)
    w = N // r
    tr = _start("grid-monotonicity", {"n": n, "d": d, "eps": eps, "r": r, "padded_n": N}, rng)

    def F(X: np.ndarray) -> np.ndarray:
        return _ones(f, np.minimum(X, n - 1))

    def corners(V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return F(V * w), F(V * w + (w - 1))

    q = math.ceil(4.0 / eps * LN6)
    X = rng.integers(0, N, size=(q, d))
    fl, fh = corners(X // w)
    fx = F(X)
    g = np.where(fl != fh, fx, fl)
    tr.subtests.append(SubTest("identity", bool(np.all(fx == g)), 3 * q, 0, 1 / 6))

    def b(V: np.ndarray) -> np.ndarray:
        lo, hi = corners(V)
        return lo != hi

    queries_before = tr.queries
    diagonal_test(lambda V: b(V), r, d, eps / 4, rng, _tr=tr, _name="diagonal-boundary")
    tr.subtests[-1].queries = 2 * (tr.queries - queries_before)

    def h(V: np.ndarray) -> np.ndarray:
        lo, hi = corners(V)
        return lo & (lo == hi)

    sub = pair_monotonicity_test(h, r, d, eps / 4, rng, pair_const)
    sub.queries *= 2
    tr.subtests.append(sub)
    return _finish(tr)


def df_grid_size(r_total: int, d: int, eps: float, const: float = 1.0) -> int:
    """``const * R d^2 / eps^2 * ln(R d)`` rounded up to a multiple of ``R``."""
    m = const * r_total * d * d / eps**2 * math.log(r_total * d)
    return int(r_total * max(1, math.ceil(m / r_total)))


def df_monotonicity_test(f: Callable, dist: ProductDistribution, eps: float, rng: np.random.Generator,
                         *, grid_const: float = 1.0, grid_m: int | None = None,
                         pair_const: float = 1.0, resample_factor: int = 10) -> TestVerdict:
    """One-sided monotonicity tester under an unknown product distribution.

    Uses an ``(r+2)``-partition with ``r = ceil(16 d / eps)`` induced from
    samples (augmented when ``dist`` is finite); the outermost cells are set
    aside and the grid tester runs on the ``r^d`` inner cells.
    """
    d = dist.d
    r = min_r_for_epsilon("df-monotonicity", d, 1, eps)
    R = r + 2
    m = df_grid_size(R, d, eps, grid_const) if grid_m is None else R * math.ceil(grid_m / R)
    finite = dist.is_finite
    tr = _start("df-monotonicity", {"d": d, "eps": eps, "r": r, "grid_m": m, "finite": finite}, rng)
    X = dist.sample(m, rng)
    p = induce_augmented_partition(augment(X, rng), R, rng) if finite else induce_partition(X, R, rng)
    view = ExtremeCellView(p)
    tr.subtests.append(SubTest("grid", True, 0, m, 1 / 6))

    def corner_values(inner: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = view.corners(inner)
        return _ones(f, lo), _ones(f, hi)

    # f = g on samples landing in inner cells, by rejection sampling
    want = math.ceil(8.0 / eps * LN6)
    cap = resample_factor * want
    drawn, kept_x, kept_v = 0, [], []
    while sum(len(k) for k in kept_x) < want and drawn < cap:
        batch = min(cap - drawn, 2 * want)
        Y = dist.sample(batch, rng)
        V = p.block_of(augment(Y, rng)) if finite else p.block_of(Y)
        drawn += batch
        inner = view.is_inner(V)
        kept_x.append(Y[inner])
        kept_v.append(V[inner] - 1)
    Yk = np.concatenate(kept_x)[:want]
    Vk = np.concatenate(kept_v)[:want]
    exhausted = Yk.shape[0] < want
    fl, fh = corner_values(Vk)
    fy = _ones(f, Yk)
    g = np.where(fl != fh, fy, fl)
    tr.subtests.append(SubTest("identity", bool(np.all(fy == g)), 3 * Yk.shape[0], drawn, 1 / 6,
                               {"kept": int(Yk.shape[0]), "exhausted": bool(exhausted)}))

    def b(V: np.ndarray) -> np.ndarray:
        lo, hi = corner_values(V)
        return lo != hi

    before = tr.queries
    diagonal_test(b, r, d, eps / 16, rng, _tr=tr, _name="diagonal-boundary")
    tr.subtests[-1].queries = 2 * (tr.queries - before)

    def h(V: np.ndarray) -> np.ndarray:
        lo, hi = corner_values(V)
        return lo & (lo == hi)

    sub = pair_monotonicity_test(h, r, d, eps / 8, rng, pair_const)
    sub.queries *= 2
    tr.subtests.append(sub)
    return _finish(tr)


# ---------------------------------------------------------------------------
# convexity


def convex_sample_sizes(d: int, eps: float, grid_const: float = 1.0, query_const: float = 2.0) -> tuple[int, int, int]:
    """``(r, grid samples, query samples)`` for :func:`convex_onesided_test`."""
    r = min_r_for_epsilon("convex-tester", d, 1, eps)
    m = grid_const * r * d * d / eps**2 * math.log(r * d / eps)
    m = int(r * max(1, math.ceil(m / r)))
    q = int(math.ceil(query_const * (r**d + 1.0 / eps)))
    return r, m, q


def _hull_inside(P: np.ndarray, Q: np.ndarray, strict_tol: float) -> np.ndarray | None:
    """Which rows of ``Q`` lie strictly inside ``hull(P)``; ``None`` if the hull is flat."""
    d = P.shape[1]
    if P.shape[0] < d + 1:
        return None
    if d == 1:
        lo, hi = P.min(), P.max()
        if not hi > lo:
            return None
        return (Q[:, 0] > lo + strict_tol) & (Q[:, 0] < hi - strict_tol)
    try:
        hull = ConvexHull(P)
    except QhullError:
        return None
    A, c = hull.equations[:, :-1], hull.equations[:, -1]
    return np.all(Q @ A.T + c < -strict_tol, axis=1)


def convex_onesided_test(X: np.ndarray, labels: np.ndarray, eps: float, rng: np.random.Generator | None = None,
                         *, grid_const: float = 1.0, query_const: float = 2.0) -> TestVerdict:
    """Sample-based one-sided convexity tester for ``d <= 3``.

    The first samples induce an ``r``-partition with ``r = ceil(6 d / eps)``
    (labels unused) and the remaining ones are the query set.  The witness is
    the hull of the positive query points.  The tester rejects iff some
    negative query point lies in a cell whose corners are all strictly inside
    that hull; cells meeting the hull boundary are exempt.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    d = X.shape[1]
    if d > 3:
        raise ValueError("the hull-based witness search supports d <= 3")
    r, m, q = convex_sample_sizes(d, eps, grid_const, query_const)
    if X.shape[0] < m + q:
        raise ValueError(f"need {m + q} samples, got {X.shape[0]}")
    state = rng.bit_generator.state if rng is not None else {"bit_generator": "PCG64", "state": None}
    tr = Transcript("convex", {"d": d, "eps": eps, "r": r, "grid_m": m, "queries": q}, state)
    p = induce_partition(X[:m], r, rng)
    Q, y = X[m:m + q], labels[m:m + q] > 0
    tr.subtests.append(SubTest("grid", True, 0, m, 1 / 6))
    pos, neg = Q[y], Q[~y]
    violated = False
    if neg.shape[0]:
        scale = max(1.0, float(np.abs(Q).max()))
        cells = np.unique(p.block_of(neg), axis=0)
        lo, hi = p.cell_bounds(cells)
        finite = np.all(np.isfinite(lo) & np.isfinite(hi), axis=1)
        cells, lo, hi = cells[finite], lo[finite], hi[finite]
        if cells.shape[0]:
            picks = np.array(list(itertools.product((0, 1), repeat=d)), dtype=bool)
            corners = np.where(picks[None], hi[:, None, :], lo[:, None, :]).reshape(-1, d)
            inside = _hull_inside(pos, corners, 1e-12 * scale)
            if inside is not None:
                violated = bool(np.any(inside.reshape(-1, picks.shape[0]).all(axis=1)))
    tr.subtests.append(SubTest("hull-consistency", not violated, 0, q, 1 / 6,
                               {"positives": int(pos.shape[0]), "negatives": int(neg.shape[0])}))
    return _finish(tr)


# ---------------------------------------------------------------------------
# class predicates on grid tables (batched over the leading axis)


def is_monotone(tables: np.ndarray) -> np.ndarray:
    """``tables`` has shape ``(M, r, ..., r)``; ``-1 < +1`` along every axis."""
    T = np.asarray(tables)
    ok = np.ones(T.shape[0], dtype=bool)
    for ax in range(1, T.ndim):
        ok &= np.all(np.diff(T, axis=ax) >= 0, axis=tuple(range(1, T.ndim)))
    return ok


def alternation_depth(tables: np.ndarray) -> np.ndarray:
    """Maximum number of value changes along any chain of the grid order.

    Refining a chain never removes a change, so it suffices to follow unit
    steps; the maximum is computed by dynamic programming in C order.
    """
    T = np.asarray(tables)
    M, shape = T.shape[0], T.shape[1:]
    d = len(shape)
    flatT = T.reshape(M, -1)
    A = np.zeros_like(flatT, dtype=np.int64)
    strides = [int(np.prod(shape[i + 1:])) for i in range(d)]
    for idx, v in enumerate(itertools.product(*(range(s) for s in shape))):
        best = np.zeros(M, dtype=np.int64)
        for i in range(d):
            if v[i] > 0:
                j = idx - strides[i]
                best = np.maximum(best, A[:, j] + (flatT[:, j] != flatT[:, idx]))
        A[:, idx] = best
    return A.max(axis=1)


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _lattice_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _in_hull(hull: list[tuple[int, int]], p: tuple[int, int]) -> bool:
    if len(hull) == 1:
        return p == hull[0]
    if len(hull) == 2:
        a, b = hull
        return (_cross(a, b, p) == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))
    return all(_cross(hull[i], hull[(i + 1) % len(hull)], p) >= 0 for i in range(len(hull)))


def is_lattice_convex(table: np.ndarray) -> bool:
    """Whether the ``+1`` cells of a 2-d table are exactly the lattice points of their hull."""
    T = np.asarray(table)
    pts = [tuple(map(int, p)) for p in np.argwhere(T > 0)]
    if not pts:
        return True
    hull = _lattice_hull(pts)
    xs, ys = zip(*pts)
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            if T[x, y] <= 0 and _in_hull(hull, (x, y)):
                return False
    return True


# ---------------------------------------------------------------------------
# covers and distance approximation


@dataclass(frozen=True, eq=False)
class CoverSet:
    """Grid functions covering a class on ``[r]^d``; ``members`` has shape ``(M, r^d)``."""

    class_id: str
    r: int
    d: int
    k: int
    members: np.ndarray
    complete: bool

    def __len__(self) -> int:
        return self.members.shape[0]

    def member(self, i: int) -> GridFunction:
        return GridFunction(self.r, self.d, table=self.members[i].reshape((self.r,) * self.d))


def _class_filter(class_id: str, k: int, tables: np.ndarray) -> np.ndarray:
    if class_id == "monotone":
        return is_monotone(tables)
    if class_id == "k-alternating":
        return alternation_depth(tables) <= k
    if class_id == "convex":
        return np.array([is_lattice_convex(t) for t in tables], dtype=bool)
    raise ValueError(f"unknown class {class_id!r}")


def _all_tables(r: int, d: int) -> np.ndarray:
    C = r**d
    codes = np.arange(2**C, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(C)[None, :]) & 1
    return (2 * bits - 1).astype(np.int8).reshape((-1,) + (r,) * d)


def _monotone_2d(r: int) -> np.ndarray:
    # row i is +1 from column h_i on, with h nonincreasing in i
    out = []
    for h in itertools.combinations_with_replacement(range(r + 1), r):
        hs = h[::-1]
        t = np.array([[1 if j >= hs[i] else -1 for j in range(r)] for i in range(r)], dtype=np.int8)
        out.append(t)
    return np.stack(out)


def _alternating_1d(r: int, k: int) -> np.ndarray:
    out = []
    for changes in range(min(k, r - 1) + 1):
        for pos in itertools.combinations(range(1, r), changes):
            for start in (-1, 1):
                row, val, it = [], start, iter(pos)
                nxt = next(it, None)
                for j in range(r):
                    if nxt is not None and j == nxt:
                        val = -val
                        nxt = next(it, None)
                    row.append(val)
                out.append(row)
    return np.array(out, dtype=np.int8).reshape(-1, r)


def _column_interval_sets(r: int) -> np.ndarray:
    intervals = [None] + [(a, b) for a in range(r) for b in range(a, r)]
    out = []
    for combo in itertools.product(intervals, repeat=r):
        used = [i for i, c in enumerate(combo) if c is not None]
        if used and used[-1] - used[0] + 1 != len(used):
            continue
        t = -np.ones((r, r), dtype=np.int8)
        for x, c in enumerate(combo):
            if c is not None:
                t[x, c[0]:c[1] + 1] = 1
        out.append(t)
    return np.stack(out)


def build_cover(class_id: str, r: int, d: int, k: int = 1, tau: float = 0.0,
                partition=None, exhaustive_limit: int = 20) -> CoverSet:
    """Every member of the class on ``[r]^d``, which is a cover at any ``tau``.

    Tables with ``r^d <= exhaustive_limit`` are enumerated in full and
    filtered by the class predicate.  Larger grids use a structured
    enumeration: monotone tables on ``[r]^2``, k-alternating strings on
    ``[r]^1``, or lattice-convex sets on ``[r]^2`` built from contiguous
    column intervals.  The partition argument is accepted for interface
    symmetry; cells of the grid are the partition's cells.
    """
    if r**d <= exhaustive_limit:
        tables = _all_tables(r, d)
        keep = tables[_class_filter(class_id, k, tables)]
        return CoverSet(class_id, r, d, k, keep.reshape(keep.shape[0], -1), True)
    if class_id == "monotone" and d == 2:
        t = _monotone_2d(r)
    elif class_id == "monotone" and d == 1:
        t = _alternating_1d(r, 1)
        t = t[is_monotone(t)]
    elif class_id == "k-alternating" and d == 1:
        t = _alternating_1d(r, k)
    elif class_id == "convex" and d == 2 and r <= 5:
        cand = _column_interval_sets(r)
        t = cand[_class_filter("convex", k, cand)]
    else:
        raise ValueError(f"no feasible enumeration for {class_id} on [{r}]^{d}")
    return CoverSet(class_id, r, d, k, t.reshape(t.shape[0], -1), False)


def distance_sample_size(cover_size: int, eps: float, fail: float = 1 / 6, const: float = 1.0) -> int:
    """Hoeffding plus a union bound over the cover: ``ln(2|K|/fail) / (2 eps^2)``."""
    return int(math.ceil(const * math.log(2.0 * cover_size / fail) / (2.0 * eps**2)))


@dataclass(frozen=True)
class DistanceEstimate:
    value: float
    best: int
    samples: int


def _cell_label_counts(X: np.ndarray, labels: np.ndarray, cover: CoverSet, partition) -> tuple[np.ndarray, np.ndarray]:
    cells = np.asarray(X, dtype=np.int64) if partition is None else partition.block_of(X)
    flat = np.ravel_multi_index(tuple(cells.T), (cover.r,) * cover.d)
    y = np.asarray(labels) > 0
    C = cover.r**cover.d
    pos = np.bincount(flat, weights=y.astype(np.float64), minlength=C)
    neg = np.bincount(flat, weights=(~y).astype(np.float64), minlength=C)
    return pos, neg


def _disagreements(cover: CoverSet, pos: np.ndarray, neg: np.ndarray) -> np.ndarray:
    M = cover.members.astype(np.float64)
    return (pos.sum() + neg.sum()) / 2.0 + (M @ (neg - pos)) / 2.0


def distance_approximate(X: np.ndarray, labels: np.ndarray, cover: CoverSet, partition=None,
                         eps: float | None = None) -> DistanceEstimate:
    """Smallest empirical disagreement between the labels and a coarse cover member.

    ``partition=None`` means the points already are grid cells.
    """
    pos, neg = _cell_label_counts(X, labels, cover, partition)
    q = int(pos.sum() + neg.sum())
    if q == 0:
        raise ValueError("need at least one labeled sample")
    dis = _disagreements(cover, pos, neg)
    i = int(np.argmin(dis))
    return DistanceEstimate(float(dis[i] / q), i, q)


def exact_distance_to_cover(f: Callable, dist: ProductDistribution, cover: CoverSet, partition=None,
                            budget: int = 2**20) -> float:
    """``min_h mu(f != h o block)`` by enumerating a finite product support."""
    if not dist.is_finite:
        raise ValueError("exact distances need a finite product distribution")
    sizes = [c.support.size for c in dist.components]
    if math.prod(sizes) > budget:
        raise ValueError("support too large to enumerate")
    pts = np.array(list(itertools.product(*(c.support for c in dist.components))))
    w = np.array([math.prod(t) for t in itertools.product(*(c.weights for c in dist.components))])
    cells = pts.astype(np.int64) if partition is None else partition.block_of(pts)
    flat = np.ravel_multi_index(tuple(cells.T), (cover.r,) * cover.d)
    y = _ones(f, pts)
    C = cover.r**cover.d
    pos = np.bincount(flat, weights=w * y, minlength=C)
    neg = np.bincount(flat, weights=w * ~y, minlength=C)
    return max(0.0, float(_disagreements(cover, pos, neg).min()))


def tolerant_test(X: np.ndarray, labels: np.ndarray, cover: CoverSet, partition, eps1: float,
                  eps2: float) -> TestVerdict:
    """Accept iff the empirical distance to the cover is below ``eps1 + (eps2 - eps1) / 2``."""
    if not eps2 > eps1:
        raise ValueError("need eps2 > eps1")
    tau = (eps2 - eps1) / 2.0
    est = distance_approximate(X, labels, cover, partition)
    tr = Transcript("tolerant", {"eps1": eps1, "eps2": eps2, "cover": len(cover)},
                    {"bit_generator": "PCG64", "state": None})
    tr.subtests.append(SubTest("distance", est.value < eps1 + tau, 0, est.samples, 1 / 6,
                               {"estimate": est.value, "threshold": eps1 + tau}))
    return _finish(tr)


# ---------------------------------------------------------------------------
# exact reference distances


def distance_to_monotone_2d(table: np.ndarray) -> float:
    """Exact distance from a 2-d ``{0,1}`` (or ``+-1``) table to monotone tables.

    A monotone table is ``1`` on row ``i`` from column ``h_i`` on, with ``h``
    nonincreasing; the cheapest thresholds follow by dynamic programming.  For
    functions constant on the cells of a uniform grid this is also the
    distance to monotone functions on the continuous square, because cell
    averages of a monotone function are monotone and L1 isotonic fits of
    binary data can be taken binary.
    """
    T = np.asarray(table) > 0
    R, C = T.shape
    prev = None
    ones_prefix = np.concatenate([np.zeros((R, 1)), np.cumsum(T, axis=1)], axis=1)
    for i in range(R):
        h = np.arange(C + 1)
        cost = ones_prefix[i, h] + ((C - h) - (ones_prefix[i, C] - ones_prefix[i, h]))
        cur = cost if prev is None else cost + np.minimum.accumulate(prev[::-1])[::-1]
        prev = cur
    return float(prev.min() / T.size)


def slice_distance_to_convex(f: Callable, angle: float = math.pi / 2, lines: int = 400,
                             points: int = 400) -> float:
    """Lower bound on the uniform-measure distance from ``f`` to convex sets in ``[0,1]^2``.

    Every convex set meets each line in an interval, so the distance is at
    least the integral over parallel lines of the best single-interval fit
    on that line; each fit is an exhaustive maximum-sum interval scan.
    """
    u = np.array([math.cos(angle), math.sin(angle)])
    nrm = np.array([-u[1], u[0]])
    corners = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=np.float64)
    offs = corners @ nrm
    ts = corners @ u
    c = np.linspace(offs.min(), offs.max(), lines + 1)
    c = 0.5 * (c[:-1] + c[1:])
    dc = (offs.max() - offs.min()) / lines
    t = np.linspace(ts.min(), ts.max(), points + 1)
    t = 0.5 * (t[:-1] + t[1:])
    dt = (ts.max() - ts.min()) / points
    P = c[:, None, None] * nrm[None, None, :] + t[None, :, None] * u[None, None, :]
    inside = np.all((P >= 0) & (P <= 1), axis=2)
    vals = _ones(f, P.reshape(-1, 2)).reshape(lines, points) & inside
    total = 0.0
    for row_in, row_val in zip(inside, vals):
        w = np.where(row_val, 1.0, np.where(row_in, -1.0, 0.0))
        best = cur = 0.0
        for x in w:
            cur = max(0.0, cur + x)
            best = max(best, cur)
        total += row_val.sum() - best
    return float(total * dc * dt)
