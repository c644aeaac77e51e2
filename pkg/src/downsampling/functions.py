"""Vectorized ``R^d -> {-1, +1}`` function families used as targets and adversaries.

Every family maps an ``(n, d)`` float array to an int8 array of ``+-1`` with
``sign(0) = +1``, and round-trips through :meth:`to_spec` /
:func:`function_from_spec`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .product_dist import sign

__all__ = [
    "Constant",
    "Halfspace",
    "Disk",
    "ConvexPolygon",
    "Boxes",
    "PTF",
    "MonotoneDNF",
    "Staircase",
    "Checkerboard",
    "Negation",
    "Composition",
    "Table",
    "function_from_spec",
    "alternations_along",
]


def _pts(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return X.reshape(1, -1) if X.ndim == 1 else X


@dataclass(frozen=True, eq=False)
class Constant:
    value: int = 1
    monotone = True

    def __call__(self, X) -> np.ndarray:
        return np.full(_pts(X).shape[0], 1 if self.value > 0 else -1, dtype=np.int8)

    def to_spec(self) -> dict:
        return {"kind": "constant", "value": int(self.value)}


@dataclass(frozen=True, eq=False)
class Halfspace:
    """``sign(w . x - t)``."""

    w: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", np.asarray(self.w, dtype=np.float64))

    @property
    def monotone(self) -> bool:
        return bool(np.all(self.w >= 0))

    def __call__(self, X) -> np.ndarray:
        return sign(_pts(X) @ self.w - self.t)

    def to_spec(self) -> dict:
        return {"kind": "halfspace", "w": self.w.tolist(), "t": float(self.t)}


@dataclass(frozen=True, eq=False)
class Disk:
    """``+1`` on the closed ball of the given center and radius."""

    center: np.ndarray
    radius: float
    monotone = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64))

    def __call__(self, X) -> np.ndarray:
        d2 = ((_pts(X) - self.center) ** 2).sum(axis=1)
        return sign(self.radius**2 - d2)

    def to_spec(self) -> dict:
        return {"kind": "disk", "center": self.center.tolist(), "radius": float(self.radius)}


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """``+1`` on a closed convex polygon; vertices are stored counter-clockwise."""

    vertices: np.ndarray
    monotone = False

    def __post_init__(self) -> None:
        V = np.asarray(self.vertices, dtype=np.float64)
        area2 = np.sum(V[:, 0] * np.roll(V[:, 1], -1) - np.roll(V[:, 0], -1) * V[:, 1])
        if area2 < 0:
            V = V[::-1].copy()
        object.__setattr__(self, "vertices", V)

    def __call__(self, X) -> np.ndarray:
        P = _pts(X)
        V = self.vertices
        E = np.roll(V, -1, axis=0) - V
        cross = E[None, :, 0] * (P[:, None, 1] - V[None, :, 1]) - E[None, :, 1] * (P[:, None, 0] - V[None, :, 0])
        return np.where(np.all(cross >= 0, axis=1), 1, -1).astype(np.int8)

    def to_spec(self) -> dict:
        return {"kind": "polygon", "vertices": self.vertices.tolist()}


@dataclass(frozen=True, eq=False)
class Boxes:
    """``+1`` on a union of closed axis-aligned boxes given as ``(low, high)`` pairs."""

    low: np.ndarray
    high: np.ndarray
    monotone = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "low", np.atleast_2d(np.asarray(self.low, dtype=np.float64)))
        object.__setattr__(self, "high", np.atleast_2d(np.asarray(self.high, dtype=np.float64)))

    def __call__(self, X) -> np.ndarray:
        P = _pts(X)[:, None, :]
        inside = np.all((P >= self.low[None]) & (P <= self.high[None]), axis=2).any(axis=1)
        return np.where(inside, 1, -1).astype(np.int8)

    def to_spec(self) -> dict:
        return {"kind": "boxes", "low": self.low.tolist(), "high": self.high.tolist()}


@dataclass(frozen=True, eq=False)
class PTF:
    """``sign(sum_j c_j prod_i x_i^{e_ji} - t)`` for exponent rows ``e_j``."""

    exponents: np.ndarray
    coeffs: np.ndarray
    t: float = 0.0
    monotone = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponents", np.atleast_2d(np.asarray(self.exponents, dtype=np.int64)))
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=np.float64))

    @property
    def degree(self) -> int:
        return int(self.exponents.sum(axis=1).max())

    def __call__(self, X) -> np.ndarray:
        P = _pts(X)
        mono = np.prod(P[:, None, :] ** self.exponents[None, :, :], axis=2)
        return sign(mono @ self.coeffs - self.t)

    def to_spec(self) -> dict:
        return {"kind": "ptf", "exponents": self.exponents.tolist(),
                "coeffs": self.coeffs.tolist(), "t": float(self.t)}


@dataclass(frozen=True, eq=False)
class MonotoneDNF:
    """``+1`` iff some term's thresholds are all met: ``x_i >= c_i`` on its coordinates.

    Coordinates outside a term are encoded with threshold ``-inf``.
    """

    thresholds: np.ndarray
    monotone = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "thresholds", np.atleast_2d(np.asarray(self.thresholds, dtype=np.float64)))

    def __call__(self, X) -> np.ndarray:
        P = _pts(X)[:, None, :]
        hit = np.all(P >= self.thresholds[None], axis=2).any(axis=1)
        return np.where(hit, 1, -1).astype(np.int8)

    def to_spec(self) -> dict:
        rows = [[None if np.isinf(v) else float(v) for v in row] for row in self.thresholds]
        return {"kind": "monotone-dnf", "thresholds": rows}


@dataclass(frozen=True, eq=False)
class Staircase:
    """``start * (-1)^{#{j : w . x >= c_j}}`` with ``w >= 0``.

    Along any chain ``w . x`` is nondecreasing, so the value alternates at most
    ``len(cuts)`` times.
    """

    w: np.ndarray
    cuts: np.ndarray
    start: int = -1

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=np.float64)
        if np.any(w < 0):
            raise ValueError("staircase weights must be nonnegative")
        c = np.sort(np.asarray(self.cuts, dtype=np.float64).ravel())
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "cuts", c)

    @property
    def k(self) -> int:
        return int(self.cuts.size)

    @property
    def monotone(self) -> bool:
        return self.k == 0 or (self.k == 1 and self.start < 0)

    def __call__(self, X) -> np.ndarray:
        s = _pts(X) @ self.w
        crossed = np.searchsorted(self.cuts, s, side="right")
        return (self.start * (1 - 2 * (crossed % 2))).astype(np.int8)

    def to_spec(self) -> dict:
        return {"kind": "staircase", "w": self.w.tolist(), "cuts": self.cuts.tolist(),
                "start": int(self.start)}


@dataclass(frozen=True, eq=False)
class Checkerboard:
    """``(-1)^{sum_i floor((x_i - origin_i) / cell)}``; with ``cell=1`` on integers this is
    the parity of the coordinate sum."""

    cell: float
    origin: np.ndarray = field(default_factory=lambda: np.zeros(1))
    monotone = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=np.float64))

    def __call__(self, X) -> np.ndarray:
        k = np.floor((_pts(X) - self.origin) / self.cell).astype(np.int64).sum(axis=1)
        return (1 - 2 * (k % 2)).astype(np.int8)

    def to_spec(self) -> dict:
        return {"kind": "checkerboard", "cell": float(self.cell), "origin": self.origin.tolist()}


@dataclass(frozen=True, eq=False)
class Negation:
    f: object
    monotone = False

    def __call__(self, X) -> np.ndarray:
        return (-np.asarray(self.f(X))).astype(np.int8)

    def to_spec(self) -> dict:
        return {"kind": "negation", "f": self.f.to_spec()}


_COMBINERS = {
    "and": lambda V: np.where(np.all(V > 0, axis=0), 1, -1),
    "or": lambda V: np.where(np.any(V > 0, axis=0), 1, -1),
    "xor": lambda V: np.prod(V, axis=0),
    "majority": lambda V: np.where(V.sum(axis=0) >= 0, 1, -1),
}


@dataclass(frozen=True, eq=False)
class Composition:
    """``g(h_1(x), ..., h_k(x))`` for a named combiner ``g``."""

    combiner: str
    parts: tuple
    monotone = False

    def __post_init__(self) -> None:
        if self.combiner not in _COMBINERS:
            raise ValueError(f"unknown combiner {self.combiner!r}")
        object.__setattr__(self, "parts", tuple(self.parts))

    def __call__(self, X) -> np.ndarray:
        V = np.stack([np.asarray(h(X)) for h in self.parts])
        return _COMBINERS[self.combiner](V).astype(np.int8)

    def to_spec(self) -> dict:
        return {"kind": "composition", "combiner": self.combiner,
                "parts": [h.to_spec() for h in self.parts]}


@dataclass(frozen=True, eq=False)
class Table:
    """Lookup on the integer grid ``{0..n-1}^d``; ``+1`` where the table is positive.

    Points are rounded to the nearest integer; points off the grid map to ``-1``.
    """

    values: np.ndarray
    monotone = False

    def __post_init__(self) -> None:
        v = np.where(np.asarray(self.values) > 0, 1, -1).astype(np.int8)
        object.__setattr__(self, "values", v)

    def __call__(self, X) -> np.ndarray:
        P = np.rint(_pts(X)).astype(np.int64)
        shape = np.array(self.values.shape)
        ok = np.all((P >= 0) & (P < shape), axis=1)
        out = np.full(P.shape[0], -1, dtype=np.int8)
        out[ok] = self.values[tuple(P[ok].T)]
        return out

    def to_spec(self) -> dict:
        return {"kind": "table", "values": self.values.tolist()}


_BUILDERS = {
    "constant": lambda s: Constant(int(s.pop("value"))),
    "halfspace": lambda s: Halfspace(s.pop("w"), float(s.pop("t"))),
    "disk": lambda s: Disk(s.pop("center"), float(s.pop("radius"))),
    "polygon": lambda s: ConvexPolygon(s.pop("vertices")),
    "boxes": lambda s: Boxes(s.pop("low"), s.pop("high")),
    "ptf": lambda s: PTF(s.pop("exponents"), s.pop("coeffs"), float(s.pop("t"))),
    "monotone-dnf": lambda s: MonotoneDNF(
        [[-np.inf if v is None else v for v in row] for row in s.pop("thresholds")]),
    "staircase": lambda s: Staircase(s.pop("w"), s.pop("cuts"), int(s.pop("start"))),
    "checkerboard": lambda s: Checkerboard(float(s.pop("cell")), s.pop("origin")),
    "negation": lambda s: Negation(function_from_spec(s.pop("f"))),
    "composition": lambda s: Composition(
        s.pop("combiner"), [function_from_spec(p) for p in s.pop("parts")]),
    "table": lambda s: Table(s.pop("values")),
}


def function_from_spec(spec: dict):
    """Inverse of ``to_spec`` for every family in this module."""
    s = dict(spec)
    kind = s.pop("kind", None)
    if kind not in _BUILDERS:
        raise ValueError(f"unknown function kind {kind!r}")
    try:
        obj = _BUILDERS[kind](s)
    except KeyError as exc:
        raise ValueError(f"function spec of kind {kind!r} is missing {exc}") from None
    if s:
        raise ValueError(f"unexpected keys {sorted(s)} for function kind {kind!r}")
    return obj


def alternations_along(values: np.ndarray) -> int:
    """Number of sign changes in a sequence of ``+-1`` values."""
    v = np.asarray(values)
    return int(np.count_nonzero(v[1:] != v[:-1]))
