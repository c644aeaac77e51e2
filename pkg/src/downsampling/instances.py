"""Seeded random targets and adversaries, and their on-disk instance files."""

from __future__ import annotations

import itertools
import json
import math

import numpy as np

from . import functions as fn
from .testers import is_monotone

__all__ = ["INSTANCE_KINDS", "random_instance", "generate_instance", "load_instance"]

INSTANCE_FORMAT = "downsampling.instance"
INSTANCE_VERSION = 1


def _halfspace(rng, d: int = 2, monotone: bool = False, scale: float = 0.5):
    w = rng.standard_normal(d)
    if monotone:
        w = np.abs(w)
    return fn.Halfspace(w, float(scale * rng.standard_normal()))


def _ptf(rng, d: int = 2, k: int = 2, scale: float = 1.0):
    exps = [e for e in itertools.product(range(k + 1), repeat=d) if 0 < sum(e) <= k]
    coeffs = rng.standard_normal(len(exps))
    return fn.PTF(np.array(exps), coeffs, float(scale * rng.standard_normal()))


def _disk(rng, d: int = 2, low: float = -1.0, high: float = 1.0, rmin: float = 0.3, rmax: float = 1.2):
    return fn.Disk(rng.uniform(low, high, d), float(rng.uniform(rmin, rmax)))


def _polygon(rng, vertices: int = 3, low: float = -1.0, high: float = 1.0,
             rmin: float = 0.3, rmax: float = 1.2):
    # points on a circle in angular order always form a convex polygon
    angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, vertices))
    radius = rng.uniform(rmin, rmax)
    center = rng.uniform(low, high, 2)
    V = center + radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return fn.ConvexPolygon(V)


def _monotone_dnf(rng, d: int = 2, terms: int = 2, width: int = 2, low: float = -1.0, high: float = 1.0):
    T = np.full((terms, d), -np.inf)
    for j in range(terms):
        coords = rng.choice(d, size=min(width, d), replace=False)
        T[j, coords] = rng.uniform(low, high, coords.size)
    return fn.MonotoneDNF(T)


def _staircase(rng, d: int = 1, k: int = 3, low: float = -1.0, high: float = 1.0):
    w = np.abs(rng.standard_normal(d)) if d > 1 else np.ones(1)
    cuts = np.sort(rng.uniform(low, high, k))
    return fn.Staircase(w, cuts, int(rng.choice([-1, 1])))


def _checkerboard(rng, d: int = 2, cell: float = 0.125, jitter: bool = False):
    origin = rng.uniform(0.0, cell, d) if jitter else np.zeros(d)
    return fn.Checkerboard(cell, origin)


def _diagonal(rng, n: int = 16, d: int = 2, fill: float = 0.5):
    """At most one ``1`` on every diagonal ``{x + t 1}`` of ``[n]^d``."""
    table = -np.ones((n,) * d, dtype=np.int8)
    grid = np.indices((n,) * d).reshape(d, -1).T
    starts = grid[grid.min(axis=1) == 0]
    for s in starts:
        if rng.random() < fill:
            length = n - int(s.max())
            t = int(rng.integers(0, length))
            table[tuple(s + t)] = 1
    return fn.Table(table)


def _monotone_table(rng, n: int = 4, d: int = 2):
    """A random monotone table: the up-closure of a few random seed cells."""
    grid = np.indices((n,) * d).reshape(d, -1).T
    seeds = grid[rng.random(grid.shape[0]) < 1.5 / grid.shape[0] ** 0.5]
    up = np.zeros(grid.shape[0], dtype=bool)
    for s in seeds:
        up |= np.all(grid >= s, axis=1)
    table = np.where(up, 1, -1).astype(np.int8).reshape((n,) * d)
    assert is_monotone(table[None])[0]
    return fn.Table(table)


_GENERATORS = {
    "halfspace": _halfspace,
    "ptf": _ptf,
    "disk": _disk,
    "polygon": _polygon,
    "monotone-dnf": _monotone_dnf,
    "staircase": _staircase,
    "checkerboard": _checkerboard,
    "diagonal": _diagonal,
    "monotone-table": _monotone_table,
}
INSTANCE_KINDS = tuple(sorted(_GENERATORS))


def random_instance(kind: str, rng: np.random.Generator, **params):
    """Draw one function of the named family; ``params`` override the defaults."""
    if kind not in _GENERATORS:
        raise ValueError(f"unknown instance kind {kind!r}; expected one of {INSTANCE_KINDS}")
    try:
        return _GENERATORS[kind](rng, **params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {kind!r}: {exc}") from None


def generate_instance(spec: dict, seed: int) -> str:
    """Instance file text for ``spec = {"kind": ..., **params}``; deterministic in ``seed``."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    f = random_instance(kind, np.random.default_rng(seed), **spec)
    doc = {"format": INSTANCE_FORMAT, "version": INSTANCE_VERSION, "generator": kind,
           "params": spec, "seed": int(seed), "function": f.to_spec()}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def load_instance(text: str):
    doc = json.loads(text)
    if doc.get("format") != INSTANCE_FORMAT or doc.get("version") != INSTANCE_VERSION:
        raise ValueError("not a version-1 instance file")
    return fn.function_from_spec(doc["function"])
