"""Agnostic learners built on induced block partitions.

Two learners are provided.  ``brute_force_learn`` takes a per-cell majority
vote over a grid of ``r^d`` cells.  ``downsample_learn`` instead fits a
low-degree Walsh polynomial on the grid by least squares and then rounds it
with an empirically chosen threshold.  Both learners run on augmented
partitions when the marginal is finite.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from functools import cached_property
from typing import Callable

import numpy as np

from .bbs import min_r_for_epsilon
from .blockgrid import (
    AugmentedBlockPartition,
    BlockPartition,
    all_cells,
    grid_sample_size,
    induce_augmented_partition,
    induce_partition,
    partition_from_json,
    partition_to_json,
)
from .product_dist import Estimate, LabeledOracle, ProductDistribution, augment
from .walsh import feature_count, feature_matrix, low_degree_features

__all__ = [
    "LearnerConfig",
    "RegressionModel",
    "Hypothesis",
    "preset",
    "agnostic_sample_size",
    "rounding_sample_size",
    "tag_set_size",
    "next_pow2",
    "brute_force_learn",
    "regression_fit",
    "erm_threshold",
    "round_to_threshold",
    "downsample_learn",
    "rounding_gap",
    "hypothesis_to_json",
    "hypothesis_from_json",
]

MODES = ("brute_force", "regression")
EVAL_CHUNK = 2**18
DENSE_GRID = 2**20


def next_pow2(x: int) -> int:
    return 1 << max(int(x) - 1, 0).bit_length()


def agnostic_sample_size(cells: int, eps: float, fail: float = 1 / 6) -> int:
    """Uniform convergence for all ``2^cells`` grid functions at accuracy ``eps / 2``."""
    return int(math.ceil(2.0 * (cells * math.log(2.0) + math.log(2.0 / fail)) / eps**2))


def rounding_sample_size(eps: float, fail: float = 1 / 6, const: float = 8.0) -> int:
    """Labeled samples for choosing a threshold (a class of VC dimension 1)."""
    return int(math.ceil(const * math.log(2.0 / fail) / eps**2))


def tag_set_size(d: int, r: int, eps: float, conf: float = 1 / 6) -> int:
    """``ceil(2 d ln(r) ln(1/conf) / eps^2)`` tags for averaging over augmented cells."""
    return int(math.ceil(2.0 * d * math.log(max(r, 2)) * math.log(1.0 / conf) / eps**2))


@dataclass(frozen=True)
class LearnerConfig:
    """Resolved parameters of a learning run.

    ``r_min`` is the analysis's cell count; ``r`` is the count actually used,
    rounded up to a power of two in regression mode.  ``degree`` is the
    exclusive bound ``t`` on ``|alpha|``; every ``t > d`` selects the full basis.
    """

    class_id: str
    d: int
    k: int
    epsilon: float
    r: int
    r_min: int
    mode: str
    grid_m: int
    regression_n: int
    degree: int | None = None
    noise_delta: float | None = None
    finite_mode: bool = False
    round_n: int = 0
    round_eps: float = 0.0
    tag_count: int = 0
    ridge: float = 1e-8
    loss: str = "l2"

    def __post_init__(self) -> None:
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.grid_m % self.r != 0:
            raise ValueError("grid_m must be divisible by r")
        if self.loss not in ("l1", "l2"):
            raise ValueError("loss must be 'l1' or 'l2'")
        if self.mode == "regression":
            if self.r & (self.r - 1):
                raise ValueError("regression mode needs r to be a power of two")
            if self.degree is None or self.degree < 1:
                raise ValueError("regression mode needs a degree bound t >= 1")
        if self.finite_mode and self.tag_count < 1:
            raise ValueError("finite mode needs a positive tag count")

    @property
    def effective_degree(self) -> int | None:
        return None if self.degree is None else min(self.degree, self.d + 1)

    def replace(self, **kw) -> "LearnerConfig":
        kw = dict(kw)
        if "r" in kw and "grid_m" not in kw:
            r = kw["r"]
            kw["grid_m"] = r * math.ceil(self.grid_m / r)
        return replace(self, **kw)


def preset(class_id: str, d: int, k: int, eps: float, *, finite_mode: bool = False,
           grid_const: float = 18.0, grid_tv: float | None = None,
           regression_const: float = 8.0, delta_const: float = 1.0,
           degree_const: float = 2.0, round_const: float = 8.0,
           conf: float = 1 / 6, feature_budget: int = 200_000) -> LearnerConfig:
    """Parameter bundle for ``halfspace`` (functions of ``k`` halfspaces), ``ptf``
    (degree ``k``), ``k-alternating``, ``monotone`` and ``convex`` (functions of ``k``
    convex sets).  Every leading constant is a keyword argument."""
    tv = eps / 3 if grid_tv is None else grid_tv
    round_eps = eps / 2
    common = dict(class_id=class_id, d=d, k=k, epsilon=eps, finite_mode=finite_mode,
                  round_eps=round_eps)
    if class_id == "convex":
        r = min_r_for_epsilon("convex", d, k, eps)
        n = agnostic_sample_size(r**d, eps / 3, conf)
        return LearnerConfig(
            r=r, r_min=r, mode="brute_force", grid_m=grid_sample_size(r, d, tv, conf, grid_const),
            regression_n=n, round_n=rounding_sample_size(round_eps, conf, round_const) if finite_mode else 0,
            tag_count=tag_set_size(d, r, eps, conf) if finite_mode else 0, **common,
        )
    delta = None
    if class_id == "halfspace":
        r_min = min_r_for_epsilon("halfspace", d, k, eps)
        delta = delta_const * eps**4 / k**2
        t = math.ceil(2.0 / delta)
    elif class_id == "ptf":
        r_min = min_r_for_epsilon("ptf", d, k, eps)
        delta = delta_const * eps ** (2 ** (k + 1))
        t = math.ceil(2.0 / delta)
    elif class_id in ("k-alternating", "monotone"):
        kk = 1 if class_id == "monotone" else k
        r_min = min_r_for_epsilon("k-alternating", d, kk, eps)
        t = math.ceil(degree_const * kk * math.sqrt(d) / eps**2)
    else:
        raise ValueError(f"unknown class {class_id!r}")
    r = next_pow2(r_min)
    fc = feature_count(r, d, min(t, d + 1))
    return LearnerConfig(
        r=r, r_min=r_min, mode="regression", grid_m=grid_sample_size(r, d, tv, conf, grid_const),
        regression_n=int(math.ceil(regression_const * fc / eps**2)), degree=int(t),
        noise_delta=delta, round_n=rounding_sample_size(round_eps, conf, round_const),
        tag_count=tag_set_size(d, r, eps, conf) if finite_mode else 0, **common,
    )


# ---------------------------------------------------------------------------
# hypotheses


@dataclass(frozen=True, eq=False)
class RegressionModel:
    """``gamma(v) = sum_f coefs[f] psi_{features[f]}(v)`` on ``[n]^d``."""

    n: int
    features: np.ndarray
    coefs: np.ndarray

    def __call__(self, cells: np.ndarray) -> np.ndarray:
        cells = np.asarray(cells, dtype=np.int64)
        shape = (self.n,) * cells.shape[1]
        flat = np.ravel_multi_index(tuple(cells.T), shape)
        if self.n ** cells.shape[1] <= DENSE_GRID:
            return self._dense[flat]
        # evaluate each distinct cell once; tag averaging revisits cells heavily
        keys, inv = np.unique(flat, return_inverse=True)
        return self._evaluate(np.stack(np.unravel_index(keys, shape), axis=1))[inv.ravel()]

    def _evaluate(self, cells: np.ndarray) -> np.ndarray:
        rows = max(1, EVAL_CHUNK // max(self.features.shape[0], 1))
        out = np.empty(cells.shape[0])
        for s in range(0, cells.shape[0], rows):
            out[s:s + rows] = feature_matrix(self.features, cells[s:s + rows], self.n) @ self.coefs
        return out

    @cached_property
    def _dense(self) -> np.ndarray:
        return self._evaluate(all_cells(self.n, self.features.shape[1]))


@dataclass(frozen=True, eq=False)
class Hypothesis:
    """A learned classifier.

    ``table`` holds majority labels per cell (brute force) and ``model`` holds
    the regression polynomial.  Grid values are clipped to ``[-1, 1]``.  With
    ``tags`` set, the real score of ``x`` averages the grid value over the
    augmented cells of ``(x, z)`` for each stored tag ``z``.  The prediction
    is ``+1`` iff the score is at least ``threshold``.
    """

    partition: BlockPartition | AugmentedBlockPartition
    table: np.ndarray | None = None
    model: RegressionModel | None = None
    threshold: float = 0.0
    tags: np.ndarray | None = None

    def grid_value(self, cells: np.ndarray) -> np.ndarray:
        V = np.asarray(cells, dtype=np.int64)
        if self.table is not None:
            vals = self.table[tuple(V.T)].astype(np.float64)
        else:
            vals = self.model(V)
        return np.clip(vals, -1.0, 1.0)

    def gamma(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        p = self.partition
        if self.tags is None:
            if p.augmented:
                raise ValueError("augmented hypotheses need a tag set")
            return self.grid_value(p.block_of(X))
        uniq, inv = np.unique(X, axis=0, return_inverse=True)
        Z = self.tags
        out = np.empty(uniq.shape[0])
        rows = max(1, EVAL_CHUNK // Z.shape[0])
        for s in range(0, uniq.shape[0], rows):
            chunk = uniq[s:s + rows]
            base = np.repeat(chunk, Z.shape[0], axis=0)
            tag = np.tile(Z, (chunk.shape[0], 1))
            vals = self.grid_value(p.block_of(base, tag))
            out[s:s + rows] = vals.reshape(chunk.shape[0], Z.shape[0]).mean(axis=1)
        return out[inv.ravel()]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.where(self.gamma(X) >= self.threshold, 1, -1).astype(np.int8)

    __call__ = predict


# ---------------------------------------------------------------------------
# building blocks


def _induce(dist: ProductDistribution, r: int, m: int, finite: bool, rng: np.random.Generator):
    X = dist.sample(m, rng)
    if finite:
        return induce_augmented_partition(augment(X, rng), r, rng)
    return induce_partition(X, r, rng)


def _labeled_cells(oracle: LabeledOracle, p, n: int, rng: np.random.Generator):
    X, b = oracle.sample(n, rng)
    cells = p.block_of(augment(X, rng)) if p.augmented else p.block_of(X)
    return cells, b


def regression_fit(features: np.ndarray, cells: np.ndarray, labels: np.ndarray, n: int,
                   ridge: float = 1e-8, loss: str = "l2", iters: int = 30) -> RegressionModel:
    """Least-squares fit of ``labels`` over the span of the given Walsh features.

    Samples are aggregated per distinct cell, so the normal equations cost
    ``O(U F^2)`` for ``U`` distinct cells.  ``loss="l1"`` refines the fit by
    iteratively reweighted least squares.
    """
    cells = np.asarray(cells, dtype=np.int64)
    labels = np.asarray(labels)
    if cells.shape[0] == 0:
        raise ValueError("regression needs at least one sample")
    d = cells.shape[1]
    flat = np.ravel_multi_index(tuple(cells.T), (n,) * d)
    keys, inv = np.unique(flat, return_inverse=True)
    inv = inv.ravel()
    pos = np.bincount(inv, weights=(labels > 0).astype(np.float64), minlength=keys.size)
    neg = np.bincount(inv, weights=(labels <= 0).astype(np.float64), minlength=keys.size)
    ucells = np.stack(np.unravel_index(keys, (n,) * d), axis=1)
    Phi = feature_matrix(features, ucells, n)
    F = Phi.shape[1]

    def solve(wp: np.ndarray, wn: np.ndarray) -> np.ndarray:
        G = Phi.T @ ((wp + wn)[:, None] * Phi) + ridge * np.eye(F)
        rhs = Phi.T @ (wp - wn)
        try:
            return np.linalg.solve(G, rhs)
        except np.linalg.LinAlgError as exc:
            raise ValueError("singular normal equations") from exc

    coefs = solve(pos, neg)
    if loss == "l1":
        for _ in range(iters):
            g = Phi @ coefs
            wp = pos / np.maximum(np.abs(g - 1.0), 1e-6)
            wn = neg / np.maximum(np.abs(g + 1.0), 1e-6)
            new = solve(wp, wn)
            if np.max(np.abs(new - coefs)) < 1e-10:
                coefs = new
                break
            coefs = new
    elif loss != "l2":
        raise ValueError("loss must be 'l1' or 'l2'")
    return RegressionModel(n, np.asarray(features, dtype=np.int64), coefs)


def erm_threshold(values: np.ndarray, labels: np.ndarray) -> tuple[float, float]:
    """Threshold minimizing the empirical error of ``sign(value - t)``.

    Candidates are one point below all values, the midpoints between
    consecutive distinct values, and one point above.  The smallest minimizer
    is returned together with its empirical error.
    """
    v = np.asarray(values, dtype=np.float64)
    y = np.asarray(labels) > 0
    if v.size == 0:
        raise ValueError("need at least one sample")
    uniq, inv = np.unique(v, return_inverse=True)
    inv = inv.ravel()
    npos = np.bincount(inv, weights=y.astype(np.float64), minlength=uniq.size)
    nneg = np.bincount(inv, weights=(~y).astype(np.float64), minlength=uniq.size)
    # candidate c puts the first c distinct values on the -1 side
    pos_below = np.concatenate([[0.0], np.cumsum(npos)])
    neg_below = np.concatenate([[0.0], np.cumsum(nneg)])
    errors = pos_below + (neg_below[-1] - neg_below)
    c = int(np.argmin(errors))
    if c == 0:
        t = uniq[0] - 1.0
    elif c == uniq.size:
        t = uniq[-1] + 1.0
    else:
        t = 0.5 * (uniq[c - 1] + uniq[c])
    return float(t), float(errors[c] / v.size)


def round_to_threshold(gamma: Callable[[np.ndarray], np.ndarray], oracle: LabeledOracle,
                       n_samples: int, rng: np.random.Generator) -> float:
    if n_samples < 1:
        raise ValueError("need at least one rounding sample")
    X, b = oracle.sample(n_samples, rng)
    return erm_threshold(gamma(X), b)[0]


def _draw_tags(cfg_tags: int, d: int, rng: np.random.Generator) -> np.ndarray:
    return rng.random((cfg_tags, d))


def brute_force_learn(oracle: LabeledOracle, r: int, eps: float, rng: np.random.Generator, *,
                      grid_m: int | None = None, n_labels: int | None = None,
                      finite_mode: bool | None = None, grid_const: float = 18.0,
                      round_n: int | None = None, tag_count: int | None = None,
                      budget: int = 2**24) -> Hypothesis:
    """Per-cell majority vote over an induced ``r``-partition.

    Cells without samples, and cells whose vote is tied, are labeled ``+1``.
    """
    d = oracle.d
    if r**d > budget:
        raise ValueError(f"{r}^{d} cells exceed budget {budget}")
    finite = oracle.marginal.is_finite if finite_mode is None else finite_mode
    m = grid_m if grid_m is not None else grid_sample_size(r, d, eps / 3, const=grid_const)
    n = n_labels if n_labels is not None else agnostic_sample_size(r**d, eps / 3)
    p = _induce(oracle.marginal, r, m, finite, rng)
    cells, b = _labeled_cells(oracle, p, n, rng)
    flat = np.ravel_multi_index(tuple(cells.T), (r,) * d)
    votes = np.bincount(flat, weights=b.astype(np.float64), minlength=r**d)
    table = np.where(votes >= 0, 1, -1).astype(np.int8).reshape((r,) * d)
    if not finite:
        return Hypothesis(p, table=table)
    k = tag_count if tag_count is not None else tag_set_size(d, r, eps)
    hyp = Hypothesis(p, table=table, tags=_draw_tags(k, d, rng))
    rn = round_n if round_n is not None else rounding_sample_size(eps / 2)
    return replace(hyp, threshold=round_to_threshold(hyp.gamma, oracle, rn, rng))


def downsample_learn(cfg: LearnerConfig, oracle: LabeledOracle, rng: np.random.Generator) -> Hypothesis:
    """Run the full pipeline described by ``cfg``."""
    if cfg.d != oracle.d:
        raise ValueError("config and oracle dimensions differ")
    if cfg.mode == "brute_force":
        return brute_force_learn(
            oracle, cfg.r, cfg.epsilon, rng, grid_m=cfg.grid_m, n_labels=cfg.regression_n,
            finite_mode=cfg.finite_mode, round_n=cfg.round_n or None, tag_count=cfg.tag_count or None,
        )
    p = _induce(oracle.marginal, cfg.r, cfg.grid_m, cfg.finite_mode, rng)
    cells, b = _labeled_cells(oracle, p, cfg.regression_n, rng)
    features = low_degree_features(cfg.r, cfg.d, cfg.effective_degree)
    model = regression_fit(features, cells, b, cfg.r, ridge=cfg.ridge, loss=cfg.loss)
    tags = _draw_tags(cfg.tag_count, cfg.d, rng) if cfg.finite_mode else None
    hyp = Hypothesis(p, model=model, tags=tags)
    return replace(hyp, threshold=round_to_threshold(hyp.gamma, oracle, cfg.round_n, rng))


def rounding_gap(hyp: Hypothesis, oracle: LabeledOracle, n: int, rng: np.random.Generator,
                 eps: float) -> tuple[Estimate, float]:
    """Held-out ``P[sign(gamma - t) != b]`` and the bound ``E|gamma - b| / 2 + eps``.

    Both sides use the exact conditional label law on the same points.
    """
    X = oracle.marginal.sample(n, rng)
    p = oracle.label_rule.prob_plus(X)
    g = hyp.gamma(X)
    pred = g >= hyp.threshold
    loss = np.where(pred, 1.0 - p, p)
    half_abs = 0.5 * (p * np.abs(g - 1.0) + (1.0 - p) * np.abs(g + 1.0))
    err = Estimate(float(loss.mean()), float(loss.std(ddof=1) / math.sqrt(n)), n)
    return err, float(half_abs.mean()) + eps


# ---------------------------------------------------------------------------
# serialization


def hypothesis_to_json(h: Hypothesis) -> str:
    doc = {
        "format": "downsampling.hypothesis",
        "version": 1,
        "partition": json.loads(partition_to_json(h.partition)),
        "threshold": h.threshold,
        "table": None if h.table is None else h.table.ravel().tolist(),
        "table_shape": None if h.table is None else list(h.table.shape),
        "model": None if h.model is None else {
            "n": h.model.n, "features": h.model.features.tolist(), "coefs": h.model.coefs.tolist()},
        "tags": None if h.tags is None else h.tags.tolist(),
    }
    return json.dumps(doc, sort_keys=True)


def hypothesis_from_json(text: str) -> Hypothesis:
    doc = json.loads(text)
    if doc.get("format") != "downsampling.hypothesis" or doc.get("version") != 1:
        raise ValueError("not a version-1 hypothesis dump")
    p = partition_from_json(json.dumps(doc["partition"]))
    table = None
    if doc["table"] is not None:
        table = np.array(doc["table"], dtype=np.int8).reshape(doc["table_shape"])
    model = None
    if doc["model"] is not None:
        mdl = doc["model"]
        model = RegressionModel(mdl["n"], np.array(mdl["features"], dtype=np.int64).reshape(-1, p.d),
                                np.array(mdl["coefs"], dtype=np.float64))
    tags = None if doc["tags"] is None else np.array(doc["tags"], dtype=np.float64)
    return Hypothesis(p, table=table, model=model, threshold=doc["threshold"], tags=tags)


def config_to_dict(cfg: LearnerConfig) -> dict:
    return asdict(cfg)
