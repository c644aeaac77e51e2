"""Declarative experiment runner.

A scenario file is YAML with ``version: 1``, a ``kind``, a trial count, a
master seed, a success threshold and a list of ``cases``.  Trial ``i`` of case
``c`` runs on its own stream derived from ``(seed, c, i)``, so results do not
depend on worker count or completion order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from . import bbs, blockgrid, learners, testers, walsh
from .functions import Composition, Table, function_from_spec
from .instances import load_instance, random_instance
from .product_dist import LabeledOracle, ProductDistribution, Target

__all__ = [
    "ConfigError",
    "Scenario",
    "TrialRow",
    "TrialReport",
    "CSV_COLUMNS",
    "load_scenario",
    "parse_scenario",
    "shipped_configs",
    "trial_seed",
    "run_scenario",
    "report_to_csv",
    "wilson_interval",
    "summarize_rows",
]

CONFIG_VERSION = 1
CSV_COLUMNS = ("config", "case", "trial", "seed", "success", "invariant", "value", "bound",
               "samples", "queries", "detail")
WORKERS_ENV = "DOWNSAMPLING_WORKERS"


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)
        self.line, self.column = line, column


# ---------------------------------------------------------------------------
# scenario schema

_TOP_KEYS = {"version", "name", "kind", "description", "trials", "seed", "threshold", "cases"}
_THRESHOLD_KEYS = {"min_success", "invariant"}
_COMMON_CASE = {"label"}
_CASE_KEYS = {
    "walsh-validate": {"n", "d", "tol"},
    "walsh-tail": {"n", "d", "delta", "constant"},
    "grid-uniformity": {"distribution", "r", "eps", "grid_const", "fail"},
    "distance-to-coarse": {"distribution", "target", "r", "grid_tv", "test_n"},
    "bbs": {"distribution", "family", "d", "r", "grid_m", "parts"},
    "tester": {"tester", "expect", "target", "distribution", "n", "d", "eps", "grid_m"},
    "learn": {"learner", "distribution", "target", "flip", "eps", "r", "class", "k", "overrides",
              "test_n", "rounding_check"},
    "distance-approx": {"class", "r", "k", "eps", "eps1", "eps2", "max_flip"},
    "determinism": {"config", "trials"},
}
_REQUIRED_CASE = {
    "walsh-validate": {"n", "d"},
    "walsh-tail": {"n", "d", "delta"},
    "grid-uniformity": {"distribution", "r", "eps"},
    "distance-to-coarse": {"distribution", "target", "r"},
    "bbs": {"family", "d", "r"},
    "tester": {"tester", "expect", "target", "eps"},
    "learn": {"learner", "distribution", "target", "flip", "eps"},
    "distance-approx": {"class", "r", "eps", "eps1", "eps2"},
    "determinism": {"config"},
}
KINDS = tuple(sorted(_CASE_KEYS))


@dataclass
class Scenario:
    name: str
    kind: str
    trials: int
    seed: int
    min_success: Fraction
    require_invariant: bool
    cases: list
    description: str = ""
    source: str = ""


def _mark(node) -> tuple[int, int]:
    return node.start_mark.line + 1, node.start_mark.column + 1


def _fail(node, msg: str):
    raise ConfigError(msg, *_mark(node))


def _mapping(node, allowed: set, required: set, what: str) -> dict:
    if not isinstance(node, yaml.MappingNode):
        _fail(node, f"{what} must be a mapping")
    out = {}
    for k, v in node.value:
        key = k.value
        if key not in allowed:
            _fail(k, f"unknown key {key!r} in {what}")
        if key in out:
            _fail(k, f"duplicate key {key!r} in {what}")
        out[key] = (k, v)
    for key in sorted(required - set(out)):
        _fail(node, f"{what} is missing required key {key!r}")
    return out


def _plain(node):
    return yaml.safe_load(yaml.serialize(node))


def _fraction(node) -> Fraction:
    value = _plain(node)
    try:
        f = Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        _fail(node, f"{value!r} is not a number or fraction")
    if not 0 <= f <= 1:
        _fail(node, "success threshold must lie in [0, 1]")
    return f


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(str(exc).splitlines()[0], mark.line + 1 if mark else None,
                          mark.column + 1 if mark else None) from None
    if root is None:
        raise ConfigError("empty scenario file", 1, 1)
    top = _mapping(root, _TOP_KEYS, {"version", "kind", "trials", "seed", "cases"}, "scenario")
    version = _plain(top["version"][1])
    if version != CONFIG_VERSION:
        _fail(top["version"][1], f"unsupported version {version!r}; expected {CONFIG_VERSION}")
    kind_node = top["kind"][1]
    kind = _plain(kind_node)
    if kind not in _CASE_KEYS:
        _fail(kind_node, f"unknown scenario kind {kind!r}; expected one of {KINDS}")
    trials = _plain(top["trials"][1])
    seed = _plain(top["seed"][1])
    if not isinstance(trials, int) or trials < 1:
        _fail(top["trials"][1], "trials must be a positive integer")
    if not isinstance(seed, int) or seed < 0:
        _fail(top["seed"][1], "seed must be a nonnegative integer")
    min_success, invariant = Fraction(1), False
    if "threshold" in top:
        th = _mapping(top["threshold"][1], _THRESHOLD_KEYS, set(), "threshold")
        if "min_success" in th:
            min_success = _fraction(th["min_success"][1])
        if "invariant" in th:
            invariant = bool(_plain(th["invariant"][1]))
    cases_node = top["cases"][1]
    if not isinstance(cases_node, yaml.SequenceNode) or not cases_node.value:
        _fail(cases_node, "cases must be a nonempty list")
    cases = []
    for i, c in enumerate(cases_node.value):
        fields = _mapping(c, _CASE_KEYS[kind] | _COMMON_CASE, _REQUIRED_CASE[kind], f"case {i}")
        case = {k: _plain(v) for k, (_, v) in fields.items()}
        case.setdefault("label", f"case{i}")
        try:
            _check_case(kind, case)
        except ValueError as exc:
            _fail(c, str(exc))
        cases.append(case)
    name = _plain(top["name"][1]) if "name" in top else Path(source).stem
    desc = _plain(top["description"][1]) if "description" in top else ""
    return Scenario(str(name), kind, trials, seed, min_success, invariant, cases, desc, source)


def _check_case(kind: str, case: dict) -> None:
    """Semantic checks that need no randomness."""
    if "distribution" in case:
        ProductDistribution.from_descriptor(case["distribution"])
    t = case.get("target")
    if isinstance(t, dict) and "random" not in t and "instance" not in t:
        function_from_spec(t)
    if kind == "tester":
        if case["tester"] not in _TESTERS:
            raise ValueError(f"unknown tester {case['tester']!r}")
        if case["expect"] not in ("accept", "reject"):
            raise ValueError("expect must be 'accept' or 'reject'")
    if kind == "learn" and case["learner"] not in ("brute-force", "preset"):
        raise ValueError("learner must be 'brute-force' or 'preset'")
    if kind == "bbs" and case["family"] not in ("monotone", "disk", "triangle", "composed"):
        raise ValueError(f"unknown bbs family {case['family']!r}")


def shipped_configs() -> dict[str, Path]:
    root = resources.files("downsampling") / "configs"
    return {Path(p.name).stem: Path(str(p)) for p in sorted(root.iterdir(), key=lambda p: p.name)
            if p.name.endswith(".yaml")}


def load_scenario(ref: str | os.PathLike) -> Scenario:
    """Load a scenario by path or by shipped config name."""
    path = Path(ref)
    if not path.exists():
        shipped = shipped_configs()
        if str(ref) not in shipped:
            raise ConfigError(f"no such config file or shipped config: {ref}")
        path = shipped[str(ref)]
    return parse_scenario(path.read_text(), str(path))


# ---------------------------------------------------------------------------
# trial rows and reports


@dataclass
class TrialRow:
    success: bool
    value: float
    bound: float
    invariant: bool = True
    samples: int = 0
    queries: int = 0
    detail: dict = field(default_factory=dict)


@dataclass
class TrialReport:
    scenario: Scenario
    rows: list  # (case label, trial, seed, TrialRow, wall seconds)

    def case_summary(self) -> list[dict]:
        return summarize_rows(
            [(self.scenario.name, lab, row.success, row.invariant) for lab, _, _, row, _ in self.rows],
            self.scenario.min_success, self.scenario.require_invariant,
        )

    @property
    def passed(self) -> bool:
        return all(s["passed"] for s in self.case_summary())


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def summarize_rows(rows, min_success: Fraction | None = None, require_invariant: bool = False) -> list[dict]:
    """Aggregate ``(config, case, success, invariant)`` tuples per case, in first-seen order."""
    groups: dict = {}
    for config, case, ok, inv in rows:
        g = groups.setdefault((config, case), [0, 0, 0])
        g[0] += 1
        g[1] += int(bool(ok))
        g[2] += int(not inv)
    out = []
    for (config, case), (n, s, bad) in groups.items():
        lo, hi = wilson_interval(s, n)
        rec = {"config": config, "case": case, "trials": n, "successes": s, "fraction": s / n,
               "wilson_low": lo, "wilson_high": hi, "invariant_failures": bad}
        if min_success is not None:
            rec["passed"] = Fraction(s, n) >= min_success and (bad == 0 or not require_invariant)
        out.append(rec)
    return out


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def report_to_csv(report: TrialReport, timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS + (("wall_seconds",) if timing else ()))
    for label, trial, seed, row, wall in report.rows:
        rec = [report.scenario.name, label, trial, seed, row.success, row.invariant, row.value,
               row.bound, row.samples, row.queries, json.dumps(_jsonable(row.detail), sort_keys=True)]
        if timing:
            rec.append(f"{wall:.3f}")
        w.writerow([_fmt(v) for v in rec])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


# ---------------------------------------------------------------------------
# running


def trial_seed(master: int, case_index: int, trial: int) -> int:
    """64-bit seed for one trial, a hash of ``(master, case, trial)``."""
    words = np.random.SeedSequence([int(master), int(case_index), int(trial)]).generate_state(2, np.uint32)
    return int(words[0]) | (int(words[1]) << 32)


def _worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def _run_one(args) -> tuple[TrialRow, float]:
    kind, case, seed = args
    start = time.perf_counter()
    row = _RUNNERS[kind](case, np.random.default_rng(seed))
    return row, time.perf_counter() - start


def run_scenario(sc: Scenario, trials: int | None = None, workers: int | None = None) -> TrialReport:
    n = sc.trials if trials is None else trials
    jobs, keys = [], []
    for ci, case in enumerate(sc.cases):
        for i in range(n):
            seed = trial_seed(sc.seed, ci, i)
            jobs.append((sc.kind, case, seed))
            keys.append((case["label"], i, seed))
    workers = _worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    rows = [(lab, i, seed, row, wall) for (lab, i, seed), (row, wall) in zip(keys, results)]
    return TrialReport(sc, rows)


# ---------------------------------------------------------------------------
# shared helpers for runners


def _dist(case: dict) -> ProductDistribution:
    return ProductDistribution.from_descriptor(case["distribution"])


def _target(case: dict, rng: np.random.Generator):
    t = case["target"]
    if "random" in t:
        params = {k: v for k, v in t.items() if k != "random"}
        return random_instance(t["random"], rng, **params)
    if "instance" in t:
        return load_instance(Path(t["instance"]).read_text())
    return function_from_spec(t)


# ---------------------------------------------------------------------------
# runners, one per scenario kind


def _walsh_validate(case: dict, rng: np.random.Generator) -> TrialRow:
    n, d = case["n"], case["d"]
    tol = float(case.get("tol", 1e-10))
    cells = blockgrid.all_cells(n, d)
    idx = blockgrid.all_cells(n, d)
    Psi = np.stack([walsh.walsh_eval(a, cells, n) for a in idx]).astype(np.float64)
    N = cells.shape[0]
    ortho = float(np.abs(Psi @ Psi.T / N - np.eye(N)).max())
    f = rng.choice([-1.0, 1.0], size=(n,) * d)
    spec = walsh.transform(f)
    brute = (Psi @ f.reshape(-1)) / N
    vs_brute = float(np.abs(spec.coeffs.reshape(-1) - brute).max())
    parseval = abs(spec.weight() - 1.0)
    roundtrip = float(np.abs(walsh.inverse_transform(spec) - f).max())
    rho = float(rng.uniform(-1, 1))
    eig = walsh.transform(walsh.noise_operator(f, rho))
    eigen = float(np.abs(eig.coeffs - rho ** spec.levels * spec.coeffs).max())
    worst = max(ortho, vs_brute, parseval, roundtrip, eigen)
    detail = {"orthonormality": ortho, "brute_force": vs_brute, "parseval": parseval,
              "roundtrip": roundtrip, "eigen": eigen}
    return TrialRow(worst <= tol, worst, tol, detail=detail)


def _walsh_tail(case: dict, rng: np.random.Generator) -> TrialRow:
    n, d, delta = case["n"], case["d"], float(case["delta"])
    c = float(case.get("constant", 2.32))
    f = rng.choice([-1.0, 1.0], size=(n,) * d)
    spec = walsh.transform(f)
    t = math.ceil(2.0 / delta)
    tail = walsh.tail_weight(spec, t)
    ns = walsh.noise_sensitivity_exact(spec, delta)
    return TrialRow(tail <= c * ns + 1e-12, tail, c * ns, detail={"t": t, "ns": ns})


def _grid_uniformity(case: dict, rng: np.random.Generator) -> TrialRow:
    dist = _dist(case)
    r, eps = case["r"], float(case["eps"])
    m = blockgrid.grid_sample_size(r, dist.d, eps, float(case.get("fail", 1 / 6)),
                                   float(case.get("grid_const", 18.0)))
    p = blockgrid.induce_partition(dist.sample(m, rng), r, rng)
    tv = blockgrid.estimate_tv_to_uniform(p, dist)
    return TrialRow(tv.value <= eps, tv.value, eps, samples=m, detail={"exact": tv.exact})


def _distance_to_coarse(case: dict, rng: np.random.Generator) -> TrialRow:
    dist = _dist(case)
    f = _target(case, rng)
    r, d = case["r"], dist.d
    m = blockgrid.grid_sample_size(r, d, float(case.get("grid_tv", 0.1)))
    p = blockgrid.induce_partition(dist.sample(m, rng), r, rng)
    count = bbs.exact_nonconstant_count(f, p).count
    tv = blockgrid.estimate_tv_to_uniform(p, dist).value
    n = int(case.get("test_n", 20000))
    coarse = lambda X: f(p.blockpoint_of(p.block_of(X)))  # noqa: E731
    est = blockgrid.empirical_distance(f, coarse, dist, n, rng)
    bound = count / r**d + tv
    return TrialRow(est.value <= bound + 3 * est.stderr, est.value, bound, samples=m + n,
                    detail={"nonconstant": count, "tv": tv, "stderr": est.stderr})


def _bbs(case: dict, rng: np.random.Generator) -> TrialRow:
    fam, d, r = case["family"], case["d"], case["r"]
    dist = ProductDistribution.from_descriptor(case.get("distribution", {"iid": {"gaussian": [0, 1]}, "d": d}))
    m = int(case.get("grid_m", 64 * r))
    p = blockgrid.induce_partition(dist.sample(r * math.ceil(m / r), rng), r, rng)
    if fam == "monotone":
        kind = rng.choice(["monotone-dnf", "halfspace"])
        f = (random_instance("monotone-dnf", rng, d=d, terms=int(rng.integers(1, 4)))
             if kind == "monotone-dnf" else random_instance("halfspace", rng, d=d, monotone=True))
        c = bbs.corner_oracle_nonconstant(f, p)
        bound = bbs.bbs_bound("monotone", r, d).value
        return TrialRow(c.count <= bound, c.count, bound, detail={"function": f.to_spec()})
    if fam in ("disk", "triangle"):
        f = random_instance("disk", rng, d=d) if fam == "disk" else random_instance("polygon", rng, vertices=3)
        c = bbs.exact_nonconstant_count(f, p)
        bound = bbs.bbs_bound("convex", r, d).value
        return TrialRow(c.count <= bound, c.count, bound, detail={"function": f.to_spec()})
    # composed: flags of g(h_1..h_k) must lie inside the union of the parts' flags
    k = int(case.get("parts", 2))
    parts = [random_instance("disk", rng, d=d) if rng.random() < 0.5 else random_instance("halfspace", rng, d=d)
             for _ in range(k)]
    combiner = str(rng.choice(["and", "or", "xor", "majority"]))
    g = Composition(combiner, parts)
    part_flags = [bbs.exact_nonconstant_count(h, p).flags for h in parts]
    union = np.any(part_flags, axis=0)
    probe = bbs.count_nonconstant_blocks(g, p, 64, rng)
    subset = bool(np.all(~probe.flags | union))
    total = int(sum(f.sum() for f in part_flags))
    bound = bbs.bbs_bound("composed", r, d, k, inner="convex").value
    ok = subset and probe.count <= total <= bound
    return TrialRow(ok, probe.count, float(total), detail={"combiner": combiner, "union": int(union.sum()),
                                                           "bound": bound})


def _tester_grid_n(case: dict) -> tuple[int, int]:
    return int(case.get("n", 16)), int(case.get("d", 2))


def _run_diagonal(case, f, rng):
    n, d = _tester_grid_n(case)
    return testers.diagonal_test(lambda X: f(X), n, d, float(case["eps"]), rng)


def _run_grid_mono(case, f, rng):
    n, d = _tester_grid_n(case)
    return testers.grid_monotonicity_test(lambda X: f(X), n, d, float(case["eps"]), rng)


def _run_df_mono(case, f, rng):
    return testers.df_monotonicity_test(f, _dist(case), float(case["eps"]), rng, grid_m=case.get("grid_m"))


def _run_convex(case, f, rng):
    dist = _dist(case)
    eps = float(case["eps"])
    _, m, q = testers.convex_sample_sizes(dist.d, eps)
    X = dist.sample(m + q, rng)
    return testers.convex_onesided_test(X, f(X), eps, rng)


_TESTERS = {
    "diagonal": _run_diagonal,
    "grid-monotonicity": _run_grid_mono,
    "df-monotonicity": _run_df_mono,
    "convex": _run_convex,
}


def _tester(case: dict, rng: np.random.Generator) -> TrialRow:
    f = _target(case, rng)
    v = _TESTERS[case["tester"]](case, f, rng)
    tr = v.transcript
    want = case["expect"] == "accept"
    return TrialRow(v.accept == want, float(v.accept), float(want), samples=tr.samples, queries=tr.queries,
                    detail={"failed": [s.name for s in tr.subtests if not s.passed]})


def _learn(case: dict, rng: np.random.Generator) -> TrialRow:
    dist = _dist(case)
    f = _target(case, rng)
    eta, eps = float(case["flip"]), float(case["eps"])
    oracle = LabeledOracle(dist, Target(f, eta))
    if case["learner"] == "brute-force":
        hyp = learners.brute_force_learn(oracle, int(case["r"]), eps, rng)
        round_eps = eps / 2
    else:
        cfg = learners.preset(case["class"], dist.d, int(case.get("k", 1)), eps, finite_mode=dist.is_finite)
        if case.get("overrides"):
            cfg = cfg.replace(**case["overrides"])
        hyp = learners.downsample_learn(cfg, oracle, rng)
        round_eps = cfg.round_eps
    opt = oracle.bayes_error().value
    n = int(case.get("test_n", 100000))
    err = oracle.error_of(hyp.predict, n, rng)
    detail = {"opt": opt, "stderr": err.stderr, "threshold": hyp.threshold}
    invariant = True
    if case.get("rounding_check"):
        rerr, rbound = learners.rounding_gap(hyp, oracle, n, rng, round_eps)
        invariant = rerr.value <= rbound + 3 * rerr.stderr
        detail.update(rounding_error=rerr.value, rounding_bound=rbound)
    return TrialRow(err.value <= opt + eps, err.value, opt + eps, invariant=invariant, detail=detail)


_COVERS: dict = {}


def _cover(class_id: str, r: int, k: int) -> testers.CoverSet:
    key = (class_id, r, k)
    if key not in _COVERS:
        _COVERS[key] = testers.build_cover(class_id, r, 2, k)
    return _COVERS[key]


def _distance_approx(case: dict, rng: np.random.Generator) -> TrialRow:
    r, k = int(case["r"]), int(case.get("k", 1))
    eps, e1, e2 = float(case["eps"]), float(case["eps1"]), float(case["eps2"])
    cover = _cover(case["class"], r, k)
    # random non-uniform product law on [r]^2
    comps = []
    for _ in range(2):
        w = rng.dirichlet(np.full(r, 2.0))
        comps.append({"finite": {"support": list(range(r)), "weights": w.tolist()}})
    dist = ProductDistribution.from_descriptor(comps)
    max_flip = float(case.get("max_flip", 0.5))
    # rejection-sample an instance satisfying the promise (exact <= eps1 or >= eps2),
    # aiming for each side with equal odds; fall back to either side
    want_far = bool(rng.random() < 0.5)
    fallback = None
    for attempt in range(2000):
        base = cover.members[rng.integers(len(cover))].reshape(r, r)
        flips = rng.random((r, r)) < rng.uniform(0.0, max_flip)
        f = Table(np.where(flips, -base, base))
        exact = testers.exact_distance_to_cover(f, dist, cover)
        if (exact >= e2) if want_far else (exact <= e1):
            break
        if fallback is None and (exact <= e1 or exact >= e2):
            fallback = (f, exact)
    else:
        f, exact = fallback
    q = testers.distance_sample_size(len(cover), eps)
    X = dist.sample(q, rng)
    y = f(X)
    est = testers.distance_approximate(X, y, cover)
    verdict = testers.tolerant_test(X, y, cover, None, e1, e2)
    ideal = exact < e1 + (e2 - e1) / 2
    ok = abs(est.value - exact) <= eps and verdict.accept == ideal
    return TrialRow(ok, est.value, exact, samples=q,
                    detail={"accept": verdict.accept, "ideal": ideal, "attempts": attempt + 1,
                            "cover": len(cover)})


def _determinism(case: dict, rng: np.random.Generator) -> TrialRow:
    sc = load_scenario(case["config"])
    sc.seed = int(rng.integers(0, 2**31))
    n = int(case.get("trials", 2))
    a = report_to_csv(run_scenario(sc, trials=n, workers=1))
    b = report_to_csv(run_scenario(sc, trials=n, workers=1))
    same = a == b
    return TrialRow(same, float(same), 1.0, detail={"config": sc.name, "bytes": len(a)})


_RUNNERS = {
    "walsh-validate": _walsh_validate,
    "walsh-tail": _walsh_tail,
    "grid-uniformity": _grid_uniformity,
    "distance-to-coarse": _distance_to_coarse,
    "bbs": _bbs,
    "tester": _tester,
    "learn": _learn,
    "distance-approx": _distance_approx,
    "determinism": _determinism,
}
assert set(_RUNNERS) == set(_CASE_KEYS)
