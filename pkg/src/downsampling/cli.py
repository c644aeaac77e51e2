"""Command line entry point: ``downsampling run | gen | validate | report``.

Exit codes: 0 when every threshold is met, 1 when some threshold fails,
2 on configuration or usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from . import harness
from .harness import ConfigError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _summary_lines(report: harness.TrialReport) -> list[str]:
    sc = report.scenario
    lines = []
    for s in report.case_summary():
        verdict = "PASS" if s["passed"] else "FAIL"
        inv = f" invariant_failures={s['invariant_failures']}" if sc.require_invariant else ""
        lines.append(
            f"{verdict} {sc.name} {s['case']}: {s['successes']}/{s['trials']} "
            f"(wilson95 [{s['wilson_low']:.3f}, {s['wilson_high']:.3f}], need >= {sc.min_success}){inv}"
        )
    return lines


def _cmd_run(args) -> int:
    if args.config == "all":
        names = list(harness.shipped_configs())
        out_dir = Path(args.out or "results")
        out_dir.mkdir(parents=True, exist_ok=True)
    else:
        names = [args.config]
        out_dir = None
    scenarios = [harness.load_scenario(n) for n in names]
    ok = True
    for sc in scenarios:
        report = harness.run_scenario(sc, trials=args.trials, workers=args.workers)
        text = harness.report_to_csv(report, timing=args.timing)
        if out_dir is not None:
            (out_dir / f"{sc.name}.csv").write_text(text)
        elif args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        for line in _summary_lines(report):
            print(line, file=sys.stderr)
        ok &= report.passed
    return EXIT_OK if ok else EXIT_FAIL


def _parse_param(item: str):
    key, sep, raw = item.partition("=")
    if not sep:
        raise ConfigError(f"parameter {item!r} is not key=value")
    return key, yaml.safe_load(raw)


def _cmd_gen(args) -> int:
    from .instances import generate_instance

    spec = {"kind": args.kind}
    spec.update(dict(_parse_param(p) for p in args.param))
    try:
        text = generate_instance(spec, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_validate(args) -> int:
    from . import blockgrid, learners, testers
    from .functions import function_from_spec
    from .instances import INSTANCE_KINDS, random_instance
    from .product_dist import LabeledOracle, ProductDistribution, Target

    results = []
    sc = harness.load_scenario("c01-walsh-identities")
    report = harness.run_scenario(sc, trials=args.trials, workers=1)
    worst = max(row.value for _, _, _, row, _ in report.rows)
    results.append(("walsh identities", report.passed, f"max deviation {worst:.2e}"))

    rng = np.random.default_rng(args.seed)
    fails = []
    for kind in INSTANCE_KINDS:
        f = random_instance(kind, rng)
        g = function_from_spec(json.loads(json.dumps(f.to_spec())))
        X = rng.uniform(-2, 2, size=(500, 2 if kind != "staircase" else 1))
        if kind in ("diagonal", "monotone-table"):
            X = rng.integers(0, 4, size=(500, 2))
        if not np.array_equal(f(X), g(X)):
            fails.append(kind)
    results.append(("function round trip", not fails, ",".join(fails) or "all kinds"))

    dist = ProductDistribution.from_descriptor({"iid": {"gaussian": [0, 1]}, "d": 2})
    p = blockgrid.induce_partition(dist.sample(800, rng), 8, rng)
    q = blockgrid.partition_from_json(blockgrid.partition_to_json(p))
    X = dist.sample(2000, rng)
    results.append(("partition round trip", np.array_equal(p.block_of(X), q.block_of(X)), "plain"))

    oracle = LabeledOracle(dist, Target(function_from_spec({"kind": "halfspace", "w": [1, 1], "t": 0}), 0.1))
    h = learners.brute_force_learn(oracle, 4, 0.3, rng, grid_m=400, n_labels=2000)
    h2 = learners.hypothesis_from_json(learners.hypothesis_to_json(h))
    results.append(("hypothesis round trip", np.array_equal(h.predict(X), h2.predict(X)), "brute force"))

    v = testers.diagonal_test(lambda V: np.zeros(len(V)), 8, 2, 0.5, np.random.default_rng(args.seed))
    tr = testers.Transcript.from_lines(v.transcript.to_lines())
    replay = testers.diagonal_test(lambda V: np.zeros(len(V)), 8, 2, 0.5, tr.rng())
    results.append(("transcript replay", replay.transcript.to_lines() == v.transcript.to_lines(), "diagonal"))

    ok = True
    for name, passed, note in results:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {note}")
        ok &= bool(passed)
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_report(args) -> int:
    rows = []
    for path in args.csv:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = set(harness.CSV_COLUMNS) - set(reader.fieldnames or ())
            if missing:
                raise ConfigError(f"{path}: missing columns {sorted(missing)}")
            for rec in reader:
                rows.append((rec["config"], rec["case"], rec["success"] == "1", rec["invariant"] == "1"))
    summary = harness.summarize_rows(rows)
    print("config\tcase\ttrials\tsuccesses\tfraction\twilson_low\twilson_high\tinvariant_failures")
    for s in summary:
        print(f"{s['config']}\t{s['case']}\t{s['trials']}\t{s['successes']}\t{s['fraction']:.4f}\t"
              f"{s['wilson_low']:.4f}\t{s['wilson_high']:.4f}\t{s['invariant_failures']}")
    if args.gnuplot:
        # one block per config, separated by two blank lines (gnuplot "index")
        blocks: dict = {}
        for s in summary:
            blocks.setdefault(s["config"], []).append(s)
        with open(args.gnuplot, "w") as fh:
            for i, (config, recs) in enumerate(blocks.items()):
                if i:
                    fh.write("\n\n")
                fh.write(f"# {config}\n# index case fraction wilson_low wilson_high\n")
                for j, s in enumerate(recs):
                    fh.write(f"{j} {s['case']} {s['fraction']:.6f} {s['wilson_low']:.6f} {s['wilson_high']:.6f}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="downsampling", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario config, or 'all' shipped configs")
    run.add_argument("config", help="path, shipped config name, or 'all'")
    run.add_argument("--out", help="CSV file (single config) or directory (all)")
    run.add_argument("--trials", type=int, help="override the trial count")
    run.add_argument("--workers", type=int, help=f"worker processes (default: ${harness.WORKERS_ENV} or 1)")
    run.add_argument("--timing", action="store_true", help="append a wall_seconds column")
    run.set_defaults(func=_cmd_run)

    gen = sub.add_parser("gen", help="write a seeded random instance file")
    gen.add_argument("kind", help="instance kind, e.g. halfspace, disk, staircase")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    gen.add_argument("--out")
    gen.set_defaults(func=_cmd_gen)

    val = sub.add_parser("validate", help="Walsh identities and serialization round trips")
    val.add_argument("--trials", type=int, default=3)
    val.add_argument("--seed", type=int, default=0)
    val.set_defaults(func=_cmd_validate)

    rep = sub.add_parser("report", help="aggregate CSVs into success fractions")
    rep.add_argument("csv", nargs="+")
    rep.add_argument("--gnuplot", help="also write a gnuplot-compatible data file")
    rep.set_defaults(func=_cmd_report)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
