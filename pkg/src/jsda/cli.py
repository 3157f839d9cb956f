"""Command-line front door.

Subcommands: scenario (make/sample/discretize), verify-bounds,
counterexamples, label-shift, train, ablate. Exit codes: 0 when every
verdict in the invoked suite holds, 1 on runtime errors, 2 on usage errors.
All randomness flows through --seed, so equal flags give byte-identical
reports.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import fields as dataclass_fields

from . import cases, suites
from .labelshift import estimate_scenario_weights
from .scenarios import ShiftScenario, discretize, make_scenario, sample
from .training import TrainConfig, ablate, run_training


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.6g}"
    return str(v)


def _json_ready(v):
    if isinstance(v, bool) or not isinstance(v, float):
        return v
    if math.isinf(v) or math.isnan(v):
        return _fmt(v)
    return float(f"{v:.6g}")


def write_report(rows: list[dict], fmt: str, path: str | None,
                 columns: list[str] | None = None) -> None:
    """Emit rows as CSV or JSON with a stable column order and 6 significant digits."""
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(row.get(c, "")) for c in columns) for row in rows]
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        text = json.dumps([{c: _json_ready(row.get(c)) for c in columns}
                           for row in rows], indent=2) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def _cmd_counterexamples(args) -> int:
    reports = [cases.counterexample1(args.xi, tol_override=args.tol),
               cases.counterexample2(tol_override=args.tol)]
    rows = [r for rep in reports for r in rep.rows()]
    write_report(rows, args.format, args.out,
                 columns=["case", "quantity", "computed", "expected",
                          "tolerance", "ok"])
    if args.base is not None:
        for dv in cases.case_divergence_values(args.base):
            print(json.dumps(dv.to_json_dict()))
    for rep in reports:
        print(f"# {rep.case_id}: {'PASS' if rep.verdict else 'FAIL'}")
    return 0 if all(rep.verdict for rep in reports) else 1


def _cmd_verify_bounds(args) -> int:
    names = suites.SUITE_NAMES if args.suite == "all" else (args.suite,)
    all_rows = []
    bad = 0
    for name in names:
        reports = suites.run_suite(name, args.trials, args.seed)
        bad += len(suites.violations(reports))
        all_rows.extend(r.to_row() for r in reports)
    write_report(all_rows, args.format, args.out,
                 columns=["name", "lhs", "bound_lo", "bound_hi", "holds"])
    print(f"# {len(all_rows)} reports, {bad} violation(s)")
    return 0 if bad == 0 else 1


def _cmd_label_shift(args) -> int:
    sc = ShiftScenario.load(args.scenario)
    result = estimate_scenario_weights(sc, args.n, seed=args.seed)
    rows = [{"class": i,
             "true_alpha": float(result["true_alpha"][i]),
             "estimated_alpha": float(result["estimated_alpha"][i])}
            for i in range(sc.n_classes)]
    write_report(rows, args.format, args.out,
                 columns=["class", "true_alpha", "estimated_alpha"])
    print(f"# sup error {_fmt(result['sup_error'])}, "
          f"source accuracy {_fmt(result['source_accuracy'])}, "
          f"method {result['method']}")
    return 0


def _cmd_scenario(args) -> int:
    if args.action == "make":
        if not args.out:
            raise ValueError("scenario make requires --out <file>")
        params = json.loads(args.params) if args.params else {}
        params.setdefault("seed", args.seed)
        sc = make_scenario(args.kind, **params)
        sc.save(args.out)
        print(f"# wrote scenario {args.kind} -> {args.out}")
        return 0
    if not args.scenario:
        raise ValueError(f"scenario {args.action} requires --scenario <file>")
    sc = ShiftScenario.load(args.scenario)
    if args.action == "sample":
        batch = sample(sc, args.domain, args.n, stream=(args.seed,))
        rows = [{"x0": float(x[0]), "x1": float(x[1]), "y": int(y)}
                for x, y in zip(batch.xs, batch.ys)]
        write_report(rows, args.format, args.out, columns=["x0", "x1", "y"])
        return 0
    if args.action == "discretize":
        joint = discretize(sc, args.domain, grid=args.grid)
        text = joint.to_json() + "\n"
        if args.out:
            with open(args.out, "w") as f:
                f.write(text)
        else:
            sys.stdout.write(text)
        return 0
    raise ValueError(f"unknown scenario action {args.action!r}")


def _load_config(path: str | None, seed: int) -> TrainConfig:
    raw = {}
    if path:
        with open(path) as f:
            raw = json.load(f)
    if "principles" in raw:
        raw["principles"] = frozenset(raw["principles"])
    raw.setdefault("seed", seed)
    known = {f.name for f in dataclass_fields(TrainConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config fields {sorted(unknown)}")
    return TrainConfig(**raw)


def _cmd_train(args) -> int:
    sc = ShiftScenario.load(args.scenario)
    cfg = _load_config(args.config, args.seed)
    trace = run_training(sc, cfg)
    write_report(trace.rows(), args.format, args.out)
    print(f"# final target accuracy {_fmt(trace.target_accuracy[-1])}")
    return 0


def _cmd_ablate(args) -> int:
    sc = ShiftScenario.load(args.scenario)
    cfg = _load_config(args.config, args.seed)
    rows = ablate(sc, cfg, seeds=list(range(args.seeds)))
    write_report(rows, args.format, args.out,
                 columns=["principles", "mean_accuracy", "std_accuracy", "n_seeds"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jsda",
        description="Divergence-based shift analysis: exact bounds, synthetic "
                    "scenarios, label-shift correction, adaptation training.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default="csv"):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["csv", "json"], default=fmt_default)

    p = sub.add_parser("counterexamples",
                       help="run the pinned divergence-ordering regressions")
    common(p)
    p.add_argument("--xi", type=float, default=1.0 / 12.0)
    p.add_argument("--tol", type=float, default=None,
                   help="override every pinned tolerance")
    p.add_argument("--base", choices=["e", "2"], default=None)
    p.set_defaults(func=_cmd_counterexamples)

    p = sub.add_parser("verify-bounds", help="run randomized bound suites")
    common(p)
    p.add_argument("--suite", default="all",
                   choices=("all",) + suites.SUITE_NAMES)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=_cmd_verify_bounds)

    p = sub.add_parser("label-shift", help="weight recovery on a scenario file")
    common(p)
    p.add_argument("--scenario", required=True)
    p.add_argument("--n", type=int, default=10000)
    p.set_defaults(func=_cmd_label_shift)

    p = sub.add_parser("scenario", help="make, sample, or discretize scenarios")
    common(p)
    p.add_argument("action", choices=["make", "sample", "discretize"])
    p.add_argument("--kind", default="label-shift")
    p.add_argument("--params", default=None, help="JSON dict of generator params")
    p.add_argument("--scenario", default=None)
    p.add_argument("--domain", choices=["source", "target"], default="source")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--grid", type=int, default=32)
    p.set_defaults(func=_cmd_scenario)

    p = sub.add_parser("train", help="run the three-principle trainer")
    common(p)
    p.add_argument("--scenario", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("ablate", help="principle-subset ablation table")
    common(p)
    p.add_argument("--scenario", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--seeds", type=int, default=5)
    p.set_defaults(func=_cmd_ablate)
    return parser


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
