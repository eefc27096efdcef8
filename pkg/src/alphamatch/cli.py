"""Command-line front end: generate, run, sweep, report.

Exit codes: 0 on success, 2 on any domain or argument error; domain errors are
printed to stderr as ``error[<category>]: message``.  All randomness flows from
``--seed``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import AlphamatchError
from .assignment import solve_assignment, solve_assignment_value
from .generator import GeneratorSpec, Regime, TruncationSpec, generate_instance
from .io import load_instance, save_instance, save_matching
from .mechanisms import MechanismConfig, run_crsd, run_crv, run_da, run_ttc
from .metrics import compute_metrics, metrics_csv_row
from .model import QuotaMode, RankValueFunction, validate_instance
from .plots import build_report
from .sweep import (
    DEFAULT_ALPHAS,
    MECHANISMS,
    SweepSpec,
    aggregate,
    format_aggregates,
    read_csv,
    run_sweep,
    write_csv,
)


def _parse_rank_value(text: str, num_locations: int) -> RankValueFunction | None:
    if text == "inverse":
        return None
    if text.startswith("file:"):
        values = json.loads(Path(text[5:]).read_text())
        return RankValueFunction(tuple(float(v) for v in values))
    raise ValueError(f"--rank-value must be 'inverse' or 'file:<path>', got {text!r}")


def _quota_mode(text: str) -> QuotaMode:
    return QuotaMode.EXACT if text == "exact" else QuotaMode.UPPER_BOUND


def cmd_gen(args) -> int:
    spec = GeneratorSpec(
        regime=Regime.from_string(args.regime),
        seed=args.seed,
        truncation=TruncationSpec() if args.truncate else None,
        quota_mode=_quota_mode(args.quota_mode),
    )
    inst = generate_instance(spec)
    save_instance(inst, args.out)
    report = validate_instance(inst)
    complete = "complete" if inst.has_complete_preferences else "incomplete"
    status = "ok" if report.ok else "; ".join(report.violations)
    print(
        f"wrote {args.out}: {inst.num_families} families, {inst.num_locations} "
        f"locations, quota_mode={inst.quota_mode.value}, preferences={complete}, "
        f"validation={status}"
    )
    return 0 if report.ok else 2


def cmd_run(args) -> int:
    inst = load_instance(args.instance)
    rank_value = _parse_rank_value(args.rank_value, inst.num_locations)
    cfg = MechanismConfig(alpha=args.alpha, rank_value=rank_value, seed=args.seed)
    if args.mech == "crsd":
        mu = run_crsd(inst, cfg)
    elif args.mech == "crv":
        mu = run_crv(inst, cfg)
    elif args.mech == "ttc":
        mu = run_ttc(inst)
    elif args.mech == "da":
        mu = run_da(inst)
    elif args.mech == "gov-opt":
        mu = solve_assignment(inst).matching
    else:
        raise ValueError(f"unknown mechanism {args.mech!r}")

    z_star = solve_assignment_value(inst)
    report = compute_metrics(inst, mu)
    print(",".join(metrics_csv_row(args.mech, args.alpha, args.seed, 0, report, z_star)))
    if args.out:
        save_matching(inst, mu, args.out)
    return 0


def cmd_sweep(args) -> int:
    mechanisms = tuple(m.strip() for m in args.mech.split(",") if m.strip())
    alphas = tuple(float(a) for a in args.alphas.split(","))
    spec = SweepSpec(
        mechanisms=mechanisms,
        alphas=alphas,
        replications=args.reps,
        base_seed=args.seed,
        regime=Regime.from_string(args.regime),
        truncation=args.truncate,
        rank_value=_parse_rank_value(args.rank_value, 0),
    )
    result = run_sweep(spec)
    write_csv(result, args.out)
    print(f"wrote {args.out}: {len(result.rows)} rows")
    print(format_aggregates(aggregate(result.rows)))
    return 0


def cmd_report(args) -> int:
    rows, _ = read_csv(args.csv)
    written = build_report(rows, args.out)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alphamatch",
        description="Matching mechanisms trading family welfare against a "
        "guaranteed share of the optimal employment objective.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic instance file")
    gen.add_argument("--regime", choices=["positive", "negative"], default="positive")
    gen.add_argument("--truncate", action="store_true", help="incomplete preference lists")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--quota-mode", choices=["exact", "upper"], default="exact")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    run = sub.add_parser("run", help="run one mechanism on an instance file")
    run.add_argument("--instance", required=True)
    run.add_argument("--mech", choices=list(MECHANISMS), required=True)
    run.add_argument("--alpha", type=float, default=1.0)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--rank-value", default="inverse")
    run.add_argument("--out", help="write the matching JSON here")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="replicated mechanism x alpha grid")
    sweep.add_argument("--regime", choices=["positive", "negative"], default="positive")
    sweep.add_argument("--truncate", action="store_true")
    sweep.add_argument("--mech", default=",".join(MECHANISMS), help="comma-separated subset")
    sweep.add_argument("--alphas", default=",".join(str(a) for a in DEFAULT_ALPHAS))
    sweep.add_argument("--reps", type=int, default=20)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--rank-value", default="inverse")
    sweep.add_argument("--out", required=True, help="CSV output path")
    sweep.set_defaults(func=cmd_sweep)

    report = sub.add_parser("report", help="render SVG charts from a sweep CSV")
    report.add_argument("--csv", required=True)
    report.add_argument("--out", default="report", help="output directory")
    report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AlphamatchError as e:
        print(f"error[{e.category}]: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error[invalid-argument]: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
