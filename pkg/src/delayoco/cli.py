"""Command-line entry point: ``delayoco run|compare|calibrate``."""

from __future__ import annotations

import argparse
import json
import math
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .delays import LOW_DELAY_PATTERN, DelaySchedule, parse_schedule
from .errors import DelayOCOError
from .harness import ALGORITHMS, ExperimentConfig, RegretLedger, run_experiment

DEFAULT_SCHEDULE = "periodic:" + ",".join(map(str, LOW_DELAY_PATTERN))


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--T", type=int, default=1000, help="horizon (default 1000)")
    p.add_argument("--dim", type=int, default=10, help="dimension n (default 10)")
    p.add_argument("--radius", type=float, default=1.0, help="radius R of the decision ball")
    p.add_argument("--inner-radius", type=float, default=None, help="radius r of a ball inside X (default R)")
    p.add_argument("--schedule", default=DEFAULT_SCHEDULE,
                   help="periodic:<list>, constant:<d>, unit, or a file with T delays (default %(default)s)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--L", type=float, default=None, help="Lipschitz constant (default 2R + sqrt(n))")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--delta", type=float, default=None, help="fixed exploration radius for bandit learners")
    g.add_argument("--delta-rule", choices=("lnT_over_T", "inv_T_plus_D"), default=None)
    p.add_argument("--delta-c", type=float, default=1.0, help="constant c in delta = c ln T / T")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="delayoco", description="Online strongly convex optimization with delayed feedback")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one algorithm and write its regret ledger as CSV")
    run.add_argument("--algo", required=True, choices=ALGORITHMS)
    _add_common(run)
    run.add_argument("--out", required=True, help="CSV output path")

    cmp_ = sub.add_parser("compare", help="run several algorithms on a shared seed and schedule")
    cmp_.add_argument("--algos", default="ogd_sc,dogd,dogd_sc", help="comma-separated algorithm names")
    _add_common(cmp_)
    cmp_.add_argument("--out-dir", default=".", help="directory for <algo>.csv and summary.txt")
    cmp_.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    cal = sub.add_parser("calibrate", help="compute the constant C bounding regret / (d ln T) for DOGD-SC")
    cal.add_argument("--T-list", default="250,500,1000,2000,4000")
    cal.add_argument("--dim", type=int, default=10)
    cal.add_argument("--schedule-pattern", default=",".join(map(str, LOW_DELAY_PATTERN)))
    cal.add_argument("--seeds", default="1,2,3,4,5", help="comma-separated seeds; C is the max ratio over all of them")
    cal.add_argument("--out", default=None, help="write the calibration record as JSON")
    return parser


def _delta_rule(args) -> tuple:
    if args.delta is not None:
        return ("fixed", args.delta)
    if args.delta_rule == "lnT_over_T":
        return ("lnT_over_T", args.delta_c)
    if args.delta_rule == "inv_T_plus_D":
        return ("inv_T_plus_D", None)
    return ()


def _config(args, algo: str, out: str | None) -> ExperimentConfig:
    return ExperimentConfig(
        algorithm=algo,
        schedule=parse_schedule(args.schedule, args.T),
        T=args.T,
        n=args.dim,
        R=args.radius,
        r=args.inner_radius,
        beta=args.beta,
        alpha=args.alpha,
        L=args.L,
        delta_rule=_delta_rule(args),
        seed=args.seed,
        output_path=out,
    )


def format_summary(ledgers: list[RegretLedger]) -> str:
    rows = sorted(ledgers, key=lambda lg: lg.final_loss)
    width = max(len("algorithm"), *(len(lg.algorithm) for lg in rows))
    lines = [f"{'algorithm':<{width}}  {'cum_loss':>14}  {'cum_regret':>14}"]
    lines += [f"{lg.algorithm:<{width}}  {lg.final_loss:>14.6f}  {lg.final_regret:>14.6f}" for lg in rows]
    return "\n".join(lines) + "\n"


def slope_ratios(T_list, n: int, pattern, seed: int) -> dict[int, float]:
    """DOGD-SC's final regret divided by ``d ln T`` for each horizon."""
    ratios = {}
    for T in T_list:
        schedule = DelaySchedule.periodic(pattern, T)
        ledger = run_experiment(ExperimentConfig("dogd_sc", schedule, T=T, n=n, seed=seed))
        ratios[T] = ledger.final_regret / (schedule.max_delay * math.log(T))
    return ratios


def calibrate_slope(T_list, n: int, pattern, seeds) -> dict:
    per_seed = {str(s): {str(T): v for T, v in slope_ratios(T_list, n, pattern, s).items()} for s in seeds}
    C = max(v for ratios in per_seed.values() for v in ratios.values())
    return {"C": C, "ratios": per_seed, "seeds": list(seeds), "n": n, "pattern": list(pattern)}


def _cmd_run(args) -> int:
    ledger = run_experiment(_config(args, args.algo, args.out))
    print(f"{args.algo}: cum_loss={ledger.final_loss:.6f} cum_regret={ledger.final_regret:.6f} -> {args.out}")
    return 0


def _cmd_compare(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    configs = [_config(args, a, str(out_dir / f"{a}.csv")) for a in algos]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            ledgers = list(pool.map(run_experiment, configs))
    else:
        ledgers = [run_experiment(c) for c in configs]
    summary = format_summary(ledgers)
    (out_dir / "summary.txt").write_text(summary, encoding="utf-8")
    sys.stdout.write(summary)
    return 0


def _cmd_calibrate(args, argv) -> int:
    T_list = [int(v) for v in args.T_list.split(",")]
    pattern = [int(v) for v in args.schedule_pattern.split(",")]
    seeds = [int(v) for v in args.seeds.split(",")]
    record = calibrate_slope(T_list, args.dim, pattern, seeds)
    record["command"] = "delayoco " + shlex.join(argv)
    text = json.dumps(record, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_calibrate(args, argv)
    except (DelayOCOError, OSError) as exc:
        print(f"delayoco: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
