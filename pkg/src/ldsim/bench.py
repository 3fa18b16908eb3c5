"""Experiment harness: run/sweep/stats/topo CLI and CSV persistence.

Sweeps pair seeds across algorithms: for a given trial seed all four
schedulers consume the identical deployment and topology, so per-seed
lifetime ratios are meaningful.  Output is deterministic byte-for-byte
for a fixed (spec, base_seed).
"""

from __future__ import annotations

import argparse
import csv
import math
import statistics
import sys
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .energy import RadioParams, parse_config_file
from .errors import ConnectivityFailure, Disconnected
from .sim import LDS, MST, SCHEDULERS, SPT, WRT_STATIC, SimConfig, run_trial
from .topology import (
    DEFAULT_MAX_ATTEMPTS,
    DEFAULT_REGION,
    build_topology,
    deploy_connected,
    deploy_random,
)

CSV_HEADER = [
    "algo", "n", "r_max", "seed", "lifetime_rounds",
    "reschedules", "l_min_initial", "kappa_initial",
]

DEFAULT_N_VALUES = list(range(40, 201, 20))
DEFAULT_RMAX_VALUES = list(range(40, 101, 10))


@dataclass(frozen=True)
class SweepSpec:
    vary: str  # "n" or "r_max"
    fixed: float  # the other parameter's value
    values: tuple
    trials_per_point: int = 100
    algorithms: tuple = SCHEDULERS
    base_seed: int = 0
    region: tuple = DEFAULT_REGION
    piggyback_overhead: float = 0.10
    initial_energy: float = 0.25
    radio: RadioParams = field(default_factory=RadioParams.default)

    def __post_init__(self):
        if self.vary not in ("n", "r_max"):
            raise ValueError("vary must be 'n' or 'r_max'")
        if not self.values:
            raise ValueError("values must be non-empty")
        if self.trials_per_point < 1:
            raise ValueError("need at least one trial per point")


def trial_seed(base_seed: int, point_index: int, trial_index: int) -> int:
    """Stable per-trial seed: SeedSequence over (base, point, trial)."""
    ss = np.random.SeedSequence((base_seed, point_index, trial_index))
    return int(ss.generate_state(1)[0])


def sweep_rows(spec: SweepSpec, log=None):
    """Yield one CSV row per (point, trial, algorithm).

    Seeds whose deployments stay disconnected after the retry cap are
    skipped and reported through ``log``.
    """
    for pi, value in enumerate(spec.values):
        n = int(value) if spec.vary == "n" else int(spec.fixed)
        r_max = float(spec.fixed) if spec.vary == "n" else float(value)
        for ti in range(spec.trials_per_point):
            seed = trial_seed(spec.base_seed, pi, ti)
            try:
                dep = deploy_connected(
                    n, spec.region, "center", seed, r_max, DEFAULT_MAX_ATTEMPTS
                )
            except ConnectivityFailure:
                if log is not None:
                    log(f"skip: no connected graph for n={n} r_max={r_max} seed={seed}")
                continue
            g = build_topology(dep, r_max)
            for algo in spec.algorithms:
                cfg = SimConfig(
                    scheduler=algo,
                    piggyback_overhead=spec.piggyback_overhead,
                    radio=spec.radio,
                    initial_energy=spec.initial_energy,
                )
                res = run_trial(g, cfg, seed)
                yield {
                    "algo": algo,
                    "n": n,
                    "r_max": r_max,
                    "seed": seed,
                    "lifetime_rounds": res.lifetime_rounds,
                    "reschedules": res.reschedule_count,
                    "l_min_initial": res.l_min_initial,
                    "kappa_initial": res.kappa_initial,
                }


def write_sweep_csv(spec: SweepSpec, out, log=None):
    """Write the sweep to a file-like object in canonical row order."""
    out.write(
        f"# ldsim sweep vary={spec.vary} fixed={spec.fixed} "
        f"trials={spec.trials_per_point} base_seed={spec.base_seed} "
        f"algos={','.join(spec.algorithms)}\n"
    )
    out.write(
        "# connectivity: rejection-sampled deployments "
        f"(up to {DEFAULT_MAX_ATTEMPTS} attempts per seed); failing seeds skipped\n"
    )
    out.write(",".join(CSV_HEADER) + "\n")
    for row in sweep_rows(spec, log=log):
        out.write(
            f"{row['algo']},{row['n']},{row['r_max']:g},{row['seed']},"
            f"{row['lifetime_rounds']},{row['reschedules']},"
            f"{row['l_min_initial']!r},{row['kappa_initial']}\n"
        )


def load_rows(path):
    rows = []
    with open(path) as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        for rec in reader:
            rows.append(
                {
                    "algo": rec["algo"],
                    "n": int(rec["n"]),
                    "r_max": float(rec["r_max"]),
                    "seed": int(rec["seed"]),
                    "lifetime_rounds": int(rec["lifetime_rounds"]),
                    "reschedules": int(rec["reschedules"]),
                    "l_min_initial": float(rec["l_min_initial"]),
                    "kappa_initial": int(rec["kappa_initial"]),
                }
            )
    return rows


def summarize(rows):
    """Aggregate sweep rows: per-point stats, LDS/WRT pairing, histogram."""
    per_point = {}
    by_key = {}
    for r in rows:
        by_key.setdefault((r["algo"], r["n"], r["r_max"]), []).append(r)
    for key, group in sorted(by_key.items()):
        lifetimes = [g["lifetime_rounds"] for g in group]
        per_point[key] = {
            "count": len(lifetimes),
            "mean": statistics.fmean(lifetimes),
            "stddev": statistics.pstdev(lifetimes),
            "median": statistics.median(lifetimes),
        }

    paired = {}
    for r in rows:
        if r["algo"] in (LDS, WRT_STATIC):
            paired.setdefault((r["n"], r["r_max"], r["seed"]), {})[r["algo"]] = r
    ratios = []
    lds_vals, wrt_vals = [], []
    for pair in paired.values():
        if LDS in pair and WRT_STATIC in pair:
            l = pair[LDS]["lifetime_rounds"]
            w = pair[WRT_STATIC]["lifetime_rounds"]
            lds_vals.append(l)
            wrt_vals.append(w)
            if w > 0:
                ratios.append(l / w)
    hist = Counter(r["reschedules"] for r in rows if r["algo"] == LDS)
    return {
        "per_point": per_point,
        "paired_mean_ratio": statistics.fmean(ratios) if ratios else math.nan,
        "ratio_of_means": (
            statistics.fmean(lds_vals) / statistics.fmean(wrt_vals)
            if wrt_vals and statistics.fmean(wrt_vals) > 0
            else math.nan
        ),
        "paired_count": len(ratios),
        "reschedule_hist": dict(sorted(hist.items())),
    }


def print_summary(summary, out=None):
    out = out if out is not None else sys.stdout
    out.write(f"{'algo':<6}{'n':>6}{'r_max':>8}{'count':>7}"
              f"{'mean':>12}{'stddev':>12}{'median':>10}\n")
    for (algo, n, r_max), s in summary["per_point"].items():
        out.write(
            f"{algo:<6}{n:>6}{r_max:>8g}{s['count']:>7}"
            f"{s['mean']:>12.2f}{s['stddev']:>12.2f}{s['median']:>10.1f}\n"
        )
    out.write(
        f"\nLDS/WRT paired mean ratio: {summary['paired_mean_ratio']:.4f} "
        f"(ratio of means {summary['ratio_of_means']:.4f}, "
        f"{summary['paired_count']} pairs)\n"
    )
    if summary["reschedule_hist"]:
        out.write("LDS reschedule histogram:\n")
        for count, freq in summary["reschedule_hist"].items():
            out.write(f"  {count:>3}: {freq}\n")


class _Parser(argparse.ArgumentParser):
    # spec'd exit code: 1 for malformed invocations (argparse defaults to 2)
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _load_config(path):
    cfg = parse_config_file(path) if path else {}
    return cfg


def _sim_config(cfg_file, algo):
    return SimConfig(
        scheduler=algo,
        piggyback_overhead=float(cfg_file.get("piggyback_overhead", 0.10)),
        radio=RadioParams.from_config(cfg_file),
        initial_energy=float(cfg_file.get("initial_energy_j", 0.25)),
        charge_build_messages=cfg_file.get("charge_build_messages", "0")
        in ("1", "true", "yes", True),
    )


def _region(cfg_file):
    return (
        float(cfg_file.get("region_width", DEFAULT_REGION[0])),
        float(cfg_file.get("region_height", DEFAULT_REGION[1])),
    )


def cmd_run(args) -> int:
    cfg_file = _load_config(args.config)
    cfg = _sim_config(cfg_file, args.algo)
    region = _region(cfg_file)
    bs = cfg_file.get("bs_placement", "center")
    try:
        dep = deploy_connected(args.n, region, bs, args.seed, args.range)
        g = build_topology(dep, args.range)
        if args.trace:
            with open(args.trace, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["round", "node", "drained_j", "residual_j"])

                def hook(rnd, costs, residual):
                    for node in range(len(costs)):
                        writer.writerow(
                            [rnd, node, repr(float(costs[node])),
                             repr(float(residual[node]))]
                        )

                result = run_trial(g, cfg, args.seed, trace_hook=hook)
        else:
            result = run_trial(g, cfg, args.seed)
    except (ConnectivityFailure, Disconnected) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(result.to_json())
    return 0


def cmd_topo(args) -> int:
    cfg_file = _load_config(args.config)
    bs = cfg_file.get("bs_placement", "center")
    dep = deploy_random(args.n, _region(cfg_file), bs, args.seed)
    print(dep.to_json())
    return 0


def cmd_sweep(args) -> int:
    cfg_file = _load_config(args.config)
    if args.values:
        values = tuple(float(v) for v in args.values.split(","))
    elif args.vary == "n":
        values = tuple(DEFAULT_N_VALUES)
    else:
        values = tuple(DEFAULT_RMAX_VALUES)
    fixed = args.range if args.vary == "n" else args.n
    spec = SweepSpec(
        vary=args.vary,
        fixed=fixed,
        values=values,
        trials_per_point=args.trials,
        algorithms=tuple(args.algos.split(",")),
        base_seed=args.seed,
        region=_region(cfg_file),
        piggyback_overhead=float(cfg_file.get("piggyback_overhead", 0.10)),
        initial_energy=float(cfg_file.get("initial_energy_j", 0.25)),
        radio=RadioParams.from_config(cfg_file),
    )
    for algo in spec.algorithms:
        if algo not in SCHEDULERS:
            print(f"error: unknown algorithm {algo!r}", file=sys.stderr)
            return 1
    log = lambda msg: print(msg, file=sys.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            write_sweep_csv(spec, fh, log=log)
    else:
        write_sweep_csv(spec, sys.stdout, log=log)
    return 0


def cmd_stats(args) -> int:
    rows = load_rows(args.csv)
    if not rows:
        print("error: no data rows", file=sys.stderr)
        return 1
    print_summary(summarize(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ldsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a single trial, JSON to stdout")
    run_p.add_argument("--n", type=int, default=100)
    run_p.add_argument("--range", type=float, default=80.0)
    run_p.add_argument("--algo", choices=SCHEDULERS, default=LDS)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--config", default=None)
    run_p.add_argument("--trace", default=None,
                       help="write per-round drain CSV to this path")
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="batch experiment, CSV output")
    sweep_p.add_argument("--vary", choices=("n", "r_max"), default="n")
    sweep_p.add_argument("--values", default=None,
                         help="comma-separated values for the varied parameter")
    sweep_p.add_argument("--n", type=int, default=100,
                         help="fixed n when varying r_max")
    sweep_p.add_argument("--range", type=float, default=80.0,
                         help="fixed r_max when varying n")
    sweep_p.add_argument("--trials", type=int, default=100)
    sweep_p.add_argument("--algos", default=",".join(SCHEDULERS))
    sweep_p.add_argument("--seed", type=int, default=0, help="base seed")
    sweep_p.add_argument("--out", default=None)
    sweep_p.add_argument("--config", default=None)
    sweep_p.set_defaults(func=cmd_sweep)

    stats_p = sub.add_parser("stats", help="summarize a sweep CSV")
    stats_p.add_argument("csv")
    stats_p.set_defaults(func=cmd_stats)

    topo_p = sub.add_parser("topo", help="emit a deployment as JSON")
    topo_p.add_argument("--n", type=int, default=100)
    topo_p.add_argument("--seed", type=int, default=0)
    topo_p.add_argument("--config", default=None)
    topo_p.set_defaults(func=cmd_topo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
