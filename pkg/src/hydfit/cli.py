"""Command-line interface: ``hydfit simulate|fit|report|grid``.

Exit codes: 0 success, 1 input error, 2 runtime failure. Diagnostics go to
stderr; outputs are plain comma-separated text with a one-line header.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .archipelago import (
    GRID_CYCLES,
    GRID_GENS,
    GRID_ISLANDS,
    GRID_POP,
    ArchipelagoParams,
    GridRow,
    grid_search,
    default_grid,
    run_until_converged,
)
from .config import FIELD_NAMES, ConfigError, ModelConfiguration, format_config, load_config
from .ground_truth import (
    REFERENCE_RECOVERY,
    AthleteParams,
    GroundTruthError,
    RecoveryRatioTable,
    load_athlete,
    load_recovery_table,
    power_for_tte,
    protocol_intensities,
)
from .hydraulic import DEFAULT_DT, DEFAULT_T_CAP, simulate_to_exhaustion, simulate_trace
from .moead import Bounds
from .objectives import Objective, format_bounds, hydraulic_problem, load_bounds

log = logging.getLogger("hydfit")

INPUT_ERRORS = (ConfigError, GroundTruthError, FileNotFoundError, IsADirectoryError, ValueError)

SUMMARY_HEADER = ["gens", "cycles", "pop", "islands", "min", "average", "max", *FIELD_NAMES]


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("values must be positive integers")
    return values


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


@dataclass(frozen=True)
class RunManifest:
    athlete: AthleteParams
    athlete_source: str
    table: RecoveryRatioTable
    table_source: str
    bounds: Bounds
    bounds_source: str
    params: ArchipelagoParams
    dt: float
    t_cap: float
    out: Path

    def describe(self) -> str:
        p = self.params
        lines = [
            f"athlete = {self.athlete_source}",
            f"cp_watts = {self.athlete.cp!r}",
            f"w_prime_joules = {self.athlete.w_prime!r}",
            f"recovery_table = {self.table_source}",
            f"bounds = {self.bounds_source}",
            f"dt = {self.dt!r}",
            f"t_cap = {self.t_cap!r}",
            f"seed = {p.seed}",
            f"gens = {p.gens_per_cycle}",
            f"cycles = {p.max_cycles}",
            f"pop = {p.pop_size}",
            f"islands = {p.n_islands}",
            f"stagnation_cycles = {p.stagnation_cycles}",
        ]
        return "\n".join(lines) + "\n"


def _load_manifest(args, gens: int, cycles: int, pop: int, islands: int) -> RunManifest:
    athlete = load_athlete(args.athlete)
    table = load_recovery_table(args.recovery_table)
    bounds = load_bounds(args.bounds)
    params = ArchipelagoParams(
        n_islands=islands,
        pop_size=pop,
        gens_per_cycle=gens,
        max_cycles=cycles,
        stagnation_cycles=args.stagnation_cycles,
        seed=args.seed,
    )
    return RunManifest(
        athlete, str(args.athlete), table, str(args.recovery_table), bounds, str(args.bounds),
        params, args.dt, args.t_cap, Path(args.out),
    )


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fmt(x: float) -> str:
    return repr(float(x))


# -- simulate ---------------------------------------------------------------

def _resolve_power(text: str, athlete_path: str | None) -> float:
    tag = text.upper()
    if tag in ("P4", "P8", "CP33", "CP66"):
        if not athlete_path:
            raise InputError(f"--power {text} needs --athlete")
        return protocol_intensities(load_athlete(athlete_path))[tag]
    try:
        p = float(text)
    except ValueError:
        raise InputError(f"--power must be watts or one of P4, P8, CP33, CP66, got {text!r}") from None
    if p < 0:
        raise InputError("--power must be non-negative")
    return p


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    power = _resolve_power(args.power, args.athlete)
    tte = simulate_to_exhaustion(config, power, args.dt, args.t_cap)
    sustainable = tte >= args.t_cap
    if sustainable:
        print(f"power_w={power!r} sustainable (no exhaustion within t_cap={args.t_cap!r} s)")
    else:
        print(f"power_w={power!r} tte_s={tte!r}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        rows = simulate_trace(config, power, args.dt, args.t_cap)
        _write_csv(out / "trace.csv", ["t", "h", "g", "p_ae", "p_an"], ([_fmt(v) for v in r] for r in rows))
    return 0


# -- fit --------------------------------------------------------------------

def write_run(result, out: Path) -> None:
    best = result.best_individual
    (out / "best_config.txt").write_text(format_config(ModelConfiguration.from_array(best.genome)))
    _write_csv(
        out / "history.csv",
        ["cycle", "best_distance", "running_best"],
        (
            [c, _fmt(d), _fmt(min(h[1] for h in result.history[:i + 1]))]
            for i, (c, d) in enumerate(result.history)
        ),
    )
    _write_csv(
        out / "fronts.csv",
        ["island", "expenditure_error", "recovery_error", "distance", *FIELD_NAMES],
        (
            [i, _fmt(ind.fitness[0]), _fmt(ind.fitness[1]), _fmt(ind.distance), *map(_fmt, ind.genome)]
            for i, front in enumerate(result.fronts)
            for ind in sorted(front, key=lambda ind: (ind.fitness, ind.genome))
        ),
    )
    (out / "result.txt").write_text(
        f"best_distance = {best.distance!r}\n"
        f"expenditure_error = {best.fitness[0]!r}\n"
        f"recovery_error = {best.fitness[1]!r}\n"
        f"cycles_executed = {result.cycles_executed}\n"
        f"evaluations = {result.evaluations}\n"
    )


def cmd_fit(args) -> int:
    m = _load_manifest(args, args.gens, args.cycles, args.pop, args.islands)
    objective = Objective(m.athlete, table=m.table, dt=m.dt, t_cap=m.t_cap)
    m.out.mkdir(parents=True, exist_ok=True)
    (m.out / "manifest.txt").write_text(m.describe())
    (m.out / "bounds.txt").write_text(format_bounds(m.bounds))
    result = run_until_converged(
        m.params,
        hydraulic_problem(objective, m.bounds),
        on_cycle=lambda c, d: log.info("cycle %d: best distance %.5f", c, d),
    )
    write_run(result, m.out)
    print(f"best_distance={result.best_distance!r} cycles={result.cycles_executed}")
    return 0


# -- report -----------------------------------------------------------------

def expenditure_rows(config: ModelConfiguration, objective: Objective, sweep_points: int):
    athlete = objective.athlete
    params = config.as_tuple()
    ttes, ok = objective.simulated_ttes(params)
    rows = []
    for t, p, sim, exhausted in zip(objective.targets.tte_targets, objective.exp_powers, ttes, ok):
        rows.append(["target", _fmt(p), _fmt(t), _fmt(sim) if exhausted else ""])
    lo = power_for_tte(athlete, objective.targets.tte_targets[-1])
    hi = power_for_tte(athlete, objective.targets.tte_targets[0])
    for p in np.linspace(lo, hi, sweep_points):
        sim = simulate_to_exhaustion(config, p, objective.dt, objective.t_cap)
        rows.append([
            "sweep", _fmt(p), _fmt(athlete.w_prime / (p - athlete.cp)),
            _fmt(sim) if sim < objective.t_cap else "",
        ])
    return rows


def recovery_rows(config: ModelConfiguration, objective: Objective):
    trials = objective.recovery_trials(config.as_tuple())
    durations = sorted({e.duration_s for e in objective.table.entries})
    rows = []
    for e, tr in zip(objective.table.entries, trials):
        ref = REFERENCE_RECOVERY.get(e.work)
        mean = std = ""
        if ref and e.duration_s in durations and durations.index(e.duration_s) < len(ref):
            mean, std = (f"{v:g}" for v in ref[durations.index(e.duration_s)])
        rows.append([
            e.work, e.recovery, f"{e.duration_s:g}", f"{e.ratio * 100:g}",
            _fmt(tr.simulated_ratio * 100) if tr.exhausting else "",
            mean, std, _fmt(tr.tte_wb1), _fmt(tr.tte_wb2),
        ])
    return rows


def cmd_report(args) -> int:
    config = load_config(args.config)
    athlete = load_athlete(args.athlete)
    table = load_recovery_table(args.recovery_table)
    objective = Objective(athlete, table=table, dt=args.dt, t_cap=args.t_cap)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "expenditure.csv",
        ["kind", "power_w", "target_tte_s", "simulated_tte_s"],
        expenditure_rows(config, objective, args.sweep_points),
    )
    _write_csv(
        out / "recovery.csv",
        ["work", "recovery", "duration_s", "target_percent", "simulated_percent",
         "reference_mean_percent", "reference_std_percent", "tte_wb1_s", "tte_wb2_s"],
        recovery_rows(config, objective),
    )
    fit = objective.fitness(config)
    print(
        f"expenditure_error={fit.expenditure_error!r} recovery_error={fit.recovery_error!r} "
        f"distance={fit.distance!r}"
    )
    return 0


# -- grid -------------------------------------------------------------------

def summary_row(row: GridRow) -> list[str]:
    c = row.cell
    return [
        str(c.gens), str(c.cycles), str(c.pop), str(c.islands),
        f"{row.minimum:.4f}", f"{row.mean:.4f}", f"{row.maximum:.4f}",
        *(_fmt(v) for v in row.best.genome),
    ]


def cmd_grid(args) -> int:
    m = _load_manifest(args, args.gens[0], args.cycles[0], args.pop[0], args.islands[0])
    cells = default_grid(args.gens, args.cycles, args.pop, args.islands)
    objective = Objective(m.athlete, table=m.table, dt=m.dt, t_cap=m.t_cap)
    m.out.mkdir(parents=True, exist_ok=True)
    (m.out / "manifest.txt").write_text(
        m.describe()
        + f"grid_gens = {','.join(map(str, args.gens))}\n"
        + f"grid_cycles = {','.join(map(str, args.cycles))}\n"
        + f"grid_pop = {','.join(map(str, args.pop))}\n"
        + f"grid_islands = {','.join(map(str, args.islands))}\n"
        + f"repeats = {args.repeats}\n"
    )
    path = m.out / "grid.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        fh.flush()

        def flush(row: GridRow) -> None:
            writer.writerow(summary_row(row))
            fh.flush()
            log.info("cell %s: min %.4f mean %.4f max %.4f", row.cell, row.minimum, row.mean, row.maximum)

        grid_search(cells, args.repeats, hydraulic_problem(objective, m.bounds), m.params, on_row=flush)
    print(f"wrote {len(cells)} rows to {path}")
    return 0


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hydfit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, athlete_required=True):
        p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
        p.add_argument("--dt", type=_positive, default=DEFAULT_DT, help="time step in seconds")
        p.add_argument("--t-cap", type=_positive, default=DEFAULT_T_CAP, help="simulation budget in seconds")
        p.add_argument("--athlete", required=athlete_required, help="key-value file with cp_watts, w_prime_joules")

    def fitting(p):
        p.add_argument("--recovery-table", default="builtin", help="recovery ratio csv or 'builtin'")
        p.add_argument("--bounds", default="builtin", help="search bounds file or 'builtin'")
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--stagnation-cycles", type=int, default=10)
        p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("simulate", help="time to exhaustion of one configuration")
    p.add_argument("--config", required=True, help="configuration key-value file")
    p.add_argument("--power", required=True, help="watts, or P4/P8/CP33/CP66 with --athlete")
    p.add_argument("--out", help="directory for trace.csv")
    common(p, athlete_required=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit a configuration with island-model MOEA/D")
    common(p)
    fitting(p)
    p.add_argument("--gens", type=int, default=10, help="generations per cycle")
    p.add_argument("--cycles", type=int, default=10, help="maximum number of cycles")
    p.add_argument("--pop", type=int, default=32, help="population per island")
    p.add_argument("--islands", type=int, default=7)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="figure data for a fitted configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--recovery-table", default="builtin")
    p.add_argument("--out", required=True)
    p.add_argument("--sweep-points", type=int, default=50)
    common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("grid", help="grid search over archipelago settings")
    common(p)
    fitting(p)
    p.add_argument("--gens", type=_int_list, default=list(GRID_GENS))
    p.add_argument("--cycles", type=_int_list, default=list(GRID_CYCLES))
    p.add_argument("--pop", type=_int_list, default=list(GRID_POP))
    p.add_argument("--islands", type=_int_list, default=list(GRID_ISLANDS))
    p.add_argument("--repeats", type=int, default=10)
    p.set_defaults(func=cmd_grid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (InputError, *INPUT_ERRORS) as exc:
        print(f"hydfit: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        log.exception("runtime failure")
        print(f"hydfit: failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
