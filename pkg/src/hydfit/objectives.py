"""Expenditure and recovery errors of a model configuration.

Both errors are dimensionless root mean squared errors over 12 trials:
time-to-exhaustion residuals are taken relative to their target, recovery
ratios are already fractions. Infeasible configurations and trials that never
exhaust score :data:`PENALTY` instead of raising, so the optimizer can treat
the whole search box uniformly.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .archipelago import Problem
from .config import FIELD_NAMES, ConfigError, ModelConfiguration, parse_key_values, validate_config
from .ground_truth import (
    AthleteParams,
    ExpenditureTargets,
    RecoveryRatioTable,
    power_for_tte,
    protocol_intensities,
)
from .hydraulic import DEFAULT_DT, DEFAULT_T_CAP, n_steps
from .moead import Bounds

PENALTY = 10.0


@dataclass(frozen=True)
class FitnessPair:
    expenditure_error: float
    recovery_error: float

    @property
    def distance(self) -> float:
        """Euclidean distance to the perfect fit ``(0, 0)``."""
        return math.hypot(self.expenditure_error, self.recovery_error)

    def as_tuple(self) -> tuple[float, float]:
        return (self.expenditure_error, self.recovery_error)


@dataclass(frozen=True)
class RecoveryTrialResult:
    tte_wb1: float
    tte_wb2: float
    simulated_ratio: float
    exhausting: bool = True


def relative_rmse(simulated, targets) -> float:
    sim = np.asarray(simulated, dtype=float)
    tgt = np.asarray(targets, dtype=float)
    return float(np.sqrt(np.mean(((sim - tgt) / tgt) ** 2)))


def rmse(simulated, targets) -> float:
    sim = np.asarray(simulated, dtype=float)
    tgt = np.asarray(targets, dtype=float)
    return float(np.sqrt(np.mean((sim - tgt) ** 2)))


def _tte(params, p, dt, cap_steps, h=0.0, g=0.0):
    n, h, g, exhausted = kernels.run_to_exhaustion(params, p, dt, cap_steps, h, g)
    return n, h, g, exhausted


class Objective:
    """Callable bi-objective problem over configuration parameter tuples.

    Intensities and step counts are derived once; evaluation itself is pure
    and safe to call concurrently.
    """

    def __init__(
        self,
        athlete: AthleteParams,
        targets: ExpenditureTargets | None = None,
        table: RecoveryRatioTable | None = None,
        dt: float = DEFAULT_DT,
        t_cap: float = DEFAULT_T_CAP,
    ):
        if not dt > 0:
            raise ValueError("dt must be positive")
        self.athlete = athlete
        self.targets = targets or ExpenditureTargets()
        self.table = table or RecoveryRatioTable.default()
        self.dt = float(dt)
        self.t_cap = float(t_cap)
        self.cap_steps = n_steps(t_cap, dt)

        self.tte_targets = np.array(self.targets.tte_targets)
        self.exp_powers = [power_for_tte(athlete, t) for t in self.targets.tte_targets]
        intensities = protocol_intensities(athlete)
        self.intensities = intensities

        # (work, recovery) -> [(steps, entry index)] sorted by duration
        groups = defaultdict(list)
        for i, e in enumerate(self.table.entries):
            groups[(e.work, e.recovery)].append((n_steps(e.duration_s, dt), i))
        self._groups = {k: sorted(v) for k, v in groups.items()}
        self._works = sorted({w for w, _ in self._groups})
        self.ratio_targets = np.array([e.ratio for e in self.table.entries])

    # -- expenditure -------------------------------------------------------
    def simulated_ttes(self, params) -> tuple[np.ndarray, np.ndarray]:
        """Simulated TTE per target and a mask of trials that exhausted."""
        ttes = np.empty(len(self.exp_powers))
        ok = np.empty(len(self.exp_powers), dtype=bool)
        for i, p in enumerate(self.exp_powers):
            n, _, _, exhausted = _tte(params, p, self.dt, self.cap_steps)
            ttes[i] = n * self.dt if exhausted else self.t_cap
            ok[i] = exhausted
        return ttes, ok

    def expenditure(self, params) -> float:
        # longest target first: it is the one most likely to never exhaust
        ttes = np.empty(len(self.exp_powers))
        for i in range(len(self.exp_powers) - 1, -1, -1):
            n, _, _, exhausted = _tte(params, self.exp_powers[i], self.dt, self.cap_steps)
            if not exhausted:
                return PENALTY
            ttes[i] = n * self.dt
        return relative_rmse(ttes, self.tte_targets)

    # -- recovery ----------------------------------------------------------
    def recovery_trials(self, params) -> list[RecoveryTrialResult]:
        """One result per table entry, in table order.

        The first work bout is shared by all trials with the same work
        intensity and recovery bouts of one intensity are simulated once,
        branching off the second work bout at each duration. Step sequences
        are identical to running every trial separately.
        """
        out: list[RecoveryTrialResult | None] = [None] * len(self.table)
        dt = self.dt
        for work in self._works:
            p_work = self.intensities[work]
            n1, h1, g1, ex1 = _tte(params, p_work, dt, self.cap_steps)
            tte1 = n1 * dt if ex1 else self.t_cap
            for (w, rec), members in self._groups.items():
                if w != work:
                    continue
                if not ex1:
                    for _, idx in members:
                        out[idx] = RecoveryTrialResult(tte1, 0.0, 0.0, exhausting=False)
                    continue
                p_rec = self.intensities[rec]
                h, g, done = h1, g1, 0
                for steps, idx in members:
                    h, g = kernels.hold(params, p_rec, dt, steps - done, h, g)
                    done = steps
                    n2, _, _, ex2 = _tte(params, p_work, dt, self.cap_steps, h, g)
                    tte2 = n2 * dt if ex2 else self.t_cap
                    out[idx] = RecoveryTrialResult(tte1, tte2, tte2 / tte1)
        return out

    def recovery(self, params) -> float:
        trials = self.recovery_trials(params)
        if not all(t.exhausting for t in trials):
            return PENALTY
        return rmse([t.simulated_ratio for t in trials], self.ratio_targets)

    # -- both --------------------------------------------------------------
    def fitness(self, c: ModelConfiguration) -> FitnessPair:
        if validate_config(c):
            return FitnessPair(PENALTY, PENALTY)
        params = c.as_tuple()
        return FitnessPair(self.expenditure(params), self.recovery(params))

    def __call__(self, genome) -> tuple[float, float]:
        return self.fitness(ModelConfiguration.from_array(genome)).as_tuple()


def expenditure_error(c, a, targets=None, dt=DEFAULT_DT, t_cap=DEFAULT_T_CAP) -> float:
    if validate_config(c):
        return PENALTY
    return Objective(a, targets, None, dt, t_cap).expenditure(c.as_tuple())


def recovery_error(c, a, table=None, dt=DEFAULT_DT, t_cap=DEFAULT_T_CAP) -> float:
    if validate_config(c):
        return PENALTY
    return Objective(a, None, table, dt, t_cap).recovery(c.as_tuple())


def evaluate_fitness(c, a, targets=None, table=None, dt=DEFAULT_DT, t_cap=DEFAULT_T_CAP) -> FitnessPair:
    return Objective(a, targets, table, dt, t_cap).fitness(c)


def simulate_recovery_trial(
    c: ModelConfiguration,
    p_work: float,
    p_rec: float,
    t_rec: float,
    dt: float = DEFAULT_DT,
    t_cap: float = DEFAULT_T_CAP,
) -> RecoveryTrialResult:
    """Work bout to exhaustion, recovery bout of ``t_rec`` seconds, second work bout.

    A first work bout that never exhausts is flagged with
    ``exhausting=False`` and a zero ratio.
    """
    problems = validate_config(c)
    if problems:
        raise ValueError("invalid configuration: " + "; ".join(problems))
    params = c.as_tuple()
    cap = n_steps(t_cap, dt)
    n1, h, g, ex1 = _tte(params, p_work, dt, cap)
    if not ex1:
        return RecoveryTrialResult(t_cap, 0.0, 0.0, exhausting=False)
    h, g = kernels.hold(params, p_rec, dt, n_steps(t_rec, dt), h, g)
    n2, _, _, ex2 = _tte(params, p_work, dt, cap, h, g)
    tte1 = n1 * dt
    tte2 = n2 * dt if ex2 else t_cap
    return RecoveryTrialResult(tte1, tte2, tte2 / tte1)


# search box in configuration order; fitted AnS values reach ~260000
DEFAULT_BOUNDS = {
    "anf_capacity": (1000.0, 500000.0),
    "ans_capacity": (1000.0, 1000000.0),
    "m_ae": (1.0, 1000.0),
    "m_ans": (1.0, 1000.0),
    "m_anf": (1.0, 1000.0),
    "phi": (0.0, 0.99),
    "theta": (0.0, 0.99),
    "gamma": (0.0, 0.99),
}


def search_bounds(overrides: dict[str, tuple[float, float]] | None = None) -> Bounds:
    box = dict(DEFAULT_BOUNDS)
    for key, (lo, hi) in (overrides or {}).items():
        if key not in box:
            raise ValueError(f"unknown bound {key!r}")
        box[key] = (float(lo), float(hi))
    return Bounds([box[n][0] for n in FIELD_NAMES], [box[n][1] for n in FIELD_NAMES])


def load_bounds(source: str | Path | None = "builtin") -> Bounds:
    """Read ``name = low, high`` lines; unlisted parameters keep their defaults."""
    if source is None or str(source) == "builtin":
        return search_bounds()
    path = Path(source)
    overrides = {}
    for key, raw in parse_key_values(path.read_text(), str(path)).items():
        parts = [s.strip() for s in raw.split(",")]
        try:
            lo, hi = (float(s) for s in parts)
        except ValueError:
            raise ConfigError(f"{path}: {key!r} needs 'low, high'") from None
        overrides[key] = (lo, hi)
    try:
        return search_bounds(overrides)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def format_bounds(bounds: Bounds) -> str:
    return "".join(f"{n} = {lo!r}, {hi!r}\n" for n, lo, hi in zip(FIELD_NAMES, bounds.lower, bounds.upper))


def hydraulic_problem(objective: Objective, bounds: Bounds | None = None) -> Problem:
    return Problem(objective, bounds if bounds is not None else search_bounds())
