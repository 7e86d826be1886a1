"""Discrete-time dynamics of the generalized three-component hydraulic model.

Tank levels are depletions measured from the top of the unit height:
``h`` for the fast anaerobic tank (AnF, 0 = full, 1 = empty) and ``g`` for
the slow anaerobic tank (AnS, 0 = full, ``g_max`` = empty). The aerobic tank
is infinite and only ever flows into AnF.

The functions here spell out each stage of a time step. The loops that run
many steps live in :mod:`hydfit.kernels` and perform identical arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernels
from .config import ConfigError, ModelConfiguration, g_max, validate_config

DEFAULT_DT = 0.1
DEFAULT_T_CAP = 5000.0


@dataclass(frozen=True)
class ModelState:
    h: float = 0.0
    g: float = 0.0
    t: float = 0.0


@dataclass(frozen=True)
class FlowSample:
    p_ae: float
    p_an: float


def apply_demand(s: ModelState, p: float, dt: float, c: ModelConfiguration) -> float:
    """Depletion of AnF after draining demand ``p`` for ``dt``, before inflows.

    The result may exceed 1; exhaustion is only judged after the inflows.
    """
    return s.h + p / c.anf_capacity * dt


def aerobic_flow(h_p: float, c: ModelConfiguration) -> float:
    one_m_phi = 1.0 - c.phi
    if h_p <= one_m_phi:
        return c.m_ae * h_p / one_m_phi
    return c.m_ae


def anaerobic_case(h_p: float, g: float, c: ModelConfiguration) -> str:
    """Name of the first matching flow regime between AnS and AnF.

    One of ``"ans_full"``, ``"ans_empty"``, ``"equilibrium"`` (all without
    flow), ``"outflow"``, ``"outflow_max"`` (AnS drains into AnF) or
    ``"refill"`` (AnF refills AnS).
    """
    gm = g_max(c)
    lvl = g + c.theta
    if h_p <= c.theta and g == 0.0:
        return "ans_full"
    if h_p >= 1.0 - c.gamma and g == gm:
        return "ans_empty"
    if h_p == lvl:
        return "equilibrium"
    if h_p > lvl:
        if h_p < 1.0 - c.gamma:
            return "outflow"
        assert g < gm, "AnS must be non-empty for saturated outflow"
        return "outflow_max"
    assert g > 0.0, "AnS must be non-full for refill"
    return "refill"


def matching_cases(h_p: float, g: float, c: ModelConfiguration) -> list[str]:
    """All regimes whose guard holds; overlapping regimes all carry zero flow."""
    gm = g_max(c)
    lvl = g + c.theta
    guards = {
        "ans_full": h_p <= c.theta and g == 0.0,
        "ans_empty": h_p >= 1.0 - c.gamma and g == gm,
        "equilibrium": h_p == lvl,
        "outflow": lvl < h_p < 1.0 - c.gamma,
        "outflow_max": h_p >= 1.0 - c.gamma and g < gm,
        "refill": h_p < lvl and g > 0.0,
    }
    return [name for name, hit in guards.items() if hit]


def anaerobic_flow_raw(h_p: float, g: float, c: ModelConfiguration) -> float:
    """Uncapped flow through the AnS pipe; positive drains AnS into AnF."""
    case = anaerobic_case(h_p, g, c)
    gm = g_max(c)
    lvl = g + c.theta
    if case == "outflow":
        return c.m_ans * (h_p - lvl) / gm
    if case == "outflow_max":
        return c.m_ans * (gm - g) / gm
    if case == "refill":
        # the printed denominator is 1 - gamma, not g_max
        return c.m_anf * (h_p - lvl) / (1.0 - c.gamma)
    return 0.0


def equalizing_energy(h_p: float, g: float, c: ModelConfiguration) -> float:
    """Energy transfer that would bring both tank levels exactly level."""
    return (h_p - (g + c.theta)) / (1.0 / c.ans_capacity + 1.0 / c.anf_capacity)


def _cap_energy(p_an: float, h_p: float, g: float, dt: float, c: ModelConfiguration) -> float:
    if p_an == 0.0:
        return 0.0
    gm = g_max(c)
    e = p_an * dt
    e = min(e, (gm - g) * c.ans_capacity)
    e = max(e, -g * c.ans_capacity)
    m_an = equalizing_energy(h_p, g, c)
    if e < 0.0:
        e = max(m_an, e)
    elif e > 0.0:
        e = min(m_an, e)
    return e


def cap_anaerobic_flow(p_an: float, h_p: float, g: float, dt: float, c: ModelConfiguration) -> float:
    """Limit ``p_an`` so one step can neither over-drain, over-fill nor
    overshoot the level equilibrium between AnS and AnF."""
    return _cap_energy(p_an, h_p, g, dt, c) / dt


def step_with_flows(
    s: ModelState, p: float, dt: float, c: ModelConfiguration
) -> tuple[ModelState, FlowSample, bool]:
    """One time step; also returns the flows used and the exhaustion flag."""
    h_p = apply_demand(s, p, dt, c)
    p_ae = aerobic_flow(h_p, c)
    e = _cap_energy(anaerobic_flow_raw(h_p, s.g, c), h_p, s.g, dt, c)
    # inflows from Ae and AnS reduce the depletion of AnF
    h = h_p - (p_ae * dt + e) / c.anf_capacity
    g = s.g + e / c.ans_capacity
    exhausted = h >= 1.0
    h = min(max(h, 0.0), 1.0)
    g = min(max(g, 0.0), g_max(c))
    return ModelState(h, g, s.t + dt), FlowSample(p_ae, e / dt), exhausted


def step(s: ModelState, p: float, dt: float, c: ModelConfiguration) -> ModelState:
    return step_with_flows(s, p, dt, c)[0]


def n_steps(duration: float, dt: float) -> int:
    """Number of steps of length ``dt`` needed to cover ``duration``."""
    if duration <= 0:
        return 0
    return max(1, math.ceil(duration / dt - 1e-9))


def _checked(c: ModelConfiguration) -> tuple[float, ...]:
    problems = validate_config(c)
    if problems:
        raise ConfigError("invalid configuration: " + "; ".join(problems))
    return c.as_tuple()


def simulate_to_exhaustion(
    c: ModelConfiguration,
    p: float,
    dt: float = DEFAULT_DT,
    t_cap: float = DEFAULT_T_CAP,
    state: ModelState | None = None,
) -> float:
    """Time until AnF is empty under constant demand ``p``.

    Starts from full tanks unless ``state`` is given. Returns ``t_cap`` when
    the demand is sustained for the whole budget.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    params = _checked(c)
    s = state or ModelState()
    cap = n_steps(t_cap, dt)
    n, _, _, exhausted = kernels.run_to_exhaustion(params, float(p), float(dt), cap, s.h, s.g)
    return n * dt if exhausted else t_cap


def simulate_trace(
    c: ModelConfiguration,
    p: float,
    dt: float = DEFAULT_DT,
    t_cap: float = DEFAULT_T_CAP,
) -> list[tuple[float, float, float, float, float]]:
    """Per-step ``(t, h, g, p_ae, p_an)`` rows of a constant-demand trial."""
    params = _checked(c)
    rows = kernels.trace(params, float(p), float(dt), n_steps(t_cap, dt), 0.0, 0.0)
    return [((i + 1) * dt, *row) for i, row in enumerate(rows)]
