import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydfit import kernels
from hydfit.config import ConfigError, ModelConfiguration, REFERENCE_CONFIG, g_max
from hydfit.hydraulic import (
    ModelState,
    aerobic_flow,
    anaerobic_case,
    anaerobic_flow_raw,
    apply_demand,
    cap_anaerobic_flow,
    equalizing_energy,
    matching_cases,
    simulate_to_exhaustion,
    simulate_trace,
    step,
    step_with_flows,
)

from conftest import random_config

C = REFERENCE_CONFIG


# -- single equations ---------------------------------------------------------

def test_apply_demand_examples():
    assert apply_demand(ModelState(0.0, 0.0), 100.0, 1.0, C) == pytest.approx(0.0054893, rel=1e-4)
    assert apply_demand(ModelState(0.3, 0.0), 0.0, 1.0, C) == 0.3
    c = dataclasses.replace(C, anf_capacity=10000.0)
    assert apply_demand(ModelState(0.5, 0.0), 500.0, 0.1, c) == pytest.approx(0.505)


def test_aerobic_flow_examples():
    assert aerobic_flow(0.0, C) == 0.0
    assert aerobic_flow(0.11, C) == pytest.approx(124.025)
    assert aerobic_flow(0.9, C) == 248.05


@given(st.floats(0.0, 5.0))
def test_aerobic_flow_bounded(h_p):
    assert 0.0 <= aerobic_flow(h_p, C) <= C.m_ae


def test_anaerobic_flow_examples():
    assert anaerobic_flow_raw(0.05, 0.0, C) == 0.0
    assert anaerobic_case(0.05, 0.0, C) == "ans_full"
    assert anaerobic_flow_raw(0.35, 0.2, C) == 0.0
    assert anaerobic_case(0.35, 0.2, C) == "equilibrium"
    assert anaerobic_flow_raw(0.55, 0.2, C) == pytest.approx(26.61875)
    # refill divides by 1 - gamma
    assert anaerobic_flow_raw(0.2, 0.2, C) == pytest.approx(-1.7582278, rel=1e-6)


def test_anaerobic_saturated_and_empty():
    gm = g_max(C)
    assert anaerobic_flow_raw(0.95, 0.3, C) == pytest.approx(C.m_ans * (gm - 0.3) / gm)
    assert anaerobic_flow_raw(0.95, gm, C) == 0.0
    assert anaerobic_case(0.95, gm, C) == "ans_empty"


fractions = st.floats(0.0, 1.5, allow_nan=False)


@given(h_p=fractions, g_frac=st.floats(0.0, 1.0))
def test_case_analysis_is_total_and_consistent(h_p, g_frac):
    g = g_frac * g_max(C)
    hits = matching_cases(h_p, g, C)
    assert hits, "no regime matched"
    assert anaerobic_case(h_p, g, C) == hits[0]
    # only zero-flow regimes may overlap
    if len(hits) > 1:
        assert set(hits) <= {"ans_full", "ans_empty", "equilibrium"}
    p = anaerobic_flow_raw(h_p, g, C)
    lvl = g + C.theta
    if p > 0:
        assert h_p > lvl
    if p < 0:
        assert h_p < lvl and g > 0
    assert -C.m_anf <= p <= C.m_ans


def test_equilibrium_fixpoint_is_exact():
    for g in np.linspace(0.0, g_max(C), 11):
        h_p = g + C.theta
        assert anaerobic_flow_raw(h_p, g, C) == 0.0
        assert cap_anaerobic_flow(0.0, h_p, g, 1.0, C) == 0.0


# -- caps ---------------------------------------------------------------------

def test_cap_to_remaining_ans():
    c = dataclasses.replace(C, ans_capacity=100.0)
    g = g_max(c) - 0.3  # (g_max - g) * AnS = 30
    assert cap_anaerobic_flow(50.0, 0.99, g, 1.0, c) == pytest.approx(30.0)


def test_cap_to_refill_room():
    c = dataclasses.replace(C, ans_capacity=100.0)
    assert cap_anaerobic_flow(-40.0, 0.0, 0.25, 1.0, c) == pytest.approx(-25.0)


def test_cap_equilibrium_zero():
    assert cap_anaerobic_flow(12.0, 0.35, 0.2, 1.0, C) == 0.0


def test_cap_overshoot():
    c = dataclasses.replace(C, anf_capacity=100.0, ans_capacity=100.0)
    # levels 0.1 apart, equalizing transfer is 0.1 / (2 / 100) = 5
    assert cap_anaerobic_flow(80.0, 0.45, 0.2, 1.0, c) == pytest.approx(5.0)
    assert cap_anaerobic_flow(-80.0, 0.25, 0.2, 1.0, c) == pytest.approx(-5.0)


# -- step -----------------------------------------------------------------------

def test_step_at_rest_is_identity():
    s = step(ModelState(), 0.0, 1.0, C)
    assert (s.h, s.g) == (0.0, 0.0)
    assert s.t == 1.0


def test_step_hand_computed():
    s, flows, exhausted = step_with_flows(ModelState(), 100.0, 1.0, C)
    assert flows.p_an == 0.0
    assert flows.p_ae == pytest.approx(6.1892, rel=1e-4)
    assert s.h == pytest.approx(0.0051496, rel=1e-4)
    assert s.g == 0.0
    assert not exhausted


def test_reference_step_matches_kernel():
    rng = np.random.default_rng(7)
    for _ in range(2000):
        c = random_config(rng)
        h, g = rng.uniform(0, 1), rng.uniform(0, g_max(c))
        p, dt = rng.uniform(0, 2000), rng.uniform(1e-3, 10)
        ref, flows, ex = step_with_flows(ModelState(h, g), p, dt, c)
        kh, kg, kae, kan, kex = kernels.step(c.as_tuple(), h, g, p, dt)
        assert kh == pytest.approx(ref.h, rel=1e-9, abs=1e-12)
        assert kg == pytest.approx(ref.g, rel=1e-9, abs=1e-12)
        assert kae == pytest.approx(flows.p_ae, rel=1e-12)
        assert kan == pytest.approx(flows.p_an, rel=1e-9, abs=1e-9)


def _check_step_bounds(c, h, g, p, dt):
    gm = g_max(c)
    nh, ng, p_ae, p_an, _ = kernels.step(c.as_tuple(), h, g, p, dt)
    assert 0.0 <= nh <= 1.0
    assert 0.0 <= ng <= gm
    assert 0.0 <= p_ae <= c.m_ae
    e = p_an * dt
    scale = c.ans_capacity * gm
    tol = 1e-9 * max(scale, abs(e), 1.0)
    assert -g * c.ans_capacity - tol <= e <= (gm - g) * c.ans_capacity + tol
    h_p = h + p / c.anf_capacity * dt
    assert abs(e) <= abs(equalizing_energy(h_p, g, c)) * (1 + 1e-9) + 1e-12
    return nh, ng


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_state_and_flow_bounds_property(seed):
    rng = np.random.default_rng(seed)
    c = random_config(rng)
    h, g = 0.0, 0.0
    for _ in range(50):
        h, g = _check_step_bounds(c, h, g, rng.uniform(0, 2000), rng.uniform(1e-6, 10))


# -- simulate_to_exhaustion -----------------------------------------------------

def test_sustainable_demand_returns_cap():
    assert simulate_to_exhaustion(C, 50.0, 0.1, 500.0) == 500.0
    assert simulate_to_exhaustion(C, 0.0, 0.1, 500.0) == 500.0


def test_pure_drain_tank_with_tiny_flows():
    c = ModelConfiguration(10000.0, 1000.0, 1e-9, 1e-9, 1e-9, 0.0, 0.0, 0.0)
    # AnF / p = 20 s, within one step (summed drain falls just short of 1)
    assert simulate_to_exhaustion(c, 500.0, 0.1) == pytest.approx(20.0, abs=0.1 + 1e-9)
    c2 = dataclasses.replace(c, anf_capacity=1000.0)
    assert simulate_to_exhaustion(c2, 500.0, 0.1) == pytest.approx(2.0, abs=0.1 + 1e-9)


@pytest.mark.parametrize("p", [300.0, 350.0, 400.0, 600.0])
def test_doubling_power_never_increases_tte(p):
    assert simulate_to_exhaustion(C, 2 * p) <= simulate_to_exhaustion(C, p)


def test_invalid_config_rejected():
    with pytest.raises(ConfigError):
        simulate_to_exhaustion(dataclasses.replace(C, theta=0.6, gamma=0.5), 300.0)


def test_start_state_respected():
    tired = ModelState(h=0.9, g=0.3)
    assert simulate_to_exhaustion(C, 400.0, state=tired) < simulate_to_exhaustion(C, 400.0)
    assert simulate_to_exhaustion(C, 400.0, state=ModelState(h=1.0)) == 0.0


def test_step_size_convergence():
    for p in (280.0, 330.0, 400.0):
        fine = simulate_to_exhaustion(C, p, 0.01, 20000.0)
        coarse = simulate_to_exhaustion(C, p, 0.1, 20000.0)
        assert abs(coarse - fine) <= 0.005 * fine + 0.1


def test_trace_rows():
    rows = simulate_trace(C, 400.0, 0.1)
    tte = simulate_to_exhaustion(C, 400.0, 0.1)
    assert rows[-1][0] == pytest.approx(tte)
    assert rows[-1][1] == 1.0
    assert all(0 <= r[1] <= 1 for r in rows)
    assert rows[0][0] == pytest.approx(0.1)


def test_monotone_tte_over_power_sweep():
    ps = np.linspace(300, 800, 26)
    ttes = [simulate_to_exhaustion(C, p) for p in ps]
    assert all(b <= a for a, b in zip(ttes, ttes[1:]))
    assert math.isfinite(ttes[-1])
