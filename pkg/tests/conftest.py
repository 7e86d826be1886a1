import numpy as np
import pytest

from hydfit.config import ModelConfiguration, REFERENCE_CONFIG
from hydfit.ground_truth import EXAMPLE_ATHLETE

# fitted under the example athlete (seed 0, 10/10/32/7 archipelago)
FITTED = ModelConfiguration(
    anf_capacity=24762.682220415627,
    ans_capacity=18848.415434142775,
    m_ae=254.38069125460447,
    m_ans=57.77131273221161,
    m_anf=31.525055906593682,
    phi=0.05959248662994386,
    theta=0.05916891244418978,
    gamma=0.02471416248815134,
)


def random_config(rng: np.random.Generator) -> ModelConfiguration:
    """Valid configuration spanning extreme magnitudes."""
    theta = rng.uniform(0.0, 0.98)
    gamma = rng.uniform(0.0, 0.999 - theta)
    return ModelConfiguration(
        anf_capacity=10 ** rng.uniform(1, 6),
        ans_capacity=10 ** rng.uniform(1, 6),
        m_ae=10 ** rng.uniform(-1, 3.5),
        m_ans=10 ** rng.uniform(-1, 3.5),
        m_anf=10 ** rng.uniform(-1, 3.5),
        phi=rng.uniform(0.0, 0.99),
        theta=theta,
        gamma=gamma,
    )


def perturbed_config(base: ModelConfiguration, rng: np.random.Generator, spread: float = 0.3) -> ModelConfiguration:
    """Random valid configuration in the neighbourhood of ``base``."""
    while True:
        v = base.as_array()
        v[:5] *= rng.uniform(1 - spread, 1 + spread, 5)
        v[5:] = np.clip(v[5:] + rng.uniform(-0.1, 0.1, 3), 0.0, 0.95)
        c = ModelConfiguration.from_array(v)
        if c.is_valid():
            return c


@pytest.fixture
def reference_config():
    return REFERENCE_CONFIG


@pytest.fixture
def athlete():
    return EXAMPLE_ATHLETE


@pytest.fixture
def fitted():
    return FITTED


# acceptance verdicts, echoed after the test session
ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE[criterion])
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
