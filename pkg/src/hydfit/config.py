"""Model configurations of the generalized three-component hydraulic model.

A configuration is the eight-tuple ``(anf, ans, m_ae, m_ans, m_anf, phi,
theta, gamma)``. It is serialized either as a flat ``key = value`` text file
or as an 8-element array (the optimizer genome) in the same order.
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

FIELD_NAMES = (
    "anf_capacity",
    "ans_capacity",
    "m_ae",
    "m_ans",
    "m_anf",
    "phi",
    "theta",
    "gamma",
)

# accepted on input; "m_o" is the oxygen-pipe name of the aerobic flow
_ALIASES = {
    "anf": "anf_capacity",
    "ans": "ans_capacity",
    "m_o": "m_ae",
}


class ConfigError(ValueError):
    """Raised for unparsable or infeasible configuration input."""


@dataclass(frozen=True)
class ModelConfiguration:
    anf_capacity: float
    ans_capacity: float
    m_ae: float
    m_ans: float
    m_anf: float
    phi: float
    theta: float
    gamma: float

    @property
    def m_o(self) -> float:
        return self.m_ae

    @property
    def g_max(self) -> float:
        return g_max(self)

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(float(v) for v in astuple(self))

    @classmethod
    def from_array(cls, values) -> "ModelConfiguration":
        values = [float(v) for v in values]
        if len(values) != len(FIELD_NAMES):
            raise ConfigError(f"expected 8 values, got {len(values)}")
        return cls(*values)

    def is_valid(self) -> bool:
        return not validate_config(self)


def g_max(c: ModelConfiguration) -> float:
    """Total height of the slow anaerobic tank."""
    return 1.0 - c.theta - c.gamma


def validate_config(c: ModelConfiguration) -> list[str]:
    """Return every violated invariant of ``c``; an empty list means valid."""
    violations = []
    for name in FIELD_NAMES:
        if not math.isfinite(getattr(c, name)):
            violations.append(f"{name} must be finite")
    if violations:
        return violations
    for name in ("anf_capacity", "ans_capacity"):
        if getattr(c, name) <= 0:
            violations.append(f"positive capacity: {name} must be > 0")
    for name in ("m_ae", "m_ans", "m_anf"):
        if getattr(c, name) <= 0:
            violations.append(f"positive flow: {name} must be > 0")
    for name in ("phi", "theta", "gamma"):
        v = getattr(c, name)
        if not 0.0 <= v < 1.0:
            violations.append(f"{name} must lie in [0, 1)")
    if not c.theta + c.gamma < 1.0:
        violations.append("theta + gamma < 1")
    return violations


def parse_key_values(text: str, source: str = "<string>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split(sep, 1))
        if not key or not value:
            raise ConfigError(f"{source}:{lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def config_from_mapping(mapping: dict[str, str], source: str = "<mapping>") -> ModelConfiguration:
    values: dict[str, float] = {}
    for key, raw in mapping.items():
        name = _ALIASES.get(key.lower(), key.lower())
        if name not in FIELD_NAMES:
            raise ConfigError(f"{source}: unknown configuration key {key!r}")
        if name in values:
            raise ConfigError(f"{source}: {name!r} given twice")
        try:
            values[name] = float(raw)
        except ValueError:
            raise ConfigError(f"{source}: {key!r} is not a number: {raw!r}") from None
    missing = [n for n in FIELD_NAMES if n not in values]
    if missing:
        raise ConfigError(f"{source}: missing keys {', '.join(missing)}")
    return ModelConfiguration(**values)


def load_config(path: str | Path, *, check: bool = True) -> ModelConfiguration:
    path = Path(path)
    c = config_from_mapping(parse_key_values(path.read_text(), str(path)), str(path))
    if check:
        problems = validate_config(c)
        if problems:
            raise ConfigError(f"{path}: invalid configuration: {'; '.join(problems)}")
    return c


def format_config(c: ModelConfiguration) -> str:
    lines = [f"{f.name} = {getattr(c, f.name)!r}" for f in fields(c)]
    return "\n".join(lines) + "\n"


def save_config(c: ModelConfiguration, path: str | Path) -> None:
    Path(path).write_text(format_config(c))


# reference fit for the gens=20/cycles=40/pop=64/islands=21 grid cell
REFERENCE_CONFIG = ModelConfiguration(
    anf_capacity=18217.42,
    ans_capacity=175251.33,
    m_ae=248.05,
    m_ans=85.18,
    m_anf=9.26,
    phi=0.78,
    theta=0.15,
    gamma=0.21,
)
