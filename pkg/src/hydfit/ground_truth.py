"""Critical power reference model and recovery-ratio targets."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from .config import ConfigError, parse_key_values

DEFAULT_TTE_TARGETS = (120.0, 130.0, 140.0, 150.0, 170.0, 190.0, 210.0, 250.0, 310.0, 400.0, 600.0, 1200.0)

WORK_TAGS = ("P4", "P8")
RECOVERY_TAGS = ("CP33", "CP66")
RECOVERY_DURATIONS = (120.0, 240.0, 360.0)

# percent, rows in WORK_TAGS x RECOVERY_TAGS order, columns per RECOVERY_DURATIONS
_DEFAULT_RATIOS_PERCENT = {
    ("P4", "CP33"): (55.0, 61.0, 70.5),
    ("P4", "CP66"): (49.0, 55.0, 58.0),
    ("P8", "CP33"): (42.0, 52.0, 59.5),
    ("P8", "CP66"): (38.0, 37.5, 50.0),
}

# published means and standard deviations (percent) per work intensity at
# 2, 4 and 6 minutes of recovery
REFERENCE_RECOVERY = {
    "P4": ((51.8, 2.8), (57.7, 4.3), (64.0, 5.8)),
    "P8": ((40.1, 3.9), (44.8, 3.0), (54.8, 3.8)),
}

TABLE_HEADER = ("work", "recovery", "duration_s", "ratio_percent")


class GroundTruthError(ValueError):
    pass


@dataclass(frozen=True)
class AthleteParams:
    cp: float
    w_prime: float

    def __post_init__(self):
        if not (self.cp > 0 and self.w_prime > 0):
            raise GroundTruthError("cp and w_prime must both be positive")


# example profile; CP sits where fitted aerobic flows converge, W' is a
# plausible companion value
EXAMPLE_ATHLETE = AthleteParams(cp=248.0, w_prime=18200.0)


def power_for_tte(a: AthleteParams, t: float) -> float:
    """Constant power that exhausts the athlete after ``t`` seconds."""
    if not t > 0:
        raise GroundTruthError("time to exhaustion must be positive")
    return a.cp + a.w_prime / t


def tte_for_power(a: AthleteParams, p: float) -> float:
    if not p > a.cp:
        raise GroundTruthError(f"sustainable intensity, no finite TTE (p={p} <= cp={a.cp})")
    return a.w_prime / (p - a.cp)


def protocol_intensities(a: AthleteParams) -> dict[str, float]:
    return {
        "P4": power_for_tte(a, 240.0),
        "P8": power_for_tte(a, 480.0),
        "CP33": 0.33 * a.cp,
        "CP66": 0.66 * a.cp,
    }


@dataclass(frozen=True)
class ExpenditureTargets:
    tte_targets: tuple[float, ...] = DEFAULT_TTE_TARGETS

    def __post_init__(self):
        ts = tuple(float(t) for t in self.tte_targets)
        if not ts:
            raise GroundTruthError("at least one target is required")
        if any(t <= 0 for t in ts):
            raise GroundTruthError("targets must be positive")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise GroundTruthError("targets must be strictly increasing")
        object.__setattr__(self, "tte_targets", ts)

    def __len__(self):
        return len(self.tte_targets)


@dataclass(frozen=True)
class RecoveryEntry:
    work: str
    recovery: str
    duration_s: float
    ratio: float


@dataclass(frozen=True)
class RecoveryRatioTable:
    entries: tuple[RecoveryEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.work not in WORK_TAGS or e.recovery not in RECOVERY_TAGS:
                raise GroundTruthError(f"unknown intensity tags {e.work}/{e.recovery}")
            if not e.duration_s > 0:
                raise GroundTruthError("recovery duration must be positive")
            if not 0.0 < e.ratio <= 1.0:
                raise GroundTruthError(f"ratio {e.ratio} outside (0, 1]")
            key = (e.work, e.recovery, e.duration_s)
            if key in seen:
                raise GroundTruthError(f"duplicate entry {key}")
            seen.add(key)

    def __len__(self):
        return len(self.entries)

    def ratio(self, work: str, recovery: str, duration_s: float) -> float:
        for e in self.entries:
            if (e.work, e.recovery, e.duration_s) == (work, recovery, float(duration_s)):
                return e.ratio
        raise KeyError((work, recovery, duration_s))

    @classmethod
    def default(cls) -> "RecoveryRatioTable":
        entries = []
        for (work, rec), ratios in _DEFAULT_RATIOS_PERCENT.items():
            for dur, pct in zip(RECOVERY_DURATIONS, ratios):
                entries.append(RecoveryEntry(work, rec, dur, pct / 100.0))
        return cls(tuple(entries))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_HEADER)
        for e in self.entries:
            w.writerow([e.work, e.recovery, f"{e.duration_s:g}", f"{e.ratio * 100.0:g}"])
        return buf.getvalue()


def parse_recovery_table(text: str, source: str = "<string>") -> RecoveryRatioTable:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows or tuple(c.strip() for c in rows[0]) != TABLE_HEADER:
        raise GroundTruthError(f"{source}: header must be {','.join(TABLE_HEADER)}")
    entries = []
    for lineno, row in enumerate(rows[1:], 2):
        if len(row) != 4:
            raise GroundTruthError(f"{source}:{lineno}: expected 4 columns")
        work, rec, dur, pct = (c.strip() for c in row)
        try:
            dur_s, ratio_pct = float(dur), float(pct)
        except ValueError:
            raise GroundTruthError(f"{source}:{lineno}: non-numeric value") from None
        if not 0.0 < ratio_pct <= 100.0:
            raise GroundTruthError(f"{source}:{lineno}: ratio {ratio_pct}% outside (0, 100]")
        entries.append(RecoveryEntry(work, rec, dur_s, ratio_pct / 100.0))
    try:
        return RecoveryRatioTable(tuple(entries))
    except GroundTruthError as exc:
        raise GroundTruthError(f"{source}: {exc}") from None


def load_recovery_table(source: str | Path | None = "builtin") -> RecoveryRatioTable:
    if source is None or str(source) == "builtin":
        return RecoveryRatioTable.default()
    path = Path(source)
    return parse_recovery_table(path.read_text(), str(path))


def load_athlete(path: str | Path) -> AthleteParams:
    path = Path(path)
    try:
        kv = parse_key_values(path.read_text(), str(path))
    except ConfigError as exc:
        raise GroundTruthError(str(exc)) from None
    unknown = set(kv) - {"cp_watts", "w_prime_joules"}
    if unknown:
        raise GroundTruthError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        return AthleteParams(cp=float(kv["cp_watts"]), w_prime=float(kv["w_prime_joules"]))
    except KeyError as exc:
        raise GroundTruthError(f"{path}: missing key {exc.args[0]}") from None
    except ValueError:
        raise GroundTruthError(f"{path}: values must be numbers") from None


def format_athlete(a: AthleteParams) -> str:
    return f"cp_watts = {a.cp!r}\nw_prime_joules = {a.w_prime!r}\n"
