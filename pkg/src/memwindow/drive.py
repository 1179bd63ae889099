"""Driving current waveforms.

A :class:`PulseTrain` is the rectangular alternating-polarity sequence: a
positive pulse of height ``i_plus`` lasting ``tau_plus``, a negative pulse of
height ``i_minus`` lasting ``tau_minus``, zero current in between, repeating
with period ``period``.  :class:`Sinusoid` and :class:`Triangle` are the
continuous comparison inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigError, NotPiecewiseConstant


class Layout(str, enum.Enum):
    PLUS_THEN_MINUS = "plus_then_minus"
    MINUS_THEN_PLUS = "minus_then_plus"


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ConfigError(f"{name}: must be a positive number, got {value!r}")


@dataclass(frozen=True)
class PulseTrain:
    i_plus: float
    tau_plus: float
    i_minus: float
    tau_minus: float
    period: float
    layout: Layout = Layout.PLUS_THEN_MINUS

    def __post_init__(self):
        _positive("i_plus", self.i_plus)
        _positive("tau_plus", self.tau_plus)
        _positive("tau_minus", self.tau_minus)
        _positive("period", self.period)
        if not (isinstance(self.i_minus, (int, float)) and math.isfinite(self.i_minus) and self.i_minus < 0):
            raise ConfigError(f"i_minus: must be a negative number, got {self.i_minus!r}")
        if self.tau_plus + self.tau_minus > self.period * (1 + 1e-12):
            raise ConfigError(
                f"tau_plus: pulses ({self.tau_plus} + {self.tau_minus}) do not fit in period {self.period}"
            )
        try:
            object.__setattr__(self, "layout", Layout(self.layout))
        except ValueError:
            raise ConfigError(f"layout: unknown pulse layout {self.layout!r}") from None

    @property
    def tau0(self) -> float:
        """Total zero-current time per period."""
        return max(self.period - self.tau_plus - self.tau_minus, 0.0)

    def segments(self) -> tuple:
        # Second pulse starts at T/2, pushed later only if the first pulse is
        # longer than T/2 and earlier only if it would not fit before T.
        T = self.period
        if self.layout is Layout.PLUS_THEN_MINUS:
            (d1, c1), (d2, c2) = (self.tau_plus, self.i_plus), (self.tau_minus, self.i_minus)
        else:
            (d1, c1), (d2, c2) = (self.tau_minus, self.i_minus), (self.tau_plus, self.i_plus)
        start2 = min(max(0.5 * T, d1), T - d2)
        parts = ((d1, c1), (start2 - d1, 0.0), (d2, c2), (T - start2 - d2, 0.0))
        return tuple((float(d), float(c)) for d, c in parts if d > 1e-12 * T)

    def sample(self, t):
        segs = self.segments()
        ends = np.cumsum([d for d, _ in segs])
        ends[-1] = self.period
        currents = np.array([c for _, c in segs])
        phase = np.mod(t, self.period)
        idx = np.minimum(np.searchsorted(ends, phase, side="right"), len(segs) - 1)
        out = currents[idx]
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        return {
            "kind": "rect",
            "i_plus": self.i_plus,
            "tau_plus": self.tau_plus,
            "i_minus": self.i_minus,
            "tau_minus": self.tau_minus,
            "period": self.period,
            "layout": self.layout.value,
        }


@dataclass(frozen=True)
class Sinusoid:
    i0: float
    period: float

    def __post_init__(self):
        _positive("i0", self.i0)
        _positive("period", self.period)

    def sample(self, t):
        if isinstance(t, (int, float)):
            return self.i0 * math.sin(2.0 * math.pi * t / self.period)
        return self.i0 * np.sin(2.0 * np.pi * np.asarray(t, dtype=float) / self.period)

    def segments(self):
        raise NotPiecewiseConstant("sinusoidal drive is not piecewise constant")

    def to_dict(self) -> dict:
        return {"kind": "sin", "i0": self.i0, "period": self.period}


@dataclass(frozen=True)
class Triangle:
    """Odd triangle wave: 0 at t = 0, +i0 at T/4, -i0 at 3T/4."""

    i0: float
    period: float

    def __post_init__(self):
        _positive("i0", self.i0)
        _positive("period", self.period)

    def sample(self, t):
        if isinstance(t, (int, float)):
            u = (t / self.period) % 1.0
            if u < 0.25:
                return self.i0 * 4.0 * u
            if u < 0.75:
                return self.i0 * (2.0 - 4.0 * u)
            return self.i0 * (4.0 * u - 4.0)
        u = np.mod(np.asarray(t, dtype=float) / self.period, 1.0)
        return self.i0 * np.where(u < 0.25, 4.0 * u, np.where(u < 0.75, 2.0 - 4.0 * u, 4.0 * u - 4.0))

    def segments(self):
        raise NotPiecewiseConstant("triangular drive is not piecewise constant")

    def to_dict(self) -> dict:
        return {"kind": "tri", "i0": self.i0, "period": self.period}


Waveform = Union[PulseTrain, Sinusoid, Triangle]


def sample(w: Waveform, t):
    return w.sample(t)


def segments(w: Waveform) -> tuple:
    """Exact piecewise-constant decomposition ``((duration, current), ...)`` of one period."""
    return w.segments()


def is_piecewise_constant(w: Waveform) -> bool:
    return isinstance(w, PulseTrain)


def drive_from_dict(d: dict) -> Waveform:
    kind = str(d.get("kind", "")).lower()
    try:
        if kind == "rect":
            return PulseTrain(
                d["i_plus"], d["tau_plus"], d["i_minus"], d["tau_minus"], d["period"],
                d.get("layout", Layout.PLUS_THEN_MINUS.value),
            )
        if kind in ("sin", "tri"):
            cls = Sinusoid if kind == "sin" else Triangle
            return cls(d["i0"], d["period"])
    except KeyError as exc:
        raise ConfigError(f"{exc.args[0]}: missing from {kind} drive definition") from None
    raise ConfigError(f"kind: unknown drive kind {d.get('kind')!r}")
