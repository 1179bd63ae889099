"""First-order current-controlled memristor: ``dx/dt = h(I) * g(x, I)``."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError
from .windows import CLAMP_TOL, WindowSpec, clamp_state


class ActivationKind(str, enum.Enum):
    LINEAR = "linear"
    THRESHOLD = "threshold"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class Activation:
    """Rate function h(I).

    ``linear``: ``gamma * I``.
    ``threshold``: ``sign(I) * gamma * (|I| - i_t)`` above the threshold, else 0.
    ``quadratic``: ``sign(I) * gamma * I**2``.

    All three vanish at zero current and share the sign of the current.
    """

    kind: ActivationKind = ActivationKind.LINEAR
    gamma: float = 1.0
    i_t: float = 0.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", ActivationKind(self.kind))
        except ValueError:
            raise ConfigError(f"activation.kind: unknown activation {self.kind!r}") from None
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ConfigError(f"activation.gamma: rate constant must be positive, got {self.gamma!r}")
        if not (math.isfinite(self.i_t) and self.i_t >= 0):
            raise ConfigError(f"activation.i_t: threshold must be non-negative, got {self.i_t!r}")
        if self.kind is not ActivationKind.THRESHOLD and self.i_t != 0:
            raise ConfigError("activation.i_t: only the threshold activation takes a threshold")

    def __call__(self, i):
        g = self.gamma
        if isinstance(i, (float, int)):
            if self.kind is ActivationKind.LINEAR:
                return g * i
            if self.kind is ActivationKind.QUADRATIC:
                return g * i * abs(i)
            mag = abs(i) - self.i_t
            if mag <= 0:
                return 0.0
            return g * mag if i > 0 else -g * mag
        i = np.asarray(i, dtype=float)
        if self.kind is ActivationKind.LINEAR:
            return g * i
        if self.kind is ActivationKind.QUADRATIC:
            return g * i * np.abs(i)
        return np.sign(i) * g * np.maximum(np.abs(i) - self.i_t, 0.0)

    def inverse(self, h: float) -> float:
        """Current giving rate factor `h` (the smallest one for the threshold kind)."""
        if h == 0:
            return 0.0
        s = math.copysign(1.0, h)
        mag = abs(h) / self.gamma
        if self.kind is ActivationKind.LINEAR:
            return s * mag
        if self.kind is ActivationKind.QUADRATIC:
            return s * math.sqrt(mag)
        return s * (mag + self.i_t)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "gamma": self.gamma}
        if self.kind is ActivationKind.THRESHOLD:
            d["i_t"] = self.i_t
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Activation":
        return cls(
            str(d.get("kind", "linear")).lower(),
            float(d.get("gamma", 1.0)),
            float(d.get("i_t", 0.0) or 0.0),
        )


@dataclass(frozen=True)
class MemristorModel:
    """Window plus activation, with an optional linear memristance read-out.

    `r_on` is the resistance at ``x = 1`` and `r_off` the one at ``x = 0``.
    """

    window: WindowSpec
    activation: Activation = Activation()
    r_on: Optional[float] = None
    r_off: Optional[float] = None

    def __post_init__(self):
        if (self.r_on is None) != (self.r_off is None):
            raise ConfigError("r_on/r_off: give both resistances or neither")
        if self.r_on is not None:
            if not self.r_on > 0:
                raise ConfigError(f"r_on: must be positive, got {self.r_on!r}")
            if not self.r_off > self.r_on:
                raise ConfigError(f"r_off: must exceed r_on, got {self.r_off!r}")

    def rate(self, x, i, clamp_tol: float = CLAMP_TOL):
        return state_rate(self, x, i, clamp_tol)

    def to_dict(self) -> dict:
        return {
            "window": self.window.to_dict(),
            "activation": self.activation.to_dict(),
            "r_on": self.r_on,
            "r_off": self.r_off,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MemristorModel":
        if "window" not in d:
            raise ConfigError("window: model definition has no window")
        return cls(
            WindowSpec.from_dict(d["window"]),
            Activation.from_dict(d.get("activation", {})),
            d.get("r_on"),
            d.get("r_off"),
        )


def state_rate(m: MemristorModel, x, i, clamp_tol: float = CLAMP_TOL):
    """``f(x, i) = h(i) * g(x, i)``, exactly zero at zero current."""
    if isinstance(i, (float, int)) and not isinstance(x, np.ndarray):
        if i == 0:
            clamp_state(x, clamp_tol)
            return 0.0
        return m.activation(i) * m.window.eval(x, i, clamp_tol)
    i_arr = np.asarray(i, dtype=float)
    rate = m.activation(i_arr) * m.window.eval(x, i_arr, clamp_tol)
    return np.where(i_arr == 0, 0.0, rate)


def memristance(m: MemristorModel, x):
    """Linear mixing ``r_on * x + r_off * (1 - x)``."""
    if m.r_on is None:
        raise ConfigError("r_on/r_off: memristance needs both resistances configured")
    x = clamp_state(x)
    return m.r_on * x + m.r_off * (1.0 - x)


def voltage(m: MemristorModel, x, i):
    return memristance(m, x) * i
