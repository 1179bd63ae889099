"""Window functions and their structural classification.

Two window families are built in:

* Joglekar, ``g(x) = 1 - (2x - 1)**(2p)``, symmetric and current independent;
* Biolek, ``g(x, I) = 1 - (x - H(-I))**(2p)``, which only vanishes at the
  boundary the current is driving towards.

Any window can be sorted into one of two classes.  Class 1 windows (Biolek and
alike) always produce a single stable fixed point under alternating pulses;
class 2 windows (current independent, positive in the interior, Joglekar and
alike) never do.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from numbers import Integral, Real
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, DomainError

#: States this far outside [0, 1] are clamped silently; beyond it they raise.
CLAMP_TOL = 1e-12


def check_exponent(p) -> int:
    if isinstance(p, bool) or not isinstance(p, (Integral, Real)):
        raise ConfigError(f"p: window exponent must be a positive integer, got {p!r}")
    if isinstance(p, Real) and not isinstance(p, Integral):
        if not float(p).is_integer():
            raise ConfigError(f"p: window exponent must be a positive integer, got {p!r}")
    p = int(p)
    if p < 1:
        raise ConfigError(f"p: window exponent must be >= 1, got {p}")
    return p


def clamp_state(x, clamp_tol: float = CLAMP_TOL):
    """Clip `x` into [0, 1], raising :class:`DomainError` for real violations."""
    if isinstance(x, (float, int)):
        if x < -clamp_tol or x > 1.0 + clamp_tol or x != x:
            raise DomainError(f"x: state {x!r} outside [0, 1]")
        return 0.0 if x < 0.0 else (1.0 if x > 1.0 else float(x))
    arr = np.asarray(x, dtype=float)
    if np.any(~((arr >= -clamp_tol) & (arr <= 1.0 + clamp_tol))):
        bad = arr[~((arr >= -clamp_tol) & (arr <= 1.0 + clamp_tol))].flat[0]
        raise DomainError(f"x: state {bad!r} outside [0, 1]")
    return np.clip(arr, 0.0, 1.0)


def eval_joglekar(x, p: int, clamp_tol: float = CLAMP_TOL):
    x = clamp_state(x, clamp_tol)
    return 1.0 - (2.0 * x - 1.0) ** (2 * p)


def eval_biolek(x, i, p: int, clamp_tol: float = CLAMP_TOL):
    """Biolek window ``1 - (x - H(-i))**(2p)``.

    The step function is taken with ``H(0) = 1`` on the reflected argument so
    that zero current selects the positive-current branch, ``1 - x**(2p)``.
    The value at ``i = 0`` never reaches the dynamics because the state rate
    is forced to zero there.
    """
    x = clamp_state(x, clamp_tol)
    if isinstance(i, (float, int)) and not isinstance(x, np.ndarray):
        shift = 1.0 if i < 0 else 0.0
        return 1.0 - (x - shift) ** (2 * p)
    shift = np.where(np.asarray(i) < 0, 1.0, 0.0)
    return 1.0 - (x - shift) ** (2 * p)


class WindowKind(str, enum.Enum):
    JOGLEKAR = "joglekar"
    BIOLEK = "biolek"
    CUSTOM = "custom"


@dataclass(frozen=True)
class WindowSpec:
    """A window function g(x, I).

    Parameters
    ----------
    kind : WindowKind
        Built-in family or ``CUSTOM``.
    p : int
        Positive integer exponent; ignored for custom windows.
    custom_eval : callable, optional
        ``custom_eval(x, i) -> value`` for custom windows.  It may be scalar
        only; grids are then evaluated point by point.
    name : str
        Label used in reports.
    """

    kind: WindowKind
    p: int = 1
    custom_eval: Optional[Callable] = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", WindowKind(self.kind))
        object.__setattr__(self, "p", check_exponent(self.p))
        if self.kind is WindowKind.CUSTOM and self.custom_eval is None:
            raise ConfigError("window: custom window needs an evaluator")
        if not self.name:
            label = self.kind.value if self.kind is WindowKind.CUSTOM else f"{self.kind.value}(p={self.p})"
            object.__setattr__(self, "name", label)

    @classmethod
    def joglekar(cls, p: int = 1) -> "WindowSpec":
        return cls(WindowKind.JOGLEKAR, p)

    @classmethod
    def biolek(cls, p: int = 1) -> "WindowSpec":
        return cls(WindowKind.BIOLEK, p)

    @classmethod
    def custom(cls, fn: Callable, name: str = "custom") -> "WindowSpec":
        return cls(WindowKind.CUSTOM, 1, fn, name)

    def eval(self, x, i, clamp_tol: float = CLAMP_TOL):
        if self.kind is WindowKind.JOGLEKAR:
            return eval_joglekar(x, self.p, clamp_tol)
        if self.kind is WindowKind.BIOLEK:
            return eval_biolek(x, i, self.p, clamp_tol)
        x = clamp_state(x, clamp_tol)
        if isinstance(x, np.ndarray):
            try:
                out = np.asarray(self.custom_eval(x, i), dtype=float)
                if out.shape == x.shape:
                    return out
            except (TypeError, ValueError):
                pass
            return np.array([float(self.custom_eval(float(xx), i)) for xx in x.flat]).reshape(x.shape)
        return float(self.custom_eval(x, i))

    __call__ = eval

    def to_dict(self) -> dict:
        if self.kind is WindowKind.CUSTOM:
            raise ConfigError("window: custom windows cannot be serialised")
        return {"kind": self.kind.value, "p": self.p}

    @classmethod
    def from_dict(cls, d: dict) -> "WindowSpec":
        try:
            kind = WindowKind(str(d["kind"]).lower())
        except (KeyError, ValueError):
            raise ConfigError(f"window.kind: expected 'joglekar' or 'biolek', got {d.get('kind')!r}") from None
        if kind is WindowKind.CUSTOM:
            raise ConfigError("window.kind: custom windows are only available from Python")
        return cls(kind, d.get("p", 1))


class WindowClassKind(str, enum.Enum):
    CLASS1 = "class1"
    CLASS2 = "class2"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class WindowClass:
    cls: WindowClassKind
    evidence: tuple

    def passed(self, name: str) -> bool:
        return dict(self.evidence)[name]

    def to_dict(self) -> dict:
        return {"class": self.cls.value, "evidence": [[name, ok] for name, ok in self.evidence]}


_CLASS1_CONDITIONS = (
    "continuous",
    "nonincreasing_positive_current",
    "boundaries_positive_current",
    "nondecreasing_negative_current",
    "boundaries_negative_current",
)
_CLASS2_CONDITIONS = ("continuous", "current_independent", "positive_interior")


def _max_step(g: np.ndarray) -> float:
    return float(np.max(np.abs(np.diff(g))))


def classify_window(w: WindowSpec, grid_n: int = 1001, tol: float = 1e-9) -> WindowClass:
    """Check the class 1 and class 2 conditions on a uniform grid.

    Continuity is judged by refinement: on a grid four times finer the largest
    jump between neighbours must at least halve, which a genuine jump never
    does.  Monotonicity uses first differences with slack `tol`.
    """
    if grid_n < 3:
        raise ConfigError(f"grid_n: need at least 3 points, got {grid_n}")
    x = np.linspace(0.0, 1.0, grid_n)
    x_fine = np.linspace(0.0, 1.0, 4 * (grid_n - 1) + 1)
    g_pos = np.asarray(w.eval(x, 1.0), dtype=float)
    g_neg = np.asarray(w.eval(x, -1.0), dtype=float)

    continuous = True
    for cur in (1.0, -1.0):
        coarse = _max_step(np.asarray(w.eval(x, cur), dtype=float))
        fine = _max_step(np.asarray(w.eval(x_fine, cur), dtype=float))
        continuous &= fine <= 0.5 * coarse + tol

    d_pos = np.diff(g_pos)
    d_neg = np.diff(g_neg)
    independent = all(
        np.max(np.abs(np.asarray(w.eval(x, cur), dtype=float) - g_pos)) <= tol
        for cur in (-1.0, 1e-3, -1e-3, 1e3, -1e3)
    )
    evidence = {
        "continuous": bool(continuous),
        "nonincreasing_positive_current": bool(np.all(d_pos <= tol)),
        "boundaries_positive_current": bool(abs(g_pos[0] - 1.0) <= tol and abs(g_pos[-1]) <= tol),
        "nondecreasing_negative_current": bool(np.all(d_neg >= -tol)),
        "boundaries_negative_current": bool(abs(g_neg[0]) <= tol and abs(g_neg[-1] - 1.0) <= tol),
        "current_independent": bool(independent),
        "positive_interior": bool(np.all(g_pos[1:-1] > 0.0)),
    }
    if all(evidence[c] for c in _CLASS1_CONDITIONS):
        kind = WindowClassKind.CLASS1
    elif all(evidence[c] for c in _CLASS2_CONDITIONS):
        kind = WindowClassKind.CLASS2
    else:
        kind = WindowClassKind.UNCLASSIFIED
    return WindowClass(kind, tuple(evidence.items()))
