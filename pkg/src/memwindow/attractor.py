"""Averaged dynamics: fixed points, their stability, potentials and sweeps.

Under periodic driving with small change per period, the period average of
the state obeys ``d xbar/dt = F(xbar)`` with

    F(x) = (1/T) * integral over one period of f(x, I(t)) dt,

which for a rectangular pulse train is ``(f(x, I+) tau+ + f(x, I-) tau-) / T``.
Zeros of F with ``F'(x) < 0`` are the fixed-point attractors, and they are the
minima of the potential ``U(x) = -T * integral F dx``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .device import MemristorModel, state_rate
from .drive import PulseTrain, Waveform
from .errors import BracketError, ConfigError, DomainError
from .windows import WindowKind

SCAN_CELLS = 1024
QUAD_PANELS = 256
FD_STEP = 1e-6
NEUTRAL_RTOL = 1e-12

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(4)
_GL5_NODES, _GL5_WEIGHTS = np.polynomial.legendre.leggauss(5)


def _period_quadrature(period: float, panels: int = QUAD_PANELS):
    """Composite 4-point Gauss-Legendre nodes and weights on [0, period]."""
    edges = np.linspace(0.0, period, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def _drive_charges(m: MemristorModel, w: Waveform):
    """(currents, weights) such that sum(weight * f(x, current)) = T * F(x)."""
    if isinstance(w, PulseTrain):
        segs = [(d, c) for d, c in w.segments() if c != 0.0]
        return np.array([c for _, c in segs]), np.array([d for d, _ in segs])
    nodes, weights = _period_quadrature(w.period)
    return np.asarray(w.sample(nodes), dtype=float), weights


@dataclass(frozen=True)
class PulseStrengths:
    """Per-period kicks ``a_plus = h(I+) tau+ > 0`` and ``a_minus = h(I-) tau- < 0``."""

    a_plus: float
    a_minus: float

    def __post_init__(self):
        if not self.a_plus > 0:
            raise ConfigError(f"a_plus: positive pulses must be active (h(I+) tau+ > 0), got {self.a_plus!r}")
        if not self.a_minus < 0:
            raise ConfigError(f"a_minus: negative pulses must be active (h(I-) tau- < 0), got {self.a_minus!r}")

    @property
    def alpha(self) -> float:
        return self.a_plus / self.a_minus

    @property
    def balanced(self) -> bool:
        return abs(self.a_plus + self.a_minus) <= NEUTRAL_RTOL * max(self.a_plus, -self.a_minus)


def _raw_strengths(m: MemristorModel, w: Waveform):
    currents, weights = _drive_charges(m, w)
    h = np.asarray(m.activation(currents), dtype=float) * weights
    return float(np.sum(h[currents > 0])), float(np.sum(h[currents < 0]))


def pulse_strengths(m: MemristorModel, w: Waveform) -> PulseStrengths:
    """Integrated activation over the positive and negative parts of one period."""
    return PulseStrengths(*_raw_strengths(m, w))


def averaged_rhs_fn(m: MemristorModel, w: Waveform) -> Callable:
    """Vectorised ``x -> F(x)`` for the given model and drive."""
    currents, weights = _drive_charges(m, w)
    keep = currents != 0.0
    currents, weights = currents[keep], weights[keep]
    T = w.period
    broadcast = m.window.kind is not WindowKind.CUSTOM

    def rhs(x):
        scalar = np.ndim(x) == 0
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        if broadcast:
            # Row-wise sum, not matmul: F(x) must not depend on how many x are evaluated together.
            out = np.sum(state_rate(m, xa[:, None], currents[None, :]) * weights[None, :], axis=1)
        else:
            out = np.zeros_like(xa)
            for c, wt in zip(currents, weights):
                out += wt * state_rate(m, xa, np.full_like(xa, c))
        out = out / T
        return float(out[0]) if scalar else out

    return rhs


def averaged_rhs(m: MemristorModel, w: Waveform, x):
    """Right-hand side of the period-averaged evolution at state(s) `x`."""
    return averaged_rhs_fn(m, w)(x)


# --- fixed points -----------------------------------------------------------


class FixedPointKind(str, enum.Enum):
    STABLE = "stable"
    NEUTRAL = "neutral"
    NONE = "none"


@dataclass(frozen=True)
class FixedPointReport:
    """Outcome of :func:`find_fixed_point`.

    `stability_value` is ``F'(x_a)``, the stability sum divided by the
    period, so negative means attracting.  `residual` is ``T * |F(x_a)|``.
    `roots` lists every interior zero found as ``(x, F'(x))`` pairs.
    """

    x_a: Optional[float]
    kind: FixedPointKind
    stability_value: Optional[float]
    residual: float
    roots: tuple = ()

    def to_dict(self) -> dict:
        return {
            "x_a": self.x_a,
            "kind": self.kind.value,
            "stability_value": self.stability_value,
            "residual": self.residual,
        }


def bisect(fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0:
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _derivative(fn, x: float, step: float = FD_STEP) -> float:
    lo, hi = max(x - step, 0.0), min(x + step, 1.0)
    return (fn(hi) - fn(lo)) / (hi - lo)


def find_fixed_point(m: MemristorModel, w: Waveform, tol: float = 1e-12,
                     cells: int = SCAN_CELLS) -> FixedPointReport:
    """Locate and classify the fixed points of the averaged dynamics.

    F is scanned on `cells` uniform cells of [0, 1]; every sign change is
    refined by bisection.  Zeros at the boundary states themselves are not
    reported.  If F vanishes on the whole grid (relative to the pulse
    strengths) the drive is in neutral equilibrium.
    """
    s = pulse_strengths(m, w)
    F = averaged_rhs_fn(m, w)
    T = w.period
    x = np.linspace(0.0, 1.0, cells + 1)
    vals = F(x)

    scale = max(s.a_plus, -s.a_minus) / T
    if float(np.max(np.abs(vals))) < NEUTRAL_RTOL * scale:
        return FixedPointReport(None, FixedPointKind.NEUTRAL, None, float(np.max(np.abs(vals))) * T)

    roots = []
    for k in range(cells):
        if vals[k] == 0.0 and 0 < k:
            roots.append(float(x[k]))
        elif vals[k] * vals[k + 1] < 0:
            roots.append(bisect(F, float(x[k]), float(x[k + 1]), tol))
    roots = [r for r in roots if 0.0 < r < 1.0]
    described = tuple((r, _derivative(F, r)) for r in roots)

    for r, slope in described:
        if slope < 0:
            return FixedPointReport(r, FixedPointKind.STABLE, slope, abs(F(r)) * T, described)
    return FixedPointReport(None, FixedPointKind.NONE, None, 0.0, described)


# --- Biolek specialisations --------------------------------------------------


def biolek_xa_closed_form(alpha: float) -> float:
    """Attractor of the p = 1 Biolek memristor for ``alpha = a_plus / a_minus < 0``.

    Evaluated as ``-alpha / (1 + sqrt(alpha**2 + alpha + 1))``, algebraically
    equal to ``(1 - sqrt(alpha**2 + alpha + 1)) / (alpha + 1)`` but free of the
    0/0 at ``alpha = -1``.
    """
    if not alpha < 0:
        raise DomainError(f"alpha: ratio must be negative, got {alpha!r}")
    if alpha == -1.0:
        return 0.5
    return -alpha / (1.0 + math.sqrt(alpha * alpha + alpha + 1.0))


def biolek_balance(x: float, p: int, a_plus: float, a_minus: float) -> float:
    """``a_plus (1 - x^2p) + a_minus (1 - (x - 1)^2p)``, strictly decreasing in x."""
    q = 2 * p
    return a_plus * (1.0 - x ** q) + a_minus * (1.0 - (x - 1.0) ** q)


def biolek_fixed_point_general(p: int, s: PulseStrengths, tol: float = 1e-12) -> float:
    a_plus, a_minus = s.a_plus, s.a_minus
    try:
        return bisect(lambda x: biolek_balance(x, p, a_plus, a_minus), 0.0, 1.0, tol)
    except BracketError as exc:
        raise BracketError(f"Biolek balance has no root for {s}") from exc


# --- potentials ----------------------------------------------------------------


@dataclass(frozen=True)
class PotentialCurve:
    x: np.ndarray
    numeric: np.ndarray
    closed_form: Optional[np.ndarray]

    def argmin(self) -> float:
        return float(self.x[int(np.argmin(self.numeric))])


def biolek_potential(x, p: int, a_plus: float, a_minus: float):
    """Closed-form Biolek potential, shifted so that U(0) = 0."""
    q = 2 * p + 1

    def u(x):
        return -a_plus * (x - x ** q / q) - a_minus * (x - (x - 1.0) ** q / q)

    return u(np.asarray(x, dtype=float)) - u(0.0)


def joglekar_potential(x, p: int, a_plus: float, a_minus: float):
    """Closed-form Joglekar potential, shifted so that U(0) = 0."""
    q = 2 * p + 1
    b = a_plus + a_minus

    def u(x):
        return -b * (x - (2.0 * x - 1.0) ** q / (2 * q))

    return u(np.asarray(x, dtype=float)) - u(0.0)


def potential(m: MemristorModel, w: Waveform, grid_n: int = 1001) -> PotentialCurve:
    """``U(x) = -T * integral_0^x F`` on a uniform grid, with U(0) = 0.

    Each cell is integrated with 5-point Gauss-Legendre.  Built-in windows
    also get the closed-form potential for comparison.
    """
    if grid_n < 2:
        raise ConfigError(f"grid_n: need at least 2 points, got {grid_n}")
    F = averaged_rhs_fn(m, w)
    T = w.period
    x = np.linspace(0.0, 1.0, grid_n)
    half = 0.5 * np.diff(x)
    mid = 0.5 * (x[1:] + x[:-1])
    nodes = np.clip(mid[:, None] + half[:, None] * _GL5_NODES[None, :], 0.0, 1.0)
    cell = (F(nodes.ravel()).reshape(nodes.shape) @ _GL5_WEIGHTS) * half
    numeric = np.concatenate(([0.0], -T * np.cumsum(cell)))

    closed = None
    if m.window.kind is not WindowKind.CUSTOM:
        a_plus, a_minus = _raw_strengths(m, w)
        fn = biolek_potential if m.window.kind is WindowKind.BIOLEK else joglekar_potential
        closed = fn(x, m.window.p, a_plus, a_minus)
    return PotentialCurve(x, numeric, closed)


# --- sweeps --------------------------------------------------------------------


def sweep_xa(a_plus_values, a_minus_values, p: int, tol: float = 1e-12) -> np.ndarray:
    """Biolek attractor on the grid ``[i, j] -> (a_plus[i], a_minus[j])``.

    Cells with ``a_plus <= 0`` or ``a_minus >= 0`` are NaN.
    """
    ap = np.asarray(a_plus_values, dtype=float)
    am = np.asarray(a_minus_values, dtype=float)
    out = np.full((ap.size, am.size), np.nan)
    for i, a in enumerate(ap):
        if not a > 0:
            continue
        for j, b in enumerate(am):
            if b < 0:
                out[i, j] = biolek_fixed_point_general(p, PulseStrengths(float(a), float(b)), tol)
    return out


def default_axes(n: int = 51, limit: float = 10.0):
    """a_plus in (0, limit] and a_minus in [-limit, 0), both with n points."""
    a_plus = np.linspace(limit / n, limit, n)
    return a_plus, -a_plus[::-1]


def sweep_section(a_plus_values, p: int, offset: float = -10.0, tol: float = 1e-12) -> np.ndarray:
    """x_a along the line ``a_minus = a_plus + offset``; NaN off the valid region."""
    ap = np.asarray(a_plus_values, dtype=float)
    out = np.full(ap.size, np.nan)
    for k, a in enumerate(ap):
        b = a + offset
        if a > 0 and b < 0:
            out[k] = biolek_fixed_point_general(p, PulseStrengths(float(a), float(b)), tol)
    return out


def section_crossing(p: int, offset: float = -10.0, target: float = 0.5):
    """Where x_a crosses `target` along the section, and the slope d x_a / d a_plus there.

    The slope follows from implicit differentiation of the balance equation
    with ``d a_minus / d a_plus = 1``.
    """
    lo, hi = 0.0, -offset
    a_star = bisect(
        lambda a: (biolek_fixed_point_general(p, PulseStrengths(a, a + offset)) - target) if 0 < a < -offset
        else (-target if a <= 0 else 1 - target),
        lo, hi, 1e-13,
    )
    x = biolek_fixed_point_general(p, PulseStrengths(a_star, a_star + offset))
    q = 2 * p
    d_da = (1.0 - x ** q) + (1.0 - (x - 1.0) ** q)
    d_dx = -q * a_star * x ** (q - 1) - q * (a_star + offset) * (x - 1.0) ** (q - 1)
    return a_star, -d_da / d_dx
