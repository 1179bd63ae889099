"""Time integration of driven memristors, period averaging and limit cycles."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .device import MemristorModel
from .drive import Waveform, is_piecewise_constant
from .errors import ConfigError, DivergenceError, DomainError, LengthError
from .windows import CLAMP_TOL

LIMIT_CYCLE_EPS = 1e-6


@dataclass(frozen=True)
class SimConfig:
    """Integration settings.

    `steps_per_segment` applies to rectangular drives, which are integrated one
    constant-current segment at a time.  `dt` applies to continuous drives and
    must divide the period.  Output keeps every `record_stride`-th sample.
    """

    x0: float = 0.5
    periods: int = 1
    steps_per_segment: int = 16
    dt: Optional[float] = None
    record_stride: int = 1
    clamp_tol: float = CLAMP_TOL

    def __post_init__(self):
        if not (isinstance(self.x0, (int, float)) and 0.0 <= self.x0 <= 1.0):
            raise ConfigError(f"x0: initial state must lie in [0, 1], got {self.x0!r}")
        if int(self.periods) != self.periods or self.periods < 1:
            raise ConfigError(f"periods: must be a positive integer, got {self.periods!r}")
        if int(self.steps_per_segment) != self.steps_per_segment or self.steps_per_segment < 1:
            raise ConfigError(f"steps_per_segment: must be a positive integer, got {self.steps_per_segment!r}")
        if self.dt is not None and not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt: must be positive, got {self.dt!r}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ConfigError(f"record_stride: must be a positive integer, got {self.record_stride!r}")


@dataclass
class Trajectory:
    """Recorded ``x(t)`` with its forward one-period average.

    ``averaged[k]`` is the mean of x over ``[times[k], times[k] + period]`` and
    exists only for samples whose window fits inside the record, so it is
    shorter than ``states`` by one period's worth of samples.
    """

    times: np.ndarray
    states: np.ndarray
    period: float
    averaged: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.times.shape != self.states.shape or self.times.ndim != 1:
            raise ConfigError("times: times and states must be 1-D arrays of equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ConfigError("times: sample times must be strictly increasing")
        if self.averaged is None and self.span >= self.period * (1 - 1e-9):
            self.averaged = forward_average(self.times, self.states, self.period)

    @property
    def span(self) -> float:
        return float(self.times[-1] - self.times[0]) if len(self.times) else 0.0

    @property
    def xbar(self) -> np.ndarray:
        """Average padded with NaN to the length of `states`."""
        out = np.full_like(self.states, np.nan)
        if self.averaged is not None:
            out[: len(self.averaged)] = self.averaged
        return out

    def head(self, periods: float) -> "Trajectory":
        """Sub-record covering the first `periods` drive periods."""
        t_end = self.times[0] + periods * self.period
        keep = self.times <= t_end + 1e-9 * self.period
        return Trajectory(self.times[keep], self.states[keep], self.period)

    def at_period_starts(self):
        """(times, states, averaged) sampled at whole multiples of the period."""
        k = np.round((self.times - self.times[0]) / self.period)
        on_grid = np.abs(self.times - self.times[0] - k * self.period) <= 1e-9 * self.period
        idx = np.flatnonzero(on_grid)
        xbar = self.xbar[idx]
        return self.times[idx], self.states[idx], xbar

    def to_csv(self, path) -> None:
        write_trajectory_csv(self, path)


# --- integration -----------------------------------------------------------


def rk4_autonomous(rate: Callable[[float], float], x0: float, duration: float, steps: int,
                   clamp_tol: float = CLAMP_TOL) -> np.ndarray:
    """Classical RK4 for ``dx/dt = rate(x)``; returns the `steps` states after x0."""
    h = duration / steps
    out = np.empty(steps)
    x = x0
    for n in range(steps):
        k1 = rate(x)
        k2 = rate(x + 0.5 * h * k1)
        k3 = rate(x + 0.5 * h * k2)
        k4 = rate(x + h * k3)
        x = _clamp_step(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), clamp_tol)
        out[n] = x
    return out


def _clamp_step(x: float, tol: float) -> float:
    if not (-tol <= x <= 1.0 + tol):
        raise DivergenceError(f"state left [0, 1]: x = {x!r}")
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def _segment_rate(m: MemristorModel, current: float, tol: float):
    hc = m.activation(current)
    g = m.window.eval
    return lambda x: hc * g(x, current, tol)


def _integrate_segments(m, w, c):
    segs = w.segments()
    n = int(c.steps_per_segment)
    offsets = []
    start = 0.0
    for d, _ in segs:
        offsets.extend(start + d * (j + 1) / n for j in range(n))
        start += d
    offsets = np.asarray(offsets)
    offsets[-1] = w.period
    per = len(offsets)

    states = np.empty(c.periods * per + 1)
    states[0] = x = float(c.x0)
    rates = [(d, cur, _segment_rate(m, cur, c.clamp_tol)) for d, cur in segs]
    pos = 1
    for _ in range(c.periods):
        for d, cur, rate in rates:
            if cur == 0.0 or m.activation(cur) == 0.0:
                states[pos:pos + n] = x
            else:
                states[pos:pos + n] = rk4_autonomous(rate, x, d, n, c.clamp_tol)
                x = float(states[pos + n - 1])
            pos += n
    k = np.repeat(np.arange(c.periods), per)
    times = np.concatenate(([0.0], k * w.period + np.tile(offsets, c.periods)))
    return times, states


def _integrate_stepped(m, w, c):
    if c.dt is None:
        raise ConfigError("dt: continuous drives need a time step")
    T = w.period
    per = int(round(T / c.dt))
    if per < 1 or abs(per * c.dt - T) > 1e-9 * T:
        raise ConfigError(f"dt: time step {c.dt!r} must divide the period {T!r}")
    h = T / per
    total = per * c.periods
    # Drive values on the half-step grid are shared by consecutive RK4 stages.
    currents = w.sample(np.arange(2 * total + 1) * (0.5 * h))
    hs = m.activation(currents).tolist()
    currents = currents.tolist()
    geval = m.window.eval
    tol = c.clamp_tol

    def f(x, j):
        i = currents[j]
        return 0.0 if i == 0.0 else hs[j] * geval(x, i, tol)

    states = np.empty(total + 1)
    states[0] = x = float(c.x0)
    for n in range(total):
        j = 2 * n
        k1 = f(x, j)
        k2 = f(x + 0.5 * h * k1, j + 1)
        k3 = f(x + 0.5 * h * k2, j + 1)
        k4 = f(x + h * k3, j + 2)
        x = _clamp_step(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), tol)
        states[n + 1] = x
    times = np.arange(total + 1) * h
    return times, states


def integrate(m: MemristorModel, w: Waveform, c: SimConfig) -> Trajectory:
    """Integrate ``dx/dt = f(x, I(t))`` over ``c.periods`` drive periods.

    Rectangular drives are integrated segment by segment with RK4, so no step
    straddles a current discontinuity; continuous drives use fixed-step RK4
    with step ``c.dt``.
    """
    try:
        if is_piecewise_constant(w):
            times, states = _integrate_segments(m, w, c)
        else:
            times, states = _integrate_stepped(m, w, c)
    except DomainError as exc:
        raise DivergenceError(f"integration left the state interval: {exc}") from exc
    full = Trajectory(times, states, w.period)
    if c.record_stride == 1:
        return full
    s = int(c.record_stride)
    n_avg = len(full.averaged)
    keep = np.arange(0, len(times), s)
    if keep[-1] != len(times) - 1:
        keep = np.append(keep, len(times) - 1)
    averaged = full.averaged[keep[keep < n_avg]]
    return Trajectory(times[keep], states[keep], w.period, averaged)


def _integrate_x0(args):
    m, w, c = args
    return integrate(m, w, c)


def integrate_many(m: MemristorModel, w: Waveform, c: SimConfig, x0s: Sequence[float],
                   workers: Optional[int] = None) -> list:
    """One trajectory per initial state, optionally in worker processes."""
    jobs = [(m, w, replace(c, x0=float(x0))) for x0 in x0s]
    if not workers or workers <= 1 or len(jobs) == 1:
        return [_integrate_x0(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_integrate_x0, jobs))


# --- analysis --------------------------------------------------------------


def forward_average(times, states, period: float) -> np.ndarray:
    """Trapezoidal ``(1/T) * integral_t^{t+T} x`` at every sample whose window fits.

    Windows ending between samples use the linear interpolant of x.
    """
    t = np.asarray(times, dtype=float)
    x = np.asarray(states, dtype=float)
    eps = 1e-9 * period
    if len(t) < 2 or t[-1] - t[0] < period - eps:
        raise LengthError(f"record spans {t[-1] - t[0] if len(t) else 0.0!r}, shorter than one period {period!r}")
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (x[1:] + x[:-1]) * np.diff(t))))
    n = int(np.searchsorted(t, t[-1] - period + eps, side="right"))
    target = t[:n] + period
    j = np.searchsorted(t, target - eps, side="left")
    j = np.minimum(j, len(t) - 1)
    exact = np.abs(t[j] - target) <= eps
    out = np.empty(n)
    out[exact] = cum[j[exact]] - cum[:n][exact]
    lo = j[~exact] - 1
    tt = target[~exact]
    frac = (tt - t[lo]) / (t[lo + 1] - t[lo])
    x_end = x[lo] + frac * (x[lo + 1] - x[lo])
    out[~exact] = cum[lo] - cum[:n][~exact] + 0.5 * (tt - t[lo]) * (x[lo] + x_end)
    return out / period


def moving_average(tr: Trajectory, period: Optional[float] = None) -> np.ndarray:
    return forward_average(tr.times, tr.states, tr.period if period is None else period)


@dataclass(frozen=True)
class LimitCycle:
    periodic: bool
    residual: float


def detect_limit_cycle(tr: Trajectory, period: Optional[float] = None,
                       eps: float = LIMIT_CYCLE_EPS) -> LimitCycle:
    """Compare the last recorded period point-wise with the one before it."""
    T = tr.period if period is None else period
    if tr.span < 2 * T * (1 - 1e-9):
        raise LengthError(f"record spans {tr.span!r}, need two periods ({2 * T!r})")
    t_end = tr.times[-1]
    last = tr.times >= t_end - T - 1e-9 * T
    earlier = np.interp(tr.times[last] - T, tr.times, tr.states)
    residual = float(np.max(np.abs(tr.states[last] - earlier)))
    return LimitCycle(residual < eps, residual)


# --- CSV ---------------------------------------------------------------------


def _fmt(v: float) -> str:
    return "" if v != v else format(float(v), ".17g")


def write_trajectory_csv(tr: Trajectory, path) -> None:
    xbar = tr.xbar
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "x", "xbar"])
        for t, x, xb in zip(tr.times, tr.states, xbar):
            writer.writerow([_fmt(t), _fmt(x), _fmt(xb)])


def read_trajectory_csv(path, period: float) -> Trajectory:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    times = np.array([float(r["t"]) for r in rows])
    states = np.array([float(r["x"]) for r in rows])
    averaged = np.array([float(r["xbar"]) for r in rows if r["xbar"] != ""])
    return Trajectory(times, states, period, averaged)

