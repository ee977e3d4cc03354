"""Characteristic curves ``d xi / d tau = -+lam`` traced through a finished trajectory.

The ``MINUS`` family moves with speed ``-lam`` and carries ``p``; the
``PLUS`` family moves with ``+lam`` and carries ``q``.  These curves are
used for verification only (oracles and blowup loci), never for solving.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError, PastBlowupError
from .grid import FlowTrajectory


class Family(str, enum.Enum):
    MINUS = "minus"
    PLUS = "plus"

    @property
    def sign(self) -> int:
        return -1 if self is Family.MINUS else 1


@dataclass
class CharCurve:
    family: Family
    anchor: tuple
    tau: np.ndarray
    xi: np.ndarray
    truncated: bool = False

    @property
    def samples(self):
        return list(zip(self.tau.tolist(), self.xi.tolist()))

    @property
    def foot(self) -> float:
        """Position at the earliest traced time."""
        return float(self.xi[np.argmin(self.tau)])

    @property
    def end(self) -> float:
        """Position at the latest traced time."""
        return float(self.xi[np.argmax(self.tau)])


class _LambdaField:
    """Bilinear ``lam(t, x)`` over the stored snapshots."""

    def __init__(self, traj: FlowTrajectory):
        self.grid = traj.grid
        self.t = traj.times
        self.lam = np.array([np.exp(-0.5 * s.phi) for s in traj.snapshots])
        xc = self.grid.centers
        if self.grid.periodic:
            self.xs = np.concatenate([xc, [xc[0] + self.grid.length]])
            self.lam = np.concatenate([self.lam, self.lam[:, :1]], axis=1)
        else:
            self.xs = xc

    def inside(self, x) -> bool:
        return self.grid.periodic or self.grid.x_min <= x <= self.grid.x_max

    def __call__(self, t, x):
        g = self.grid
        if g.periodic:
            x0 = self.xs[0]
            x = x0 + math.fmod(x - x0, g.length) % g.length
        k = int(np.clip(np.searchsorted(self.t, t) - 1, 0, len(self.t) - 2)) if len(self.t) > 1 else 0
        a = np.interp(x, self.xs, self.lam[k])
        if len(self.t) == 1:
            return a
        b = np.interp(x, self.xs, self.lam[k + 1])
        w = (t - self.t[k]) / (self.t[k + 1] - self.t[k])
        return (1.0 - w) * a + w * b


def trace(traj: FlowTrajectory, anchor, family, t_stop: float = 0.0,
          substeps: int = 4) -> CharCurve:
    """Integrate ``d xi / d tau = sign * lam(tau, xi)`` from ``anchor = (t, x)`` to ``t_stop``.

    Classical RK4, with every snapshot interval split so one step moves the
    curve by at most ``dx / substeps``.  ``t_stop`` may lie before or after
    the anchor time.  On a non-periodic grid a curve leaving the interval is
    cut at its last interior point and flagged ``truncated``.
    """
    family = Family(getattr(family, "value", family))
    t_a, x_a = float(anchor[0]), float(anchor[1])
    times = traj.times
    lo, hi = times[0], times[-1]
    eps = 1e-12 * max(1.0, abs(hi))
    if not (lo - eps <= t_a <= hi + eps and lo - eps <= t_stop <= hi + eps):
        raise ContractError(f"times must lie in [{lo:g}, {hi:g}]")
    lam = _LambdaField(traj)
    if not lam.inside(x_a):
        raise DomainError(f"anchor x={x_a:g} lies outside the grid")
    sgn = family.sign
    lam_max = float(lam.lam.max())
    dx = traj.grid.dx

    # breakpoints: snapshot times between the anchor and t_stop
    direction = 1.0 if t_stop >= t_a else -1.0
    inner = times[(times > min(t_a, t_stop)) & (times < max(t_a, t_stop))]
    marks = np.concatenate([[t_a], inner[::int(direction)], [t_stop]])

    def f(t, x):
        return sgn * lam(t, x)

    ts, xs = [t_a], [x_a]
    truncated = False
    t, x = t_a, x_a
    for t_next in marks[1:]:
        span = t_next - t
        if span == 0.0:
            continue
        k = max(1, int(math.ceil(abs(span) * lam_max * substeps / dx)))
        h = span / k
        for _ in range(k):
            k1 = f(t, x)
            k2 = f(t + 0.5 * h, x + 0.5 * h * k1)
            k3 = f(t + 0.5 * h, x + 0.5 * h * k2)
            k4 = f(t + h, x + h * k3)
            x_new = x + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
            if not lam.inside(x_new):
                truncated = True
                break
            t, x = t + h, x_new
        if truncated:
            break
        t = t_next
        ts.append(t)
        xs.append(x)
    tau, xi = np.array(ts), np.array(xs)
    order = np.argsort(tau)
    return CharCurve(family, (t_a, x_a), tau[order], xi[order], truncated)


def sample_along(traj: FlowTrajectory, curve: CharCurve, name: str = "p") -> np.ndarray:
    """Linear interpolation of a state field at the curve points that are snapshot times."""
    g = traj.grid
    xc = g.centers
    out = []
    snap_t = traj.times
    for tau, xi in zip(curve.tau, curve.xi):
        k = int(np.argmin(np.abs(snap_t - tau)))
        vals = getattr(traj.snapshots[k], name)
        if g.periodic:
            xx = np.concatenate([xc, [xc[0] + g.length]])
            vv = np.concatenate([vals, vals[:1]])
            xi = xc[0] + (xi - xc[0]) % g.length
            out.append(float(np.interp(xi, xx, vv)))
        else:
            out.append(float(np.interp(xi, xc, vals)))
    return np.array(out)


@dataclass
class DeterminateDomain:
    """Space-time trapezoid ``left(t) <= x <= right(t)`` for ``0 <= t <= apex``."""

    a: float
    b: float
    left_speed: float
    right_speed: float
    apex: float = field(init=False)

    def __post_init__(self):
        closing = self.left_speed - self.right_speed
        self.apex = (self.b - self.a) / closing if closing > 0.0 else math.inf

    def left(self, t):
        return self.a + self.left_speed * t

    def right(self, t):
        return self.b + self.right_speed * t

    def __call__(self, t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        return (t >= 0.0) & (t <= self.apex) & (x >= self.left(t)) & (x <= self.right(t))

    contains = __call__


def determinate_domain(a: float, b: float, m: float, M: float) -> DeterminateDomain:
    """Region over ``[a, b]`` that data outside ``[a, b]`` cannot reach.

    Both families travel at most ``m**-0.5`` (``lam = u**-0.5`` with
    ``u >= m``), so the edges close in from both sides at that speed and
    the apex is at ``t = (b - a) / (2 m**-0.5)``.  ``M`` is only checked
    for consistency.  The lower bound ``u >= m`` must persist along the
    run, which is the case for admissible data where ``u`` is nondecreasing.
    """
    if not (0.0 < m <= M) or not b > a:
        raise DomainError("need a < b and 0 < m <= M")
    c = m ** -0.5
    return DeterminateDomain(a, b, c, -c)


def one_sided_domain(a: float, b: float, m: float, M: float) -> DeterminateDomain:
    """Trapezoid ``a + m**-0.5 t <= x <= b + M**-0.5 t``.

    Both edges move to the right, so it is a domain of determinacy only
    when every characteristic speed is positive, lying in
    ``[M**-0.5, m**-0.5]``.  For the flow, whose speeds are ``-lam`` and
    ``+lam``, use :func:`determinate_domain` instead.
    """
    if not 0.0 < m < M:
        raise DomainError("need 0 < m < M for a finite apex")
    if not b > a:
        raise DomainError("need a < b")
    return DeterminateDomain(a, b, m ** -0.5, M ** -0.5)


def p_along_char_closed_form(p0_at_foot, t):
    """``p0 / (1 + p0 t / 4)``: exact value of ``p`` on its characteristic when ``q = 0``."""
    p0 = np.asarray(p0_at_foot, dtype=float)
    den = 1.0 + 0.25 * p0 * np.asarray(t, dtype=float)
    if np.any(den <= 0.0):
        raise PastBlowupError("1 + p0 t / 4 <= 0: time at or past blowup")
    out = p0 / den
    return float(out) if out.ndim == 0 else out


def R_along_char_closed_form(p0_at_foot, t):
    """``p**2 / 8`` with ``p`` from :func:`p_along_char_closed_form`: curvature on the minimizing characteristic."""
    return 0.125 * np.asarray(p_along_char_closed_form(p0_at_foot, t)) ** 2
