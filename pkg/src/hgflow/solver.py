"""Explicit method-of-lines solver for the invariant system

    phi_t = (p + q) / 2
    p_t - lam p_x = -(p^2 + 3 p q) / 4
    q_t + lam q_x = -(q^2 + 3 p q) / 4,      lam = exp(-phi / 2),

which is equivalent to ``u_tt = (ln u)_xx`` for smooth solutions.  ``p`` is
transported with speed ``-lam`` and ``q`` with ``+lam``; both advective terms
are upwinded accordingly, and time stepping is Heun's (SSP) two-stage method.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowupRangeError, ContractError, NonTerminationError, NumericFault
from .grid import (ConformalState, DiagnosticRecord, FlowTrajectory, Grid1D, InitialData,
                   pad, second_difference)
from .invariants import initial_invariants

log = logging.getLogger(__name__)


class Limiter(str, enum.Enum):
    NONE = "none"
    MINMOD = "minmod"


@dataclass
class SolverConfig:
    cfl: float = 0.5
    t_end: float = 1.0
    snapshot_stride: int = 10
    limiter: Limiter = Limiter.NONE
    max_steps: int = 10_000_000
    blowup_p_threshold: float = 1e6
    u_floor: float = 1e-8
    # Largest one-cell jump of p or q, relative to max|p| + max|q|, before the
    # run is declared under-resolved (characteristics of one family crossing).
    resolution_threshold: float = 0.2
    # Uniform step size; used when snapshots must be equally spaced in time.
    dt_fixed: float = None

    def __post_init__(self):
        from .errors import ConfigurationError

        self.limiter = Limiter(str(getattr(self.limiter, "value", self.limiter)).lower())
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigurationError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.t_end > 0.0:
            raise ConfigurationError("t_end must be positive")
        if not self.u_floor > 0.0:
            raise ConfigurationError("u_floor must be positive")
        if self.snapshot_stride < 1 or self.max_steps < 1:
            raise ConfigurationError("snapshot_stride and max_steps must be positive")
        if self.dt_fixed is not None and not self.dt_fixed > 0.0:
            raise ConfigurationError("dt_fixed must be positive")


@dataclass
class BlowupSignal:
    """Why a run stopped early.

    ``kind`` is ``"gradient"`` for invariant blowup with growing curvature and
    ``"degeneracy"`` for the metric collapsing (``u`` to zero with bounded
    spatial structure).
    """

    t: float
    kind: str
    index: int
    x: float
    reason: str
    state: ConformalState = field(repr=False, default=None)


def _minmod(a, b):
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def upwind_derivative(f, grid: Grid1D, speed_sign: int, limiter=Limiter.NONE, ghosts=None):
    """Upwind approximation of ``f_x`` for transport with velocity of sign ``speed_sign``.

    First order without limiter; MUSCL reconstruction with minmod slopes
    otherwise.  ``ghosts`` optionally gives explicit (left, right) ghost cells.
    """
    dx = grid.dx
    fp = pad(f, grid, 2, ghosts)
    if Limiter(limiter) is Limiter.NONE:
        if speed_sign < 0:
            return (fp[3:-1] - fp[2:-2]) / dx
        return (fp[2:-2] - fp[1:-3]) / dx
    d = np.diff(fp)
    sig = _minmod(d[:-1], d[1:])
    if speed_sign < 0:
        return (fp[3:-1] - fp[2:-2] - 0.5 * (sig[2:] - sig[1:-1])) / dx
    return (fp[2:-2] - fp[1:-3] + 0.5 * (sig[1:-1] - sig[:-2])) / dx


def rhs(state: ConformalState, grid: Grid1D, limiter=Limiter.NONE, forcing=None, ghosts=None):
    """Time derivatives ``(phi_t, p_t, q_t)``.

    ``forcing`` is an optional array ``F`` for ``u_tt = (ln u)_xx + F``; it
    enters both transport equations as ``F exp(-phi)``.
    """
    phi, p, q = state.phi, state.p, state.q
    lam = np.exp(-0.5 * phi)
    g = ghosts or {}
    px = upwind_derivative(p, grid, -1, limiter, g.get("p"))
    qx = upwind_derivative(q, grid, +1, limiter, g.get("q"))
    pq3 = 3.0 * p * q
    dphi = 0.5 * (p + q)
    dp = lam * px - 0.25 * (p * p + pq3)
    dq = -lam * qx - 0.25 * (q * q + pq3)
    if forcing is not None:
        f = forcing * np.exp(-phi)
        dp = dp + f
        dq = dq + f
    for name, arr in (("phi_t", dphi), ("p_t", dp), ("q_t", dq)):
        bad = ~np.isfinite(arr)
        if bad.any():
            i = int(np.argmax(bad))
            raise NumericFault(f"non-finite {name} at x={grid.centers[i]:.6g}", location=i)
    return dphi, dp, dq


def source_rate(p, q) -> float:
    """Largest pointwise rate of the Riccati source terms."""
    return float(np.max(0.25 * np.abs(p + 3.0 * q) + 0.25 * np.abs(q + 3.0 * p)
                        + 0.5 * np.abs(p + q)))


def stable_dt(state: ConformalState, config: SolverConfig, grid: Grid1D) -> float:
    """CFL step ``cfl * dx / max(lam)``, clipped to the time left before ``t_end``.

    The step is further limited so the Riccati sources change ``p`` and ``q``
    by at most a ``cfl`` fraction per step, which keeps the explicit update
    from overshooting into non-finite values right before blowup.
    """
    lam_max = float(np.max(np.exp(-0.5 * state.phi)))
    if not np.isfinite(lam_max):
        raise BlowupRangeError("maximum characteristic speed is not finite")
    dt = config.cfl * grid.dx / lam_max
    rate = source_rate(state.p, state.q)
    if rate > 0.0:
        dt = min(dt, config.cfl / rate)
    return min(dt, config.t_end - state.t)


def _heun(state, dt, derivative):
    d0 = derivative(state)
    s1 = ConformalState(state.t + dt, state.phi + dt * d0[0], state.p + dt * d0[1],
                        state.q + dt * d0[2])
    d1 = derivative(s1)
    return ConformalState(state.t + dt,
                          0.5 * (state.phi + s1.phi + dt * d1[0]),
                          0.5 * (state.p + s1.p + dt * d1[1]),
                          0.5 * (state.q + s1.q + dt * d1[2]))


def step(state: ConformalState, dt: float, grid: Grid1D, limiter=Limiter.NONE,
         forcing=None) -> ConformalState:
    if dt == 0.0:
        return state.copy()
    return _heun(state, dt, lambda s: rhs(s, grid, limiter, forcing))


def check_signal(state: ConformalState, config: SolverConfig, grid: Grid1D):
    """Return a :class:`BlowupSignal` if ``state`` crossed a threshold, else None."""
    for name, arr in (("phi", state.phi), ("p", state.p), ("q", state.q)):
        bad = ~np.isfinite(arr)
        if bad.any():
            i = int(np.argmax(bad))
            raise NumericFault(f"non-finite {name} at x={grid.centers[i]:.6g}, t={state.t:.6g}",
                               location=i)
    u_min_i = int(np.argmin(state.phi))
    if np.exp(state.phi[u_min_i]) < config.u_floor:
        return BlowupSignal(state.t, "degeneracy", u_min_i, float(grid.centers[u_min_i]),
                            f"u fell below {config.u_floor:g}", state)
    mag = np.maximum(np.abs(state.p), np.abs(state.q))
    i = int(np.argmax(mag))
    if mag[i] > config.blowup_p_threshold:
        p, q = state.p[i], state.q[i]
        # Both invariants diverging together (same sign, within a factor 2) means
        # phi_t dominates phi_x: the metric collapses rather than steepening.
        kind = "degeneracy" if p * q > 0.0 and min(abs(p), abs(q)) >= 0.5 * max(abs(p), abs(q)) \
            else "gradient"
        return BlowupSignal(state.t, kind, i, float(grid.centers[i]),
                            f"|p|,|q| exceeded {config.blowup_p_threshold:g}", state)
    if config.resolution_threshold:
        scale = float(np.max(np.abs(state.p)) + np.max(np.abs(state.q)))
        for arr in (state.p, state.q):
            fp = np.append(arr, arr[0]) if grid.periodic else arr
            jump = np.abs(np.diff(fp))
            j = int(np.argmax(jump))
            if scale > 0.0 and jump[j] > config.resolution_threshold * scale:
                i = j if abs(arr[j]) >= abs(arr[(j + 1) % len(arr)]) else (j + 1) % len(arr)
                return BlowupSignal(state.t, "gradient", i, float(grid.centers[i]),
                                    "one-cell jump exceeded "
                                    f"{config.resolution_threshold:g} of the invariant scale",
                                    state)
    return None


def diagnose(state: ConformalState, grid: Grid1D) -> DiagnosticRecord:
    from .curvature import derivative_invariants, scalar_curvature

    r, s = derivative_invariants(state, grid)
    R = scalar_curvature(state, r, s)
    return DiagnosticRecord(
        sup_p=float(state.p.max()), sup_q=float(state.q.max()),
        inf_p=float(state.p.min()), inf_q=float(state.q.min()),
        sup_abs_r=float(np.abs(r).max()), sup_abs_s=float(np.abs(s).max()),
        sup_abs_R=float(np.abs(R).max()),
        volume=float(np.sum(np.exp(state.phi)) * grid.dx))


def integrate(state: ConformalState, grid: Grid1D, config: SolverConfig, forcing=None,
              stepper=None, diagnostics=diagnose, signal=check_signal) -> FlowTrajectory:
    """Advance ``state`` to ``config.t_end`` or until a blowup signal.

    Snapshots are kept every ``snapshot_stride`` steps plus the initial and
    final states.  ``stepper(state, dt)`` and ``diagnostics(state, grid)`` can
    be swapped in by solvers for other geometries.
    """
    if stepper is None:
        def stepper(s, dt):
            return step(s, dt, grid, config.limiter, forcing)

    traj = FlowTrajectory(grid)
    traj.append(state, diagnostics(state, grid) if diagnostics else None)
    steps = 0
    recorded = True
    while state.t < config.t_end:
        if steps >= config.max_steps:
            raise NonTerminationError(
                f"max_steps={config.max_steps} reached at t={state.t:.6g}")
        remaining = config.t_end - state.t
        if config.dt_fixed is not None:
            dt = min(config.dt_fixed, remaining)
        else:
            dt = stable_dt(state, config, grid)
        if dt <= 0.0:
            raise NumericFault(f"non-positive time step at t={state.t:.6g}")
        new = stepper(state, dt)
        if dt == remaining or config.t_end - new.t <= 1e-12 * config.t_end:
            new.t = config.t_end
        steps += 1
        sig = signal(new, config, grid) if signal else None
        if sig is not None:
            traj.signal = sig
            if not recorded:
                traj.append(state, diagnostics(state, grid) if diagnostics else None)
            break
        state = new
        recorded = steps % config.snapshot_stride == 0 or state.t >= config.t_end
        if recorded:
            traj.append(state, diagnostics(state, grid) if diagnostics else None)
    traj.steps = steps
    return traj


def run(init: InitialData, config: SolverConfig, forcing=None) -> FlowTrajectory:
    """Evolve initial data under the flow; see :func:`integrate`."""
    state = initial_invariants(init)
    return integrate(state, init.grid, config, forcing=forcing)


def second_order_residual(traj: FlowTrajectory, rtol: float = 1e-9) -> np.ndarray:
    """Max-norm of the discrete ``u_tt - (ln u)_xx`` at every interior snapshot.

    Requires at least three snapshots equally spaced in time.  On a
    non-periodic grid the two edge cells are excluded.
    """
    if len(traj) < 3:
        raise ContractError("need at least three snapshots")
    t = traj.times
    dts = np.diff(t)
    h = dts[0]
    if np.any(np.abs(dts - h) > rtol * max(1.0, abs(t[-1]))):
        raise ContractError("snapshot times are not uniformly spaced")
    grid = traj.grid
    u = [np.exp(s.phi) for s in traj.snapshots]
    out = []
    for k in range(1, len(u) - 1):
        utt = (u[k + 1] - 2.0 * u[k] + u[k - 1]) / h ** 2
        lap = second_difference(np.log(u[k]), grid)
        res = utt - lap
        if not grid.periodic:
            res = res[2:-2]
        out.append(float(np.max(np.abs(res))))
    return np.array(out)
