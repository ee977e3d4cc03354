"""Scalar curvature, derivative invariants, maximum-principle monitors and decay fits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FitError, InvalidMetricError
from .grid import ConformalState, FlowTrajectory, Grid1D, gradient, second_difference
from .invariants import hat_invariants, tilde_invariants


@dataclass
class CurvatureField:
    R: np.ndarray
    r: np.ndarray
    s: np.ndarray


@dataclass
class DecayFit:
    gamma: float
    k_tilde: float
    fit_window: tuple
    residual: float


@dataclass
class Violation:
    snapshot: int
    t: float
    quantity: str
    x: float
    value: float
    bound: float


def derivative_invariants(state: ConformalState, grid: Grid1D):
    """``r = p_x`` and ``s = q_x`` by centred differences."""
    return gradient(state.p, grid), gradient(state.q, grid)


def scalar_curvature(state: ConformalState, r, s) -> np.ndarray:
    """``R = ((r - s) exp(-phi/2) + ((p - q)/2)**2) / 2``.

    Same sign convention as ``R = (ln u)_xx / u``, under which curvature at a
    blowup point tends to ``+inf``.
    """
    lam = np.exp(-0.5 * state.phi)
    return 0.5 * ((np.asarray(r) - np.asarray(s)) * lam + (0.5 * (state.p - state.q)) ** 2)


def curvature_field(state: ConformalState, grid: Grid1D) -> CurvatureField:
    r, s = derivative_invariants(state, grid)
    return CurvatureField(scalar_curvature(state, r, s), r, s)


def scalar_curvature_fd(u, grid: Grid1D) -> np.ndarray:
    """``(ln u)_xx / u`` straight from metric samples (independent cross-check)."""
    u = np.asarray(u, dtype=np.float64)
    if np.any(u <= 0.0):
        raise InvalidMetricError("u must be positive")
    return second_difference(np.log(u), grid) / u


def divided_difference_sup(values, grid: Grid1D) -> float:
    """``max |f_{i+1} - f_i| / dx`` (wrapping on periodic grids)."""
    f = np.append(values, values[0]) if grid.periodic else values
    return float(np.max(np.abs(np.diff(f)))) / grid.dx


def bound_monitor(traj: FlowTrajectory, tol: float = 1e-6) -> list:
    """Check the a-priori bounds expected for admissible data at every snapshot.

    ``0 <= p <= sup p0``, ``0 <= q <= sup q0`` and
    ``|r|, |s| <= max(sup|r0|, sup|s0|)``, each with absolute tolerance ``tol``.
    Returns the violations (empty when all bounds hold); at most one entry
    per quantity and snapshot, located at the worst cell.

    The initial sup of ``|r0|, |s0|`` is taken over one-cell divided
    differences, which never exceed the continuum sup but, unlike centred
    differences, do not average away the slope next to a kink.
    """
    grid = traj.grid
    x = grid.centers
    first = traj.snapshots[0]
    p_sup, q_sup = first.p.max(), first.q.max()
    rs_sup = max(divided_difference_sup(first.p, grid), divided_difference_sup(first.q, grid))
    out = []
    for k, st in enumerate(traj.snapshots):
        r, s = derivative_invariants(st, grid)
        checks = (
            ("p>=0", -st.p, 0.0),
            ("q>=0", -st.q, 0.0),
            ("p<=sup p0", st.p, p_sup),
            ("q<=sup q0", st.q, q_sup),
            ("|r|<=N", np.abs(r), rs_sup),
            ("|s|<=N", np.abs(s), rs_sup),
        )
        for name, val, bound in checks:
            i = int(np.argmax(val))
            if val[i] > bound + tol:
                out.append(Violation(k, st.t, name, float(x[i]), float(val[i]), float(bound)))
    return out


def hat_bound_violations(traj: FlowTrajectory, tol: float = 1e-6) -> list:
    """Two-sided bound on ``u p`` and ``u q`` by their joint initial range."""
    h0 = hat_invariants(traj.snapshots[0])
    lo = min(h0.hat_p.min(), h0.hat_q.min())
    hi = max(h0.hat_p.max(), h0.hat_q.max())
    return _range_violations(traj, lambda st: (lambda h: (h.hat_p, h.hat_q))(hat_invariants(st)),
                             lo, hi, tol, ("hat_p", "hat_q"))


def tilde_bound_violations(traj: FlowTrajectory, tol: float = 1e-6) -> list:
    """Two-sided bound on ``r exp(-phi/2)`` and ``-s exp(-phi/2)`` by their initial range."""
    grid = traj.grid

    def fields(st):
        r, s = derivative_invariants(st, grid)
        t = tilde_invariants(st, r, s)
        return t.tilde_r, t.tilde_s

    a0, b0 = fields(traj.snapshots[0])
    lo = min(a0.min(), b0.min())
    hi = max(a0.max(), b0.max())
    return _range_violations(traj, fields, lo, hi, tol, ("tilde_r", "tilde_s"))


def _range_violations(traj, fields, lo, hi, tol, names):
    x = traj.grid.centers
    out = []
    for k, st in enumerate(traj.snapshots):
        for name, val in zip(names, fields(st)):
            i, j = int(np.argmin(val)), int(np.argmax(val))
            if val[i] < lo - tol:
                out.append(Violation(k, st.t, f"{name}>=min0", float(x[i]), float(val[i]), lo))
            if val[j] > hi + tol:
                out.append(Violation(k, st.t, f"{name}<=max0", float(x[j]), float(val[j]), hi))
    return out


def sup_abs_curvature(traj: FlowTrajectory, fraction: float = 0.8) -> np.ndarray:
    """``sup |R|`` per snapshot over the central ``fraction`` of the grid."""
    grid = traj.grid
    mask = grid.interior_mask(fraction)
    return np.array([np.abs(curvature_field(st, grid).R[mask]).max() for st in traj.snapshots])


def fit_power_law(t, y, origin: float = 1.0):
    """Least-squares fit of ``y = k * (origin + t)**(-gamma)`` in log-log space."""
    t = np.asarray(t, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(y <= 0.0):
        raise FitError("power-law fit needs positive values")
    X = np.log(origin + t)
    Y = np.log(y)
    slope, intercept = np.polyfit(X, Y, 1)
    resid = float(np.sqrt(np.mean((Y - (slope * X + intercept)) ** 2)))
    return -float(slope), float(np.exp(intercept)), resid


def fit_decay(traj: FlowTrajectory, window) -> DecayFit:
    """Fit ``sup|R| ~ k_tilde / (1 + t)**gamma`` over snapshots with ``t`` in ``window``."""
    t_lo, t_hi = window
    if not t_hi > t_lo:
        raise FitError("decay window must satisfy t_hi > t_lo")
    t = traj.times
    sel = (t >= t_lo) & (t <= t_hi)
    if sel.sum() < 2:
        raise FitError(f"fewer than two snapshots inside window {window}")
    sup_R = sup_abs_curvature(traj)[sel]
    return fit_decay_series(t[sel], sup_R, (t_lo, t_hi))


def fit_decay_series(t, sup_R, window=None) -> DecayFit:
    t = np.asarray(t, dtype=np.float64)
    sup_R = np.asarray(sup_R, dtype=np.float64)
    if np.all(sup_R == 0.0):
        raise FitError("curvature vanishes identically (flat metric); no decay to fit")
    keep = sup_R > 0.0
    gamma, k, resid = fit_power_law(t[keep], sup_R[keep])
    if window is None:
        window = (float(t[0]), float(t[-1]))
    return DecayFit(gamma, k, tuple(window), resid)
