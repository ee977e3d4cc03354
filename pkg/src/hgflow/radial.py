"""Rotationally symmetric flows ``u = u(t, r)`` on an annulus ``r_min <= r <= r_max``.

With ``psi = ln u``, ``v = psi_t``, ``w = psi_r`` and ``chi = exp(-psi/2)``
the invariants ``mu = v + chi w`` and ``nu = v - chi w`` satisfy

    psi_t = (mu + nu) / 2
    mu_t - chi mu_r = -((mu+nu)/2)^2 + (chi/r - nu/2)(mu - nu)/2
    nu_t + chi nu_r = -((mu+nu)/2)^2 + (chi/r + mu/2)(mu - nu)/2.

The origin is excluded: nothing is claimed about the ``1/r`` terms there.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ContractError, InvalidMetricError, NumericFault
from .grid import FlowTrajectory, Grid1D, gradient, gradient4
from .solver import Limiter, SolverConfig, _heun, check_signal, integrate, upwind_derivative


@dataclass
class RadialState:
    t: float
    psi: np.ndarray
    mu: np.ndarray
    nu: np.ndarray

    # aliases so the planar signal checks and integrator apply unchanged
    phi = property(lambda self: self.psi)
    p = property(lambda self: self.mu)
    q = property(lambda self: self.nu)

    @property
    def u(self) -> np.ndarray:
        return np.exp(self.psi)

    def copy(self) -> "RadialState":
        return RadialState(self.t, self.psi.copy(), self.mu.copy(), self.nu.copy())


def _check_grid(grid: Grid1D):
    if grid.periodic:
        raise ConfigurationError("radial grids cannot be periodic")
    if grid.x_min < 10.0 * grid.dx:
        raise ConfigurationError(
            f"r_min = {grid.x_min:g} must be at least 10 dr = {10 * grid.dx:g}")


def radial_initial_invariants(grid: Grid1D, u0, u1) -> RadialState:
    """``psi = ln u0``, ``mu, nu = u1/u0 +- exp(-psi/2) psi_r``."""
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    if np.any(u0 <= 0.0):
        raise InvalidMetricError("u0 must be positive")
    psi = np.log(u0)
    v = u1 / u0
    cw = np.exp(-0.5 * psi) * gradient4(u0, grid) / u0
    return RadialState(0.0, psi, v + cw, v - cw)


def radial_source(mu, nu, chi, r):
    """Right-hand sides of the invariant equations without transport."""
    half = 0.5 * (mu - nu)
    base = -(0.5 * (mu + nu)) ** 2
    return base + (chi / r - 0.5 * nu) * half, base + (chi / r + 0.5 * mu) * half


def radial_rhs(state: RadialState, grid: Grid1D, limiter=Limiter.NONE, ghosts=None):
    """Time derivatives ``(psi_t, mu_t, nu_t)``.

    ``ghosts`` is None (constant extension) or a callable ``t -> dict`` with
    keys ``"mu"`` and ``"nu"`` mapping to explicit ``(left, right)`` ghost cells.
    """
    r = grid.centers
    # phi/p/q: works for RadialState and the planar stage states of the integrator
    psi, mu, nu = state.phi, state.p, state.q
    chi = np.exp(-0.5 * psi)
    g = ghosts(state.t) if callable(ghosts) else (ghosts or {})
    mu_r = upwind_derivative(mu, grid, -1, limiter, g.get("mu"))
    nu_r = upwind_derivative(nu, grid, +1, limiter, g.get("nu"))
    s_mu, s_nu = radial_source(mu, nu, chi, r)
    out = (0.5 * (mu + nu), chi * mu_r + s_mu, -chi * nu_r + s_nu)
    for name, arr in zip(("psi_t", "mu_t", "nu_t"), out):
        bad = ~np.isfinite(arr)
        if bad.any():
            i = int(np.argmax(bad))
            raise NumericFault(f"non-finite {name} at r={r[i]:.6g}", location=i)
    return out


def run_radial(grid: Grid1D, u0, u1, config: SolverConfig, ghosts=None,
               state: RadialState = None) -> FlowTrajectory:
    """Integrate the radial system with CFL step ``cfl * dr / max chi``.

    The grid should already include any padding needed to keep the region
    of interest free of boundary influence.  ``state`` overrides the
    invariants computed from ``(u0, u1)``.
    """
    _check_grid(grid)
    if state is None:
        state = radial_initial_invariants(grid, u0, u1)

    def derivative(s):
        return radial_rhs(s, grid, config.limiter, ghosts)

    def stepper(s, dt):
        if dt == 0.0:
            return s.copy()
        new = _heun(s, dt, derivative)
        return RadialState(new.t, new.phi, new.p, new.q)

    return integrate(state, grid, config, stepper=stepper, diagnostics=None,
                     signal=check_signal)


def _uniform_dt(traj: FlowTrajectory, rtol: float = 1e-9) -> float:
    t = traj.times
    if len(t) < 3:
        raise ContractError("need at least three snapshots")
    dts = np.diff(t)
    if np.any(np.abs(dts - dts[0]) > rtol * max(1.0, abs(t[-1]))):
        raise ContractError("snapshot times are not uniformly spaced")
    return float(dts[0])


def conservative_residual(traj: FlowTrajectory, mask=None) -> np.ndarray:
    """Max-norm residual of the conservative forms

        mu_t - (chi mu)_r = -mu nu + chi (mu - nu) / (2r)
        nu_t + (chi nu)_r = -mu nu + chi (mu - nu) / (2r)

    at every interior snapshot, with centred differences in ``t`` and ``r``.
    ``mask`` restricts the cells (default: all but two per edge).
    """
    h = _uniform_dt(traj)
    grid = traj.grid
    r = grid.centers
    if mask is None:
        mask = np.zeros(grid.n, bool)
        mask[2:-2] = True
    S = traj.snapshots
    out = []
    for k in range(1, len(S) - 1):
        s = S[k]
        chi = np.exp(-0.5 * s.psi)
        mu_t = (S[k + 1].mu - S[k - 1].mu) / (2.0 * h)
        nu_t = (S[k + 1].nu - S[k - 1].nu) / (2.0 * h)
        src = -s.mu * s.nu + chi * (s.mu - s.nu) / (2.0 * r)
        res_mu = mu_t - gradient(chi * s.mu, grid) - src
        res_nu = nu_t + gradient(chi * s.nu, grid) - src
        out.append(float(max(np.abs(res_mu[mask]).max(), np.abs(res_nu[mask]).max())))
    return np.array(out)


def derivative_system_rhs(mu, nu, eta, gam, chi, r, as_displayed: bool = False):
    """Sources of the ``eta = mu_r``, ``gamma = nu_r`` system.

    Differentiating the ``nu`` equation in ``r`` gives the factor
    ``(chi/r + mu/2)`` in front of ``(eta - gamma)/2`` in the ``gamma``
    equation; ``as_displayed=True`` flips it to ``(chi/r - mu/2)``, which
    is not consistent with the flow and serves as a negative control.
    """
    d = mu - nu
    common = -(d / (4.0 * r) + chi / r ** 2) * d / 2.0
    f_eta = -(3.0 * mu + nu) / 4.0 * (eta + gam) + common + (chi / r - nu / 2.0) * (eta - gam) / 2.0
    sgn = -1.0 if as_displayed else 1.0
    f_gam = -(mu + 3.0 * nu) / 4.0 * (eta + gam) + common + (chi / r + sgn * mu / 2.0) * (eta - gam) / 2.0
    return f_eta, f_gam


def derivative_system_residual(traj: FlowTrajectory, mask=None,
                               as_displayed: bool = False) -> np.ndarray:
    """Max-norm residual of ``eta_t - chi eta_r = F`` and ``gamma_t + chi gamma_r = G``."""
    h = _uniform_dt(traj)
    grid = traj.grid
    r = grid.centers
    if mask is None:
        mask = np.zeros(grid.n, bool)
        mask[3:-3] = True
    S = traj.snapshots
    eta = [gradient(s.mu, grid) for s in S]
    gam = [gradient(s.nu, grid) for s in S]
    out = []
    for k in range(1, len(S) - 1):
        s = S[k]
        chi = np.exp(-0.5 * s.psi)
        f_eta, f_gam = derivative_system_rhs(s.mu, s.nu, eta[k], gam[k], chi, r, as_displayed)
        res_eta = (eta[k + 1] - eta[k - 1]) / (2.0 * h) - chi * gradient(eta[k], grid) - f_eta
        res_gam = (gam[k + 1] - gam[k - 1]) / (2.0 * h) + chi * gradient(gam[k], grid) - f_gam
        out.append(float(max(np.abs(res_eta[mask]).max(), np.abs(res_gam[mask]).max())))
    return np.array(out)


def power_profile_solution(a: float, b: float, A: float, t, r):
    """Exact solution ``u = (a t + b) r**A`` (``A ln r`` is harmonic in the plane)."""
    return (a * np.asarray(t, dtype=float) + b) * np.asarray(r, dtype=float) ** A


def power_profile_state(a: float, b: float, A: float, t: float, r) -> RadialState:
    r = np.asarray(r, dtype=float)
    J = a * t + b
    psi = np.log(J) + A * np.log(r)
    cw = np.exp(-0.5 * psi) * A / r
    v = a / J
    return RadialState(t, psi, v + cw, v - cw)


def power_profile_ghosts(a: float, b: float, A: float, grid: Grid1D, width: int = 2):
    """Ghost-cell callback holding the exact power-profile invariants."""
    dr = grid.dx
    left = grid.x_min + dr * (np.arange(-width, 0) + 0.5)
    right = grid.x_max + dr * (np.arange(width) + 0.5)

    def ghosts(t):
        L = power_profile_state(a, b, A, t, left)
        Rt = power_profile_state(a, b, A, t, right)
        return {"mu": (L.mu, Rt.mu), "nu": (L.nu, Rt.nu)}
    return ghosts


def radial_curvature(state, grid: Grid1D):
    """``(eta, gamma, R)`` with ``R = exp(-psi) (psi_rr + psi_r / r)`` from the invariants.

    The planar part is ``((eta - gamma) chi + ((mu - nu)/2)^2) / 2``; the
    ``psi_r / r`` term adds ``chi (mu - nu) / (2r)``.
    """
    r = grid.centers
    psi, mu, nu = state.phi, state.p, state.q
    chi = np.exp(-0.5 * psi)
    eta, gam = gradient(mu, grid), gradient(nu, grid)
    R = 0.5 * ((eta - gam) * chi + (0.5 * (mu - nu)) ** 2) + chi * (mu - nu) / (2.0 * r)
    return eta, gam, R
