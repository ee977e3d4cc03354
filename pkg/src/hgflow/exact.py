"""Closed-form solutions of ``u_tt = (ln u)_xx`` used as manufactured oracles.

Separable family: ``ln u = f(t) + g(x)`` with ``e^f = (c/2) t^2 + a t + b``
and ``g'' = c e^g``.  For ``c > 0`` the profile is
``g = -2 ln(C - k x)`` with ``k = sqrt(c/2)``: then ``g' = 2k/(C - kx)``,
``g'' = 2k^2/(C - kx)^2 = c e^g``.  For ``c < 0`` it is
``e^g = (2 k^2 / |c|) sech^2(k x)`` and for ``c = 0`` it is linear,
``g = alpha x + beta``.  The scalar curvature ``(ln u)_xx / u`` of every
member equals ``c e^{-f}``.

Traveling waves ``u = e^{f(x - a t)}`` solve ``a^2 e^f - f = c1 zeta + c2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import lambertw

from .errors import BranchFoldError, DomainError, InvalidMetricError


@dataclass
class SeparableSolution:
    c: float = 0.0
    a: float = 0.0
    b: float = 1.0
    C: float = 10.0      # profile offset for c > 0
    k: float = 1.0       # profile rate for c < 0
    alpha: float = 0.0   # slope for c = 0
    beta: float = 0.0    # offset for c = 0

    @property
    def rate(self) -> float:
        return math.sqrt(self.c / 2.0) if self.c > 0 else self.k

    @property
    def validity(self):
        """Open spatial interval on which the profile is defined."""
        if self.c > 0:
            return (-math.inf, self.C / self.rate)
        return (-math.inf, math.inf)

    def time_factor(self, t):
        return 0.5 * self.c * np.square(t) + self.a * np.asarray(t) + self.b

    def time_factor_rate(self, t):
        return self.c * np.asarray(t) + self.a

    def profile(self, x):
        """``e^{g(x)}``."""
        x = np.asarray(x, dtype=float)
        if self.c > 0:
            lo, hi = self.validity
            if np.any(x >= hi):
                raise DomainError(f"profile undefined for x >= {hi:g}")
            return (self.C - self.rate * x) ** -2.0
        if self.c < 0:
            k = self.k
            return (2.0 * k * k / -self.c) / np.cosh(k * x) ** 2
        return np.exp(self.alpha * x + self.beta)


def _checked_time_factor(sol: SeparableSolution, t):
    ef = sol.time_factor(t)
    if np.any(np.asarray(ef) <= 0.0):
        raise DomainError("(c/2) t^2 + a t + b must stay positive")
    return ef


def separable_eval(sol: SeparableSolution, t, x):
    """``u(t, x) = ((c/2) t^2 + a t + b) e^{g(x)}``."""
    return _checked_time_factor(sol, t) * sol.profile(x)


def separable_velocity(sol: SeparableSolution, t, x):
    """``u_t(t, x) = (c t + a) e^{g(x)}``."""
    _checked_time_factor(sol, t)
    return sol.time_factor_rate(t) * sol.profile(x)


def separable_curvature(sol: SeparableSolution, t):
    """``R(t) = c / ((c/2) t^2 + a t + b)``, constant in space."""
    return sol.c / _checked_time_factor(sol, t)


def separable_invariants(sol: SeparableSolution, t, x):
    """``(phi, p, q)`` of the separable solution.

    For ``c > 0`` ``p`` and ``q`` do not depend on ``x``:
    ``exp(-phi/2) phi_x = 2k exp(-f/2)``.
    """
    ef = _checked_time_factor(sol, t)
    x = np.asarray(x, dtype=float)
    phi = np.log(ef * sol.profile(x))
    v = sol.time_factor_rate(t) / ef
    if sol.c > 0:
        w = 2.0 * sol.rate / (sol.C - sol.rate * x)
    elif sol.c < 0:
        w = -2.0 * sol.k * np.tanh(sol.k * x)
    else:
        w = np.full_like(x, sol.alpha)
    e = np.exp(-0.5 * phi) * w
    return phi, v + e, v - e


@dataclass
class TravelingWaveSolution:
    a: float
    c1: float = 0.0
    c2: float = 0.0
    f_init: float = 0.0

    @property
    def fold(self) -> float:
        """Value of ``f`` where ``d/df (a^2 e^f - f) = 0``; ``inf`` for a static wave."""
        return -2.0 * math.log(abs(self.a)) if self.a != 0 else math.inf


def traveling_wave_profile(sol: TravelingWaveSolution, zeta, fold_tol: float = 1e-12):
    """Solve ``a^2 e^f - f = c1 zeta + c2`` for ``f`` on the branch holding ``f_init``.

    Writing ``y = f + K`` with ``K = c1 zeta + c2`` turns the relation into
    ``-y e^{-y} = -a^2 e^{-K}``, so ``f = -K - W(-a^2 e^{-K})`` with the
    principal Lambert branch below the fold (``f < -2 ln|a|``) and the
    ``-1`` branch above it.  With ``c1 = 0`` a solution sitting exactly on
    the fold is the constant state and is returned; otherwise a root at the
    fold raises :class:`BranchFoldError`.
    """
    zeta = np.asarray(zeta, dtype=float)
    K = sol.c1 * zeta + sol.c2
    if sol.a == 0:
        return -K
    a2 = sol.a * sol.a
    z = -a2 * np.exp(-K)
    # distance from the branch point -1/e; zero means a double root at the fold
    gap = z + math.exp(-1.0)
    if np.any(gap < -fold_tol):
        raise DomainError("no real root: c1 zeta + c2 is below the fold value 1 + 2 ln|a|")
    at_fold = np.abs(gap) <= fold_tol
    if np.any(at_fold) and sol.c1 != 0.0:
        raise BranchFoldError("root at the fold where a^2 e^f - 1 = 0")
    branch = 0 if sol.f_init < sol.fold else -1
    w = lambertw(np.where(at_fold, -math.exp(-1.0), z), branch).real
    f = np.where(at_fold, sol.fold, -K - w)
    return f


def traveling_wave_eval(sol: TravelingWaveSolution, t, x):
    """``u = e^{f(x - a t)}``."""
    zeta = np.asarray(x, dtype=float) - sol.a * np.asarray(t, dtype=float)
    return np.exp(traveling_wave_profile(sol, zeta))


def traveling_wave_velocity(sol: TravelingWaveSolution, t, x):
    """``u_t = -a f'(zeta) e^f`` with ``f' = c1 / (a^2 e^f - 1)`` from the implicit relation."""
    zeta = np.asarray(x, dtype=float) - sol.a * np.asarray(t, dtype=float)
    f = traveling_wave_profile(sol, zeta)
    ef = np.exp(f)
    return -sol.a * sol.c1 / (sol.a ** 2 * ef - 1.0) * ef


def traveling_wave_residual(sol: TravelingWaveSolution, zeta):
    f = traveling_wave_profile(sol, zeta)
    return sol.a ** 2 * np.exp(f) - f - sol.c1 * np.asarray(zeta) - sol.c2


def homogeneous_solution(u0: float, u1: float, t):
    """Spatially constant flow: ``u = u0 (1 + P t)``, ``p = q = P / (1 + P t)``, ``P = u1/u0``."""
    if not u0 > 0.0:
        raise InvalidMetricError("u0 must be positive")
    P = u1 / u0
    J = 1.0 + P * np.asarray(t, dtype=float)
    if np.any(J <= 0.0):
        raise InvalidMetricError(f"metric degenerates at t = {-1.0 / P:g}")
    return u0 * J, P / J


def degeneration_time(u0: float, u1: float) -> float:
    """Time at which the homogeneous metric reaches zero (``inf`` if never)."""
    return -u0 / u1 if u1 < 0 else math.inf
