"""Conversions between ``(u, u_t)`` and the Riemann invariants ``(phi, p, q)``.

With ``phi = ln u``, ``v = phi_t`` and ``w = phi_x`` the invariants are
``p = v + exp(-phi/2) w`` and ``q = v - exp(-phi/2) w``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlowupRangeError, InvalidMetricError
from .grid import ConformalState, InitialData, gradient4


@dataclass
class AdmissibilityVerdict:
    admissible: bool
    strict_margin: float
    witness_x: float


@dataclass
class HatState:
    hat_p: np.ndarray
    hat_q: np.ndarray


@dataclass
class TildeState:
    tilde_r: np.ndarray
    tilde_s: np.ndarray


def _exp(phi):
    with np.errstate(over="raise"):
        try:
            return np.exp(phi)
        except FloatingPointError:
            raise BlowupRangeError("exp(phi) overflowed") from None


def initial_invariants(init: InitialData) -> ConformalState:
    u0, u1 = init.u0, init.u1
    if np.any(u0 <= 0.0):
        raise InvalidMetricError("u0 must be strictly positive")
    du0 = gradient4(u0, init.grid)
    a = u1 / u0
    b = du0 / u0 ** 1.5
    return ConformalState(0.0, np.log(u0), a + b, a - b)


def state_to_metric(state: ConformalState):
    """Return ``(u, u_t)``; ``u_t = u (p + q) / 2`` since ``phi_t = (p + q) / 2``."""
    if not np.all(np.isfinite(state.phi)):
        raise BlowupRangeError("phi is not finite")
    u = _exp(state.phi)
    return u, 0.5 * u * (state.p + state.q)


def lambda_of(state: ConformalState) -> np.ndarray:
    """Characteristic speed ``exp(-phi/2) = u**-0.5``."""
    with np.errstate(over="ignore"):
        lam = np.exp(-0.5 * state.phi)
    if not np.all(np.isfinite(lam)):
        raise BlowupRangeError("characteristic speed is not finite")
    return lam


def admissibility_margin(init: InitialData) -> np.ndarray:
    """Pointwise ``u1 - |u0'| / sqrt(u0)``."""
    du0 = gradient4(init.u0, init.grid)
    return init.u1 - np.abs(du0) / np.sqrt(init.u0)


def check_admissibility(init: InitialData) -> AdmissibilityVerdict:
    """Grid version of the global-existence condition ``u1 >= |u0'|/sqrt(u0) (+ eps)``.

    ``strict_margin`` is the largest ``eps`` for which the condition holds on
    the samples; the data are admissible when it is non-negative.
    """
    margin = admissibility_margin(init)
    i = int(np.argmin(margin))
    eps = float(margin[i])
    return AdmissibilityVerdict(eps >= 0.0, eps, float(init.grid.centers[i]))


def hat_invariants(state: ConformalState) -> HatState:
    u = _exp(state.phi)
    return HatState(u * state.p, u * state.q)


def tilde_invariants(state: ConformalState, r, s) -> TildeState:
    lam = np.exp(-0.5 * state.phi)
    return TildeState(np.asarray(r) * lam, -np.asarray(s) * lam)
