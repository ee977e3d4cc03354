"""Flows of y-independent conformal metrics on the flat torus and their volume law.

The torus is ``[x_min, x_max) x [0, 1)``; metrics do not depend on ``y`` so
the area is the one-dimensional integral of ``u`` over one period.
Integrating ``u_tt = (ln u)_xx - 2k + N`` over a period kills the flux
term, hence ``V'' = const`` and for the flat torus (``k = 0``, ``N = 0``)
``V(t) = V(0) + t * integral(u1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ContractError
from .grid import FlowTrajectory, InitialData
from .solver import SolverConfig, run


@dataclass
class VolumeSeries:
    times: np.ndarray
    volumes: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.volumes = np.asarray(self.volumes, dtype=float)
        if self.times.shape != self.volumes.shape:
            raise ContractError("times and volumes must have equal length")


@dataclass
class VolumeVerdict:
    model: str            # "constant", "linear" or "quadratic"
    coefficients: tuple   # highest degree first, as numpy.polyfit
    slope: float          # dV/dt at t = 0
    chi: float            # Euler characteristic implied by the t^2 coefficient
    residual: float       # relative RMS misfit of the chosen model


def run_periodic(init: InitialData, config: SolverConfig, background_k=None,
                 normalization: float = 0.0) -> FlowTrajectory:
    """Evolve ``u_tt = (ln u)_xx - 2k + normalization`` on a periodic grid.

    With ``k = 0`` and no normalization the plain solver is called with no
    forcing at all, so results are bit-identical to :func:`hgflow.solver.run`.
    """
    if not init.grid.periodic:
        raise ConfigurationError("torus flows need a periodic grid")
    forcing = None
    k = np.zeros(init.grid.n) if background_k is None else np.broadcast_to(
        np.asarray(background_k, dtype=float), (init.grid.n,))
    if np.any(k != 0.0) or normalization != 0.0:
        forcing = -2.0 * k + normalization
    return run(init, config, forcing=forcing)


def normalization_constant(chi: float, volume0: float) -> float:
    """``4 pi chi / V(g0)`` for the normalized flow."""
    return 4.0 * math.pi * chi / volume0


def total_volume(u, dx: float) -> float:
    """Midpoint rule, exact for trigonometric polynomials resolved by the grid."""
    return float(np.sum(u) * dx)


def volume(traj: FlowTrajectory) -> VolumeSeries:
    dx = traj.grid.dx
    return VolumeSeries(traj.times, [total_volume(np.exp(s.phi), dx) for s in traj.snapshots])


def volume_law_predict(chi: float, c1: float, c2: float, t):
    """``V(t) = -2 pi chi t^2 + c1 t + c2``."""
    t = np.asarray(t, dtype=float)
    out = -2.0 * math.pi * chi * t ** 2 + c1 * t + c2
    return float(out) if out.ndim == 0 else out


def volume_constants(init: InitialData):
    """``(c1, c2) = (integral u1, integral u0)`` over one period."""
    dx = init.grid.dx
    return total_volume(init.u1, dx), total_volume(init.u0, dx)


def periodicity_obstruction_check(series: VolumeSeries, rtol: float = 1e-6) -> VolumeVerdict:
    """Classify ``V(t)`` as constant, linear or quadratic.

    The lowest polynomial degree whose RMS misfit is below ``rtol`` times
    the mean volume wins.  A time-periodic solution on the flat torus needs
    the "constant" verdict; a quadratic term ``-2 pi chi t^2`` reveals
    ``chi``.
    """
    t, V = series.times, series.volumes
    if len(t) < 3:
        raise ContractError("need at least three volume samples")
    scale = max(float(np.mean(np.abs(V))), np.finfo(float).tiny)
    best = None
    for deg, name in ((0, "constant"), (1, "linear"), (2, "quadratic")):
        coef = np.polyfit(t, V, deg)
        res = float(np.sqrt(np.mean((np.polyval(coef, t) - V) ** 2))) / scale
        best = (name, coef, res)
        if res <= rtol:
            break
    name, coef, res = best
    full = np.concatenate([np.zeros(3 - len(coef)), coef])
    return VolumeVerdict(name, tuple(float(c) for c in coef), float(full[1]),
                         float(-full[0] / (2.0 * math.pi)), res)


def volume_deviation(series: VolumeSeries, c1: float, c2: float, chi: float = 0.0) -> float:
    """``max |V(t) - V_pred(t)| / V(0)``."""
    pred = volume_law_predict(chi, c1, c2, series.times)
    return float(np.max(np.abs(series.volumes - pred)) / series.volumes[0])
