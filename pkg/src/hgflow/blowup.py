"""Blowup-time prediction, detection, locus and curvature growth rate.

For ``u1 = u0' / sqrt(u0)`` the invariant ``q`` vanishes identically and
``p`` obeys the Riccati law ``p' = -p**2 / 4`` along its characteristics,
so the solution ceases to exist at ``T = -4 / inf p0`` with
``p0 = 2 u0' u0**-1.5`` (no blowup when ``inf p0 >= 0``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .characteristics import Family, trace
from .curvature import curvature_field
from .errors import FitError
from .grid import FlowTrajectory, InitialData, gradient4


@dataclass
class Prediction:
    tmax: float
    foot_x0: float
    inf_p0: float
    heuristic: bool


@dataclass
class BlowupReport:
    predicted_tmax: float
    detected_t: float = None
    locus_x: float = None
    growth_exponent: float = None
    foot_x0: float = None
    heuristic: bool = False
    signal_kind: str = None

    def to_dict(self) -> dict:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return "inf" if v > 0 else "-inf"
            return v
        return {k: clean(v) for k, v in self.__dict__.items()}


def predict_tmax(init: InitialData, tol: float = 1e-4) -> Prediction:
    """``-4 / inf p0`` from grid samples; ``foot_x0`` is the (leftmost) argmin.

    The prediction is flagged heuristic when ``u1`` departs from
    ``u0' / sqrt(u0)`` by more than ``tol`` (relative to ``max|u1|``, at
    least 1), since only then is ``q`` identically zero.
    """
    u0, u1 = init.u0, init.u1
    du0 = gradient4(u0, init.grid)
    p0 = 2.0 * du0 * u0 ** -1.5
    mismatch = float(np.max(np.abs(u1 - du0 / np.sqrt(u0))))
    heuristic = mismatch > tol * max(1.0, float(np.max(np.abs(u1))))
    i = int(np.argmin(p0))
    inf_p0 = float(p0[i])
    tmax = -4.0 / inf_p0 if inf_p0 < 0.0 else math.inf
    return Prediction(tmax, float(init.grid.centers[i]), inf_p0, heuristic)


def locus_curve(traj: FlowTrajectory, foot_x0: float):
    """Forward ``p``-characteristic from ``(0, foot_x0)`` to the last snapshot."""
    return trace(traj, (traj.times[0], foot_x0), Family.MINUS, t_stop=traj.times[-1])


def detect(traj: FlowTrajectory, foot_x0: float = None):
    """``(detected_t, locus_x)`` for a run stopped by a gradient signal, else None.

    The locus is the end of the characteristic issued from ``foot_x0``;
    without a foot, or when the curve is truncated, the argmin of ``p`` on
    the last snapshot is used.
    """
    sig = traj.signal
    if sig is None or sig.kind != "gradient":
        return None
    locus = None
    if foot_x0 is not None:
        curve = locus_curve(traj, foot_x0)
        if not curve.truncated:
            locus = curve.end
            if traj.grid.periodic:
                locus = traj.grid.x_min + (locus - traj.grid.x_min) % traj.grid.length
    if locus is None:
        locus = float(traj.grid.centers[int(np.argmin(traj.final.p))])
    return float(sig.t), locus


def max_curvature_series(traj: FlowTrajectory) -> np.ndarray:
    return np.array([curvature_field(s, traj.grid).R.max() for s in traj.snapshots])


def fit_window(t, R, detected_t, factor: float = 10.0, min_points: int = 10):
    """Indices from the first time ``R > factor * R[0]`` up to the last sample before ``detected_t``."""
    t = np.asarray(t, dtype=float)
    R = np.asarray(R, dtype=float)
    keep = t < detected_t
    above = np.flatnonzero(keep & (R > factor * R[0]))
    if above.size == 0:
        raise FitError(f"curvature never exceeds {factor:g} times its initial value")
    idx = np.arange(above[0], np.flatnonzero(keep)[-1] + 1)
    if idx.size < min_points:
        raise FitError(f"only {idx.size} snapshots in the fit window, need {min_points}")
    return idx


def fit_power_growth(t, R, detected_t, factor: float = 10.0, min_points: int = 10):
    """Slope of ``log R`` against ``log(detected_t - t)`` over :func:`fit_window`."""
    t = np.asarray(t, dtype=float)
    R = np.asarray(R, dtype=float)
    idx = fit_window(t, R, detected_t, factor, min_points)
    gap = detected_t - t[idx]
    if np.any(R[idx] <= 0.0):
        raise FitError("curvature must be positive in the fit window")
    slope, _ = np.polyfit(np.log(gap), np.log(R[idx]), 1)
    return float(slope), idx


def fit_growth_exponent(traj: FlowTrajectory, detected_t: float, foot_x0: float = None,
                        factor: float = 10.0, min_points: int = 10) -> float:
    """Growth exponent of curvature as ``t -> detected_t`` (close to -2 for ``R ~ (T-t)**-2``).

    By default ``R`` is the spatial maximum per snapshot.  With ``foot_x0``
    it is ``R`` sampled on the characteristic from that foot instead.
    """
    t = traj.times
    if foot_x0 is None:
        R = max_curvature_series(traj)
    else:
        R = curvature_along(traj, foot_x0)
    return fit_power_growth(t, R, detected_t, factor, min_points)[0]


def curvature_along(traj: FlowTrajectory, foot_x0: float) -> np.ndarray:
    """Grid curvature sampled on the characteristic from ``(0, foot_x0)`` at every snapshot."""
    curve = locus_curve(traj, foot_x0)
    grid = traj.grid
    xc = grid.centers
    out = np.full(len(traj), np.nan)
    for k, s in enumerate(traj.snapshots):
        j = int(np.argmin(np.abs(curve.tau - s.t)))
        R = curvature_field(s, grid).R
        xi = curve.xi[j]
        if grid.periodic:
            xx = np.concatenate([xc, [xc[0] + grid.length]])
            out[k] = np.interp(xc[0] + (xi - xc[0]) % grid.length, xx, np.append(R, R[0]))
        else:
            out[k] = np.interp(xi, xc, R)
    return out


def blowup_report(init: InitialData, traj: FlowTrajectory) -> BlowupReport:
    pred = predict_tmax(init)
    rep = BlowupReport(pred.tmax, foot_x0=pred.foot_x0, heuristic=pred.heuristic)
    if traj.signal is not None:
        rep.signal_kind = traj.signal.kind
        rep.detected_t = float(traj.signal.t)
    found = detect(traj, pred.foot_x0 if math.isfinite(pred.tmax) else None)
    if found is not None:
        rep.detected_t, rep.locus_x = found
        try:
            rep.growth_exponent = fit_growth_exponent(traj, rep.detected_t)
        except FitError:
            rep.growth_exponent = None
    return rep


__all__ = ["Prediction", "BlowupReport", "predict_tmax", "detect", "locus_curve",
           "fit_growth_exponent", "fit_power_growth", "fit_window", "max_curvature_series",
           "curvature_along", "blowup_report"]
