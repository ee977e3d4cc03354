"""Scenario files: ``key = value`` lines under ``[domain]``, ``[time]``, ``[initial]``, ``[output]``.

Example::

    [domain]
    kind = torus
    x_min = 0
    x_max = 6.283185307179586
    n = 512

    [time]
    t_end = 20

    [initial]
    u0 = "1 + 0.3*cos(x)"
    u1 = "0.2 + 0.1*sin(x)"

Initial data come from expressions (see :mod:`hgflow.expr`) or from a
named preset whose parameters can be set in ``[initial]``.
"""
from __future__ import annotations

import configparser
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, HGFError
from .exact import (SeparableSolution, TravelingWaveSolution, separable_eval,
                    separable_invariants, separable_velocity, traveling_wave_eval,
                    traveling_wave_velocity)
from .expr import parse_expression
from .grid import Boundary, ConformalState, Grid1D, InitialData
from .solver import Limiter, SolverConfig

log = logging.getLogger(__name__)

KINDS = ("line", "torus", "radial")

# key -> converter, per section
SCHEMA = {
    "domain": {"kind": str, "x_min": float, "x_max": float, "r_min": float, "r_max": float,
               "n": int, "boundary": str},
    "time": {"t_end": float, "cfl": float, "snapshot_stride": int, "max_steps": int,
             "limiter": str},
    "initial": {"u0": str, "u1": str, "preset": str, "epsilon": float,
                "c": float, "a": float, "b": float, "C": float,
                "wave_speed": float, "c1": float, "c2": float},
    "output": {"dir": str, "emit_fields": bool, "emit_volume": bool,
               "emit_blowup_report": bool},
}

SWEEPABLE = {"n": ("domain", "n"), "cfl": ("time", "cfl"),
             "epsilon": ("initial", "epsilon"), "c": ("initial", "c")}

TWO_PI = 2.0 * math.pi

PRESETS = {
    "flat": {
        "doc": "u0 = 1, u1 = 0 on the torus: static flat metric",
        "domain": {"kind": "torus", "x_min": 0.0, "x_max": TWO_PI, "n": 256},
        "time": {"t_end": 1.0},
        "initial": {},
    },
    "sine_admissible": {
        "doc": "u0 = 1 + 0.5 sin x, u1 = |u0'|/sqrt(u0) + epsilon: global solution, curvature decays",
        "domain": {"kind": "torus", "x_min": 0.0, "x_max": TWO_PI, "n": 512},
        "time": {"t_end": 50.0},
        "initial": {"epsilon": 0.5},
    },
    "sine_blowup": {
        "doc": "u0 = 1 + 0.5 sin x, u1 = u0'/sqrt(u0): q = 0 and p blows up at -4/inf p0",
        "domain": {"kind": "torus", "x_min": 0.0, "x_max": TWO_PI, "n": 4096},
        "time": {"t_end": 6.0, "limiter": "minmod"},
        "initial": {},
    },
    "separable": {
        "doc": "u = ((c/2)t^2 + a t + b)(C - sqrt(c/2) x)^-2 on [0, 4]: curvature c/((c/2)t^2+at+b)",
        "domain": {"kind": "line", "x_min": 0.0, "x_max": 4.0, "n": 1024},
        "time": {"t_end": 1.0, "limiter": "minmod"},
        "initial": {"c": 2.0, "a": 0.0, "b": 1.0, "C": 10.0},
    },
    "traveling_wave": {
        "doc": "u = exp(f(x - a t)) with a^2 e^f - f = c1 (x - a t) + c2",
        "domain": {"kind": "line", "x_min": -10.0, "x_max": 10.0, "n": 1024},
        "time": {"t_end": 1.0},
        "initial": {"wave_speed": 0.5, "c1": 0.05, "c2": 0.25},
    },
}

_PRESET_KEYS = {
    "flat": set(), "sine_blowup": set(), "sine_admissible": {"epsilon"},
    "separable": {"c", "a", "b", "C"}, "traveling_wave": {"wave_speed", "c1", "c2"},
}


@dataclass
class Scenario:
    kind: str
    x_min: float
    x_max: float
    n: int
    boundary: Boundary
    solver: SolverConfig
    u0: str = None
    u1: str = None
    preset: str = None
    params: dict = field(default_factory=dict)
    out_dir: str = "out"
    emit_fields: bool = True
    emit_volume: bool = True
    emit_blowup_report: bool = True
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def window(self) -> Grid1D:
        return Grid1D(self.x_min, self.x_max, self.n, self.boundary)


@dataclass
class Setup:
    """Computational grid and initial state for a scenario.

    ``window`` selects the user's cells inside the (possibly padded) grid.
    """

    grid: Grid1D
    window: slice
    init: InitialData
    state: object
    pad_cells: tuple = (0, 0)


def _strip_quotes(value: str) -> str:
    v = value.strip()
    if len(v) >= 2 and v[0] == v[-1] and v[0] in "\"'":
        return v[1:-1]
    return v


def _convert(section, key, value):
    conv = SCHEMA[section][key]
    value = _strip_quotes(value)
    try:
        if conv is bool:
            low = value.lower()
            if low in ("1", "yes", "true", "on"):
                return True
            if low in ("0", "no", "false", "off"):
                return False
            raise ValueError(value)
        if conv is int:
            f = float(value)
            if f != int(f):
                raise ValueError(value)
            return int(f)
        return conv(value)
    except ValueError:
        raise ConfigurationError(
            f"[{section}] {key}: cannot read {value!r} as {conv.__name__}") from None


def read_sections(text: str) -> dict:
    """Parse config text into ``{section: {key: str}}`` and reject unknown names."""
    cp = configparser.ConfigParser(interpolation=None, strict=True,
                                   comment_prefixes=("#", ";"), inline_comment_prefixes=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None
    raw = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigurationError(f"unknown section [{section}]")
        raw[section] = {}
        for key, value in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigurationError(f"unknown key {key!r} in [{section}]")
            raw[section][key] = value
    return raw


def parse_config(text: str) -> Scenario:
    return build_scenario(read_sections(text))


def build_scenario(raw: dict) -> Scenario:
    vals = {s: {k: _convert(s, k, v) for k, v in keys.items()} for s, keys in raw.items()}
    dom = vals.get("domain", {})
    tim = vals.get("time", {})
    ini = vals.get("initial", {})
    out = vals.get("output", {})

    preset = ini.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigurationError(
                f"unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))}")
        if "u0" in ini or "u1" in ini:
            raise ConfigurationError("give either a preset or u0/u1 expressions, not both")
        defaults = PRESETS[preset]
        dom = {**defaults["domain"], **dom}
        tim = {**defaults["time"], **tim}
        ini = {**defaults["initial"], **ini}
        extra = set(ini) - {"preset"} - _PRESET_KEYS[preset]
        if extra:
            raise ConfigurationError(
                f"preset {preset!r} does not use {', '.join(sorted(extra))}")
    else:
        for key in ("u0", "u1"):
            if key not in ini:
                raise ConfigurationError(f"missing required key [initial] {key}")
        extra = set(ini) - {"u0", "u1"}
        if extra:
            raise ConfigurationError(
                f"{', '.join(sorted(extra))} only apply to presets")

    kind = str(dom.get("kind", "")).lower()
    if kind not in KINDS:
        raise ConfigurationError(
            f"[domain] kind must be one of {', '.join(KINDS)}, got {kind or 'nothing'!r}")
    lo_key, hi_key = ("r_min", "r_max") if kind == "radial" else ("x_min", "x_max")
    wrong = {"x_min", "x_max"} if kind == "radial" else {"r_min", "r_max"}
    if wrong & set(dom):
        raise ConfigurationError(f"{kind} domains use {lo_key}/{hi_key}")
    for key in (lo_key, hi_key):
        if key not in dom:
            raise ConfigurationError(f"missing required key [domain] {key}")
    if "t_end" not in tim:
        raise ConfigurationError("missing required key [time] t_end")

    default_boundary = "periodic" if kind == "torus" else "constant_extension"
    try:
        boundary = Boundary.parse(dom.get("boundary", default_boundary))
    except HGFError:
        raise
    except Exception:
        raise ConfigurationError(f"unknown boundary {dom.get('boundary')!r}") from None
    if kind == "torus" and boundary is not Boundary.PERIODIC:
        raise ConfigurationError("torus domains must be periodic")
    if kind != "torus" and boundary is Boundary.PERIODIC:
        raise ConfigurationError(f"{kind} domains use constant_extension boundaries")

    try:
        limiter = Limiter(str(tim.get("limiter", "none")).lower())
    except ValueError:
        raise ConfigurationError(f"unknown limiter {tim.get('limiter')!r}") from None
    solver = SolverConfig(cfl=tim.get("cfl", 0.5), t_end=tim["t_end"],
                          snapshot_stride=tim.get("snapshot_stride", 10),
                          max_steps=tim.get("max_steps", 10_000_000), limiter=limiter)
    params = {k: v for k, v in ini.items() if k not in ("u0", "u1", "preset")}
    sc = Scenario(kind=kind, x_min=dom[lo_key], x_max=dom[hi_key], n=dom.get("n", 256),
                  boundary=boundary, solver=solver, u0=ini.get("u0"), u1=ini.get("u1"),
                  preset=preset, params=params, out_dir=out.get("dir", "out"),
                  emit_fields=out.get("emit_fields", True),
                  emit_volume=out.get("emit_volume", True),
                  emit_blowup_report=out.get("emit_blowup_report", True), raw=raw)
    sc.window  # validates the interval and n
    prepare(sc)  # validates the initial data on the grid
    return sc


def with_override(sc: Scenario, key: str, value: str) -> Scenario:
    """Copy of the scenario with one sweepable key replaced."""
    if key not in SWEEPABLE:
        raise ConfigurationError(
            f"{key!r} is not sweepable; choose from {', '.join(sorted(SWEEPABLE))}")
    section, name = SWEEPABLE[key]
    raw = {s: dict(v) for s, v in sc.raw.items()}
    raw.setdefault(section, {})[name] = str(value)
    return build_scenario(raw)


# initial data ------------------------------------------------------------

def _sample(text: str, name: str, coords) -> np.ndarray:
    expr = parse_expression(text)
    vals = expr.evaluate(x=coords, r=coords)
    if not np.all(np.isfinite(vals)):
        i = int(np.argmax(~np.isfinite(vals)))
        raise ConfigurationError(f"{name} is not finite at {coords[i]:.6g}")
    return vals


def _preset_data(sc: Scenario, coords, t=0.0):
    """``(u0, u1, exact_state_or_None)`` for a preset."""
    p = sc.params
    if sc.preset == "flat":
        return np.ones_like(coords), np.zeros_like(coords), None
    if sc.preset in ("sine_admissible", "sine_blowup"):
        u0 = 1.0 + 0.5 * np.sin(coords)
        du0 = 0.5 * np.cos(coords)
        if sc.preset == "sine_blowup":
            return u0, du0 / np.sqrt(u0), None
        return u0, np.abs(du0) / np.sqrt(u0) + p.get("epsilon", 0.5), None
    if sc.preset == "separable":
        sol = separable_solution(sc)
        st = ConformalState(0.0, *separable_invariants(sol, 0.0, coords))
        return separable_eval(sol, 0.0, coords), separable_velocity(sol, 0.0, coords), st
    sol = traveling_wave_solution(sc)
    return traveling_wave_eval(sol, 0.0, coords), traveling_wave_velocity(sol, 0.0, coords), None


def separable_solution(sc: Scenario) -> SeparableSolution:
    p = sc.params
    return SeparableSolution(c=p.get("c", 2.0), a=p.get("a", 0.0), b=p.get("b", 1.0),
                             C=p.get("C", 10.0))


def traveling_wave_solution(sc: Scenario) -> TravelingWaveSolution:
    p = sc.params
    return TravelingWaveSolution(a=p.get("wave_speed", 0.5), c1=p.get("c1", 0.05),
                                 c2=p.get("c2", 0.25))


def _initial_samples(sc: Scenario, coords):
    try:
        if sc.preset is not None:
            u0, u1, exact = _preset_data(sc, coords)
        else:
            u0, u1, exact = _sample(sc.u0, "u0", coords), _sample(sc.u1, "u1", coords), None
    except ConfigurationError:
        raise
    except HGFError as exc:
        raise ConfigurationError(f"initial data: {exc}") from None
    if np.any(u0 <= 0.0):
        i = int(np.argmax(u0 <= 0.0))
        raise ConfigurationError(
            f"u0 must be positive, got {u0[i]:.6g} at {coords[i]:.6g}")
    return u0, u1, exact


def _padded_grid(sc: Scenario, left: int, right: int) -> Grid1D:
    dx = (sc.x_max - sc.x_min) / sc.n
    return Grid1D(sc.x_min - left * dx, sc.x_max + right * dx, sc.n + left + right, sc.boundary)


def padding_cells(sc: Scenario):
    """Cells ``(left, right)`` added so the user window stays clear of boundary influence.

    The width is ``t_end * m**-0.5`` with ``m`` the minimum of ``u0`` over the
    padded grid (iterated until stable).  Torus runs and the separable preset,
    whose invariants are exactly constant across the boundary, use none.
    Radial grids are clipped on the inside so that ``r_min >= 10 dr``.
    """
    if sc.kind == "torus" or sc.preset == "separable":
        return 0, 0
    dx = (sc.x_max - sc.x_min) / sc.n
    max_left = max(0, int(math.floor(sc.x_min / dx)) - 10) if sc.kind == "radial" else None
    left = right = 0
    for _ in range(50):
        u0 = _initial_samples(sc, _padded_grid(sc, left, right).centers)[0]
        need = int(math.ceil(sc.solver.t_end * float(u0.min()) ** -0.5 / dx))
        new_left = need if max_left is None else min(need, max_left)
        if need <= right and new_left <= left:
            break
        left, right = max(left, new_left), max(right, need)
    if max_left is not None and left < right:
        log.warning("radial padding clipped at the inner edge to keep r_min >= 10 dr")
    return left, right


def prepare(sc: Scenario) -> Setup:
    left, right = padding_cells(sc)
    grid = _padded_grid(sc, left, right)
    if sc.kind == "radial" and grid.x_min < 10.0 * grid.dx:
        raise ConfigurationError(
            f"r_min = {sc.x_min:g} must be at least 10 dr = {10 * grid.dx:g}")
    u0, u1, exact = _initial_samples(sc, grid.centers)
    try:
        init = InitialData(grid, u0, u1)
    except HGFError as exc:
        raise ConfigurationError(f"initial data: {exc}") from None
    return Setup(grid, slice(left, left + sc.n), init, exact, (left, right))
