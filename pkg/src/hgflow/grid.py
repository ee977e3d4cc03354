"""Grids, state containers and sampling helpers shared by every solver."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, ContractError, SamplingError

MIN_CELLS = 8


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    CONSTANT_EXTENSION = "constant_extension"

    @classmethod
    def parse(cls, value) -> "Boundary":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"constantextension": "constant_extension", "constant": "constant_extension"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ConfigurationError(f"unknown boundary kind {value!r}") from None


@dataclass(frozen=True)
class Grid1D:
    """Uniform cell-centred grid on ``[x_min, x_max]``."""

    x_min: float
    x_max: float
    n: int
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise ConfigurationError("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise ConfigurationError(
                f"degenerate interval [{self.x_min}, {self.x_max}]")
        if int(self.n) != self.n or self.n < MIN_CELLS:
            raise ConfigurationError(f"need at least {MIN_CELLS} cells, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "boundary", Boundary.parse(self.boundary))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n) + 0.5) * self.dx

    def interior_mask(self, fraction: float = 0.8) -> np.ndarray:
        """Central ``fraction`` of the cells (all cells on a periodic grid)."""
        if self.periodic:
            return np.ones(self.n, dtype=bool)
        cut = int(round(0.5 * (1.0 - fraction) * self.n))
        mask = np.zeros(self.n, dtype=bool)
        mask[cut:self.n - cut] = True
        return mask


def build_grid(x_min: float, x_max: float, n: int, boundary="periodic") -> Grid1D:
    return Grid1D(float(x_min), float(x_max), n, Boundary.parse(boundary))


def sample_function(grid: Grid1D, f: Callable) -> np.ndarray:
    """Evaluate ``f`` at the cell centres; ``f`` may be vectorised or return a scalar."""
    x = grid.centers
    with np.errstate(all="ignore"):
        try:
            values = f(x)
        except (TypeError, ValueError):
            values = [f(xi) for xi in x]
    values = np.broadcast_to(np.asarray(values, dtype=np.float64), x.shape).copy()
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise SamplingError(f"non-finite sample at x={x[i]:.6g}")
    return values


def l_inf_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ContractError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def pad(values: np.ndarray, grid: Grid1D, width: int = 2, ghosts=None) -> np.ndarray:
    """Return ``values`` with ``width`` ghost cells per side.

    ``ghosts`` optionally supplies explicit ``(left, right)`` ghost arrays,
    overriding the grid's boundary kind.
    """
    if ghosts is not None:
        left, right = ghosts
        return np.concatenate([np.asarray(left, float)[-width:], values,
                               np.asarray(right, float)[:width]])
    mode = "wrap" if grid.periodic else "edge"
    return np.pad(values, width, mode=mode)


def gradient(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Second-order centred first derivative, one-sided at non-periodic edges."""
    dx = grid.dx
    if grid.periodic:
        return (np.roll(values, -1) - np.roll(values, 1)) / (2.0 * dx)
    return np.gradient(values, dx, edge_order=2)


def gradient4(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Fourth-order centred first derivative.

    Non-periodic grids fall back to second-order centred next to the edges
    and second-order one-sided on the edge cells.
    """
    f = values
    dx = grid.dx
    if grid.periodic:
        return (-np.roll(f, -2) + 8.0 * np.roll(f, -1)
                - 8.0 * np.roll(f, 1) + np.roll(f, 2)) / (12.0 * dx)
    d = np.empty_like(f)
    d[2:-2] = (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * dx)
    d[1] = (f[2] - f[0]) / (2.0 * dx)
    d[-2] = (f[-1] - f[-3]) / (2.0 * dx)
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
    d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dx)
    return d


def second_difference(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Second-order second derivative; one-sided four-point stencil at edges."""
    f = values
    dx2 = grid.dx ** 2
    if grid.periodic:
        return (np.roll(f, -1) - 2.0 * f + np.roll(f, 1)) / dx2
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / dx2
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / dx2
    d[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / dx2
    return d


@dataclass
class InitialData:
    """Sampled initial metric ``u0`` and velocity ``u1``, with ``m <= u0 <= M``."""

    grid: Grid1D
    u0: np.ndarray
    u1: np.ndarray
    m: float = None
    M: float = None

    def __post_init__(self):
        from .errors import InvalidMetricError

        self.u0 = np.asarray(self.u0, dtype=np.float64)
        self.u1 = np.asarray(self.u1, dtype=np.float64)
        n = self.grid.n
        if self.u0.shape != (n,) or self.u1.shape != (n,):
            raise ContractError("initial samples must match the grid length")
        if not (np.all(np.isfinite(self.u0)) and np.all(np.isfinite(self.u1))):
            raise SamplingError("initial data contain non-finite samples")
        if np.any(self.u0 <= 0.0):
            i = int(np.argmax(self.u0 <= 0.0))
            raise InvalidMetricError(
                f"u0 must be positive, got {self.u0[i]:.6g} at x={self.grid.centers[i]:.6g}")
        if self.m is None:
            self.m = float(self.u0.min())
        if self.M is None:
            self.M = float(self.u0.max())
        if not (0.0 < self.m <= self.u0.min() and self.u0.max() <= self.M < np.inf):
            raise InvalidMetricError("bounds must satisfy 0 < m <= u0 <= M < inf")

    @classmethod
    def from_functions(cls, grid: Grid1D, u0: Callable, u1: Callable) -> "InitialData":
        return cls(grid, sample_function(grid, u0), sample_function(grid, u1))


@dataclass
class ConformalState:
    """Unknowns ``(phi, p, q)`` of the first-order system at time ``t``; ``phi = ln u``."""

    t: float
    phi: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        if not (len(self.phi) == len(self.p) == len(self.q)):
            raise ContractError("phi, p, q must share the grid length")

    @property
    def u(self) -> np.ndarray:
        return np.exp(self.phi)

    def copy(self) -> "ConformalState":
        return ConformalState(self.t, self.phi.copy(), self.p.copy(), self.q.copy())


@dataclass
class DiagnosticRecord:
    sup_p: float
    sup_q: float
    inf_p: float
    inf_q: float
    sup_abs_r: float
    sup_abs_s: float
    sup_abs_R: float
    volume: float


@dataclass
class FlowTrajectory:
    """Ordered snapshots with one diagnostic record each.

    ``signal`` is set when the run stopped on a blowup/degeneracy signal;
    the last snapshot is then the last state that passed the checks.
    """

    grid: Grid1D
    snapshots: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    signal: object = None
    steps: int = 0

    def append(self, state, record=None):
        if self.snapshots and not state.t > self.snapshots[-1].t:
            raise ContractError("snapshot times must be strictly increasing")
        self.snapshots.append(state)
        self.diagnostics.append(record)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def final(self):
        return self.snapshots[-1]

    def __len__(self):
        return len(self.snapshots)
