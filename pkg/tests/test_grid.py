import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hgflow.errors import ConfigurationError, ContractError, SamplingError
from hgflow.grid import (Boundary, FlowTrajectory, ConformalState, InitialData, build_grid,
                         gradient, gradient4, l_inf_distance, pad, sample_function,
                         second_difference)


def test_build_grid_spacing():
    assert build_grid(0, 2 * math.pi, 8, "periodic").dx == pytest.approx(math.pi / 4)
    g = build_grid(-10, 10, 8, "constant_extension")
    assert g.dx == 2.5
    assert g.boundary is Boundary.CONSTANT_EXTENSION


@pytest.mark.parametrize("args", [(1, 1, 8), (2, 1, 8), (0, 1, 7)])
def test_build_grid_rejects_degenerate(args):
    with pytest.raises(ConfigurationError):
        build_grid(*args, "periodic")


def test_centers_are_cell_midpoints():
    g = build_grid(0, 1, 8)
    assert np.allclose(g.centers, (np.arange(8) + 0.5) / 8)


def test_sample_constant_and_exp():
    g = build_grid(0, 1, 16)
    assert np.array_equal(sample_function(g, lambda x: np.ones_like(x)), np.ones(16))
    g = build_grid(0.5, 1.5, 8)  # centers include 1.0 only approximately; use x_min shift
    g = build_grid(1 - 1 / 16, 1 + 15 / 16, 8)
    assert sample_function(g, np.exp)[0] == pytest.approx(math.e, rel=1e-15)


def test_sample_sine_exact_values():
    # four-cell example promoted to the smallest legal grid: centers pi/8 + k pi/4
    g = build_grid(0, 2 * math.pi, 8)
    s = sample_function(g, np.sin)
    assert np.allclose(s, np.sin(np.pi / 8 + np.arange(8) * np.pi / 4), atol=1e-15)
    # the odd-indexed centers are the quarter points 3pi/8.. ; check symmetric pairs
    assert s[1] == pytest.approx(s[2]) and s[5] == pytest.approx(s[6])


def test_sample_rejects_nonfinite():
    g = build_grid(-1, 1, 8)
    with pytest.raises(SamplingError):
        sample_function(g, lambda x: 1.0 / x * 0 + np.log(x))


def test_l_inf_distance_examples():
    assert l_inf_distance([1, 2], [1, 2]) == 0
    assert l_inf_distance([0, 0], [0, 3]) == 3
    assert l_inf_distance([-1], [1]) == 2
    with pytest.raises(ContractError):
        l_inf_distance([1, 2], [1])


@settings(max_examples=50, deadline=None)
@given(st.floats(-1e3, 1e3), st.integers(8, 64))
def test_sampling_constant_is_constant(c, n):
    g = build_grid(-3.0, 5.0, n, "constant_extension")
    v = sample_function(g, lambda x: np.full_like(x, c))
    assert np.all(v == c)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=8, max_size=40))
def test_constant_extension_ghosts_copy_edges(values):
    v = np.array(values)
    g = build_grid(0, 1, len(v), "constant_extension")
    p = pad(v, g, 2)
    assert p[0] == p[1] == v[0] and p[-1] == p[-2] == v[-1]
    assert np.array_equal(p[2:-2], v)


def test_periodic_ghosts_wrap():
    v = np.arange(8.0)
    p = pad(v, build_grid(0, 1, 8, "periodic"), 2)
    assert list(p[:2]) == [6.0, 7.0] and list(p[-2:]) == [0.0, 1.0]


def test_derivative_orders():
    errs2, errs4 = [], []
    for n in (64, 128):
        g = build_grid(0, 2 * math.pi, n, "periodic")
        x = g.centers
        errs2.append(np.abs(gradient(np.sin(x), g) - np.cos(x)).max())
        errs4.append(np.abs(gradient4(np.sin(x), g) - np.cos(x)).max())
    assert math.log2(errs2[0] / errs2[1]) == pytest.approx(2, abs=0.05)
    assert math.log2(errs4[0] / errs4[1]) == pytest.approx(4, abs=0.1)


def test_nonperiodic_second_difference_is_exact_on_cubics():
    g = build_grid(0, 1, 16, "constant_extension")
    x = g.centers
    f = 1 + x - 3 * x ** 2 + 2 * x ** 3
    assert np.allclose(second_difference(f, g), -6 + 12 * x, atol=1e-9)
    assert np.allclose(gradient4(f, g)[2:-2], 1 - 6 * x[2:-2] + 6 * x[2:-2] ** 2, atol=1e-10)


def test_initial_data_bounds():
    g = build_grid(0, 1, 8)
    init = InitialData(g, np.linspace(1, 2, 8), np.zeros(8))
    assert init.m == 1 and init.M == 2
    with pytest.raises(Exception):
        InitialData(g, np.linspace(-1, 2, 8), np.zeros(8))
    with pytest.raises(Exception):
        InitialData(g, np.ones(8), np.zeros(8), m=2.0)


def test_trajectory_requires_increasing_times():
    g = build_grid(0, 1, 8)
    s = ConformalState(0.0, np.zeros(8), np.zeros(8), np.zeros(8))
    traj = FlowTrajectory(g)
    traj.append(s)
    with pytest.raises(ContractError):
        traj.append(s)
