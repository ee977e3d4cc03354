import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hgflow.errors import ConfigurationError, ContractError
from hgflow.grid import InitialData, build_grid, sample_function
from hgflow.solver import SolverConfig, run
from hgflow.torus import (VolumeSeries, normalization_constant, periodicity_obstruction_check,
                          run_periodic, total_volume, volume, volume_constants,
                          volume_deviation, volume_law_predict)


def _init(n=256, eps=0.3):
    g = build_grid(0, 2 * math.pi, n, "periodic")
    u0 = sample_function(g, lambda x: 1 + 0.3 * np.sin(x))
    u1 = sample_function(g, lambda x: eps + 0.1 * np.cos(2 * x))
    return InitialData(g, u0, u1)


def test_midpoint_volume_exact_for_trig_polynomials():
    g = build_grid(0, 2 * math.pi, 16, "periodic")
    u = sample_function(g, lambda x: 2 + np.sin(x) + 0.5 * np.cos(3 * x))
    assert total_volume(u, g.dx) == pytest.approx(4 * math.pi, rel=1e-14)


def test_volume_constants():
    c1, c2 = volume_constants(_init())
    assert c1 == pytest.approx(0.3 * 2 * math.pi, rel=1e-13)
    assert c2 == pytest.approx(2 * math.pi, rel=1e-13)


def test_flat_torus_volume_is_linear():
    init = _init()
    traj = run_periodic(init, SolverConfig(t_end=2.0, cfl=0.4, limiter="minmod",
                                           snapshot_stride=4))
    series = volume(traj)
    c1, c2 = volume_constants(init)
    assert volume_deviation(series, c1, c2) < 1e-4
    verdict = periodicity_obstruction_check(series, rtol=1e-5)
    assert verdict.model == "linear" and verdict.slope == pytest.approx(c1, rel=1e-4)


def test_unforced_torus_run_is_bit_identical_to_plain_solver():
    init = _init(64)
    cfg = SolverConfig(t_end=0.5)
    a, b = run_periodic(init, cfg).final, run(init, cfg).final
    assert np.array_equal(a.phi, b.phi) and np.array_equal(a.p, b.p)


def test_background_curvature_gives_quadratic_volume():
    # constant k on a homogeneous metric: V'' = -2 k L exactly, i.e. chi = k L / (2 pi)
    n, k = 32, 0.01
    g = build_grid(0, 2 * math.pi, n, "periodic")
    init = InitialData(g, np.ones(n), np.full(n, 0.5))
    traj = run_periodic(init, SolverConfig(t_end=4.0, cfl=0.2, snapshot_stride=2),
                        background_k=k)
    verdict = periodicity_obstruction_check(volume(traj), rtol=1e-6)
    assert verdict.model == "quadratic"
    assert verdict.chi == pytest.approx(k, rel=1e-3)


def test_normalization_constant():
    assert normalization_constant(1.0, 4 * math.pi) == pytest.approx(1.0)


def test_run_periodic_needs_periodic_grid():
    g = build_grid(0, 1, 8, "constant_extension")
    with pytest.raises(ConfigurationError):
        run_periodic(InitialData(g, np.ones(8), np.zeros(8)), SolverConfig())


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-3, 3), st.floats(1, 10))
def test_verdict_classifies_exact_polynomials(chi, c1, c2):
    t = np.linspace(0, 1, 20)
    verdict = periodicity_obstruction_check(VolumeSeries(t, volume_law_predict(chi, c1, c2, t)
                                                         + 100.0), rtol=1e-9)
    if abs(chi) > 1e-3:
        assert verdict.model == "quadratic" and verdict.chi == pytest.approx(chi, rel=1e-6)
    assert verdict.residual <= 1e-9 or verdict.model == "quadratic"


def test_verdict_needs_three_samples():
    with pytest.raises(ContractError):
        periodicity_obstruction_check(VolumeSeries([0, 1], [1, 1]))
    with pytest.raises(ContractError):
        VolumeSeries([0, 1], [1])
