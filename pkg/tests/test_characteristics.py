import math

import numpy as np
import pytest
import sympy as sp

from hgflow.characteristics import (Family, R_along_char_closed_form, determinate_domain,
                                    one_sided_domain, p_along_char_closed_form, sample_along,
                                    trace)
from hgflow.errors import ContractError, DomainError, PastBlowupError
from hgflow.grid import ConformalState, FlowTrajectory, build_grid
from hgflow.solver import SolverConfig, run

from _oracles import INF_P0, T_BLOWUP, X_STAR, lagrangian_p, lagrangian_position, sine_blowup_init


def _static(u, bc="periodic", n=64, times=(0.0, 1.0, 2.0)):
    g = build_grid(0.0, 2.0 * math.pi, n, bc)
    traj = FlowTrajectory(g)
    for t in times:
        traj.append(ConformalState(t, np.full(n, math.log(u)), np.zeros(n), np.zeros(n)))
    return traj


def test_straight_characteristics_in_constant_metric():
    traj = _static(4.0)  # speed 1/2
    c = trace(traj, (0.0, 1.0), Family.PLUS, t_stop=2.0)
    assert c.end == pytest.approx(2.0, abs=1e-12)
    c = trace(traj, (2.0, 3.0), "minus", t_stop=0.0)
    assert c.foot == pytest.approx(4.0, abs=1e-12)
    assert list(c.tau) == [0.0, 1.0, 2.0]


def test_periodic_curves_wrap_and_line_curves_truncate():
    traj = _static(1.0)
    c = trace(traj, (0.0, 6.0), Family.PLUS, t_stop=2.0)
    assert not c.truncated and c.end == pytest.approx(8.0)
    assert sample_along(traj, c, "phi") == pytest.approx(np.zeros(3))
    traj = _static(1.0, "constant_extension")
    c = trace(traj, (0.0, 6.0), Family.PLUS, t_stop=2.0)
    assert c.truncated and c.tau[-1] < 1.0


def test_trace_argument_checks():
    traj = _static(1.0, "constant_extension")
    with pytest.raises(ContractError):
        trace(traj, (0.0, 1.0), Family.PLUS, t_stop=5.0)
    with pytest.raises(DomainError):
        trace(traj, (0.0, -1.0), Family.PLUS, t_stop=1.0)


def test_closed_form_p_solves_riccati():
    p0, t = sp.symbols("p0 t")
    p = p0 / (1 + p0 * t / 4)
    assert sp.simplify(sp.diff(p, t) + p ** 2 / 4) == 0
    assert p_along_char_closed_form(-2.0, 1.0) == -4.0
    assert R_along_char_closed_form(-2.0, 1.0) == pytest.approx(2.0)
    with pytest.raises(PastBlowupError):
        p_along_char_closed_form(-2.0, 2.0)


def test_traced_curves_follow_exact_lagrangian_map():
    traj = run(sine_blowup_init(1024), SolverConfig(t_end=2.0, cfl=0.4, limiter="minmod"))
    assert traj.signal is None
    # minmod clips the minimum of p, so the foot of inf p0 gets a looser relative bound
    for alpha, rtol in ((X_STAR, 2.5e-2), (1.0, 1e-4), (5.0, 1e-3)):
        c = trace(traj, (0.0, alpha), Family.MINUS, t_stop=2.0)
        assert np.abs(c.xi - lagrangian_position(alpha, c.tau)).max() < 1e-4
        p_ex = lagrangian_p(alpha, c.tau)
        p = sample_along(traj, c, "p")
        assert np.abs(p - p_ex).max() < rtol * np.abs(p_ex).max()
    assert lagrangian_p(X_STAR, 2.0) == pytest.approx(INF_P0 / (1 - 2.0 / T_BLOWUP))


def test_sound_determinate_domain_shrinks_from_both_sides():
    d = determinate_domain(-1.0, 1.0, 4.0, 9.0)
    assert d.left(1.0) == -0.5 and d.right(1.0) == 0.5
    assert d.apex == pytest.approx(2.0)
    assert d(1.0, 0.0) and not d(1.0, 0.8) and not d(2.5, 0.0)
    with pytest.raises(DomainError):
        determinate_domain(1.0, -1.0, 1.0, 2.0)


def test_one_sided_domain_apex():
    d = one_sided_domain(0.0, 1.0, 1.0, 4.0)
    assert d.apex == pytest.approx(1.0 / (1.0 - 0.5))
    with pytest.raises(DomainError):
        one_sided_domain(0.0, 1.0, 2.0, 2.0)
