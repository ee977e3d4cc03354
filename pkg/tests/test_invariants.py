import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from hgflow.errors import InvalidMetricError
from hgflow.grid import ConformalState, InitialData, build_grid, sample_function
from hgflow.invariants import (check_admissibility, hat_invariants, initial_invariants,
                               lambda_of, state_to_metric, tilde_invariants)


def _sine_init(n=512, u1=0.0):
    g = build_grid(0, 2 * math.pi, n, "periodic")
    u0 = sample_function(g, lambda x: 1 + 0.5 * np.sin(x))
    return InitialData(g, u0, np.full(n, u1))


def test_initial_invariants_match_symbolic_oracle():
    x = sp.symbols("x")
    u0 = 1 + sp.Rational(1, 2) * sp.sin(x)
    u1 = sp.Rational(1, 5) * sp.cos(x)
    phi = sp.log(u0)
    v = u1 / u0
    w = sp.exp(-phi / 2) * sp.diff(phi, x)
    p_f = sp.lambdify(x, v + w, "numpy")
    q_f = sp.lambdify(x, v - w, "numpy")
    g = build_grid(0, 2 * math.pi, 256, "periodic")
    xs = g.centers
    init = InitialData(g, sp.lambdify(x, u0, "numpy")(xs), sp.lambdify(x, u1, "numpy")(xs))
    s = initial_invariants(init)
    assert np.allclose(s.phi, np.log(init.u0), atol=1e-15)
    assert np.abs(s.p - p_f(xs)).max() < 1e-7
    assert np.abs(s.q - q_f(xs)).max() < 1e-7


def test_flat_metric_has_zero_invariants():
    g = build_grid(0, 1, 16, "periodic")
    s = initial_invariants(InitialData(g, np.ones(16), np.zeros(16)))
    assert np.all(s.phi == 0) and np.all(s.p == 0) and np.all(s.q == 0)


def test_nonpositive_u0_rejected():
    g = build_grid(0, 1, 8)
    u0 = np.ones(8)
    u0[3] = 0.0
    with pytest.raises(InvalidMetricError):
        InitialData(g, u0, np.zeros(8))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.9), st.floats(-1, 1), st.floats(0.5, 3))
def test_round_trip_metric(amp, vel, k):
    g = build_grid(0, 2 * math.pi, 64, "periodic")
    x = g.centers
    u0 = 1 + amp * np.sin(x)
    u1 = vel * np.cos(k * x)
    u, ut = state_to_metric(initial_invariants(InitialData(g, u0, u1)))
    assert np.allclose(u, u0, rtol=1e-13)
    assert np.allclose(ut, u1, atol=1e-12)


def test_lambda_is_inverse_sqrt_u():
    s = ConformalState(0.0, np.log(np.array([1.0, 4.0, 0.25])), np.zeros(3), np.zeros(3))
    assert np.allclose(lambda_of(s), [1.0, 0.5, 2.0])


def test_admissibility_margin_closed_form():
    # With u1 = 0 the margin is -max |cos x| / (2 sqrt(1 + sin(x)/2)).
    # Squaring and writing s = sin x, the maximum of (1 - s^2)/(1 + s/2)
    # sits at s^2 + 4s + 1 = 0, giving margin -sqrt(2 - sqrt(3)).
    exact = -math.sqrt(2 - math.sqrt(3))
    assert exact == pytest.approx((math.sqrt(2) - math.sqrt(6)) / 2, abs=1e-15)
    v = check_admissibility(_sine_init(4096))
    assert not v.admissible
    assert v.strict_margin == pytest.approx(exact, abs=1e-7)
    assert v.witness_x == pytest.approx(math.pi + math.asin(2 - math.sqrt(3)), abs=2e-3)


def test_admissibility_accepts_large_velocity():
    v = check_admissibility(_sine_init(512, u1=0.6))
    assert v.admissible and v.strict_margin == pytest.approx(0.6 - math.sqrt(2 - math.sqrt(3)),
                                                             abs=1e-5)


def test_hat_and_tilde_definitions():
    s = ConformalState(0.0, np.log(np.array([4.0])), np.array([1.5]), np.array([-0.5]))
    h = hat_invariants(s)
    assert h.hat_p[0] == 6.0 and h.hat_q[0] == -2.0
    t = tilde_invariants(s, np.array([2.0]), np.array([3.0]))
    assert t.tilde_r[0] == 1.0 and t.tilde_s[0] == -1.5
