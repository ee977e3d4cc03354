"""Closed-form oracles shared by the test modules (not collected by pytest)."""
import math

import numpy as np
import sympy as sp

from hgflow.grid import InitialData, build_grid, sample_function

_x = sp.symbols("x")
U0 = 1 + sp.Rational(1, 2) * sp.sin(_x)
# u1 = u0' / sqrt(u0) makes q vanish, leaving p0 = 2 u0' u0^(-3/2)
U1 = sp.diff(U0, _x) / sp.sqrt(U0)
P0 = 2 * sp.diff(U0, _x) * U0 ** sp.Rational(-3, 2)

u0_f = sp.lambdify(_x, U0, "numpy")
u1_f = sp.lambdify(_x, U1, "numpy")
p0_f = sp.lambdify(_x, P0, "numpy")
dp0_f = sp.lambdify(_x, sp.diff(P0, _x), "numpy")

# inf p0: p0' = 0 reduces to s^2 - 4 s - 3 = 0 in s = sin x, so s = 2 - sqrt 7 with cos x < 0
S_STAR = 2 - math.sqrt(7)
INF_P0 = -math.sqrt(1 - S_STAR ** 2) / (1 + S_STAR / 2) ** 1.5
X_STAR = math.pi - math.asin(S_STAR)
T_BLOWUP = -4.0 / INF_P0


def sine_blowup_init(n):
    g = build_grid(0.0, 2.0 * math.pi, n, "periodic")
    return InitialData(g, sample_function(g, u0_f), sample_function(g, u1_f))


def lagrangian_position(alpha, t):
    """With q = 0, phi is constant along p-characteristics: x = alpha - u0(alpha)^(-1/2) t."""
    return alpha - u0_f(alpha) ** -0.5 * t


def lagrangian_curvature(alpha, t):
    """Exact R on the p-characteristic from alpha; J = 1 + p0 t / 4 is the Jacobian dx/dalpha."""
    J = 1.0 + 0.25 * p0_f(alpha) * t
    return 0.5 * u0_f(alpha) ** -0.5 * dp0_f(alpha) / J ** 3 + p0_f(alpha) ** 2 / (8.0 * J ** 2)


def lagrangian_p(alpha, t):
    return p0_f(alpha) / (1.0 + 0.25 * p0_f(alpha) * t)
