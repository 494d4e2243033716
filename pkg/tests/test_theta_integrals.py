import math

import numpy as np
import pytest

from tacnode_lab.contours import circle, vertical_line, integrate_nd
from tacnode_lab.theta_integrals import (
    KernelParams,
    PoleOnContour,
    gamma_coeffs,
    sym_funcs,
    theta_pm,
    theta_r,
    theta_zero,
)


def _params(r, rho, beta=0.0, nodes=129):
    return KernelParams(r, rho, beta, line=vertical_line(nodes=nodes))


def _fold_tensor(params, n, one_var):
    """Direct tensor-product assembly of an n-fold strip integral with
    squared Vandermonde and per-variable factor one_var(w); the
    production moment-determinant routes must match this exactly."""
    rho, beta = params.rho, params.beta

    def integrand(*w):
        val = 1.0
        for i in range(n):
            for j in range(i + 1, n):
                val = val * (w[i] - w[j]) ** 2
        for wa in w:
            val = val * np.exp(2.0 * wa * wa + beta * wa) / wa**rho * one_var(wa)
        return val

    return integrate_nd([params.line] * n, integrand)


def test_theta_r_matches_tensor_route():
    for r, rho in [(1, 1), (2, 2)]:
        params = _params(r, rho, beta=0.4)
        for u, v in [(0.1, 2.0), (0.05 + 0.1j, 1.5 - 0.8j)]:
            fast = theta_r(params, u, v)
            slow = _fold_tensor(params, r, lambda w: (v - w) / (u - w))
            assert abs(fast - slow) / abs(slow) < 1e-12


def test_theta_pm_match_tensor_route():
    for r, rho in [(2, 2), (3, 3)]:
        params = _params(r, rho, beta=-0.2)
        u, v = 0.1 + 0.05j, 1.8 - 0.4j
        plus = theta_pm(params, +1, u, v)
        slow = _fold_tensor(params, r - 1, lambda w: (v - w) * (u - w))
        assert abs(plus - slow) / abs(slow) < 1e-12
    params = _params(1, 1)
    u, v = 0.1 + 0.05j, 0.02 - 0.08j
    minus = theta_pm(params, -1, np.array([u]), np.array([v]))[0]
    slow = _fold_tensor(params, 2, lambda w: 1.0 / ((v - w) * (u - w)))
    assert abs(minus - slow) / abs(slow) < 1e-12


def test_theta_zero_is_theta_r_at_origin():
    for r, rho in [(1, 1), (2, 3)]:
        params = _params(r, rho)
        assert abs(theta_r(params, 0.0, 0.0) - theta_zero(params)) < 1e-12 * abs(
            theta_zero(params)
        )


def test_theta_plus_symmetric_in_uv():
    params = _params(2, 2, beta=-0.3)
    u, v = 0.1 + 0.2j, 1.7 - 0.5j
    a = theta_pm(params, +1, u, v)
    b = theta_pm(params, +1, v, u)
    assert abs(a - b) <= 1e-12 * max(abs(a), 1.0)


def test_theta_plus_r1_is_one():
    params = _params(1, 2)
    assert theta_pm(params, +1, 0.3, 1.2) == 1.0


def test_theta_minus_diagonal_continuity():
    params = _params(1, 1)
    u = 0.12 + 0.05j
    exact = theta_pm(params, -1, np.array([u]), np.array([u]))[0]
    nearby = theta_pm(params, -1, np.array([u]), np.array([u + 1e-7]))[0]
    assert abs(exact - nearby) / abs(exact) < 1e-5


def test_pole_on_contour_rejected():
    params = _params(1, 1)
    with pytest.raises(PoleOnContour):
        theta_r(params, 1.0 + 0.0j, 2.0)  # sits on the w-line Re = 1


def test_sym_funcs_small_cases():
    w = [2.0, 3.0, 5.0]
    assert sym_funcs(w, "elementary", 0) == 1.0
    assert sym_funcs(w, "elementary", 1) == pytest.approx(10.0)
    assert sym_funcs(w, "elementary", 2) == pytest.approx(31.0)
    assert sym_funcs(w, "elementary", 3) == pytest.approx(30.0)
    assert sym_funcs(w, "complete", 2) == pytest.approx(
        4 + 9 + 25 + 6 + 10 + 15
    )
    with pytest.raises(ValueError):
        sym_funcs(w, "weird", 1)


def test_gamma_tilde_r1_value():
    params = _params(1, 2)
    table = gamma_coeffs(params, 0)
    assert table.gamma_tilde.shape == (1, 1)
    assert table.gamma_tilde[0, 0] == pytest.approx(
        1.0 / theta_zero(params).real, rel=1e-12
    )


def test_gamma_tables_real_and_cached():
    params = _params(2, 2)
    t1 = gamma_coeffs(params, 1)
    t2 = gamma_coeffs(params, 1)
    assert t1 is t2
    assert t1.gamma.dtype == np.float64
    assert t1.gamma_tilde.shape == (2, 2)
    assert t1.det_gamma_tilde == pytest.approx(np.linalg.det(t1.gamma_tilde))


def test_params_validation():
    with pytest.raises(ValueError):
        KernelParams(0, 1)
    with pytest.raises(ValueError):
        KernelParams(2, 1)
    with pytest.raises(ValueError):
        KernelParams(1, 1, circle=circle(radius=2.0))
