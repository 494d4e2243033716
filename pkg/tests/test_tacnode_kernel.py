import numpy as np
import pytest

from tacnode_lab.contours import vertical_line
from tacnode_lab.tacnode_kernel import (
    KernelPoint,
    UnsupportedRegime,
    g_coeffs,
    kernel_dtac,
    kernel_dtac_contour,
    kernel_dtac_series,
    kernel_gue_minor,
    kernel_ltilde,
    level_func,
)
from tacnode_lab.theta_integrals import KernelParams

PARAM_SET = [(1, 1, 0.0), (1, 2, 0.5), (2, 2, -0.3)]


def _params(r, rho, beta):
    return KernelParams(r, rho, beta, line=vertical_line(nodes=257))


def test_gue_minor_routes_agree():
    for n1 in (-1, 0, 1, 3):
        for n2 in (-1, 0, 2):
            for x1, x2 in [(-0.7, 0.4), (0.9, 0.9), (0.0, -1.1)]:
                c = kernel_gue_minor(n1, x1, n2, x2, route="contour")
                s = kernel_gue_minor(n1, x1, n2, x2, route="series")
                assert c == pytest.approx(s, abs=1e-9)


def test_gue_minor_vanishes_for_nonpositive_row():
    # series is empty and the Heaviside term is zero off its support
    assert kernel_gue_minor(0, 0.3, 2, -0.5, route="series") == 0.0
    assert kernel_gue_minor(-2, 0.3, 1, 0.5, route="contour") == pytest.approx(
        0.0, abs=1e-10
    )


def test_dtac_series_vs_contour_both_regimes():
    for r, rho, beta in PARAM_SET:
        params = _params(r, rho, beta)
        in_strip = [(0, 0), (0, rho), (rho, rho)]
        above = [(rho, rho), (rho, rho + 1), (rho + 2, rho + 1)]
        for tau1, tau2 in in_strip + above:
            for th1, th2 in [(-0.6, 0.3), (0.4, 0.4), (0.8, -0.5)]:
                p1, p2 = KernelPoint(tau1, th1), KernelPoint(tau2, th2)
                s = kernel_dtac_series(params, p1, p2)
                c = kernel_dtac_contour(params, p1, p2)
                assert s == pytest.approx(c, abs=1e-8)


def test_dtac_involution():
    for r, rho, beta in PARAM_SET:
        params = _params(r, rho, beta)
        for tau1, tau2 in [(0, 1), (0, rho), (rho, rho + 1)]:
            for th1, th2 in [(-0.4, 0.7), (0.2, -0.1)]:
                a = kernel_dtac_contour(
                    params, KernelPoint(tau1, th1), KernelPoint(tau2, th2)
                )
                b = kernel_dtac_contour(
                    params,
                    KernelPoint(rho - tau2, beta - th2),
                    KernelPoint(rho - tau1, beta - th1),
                )
                assert a == pytest.approx(b, abs=1e-8)


def test_series_route_rejects_mixed_regime():
    params = _params(1, 2, 0.0)
    with pytest.raises(UnsupportedRegime):
        kernel_dtac_series(params, KernelPoint(1, 0.0), KernelPoint(3, 0.0))


def test_auto_route_falls_back_to_contour():
    params = _params(1, 2, 0.0)
    p1, p2 = KernelPoint(1, 0.2), KernelPoint(3, -0.1)
    auto = kernel_dtac(params, p1, p2, route="auto")
    contour = kernel_dtac_contour(params, p1, p2)
    assert auto == contour


def test_ltilde_is_conjugated_kernel():
    params = _params(1, 1, 0.0)
    x, y = 0.35, -0.2
    lt = kernel_ltilde(params, 0, x, 1, y, route="series")
    val = kernel_dtac_series(
        params, KernelPoint(0, -2.0 * x), KernelPoint(1, -2.0 * y)
    )
    assert lt == pytest.approx(
        np.exp(y * y / 2.0 - x * x / 2.0) * val, rel=1e-12, abs=1e-15
    )


def test_level_func_blocks():
    params = _params(2, 2, -0.3)
    tau = 4  # two Hermite entries, then the two boundary functions
    from tacnode_lab.special_functions import hermite

    for alpha in (0, 1):
        assert level_func(params, tau, alpha, 0.4) == hermite("tilde", alpha, 0.4)
    C = g_coeffs(params, tau).C
    assert C.shape == (2, 2)
    # boundary functions differ from plain Hermite entries
    assert level_func(params, tau, 2, 0.4) != pytest.approx(
        hermite("tilde", 2, 0.4), abs=1e-6
    )
