"""The GUE-minor kernel and the discrete tacnode kernel, each by two
independent routes: direct double-contour quadrature and finite
Hermite/phi series.  The series route exists only on the two supported
level regimes (both levels above the strip, or both inside it); the
contour route works everywhere and backs the involution check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .special_functions import hermite, phi, heaviside_pow
from .theta_integrals import (
    KernelParams,
    gamma_coeffs,
    theta_pm,
    theta_r,
    theta_zero,
)

__all__ = [
    "KernelPoint",
    "GCoeffs",
    "UnsupportedRegime",
    "kernel_gue_minor",
    "kernel_dtac_contour",
    "kernel_dtac_series",
    "kernel_dtac",
    "kernel_ltilde",
    "g_coeffs",
    "level_func",
]


class UnsupportedRegime(ValueError):
    """Level pair outside the two regimes with a closed series form."""


@dataclass(frozen=True)
class KernelPoint:
    """A level index tau with a continuum position theta along it."""

    tau: int
    theta: float


@dataclass(frozen=True)
class GCoeffs:
    """Coefficients of the boundary functions G at one level tau.

    C has shape (r, tau - rho); row k holds the Hermite-block
    coefficients of G_{tau-rho+k}.
    """

    tau: int
    C: np.ndarray


def _heaviside_2scaled(m: int, x: float, y: float) -> float:
    # The series formulas carry H^m(2(x-y)); the factor 2 lives here only.
    return heaviside_pow(m, 2.0 * (x - y))


def _pair_weights(rule_u, rule_v):
    return rule_u.weights[:, None] * rule_v.weights[None, :]


def kernel_gue_minor(
    n1: int,
    x1: float,
    n2: int,
    x2: float,
    params: KernelParams | None = None,
    route: str = "contour",
) -> float:
    """GUE-minor kernel K(n1, x1; n2, x2).

    The contour route is a circle/vertical-line double integral; the
    series route is the finite Hermite-phi sum (empty for n1 <= 0).
    Quadrature rules are taken from params when given.
    """
    if route == "series":
        total = -heaviside_pow(n1 - n2, x1 - x2)
        for j in range(n1):
            total += hermite("tilde", n1 - j - 1, x1 / 2.0) * phi(j - n2, -x2 / 2.0)
        return total
    if route != "contour":
        raise ValueError(f"unknown route {route!r}")
    from .contours import circle as circle_rule, vertical_line

    cr = params.circle if params is not None else circle_rule()
    ln = params.line if params is not None else vertical_line()
    u = cr.points[:, None]
    v = ln.points[None, :]
    integrand = (
        1.0
        / (v - u)
        * v**n2
        / u**n1
        * np.exp(-u * u + x1 * u)
        * np.exp(v * v - x2 * v)
    )
    val = np.sum(_pair_weights(cr, ln) * integrand)
    return -heaviside_pow(n1 - n2, x1 - x2) + float(val.real)


def kernel_dtac_contour(params: KernelParams, p1: KernelPoint, p2: KernelPoint) -> float:
    """Discrete tacnode kernel by direct quadrature of its defining
    double-contour representation (base GUE-minor term plus four
    strip-interaction corrections)."""
    tau1, th1 = p1.tau, p1.theta
    tau2, th2 = p2.tau, p2.theta
    rho, r, beta = params.rho, params.r, params.beta
    t0 = theta_zero(params)
    cr, ln = params.circle, params.line

    total = kernel_gue_minor(tau1 - rho, -th1, tau2 - rho, -th2, params)

    # term 1: u on the circle, v on the line, Theta_r difference quotient
    u = cr.points[:, None]
    v = ln.points[None, :]
    w_cl = _pair_weights(cr, ln)
    th_uv = theta_r(params, u, v)
    f1 = (
        1.0
        / (v - u)
        * v ** (tau2 - rho)
        / u ** (tau1 - rho)
        * np.exp(-u * u - th1 * u)
        * np.exp(v * v + th2 * v)
        * (th_uv - t0)
        / t0
    )
    total += float(np.sum(w_cl * f1).real)

    # term 2: both variables on the line, Theta+ of one fold less
    ul = ln.points[:, None]
    w_ll = _pair_weights(ln, ln)
    thp = theta_pm(params, +1, ul, v)
    f2 = (
        r
        * v ** (tau2 - rho)
        / ul**tau1
        * np.exp(ul * ul - (th1 - beta) * ul)
        * np.exp(v * v + th2 * v)
        * thp
        / t0
    )
    total += float(np.sum(w_ll * f2).real)

    # term 3: like term 1 but with the involuted exponents
    f3 = (
        1.0
        / (v - u)
        * v ** (-tau1)
        / u ** (-tau2)
        * np.exp(-u * u + (th2 - beta) * u)
        * np.exp(v * v - (th1 - beta) * v)
        * th_uv
        / t0
    )
    total += float(np.sum(w_cl * f3).real)

    # term 4: both variables on the circle, Theta- of one fold more
    vc = cr.points[None, :]
    w_cc = _pair_weights(cr, cr)
    thm = theta_pm(params, -1, u, vc)
    f4 = (
        vc**tau2
        / u ** (tau1 - rho)
        * np.exp(-u * u - th1 * u)
        * np.exp(-vc * vc + (th2 - beta) * vc)
        * thm
        / t0
    )
    total -= float(np.sum(w_cc * f4).real) / (r + 1)
    return total


@lru_cache(maxsize=None)
def g_coeffs(params: KernelParams, tau: int) -> GCoeffs:
    """Hermite-block coefficient matrix C for the boundary functions G
    at a level tau >= rho."""
    r, rho = params.r, params.rho
    m = tau - rho
    table = gamma_coeffs(params, max(m - 1, 0))
    C = np.zeros((r, m))
    for k in range(r):
        for alpha in range(m):
            for lp in range(min(m - alpha - 1, r - k - 1) + 1):
                C[k, alpha] += table.gamma[lp + k, m - lp - alpha - 1]
    return GCoeffs(tau=tau, C=C)


def _g_func(params: KernelParams, tau: int, k: int, x: float) -> float:
    """G_{tau-rho+k}(x) for 0 <= k < r, at a level tau >= rho."""
    r, rho, beta = params.r, params.rho, params.beta
    C = g_coeffs(params, tau).C
    table = gamma_coeffs(params, max(tau - rho - 1, 0))
    val = 0.0
    for i in range(tau - rho):
        val += C[k, i] * hermite("tilde", i, x)
    for i in range(r):
        val += table.gamma_tilde[k, i] * phi(tau - i - 1, x + beta / 2.0)
    return val


def level_func(params: KernelParams, tau: int, alpha: int, x: float) -> float:
    """The alpha-th member of the function family spanning level tau
    above the strip: plain normalized Hermite below the boundary block,
    the G functions on it (alpha runs over 0 .. tau-rho+r-1)."""
    m = tau - params.rho
    if alpha < m:
        return hermite("tilde", alpha, x)
    return _g_func(params, tau, alpha - m, x)


def _ltilde_series(params: KernelParams, tau1: int, x: float, tau2: int, y: float) -> float:
    r, rho, beta = params.r, params.rho, params.beta
    sqpi = math.sqrt(math.pi)
    if tau1 >= rho and tau2 >= rho:
        gx = math.exp(-x * x / 2.0)
        gy = math.exp(-y * y / 2.0)
        total = 0.0
        for k in range(r):
            alpha = tau1 - rho + k
            total += (
                gx * _g_func(params, tau1, k, x) * gy
                * hermite("hat", alpha - tau1 + tau2, y)
            ) / sqpi
        for alpha in range(max(0, tau1 - tau2), tau1 - rho):
            total += (
                gx * hermite("tilde", alpha, x) * gy
                * hermite("hat", alpha - tau1 + tau2, y)
            ) / sqpi
        if tau1 > tau2:
            inner = -_heaviside_2scaled(tau1 - tau2, x, y)
            for alpha in range(tau1 - tau2):
                inner += hermite("tilde", alpha, x) * phi(tau1 - tau2 - alpha - 1, -y)
            total += gx * inner / gy
        return total
    if 0 <= tau1 <= rho and 0 <= tau2 <= rho:
        table = gamma_coeffs(params, 0)
        gx = math.exp(-x * x / 2.0)
        ey = math.exp(y * y / 2.0)
        total = 0.0
        for alpha in range(r):
            for k in range(r):
                total += (
                    table.gamma_tilde[k, alpha]
                    * gx * phi(tau1 - alpha - 1, x + beta / 2.0)
                    * ey * phi(rho - tau2 - k - 1, -y)
                )
        if tau1 > tau2:
            total -= gx * _heaviside_2scaled(tau1 - tau2, x, y) * ey
        return total
    raise UnsupportedRegime(
        f"levels ({tau1}, {tau2}) mix the strip interior with its exterior"
    )


def kernel_dtac_series(params: KernelParams, p1: KernelPoint, p2: KernelPoint) -> float:
    """Discrete tacnode kernel by the finite series route; raises
    UnsupportedRegime off the two closed-form regimes."""
    x, y = -p1.theta / 2.0, -p2.theta / 2.0
    lt = _ltilde_series(params, p1.tau, x, p2.tau, y)
    return math.exp(x * x / 2.0) * lt * math.exp(-y * y / 2.0)


def kernel_dtac(
    params: KernelParams, p1: KernelPoint, p2: KernelPoint, route: str = "auto"
) -> float:
    """Discrete tacnode kernel; route is "series", "contour", or "auto"
    (series where available, contour otherwise)."""
    if route == "series":
        return kernel_dtac_series(params, p1, p2)
    if route == "contour":
        return kernel_dtac_contour(params, p1, p2)
    if route != "auto":
        raise ValueError(f"unknown route {route!r}")
    try:
        return kernel_dtac_series(params, p1, p2)
    except UnsupportedRegime:
        return kernel_dtac_contour(params, p1, p2)


def kernel_ltilde(
    params: KernelParams, tau1: int, x: float, tau2: int, y: float, route: str = "auto"
) -> float:
    """The conjugated kernel in the halved-and-flipped position
    variables x, y; this is the kernel whose block determinants give
    the densities."""
    if route in ("auto", "series"):
        try:
            return _ltilde_series(params, tau1, x, tau2, y)
        except UnsupportedRegime:
            if route == "series":
                raise
    p1 = KernelPoint(tau1, -2.0 * x)
    p2 = KernelPoint(tau2, -2.0 * y)
    val = kernel_dtac_contour(params, p1, p2)
    return math.exp(y * y / 2.0) * val * math.exp(-x * x / 2.0)
