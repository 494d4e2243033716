"""Scalar building blocks: Hermite polynomial variants, the Gaussian
line integral phi_n, and the Heaviside power kernel.

All functions are pure, double precision, and vectorization-free on
purpose: every downstream use is a small determinant or a short sum, so
scalar clarity wins over array plumbing.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["hermite", "phi", "heaviside_pow"]

_VARIANTS = ("std", "tilde", "hat", "bar", "p")


def _hermite_std(n: int, x: float) -> float:
    # Physicists' H_n by the stable upward recurrence
    # H_{k+1} = 2x H_k - 2k H_{k-1}.
    if n < 0:
        return 0.0
    h_prev, h = 0.0, 1.0
    for k in range(n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h


def _hermite_p(n: int, x: float) -> float:
    # P_n(x) = H_n(ix) / (n! i^n) is real valued; the recurrence for
    # Q_n = H_n(ix)/i^n is Q_{k+1} = 2x Q_k + 2k Q_{k-1}.
    if n < 0:
        return 0.0
    q_prev, q = 0.0, 1.0
    for k in range(n):
        q_prev, q = q, 2.0 * x * q + 2.0 * k * q_prev
    return q / math.factorial(n)


def hermite(variant: str, n: int, x: float) -> float:
    """Evaluate a Hermite polynomial variant at a real point.

    Parameters
    ----------
    variant : str
        One of ``"std"`` (H_n), ``"tilde"`` (H_n/n!), ``"hat"``
        (H_n/2^{n+1}), ``"bar"`` (H_n/(2^n n!)), ``"p"``
        (H_n(ix)/(n! i^n), real valued).
    n : int
        Degree; any n < 0 returns 0 for every variant.
    x : float
        Evaluation point.
    """
    if variant not in _VARIANTS:
        raise ValueError(f"unknown hermite variant {variant!r}")
    if n < 0:
        return 0.0
    if variant == "p":
        return _hermite_p(n, x)
    h = _hermite_std(n, x)
    if variant == "std":
        return h
    if variant == "tilde":
        return h / math.factorial(n)
    if variant == "hat":
        return h / 2.0 ** (n + 1)
    return h / (2.0**n * math.factorial(n))  # bar


_PHI_GL_NODES, _PHI_GL_WEIGHTS = np.polynomial.legendre.leggauss(240)


def phi(n: int, eta: float) -> float:
    """The vertical-line Gaussian integral (1/2 pi i) int e^{v^2+2 eta v} v^{-n-1} dv.

    For n <= -1 this is a pure Gaussian moment and reduces to a Hermite
    polynomial; for n >= 0 we evaluate the equivalent half-line integral

        2^n e^{-eta^2}/sqrt(pi) * int_0^inf (xi^n/n!) e^{-xi^2+2 xi eta} dxi

    after the substitution u = xi - eta, truncating at u = 10 where the
    Gaussian factor is below 1e-40.
    """
    if n <= -1:
        return math.exp(-eta * eta) / math.sqrt(math.pi) * 2.0**n * _hermite_std(
            -n - 1, -eta
        )
    # int_0^inf xi^n e^{-xi^2+2 xi eta} dxi = e^{eta^2} int_{-eta}^inf (u+eta)^n e^{-u^2} du
    lo, hi = -eta, 10.0
    if lo >= hi:
        return 0.0
    u = 0.5 * (hi - lo) * _PHI_GL_NODES + 0.5 * (hi + lo)
    integrand = (u + eta) ** n * np.exp(-u * u)
    val = 0.5 * (hi - lo) * float(_PHI_GL_WEIGHTS @ integrand)
    return 2.0**n / (math.factorial(n) * math.sqrt(math.pi)) * val


def heaviside_pow(m: int, z: float) -> float:
    """z^{m-1}/(m-1)! for z >= 0 and m >= 1, else 0."""
    if m < 1 or z < 0.0:
        return 0.0
    return z ** (m - 1) / math.factorial(m - 1)
