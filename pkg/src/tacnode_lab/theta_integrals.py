"""The r-fold strip integrals Theta_r, Theta^{+/-}, and the coefficient
families Gamma / Gamma-tilde that drive the kernel series expansions.

Each r-fold integral carries a squared Vandermonde and a product of
identical one-variable factors, so by the Andreief identity it equals
r! times an r x r determinant of one-dimensional moment integrals.  The
identity holds exactly for the discretized sums too (same nodes in every
variable), so this is the evaluation route; the tensor-product route is
kept in the test suite as an independent assembly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, combinations_with_replacement

import numpy as np

from .contours import QuadratureRule, circle, vertical_line, integrate_nd

__all__ = [
    "KernelParams",
    "GammaTable",
    "theta_r",
    "theta_pm",
    "theta_zero",
    "gamma_coeffs",
    "sym_funcs",
    "PoleOnContour",
]


class PoleOnContour(ValueError):
    """An argument sits too close to the w-integration line."""


@dataclass(frozen=True, eq=False)
class KernelParams:
    """The triple (r, rho, beta) plus the two quadrature rules.

    r is the number of blue paths in the strip, rho the strip width,
    beta the combined drift parameter.  The circle rule hosts the u
    variables of the kernel double integrals, the line rule both the v
    and the inner w variables.
    """

    r: int
    rho: int
    beta: float = 0.0
    circle: QuadratureRule = field(default_factory=circle)
    line: QuadratureRule = field(default_factory=vertical_line)

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.rho < self.r:
            raise ValueError("rho must be >= r")
        if self.line.sigma <= self.circle.radius:
            raise ValueError("vertical line must sit to the right of the circle")
        t0 = theta_zero(self)
        if abs(t0) < 1e-300:
            raise ValueError("Theta_r(0,0) vanishes for these parameters")


@dataclass(frozen=True)
class GammaTable:
    """Cached coefficient matrices for one KernelParams instance."""

    gamma: np.ndarray  # shape (r, k_max+1), Gamma^{(r)}_{l,k}
    gamma_tilde: np.ndarray  # shape (r, r), Gamma-tilde^{(r-1)}_{k,l}
    det_gamma_tilde: float
    k_max: int


def sym_funcs(w, kind: str, j: int):
    """Elementary (sigma_j) or complete homogeneous (h_j) symmetric
    function of the entries of w; entries may be scalars or arrays."""
    if j < 0:
        raise ValueError("j must be >= 0")
    if j == 0:
        return 1.0 if not any(np.ndim(x) for x in w) else np.ones(
            np.broadcast(*w).shape
        )
    idx = range(len(w))
    if kind == "elementary":
        combos = combinations(idx, j)
    elif kind == "complete":
        combos = combinations_with_replacement(idx, j)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    total = 0.0
    for combo in combos:
        term = 1.0
        for i in combo:
            term = term * w[i]
        total = total + term
    return total


def _check_pole(params: KernelParams, z) -> None:
    z = np.asarray(z, dtype=complex)
    inside = np.abs(z) <= params.circle.radius + 1e-12
    clear = np.abs(z.real - params.line.sigma) > 0.1
    if not np.all(inside | clear):
        raise PoleOnContour("argument too close to the w-line")


@lru_cache(maxsize=None)
def _line_data(params: KernelParams):
    """w nodes, and quadrature weights times e^{2w^2 + beta w} / w^rho."""
    w = params.line.points
    hw = params.line.weights * np.exp(2.0 * w * w + params.beta * w) / w**params.rho
    return w, hw


@lru_cache(maxsize=None)
def _a_moments(params: KernelParams, k_max: int) -> np.ndarray:
    w, hw = _line_data(params)
    return np.array([np.sum(hw * w**k) for k in range(k_max + 1)])


def _b_moments(params: KernelParams, u, k_max: int) -> np.ndarray:
    """b_k(u) = (1/2 pi i) int h(w) w^k / (u - w) dw, vectorized in u."""
    w, hw = _line_data(params)
    u = np.asarray(u, dtype=complex)
    kernel = 1.0 / (u[..., None] - w)  # (..., n_w)
    return np.stack([kernel @ (hw * w**k) for k in range(k_max + 1)], axis=0)


def _c_moments(params: KernelParams, u, k_max: int) -> np.ndarray:
    """c_k(u) = (1/2 pi i) int h(w) w^k / (u - w)^2 dw (u = v diagonal)."""
    w, hw = _line_data(params)
    u = np.asarray(u, dtype=complex)
    kernel = 1.0 / (u[..., None] - w) ** 2
    return np.stack([kernel @ (hw * w**k) for k in range(k_max + 1)], axis=0)


def _hankel_det(mu) -> np.ndarray:
    """det(mu[i+j]) for the list/array of moment grids mu."""
    n = (len(mu) + 1) // 2
    if n == 1:
        return mu[0]
    shape = np.broadcast(*[np.asarray(m) for m in mu]).shape
    mat = np.empty(shape + (n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            mat[..., i, j] = mu[i + j]
    return np.linalg.det(mat)


def theta_r(params: KernelParams, u, v):
    """Theta_r(u, v): the r-fold strip integral; u, v broadcast."""
    _check_pole(params, u)
    r = params.r
    a = _a_moments(params, 2 * r - 2)
    b = _b_moments(params, u, 2 * r - 2)
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    mu = [a[k] + (v - u) * b[k] for k in range(2 * r - 1)]
    return math.factorial(r) * _hankel_det(mu)


def theta_pm(params: KernelParams, sign: int, u, v):
    """Theta^{+}_{r-1} (sign=+1) or Theta^{-}_{r+1} (sign=-1)."""
    r = params.r
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if sign == +1:
        if r == 1:
            return np.ones(np.broadcast(u, v).shape) if u.ndim or v.ndim else 1.0
        n = r - 1
        a = _a_moments(params, 2 * n)
        mu = [
            u * v * a[k] - (u + v) * a[k + 1] + a[k + 2] for k in range(2 * n - 1)
        ]
        return math.factorial(n) * _hankel_det(mu)
    if sign == -1:
        _check_pole(params, u)
        _check_pole(params, v)
        n = r + 1
        k_max = 2 * n - 2
        bu = _b_moments(params, u, k_max)
        bv = _b_moments(params, v, k_max)
        diff = v - u
        with np.errstate(divide="ignore", invalid="ignore"):
            mu = [(bu[k] - bv[k]) / diff for k in range(k_max + 1)]
        near = np.abs(diff) < 1e-12
        if np.any(near):
            cu = _c_moments(params, np.broadcast_to(u, near.shape)[near], k_max)
            for k in range(k_max + 1):
                mk = np.asarray(mu[k] + 0j)
                mk[near] = cu[k]
                mu[k] = mk
        return math.factorial(n) * _hankel_det(mu)
    raise ValueError("sign must be +1 or -1")


@lru_cache(maxsize=None)
def theta_zero(params: KernelParams) -> complex:
    """Theta_r(0, 0); divides every kernel term."""
    r = params.r
    a = _a_moments(params, 2 * r - 2)
    return complex(math.factorial(r) * _hankel_det(list(a)))


@lru_cache(maxsize=None)
def gamma_coeffs(params: KernelParams, k_max: int) -> GammaTable:
    """Coefficient matrices Gamma^{(r)}_{l,k} (0<=l<r, 0<=k<=k_max) and
    the r x r matrix Gamma-tilde^{(r-1)}_{k,l}, computed by direct
    tensor-product quadrature of their defining multiple integrals."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    r = params.r
    t0 = theta_zero(params)

    # r-fold grid common factor: weights * e^{2w^2+beta w} / w^{rho+1}, Delta^2
    rules = [params.line] * r
    grids = np.meshgrid(*(rl.points for rl in rules), indexing="ij", sparse=True)
    common = 1.0
    for alpha, (rl, w) in enumerate(zip(rules, grids)):
        shaped_weights = rl.weights.reshape(w.shape)
        common = common * shaped_weights * np.exp(
            2.0 * w * w + params.beta * w
        ) / w ** (params.rho + 1)
    for i in range(r):
        for j in range(i + 1, r):
            common = common * (grids[i] - grids[j]) ** 2

    gamma = np.empty((r, k_max + 1), dtype=complex)
    winv = [1.0 / w for w in grids]
    for ell in range(r):
        sig = sym_funcs(grids, "elementary", r - ell - 1)
        for k in range(k_max + 1):
            hk = sym_funcs(winv, "complete", k)
            val = np.sum(common * sig * hk)
            gamma[ell, k] = (-1) ** (ell + 1) / t0 * val

    gamma_tilde = np.empty((r, r), dtype=complex)
    if r == 1:
        gamma_tilde[0, 0] = 1.0 / t0
    else:
        grids1 = np.meshgrid(
            *(params.line.points for _ in range(r - 1)), indexing="ij", sparse=True
        )
        common1 = 1.0
        for w in grids1:
            shaped_weights = params.line.weights.reshape(w.shape)
            common1 = common1 * shaped_weights * np.exp(
                2.0 * w * w + params.beta * w
            ) / w**params.rho
        for i in range(r - 1):
            for j in range(i + 1, r - 1):
                common1 = common1 * (grids1[i] - grids1[j]) ** 2
        sigs = [sym_funcs(grids1, "elementary", r - m - 1) for m in range(r)]
        for k in range(r):
            for ell in range(r):
                val = np.sum(common1 * sigs[k] * sigs[ell])
                gamma_tilde[k, ell] = (-1) ** (ell + k) * r / t0 * val

    if max(np.abs(gamma_tilde.imag).max(), abs(np.imag(t0))) > 1e-9:
        raise ValueError("Gamma-tilde has a non-negligible imaginary part")
    gt = gamma_tilde.real.copy()
    return GammaTable(
        gamma=gamma.real.copy(),
        gamma_tilde=gt,
        det_gamma_tilde=float(np.linalg.det(gt)),
        k_max=k_max,
    )
