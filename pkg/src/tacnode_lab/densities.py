"""Exact one- and two-level densities of the blue-particle process by
three independent routes: prefactor-times-polytope-volume, kernel block
determinant, and the rank-one A/B factorization; plus the Heaviside
collocation system g and the higher Fay determinant identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special_functions import hermite, phi, heaviside_pow
from .theta_integrals import KernelParams, gamma_coeffs
from .tacnode_kernel import UnsupportedRegime, kernel_ltilde, level_func
from .interlace_polytope import (
    InterlacingChain,
    LevelConfig,
    chain_interlaces,
    count_particles,
    volume_det,
)

__all__ = [
    "DensityRequest",
    "FactorizationReport",
    "delta_tilde",
    "density_prefactor_D",
    "density",
    "kernel_block_density",
    "factorization_check",
    "solve_heaviside_coeffs",
    "fay_identity",
    "gibbs_joint_density",
    "SingularSystem",
]


class SingularSystem(ValueError):
    """The Hermite collocation matrix is singular (coincident points)."""


@dataclass(frozen=True)
class DensityRequest:
    """One density evaluation: levels tau1 <= tau2 with configurations
    x, y of the forced sizes.  One-level requests set tau2 = tau1 and
    y = x."""

    params: KernelParams
    tau1: int
    tau2: int
    x: LevelConfig
    y: LevelConfig

    def __post_init__(self):
        if not (0 <= self.tau1 <= self.tau2):
            raise ValueError("need 0 <= tau1 <= tau2")
        if len(self.x.points) != count_particles(self.params, self.tau1):
            raise ValueError("x size disagrees with the level count")
        if len(self.y.points) != count_particles(self.params, self.tau2):
            raise ValueError("y size disagrees with the level count")

    @property
    def regime(self) -> str:
        if self.tau2 <= self.params.rho:
            return "in_strip"
        if self.tau1 >= self.params.rho:
            return "above_strip"
        raise UnsupportedRegime(
            f"levels ({self.tau1}, {self.tau2}) straddle the strip boundary"
        )


@dataclass(frozen=True)
class FactorizationReport:
    det_A: float
    det_B: float
    block_det: float
    d_times_vol: float
    max_rel_discrepancy: float


def delta_tilde(params: KernelParams, tau: int, xs, regime: str) -> float:
    """Wronskian-like determinant at level tau.

    In-strip: r rows of phi functions with indices tau-1 down to tau-r.
    Above-strip: tau-rho monomial rows stacked over the same phi rows.
    Column j is the point xs[j] in the order given.
    """
    xs = [float(v) for v in xs]
    if regime == "in_strip":
        n = params.r
        if len(xs) != n:
            raise ValueError("in-strip block needs r points")
        rows = [[phi(tau - 1 - a, xj) for xj in xs] for a in range(n)]
    elif regime == "above_strip":
        n = tau - params.rho + params.r
        if len(xs) != n:
            raise ValueError("above-strip block needs tau - rho + r points")
        rows = [[xj**p for xj in xs] for p in range(tau - params.rho)]
        rows += [[phi(tau - 1 - a, xj) for xj in xs] for a in range(params.r)]
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return float(np.linalg.det(np.array(rows))) if n else 1.0


def _shifted_reversed(points, shift: float):
    # the prefactor formulas list shifted arguments smallest-first
    return [p + shift for p in reversed(points)]


def density_prefactor_D(req: DensityRequest) -> float:
    """The closed-form prefactor multiplying the cone volume."""
    params = req.params
    r, rho, beta = params.r, params.rho, params.beta
    xs, ys = req.x.points, req.y.points
    n1, n2 = len(xs), len(ys)
    det_gt = gamma_coeffs(params, 0).det_gamma_tilde
    if req.regime == "in_strip":
        cprime = 2.0 ** (r * (req.tau2 - req.tau1 + 1)) * det_gt
        return (
            cprime
            * delta_tilde(params, req.tau1, _shifted_reversed(xs, beta / 2.0), "in_strip")
            * delta_tilde(params, rho - req.tau2, [-v for v in reversed(ys)], "in_strip")
        )
    # with largest-first storage the determinant orderings below absorb
    # the alternating sign that a smallest-first convention would need
    c = (
        2.0 ** ((n2 - n1) * r)
        * math.sqrt(2.0) ** ((n2 - r) * (n2 - r - 1))
        / np.prod([math.factorial(k) for k in range(n1 - r)])
        * det_gt
    )
    gauss = np.prod([math.exp(-v * v) / math.sqrt(math.pi) for v in ys])
    vander = np.prod(
        [ys[i] - ys[j] for i in range(n2) for j in range(i + 1, n2)] or [1.0]
    )
    return (
        float(c)
        * delta_tilde(params, req.tau1, _shifted_reversed(xs, beta / 2.0), "above_strip")
        * float(gauss)
        * float(vander)
    )


def density(req: DensityRequest) -> float:
    """Density by the closed-form route: prefactor alone at one level,
    prefactor times cone volume across two levels."""
    if req.tau1 == req.tau2:
        return density_prefactor_D(req)
    vol = volume_det(req.params, req.tau1, req.x, req.tau2, req.y)
    if vol == 0.0:
        return 0.0
    return density_prefactor_D(req) * vol


def kernel_block_density(req: DensityRequest, route: str = "auto") -> float:
    """Density as the determinant of the kernel block matrix times
    2^{n1+n2} (the Jacobian of the halved position variables)."""
    params = req.params
    xs, ys = req.x.points, req.y.points
    if req.tau1 == req.tau2:
        pts = [(req.tau1, v) for v in xs]
    else:
        pts = [(req.tau1, v) for v in xs] + [(req.tau2, v) for v in ys]
    n = len(pts)
    if n > 6:
        raise ValueError("kernel block limited to 6 points total")
    mat = np.array(
        [
            [kernel_ltilde(params, t1, v1, t2, v2, route) for (t2, v2) in pts]
            for (t1, v1) in pts
        ]
    )
    return float(np.linalg.det(mat)) * 2.0**n


def solve_heaviside_coeffs(ys, x: float, m: int) -> np.ndarray:
    """Coefficients g_a expanding -H^m(2(y_i - x)) over the normalized
    Hermite polynomials at the collocation points ys."""
    n = len(ys)
    if any(abs(ys[i] - ys[j]) < 1e-12 for i in range(n) for j in range(i + 1, n)):
        raise SingularSystem("coincident collocation points")
    mat = np.array([[hermite("tilde", a, yi) for a in range(n)] for yi in ys])
    rhs = np.array([-heaviside_pow(m, 2.0 * (yi - x)) for yi in ys])
    return np.linalg.solve(mat, rhs)


def fay_identity(xs, ys, m: int):
    """Both sides of the higher Fay determinant identity: the r x r
    determinant of Heaviside collocation coefficients against the
    closed product formula times the cone volume determinant.

    xs, ys are equal-length largest-first configurations; m >= 1 is the
    level gap.  Returns (lhs, rhs)."""
    r = len(xs)
    if len(ys) != r:
        raise ValueError("need equally many points on both levels")
    g = np.array([solve_heaviside_coeffs(ys, xi, m) for xi in xs])
    lhs = float(np.linalg.det(g))  # entry (i, j) = g_{j-1}(ys, x_i)
    vol = float(
        np.linalg.det(
            [[heaviside_pow(m, yi - xj) for xj in xs] for yi in ys]
        )
    )
    vander = np.prod(
        [ys[i] - ys[j] for i in range(r) for j in range(i + 1, r)] or [1.0]
    )
    pref = np.prod([2.0**k / math.factorial(k) for k in range(r)])
    sign = (-1.0) ** (r + r * (r - 1) // 2)
    rhs = sign * 2.0 ** (r * (m - 1)) / (float(vander) * float(pref)) * vol
    return lhs, rhs


def _case2_vectors(req: DensityRequest):
    """A/B vectors for the in-strip regime (all levels carry r points)."""
    params = req.params
    r, rho, beta = params.r, params.rho, params.beta
    tau1, tau2 = req.tau1, req.tau2
    xs, ys = req.x.points, req.y.points
    gt = gamma_coeffs(params, 0).gamma_tilde
    m = tau2 - tau1
    gx = {xj: solve_heaviside_coeffs(ys, xj, m) for xj in xs} if m else None

    def a1(x):
        head = [0.0] * r
        tail = [math.exp(-x * x / 2.0) * phi(tau1 - 1 - a, x + beta / 2.0) for a in range(r)]
        return head + tail

    def b1(x):
        ex = math.exp(x * x / 2.0)
        head = [ex * gx[x][p] for p in range(r)] if m else None
        if head is None:
            # one-level request: only the tail block is used
            head = [0.0] * r
        tail = [
            ex
            * sum(gt[k, a] * phi(rho - tau1 - k - 1, -x) for k in range(r))
            for a in range(r)
        ]
        return head + tail

    def a2(y):
        ey = math.exp(-y * y / 2.0)
        head = [ey * hermite("tilde", p, y) for p in range(r)]
        tail = [ey * phi(tau2 - 1 - a, y + beta / 2.0) for a in range(r)]
        return head + tail

    def b2(y):
        ey = math.exp(y * y / 2.0)
        tail = [
            ey
            * sum(gt[k, a] * phi(rho - tau2 - k - 1, -y) for k in range(r))
            for a in range(r)
        ]
        return [0.0] * r + tail

    return a1, b1, a2, b2


def _case1_vectors(req: DensityRequest):
    """A/B vectors for the above-strip regime, assembled from the
    level-spanning functions, the Heaviside collocation coefficients,
    and the phi tail corrections."""
    params = req.params
    r = params.r
    tau1, tau2 = req.tau1, req.tau2
    xs, ys = req.x.points, req.y.points
    n1, n2 = len(xs), len(ys)
    sqpi = math.sqrt(math.pi)
    m = n2 - n1
    gx = {xj: solve_heaviside_coeffs(ys, xj, m) for xj in xs} if m else None

    def a1(x):
        e = math.exp(-x * x / 2.0) / sqpi
        return [0.0] * n2 + [e * level_func(params, tau1, a, x) for a in range(n1)]

    def a2(y):
        e = math.exp(-y * y / 2.0) / sqpi
        head = [e * hermite("tilde", m + p, y) for p in range(n1)]
        mid = [e * hermite("tilde", p, y) for p in range(m)]
        tail = [e * level_func(params, tau2, m + a, y) for a in range(n1)]
        return head + mid + tail

    def b1(x):
        ex = sqpi * math.exp(x * x / 2.0)
        g = gx[x] if m else np.zeros(0)
        head = [ex * g[m + p] for p in range(n1)] if m else [0.0] * n1
        mid = [ex * (g[p] + phi(m - p - 1, -x)) for p in range(m)]
        tail = [math.exp(-x * x / 2.0) * hermite("hat", a, x) for a in range(n1)]
        return head + mid + tail

    def b2(y):
        ey = math.exp(-y * y / 2.0)
        return [0.0] * n1 + [ey * hermite("hat", p, y) for p in range(n2)]

    return a1, b1, a2, b2


def factorization_check(req: DensityRequest, route: str = "auto") -> FactorizationReport:
    """Cross-check the three density routes on one instance.

    Builds the A and B matrices of the rank-one factorization, compares
    det(A) det(B) against the kernel block determinant and against the
    prefactor-times-volume value, all divided by 2^{n1+n2}."""
    params = req.params
    xs, ys = req.x.points, req.y.points
    one_level = req.tau1 == req.tau2
    if req.regime == "in_strip":
        a1, b1, a2, b2 = _case2_vectors(req)
    else:
        a1, b1, a2, b2 = _case1_vectors(req)
    if one_level:
        n = len(xs)
        # the one-level factorization keeps the last n entries only
        A = np.array([a1(x)[-n:] for x in xs])
        B = np.array([b1(x)[-n:] for x in xs]).T
    else:
        A = np.array([a1(x) for x in xs] + [a2(y) for y in ys])
        B = np.array([b1(x) for x in xs] + [b2(y) for y in ys]).T
    det_A = float(np.linalg.det(A))
    det_B = float(np.linalg.det(B))
    n_tot = len(xs) if one_level else len(xs) + len(ys)
    scale = 2.0**n_tot
    block = kernel_block_density(req, route) / scale
    dvol = density(req) / scale
    vals = [det_A * det_B, block, dvol]
    ref = max(abs(v) for v in vals)
    disc = 0.0 if ref == 0.0 else max(
        abs(a - b) for a in vals for b in vals
    ) / ref
    return FactorizationReport(
        det_A=det_A,
        det_B=det_B,
        block_det=block,
        d_times_vol=dvol,
        max_rel_discrepancy=float(disc),
    )


def gibbs_joint_density(params: KernelParams, chain: InterlacingChain) -> float:
    """Joint density of all levels of a chain: the two-level prefactor
    if the chain interlaces, zero otherwise (conditional uniformity)."""
    first, last = chain.levels[0], chain.levels[-1]
    if not chain_interlaces(chain):
        return 0.0
    req = DensityRequest(params, first.tau, last.tau, first, last)
    return density_prefactor_D(req)
