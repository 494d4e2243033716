"""Interlacing cones between two levels: particle counts, exact volumes
by a Heaviside/Hermite determinant, independent volume oracles
(recursive quadrature and Monte Carlo), and uniform chain sampling.

Configurations are stored largest-first (z_1 >= z_2 >= ...), which makes
the Vandermonde product of an ordered configuration nonnegative and
fixes every sign downstream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special_functions import hermite, heaviside_pow
from .theta_integrals import KernelParams

__all__ = [
    "LevelConfig",
    "InterlacingChain",
    "count_particles",
    "interlaces",
    "chain_interlaces",
    "volume_det",
    "volume_oracle",
    "sample_chain",
    "NegativeLevel",
    "SizeMismatch",
    "EmptyPolytope",
    "Intractable",
]


class NegativeLevel(ValueError):
    """Levels below 0 are reached only through the involution."""


class SizeMismatch(ValueError):
    """Configuration size disagrees with the forced particle count."""


class EmptyPolytope(ValueError):
    """The requested cone has zero volume."""


class Intractable(ValueError):
    """Instance beyond the desk-scale bounds of the oracle."""


@dataclass(frozen=True)
class LevelConfig:
    """An ordered configuration at one level, stored largest-first."""

    tau: int
    points: tuple

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if any(pts[i] < pts[i + 1] for i in range(len(pts) - 1)):
            raise ValueError("points must be ordered largest-first")


@dataclass(frozen=True)
class InterlacingChain:
    """Configurations at consecutive levels tau1 .. tau2."""

    levels: tuple

    def __post_init__(self):
        levels = tuple(self.levels)
        object.__setattr__(self, "levels", levels)
        for a, b in zip(levels, levels[1:]):
            if b.tau != a.tau + 1:
                raise ValueError("levels must be consecutive")


def count_particles(params: KernelParams, tau: int) -> int:
    """Forced particle count (tau - rho)_{>0} + r at level tau >= 0."""
    if tau < 0:
        raise NegativeLevel("negative levels are handled via the involution")
    return max(tau - params.rho, 0) + params.r


def interlaces(lower, upper) -> bool:
    """Interlacing z < u between consecutive levels, both largest-first.

    Equal sizes n: z_n <= u_n <= z_{n-1} <= ... <= z_1 <= u_1.
    Sizes n and n+1: additionally u_{n+1} <= z_n.
    """
    z, u = list(lower), list(upper)
    n = len(z)
    if len(u) not in (n, n + 1):
        raise SizeMismatch("upper level must have n or n+1 points")
    for i in range(n):
        if not (z[i] <= u[i]):
            return False
        if i + 1 < n and not (u[i + 1] <= z[i]):
            return False
    if len(u) == n + 1 and not (u[n] <= z[n - 1]):
        return False
    if len(u) == n and n >= 2 and not all(u[i + 1] <= z[i] for i in range(n - 1)):
        return False
    return True


def chain_interlaces(chain: InterlacingChain) -> bool:
    return all(
        interlaces(a.points, b.points)
        for a, b in zip(chain.levels, chain.levels[1:])
    )


def _check_instance(params, tau1, x: LevelConfig, tau2, y: LevelConfig):
    if not (0 <= tau1 < tau2):
        raise ValueError("need 0 <= tau1 < tau2")
    if len(x.points) != count_particles(params, tau1):
        raise SizeMismatch("x size disagrees with the level count")
    if len(y.points) != count_particles(params, tau2):
        raise SizeMismatch("y size disagrees with the level count")


def volume_det(
    params: KernelParams,
    tau1: int,
    x: LevelConfig,
    tau2: int,
    y: LevelConfig,
    variant: str = "standard",
) -> float:
    """Volume of the interlacing cone between levels tau1 < tau2 by the
    exact determinant formula.

    variant "standard" puts the Heaviside columns first and the Hermite
    columns in descending order; "reordered" puts the Hermite columns
    first in ascending order and compensates with the explicit sign
    (-1)^{(n2-n1)(n2+n1-1)/2}.
    """
    _check_instance(params, tau1, x, tau2, y)
    xs, ys = x.points, y.points
    n1, n2 = len(xs), len(ys)
    m = tau2 - tau1
    heav = [
        [heaviside_pow(m, yi - xj) for xj in xs] for yi in ys
    ]
    herm = [
        [hermite("bar", n2 - n1 - 1 - c, yi) for c in range(n2 - n1)] for yi in ys
    ]
    if variant == "standard":
        mat = np.array([heav[i] + herm[i] for i in range(n2)])
        return float(np.linalg.det(mat)) if n2 else 1.0
    if variant != "reordered":
        raise ValueError(f"unknown variant {variant!r}")
    sign = (-1) ** (((n2 - n1) * (n2 + n1 - 1)) // 2)
    mat = np.array([herm[i][::-1] + heav[i] for i in range(n2)])
    return sign * float(np.linalg.det(mat))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _panel_integral(f, lo: float, hi: float, breaks) -> float:
    """1-D Gauss-Legendre integral split at interior breakpoints, so the
    piecewise-polynomial integrands are handled exactly."""
    cuts = sorted({lo, hi} | {b for b in breaks if lo < b < hi})
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        for t, w in zip(_GL_NODES, _GL_WEIGHTS):
            total += half * w * f(mid + half * t)
    return total


def _vol_recursive(params, tau1, xs, tau, upper, breaks) -> float:
    """Integrate out the level below `upper`, recursing down to tau1."""
    if tau == tau1 + 1:
        return 1.0 if interlaces(xs, upper) else 0.0
    n = count_particles(params, tau - 1)
    n_up = len(upper)
    lo_all = min(xs)

    def integrate_coord(i, z_partial):
        # z_i ranges in [upper_{i+1}, upper_i]; the lowest coordinate of
        # an equal-size step is bounded below only through x.
        hi = upper[i]
        lo = upper[i + 1] if i + 1 < n_up else lo_all
        if lo >= hi:
            return 0.0
        if i == n - 1:
            def f(zi):
                return _vol_recursive(
                    params, tau1, xs, tau - 1, tuple(z_partial) + (zi,), breaks
                )
        else:
            def f(zi):
                return integrate_coord(i + 1, z_partial + [zi])
        return _panel_integral(f, lo, hi, breaks)

    return integrate_coord(0, [])


def volume_oracle(
    params: KernelParams,
    tau1: int,
    x: LevelConfig,
    tau2: int,
    y: LevelConfig,
    method: str = "recursive",
    samples: int = 200_000,
    rng=None,
):
    """Independent volume estimates: "recursive" nests the one-level
    integral recursion with panel-split Gauss rules (returns stderr 0);
    "montecarlo" rejection-samples the bounding box.  Returns the pair
    (value, stderr)."""
    _check_instance(params, tau1, x, tau2, y)
    if tau2 - tau1 > 4 or max(len(x.points), len(y.points)) > 3:
        raise Intractable("oracle limited to chain length <= 4 and sizes <= 3")
    xs, ys = x.points, y.points
    if method == "recursive":
        val = _vol_recursive(params, tau1, xs, tau2, ys, set(xs))
        return val, 0.0
    if method != "montecarlo":
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(rng)
    interior = [count_particles(params, t) for t in range(tau1 + 1, tau2)]
    dim = sum(interior)
    lo, hi = min(xs + ys), max(xs + ys)
    if dim == 0:
        val = 1.0 if interlaces(xs, ys) else 0.0
        return val, 0.0
    draws = rng.uniform(lo, hi, size=(samples, dim))
    hits = 0
    for row in draws:
        levels = []
        ofs = 0
        ok = True
        for n in interior:
            pts = np.sort(row[ofs : ofs + n])[::-1]
            ofs += n
            levels.append(tuple(pts))
        configs = [xs] + levels + [ys]
        for a, b in zip(configs, configs[1:]):
            if not interlaces(a, b):
                ok = False
                break
        if ok:
            hits += 1
    # sorting a uniform box draw overcounts each ordered level n! times
    frac = hits / samples
    scale = (hi - lo) ** dim / np.prod([math.factorial(n) for n in interior])
    val = frac * scale
    err = scale * math.sqrt(frac * (1.0 - frac) / samples)
    return float(val), float(err)


def sample_chain(
    rng, params: KernelParams, tau1: int, x: LevelConfig, tau2: int, y: LevelConfig,
    max_tries: int = 1_000_000,
) -> InterlacingChain:
    """Uniform sample of the interior levels by rejection from the
    bounding box; exact for any instance with positive volume."""
    _check_instance(params, tau1, x, tau2, y)
    rng = np.random.default_rng(rng)
    xs, ys = x.points, y.points
    interior = [count_particles(params, t) for t in range(tau1 + 1, tau2)]
    lo, hi = min(xs + ys), max(xs + ys)
    for _ in range(max_tries):
        levels = []
        for n in interior:
            pts = tuple(np.sort(rng.uniform(lo, hi, size=n))[::-1])
            levels.append(pts)
        configs = [xs] + levels + [ys]
        if all(interlaces(a, b) for a, b in zip(configs, configs[1:])):
            lvls = [LevelConfig(tau1, xs)]
            for t, pts in enumerate(levels, start=tau1 + 1):
                lvls.append(LevelConfig(t, pts))
            lvls.append(LevelConfig(tau2, ys))
            return InterlacingChain(tuple(lvls))
    raise EmptyPolytope("rejection sampling failed; cone empty or too thin")
