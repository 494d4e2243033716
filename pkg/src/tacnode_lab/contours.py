"""Trapezoidal quadrature on the two contour families used everywhere:
a counterclockwise circle around the origin and an upward vertical line
to its right.

The 1/(2 pi i) prefactor of every contour integral is folded into the
weights, so a rule applied to f(z) = 1/z on the circle returns 1.
Trapezoidal sums are spectrally accurate here: the circle integrand is
periodic and the line integrands decay like a Gaussian.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "QuadratureRule",
    "circle",
    "vertical_line",
    "integrate_1d",
    "integrate_nd",
    "NonFiniteIntegrand",
    "DimensionTooLarge",
]


class NonFiniteIntegrand(ValueError):
    """An integrand evaluation produced NaN or Inf on a node."""


class DimensionTooLarge(ValueError):
    """Tensor-product integration requested beyond the supported fold."""


@dataclass(frozen=True)
class QuadratureRule:
    """A discretized contour: nodes and weights in the complex plane."""

    kind: str  # "circle" or "vertical_line"
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    # geometric parameters, kept for pole checks and node doubling
    radius: float = 0.0
    sigma: float = 0.0
    halfwidth: float = 0.0

    def doubled(self) -> "QuadratureRule":
        """Same contour with twice as many nodes (convergence checks)."""
        n = len(self.points)
        if self.kind == "circle":
            return circle(self.radius, 2 * n)
        return vertical_line(self.sigma, self.halfwidth, 2 * n - 1)


def circle(radius: float = 0.5, nodes: int = 128) -> QuadratureRule:
    """Counterclockwise circle of given radius around the origin."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    angles = 2.0 * np.pi * np.arange(nodes) / nodes
    z = radius * np.exp(1j * angles)
    # dz/(2 pi i) = z dtheta/(2 pi); equal angular spacing
    w = z / nodes
    return QuadratureRule("circle", z, w, radius=radius)


def vertical_line(
    sigma: float = 1.0, halfwidth: float = 8.0, nodes: int = 513
) -> QuadratureRule:
    """Upward vertical line Re z = sigma, truncated at |Im z| <= halfwidth."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    t = np.linspace(-halfwidth, halfwidth, nodes)
    z = sigma + 1j * t
    h = t[1] - t[0]
    # dz/(2 pi i) = dt/(2 pi); trapezoid halves the end weights
    w = np.full(nodes, h / (2.0 * np.pi), dtype=complex)
    w[0] *= 0.5
    w[-1] *= 0.5
    return QuadratureRule("vertical_line", z, w, sigma=sigma, halfwidth=halfwidth)


def integrate_1d(rule: QuadratureRule, f) -> complex:
    """Apply the rule to a function of one complex variable.

    f must accept a numpy array of points and return an array of values.
    """
    vals = np.asarray(f(rule.points), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteIntegrand("integrand is NaN/Inf on a quadrature node")
    return complex(np.sum(vals * rule.weights))


def integrate_nd(rules, f) -> complex:
    """Tensor-product integral over k <= 4 contours.

    f takes k broadcast numpy arrays (one per contour) and returns the
    integrand on the full grid; cost is the product of node counts.
    """
    k = len(rules)
    if k == 0:
        raise ValueError("need at least one rule")
    if k > 4:
        raise DimensionTooLarge(f"tensor-product fold {k} > 4")
    if k == 1:
        return integrate_1d(rules[0], f)
    grids = np.meshgrid(*(r.points for r in rules), indexing="ij", sparse=True)
    shape = tuple(len(r.points) for r in rules)
    vals = np.broadcast_to(np.asarray(f(*grids), dtype=complex), shape)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteIntegrand("integrand is NaN/Inf on a quadrature node")
    for rule in reversed(rules):
        vals = vals @ rule.weights
    return complex(vals)
