"""Finite hexagon-with-two-cuts geometry: edge data, the structural
integers r (blue paths in the strip) and rho (strip width), the two
coordinate systems, and the scaling map sending discrete oblique
coordinates to kernel points.

The tiling is encoded as m1+m2 non-intersecting down-left lattice paths
over the horizontal rows m = 0..N; the boundary rows carry the cut
pattern, so the path constraints alone reproduce the tileable region.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .tacnode_kernel import KernelPoint
from .theta_integrals import KernelParams

__all__ = [
    "HexagonWithCuts",
    "ScalingParams",
    "coords_lozenge_to_oblique",
    "coords_oblique_to_lozenge",
    "scale_to_kernel_point",
    "kernel_params_of",
]


@dataclass(frozen=True)
class HexagonWithCuts:
    """Edge sizes of the hexagon with two opposite cuts of size d.

    The bottom edge splits into blocks m1 and m2 around its cut, the top
    edge into n1 and n2 around its cut, and the remaining parallel edges
    have sizes b and c.  N is the number of horizontal rows; the default
    b + c matches the vertical extent of the region.
    """

    b: int
    c: int
    d: int
    m1: int
    m2: int
    n1: int
    n2: int
    N: int = 0

    def __post_init__(self):
        if self.N == 0:
            object.__setattr__(self, "N", self.b + self.c)
        if min(self.b, self.c, self.m1, self.m2, self.n1, self.n2, self.N) <= 0:
            raise ValueError("all edge sizes must be positive")
        if self.d < 0 or self.d > self.b:
            raise ValueError("cut size d must satisfy 0 <= d <= b")
        rho1 = self.n1 - self.m1 + self.b - self.d
        rho2 = self.m2 - self.n2 + self.b - self.d
        if rho1 != rho2:
            raise ValueError(f"inconsistent strip width: {rho1} != {rho2}")
        if rho1 < self.b - self.d:
            raise ValueError("strip width smaller than the blue path count")

    @property
    def r(self) -> int:
        return self.b - self.d

    @property
    def rho(self) -> int:
        return self.n1 - self.m1 + self.b - self.d

    @property
    def n_paths(self) -> int:
        return self.m1 + self.m2

    @property
    def eta0(self) -> int:
        return self.m1

    @property
    def xi0(self) -> int:
        return self.N - self.m1 - 1

    def bottom_row(self) -> tuple:
        """Path start positions on row 0, largest-first: block m2 at
        [m1, m1+m2-1] and block m1 at [-d, m1-d-1] around the cut."""
        upper = range(self.m1 + self.m2 - 1, self.m1 - 1, -1)
        lower = range(self.m1 - self.d - 1, -self.d - 1, -1)
        return tuple(upper) + tuple(lower)

    def top_row(self) -> tuple:
        """Path end positions on row N, largest-first: block n2 at
        [n1-c, m1+m2-c-1] and block n1 at [-d-c, n1-c-d-1]."""
        upper = range(self.m1 + self.m2 - self.c - 1, self.n1 - self.c - 1, -1)
        lower = range(self.n1 - self.c - self.d - 1, -self.d - self.c - 1, -1)
        return tuple(upper) + tuple(lower)

    def to_json(self) -> str:
        doc = {
            "b": self.b, "c": self.c, "d": self.d,
            "m1": self.m1, "m2": self.m2, "n1": self.n1, "n2": self.n2,
            "N": self.N, "r": self.r, "rho": self.rho,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "HexagonWithCuts":
        doc = json.loads(text)
        return cls(
            b=doc["b"], c=doc["c"], d=doc["d"], m1=doc["m1"], m2=doc["m2"],
            n1=doc["n1"], n2=doc["n2"], N=doc.get("N", 0),
        )


@dataclass(frozen=True)
class ScalingParams:
    """The large-d scaling regime: cut size d with shape ratio kappa in
    (1, 3), drifts beta1/beta2 and offsets gamma1/gamma2, targeting the
    structural integers (r, rho)."""

    d: int
    kappa: float
    r: int
    rho: int
    beta1: float = 0.0
    beta2: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0

    def __post_init__(self):
        if not (1.0 < self.kappa < 3.0):
            raise ValueError("kappa must lie strictly between 1 and 3")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not (1 <= self.r <= self.rho):
            raise ValueError("need 1 <= r <= rho")

    @property
    def a(self) -> float:
        return 2.0 * math.sqrt(self.kappa / (self.kappa - 1.0))

    @property
    def beta(self) -> float:
        return -self.beta1 - self.beta2

    def _m_edge(self, drift: float, offset: float) -> float:
        k = self.kappa
        return (k + 1.0) / (k - 1.0) * (
            self.d + math.sqrt(k / (k - 1.0)) * drift * math.sqrt(self.d) + offset
        )

    def make_geometry(self):
        """Round the scaled edges to integers; returns the geometry and
        the rounding residuals (exact minus rounded, per edge)."""
        m1_exact = self._m_edge(self.beta1, self.gamma1)
        m2_exact = self._m_edge(self.beta2, self.gamma2)
        c_exact = self.kappa * self.d
        m1, m2, c = round(m1_exact), round(m2_exact), round(c_exact)
        geom = HexagonWithCuts(
            b=self.d + self.r,
            c=c,
            d=self.d,
            m1=m1,
            m2=m2,
            n1=m1 + (self.rho - self.r),
            n2=m2 - (self.rho - self.r),
        )
        residuals = {
            "m1": m1_exact - m1,
            "m2": m2_exact - m2,
            "c": c_exact - c,
        }
        return geom, residuals


def coords_lozenge_to_oblique(m: int, x: int):
    """Blue-dot coordinates: the dot below row m at position x sits on
    oblique line eta with running coordinate xi."""
    eta = m + x
    xi = m - x - 1
    return eta, xi


def coords_oblique_to_lozenge(eta: int, xi: int):
    if (eta + xi) % 2 == 0:
        raise ValueError("eta + xi must be odd for a blue dot")
    m = (eta + xi + 1) // 2
    x = (eta - xi - 1) // 2
    return m, x


def scale_to_kernel_point(
    sp: ScalingParams, geom: HexagonWithCuts, eta: int, xi: float
) -> KernelPoint:
    """Invert the affine scaling map about the strip anchor point."""
    tau = eta - geom.eta0
    theta = (
        sp.a * (xi - geom.xi0) / ((sp.kappa + 1.0) * math.sqrt(sp.d)) - sp.beta2
    )
    return KernelPoint(tau=tau, theta=theta)


def kernel_params_of(sp: ScalingParams, **kwargs) -> KernelParams:
    """The limiting kernel parameters of a scaling regime."""
    return KernelParams(r=sp.r, rho=sp.rho, beta=sp.beta, **kwargs)
