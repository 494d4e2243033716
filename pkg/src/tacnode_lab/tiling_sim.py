"""Uniform sampling of lozenge tilings of the hexagon with two cuts by
Glauber dynamics on the non-intersecting path encoding, extraction of
the blue-dot configurations per oblique line, and empirical comparison
of the scaled blue positions against the exact level densities.

A tiling is the integer array P[m, i]: position of path i on horizontal
row m, strictly decreasing in i, with P[m, i] - P[m+1, i] in {0, 1}.
The step 0 is a blue tile, the step 1 a red tile; green tiles fill the
rest.  Rows 0 and N are frozen boundary data encoding the two cuts.

Updates run checkerboard-parallel over the parity classes of m + i:
a site only interacts with (m+-1, i) and (m, i+-1), which lie in the
other class, so simultaneous +-1 Metropolis proposals within one class
preserve the uniform law exactly.  Each sweep ends with an exact
full-path heat-bath scan, which dominates the mixing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is optional
    njit = None

from .geometry import HexagonWithCuts, ScalingParams, kernel_params_of, scale_to_kernel_point
from .interlace_polytope import LevelConfig, interlaces
from .densities import DensityRequest, density

__all__ = [
    "TilingState",
    "ChainStats",
    "Untileable",
    "OutOfRange",
    "init_tiling",
    "mcmc_sweep",
    "extract_blue",
    "enumerate_tilings",
    "empirical_vs_theory",
    "effective_sample_size",
]


class Untileable(ValueError):
    """The geometry admits no tiling."""


class OutOfRange(ValueError):
    """Oblique line index outside the blue-dot range."""


@dataclass
class TilingState:
    geometry: HexagonWithCuts
    rows: np.ndarray  # shape (N+1, K), dtype int

    def key(self) -> tuple:
        return tuple(map(tuple, self.rows.tolist()))

    def check(self) -> None:
        geom = self.geometry
        P = self.rows
        if P.shape != (geom.N + 1, geom.n_paths):
            raise ValueError("state shape disagrees with the geometry")
        if list(P[0]) != list(geom.bottom_row()):
            raise ValueError("bottom boundary row altered")
        if list(P[-1]) != list(geom.top_row()):
            raise ValueError("top boundary row altered")
        if np.any(np.diff(P, axis=1) >= 0):
            raise ValueError("rows must be strictly decreasing")
        steps = P[:-1] - P[1:]
        if np.any((steps != 0) & (steps != 1)):
            raise ValueError("path steps must be 0 or 1")


@dataclass
class ChainStats:
    sweeps: int = 0
    proposals: int = 0
    accepted: int = 0
    observable_trace: list = field(default_factory=list)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0


def init_tiling(geom: HexagonWithCuts) -> TilingState:
    """Minimal tiling: every path descends as early as possible."""
    bottom = np.array(geom.bottom_row())
    top = np.array(geom.top_row())
    if bottom.shape != top.shape:
        raise Untileable("boundary rows carry different path counts")
    drop = bottom - top
    if np.any(drop < 0) or np.any(drop > geom.N):
        raise Untileable("a boundary pair is unreachable in N steps")
    m = np.arange(geom.N + 1)[:, None]
    rows = np.maximum(top[None, :], bottom[None, :] - m)
    state = TilingState(geometry=geom, rows=rows)
    state.check()
    return state


def balanced_tiling(geom: HexagonWithCuts) -> TilingState:
    """Tiling from rounded linear interpolation between the boundary
    rows; a much shorter burn-in start than the extremal tiling.  Falls
    back to the minimal tiling if rounding breaks the row ordering."""
    bottom = np.array(geom.bottom_row())
    top = np.array(geom.top_row())
    m = np.arange(geom.N + 1)[:, None]
    drop = (bottom - top)[None, :]
    rows = bottom[None, :] - (m * drop + geom.N // 2) // geom.N
    state = TilingState(geometry=geom, rows=rows)
    try:
        state.check()
    except ValueError:
        return init_tiling(geom)
    return state


_PARITY_CACHE: dict = {}


def _parity_masks(shape):
    if shape not in _PARITY_CACHE:
        m = np.arange(shape[0])[:, None]
        i = np.arange(shape[1])[None, :]
        interior = (m >= 1) & (m <= shape[0] - 2)
        _PARITY_CACHE[shape] = [((m + i) % 2 == p) & interior for p in (0, 1)]
    return _PARITY_CACHE[shape]


def _heat_bath_scan_py(P, U) -> None:
    """Sequential full-path heat-bath scan.  Given the other paths, one
    path is uniform over the monotone bridges confined strictly between
    its neighbours; that law is sampled exactly by a forward bridge
    count over the rows and a backward draw, so each path update is a
    Gibbs step for the uniform law and needs no accept/reject.  Written
    with scalar loops so numba can compile it; counts may exceed 2**53,
    which only perturbs the branch probabilities at the rounding level."""
    n_rows, K = P.shape
    lo = np.empty(n_rows, dtype=np.int64)
    hi = np.empty(n_rows, dtype=np.int64)
    # shared count buffer; the reachability band caps every window width
    # at (n_rows + 1) // 2, and the DP never reads beyond the cells it
    # wrote for the current path, so no per-path zeroing is needed
    f = np.empty((n_rows, (n_rows + 3) // 2))
    for i in range(K):
        bottom = P[0, i]
        top = P[n_rows - 1, i]
        for m in range(n_rows):
            l = bottom - m
            if top > l:
                l = top
            h = top + (n_rows - 1 - m)
            if bottom < h:
                h = bottom
            if i > 0 and P[m, i - 1] - 1 < h:
                h = P[m, i - 1] - 1
            if i < K - 1 and P[m, i + 1] + 1 > l:
                l = P[m, i + 1] + 1
            lo[m] = l
            hi[m] = h
        f[0, 0] = 1.0
        for m in range(1, n_rows):
            shift = lo[m] - lo[m - 1]
            prev_w = hi[m - 1] - lo[m - 1]
            for j in range(hi[m] - lo[m] + 1):
                acc = 0.0
                jp = j + shift
                if 0 <= jp <= prev_w:
                    acc += f[m - 1, jp]
                if 0 <= jp + 1 <= prev_w:
                    acc += f[m - 1, jp + 1]
                f[m, j] = acc
        p = top
        for m in range(n_rows - 2, 0, -1):
            j = p - lo[m]
            w = hi[m] - lo[m]
            stay = f[m, j] if 0 <= j <= w else 0.0
            up = f[m, j + 1] if 0 <= j + 1 <= w else 0.0
            if U[i, m] * (stay + up) >= stay:
                p += 1
            P[m, i] = p


_heat_bath_scan = njit(cache=True)(_heat_bath_scan_py) if njit else _heat_bath_scan_py


def mcmc_sweep(state: TilingState, rng, stats: ChainStats | None = None) -> ChainStats:
    """One sweep: for each parity class, simultaneous +-1 proposals on
    every interior site of the class, accepted where the strict row
    ordering and the {0,1} step constraints survive; then one full-path
    heat-bath scan."""
    if stats is None:
        stats = ChainStats()
    P = state.rows
    K = P.shape[1]
    for mask in _parity_masks(P.shape):
        delta = rng.integers(0, 2, size=P.shape) * 2 - 1
        cand = P + delta
        ok = mask.copy()
        ok[:, 1:] &= cand[:, 1:] < P[:, :-1]
        ok[:, : K - 1] &= cand[:, : K - 1] > P[:, 1:]
        up = P[:-1] - cand[1:]
        ok[1:] &= (up == 0) | (up == 1)
        dn = cand[:-1] - P[1:]
        ok[:-1] &= (dn == 0) | (dn == 1)
        P[ok] = cand[ok]
        stats.accepted += int(ok.sum())
        stats.proposals += int(mask.sum())
    if P.shape[0] >= 3:
        _heat_bath_scan(P, rng.random((K, P.shape[0])))
        stats.accepted += K
        stats.proposals += K
    stats.sweeps += 1
    stats.observable_trace.append(int(P[1:-1].sum()))
    return stats


def extract_blue(state: TilingState, eta: int) -> tuple:
    """xi-coordinates of the blue dots on oblique line eta, largest
    first.  A blue tile is an x-preserving step p between rows l-1 and
    l; its dot has eta = p + l and xi = l - p - 1."""
    geom = state.geometry
    if not (-geom.d + 1 <= eta <= geom.m1 + geom.m2 + geom.b - 1):
        raise OutOfRange(f"eta={eta} outside the blue-dot range")
    P = state.rows
    ells = np.arange(1, geom.N + 1)[:, None]
    hits = (P[:-1] == P[1:]) & (P[1:] + ells == eta)
    ell_idx = np.nonzero(hits)[0] + 1
    xis = [int(2 * ell - eta - 1) for ell in ell_idx]
    return tuple(sorted(xis, reverse=True))


def enumerate_tilings(geom: HexagonWithCuts, limit: int = 100_000) -> list:
    """All tilings by row-wise depth-first search; desk-scale only."""
    bottom, top = geom.bottom_row(), geom.top_row()
    K, N = len(bottom), geom.N
    results = []

    def extend(rows):
        m = len(rows)  # index of the row about to be built
        if m == N + 1:
            if tuple(rows[-1]) == tuple(top):
                results.append([list(r) for r in rows])
                if len(results) > limit:
                    raise ValueError("too many tilings to enumerate")
            return
        prev = rows[-1]

        def options(i, chosen):
            if i == K:
                rows.append(list(chosen))
                extend(rows)
                rows.pop()
                return
            for p in (prev[i], prev[i] - 1):
                # stay reachable: path i must still meet top[i] in time
                if chosen and p >= chosen[-1]:
                    continue
                if not (0 <= p - top[i] <= N - m):
                    continue
                chosen.append(p)
                options(i + 1, chosen)
                chosen.pop()

        options(0, [])

    extend([list(bottom)])
    return [
        TilingState(geometry=geom, rows=np.array(rows)) for rows in results
    ]


def effective_sample_size(trace) -> float:
    """ESS from the integrated autocorrelation time of the trace."""
    x = np.asarray(trace, dtype=float)
    n = len(x)
    if n < 4 or np.var(x) == 0.0:
        return float(n)
    x = x - x.mean()
    acf = np.correlate(x, x, mode="full")[n - 1 :]
    acf = acf / acf[0]
    tau = 1.0
    for k in range(1, min(n // 2, 5000)):
        if acf[k] < 0.05:
            break
        tau += 2.0 * acf[k]
    return float(n / tau)


def empirical_vs_theory(
    sp: ScalingParams,
    levels,
    sweeps: int = 4000,
    burnin: int | None = None,
    rng=None,
    bins: int = 12,
    thin: int = 5,
    theta_range: tuple = (-2.5, 2.5),
):
    """Histogram the scaled blue positions theta at each requested level
    against the exact one-level density, for strip levels carrying one
    particle (r = 1).  Returns a dict with the comparison table, a total
    variation distance per level, and chain diagnostics."""
    if sp.r != 1:
        raise ValueError("empirical comparison implemented for r = 1 levels")
    rng = np.random.default_rng(rng)
    geom, residuals = sp.make_geometry()
    params = kernel_params_of(sp)
    state = balanced_tiling(geom)
    if burnin is None:
        burnin = 10 * geom.N
    stats = ChainStats()
    for _ in range(burnin):
        mcmc_sweep(state, rng, stats)
    samples = {tau: [] for tau in levels}
    violations = 0
    n_kept = 0
    for s in range(sweeps):
        mcmc_sweep(state, rng, stats)
        if s % thin:
            continue
        n_kept += 1
        prev = None
        for tau in sorted(levels):
            xs = extract_blue(state, geom.eta0 + tau)
            if len(xs) != 1:
                raise ValueError("strip level does not carry exactly one blue dot")
            # levels interlace in the kernel variable x, i.e. in -xi
            if prev is not None and not interlaces(
                sorted((-v for v in prev), reverse=True),
                sorted((-v for v in xs), reverse=True),
            ):
                violations += 1
            prev = xs
            pt = scale_to_kernel_point(sp, geom, geom.eta0 + tau, xs[0])
            samples[tau].append(pt.theta)
    edges = np.linspace(theta_range[0], theta_range[1], bins + 1)
    table = []
    distances = {}
    for tau in levels:
        thetas = np.asarray(samples[tau])
        counts, _ = np.histogram(thetas, bins=edges)
        inside = counts.sum()
        mids = 0.5 * (edges[:-1] + edges[1:])
        width = edges[1] - edges[0]
        # density() lives in x = -theta/2, so the theta-density is p(x)/2
        theory = np.array(
            [
                0.5 * density(
                    DensityRequest(
                        params, tau, tau,
                        LevelConfig(tau, (-t / 2.0,)),
                        LevelConfig(tau, (-t / 2.0,)),
                    )
                )
                for t in mids
            ]
        )
        probs = theory * width
        expected = probs * inside / max(probs.sum(), 1e-300)
        dist = 0.5 * np.abs(counts / max(inside, 1) - probs / probs.sum()).sum()
        distances[tau] = float(dist)
        for k in range(bins):
            sd = math.sqrt(max(expected[k] * (1.0 - probs[k] / probs.sum()), 1e-300))
            z = (counts[k] - expected[k]) / sd
            table.append(
                {
                    "tau": tau,
                    "theta_bin_lo": float(edges[k]),
                    "theta_bin_hi": float(edges[k + 1]),
                    "empirical": int(counts[k]),
                    "theory": float(expected[k]),
                    "z": float(z),
                }
            )
    return {
        "geometry": geom,
        "residuals": residuals,
        "table": table,
        "distance": distances,
        "samples": {tau: list(map(float, samples[tau])) for tau in levels},
        "interlacing_violations": violations,
        "kept_samples": n_kept,
        "acceptance_rate": stats.acceptance_rate,
        "effective_sample_size": effective_sample_size(stats.observable_trace),
    }
