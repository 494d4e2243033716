"""Command-line front end: evaluate the kernel and the densities on
grids, run the verification suites, and run tiling simulations, writing
CSV/JSON/SVG artifacts with a provenance header.

Config is a single JSON document; command-line flags override scalar
fields.  Exit codes: 0 success, 1 config error, 2 verification failure,
3 infeasible geometry.
"""
from __future__ import annotations

import hashlib
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .contours import vertical_line, integrate_1d
from .densities import (
    DensityRequest,
    density,
    factorization_check,
    fay_identity,
    kernel_block_density,
)
from .geometry import HexagonWithCuts, ScalingParams
from .interlace_polytope import LevelConfig, volume_det, volume_oracle
from .special_functions import phi
from .tacnode_kernel import (
    KernelPoint,
    UnsupportedRegime,
    kernel_dtac_contour,
    kernel_dtac_series,
)
from .theta_integrals import KernelParams
from .tiling_sim import Untileable, empirical_vs_theory, init_tiling, mcmc_sweep

EXIT_CONFIG = 1
EXIT_VERIFY = 2
EXIT_GEOMETRY = 3


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
        cfg = json.loads(text)
    except FileNotFoundError:
        click.echo(f"config error: file not found: {path}", err=True)
        sys.exit(EXIT_CONFIG)
    except json.JSONDecodeError as exc:
        click.echo(f"config error: invalid JSON: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    if not isinstance(cfg, dict):
        click.echo("config error: top level must be an object", err=True)
        sys.exit(EXIT_CONFIG)
    cfg["_sha256"] = hashlib.sha256(text.encode()).hexdigest()
    return cfg


def _require(cfg: dict, field: str, cast=None):
    if field not in cfg:
        click.echo(f"config error: missing field '{field}'", err=True)
        sys.exit(EXIT_CONFIG)
    val = cfg[field]
    if cast is not None:
        try:
            return cast(val)
        except (TypeError, ValueError):
            click.echo(f"config error: field '{field}' has invalid value {val!r}", err=True)
            sys.exit(EXIT_CONFIG)
    return val


def _kernel_params(cfg: dict) -> KernelParams:
    try:
        return KernelParams(
            r=_require(cfg, "r", int),
            rho=_require(cfg, "rho", int),
            beta=float(cfg.get("beta", 0.0)),
        )
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


def _provenance(cfg: dict, seed) -> str:
    return (
        f"# tacnode-lab {__version__} config_sha256={cfg.get('_sha256', 'none')}"
        f" seed={seed}"
    )


def _write_csv(path: Path, cfg: dict, seed, header: list, rows: list) -> None:
    lines = [_provenance(cfg, seed), ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


@click.group()
def main():
    """Numerics for the discrete tacnode kernel and the blue-tile
    densities between two cuts of a hexagon."""


_CONFIG_OPTS = [
    click.option("--config", "config_path", required=True, type=str),
    click.option("--out", "out_dir", required=True, type=str),
    click.option("--seed", default=0, type=int, show_default=True),
]


def _with_opts(f):
    for opt in reversed(_CONFIG_OPTS):
        f = opt(f)
    return f


@main.command()
@_with_opts
def kernel(config_path, out_dir, seed):
    """Evaluate the kernel on a grid by both routes; CSV output."""
    cfg = _load_config(config_path)
    params = _kernel_params(cfg)
    taus = _require(cfg, "taus", list)
    thetas = _require(cfg, "thetas", list)
    tol = float(cfg.get("tolerance", 1e-7))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    worst = 0.0
    for t1 in taus:
        for th1 in thetas:
            for t2 in taus:
                for th2 in thetas:
                    p1 = KernelPoint(int(t1), float(th1))
                    p2 = KernelPoint(int(t2), float(th2))
                    contour = kernel_dtac_contour(params, p1, p2)
                    try:
                        series = kernel_dtac_series(params, p1, p2)
                        agree = abs(series - contour)
                        worst = max(worst, agree)
                        route = "both"
                    except UnsupportedRegime:
                        series, agree, route = None, None, "contour-only"
                    rows.append(
                        [t1, th1, t2, th2, series, contour, route, agree]
                    )
    _write_csv(
        out / "kernel.csv", cfg, seed,
        ["tau1", "theta1", "tau2", "theta2", "series", "contour", "route", "abs_diff"],
        rows,
    )
    click.echo(f"kernel grid written ({len(rows)} rows), max route diff {worst:.3g}")
    if worst > tol:
        click.echo(f"route disagreement {worst:.3g} exceeds tolerance {tol:.3g}", err=True)
        sys.exit(EXIT_VERIFY)


def _instance(params, spec, want_two_levels):
    tau1 = int(spec["tau1"])
    tau2 = int(spec.get("tau2", tau1))
    x = LevelConfig(tau1, tuple(spec["x"]))
    y = LevelConfig(tau2, tuple(spec.get("y", spec["x"])))
    if want_two_levels and tau2 <= tau1:
        raise ValueError("volume instances need tau1 < tau2")
    return DensityRequest(params, tau1, tau2, x, y)


@main.command("density")
@_with_opts
def density_cmd(config_path, out_dir, seed):
    """Evaluate the density instances by all three routes; CSV output."""
    cfg = _load_config(config_path)
    params = _kernel_params(cfg)
    instances = _require(cfg, "instances", list)
    tol = float(cfg.get("tolerance", 1e-6))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows, worst = [], 0.0
    for spec in instances:
        try:
            req = _instance(params, spec, want_two_levels=False)
            rep = factorization_check(req)
        except (KeyError, ValueError) as exc:
            click.echo(f"config error: bad instance {spec}: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        worst = max(worst, rep.max_rel_discrepancy)
        rows.append(
            [
                req.tau1, req.tau2, " ".join(map(_fmt, req.x.points)),
                " ".join(map(_fmt, req.y.points)),
                rep.d_times_vol, rep.block_det, rep.det_A * rep.det_B,
                rep.max_rel_discrepancy,
            ]
        )
    _write_csv(
        out / "density.csv", cfg, seed,
        ["tau1", "tau2", "x", "y", "prefactor_route", "kernel_block_route",
         "factorization_route", "max_rel_discrepancy"],
        rows,
    )
    click.echo(f"density instances written ({len(rows)} rows), max discrepancy {worst:.3g}")
    if worst > tol:
        sys.exit(EXIT_VERIFY)


@main.command()
@_with_opts
def volume(config_path, out_dir, seed):
    """Evaluate interlacing-cone volumes and their oracles; CSV output."""
    cfg = _load_config(config_path)
    params = _kernel_params(cfg)
    instances = _require(cfg, "instances", list)
    samples = int(cfg.get("samples", 100_000))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    rows = []
    for spec in instances:
        try:
            tau1, tau2 = int(spec["tau1"]), int(spec["tau2"])
            x = LevelConfig(tau1, tuple(spec["x"]))
            y = LevelConfig(tau2, tuple(spec["y"]))
        except (KeyError, ValueError) as exc:
            click.echo(f"config error: bad instance {spec}: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        det = volume_det(params, tau1, x, tau2, y)
        rec, _ = volume_oracle(params, tau1, x, tau2, y, method="recursive")
        mc, err = volume_oracle(
            params, tau1, x, tau2, y, method="montecarlo", samples=samples, rng=rng
        )
        rows.append(
            [tau1, tau2, " ".join(map(_fmt, x.points)), " ".join(map(_fmt, y.points)),
             det, rec, mc, err]
        )
    _write_csv(
        out / "volume.csv", cfg, seed,
        ["tau1", "tau2", "x", "y", "determinant", "recursive", "montecarlo", "mc_stderr"],
        rows,
    )
    click.echo(f"volume instances written ({len(rows)} rows)")


def _suite_phi(params, rng):
    rule = vertical_line()
    worst = 0.0
    for n in range(-8, 9):
        for eta in np.linspace(-3.0, 3.0, 21):
            direct = phi(n, eta)
            quad = integrate_1d(
                rule, lambda w: np.exp(w * w + 2.0 * eta * w) / w ** (n + 1)
            ).real
            worst = max(worst, abs(direct - quad))
    return worst, 1e-8


def _suite_theta_symmetry(params, rng):
    from .theta_integrals import theta_pm, theta_r, theta_zero

    worst = 0.0
    for _ in range(5):
        u = complex(*rng.uniform(-0.2, 0.2, 2))
        v = complex(rng.uniform(1.5, 2.5), rng.uniform(-1.0, 1.0))
        a, b = theta_pm(params, +1, u, v), theta_pm(params, +1, v, u)
        worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    t0 = theta_zero(params)
    worst = max(worst, abs(theta_r(params, 0.0, 0.0) - t0) / abs(t0))
    return worst, 1e-12


def _suite_volume(params, rng):
    worst = 0.0
    for _ in range(5):
        base = np.sort(rng.uniform(-1.5, 1.5, params.r))[::-1]
        x = LevelConfig(params.rho - 1, tuple(base))
        y = LevelConfig(params.rho, tuple(base + rng.uniform(0.1, 0.5)))
        det = volume_det(params, params.rho - 1, x, params.rho, y)
        rec, _ = volume_oracle(params, params.rho - 1, x, params.rho, y)
        ref = max(abs(det), abs(rec), 1e-12)
        worst = max(worst, abs(det - rec) / ref)
    return worst, 1e-8


def _suite_involution(params, rng):
    worst = 0.0
    rho, beta = params.rho, params.beta
    for tau1 in (0, rho):
        for tau2 in (0, rho):
            for th1 in (-0.5, 0.4):
                for th2 in (-0.3, 0.6):
                    a = kernel_dtac_contour(
                        params, KernelPoint(tau1, th1), KernelPoint(tau2, th2)
                    )
                    b = kernel_dtac_contour(
                        params,
                        KernelPoint(rho - tau2, beta - th2),
                        KernelPoint(rho - tau1, beta - th1),
                    )
                    worst = max(worst, abs(a - b))
    return worst, 1e-7


def _suite_routes(params, rng):
    worst = 0.0
    for tau1, tau2 in [(0, 0), (0, params.rho), (params.rho, params.rho + 1)]:
        for th1 in (-0.4, 0.5):
            for th2 in (-0.2, 0.3):
                p1, p2 = KernelPoint(tau1, th1), KernelPoint(tau2, th2)
                try:
                    s = kernel_dtac_series(params, p1, p2)
                except UnsupportedRegime:
                    continue
                c = kernel_dtac_contour(params, p1, p2)
                worst = max(worst, abs(s - c))
    return worst, 1e-7


def _suite_density(params, rng):
    worst = 0.0
    for tau1, tau2 in [(0, 0), (params.rho - 1, params.rho), (params.rho, params.rho + 1)]:
        n1 = max(tau1 - params.rho, 0) + params.r
        n2 = max(tau2 - params.rho, 0) + params.r
        base = np.sort(rng.uniform(-1.2, 1.2, n2))[::-1]
        y = tuple(base)
        x = tuple(base[:n1] - rng.uniform(0.05, 0.2)) if tau1 < tau2 else y
        req = DensityRequest(
            params, tau1, tau2, LevelConfig(tau1, x), LevelConfig(tau2, y)
        )
        rep = factorization_check(req)
        worst = max(worst, rep.max_rel_discrepancy)
    return worst, 1e-6


def _suite_fay(params, rng):
    worst = 0.0
    for r in (1, 2, 3):
        base = np.sort(rng.uniform(-1.5, 1.5, r))[::-1]
        xs = tuple(base)
        ys = tuple(base + rng.uniform(0.1, 0.6))
        lhs, rhs = fay_identity(xs, ys, m=rng.integers(1, 4))
        ref = max(abs(lhs), abs(rhs), 1e-12)
        worst = max(worst, abs(lhs - rhs) / ref)
    return worst, 1e-8


_SUITES = {
    "phi": _suite_phi,
    "theta": _suite_theta_symmetry,
    "volume": _suite_volume,
    "involution": _suite_involution,
    "routes": _suite_routes,
    "density": _suite_density,
    "fay": _suite_fay,
}


@main.command()
@_with_opts
@click.option("--only", default=None, type=str, help="restrict to one named suite")
def verify(config_path, out_dir, seed, only):
    """Run the verification suites; JSON report, nonzero exit on failure."""
    cfg = _load_config(config_path)
    params = _kernel_params(cfg)
    overrides = cfg.get("tolerances", {})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = [only] if only else list(_SUITES)
    if only and only not in _SUITES:
        click.echo(f"config error: unknown suite '{only}' (have {sorted(_SUITES)})", err=True)
        sys.exit(EXIT_CONFIG)
    report = {"version": __version__, "config_sha256": cfg["_sha256"],
              "seed": seed, "suites": {}}
    failed = False
    for name in names:
        rng = np.random.default_rng(seed)
        discrepancy, tol = _SUITES[name](params, rng)
        tol = float(overrides.get(name, tol))
        ok = discrepancy <= tol
        failed = failed or not ok
        report["suites"][name] = {
            "discrepancy": discrepancy, "tolerance": tol,
            "pass": bool(ok),
        }
        click.echo(f"{name}: {'PASS' if ok else 'FAIL'} "
                   f"(discrepancy {discrepancy:.3g}, tolerance {tol:.3g})")
    (out / "verify.json").write_text(json.dumps(report, indent=2) + "\n")
    if failed:
        sys.exit(EXIT_VERIFY)


def _tiling_svg(state) -> str:
    """Render the path encoding: blue segments for x-preserving steps,
    red for descents, on the (x, m) plane."""
    geom = state.geometry
    P = state.rows
    sc = 12
    xmin = int(P.min()) - 1
    xmax = int(P.max()) + 1
    w = (xmax - xmin + 2) * sc
    h = (geom.N + 2) * sc
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]

    def pt(x, m):
        return (x - xmin + 1) * sc, h - (m + 1) * sc

    for i in range(P.shape[1]):
        for m in range(geom.N):
            x0, y0 = pt(P[m, i], m)
            x1, y1 = pt(P[m + 1, i], m + 1)
            color = "#2255cc" if P[m, i] == P[m + 1, i] else "#cc3333"
            parts.append(
                f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts)


@main.command()
@_with_opts
def simulate(config_path, out_dir, seed):
    """Sample tilings, compare blue-dot statistics with the exact
    density; histogram CSV, JSON report, and SVG snapshot."""
    cfg = _load_config(config_path)
    try:
        sp = ScalingParams(
            d=_require(cfg, "d", int),
            kappa=_require(cfg, "kappa", float),
            r=_require(cfg, "r", int),
            rho=_require(cfg, "rho", int),
            beta1=float(cfg.get("beta1", 0.0)),
            beta2=float(cfg.get("beta2", 0.0)),
            gamma1=float(cfg.get("gamma1", 0.0)),
            gamma2=float(cfg.get("gamma2", 0.0)),
        )
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    levels = [int(t) for t in cfg.get("levels", [0])]
    sweeps = int(cfg.get("sweeps", 4000))
    burnin = cfg.get("burnin")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        result = empirical_vs_theory(
            sp, levels, sweeps=sweeps,
            burnin=None if burnin is None else int(burnin),
            rng=seed,
        )
    except Untileable as exc:
        click.echo(f"infeasible geometry: {exc}", err=True)
        sys.exit(EXIT_GEOMETRY)
    geom = result["geometry"]
    rows = [
        [row["tau"], row["theta_bin_lo"], row["theta_bin_hi"],
         row["empirical"], row["theory"], row["z"]]
        for row in result["table"]
    ]
    _write_csv(
        out / "histogram.csv", cfg, seed,
        ["tau", "theta_bin_lo", "theta_bin_hi", "empirical", "theory", "z"],
        rows,
    )
    report = {
        "version": __version__,
        "config_sha256": cfg["_sha256"],
        "seed": seed,
        "geometry": json.loads(geom.to_json()),
        "rounding_residuals": result["residuals"],
        "distance": {str(k): v for k, v in result["distance"].items()},
        "interlacing_violations": result["interlacing_violations"],
        "kept_samples": result["kept_samples"],
        "acceptance_rate": result["acceptance_rate"],
        "effective_sample_size": result["effective_sample_size"],
    }
    (out / "simulate.json").write_text(json.dumps(report, indent=2) + "\n")
    rng = np.random.default_rng(seed)
    state = init_tiling(geom)
    for _ in range(min(200, sweeps)):
        mcmc_sweep(state, rng)
    (out / "tiling.svg").write_text(_tiling_svg(state) + "\n")
    click.echo(
        "simulation written: distance "
        + ", ".join(f"tau={k}: {v:.4f}" for k, v in result["distance"].items())
    )


if __name__ == "__main__":
    main()
