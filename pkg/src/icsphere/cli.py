"""Command-line interface.

Four subcommands (moments, simulate, empirical, oracle) plus rerun.
Every artifact-producing run writes a manifest.json capturing the
normalized argument vector, the seed, and the sha256 of each artifact;
rerunning a manifest reproduces the artifacts bit for bit.

Exit codes: 0 success, 1 degenerate input, 2 usage or model error,
3 convergence or sampling failure, 4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import empirical as emp
from . import fixtures, montecarlo, moments, optimize, specfun
from .errors import (
    ConvergenceError,
    DegenerateInputError,
    DimensionError,
    DomainError,
    InvalidCovarianceError,
    MalformedInputError,
    ModelError,
    NoUniqueSolutionError,
)
from .sphere import UnitDirection, standardize

DEFAULT_SEED = 20240701
SEED_ENV_VAR = "ICSPHERE_SEED"

EXIT_OK = 0
EXIT_DEGENERATE = 1
EXIT_USAGE = 2
EXIT_CONVERGENCE = 3
EXIT_ORACLE = 4


class OracleFailure(RuntimeError):
    """An oracle suite found a disagreement beyond tolerance."""


# ---------------------------------------------------------------- helpers


def _parse_vector(text: str, what: str) -> np.ndarray:
    """Parse 'a,b,c' or '@path' (JSON list, or whitespace/comma numbers)."""
    text = text.strip()
    if text.startswith("@"):
        try:
            content = Path(text[1:]).read_text().strip()
        except OSError as exc:
            raise MalformedInputError(f"cannot read {what} file: {exc}") from None
        if content.startswith("["):
            try:
                values = json.loads(content)
            except json.JSONDecodeError as exc:
                raise MalformedInputError(f"bad JSON in {what} file: {exc}") from None
        else:
            values = content.replace(",", " ").split()
    else:
        values = [v for v in text.split(",") if v.strip() != ""]
    try:
        arr = np.asarray([float(v) for v in values], dtype=np.float64)
    except (TypeError, ValueError):
        raise MalformedInputError(f"{what} is not a list of numbers") from None
    if arr.size < 2:
        raise MalformedInputError(f"{what} needs at least 2 components")
    return arr


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise MalformedInputError(
                f"{SEED_ENV_VAR} must be an integer, got {env!r}"
            ) from None
    return DEFAULT_SEED


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write_json(path: Path, obj) -> None:
    path.write_text(_json_text(obj))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(c) for c in row])


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _ensure_outdir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(outdir: Path, command: str, argv_norm: list[str],
                    seed: int | None, artifact_names: list[str]) -> None:
    manifest = {
        "command": command,
        "parameters": {"argv": argv_norm},
        "seed": seed,
        "artifacts": {
            name: _sha256_file(outdir / name) for name in sorted(artifact_names)
        },
        "library_version": __version__,
    }
    _write_json(outdir / "manifest.json", manifest)


# ---------------------------------------------------------------- moments


def _cmd_moments(args) -> int:
    mu = _parse_vector(args.mu, "--mu")
    model = moments.HomoscedasticModel(mu=mu, sigma=args.sigma, rho=args.rho)
    summary = moments.md_mrl_homoscedastic(model)
    payload = {
        "n": model.n,
        "sigma": args.sigma,
        "rho": args.rho,
        "concentration": model.concentration(),
        "summary": summary.to_json_dict(),
    }
    if args.theta is not None:
        theta = standardize(_parse_vector(args.theta, "--theta"))
        payload["theta"] = [float(v) for v in theta.coords]
        payload["expectation"] = moments.expectation_T(theta, summary)
        payload["variance"] = moments.variance_T(theta, summary.cov_chi)
    text = _json_text(payload)
    sys.stdout.write(text)
    if args.output_dir is not None:
        outdir = _ensure_outdir(args)
        (outdir / "moments.json").write_text(text)
        argv_norm = ["moments", "--mu", args.mu, "--sigma", repr(args.sigma),
                     "--rho", repr(args.rho)]
        if args.theta is not None:
            argv_norm += ["--theta", args.theta]
        _write_manifest(outdir, "moments", argv_norm, None, ["moments.json"])
    return EXIT_OK


# ---------------------------------------------------------------- simulate


def _load_params(arg: str | None) -> dict:
    if arg is None:
        return fixtures.load_params()
    if arg.startswith("@"):
        return fixtures.load_params(arg[1:])
    return fixtures.load_params(arg)


def _cmd_simulate_ic_pdf(args, seed: int) -> int:
    params = _load_params(args.params)
    which = "ten_hetero" if args.variant == "hetero" else "ten_base"
    mu, cov = fixtures.model_params(params, which)
    model = moments.GaussianModel(mu, cov)
    stream = montecarlo.SeededStream(seed)
    density, values = montecarlo.ic_distribution(
        model, args.mode, args.count, stream,
        bandwidth=args.bandwidth, threads=args.threads,
    )
    outdir = _ensure_outdir(args)
    _write_csv(outdir / "ic_pdf_density.csv", ["t", "density"],
               zip(density.grid.tolist(), density.density.tolist()))
    summary = {
        "mode": args.mode,
        "variant": args.variant,
        "count": int(values.size),
        "seed": seed,
        "bandwidth": float(density.bandwidth),
        "mean": float(values.mean()),
        "sd": float(values.std(ddof=1)),
        "min": float(values.min()),
        "max": float(values.max()),
    }
    _write_json(outdir / "ic_pdf_summary.json", summary)
    argv_norm = ["simulate", "ic-pdf", "--mode", args.mode,
                 "--variant", args.variant, "--count", str(args.count),
                 "--seed", str(seed)]
    if args.params is not None:
        argv_norm += ["--params", args.params]
    if args.bandwidth is not None:
        argv_norm += ["--bandwidth", repr(args.bandwidth)]
    _write_manifest(outdir, "simulate.ic-pdf", argv_norm, seed,
                    ["ic_pdf_density.csv", "ic_pdf_summary.json"])
    sys.stdout.write(
        f"ic-pdf: {values.size} projections, mean {summary['mean']:.6f}, "
        f"sd {summary['sd']:.6f}\n"
    )
    return EXIT_OK


def _cmd_simulate_md_perturb(args, seed: int) -> int:
    params = _load_params(args.params)
    mu, cov = fixtures.model_params(params, "three")
    factors = [float(f) for f in args.factors.split(",") if f.strip() != ""]
    stream = montecarlo.SeededStream(seed)
    points = montecarlo.md_perturbation_experiment(
        mu, cov, args.axis, factors, args.count, stream, threads=args.threads,
    )
    base = standardize(mu).coords
    outdir = _ensure_outdir(args)
    n = len(mu)
    header = ["factor", "mrl"] + [f"md_{i + 1}" for i in range(n)] + ["angle_to_base_deg"]
    rows = []
    for pt in points:
        cosang = float(np.clip(pt.md.coords @ base, -1.0, 1.0))
        rows.append([pt.factor, pt.mrl]
                    + [float(v) for v in pt.md.coords]
                    + [math.degrees(math.acos(cosang))])
    _write_csv(outdir / "md_perturb.csv", header, rows)
    argv_norm = ["simulate", "md-perturb", "--axis", args.axis,
                 "--factors", args.factors, "--count", str(args.count),
                 "--seed", str(seed)]
    if args.params is not None:
        argv_norm += ["--params", args.params]
    _write_manifest(outdir, "simulate.md-perturb", argv_norm, seed,
                    ["md_perturb.csv"])
    sys.stdout.write(f"md-perturb: {len(points)} factors along {args.axis}\n")
    return EXIT_OK


def _cmd_simulate_mrl_check(args, seed: int) -> int:
    params = _load_params(args.params)
    mu, cov = fixtures.model_params(params, "ten_base")
    model = moments.GaussianModel(mu, cov)
    n = model.n

    # Reduced-form summary statistics, each rounded to 4 decimals before
    # entering the closed form (the reporting convention for this check).
    pmu_norm = float(np.linalg.norm(mu - np.mean(mu)))
    sigma_hat = float(np.sqrt(np.diag(cov).mean()))
    sd = np.sqrt(np.diag(cov))
    corr = cov / np.outer(sd, sd)
    rho_hat = float(corr[np.triu_indices(n, 1)].mean())
    pm_r, sg_r, rh_r = (round(v, 4) for v in (pmu_norm, sigma_hat, rho_hat))
    x = round(pm_r / (sg_r * math.sqrt(1.0 - rh_r)), 4)
    closed = specfun.varrho(n - 1, x)

    stream = montecarlo.SeededStream(seed)
    mc = montecarlo.estimate_chi_mrl(model, args.count, stream,
                                     threads=args.threads)
    bracket = [0.039, 0.044]
    payload = {
        "projected_mean_norm": pmu_norm,
        "sigma_hat": sigma_hat,
        "rho_hat": rho_hat,
        "rounded": {"projected_mean_norm": pm_r, "sigma_hat": sg_r,
                    "rho_hat": rh_r, "argument": x},
        "closed_form_mrl": closed,
        "mc_mrl": mc,
        "count": args.count,
        "seed": seed,
        "bracket": bracket,
        "mc_within_bracket": bool(bracket[0] <= mc <= bracket[1]),
    }
    outdir = _ensure_outdir(args)
    _write_json(outdir / "mrl_check.json", payload)
    argv_norm = ["simulate", "mrl-check", "--count", str(args.count),
                 "--seed", str(seed)]
    if args.params is not None:
        argv_norm += ["--params", args.params]
    _write_manifest(outdir, "simulate.mrl-check", argv_norm, seed,
                    ["mrl_check.json"])
    sys.stdout.write(
        f"mrl-check: closed-form {closed:.4f} | mc {mc:.4f} "
        f"(count {args.count})\n"
    )
    return EXIT_OK


# ---------------------------------------------------------------- empirical


def _parse_windows(spec: str, panel: emp.ReturnPanel) -> list[tuple[str, np.ndarray]]:
    if spec == "full":
        return [("full", np.arange(panel.t))]
    if spec == "yearly":
        wins = emp.yearly_windows(panel)
        wins.append(("full", np.arange(panel.t)))
        return wins
    if ":" in spec:
        lo, hi = spec.split(":", 1)
        try:
            start = datetime.date.fromisoformat(lo)
            end = datetime.date.fromisoformat(hi)
        except ValueError:
            raise MalformedInputError(
                f"--windows range must be ISO dates 'from:to', got {spec!r}"
            ) from None
        return [emp.range_window(panel, start, end)]
    raise MalformedInputError(
        f"--windows must be 'yearly', 'full', or 'from:to', got {spec!r}"
    )


def _cmd_empirical(args) -> int:
    panel = emp.load_panel(args.input, missing_policy=args.missing_policy)
    spanel = emp.standardize_panel(panel)
    iota = None
    if args.iota != "md":
        iota = standardize(_parse_vector(args.iota, "--iota"))
        if iota.dim != panel.n:
            raise DimensionError(
                f"--iota has {iota.dim} components, panel has {panel.n}"
            )

    outdir = _ensure_outdir(args)
    artifacts = []
    window_labels = []
    for label, idx in _parse_windows(args.windows, panel):
        wanted = [panel.dates[i] for i in idx]
        sub = spanel.restrict(wanted)
        report = emp.window_report(sub, label, iota=iota)
        _write_json(outdir / f"window_{label}.json", report.to_json_dict())
        _write_csv(outdir / f"scatter_spectrum_{label}.csv",
                   ["rank", "eigenvalue"],
                   [(i + 1, float(v)) for i, v in
                    enumerate(report.scatter_eigenvalues)])
        _write_csv(outdir / f"projected_{label}.csv", ["date", "value"],
                   [(d.isoformat(), float(v)) for d, v in
                    zip(sub.dates, report.projected_series)])
        artifacts += [f"window_{label}.json", f"scatter_spectrum_{label}.csv",
                      f"projected_{label}.csv"]
        window_labels.append(label)

    aligned = panel.returns[[d in set(spanel.dates) for d in panel.dates]]
    corr = emp.correlation_summary(aligned, spanel.sample.matrix)
    _write_json(outdir / "correlations.json", corr)
    artifacts.append("correlations.json")

    if args.rolling is not None:
        series = emp.rolling_mrl_cssd(panel, window=args.rolling)
        _write_csv(outdir / "rolling.csv", ["date", "mrl", "cssd"],
                   [(d.isoformat(),
                     "" if math.isnan(m) else m, c) for d, m, c in series])
        artifacts.append("rolling.csv")

    info = {
        "input": str(args.input),
        "rows": panel.t,
        "columns": panel.n,
        "dropped_columns": list(panel.dropped_columns),
        "filled_cells": panel.filled_cells,
        "dropped_rows": panel.dropped_rows,
        "degenerate_rows": spanel.dropped_degenerate,
        "windows": window_labels,
        "missing_policy": args.missing_policy,
        "iota": args.iota,
    }
    _write_json(outdir / "empirical_summary.json", info)
    artifacts.append("empirical_summary.json")

    argv_norm = ["empirical", "--input", str(args.input),
                 "--windows", args.windows,
                 "--missing-policy", args.missing_policy,
                 "--iota", args.iota]
    if args.rolling is not None:
        argv_norm += ["--rolling", str(args.rolling)]
    _write_manifest(outdir, "empirical", argv_norm, None, artifacts)
    sys.stdout.write(
        f"empirical: {panel.t} rows x {panel.n} assets, "
        f"{len(window_labels)} windows, "
        f"{spanel.dropped_degenerate} degenerate rows\n"
    )
    return EXIT_OK


# ---------------------------------------------------------------- oracle


def _oracle_specfun(checks: list, count: int, seed: int) -> None:
    worst = 0.0
    for x in np.linspace(0.0, 6.0, 61):
        worst = max(worst, abs(specfun.varrho(1, float(x))
                               - math.erf(float(x) / math.sqrt(2.0))))
    checks.append(("specfun.erf_identity", worst <= 1e-10, f"max |diff| {worst:.3e}"))

    worst = 0.0
    for n in (2, 3, 5, 10, 20, 50, 100, 200):
        for x in (0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
            total = (specfun.f_var(n, x) + (n - 1) * specfun.g_var(n, x)
                     + specfun.varrho(n, x) ** 2)
            worst = max(worst, abs(total - 1.0))
    checks.append(("specfun.trace_identity", worst <= 1e-10, f"max |dev| {worst:.3e}"))

    frozen = [
        ("varrho(9, 0.1288)", specfun.varrho(9, 0.1288), 0.041728045545844033),
        ("f_var(3, 1.0)", specfun.f_var(3, 1.0), 0.21535759191687602),
        ("g_var(5, 0.5)", specfun.g_var(5, 0.5), 0.19305113147054719),
    ]
    worst = max(abs(got - ref) / abs(ref) for _, got, ref in frozen)
    checks.append(("specfun.frozen_values", worst <= 1e-12, f"max rel {worst:.3e}"))

    worst = 0.0
    for x in (0.5, 0.75, 1.0, 2.5, 10.0, 100.5, 500.0):
        rel = abs(specfun.log_gamma(x) - math.lgamma(x)) / max(abs(math.lgamma(x)), 1.0)
        worst = max(worst, rel)
    checks.append(("specfun.log_gamma", worst <= 1e-13, f"max rel {worst:.3e}"))


def _oracle_cov(checks: list, count: int, seed: int, threads: int) -> None:
    cases = [(3, 1.0), (5, 0.5), (9, 0.1288)]
    for i, (n, x) in enumerate(cases):
        stream = montecarlo.SeededStream(seed, i * montecarlo.STREAM_BLOCK)
        mc = montecarlo.projected_moments_mc(n, x, count, stream, threads=threads)
        closed_mean = np.zeros(n)
        closed_mean[0] = specfun.varrho(n, x)
        closed_cov = moments.projected_cov_canonical(n, x)
        mean_ok = np.all(np.abs(mc.mean - closed_mean) <= 4.0 * mc.se_mean + 1e-12)
        cov_ok = np.all(np.abs(mc.cov - closed_cov) <= 4.0 * mc.se_cov + 1e-12)
        worst_mean = float(np.max(np.abs(mc.mean - closed_mean) / (mc.se_mean + 1e-300)))
        worst_cov = float(np.max(np.abs(mc.cov - closed_cov) / (mc.se_cov + 1e-300)))
        checks.append((
            f"cov.canonical_n{n}",
            bool(mean_ok and cov_ok),
            f"max |dev|/SE: mean {worst_mean:.2f}, cov {worst_cov:.2f} (N={count})",
        ))


def _oracle_optimize(checks: list, count: int, seed: int) -> None:
    import random

    rng = random.Random(seed)
    all_ok = True
    detail = ""
    for trial in range(10):
        n = rng.randint(3, 12)
        mu = np.array([rng.uniform(-1.0, 1.0) for _ in range(n)])
        if np.allclose(mu - mu.mean(), 0.0):
            mu[0] += 1.0
        sigma = rng.uniform(0.5, 2.0)
        rho = rng.uniform(-0.5 / (n - 1), 0.6)
        model = moments.HomoscedasticModel(mu=mu, sigma=sigma, rho=rho)
        x = model.concentration()
        f = specfun.f_var(n - 1, x)
        g = specfun.g_var(n - 1, x)
        cov = moments.cov_chi_homoscedastic(model)
        res = optimize.min_variance(cov)
        if abs(res.value - min(f, g)) > 1e-10:
            all_ok = False
            detail = f"trial {trial}: min-variance value off by {abs(res.value - min(f, g)):.2e}"
            break
        if f < g:
            align = abs(float(res.theta_star.coords @ standardize(mu).coords))
            if abs(align - 1.0) > 1e-8:
                all_ok = False
                detail = f"trial {trial}: minimizer misaligned ({align:.12f})"
                break
        lam_results = [
            optimize.mean_variance_homoscedastic(model, lam)
            for lam in (0.0, 1.0, math.inf)
        ]
        coords = [r.theta_star.coords for r in lam_results]
        if not (np.array_equal(coords[0], coords[1])
                and np.array_equal(coords[1], coords[2])):
            all_ok = False
            detail = f"trial {trial}: penalty level changed the maximizer"
            break
    checks.append(("optimize.homoscedastic_suite", all_ok, detail or "10 trials"))


def _cmd_oracle(args, seed: int) -> int:
    checks: list[tuple[str, bool, str]] = []
    if args.suite in ("specfun", "all"):
        _oracle_specfun(checks, args.count, seed)
    if args.suite in ("cov", "all"):
        _oracle_cov(checks, args.count, seed, args.threads)
    if args.suite in ("optimize", "all"):
        _oracle_optimize(checks, args.count, seed)

    for name, ok, detail in checks:
        sys.stdout.write(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}\n")
    failed = [name for name, ok, _ in checks if not ok]

    if args.output_dir is not None:
        outdir = _ensure_outdir(args)
        report = {
            "suite": args.suite,
            "count": args.count,
            "seed": seed,
            "checks": [
                {"name": n, "ok": ok, "detail": d} for n, ok, d in checks
            ],
        }
        _write_json(outdir / "oracle_report.json", report)
        argv_norm = ["oracle", "--suite", args.suite,
                     "--count", str(args.count), "--seed", str(seed)]
        _write_manifest(outdir, "oracle", argv_norm, seed,
                        ["oracle_report.json"])
    if failed:
        raise OracleFailure(f"{len(failed)} oracle check(s) failed: {failed}")
    return EXIT_OK


# ---------------------------------------------------------------- rerun


def _cmd_rerun(args) -> int:
    try:
        manifest = json.loads(Path(args.manifest).read_text())
        argv = list(manifest["parameters"]["argv"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise MalformedInputError(f"unusable manifest: {exc}") from None
    argv += ["--output-dir", str(args.output_dir)]
    if args.threads is not None:
        argv += ["--threads", str(args.threads)]
    return main(argv)


# ---------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icsphere",
        description="Directional moments of standardized cross-sections: "
                    "closed forms, seeded simulation, and panel reports.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_mom = sub.add_parser("moments", help="closed-form moments and IC stats")
    p_mom.add_argument("--mu", required=True,
                       help="mean vector: comma list or @file")
    p_mom.add_argument("--sigma", required=True, type=float,
                       help="common volatility (positive)")
    p_mom.add_argument("--rho", required=True, type=float,
                       help="common pairwise correlation")
    p_mom.add_argument("--theta", default=None,
                       help="forecast vector to score: comma list or @file")
    p_mom.add_argument("--output-dir", default=None,
                       help="also write moments.json and a manifest here")

    p_sim = sub.add_parser("simulate", help="seeded Monte Carlo experiments")
    sim_sub = p_sim.add_subparsers(dest="experiment", required=True)

    def add_common(p, default_count):
        p.add_argument("--params", default=None,
                       help="parameter file (@path); default: bundled set")
        p.add_argument("--seed", type=int, default=None,
                       help=f"RNG seed (default: ${SEED_ENV_VAR} or {DEFAULT_SEED})")
        p.add_argument("--count", type=int, default=default_count,
                       help="number of draws")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads; results do not depend on this")
        p.add_argument("--output-dir", default=".",
                       help="artifact directory (default: current)")

    p_ic = sim_sub.add_parser("ic-pdf", help="distribution of the projection T")
    add_common(p_ic, 1_000_000)
    p_ic.add_argument("--mode", choices=["chi_mu", "sample_md"],
                      default="chi_mu", help="projection direction")
    p_ic.add_argument("--variant", choices=["base", "hetero"], default="base",
                      help="covariance variant of the bundled set")
    p_ic.add_argument("--bandwidth", type=float, default=None,
                      help="KDE bandwidth override")

    p_md = sim_sub.add_parser("md-perturb",
                              help="mean direction under parameter scaling")
    add_common(p_md, 1_000_000)
    p_md.add_argument("--axis", choices=["mu1", "sigma1"], required=True,
                      help="which parameter the factors scale")
    p_md.add_argument("--factors", default="0.1,1,2,5,10",
                      help="comma list of positive factors")

    p_mrl = sim_sub.add_parser("mrl-check",
                               help="closed-form vs simulated resultant length")
    add_common(p_mrl, 1_000_000)

    p_emp = sub.add_parser("empirical", help="panel ingestion and reports")
    p_emp.add_argument("--input", required=True, help="CSV return panel")
    p_emp.add_argument("--windows", default="full",
                       help="'yearly', 'full', or 'from:to' ISO dates")
    p_emp.add_argument("--rolling", type=int, default=None,
                       help="emit rolling mrl/cssd with this window length")
    p_emp.add_argument("--iota", default="md",
                       help="projection direction: 'md' or @file")
    p_emp.add_argument("--missing-policy",
                       choices=["cross_mean", "drop_row"],
                       default="cross_mean")
    p_emp.add_argument("--output-dir", default=".",
                       help="artifact directory (default: current)")

    p_or = sub.add_parser("oracle", help="independent numerical cross-checks")
    p_or.add_argument("--suite", choices=["specfun", "cov", "optimize", "all"],
                      default="all")
    p_or.add_argument("--count", type=int, default=1_000_000,
                      help="MC draws per check; tolerances scale as 1/sqrt(N)")
    p_or.add_argument("--seed", type=int, default=None)
    p_or.add_argument("--threads", type=int, default=1)
    p_or.add_argument("--output-dir", default=None,
                      help="write oracle_report.json and a manifest here")

    p_rr = sub.add_parser("rerun", help="re-execute a manifest bit-identically")
    p_rr.add_argument("--manifest", required=True)
    p_rr.add_argument("--output-dir", default=".")
    p_rr.add_argument("--threads", type=int, default=None)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "moments":
            return _cmd_moments(args)
        if args.command == "simulate":
            seed = _resolve_seed(args.seed)
            if args.experiment == "ic-pdf":
                return _cmd_simulate_ic_pdf(args, seed)
            if args.experiment == "md-perturb":
                return _cmd_simulate_md_perturb(args, seed)
            return _cmd_simulate_mrl_check(args, seed)
        if args.command == "empirical":
            return _cmd_empirical(args)
        if args.command == "oracle":
            return _cmd_oracle(args, _resolve_seed(args.seed))
        if args.command == "rerun":
            return _cmd_rerun(args)
        raise MalformedInputError(f"unknown command {args.command!r}")
    except (MalformedInputError, DomainError, DimensionError, ModelError,
            InvalidCovarianceError, NoUniqueSolutionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except DegenerateInputError as exc:
        sys.stderr.write(f"degenerate input: {exc}\n")
        return EXIT_DEGENERATE
    except ConvergenceError as exc:
        sys.stderr.write(f"convergence failure: {exc}\n")
        return EXIT_CONVERGENCE
    except OracleFailure as exc:
        sys.stderr.write(f"oracle failure: {exc}\n")
        return EXIT_ORACLE


if __name__ == "__main__":
    sys.exit(main())
