"""
Typer-based CLI commands for Fluid Polling
"""

from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Iterator, List, Optional

import numpy as np
import pydantic
import typer
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from fluid_polling import __version__
from fluid_polling.core import exact, heavy_traffic as ht
from fluid_polling.core.export import ResultExporter
from fluid_polling.core.inversion import talbot_cdf_grid
from fluid_polling.core.levy import (
    HTDrifts, SubordinatorSpec, SwitchLaw, hat_drifts, levy_moments, service_rates_for_drifts,
    switching_bm_variance,
)
from fluid_polling.core.levy_sim import prelimit_simulate, rbm_simulate
from fluid_polling.core.model import AsymmetricParams, SymmetricParams, is_stable, stability_margins
from fluid_polling.core.simulation import SimConfig, simulate
from fluid_polling.core.verification import verify_commute, verify_ecdf, verify_table1
from fluid_polling.utils.config import Config
from fluid_polling.utils.logger import setup_logging
from fluid_polling.utils.validators import ValidationError

# Initialize Typer app and Rich console
app = typer.Typer(
    name="fluidpoll",
    help="🌊 Fluid Polling - two-queue fluid model with random visit times: analytics, simulation, checks",
    add_completion=False
)
console = Console()

EXIT_FAILED = 1
EXIT_USAGE = 2


class OutputFormat(str, Enum):
    csv = "csv"
    json = "json"


class Budget(str, Enum):
    desk = "desk"
    full = "full"


class Scheme(str, Enum):
    bridge = "bridge"
    euler = "euler"


class Switching(str, Enum):
    exponential = "exponential"
    gamma = "gamma"
    shared = "shared"


@contextmanager
def _guard() -> Iterator[None]:
    """Map validation failures to exit code 2"""
    try:
        yield
    except (ValidationError, pydantic.ValidationError) as e:
        console.print(f"❌ Validation Error: {e}", style="red")
        raise typer.Exit(EXIT_USAGE)


def _symmetric(lam: Optional[float], rho: Optional[float], mu: float, c: float) -> SymmetricParams:
    if (lam is None) == (rho is None):
        raise ValidationError("Give exactly one of --lambda and --rho")
    if rho is not None:
        return SymmetricParams.from_rho(rho, mu, c)
    return SymmetricParams(**{"lambda": lam, "mu": mu, "c": c})


def _grid(spec: str) -> np.ndarray:
    """Parse 'start:stop:count' into a linspace"""
    try:
        start, stop, count = spec.split(":")
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError:
        raise ValidationError(f"Grid must look like start:stop:count, got {spec!r}")
    if values.size < 1:
        raise ValidationError("Grid needs at least one point")
    return values


def _workers(workers: Optional[int]) -> int:
    return workers if workers else Config.WORKERS


def _exporter(out: Optional[Path]) -> ResultExporter:
    return ResultExporter(out if out is not None else Config.OUTPUT_DIR)


def _saved(path: str) -> None:
    console.print(f"💾 Saved to {path}", style="dim")


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging")) -> None:
    """Fluid Polling command line"""
    setup_logging("DEBUG" if verbose else None)


@app.command("stability")
def cmd_stability(
    lam: Optional[float] = typer.Option(None, "--lambda", help="Input rate (both queues, or queue 1)"),
    rho: Optional[float] = typer.Option(None, "--rho", help="Load lambda/mu instead of --lambda"),
    mu: float = typer.Option(..., "--mu", help="Service rate (both queues, or queue 1)"),
    c: float = typer.Option(..., "--c", help="Switch-out rate (both queues, or queue 1)"),
    lambda2: Optional[float] = typer.Option(None, "--lambda2", help="Input rate of queue 2"),
    mu2: Optional[float] = typer.Option(None, "--mu2", help="Service rate of queue 2"),
    c2: Optional[float] = typer.Option(None, "--c2", help="Switch-out rate of queue 2"),
) -> None:
    """⚖️ Report the stability margins of the model"""
    with _guard():
        sym = _symmetric(lam, rho, mu, c)
        p = AsymmetricParams(
            lambda1=sym.lam, lambda2=lambda2 if lambda2 is not None else sym.lam,
            mu1=mu, mu2=mu2 if mu2 is not None else mu,
            c1=c, c2=c2 if c2 is not None else c,
        )
    m1, m2 = stability_margins(p)
    table = Table(title="⚖️ Stability margins")
    table.add_column("Queue", style="cyan")
    table.add_column("rho_j", justify="right")
    table.add_column("Share of visit time", justify="right")
    table.add_column("Margin", justify="right")
    table.add_row("1", f"{p.rho1:.6g}", f"{p.c2 / (p.c1 + p.c2):.6g}", f"{m1:.6g}")
    table.add_row("2", f"{p.rho2:.6g}", f"{p.c1 / (p.c1 + p.c2):.6g}", f"{m2:.6g}")
    console.print(table)
    if is_stable(p):
        console.print("✅ Stable", style="green")
        return
    console.print("❌ Unstable: a queue receives more work than it can clear", style="red")
    raise typer.Exit(EXIT_FAILED)


@app.command("verify-table1")
def cmd_verify_table1(
    budget: Budget = typer.Option(Budget.desk, "--budget", help="Simulation budget"),
    seed: int = typer.Option(Config.DEFAULT_SEED, "--seed", help="Random seed"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w",
                                          help="Parallel simulations (default FLUID_POLLING_WORKERS)"),
    total_time: Optional[float] = typer.Option(None, "--total-time", help="Override the budget run length"),
    warmup: Optional[float] = typer.Option(None, "--warmup", help="Override the budget warmup"),
    batches: Optional[int] = typer.Option(None, "--batches", help="Override the budget batch count"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
) -> None:
    """📋 Simulated correlation at rho in {0.2, 0.4, 0.47, 0.49} against reference values"""
    with _guard():
        report = verify_table1(
            level=budget.value, seed=seed, workers=_workers(workers),
            overrides={"total_time": total_time, "warmup_time": warmup, "batch_count": batches},
        )

    table = Table(title="📋 Correlation of the workloads (mu=1, c=0.1)")
    table.add_column("rho", style="cyan")
    table.add_column("CI low", justify="right")
    table.add_column("Simulated", justify="right", style="bold")
    table.add_column("CI high", justify="right")
    table.add_column("Reference", justify="right")
    table.add_column("Band", justify="right")
    table.add_column("Status")
    for row in report.rows:
        table.add_row(f"{row.rho:g}", f"{row.ci_low:.4f}", f"{row.correlation:.4f}", f"{row.ci_high:.4f}",
                      f"{row.reference:.4f}", f"±{row.band:g}", "✅" if row.passed else "❌")
    console.print(table)
    console.print(f"🎯 Heavy-traffic limit: {report.theoretical:.4f}")
    _saved(_exporter(out).export_json("verify_table1.json", "verify-table1", report.parameters,
                                      seed, report.to_dict()))
    if not report.passed:
        raise typer.Exit(EXIT_FAILED)


@app.command("verify-ecdf")
def cmd_verify_ecdf(
    rho: List[float] = typer.Option([0.2, 0.49], "--rho", help="Loads to simulate (repeatable)"),
    budget: Budget = typer.Option(Budget.desk, "--budget", help="Simulation budget"),
    seed: int = typer.Option(Config.DEFAULT_SEED, "--seed", help="Random seed"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w",
                                          help="Parallel simulations (default FLUID_POLLING_WORKERS)"),
    total_time: Optional[float] = typer.Option(None, "--total-time", help="Override the budget run length"),
    warmup: Optional[float] = typer.Option(None, "--warmup", help="Override the budget warmup"),
    batches: Optional[int] = typer.Option(None, "--batches", help="Override the budget batch count"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
) -> None:
    """📈 ECDF of the scaled total workload against the inverted heavy-traffic law"""
    with _guard():
        report = verify_ecdf(
            level=budget.value, seed=seed, rhos=rho, workers=_workers(workers),
            overrides={"total_time": total_time, "warmup_time": warmup, "batch_count": batches},
        )

    table = Table(title="📈 Kolmogorov-Smirnov distance to the heavy-traffic law")
    table.add_column("rho", style="cyan")
    table.add_column("KS", justify="right", style="bold")
    table.add_column("Samples", justify="right")
    for row in report.rows:
        table.add_row(f"{row.rho:g}", f"{row.ks:.4f}", str(row.samples))
    console.print(table)

    exporter = _exporter(out)
    for r, (xs, ecdf_values, model_values) in report.curves.items():
        header = {"command": "verify-ecdf", "rho": r, "seed": seed, "budget": budget.value}
        _saved(exporter.export_comparison(f"ecdf_compare_rho{r:g}.csv", xs, ecdf_values, model_values, header))
        _saved(exporter.export_ecdf(f"ecdf_rho{r:g}.csv", report.ecdfs[r].curve(), header))
    _saved(exporter.export_json("verify_ecdf.json", "verify-ecdf", report.parameters, seed, report.to_dict()))
    if not report.trend_ok:
        console.print("⚠️ KS distance does not shrink as the load grows", style="yellow")
    if not report.passed:
        console.print(f"❌ KS check failed (threshold {report.threshold:g})", style="red")
        raise typer.Exit(EXIT_FAILED)
    console.print("✅ ECDF agrees with the heavy-traffic law", style="green")


@app.command("verify-commute")
def cmd_verify_commute(
    mu: Optional[float] = typer.Option(None, "--mu", help="Service rate"),
    c: Optional[float] = typer.Option(None, "--c", help="Switch-out rate"),
    theta1: Optional[float] = typer.Option(None, "--theta1", help="Hatted drift of queue 1"),
    theta2: Optional[float] = typer.Option(None, "--theta2", help="Hatted drift of queue 2"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
) -> None:
    """🔁 Compare the Levy-limit and fluid heavy-traffic joint transforms"""
    with _guard():
        if theta1 is not None or theta2 is not None:
            if theta1 is None or theta2 is None or theta1 != theta2:
                raise ValidationError("The comparison needs equal hatted drifts")
            h = ht.HTSymmetric.from_hat_drift(theta1)
            mu, c = h.mu, h.c
        elif mu is None or c is None:
            raise ValidationError("Give --mu and --c, or --theta1 and --theta2")
        report = verify_commute(mu, c)

    console.print(Panel(
        f"theta_hat = {report.theta_hat:.6g}\n"
        f"grid points = {report.points}\n"
        f"max deviation = {report.max_deviation:.3e} (tolerance {report.tolerance:g})",
        title="🔁 Commuting limits", border_style="green" if report.passed else "red",
    ))
    _saved(_exporter(out).export_json("verify_commute.json", "verify-commute",
                                      {"mu": mu, "c": c}, None, report.to_dict()))
    if not report.passed:
        raise typer.Exit(EXIT_FAILED)


@app.command("marginal-lst")
def cmd_marginal_lst(
    lam: Optional[float] = typer.Option(None, "--lambda", help="Input rate"),
    rho: Optional[float] = typer.Option(None, "--rho", help="Load lambda/mu"),
    mu: float = typer.Option(..., "--mu", help="Service rate"),
    c: float = typer.Option(..., "--c", help="Switch-out rate"),
    queue: int = typer.Option(1, "--queue", "-q", help="Queue index"),
    grid: str = typer.Option("0:10:101", "--grid", help="s grid as start:stop:count"),
    fmt: OutputFormat = typer.Option(OutputFormat.csv, "--format", help="Output format"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
) -> None:
    """🧮 Stationary marginal workload LST on a real grid"""
    with _guard():
        p = _symmetric(lam, rho, mu, c).to_asymmetric()
        s = _grid(grid)
        values = exact.marginal_lst(p, queue, s)
        summary = {"mean": exact.marginal_mean(p, queue), "atom": exact.marginal_atom(p, queue),
                   "second_moment": exact.marginal_second_moment(p, queue)}
    console.print(Panel("\n".join(f"{k}: {v:.10g}" for k, v in summary.items()),
                        title=f"🧮 Queue {queue} workload", border_style="blue"))
    exporter = _exporter(out)
    params = p.model_dump()
    if fmt == OutputFormat.csv:
        _saved(exporter.export_lst_grid(f"marginal_lst_q{queue}.csv", s, values,
                                        {"command": "marginal-lst", "queue": queue, **params}))
    else:
        _saved(exporter.export_json(f"marginal_lst_q{queue}.json", "marginal-lst", params, None,
                                    {**summary, "s": s, "lst": np.real(values)}))


@app.command("ht-lst")
def cmd_ht_lst(
    mu: float = typer.Option(..., "--mu", help="Service rate"),
    c: float = typer.Option(..., "--c", help="Switch-out rate"),
    grid: str = typer.Option("0:50:101", "--grid", help="s grid in units of c/mu"),
    fmt: OutputFormat = typer.Option(OutputFormat.csv, "--format", help="Output format"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
) -> None:
    """🧮 Heavy-traffic LST of the scaled total workload"""
    with _guard():
        h = ht.HTSymmetric(mu=mu, c=c)
        s = _grid(grid) * (c / mu)
        values = ht.ht_total_lst(h, s)
    exporter = _exporter(out)
    params = h.model_dump()
    if fmt == OutputFormat.csv:
        _saved(exporter.export_lst_grid("ht_lst.csv", s, values, {"command": "ht-lst", **params}))
    else:
        _saved(exporter.export_json("ht_lst.json", "ht-lst", params, None, {"s": s, "lst": np.real(values)}))


@app.command("ht-density")
def cmd_ht_density(
    mu: float = typer.Option(..., "--mu", help="Service rate"),
    c: float = typer.Option(..., "--c", help="Switch-out rate"),
    grid: str = typer.Option("0.1:10:100", "--grid", help="x grid in units of mu/c"),
    cdf: bool = typer.Option(False, "--cdf", help="Invert the distribution function instead"),
    fmt: OutputFormat = typer.Option(OutputFormat.csv, "--format", help="Output format"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
) -> None:
    """📉 Density (or CDF) of the scaled total workload"""
    with _guard():
        h = ht.HTSymmetric(mu=mu, c=c)
        xs = _grid(grid) * h.g
        values = talbot_cdf_grid(ht.total_lst_evaluator(h), xs) if cdf else ht.ht_total_density(h, xs)
    name = "ht_cdf" if cdf else "ht_density"
    exporter = _exporter(out)
    params = h.model_dump()
    if fmt == OutputFormat.csv:
        _saved(exporter.export_grid(f"{name}.csv", xs, values, {"command": "ht-density", "cdf": cdf, **params}))
    else:
        _saved(exporter.export_json(f"{name}.json", "ht-density", params, None, {"x": xs, "value": values}))


@app.command("ht-moments")
def cmd_ht_moments(
    mu: float = typer.Option(..., "--mu", help="Service rate"),
    c: float = typer.Option(..., "--c", help="Switch-out rate"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
) -> None:
    """📊 Heavy-traffic moments and correlation of the scaled workloads"""
    with _guard():
        h = ht.HTSymmetric(mu=mu, c=c)
        moments = ht.ht_moments(h)
    table = Table(title="📊 Heavy-traffic moments")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    for key, value in moments.to_dict().items():
        table.add_row(key, f"{value:.10g}")
    table.add_row("total variance", f"{ht.ht_variance_total(h):.10g}")
    console.print(table)
    _saved(_exporter(out).export_json("ht_moments.json", "ht-moments", h.model_dump(), None,
                                      {**moments.to_dict(), "variance_total": ht.ht_variance_total(h)}))


@app.command("simulate")
def cmd_simulate(
    lam: Optional[float] = typer.Option(None, "--lambda", help="Input rate"),
    rho: Optional[float] = typer.Option(None, "--rho", help="Load lambda/mu"),
    mu: float = typer.Option(..., "--mu", help="Service rate"),
    c: float = typer.Option(..., "--c", help="Switch-out rate"),
    budget: Budget = typer.Option(Budget.desk, "--budget", help="Simulation budget"),
    seed: int = typer.Option(Config.DEFAULT_SEED, "--seed", help="Random seed"),
    total_time: Optional[float] = typer.Option(None, "--total-time", help="Override the budget run length"),
    warmup: Optional[float] = typer.Option(None, "--warmup", help="Override the budget warmup"),
    batches: Optional[int] = typer.Option(None, "--batches", help="Override the budget batch count"),
    fmt: OutputFormat = typer.Option(OutputFormat.json, "--format", help="json result or csv ECDF"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
) -> None:
    """🎲 Simulate the symmetric fluid polling model"""
    with _guard():
        sym = _symmetric(lam, rho, mu, c)
        p = sym.to_asymmetric()
        limits = Config.budget("simulate", budget.value)
        cfg = SimConfig(
            seed=seed,
            total_time=total_time if total_time is not None else limits["total_time"],
            warmup_time=warmup if warmup is not None else limits["warmup_time"],
            batch_count=batches if batches is not None else int(limits["batch_count"]),
        )
        result = simulate(p, cfg)

    table = Table(title=f"🎲 Simulation (rho={sym.rho:g}, mu={mu:g}, c={c:g})")
    table.add_column("Statistic", style="cyan")
    table.add_column("Simulated", justify="right")
    table.add_column("Std. error", justify="right")
    table.add_column("Exact", justify="right")
    stable = is_stable(p)
    exact_mean = f"{exact.marginal_mean(p, 1):.6g}" if stable else "-"
    exact_atom = f"{exact.marginal_atom(p, 1):.6g}" if stable else "-"
    table.add_row("E[V1]", f"{result.mean_v1:.6g}", f"{result.mean_v1_se:.2g}", exact_mean)
    table.add_row("E[V2]", f"{result.mean_v2:.6g}", f"{result.mean_v2_se:.2g}", exact_mean)
    table.add_row("P(V1=0)", f"{result.frac_zero1:.6g}", f"{result.frac_zero1_se:.2g}", exact_atom)
    table.add_row("P(V2=0)", f"{result.frac_zero2:.6g}", f"{result.frac_zero2_se:.2g}", exact_atom)
    table.add_row("Corr(V1,V2)", f"{result.correlation:.5f}",
                  f"[{result.ci_low:.5f}, {result.ci_high:.5f}]", "-")
    console.print(table)

    exporter = _exporter(out)
    if fmt == OutputFormat.csv:
        header = {"command": "simulate", "seed": seed, **p.model_dump(), "scale": result.metadata["scale"]}
        _saved(exporter.export_ecdf("simulate_ecdf.csv", result.ecdf_total.curve(), header))
    else:
        _saved(exporter.export_json("simulate.json", "simulate", p.model_dump(), seed, result.to_dict()))


@app.command("rbm")
def cmd_rbm(
    theta1: float = typer.Option(..., "--theta1", help="Hatted drift of queue 1"),
    theta2: float = typer.Option(..., "--theta2", help="Hatted drift of queue 2"),
    horizon: float = typer.Option(1.0e4, "--horizon", help="Simulated time"),
    dt: Optional[float] = typer.Option(None, "--dt", help="Step size"),
    scheme: Scheme = typer.Option(Scheme.bridge, "--scheme", help="Reflection scheme"),
    seed: int = typer.Option(Config.DEFAULT_SEED, "--seed", help="Random seed"),
    stride: int = typer.Option(0, "--path-stride", help="Keep every n-th step as a path sample (0 = none)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
) -> None:
    """🌀 Simulate the reflected Brownian limit and compare with its transform"""
    with _guard():
        d = HTDrifts(theta1_hat=theta1, theta2_hat=theta2)
        result = rbm_simulate(d, horizon, seed, dt=dt, scheme=scheme.value, path_stride=stride or None)
        analytic = levy_moments(d)

    table = Table(title="🌀 Reflected Brownian motion")
    table.add_column("Statistic", style="cyan")
    table.add_column("Simulated", justify="right")
    table.add_column("Std. error", justify="right")
    table.add_column("Transform", justify="right")
    m = result.moments
    table.add_row("E[V1]", f"{m.mean1:.5g}", f"{m.mean1_se:.2g}", f"{analytic.mean1:.5g}")
    table.add_row("E[V2]", f"{m.mean2:.5g}", f"{m.mean2_se:.2g}", f"{analytic.mean2:.5g}")
    table.add_row("E[V1 V2]", f"{m.cross:.5g}", f"{m.cross_se:.2g}", f"{analytic.cross:.5g}")
    table.add_row("Corr", f"{m.correlation:.4f}", f"{m.correlation_se:.2g}", f"{analytic.correlation:.4f}")
    console.print(table)

    exporter = _exporter(out)
    params = {"theta1_hat": theta1, "theta2_hat": theta2}
    _saved(exporter.export_json("rbm.json", "rbm", params, seed,
                                {**result.to_dict(), "transform_moments": analytic.to_dict()}))
    if result.path.size:
        _saved(exporter.export_path("rbm_path.csv", result.path, {"command": "rbm", "seed": seed, **params}))


@app.command("prelimit")
def cmd_prelimit(
    n: float = typer.Option(1.0e3, "--n", help="Scaling parameter"),
    lambda1: float = typer.Option(0.5, "--lambda1", help="Mean input rate of queue 1"),
    lambda2: float = typer.Option(0.5, "--lambda2", help="Mean input rate of queue 2"),
    c1: float = typer.Option(1.0, "--c1", help="Switch-out rate of queue 1"),
    c2: float = typer.Option(1.0, "--c2", help="Switch-out rate of queue 2"),
    theta1: float = typer.Option(0.5, "--theta1", help="Drift theta_1 of the scaled free process"),
    theta2: float = typer.Option(0.5, "--theta2", help="Drift theta_2 of the scaled free process"),
    jump_rate: float = typer.Option(0.0, "--jump-rate", help="Rate of compound Poisson input jumps"),
    switching: Switching = typer.Option(Switching.exponential, "--switching", help="Visit-time law"),
    horizon: float = typer.Option(100.0, "--horizon", help="Horizon in scaled time"),
    seed: int = typer.Option(Config.DEFAULT_SEED, "--seed", help="Random seed"),
    sample_interval: Optional[float] = typer.Option(None, "--sample-interval", help="Scaled path sampling interval"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
) -> None:
    """🧪 Simulate a pre-limit system and report scaled workload moments"""
    with _guard():
        if switching == Switching.exponential:
            sw = SwitchLaw.exponential(c1, c2)
        elif switching == Switching.gamma:
            sw = SwitchLaw.gamma(2.0, c1, c2)
        else:
            sw = SwitchLaw.shared_exponential(c1, c2, 0.5)
        if jump_rate > 0:
            # half of each mean rate arrives in jumps
            sub = SubordinatorSpec.compound_poisson_exponential(
                0.5 * lambda1, 0.5 * lambda2, jump_rate, 0.5 * lambda1 / jump_rate, 0.5 * lambda2 / jump_rate)
        else:
            sub = SubordinatorSpec.fluid(lambda1, lambda2)
        mu_n = service_rates_for_drifts(sub, sw, (theta1, theta2), n)
        result = prelimit_simulate(sub, sw, n, mu_n, horizon, seed, sample_interval=sample_interval)
        sigma_sq = switching_bm_variance(sw)
        drifts = hat_drifts((theta1, theta2), sub.lambdas, sw.p1, sigma_sq ** 0.5) if jump_rate == 0 else None

    m = result.moments
    lines = [f"service rates: ({mu_n[0]:.6g}, {mu_n[1]:.6g})",
             f"switching variance: {sigma_sq:.6g}",
             f"E[V1]/sqrt(n) = {m.mean1:.5g} ± {m.mean1_se:.2g}",
             f"E[V2]/sqrt(n) = {m.mean2:.5g} ± {m.mean2_se:.2g}",
             f"Corr = {m.correlation:.4f} ± {m.correlation_se:.2g}"]
    if drifts is not None:
        lines.append(f"hatted drifts: ({drifts.theta1_hat:.6g}, {drifts.theta2_hat:.6g})")
    console.print(Panel("\n".join(lines), title="🧪 Pre-limit system", border_style="blue"))

    exporter = _exporter(out)
    params = result.metadata
    _saved(exporter.export_json("prelimit.json", "prelimit", params, seed, result.to_dict()))
    if result.path.size:
        _saved(exporter.export_path("prelimit_path.csv", result.path, {"command": "prelimit", "n": n, "seed": seed}))


@app.command("version")
def cmd_version() -> None:
    """ℹ️ Show version information"""
    console.print(Panel(
        f"Fluid Polling v{__version__}\n"
        "Two-queue fluid model with random time-limited visits\n"
        "Exact and heavy-traffic transforms, simulators and verification suites",
        title="ℹ️ Version", border_style="blue",
    ))


@app.command("config")
def cmd_config() -> None:
    """⚙️ Show the active configuration"""
    table = Table(title="⚙️ Configuration")
    table.add_column("Setting", style="cyan")
    table.add_column("Value")
    table.add_row("Output directory", str(Config.OUTPUT_DIR))
    table.add_row("Log level", Config.LOG_LEVEL)
    table.add_row("Default seed", str(Config.DEFAULT_SEED))
    table.add_row("Talbot nodes", str(Config.TALBOT_NODES))
    table.add_row("Workers", str(Config.WORKERS))
    table.add_row("Schema version", Config.SCHEMA_VERSION)
    console.print(table)


if __name__ == "__main__":
    app()
