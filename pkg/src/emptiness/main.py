#!/usr/bin/env python3
"""
Emptiness Main Application Entry Point

This module provides the command-line interface for the emptiness toolkit.
Results go to stdout (or ``--output``); banners, tables and logs go to
stderr.

Exit codes: 0 ok, 1 check failure, 2 usage, 3 memory budget.
"""

import functools
import sys
from typing import Optional

import click
import yaml

from . import __version__
from .core.config import FORMATS, ROUTES, Config
from .core.engine import SUITES, EmptinessEngine
from .core.errors import BudgetExceededError, CheckFailure, EmptinessError, ValidationError
from .core.logger import setup_logger
from .utils.cli_utils import print_banner, print_error, print_info, print_success, print_warning

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def exit_codes(func):
    """Map emptiness errors raised by a command onto the CLI exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except CheckFailure as e:
            print_error(f"Verification failed: {e}")
            sys.exit(EXIT_CHECK_FAILURE)
        except BudgetExceededError as e:
            print_error(f"Memory budget exceeded: {e}")
            sys.exit(EXIT_BUDGET)
        except ValidationError as e:
            print_error(f"Invalid input: {e}")
            sys.exit(EXIT_USAGE)
        except EmptinessError as e:
            print_error(f"{func.__name__} failed: {e}")
            sys.exit(EXIT_CHECK_FAILURE)

    return wrapper


def run_options(func):
    """Options shared by ``efp`` and ``scan``; unset options keep the configured value."""
    options = [
        click.option("--route", type=click.Choice(ROUTES), help="EFP route"),
        click.option("--d", "d", type=int, help="Lattice dimension"),
        click.option("--n", "n", type=int, help="Torus side"),
        click.option("--delta", type=float, help="Anisotropy"),
        click.option("--kappa", type=float, help="Six-vertex weight parameter (route=sixvertex)"),
        click.option("--beta", type=float, help="Inverse temperature"),
        click.option("--m2", type=int, help="Sector: twice the total S^z (ground-state routes)"),
        click.option("--l-min", type=int, help="Smallest block side"),
        click.option("--l-max", type=int, help="Largest block side"),
        click.option("--samples", type=int, help="Monte Carlo samples per L"),
        click.option("--seed", type=int, help="Random seed"),
        click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write results to a file"),
        click.option("--format", "fmt", type=click.Choice(FORMATS), help="Output format"),
        click.option("--timing", is_flag=True, help="Fill the wall_ms column (output is then not reproducible)"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _apply_run_options(config: Config, kappa: Optional[float], **values):
    # delta and kappa exclude each other; the one given on the command line wins
    if kappa is not None:
        config.run.kappa = kappa
        if values.get("delta") is None:
            config.run.delta = None
    elif values.get("delta") is not None:
        config.run.kappa = None
    config.override("run", **values)
    config.run.validate()
    return config.run


def _emit(engine: EmptinessEngine, rows, route: str, fmt: Optional[str], output: Optional[str], fit=None):
    fmt = fmt or engine.config.general.output_format
    text = engine.report_generator.render(rows, route, fmt, fit)
    engine.report_generator.write(text, output)
    if output:
        print_info(f"Results written to {output}")


@click.group()
@click.version_option(version=__version__, prog_name="emptiness")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.option("--quiet", "-q", is_flag=True, help="No banner, no progress bars")
@click.option("--config", "-c", type=click.Path(exists=True), help="Path to config file")
@click.option("--threads", type=int, envvar="EMPTINESS_THREADS", help="Thread count, recorded in outputs")
@click.pass_context
def cli(ctx, verbose: bool, quiet: bool, config: Optional[str], threads: Optional[int]):
    """
    📉 Emptiness - XXZ emptiness formation probability toolkit

    Compute the EFP by exact diagonalization, loop Monte Carlo or six-vertex
    transfer matrices, fit its decay and verify the operator inequalities
    behind its bounds.
    """
    ctx.ensure_object(dict)

    try:
        settings = Config(config)
    except ValidationError as e:
        print_error(str(e))
        sys.exit(EXIT_USAGE)
    setup_logger(verbose=verbose, log_level=settings.general.log_level, file_logging=settings.general.file_logging)
    if threads is not None:
        if threads < 1:
            raise click.BadParameter("must be at least 1", param_hint="--threads")
        settings.general.threads = threads
    ctx.obj["config"] = settings
    ctx.obj["progress"] = not quiet and sys.stderr.isatty()

    if not quiet:
        print_banner()


def _engine(ctx, timing: bool = False) -> EmptinessEngine:
    return EmptinessEngine(ctx.obj["config"], progress=ctx.obj["progress"], timing=timing)


@cli.command()
@run_options
@click.pass_context
@exit_codes
def efp(ctx, route, d, n, delta, kappa, beta, m2, l_min, l_max, samples, seed, output, fmt, timing):
    """
    📉 Compute the EFP for every L of an L-range

    One row per L with the EFP, its standard error on stochastic routes and
    the run parameters.
    """
    config = ctx.obj["config"]
    run = _apply_run_options(
        config, kappa, route=route, d=d, n=n, delta=delta, beta=beta, m2=m2,
        l_min=l_min, l_max=l_max, samples=samples, seed=seed, output=output, format=fmt,
    )
    engine = _engine(ctx, timing)
    rows = engine.efp_rows(run)
    engine.display_efp_results(rows)
    _emit(engine, rows, run.route, run.format, run.output)


@cli.command()
@run_options
@click.option("--fit/--no-fit", default=True, help="Append the scaling fit as a footer")
@click.option("--fit-mode", type=click.Choice(["free", "fixed"]), default="free", help="Free or fixed exponent")
@click.option("--beta-scan", help="Comma-separated beta values: scan beta at L = l-max instead of L")
@click.pass_context
@exit_codes
def scan(ctx, route, d, n, delta, kappa, beta, m2, l_min, l_max, samples, seed, output, fmt, timing,
         fit, fit_mode, beta_scan):
    """
    📈 Scan L (or beta) and fit the EFP decay

    The L-scan fits log EFP = log C - c L^nu; the beta-scan fits -log EFP
    linearly in beta at fixed L.
    """
    config = ctx.obj["config"]
    beta_values = None
    if beta_scan:
        try:
            beta_values = [float(value) for value in beta_scan.split(",") if value.strip()]
        except ValueError:
            raise click.BadParameter(f"not a list of numbers: {beta_scan!r}", param_hint="--beta-scan")
    run = _apply_run_options(
        config, kappa, route=route, d=d, n=n, delta=delta, beta=beta, m2=m2,
        l_min=l_min, l_max=l_max, samples=samples, seed=seed, output=output, format=fmt,
        fit=fit, beta_values=beta_values,
    )
    engine = _engine(ctx, timing)
    result = engine.beta_scan(run) if beta_values else engine.scan(run, mode=fit_mode)
    engine.display_efp_results(result.rows, result.fit)
    if result.fit and result.fit.get("decaying") is False:
        print_warning("EFP does not decay with L; the fit is flagged non-decaying")
    _emit(engine, result.rows, result.route, run.format, run.output, result.fit)


@cli.command()
@click.argument("suite", type=click.Choice(SUITES + ("all",)), default="all")
@click.option("--seed", type=int, help="Seed for randomized checks")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write the JSON summary to a file")
@click.pass_context
@exit_codes
def verify(ctx, suite: str, seed: Optional[int], output: Optional[str]):
    """
    🧪 Run a verification suite

    Suites: holder, chessboard, rp, den, sutherland, opc,
    sixvertex-structure, bounds, or all. Prints a JSON summary and exits
    with status 1 if any check fails.
    """
    engine = _engine(ctx)
    summary = engine.verify(suite, seed=seed)
    engine.display_verify_results(summary)
    engine.report_generator.write(engine.report_generator.render_summary(summary.to_dict()), output)
    if output:
        print_info(f"Summary written to {output}")
    summary.raise_for_failures()
    print_success(f"{summary.total} checks passed")


@cli.command("opc-demo")
@click.option("--width", type=int, help="Rectangle width L")
@click.option("--height", "height_", type=int, help="Rectangle height R")
@click.option("--seed", type=int, help="Fixture seed")
@click.option("--aligned-samples", type=int, default=0, show_default=True,
              help="Sampled configurations for the aligned-run rate (0 skips it)")
@click.option("--l", "l", type=int, default=2, show_default=True, help="Aligned-run length")
@click.option("--kappa", type=float, default=0.0, show_default=True, help="Six-vertex weight for sampling")
@click.pass_context
@exit_codes
def opc_demo(ctx, width, height_, seed, aligned_samples, l, kappa):
    """
    🧭 Render an osculating-path fixture, a + move and its highest configuration
    """
    engine = _engine(ctx)
    demo = engine.opc_demo(width, height_, seed, aligned_samples=aligned_samples, l=l, kappa=kappa)
    engine.display_opc_demo(demo)
    click.echo(demo.to_text(), nl=False)


@cli.command("config-show")
@click.option("--section", "-s", help="Only this section")
@click.pass_context
def config_show(ctx, section: Optional[str]):
    """
    ⚙️ Show the merged configuration as YAML
    """
    data = ctx.obj["config"].to_dict()
    if section:
        if section not in data:
            print_error(f"Unknown section '{section}'; choose from {', '.join(data)}")
            sys.exit(EXIT_USAGE)
        data = {section: data[section]}
    click.echo(yaml.safe_dump(data, default_flow_style=False, sort_keys=False), nl=False)


def main():
    """Main entry point for the application."""
    try:
        cli()
    except KeyboardInterrupt:
        click.echo("\n👋 Operation cancelled by user", err=True)
        sys.exit(130)


if __name__ == "__main__":
    main()
