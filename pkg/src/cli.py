"""
Command-line interface for gaussian-simplices.

Usage:
    gtet estimate --event acute-triangle --n 1000000 --seed 1
    gtet analytic --quantity reflected-cone --tol 1e-10
    gtet density --name crofton --grid 0:6.2831:0.01 -o crofton.csv
    gtet validate --scale quick --only charfun-identity

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 runtime abort.
"""
import sys
import time
from contextlib import contextmanager
from typing import Optional, Tuple

import click
from pydantic import ValidationError

from src.models.config import Command, Report, RunConfig
from src.services.reporting import ReportBuilder, render, write_text
from src.services.validation import ValidationSuite
from src.utils.errors import (
    ConvergenceError,
    DistributionError,
    DomainError,
    GeometricProbabilityError,
    NonFiniteValueError,
    SamplerDegeneracyError,
    UnknownQuantityError,
)
from src.utils.logger import get_logger
from src.utils.settings import get_settings

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2
EXIT_ABORT = 3

__all__ = ["cli", "main"]


def _fail(message: str, code: int) -> None:
    click.echo(f"Error: {message}", err=True)
    sys.exit(code)


@contextmanager
def _exit_codes():
    """Map configuration and runtime failures onto the documented exit codes."""
    try:
        yield
    except ValidationError as e:
        problems = "; ".join(error["msg"] for error in e.errors())
        _fail(f"invalid arguments: {problems}", EXIT_USAGE)
    except (UnknownQuantityError, DomainError) as e:
        _fail(str(e), EXIT_USAGE)
    except (SamplerDegeneracyError, ConvergenceError, NonFiniteValueError, DistributionError) as e:
        _fail(f"{type(e).__name__}: {e}", EXIT_ABORT)
    except GeometricProbabilityError as e:
        _fail(f"{type(e).__name__}: {e}", EXIT_ABORT)


def _emit(report: Report, config: RunConfig, started: Optional[float]) -> None:
    if started is not None:
        report = report.model_copy(update={"wall_time": round(time.perf_counter() - started, 3)})
    text = render(report, config.output_format)
    if config.output_path:
        write_text(text, config.output_path)
    else:
        click.echo(text, nl=False)


def _seed(seed: Optional[int]) -> int:
    return get_settings().default_seed if seed is None else seed


output_option = click.option("--output", "-o", "output_path", type=click.Path(dir_okay=False), default=None,
                             help="Write to this file instead of stdout")
format_option = click.option("--format", "output_format", type=click.Choice(["json", "csv"]), default="json",
                             show_default=True, help="Report format")
time_option = click.option("--record-time", is_flag=True,
                           help="Record wall time in the report (the output is then no longer byte-stable)")


@click.group()
@click.version_option(version="0.1.0", prog_name="gtet")
def cli():
    """
    Gaussian random triangles and tetrahedra: Monte Carlo estimates, analytic
    constants, density tables and the validation suite.

    Examples:

        gtet estimate --event gamma-cone --n 10000000 --seed 1

        gtet analytic --quantity pinned-quadrant

        gtet density --name conv3-pinned --grid -3:3:0.1x-3:3:0.1
    """


@cli.command()
@click.option("--event", "--name", "name", required=True, help="Event name, e.g. acute-triangle or shadow-triangle:regular")
@click.option("--n", "n", type=int, required=True, help="Number of trials (>= 100)")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Run seed (default GTET_DEFAULT_SEED)")
@format_option
@output_option
@time_option
def estimate(name: str, n: int, seed: Optional[int], output_format: str, output_path: Optional[str], record_time: bool):
    """
    Monte Carlo estimate of a named event or mean.

    Examples:

        gtet estimate --event acute-triangle --n 1000000 --seed 1 --format json

        gtet estimate --event volume-mean:uniform-ball-tetra --n 1000000

        gtet estimate --event dihedral-samples --n 100000
    """
    started = time.perf_counter() if record_time else None
    with _exit_codes():
        config = RunConfig(
            command=Command.ESTIMATE,
            name=name,
            n=n,
            seed=_seed(seed),
            output_format=output_format,
            output_path=output_path,
        )
        _emit(ReportBuilder().estimate(config), config, started)


@cli.command()
@click.option("--quantity", "--name", "name", required=True, help="Quantity name, e.g. reflected-cone")
@click.option("--tol", "rel_tol", type=float, default=None, help="Relative tolerance (default 1e-10)")
@click.option("--abs-tol", "abs_tol", type=float, default=None, help="Absolute tolerance (default 1e-11)")
@format_option
@output_option
@time_option
def analytic(name: str, rel_tol: Optional[float], abs_tol: Optional[float], output_format: str,
             output_path: Optional[str], record_time: bool):
    """
    Evaluate an analytic constant with its error bound.

    Examples:

        gtet analytic --quantity reflected-cone --tol 1e-10

        gtet analytic --quantity triangle-acute
    """
    started = time.perf_counter() if record_time else None
    with _exit_codes():
        config = RunConfig(
            command=Command.ANALYTIC,
            name=name,
            rel_tol=rel_tol,
            abs_tol=abs_tol,
            output_format=output_format,
            output_path=output_path,
        )
        _emit(ReportBuilder().analytic(config), config, started)


@cli.command()
@click.option("--name", required=True,
              help="miller-general | miller-pinned | conv3-general | conv3-pinned | crofton | miles-marginal")
@click.option("--grid", required=True, help="lo:hi:step, or lo:hi:stepxlo:hi:step for planar densities")
@output_option
def density(name: str, grid: str, output_path: Optional[str]):
    """
    Tabulate a density on a grid as CSV (crofton also gets its CDF column).

    Examples:

        gtet density --name crofton --grid 0:6.2831:0.01 -o crofton.csv

        gtet density --name conv3-pinned --grid -3:3:0.1x-3:3:0.1
    """
    with _exit_codes():
        config = RunConfig(
            command=Command.DENSITY, name=name, grid=grid, output_format="csv", output_path=output_path
        )
        text = ReportBuilder.density(config).to_csv(index=False)
        if output_path:
            write_text(text, output_path)
        else:
            click.echo(text, nl=False)


@cli.command()
@click.option("--scale", type=click.Choice(["default", "quick"]), default="default", show_default=True)
@click.option("--only", multiple=True, help="Run only this criterion (repeatable)")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=1, show_default=True)
@format_option
@output_option
@time_option
def validate(scale: str, only: Tuple[str, ...], seed: int, output_format: str, output_path: Optional[str],
             record_time: bool):
    """
    Run the acceptance criteria; exit 0 iff all pass.

    Examples:

        gtet validate

        gtet validate --only charfun-identity

        gtet validate --scale quick
    """
    started = time.perf_counter() if record_time else None
    with _exit_codes():
        config = RunConfig(
            command=Command.VALIDATE,
            seed=seed,
            scale=scale,
            only=list(only),
            output_format=output_format,
            output_path=output_path,
        )
        suite = ValidationSuite(scale=scale, seed=seed)
        report = suite.run(config, only)
        _emit(report, config, started)
        if not suite.passed(report):
            failed = [entry.name for entry in report.results if entry.passed is False]
            _fail(f"{len(failed)} checks failed: {', '.join(failed)}", EXIT_VALIDATION_FAILED)


def main():
    """Entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
