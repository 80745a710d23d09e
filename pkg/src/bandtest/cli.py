from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from typing import Any, Optional

import numpy as np
import typer
from rich.console import Console

from bandtest.band.builder import band_width_profile, build_band
from bandtest.band.io import format_table, load_band, load_sample, save_band, save_fit, save_width_profile
from bandtest.config import ExperimentConfig, load_config, parse_null_spec
from bandtest.core.decision import decide
from bandtest.core.errors import BandTestError, InfeasibleBandError
from bandtest.core.sample import TiePolicy, canonicalize_sample
from bandtest.display.roc_display import display_band_summary, display_normality_study, display_roc_summary
from bandtest.simulation.experiments import normality_study, run_roc_experiment
from bandtest.statistics.baselines import (
    MOMENT_FUNCTIONS,
    MomentConstraint,
    cvm_statistic,
    elrm_statistic,
    ks_decide,
    ks_normality_statistic,
    ks_statistic,
    robust_cvm_fit,
    robust_cvm_statistic,
    robust_ks_statistic,
)
from bandtest.statistics.degenerate import GroupingPlan, grouped_reference, grouped_statistic
from bandtest.statistics.elrdf import DEFAULT_TOL, elrdf_decide, solve_elrdf
from bandtest.utils.fs_utils import write_text
from bandtest.utils.logger import configure_logger, logger

app = typer.Typer(no_args_is_help=True, help="Goodness-of-fit tests under CDF band uncertainty.")
band_app = typer.Typer(no_args_is_help=True, help="Build and inspect CDF bands.")
app.add_typer(band_app, name="band")


err_console = Console(stderr=True)

EXIT_FAILURE = 1
EXIT_INFEASIBLE = 2

# Base error of whichever click build typer raises from (standalone or bundled).
_CLICK_ERROR: type[Any] = next(k for k in typer.BadParameter.__mro__ if k.__name__ == "ClickException")

SAMPLE_HELP = "Sample file: one value per line (can include fsspec prefix, e.g., 'abfs://')"
BAND_HELP = "Band CSV with header knot,lower,upper"
NULL_HELP = "Null CDF: normal:mean:sd, uniform:low:high or ecdf:<file>"
TIE_HELP = "How exact ties in the sample are handled"


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Log level; BANDTEST_LOG_LEVEL or INFO by default"),
) -> None:
    if log_level is not None:
        try:
            configure_logger(log_level)
        except ValueError as e:
            raise typer.BadParameter(str(e), param_hint="--log-level") from None


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Turn package errors into a one-line diagnostic and the documented exit code."""
    try:
        yield
    except InfeasibleBandError as e:
        err_console.print(f"error: {e}", markup=False, highlight=False)
        raise typer.Exit(EXIT_INFEASIBLE) from None
    except (BandTestError, OSError, ValueError) as e:
        err_console.print(f"error: {e}", markup=False, highlight=False)
        raise typer.Exit(EXIT_FAILURE) from None


def _fmt(value: float) -> str:
    """Shortest round-trip float text; infinities print as inf."""
    return repr(float(value))


def _csv(*fields: object) -> None:
    typer.echo(",".join(_fmt(f) if isinstance(f, float) else str(f) for f in fields))


def _report(statistic: float, threshold: Optional[float]) -> None:
    """Print the statistic, followed by the decision when a threshold was given."""
    if threshold is None:
        _csv(statistic)
    else:
        _csv(statistic, decide(statistic, threshold).value)


@app.command()
def elrdf(
    sample: str = typer.Option(..., "--sample", help=SAMPLE_HELP),
    band: str = typer.Option(..., "--band", help=BAND_HELP),
    eta: Optional[float] = typer.Option(None, "--eta", help="Decide H1 when the statistic exceeds eta"),
    tol: float = typer.Option(DEFAULT_TOL, "--tol", help="Solver tolerance"),
    tie_policy: TiePolicy = typer.Option(TiePolicy.ERROR, "--tie-policy", help=TIE_HELP),
    fit: Optional[str] = typer.Option(None, "--fit", help="Write the maximizing CDF as knot,level CSV"),
) -> None:
    """
    ELRDF statistic of a sample against a band.

    Prints statistic,decision,iterations,kkt_residual.
    """
    with _exit_codes():
        data = canonicalize_sample(load_sample(sample), tie_policy)
        result = solve_elrdf(data, load_band(band), tol=tol)
        decision = "" if eta is None else elrdf_decide(result.statistic, eta).value
        if fit:
            cdf = result.fitted_cdf()
            save_fit(fit, cdf.knots, cdf.levels)
        _csv(result.statistic, decision, result.iterations, result.kkt_residual)


@app.command()
def degen(
    sample: str = typer.Option(..., "--sample", help=SAMPLE_HELP),
    null: str = typer.Option(..., "--null", help=NULL_HELP),
    groups: int = typer.Option(1, "--groups", min=1, help="Number of groups k"),
    group_size: Optional[int] = typer.Option(None, "--group-size", min=1, help="Group size m (default n / k)"),
    two_sided: bool = typer.Option(False, "--two-sided", help="Report |statistic - log(1 + 1/m)|"),
    tie_policy: TiePolicy = typer.Option(TiePolicy.ERROR, "--tie-policy", help=TIE_HELP),
) -> None:
    """
    Grouped degenerate ELRDF statistic against a fully known null.

    Groups are consecutive runs of the file. Prints statistic,reference.
    """
    with _exit_codes():
        raw = load_sample(sample)
        m = group_size or raw.size // groups
        plan = GroupingPlan.identity(groups, m)
        if plan.n > raw.size:
            raise ValueError(f"{groups} groups of {m} need {plan.n} observations, got {raw.size}")
        statistic = grouped_statistic(raw[: plan.n], parse_null_spec(null), plan, tie_policy, two_sided)
        _csv(statistic, grouped_reference(m))


@app.command()
def rks(
    sample: str = typer.Option(..., "--sample", help=SAMPLE_HELP),
    band: str = typer.Option(..., "--band", help=BAND_HELP),
    gamma: Optional[float] = typer.Option(None, "--gamma", help="Decide H1 when sqrt(n) * D_n exceeds gamma"),
    tie_policy: TiePolicy = typer.Option(TiePolicy.ERROR, "--tie-policy", help=TIE_HELP),
) -> None:
    """Robust Kolmogorov-Smirnov distance of a sample to a band."""
    with _exit_codes():
        data = canonicalize_sample(load_sample(sample), tie_policy)
        statistic = robust_ks_statistic(data, load_band(band))
        if gamma is None:
            _csv(statistic)
        else:
            _csv(statistic, ks_decide(statistic, data.n, gamma).value)


@app.command()
def rcvm(
    sample: str = typer.Option(..., "--sample", help=SAMPLE_HELP),
    band: str = typer.Option(..., "--band", help=BAND_HELP),
    threshold: Optional[float] = typer.Option(None, "--threshold", help="Decide H1 above this value"),
    tie_policy: TiePolicy = typer.Option(TiePolicy.ERROR, "--tie-policy", help=TIE_HELP),
    fit: Optional[str] = typer.Option(None, "--fit", help="Write the projected CDF values as knot,level CSV"),
) -> None:
    """Robust Cramer-von Mises statistic of a sample against a band."""
    with _exit_codes():
        data = canonicalize_sample(load_sample(sample), tie_policy)
        cdf_band = load_band(band)
        statistic = robust_cvm_statistic(data, cdf_band)
        if fit:
            save_fit(fit, data.values, robust_cvm_fit(data, cdf_band))
        _report(statistic, threshold)


@app.command()
def elrm(
    sample: str = typer.Option(..., "--sample", help=SAMPLE_HELP),
    lower: float = typer.Option(..., "--lower", help="Lower end of the moment interval"),
    upper: float = typer.Option(..., "--upper", help="Upper end of the moment interval"),
    moment: str = typer.Option("mean", "--moment", help=f"Moment function: {', '.join(MOMENT_FUNCTIONS)}"),
    threshold: Optional[float] = typer.Option(None, "--threshold", help="Decide H1 above this value"),
    tie_policy: TiePolicy = typer.Option(TiePolicy.ERROR, "--tie-policy", help=TIE_HELP),
) -> None:
    """Empirical likelihood statistic under a scalar moment interval."""
    with _exit_codes():
        if moment not in MOMENT_FUNCTIONS:
            raise ValueError(f"Unknown moment {moment!r}; use one of {', '.join(MOMENT_FUNCTIONS)}")
        data = canonicalize_sample(load_sample(sample), tie_policy)
        statistic = elrm_statistic(data, MomentConstraint(MOMENT_FUNCTIONS[moment], lower, upper))
        _report(statistic, threshold)


@app.command()
def normality(
    sample: str = typer.Option(..., "--sample", help=SAMPLE_HELP),
    threshold: Optional[float] = typer.Option(None, "--threshold", help="Decide H1 above this value"),
) -> None:
    """KS distance between a sample and its fitted Gaussian."""
    with _exit_codes():
        statistic = ks_normality_statistic(load_sample(sample))
        _report(statistic, threshold)


@app.command()
def ks(
    sample: str = typer.Option(..., "--sample", help=SAMPLE_HELP),
    null: str = typer.Option(..., "--null", help=NULL_HELP),
    gamma: Optional[float] = typer.Option(None, "--gamma", help="Decide H1 when sqrt(n) * D_n exceeds gamma"),
    tie_policy: TiePolicy = typer.Option(TiePolicy.ERROR, "--tie-policy", help=TIE_HELP),
) -> None:
    """Classical Kolmogorov-Smirnov distance to a fully known null."""
    with _exit_codes():
        data = canonicalize_sample(load_sample(sample), tie_policy)
        statistic = ks_statistic(data, parse_null_spec(null))
        if gamma is None:
            _csv(statistic)
        else:
            _csv(statistic, ks_decide(statistic, data.n, gamma).value)


@app.command()
def cvm(
    sample: str = typer.Option(..., "--sample", help=SAMPLE_HELP),
    null: str = typer.Option(..., "--null", help=NULL_HELP),
    threshold: Optional[float] = typer.Option(None, "--threshold", help="Decide H1 above this value"),
    tie_policy: TiePolicy = typer.Option(TiePolicy.ERROR, "--tie-policy", help=TIE_HELP),
) -> None:
    """Classical Cramer-von Mises statistic against a fully known null."""
    with _exit_codes():
        data = canonicalize_sample(load_sample(sample), tie_policy)
        statistic = cvm_statistic(data, parse_null_spec(null))
        _report(statistic, threshold)


@band_app.command("build")
def band_build(
    input_path: str = typer.Option(..., "--input", help="Noise record, one value per line"),
    output: str = typer.Option(..., "--output", help="Destination band CSV"),
    group_size: int = typer.Option(100, "--group-size", min=1, help="Samples per group"),
) -> None:
    """Build a band from the ECDF envelope of consecutive groups."""
    with _exit_codes():
        cdf_band = build_band(load_sample(input_path), group_size)
        save_band(output, cdf_band)
        display_band_summary(band_width_profile(cdf_band))


@band_app.command("width")
def band_width(
    band: str = typer.Option(..., "--band", help=BAND_HELP),
    output: Optional[str] = typer.Option(None, "--output", help="Write knot,width CSV here instead of stdout"),
) -> None:
    """Width upper - lower of a band at each knot."""
    with _exit_codes():
        profile = band_width_profile(load_band(band))
        if output:
            save_width_profile(output, profile)
        else:
            typer.echo(format_table("knot,width", np.column_stack((profile.knots, profile.widths))), nl=False)


@app.command()
def roc(
    config: str = typer.Option(..., "--config", help="Experiment config (key=value, or .yaml)"),
    output_dir: str = typer.Option(".", "--output-dir", help="Directory for roc.csv and summary.csv"),
) -> None:
    """Monte-Carlo ROC curve of the configured test."""
    with _exit_codes():
        result = run_roc_experiment(load_config(config))
        curve = result.curve
        table = np.column_stack((curve.thresholds, curve.pf, curve.pd))
        base = output_dir.rstrip("/")
        write_text(f"{base}/roc.csv", format_table("threshold,pf,pd", table))
        write_text(
            f"{base}/summary.csv",
            f"test,auc,flipped,seed\n{result.test},{_fmt(curve.auc)},{str(curve.flipped).lower()},{result.seed}\n",
        )
        logger.info(f"ROC written to {base}/roc.csv")
        display_roc_summary([result])


@app.command("normality-study")
def normality_study_command(
    sizes: str = typer.Option("10,50,100,500", "--sizes", help="Comma separated sample sizes"),
    replications: int = typer.Option(10000, "--replications", min=1, help="Records per size and noise kind"),
    config: Optional[str] = typer.Option(None, "--config", help="Config providing noise.* settings and seed"),
    output_dir: str = typer.Option(".", "--output-dir", help="Directory for normality_<size>.csv"),
) -> None:
    """
    Normality statistic under stationary versus nonstationary noise.

    Writes one CSV per size with sorted statistics in columns stationary,nonstationary.
    """
    with _exit_codes():
        try:
            size_list = [int(s) for s in sizes.split(",") if s.strip()]
        except ValueError:
            raise ValueError(f"--sizes must be comma separated integers, got {sizes!r}") from None
        settings = load_config(config) if config else ExperimentConfig()
        noise = settings.noise.build(settings.seed)
        rows = normality_study(size_list, replications, noise, seed=settings.seed)
        base = output_dir.rstrip("/")
        for row in rows:
            table = np.column_stack((row.stationary, row.nonstationary))
            write_text(f"{base}/normality_{row.size}.csv", format_table("stationary,nonstationary", table))
        display_normality_study(rows)


def run_command(argv: Sequence[str]) -> int:
    """
    Run the CLI in-process and return its exit code.

    Args:
        argv: Arguments without the program name

    Returns:
        0 on success, 2 for an infeasible band, 1 for any other failure
    """
    command = typer.main.get_command(app)
    try:
        code = command.main(args=list(argv), prog_name="bandtest", standalone_mode=False)
    except typer.Exit as e:
        return int(e.exit_code)
    except _CLICK_ERROR as e:
        err_console.print(f"error: {e.format_message()}", markup=False, highlight=False)
        return EXIT_FAILURE
    except typer.Abort:
        return EXIT_FAILURE
    return code if isinstance(code, int) else 0


if __name__ == "__main__":
    app()
