"""
Command-line front end.

Every command writes deterministic CSV/JSON files under the configured output directory and
prints one JSON status document on stdout. Library errors become a failure document and exit
code 2; a failed verification exits with 1.
"""

import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Annotated, Any

import typer

from . import settings
from .analysis import PolarizationProfile, polarization_profile
from .checks import run_verification
from .coding import CodeConstruction, sample_frozen_maps, select_information_set
from .config import ExperimentConfig, load_config
from .decode import monte_carlo_error, sequential_union_bound, union_bound_rhs
from .errors import PolarReadingError
from .polar import polar_transform
from .probe import optimize_probe, probe_sweep
from .report import dumps, write_csv, write_json, write_verify_report

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="polar-reading",
    help="Polar coding for quantum reading of binary memory cells.",
    no_args_is_help=True,
    add_completion=False,
)

PROFILE_HEADER = ("index", "i_rate_bits", "z_reliability", "z_source", "is_good", "is_bad")
TRIALS_HEADER = ("trial", "success", "first_error_index")
SWEEP_HEADER = ("rx", "ry", "rz", "objective_value")

ConfigPath = Annotated[
    Path, typer.Argument(help="Experiment configuration JSON", dir_okay=False)
]
NOption = Annotated[int | None, typer.Option("--n", help="Transform level; N = 2^n")]
PriorOption = Annotated[float | None, typer.Option("--prior", help="Cell prior P(X=0)")]
SeedOption = Annotated[
    int | None, typer.Option("--seed", help="Sets both the rng seed and the frozen-map seed")
]
TrialsOption = Annotated[int | None, typer.Option("--trials", help="Monte Carlo trials")]
OutDirOption = Annotated[str | None, typer.Option("--out-dir", help="Output directory")]


def _echo(data: Any) -> None:
    typer.echo(dumps(data), nl=False)


def _guarded(fn: Callable[[], int]) -> None:
    """Run a command body, turning library errors into a failure document and exit code 2."""
    try:
        code = fn()
    except PolarReadingError as e:
        logger.error(f"{type(e).__name__}: {e}")
        _echo({"status": "error", "error_type": type(e).__name__, "detail": str(e)})
        raise typer.Exit(code=2) from e
    if code:
        raise typer.Exit(code=code)


def _load(
    config: Path,
    n: int | None = None,
    prior: float | None = None,
    seed: int | None = None,
    trials: int | None = None,
    out_dir: str | None = None,
) -> ExperimentConfig:
    return load_config(config, n=n, prior=prior, seed=seed, trials=trials, out_dir=out_dir)


def _profile(cfg: ExperimentConfig) -> PolarizationProfile:
    return polarization_profile(
        cfg.build_cell(), cfg.build_probe(), cfg.source(), cfg.block_length, cfg.beta
    )


def _construct(cfg: ExperimentConfig, profile: PolarizationProfile) -> CodeConstruction:
    return select_information_set(
        profile, cfg.target_rate, cfg.z_threshold, cfg.zsrc_threshold, cfg.frozen_seed
    )


@app.callback()
def main(
    log_level: Annotated[
        str | None,
        typer.Option("--log-level", help=f"Logging level (default from {settings.LOG_LEVEL_ENV})"),
    ] = None,
):
    logging.basicConfig(
        level=(log_level or settings.log_level()).upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


@app.command()
def transform(n: Annotated[int, typer.Argument(help="Transform level; prints the 2^n rows")]):
    """Print the rows of G_N as 0/1 strings."""

    def body() -> int:
        for row in polar_transform(n).rows():
            typer.echo(row)
        return 0

    _guarded(body)


@app.command()
def polarize(
    config: ConfigPath,
    n: NOption = None,
    prior: PriorOption = None,
    seed: SeedOption = None,
    out_dir: OutDirOption = None,
):
    """Write the polarization profile CSV and the good/bad counts JSON."""

    def body() -> int:
        cfg = _load(config, n=n, prior=prior, seed=seed, out_dir=out_dir)
        profile = _profile(cfg)
        out = Path(cfg.out_dir)
        rows = [
            (r.index, r.rate, r.z, r.z_source, int(r.is_good), int(r.is_bad))
            for r in profile.rows
        ]
        csv_path = write_csv(out / "profile.csv", PROFILE_HEADER, rows)
        counts_path = write_json(out / "profile_counts.json", profile.counts())
        _echo({"status": "ok", "outputs": [str(csv_path), str(counts_path)], **profile.counts()})
        return 0

    _guarded(body)


@app.command()
def construct(
    config: ConfigPath,
    n: NOption = None,
    prior: PriorOption = None,
    seed: SeedOption = None,
    out_dir: OutDirOption = None,
):
    """Select the information set and write construction.json."""

    def body() -> int:
        cfg = _load(config, n=n, prior=prior, seed=seed, out_dir=out_dir)
        construction = _construct(cfg, _profile(cfg))
        path = write_json(Path(cfg.out_dir) / "construction.json", construction.to_json())
        _echo({"status": "ok", "outputs": [str(path)], "info_set": list(construction.info_set)})
        return 0

    _guarded(body)


@app.command()
def simulate(
    config: ConfigPath,
    n: NOption = None,
    prior: PriorOption = None,
    seed: SeedOption = None,
    trials: TrialsOption = None,
    out_dir: OutDirOption = None,
):
    """Monte Carlo block error of the SC decoder next to the union bounds."""

    def body() -> int:
        cfg = _load(config, n=n, prior=prior, seed=seed, trials=trials, out_dir=out_dir)
        cell, probe, model = cfg.build_cell(), cfg.build_probe(), cfg.source()
        profile = _profile(cfg)
        construction = _construct(cfg, profile)
        maps = sample_frozen_maps(model, construction)
        result = monte_carlo_error(
            cell,
            probe,
            model,
            construction,
            maps,
            cfg.trials,
            cfg.rng_seed,
            strict=cfg.strict_decoder,
        )
        info = construction.info_set
        summary = {
            "n": cfg.n,
            "rate": construction.achieved_rate,
            "info_set": list(info),
            "trials": result.trials,
            "errors": result.errors,
            "error_rate": result.error_rate,
            "wilson_low": result.wilson_low,
            "wilson_high": result.wilson_high,
            "union_bound_c1": union_bound_rhs(profile, info, 1.0),
            "union_bound_c": union_bound_rhs(profile, info, cfg.union_c),
            "union_c": cfg.union_c,
            "sequential_union_bound": sequential_union_bound(profile, info, cfg.union_c),
        }
        out = Path(cfg.out_dir)
        rows = [
            (r.trial, int(r.success), "" if r.first_error_index is None else r.first_error_index)
            for r in result.records
        ]
        csv_path = write_csv(out / "simulation_trials.csv", TRIALS_HEADER, rows)
        summary_path = write_json(out / "simulation_summary.json", summary)
        _echo({"status": "ok", "outputs": [str(csv_path), str(summary_path)], **summary})
        return 0

    _guarded(body)


@app.command("probe-opt")
def probe_opt(
    config: ConfigPath,
    prior: PriorOption = None,
    seed: SeedOption = None,
    out_dir: OutDirOption = None,
):
    """Optimize the probe over the Bloch ball and write the optimum JSON and a sweep CSV."""

    def body() -> int:
        cfg = _load(config, prior=prior, seed=seed, out_dir=out_dir)
        cell = cfg.build_cell()
        optimum = optimize_probe(
            cell, cfg.probe_objective, cfg.grid_per_axis, cfg.refine_iters, cfg.rng_seed
        )
        sweep = probe_sweep(cell, cfg.probe_objective, cfg.sweep_axis, cfg.sweep_samples)
        out = Path(cfg.out_dir)
        doc = {"objective": cfg.probe_objective.value, **optimum.to_json()}
        json_path = write_json(out / "probe_optimum.json", doc)
        sweep_rows = [(*p.bloch, p.value) for p in sweep]
        csv_path = write_csv(out / "probe_sweep.csv", SWEEP_HEADER, sweep_rows)
        _echo(
            {
                "status": "ok",
                "outputs": [str(json_path), str(csv_path)],
                "best_bloch": list(optimum.best_bloch),
                "best_value": optimum.best_value,
                "bloch_radius": optimum.bloch_radius,
                "degenerate": optimum.degenerate,
            }
        )
        return 0

    _guarded(body)


@app.command()
def verify(
    config: Annotated[
        Path | None,
        typer.Argument(help="Optional experiment configuration JSON", dir_okay=False),
    ] = None,
    instances: Annotated[
        int | None, typer.Option("--instances", min=1, help="Random instances per check")
    ] = None,
    seed: SeedOption = None,
    out_dir: OutDirOption = None,
    html: Annotated[
        bool, typer.Option("--html/--no-html", help="Also write an HTML report")
    ] = True,
):
    """Run the seeded bound-check suite; exits 1 when any check fails."""

    def body() -> int:
        count, master_seed, target = 100, 0, "results"
        if config is not None:
            cfg = _load(config, seed=seed, out_dir=out_dir)
            count, master_seed, target = cfg.verify_instances, cfg.rng_seed, cfg.out_dir
        count = instances if instances is not None else count
        master_seed = seed if seed is not None else master_seed
        target = out_dir if out_dir is not None else target
        report = run_verification(count, master_seed)
        out = Path(target)
        write_json(out / "verify_report.json", report.to_json())
        if html:
            write_verify_report(out / "verify_report.html", report)
        _echo(report.to_json())
        return 0 if report.passed else 1

    _guarded(body)


if __name__ == "__main__":
    app()
