#!/usr/bin/env python3
"""shadowrank CLI - Main entry point."""

import sys
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import click
import numpy as np
from pydantic import ValidationError

from . import __version__
from .artifact_writer import ArtifactWriter
from .config import DEFAULT_LOG_FORMAT, Config
from .errors import ConfigError, FloorError, GeometryError, ParameterError, ShadowRankError
from .experiments import ExperimentConfig, ExperimentFactory, create_experiment
from .geometry import GeometrySpec
from .kernel import dump_block
from .pipeline import PipelineSettings, block_for, scene_for
from .shadow import (
    closed_form_for,
    governing_estimate,
    shadow_area_los,
    shadow_area_sweep,
    shadow_length_los,
)
from .spectrum import REPORT_TAUS, build_rank_report, certified_ranks, compute_spectrum

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def setup_logging(level: str = "INFO", fmt: str = DEFAULT_LOG_FORMAT):
    """Setup logging configuration.

    Records go to stderr; stdout carries command results such as JSON.
    """
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=fmt,
        handlers=[
            logging.StreamHandler(sys.stderr),
        ],
    )


def exit_code_for(error: Exception) -> int:
    """Exit status for an error: 2 for bad input, 3 for numeric failures."""
    if isinstance(error, (ConfigError, ParameterError, ValidationError)):
        return EXIT_CONFIG
    if isinstance(error, (ShadowRankError, np.linalg.LinAlgError)):
        return EXIT_NUMERIC
    return 1


def fail(error: Exception) -> None:
    logger.error(f"{type(error).__name__}: {error}")
    click.echo(f"❌ Error: {error}", err=True)
    sys.exit(exit_code_for(error))


def load_json_file(path: str) -> Dict[str, Any]:
    """Read a JSON object from ``path``, raising ConfigError on any problem."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"Cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a JSON object")
    return data


def load_spec(path: str, wavelength: Optional[float]) -> GeometrySpec:
    spec = GeometrySpec.from_dict(load_json_file(path))
    if wavelength is not None:
        spec = spec.with_updates(wavelength=wavelength)
    if spec.wavelength is None:
        raise ParameterError("The geometry needs a wavelength: set 'lambda' or pass --wavelength")
    return spec


@click.group(invoke_without_command=True)
@click.option('--settings', '-s', help='YAML settings file path')
@click.option('--log-level', default=None, help='Logging level')
@click.option('--version', is_flag=True, help='Show version and exit')
@click.pass_context
def cli(ctx, settings, log_level, version):
    """shadowrank - Mutual shadow predictors and spectra of wave-interaction blocks."""
    if version:
        click.echo(f"shadowrank v{__version__}")
        return

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())
        return

    ctx.ensure_object(dict)

    try:
        config = Config(settings)
    except ConfigError as e:
        click.echo(f"Error initializing configuration: {e}", err=True)
        sys.exit(EXIT_CONFIG)

    setup_logging(log_level or config.log_level, config.log_format)
    ctx.obj['config'] = config
    ctx.obj['settings'] = PipelineSettings.from_config(config)
    logger.info("shadowrank initialized")


@cli.command()
@click.option('--config', 'config_path', required=True, help='Geometry JSON file')
@click.option('--method', type=click.Choice(['auto', 'los', 'sweep', 'closed-form']), default='auto',
              help='Shadow estimation method')
@click.option('--wavelength', type=float, help='Wavelength in meters (overrides the file)')
@click.option('--vector', is_flag=True, help='Report the doubled predictor for vector fields')
@click.option('--text', is_flag=True, help='Human-readable output instead of JSON')
@click.pass_context
def shadow(ctx, config_path, method, wavelength, vector, text):
    """Compute the mutual shadow predictor of a geometry."""
    config = ctx.obj['config']
    settings = ctx.obj['settings']

    try:
        spec = load_spec(config_path, wavelength)
        scene = scene_for(spec, None, settings)
        kwargs = {
            "quadrature_points": settings.quadrature_points,
            "divergence_tol": settings.divergence_tol,
            "workers": settings.workers,
        }
        if method == 'auto':
            estimate = governing_estimate(scene, settings.fallback_threshold, **kwargs)
        elif method == 'los':
            if scene.dim == 3 and scene.source.manifold_dim == 2:
                estimate = shadow_area_los(scene, **kwargs)
            else:
                estimate = shadow_length_los(scene, **kwargs)
        elif method == 'sweep':
            sweep = config.sweep_settings
            estimate = shadow_area_sweep(scene, int(sweep.get("n_mu", 100)), int(sweep.get("n_phi", 100)))
        else:
            estimate = closed_form_for(scene)
            if estimate is None:
                raise GeometryError(f"No closed form for {spec.shape.value} with these parameters")
    except Exception as e:
        fail(e)

    if not text:
        data = estimate.to_dict()
        if vector:
            data["dof"] = estimate.doubled()
        click.echo(json.dumps(data, sort_keys=True))
        return

    unit = "m²" if estimate.kind.value == "area" else "m"
    click.echo(f"🌗 {spec.case_id()}")
    click.echo(f"   Shadow {estimate.kind.value}: {estimate.value:.10g} {unit} ({estimate.method.value})")
    click.echo(f"   Predicted knee: {estimate.doubled() if vector else estimate.dof:.6g}")
    if estimate.rel_err_est is not None:
        click.echo(f"   Estimated relative error: {estimate.rel_err_est:.2e}")
    if method != 'closed-form':
        exact = closed_form_for(scene)
        if exact is not None and exact.kind == estimate.kind:
            click.echo(f"   Closed form: {exact.value:.10g} {unit} (knee {exact.dof:.6g})")


@cli.command()
@click.option('--config', 'config_path', required=True, help='Geometry JSON file')
@click.option('--method', type=click.Choice(['auto', 'dense', 'randomized']), default='auto',
              help='Spectrum method')
@click.option('--seed', type=int, default=42, help='Randomized SVD seed')
@click.option('--out', help='Output directory (default from settings)')
@click.option('--tau', 'taus', type=float, multiple=True, help='Threshold(s) for rank reports')
@click.option('--wavelength', type=float, help='Wavelength in meters (overrides the file)')
@click.option('--dump-block', 'dump_path', type=click.Path(), help='Also write the dense block as complex64')
@click.pass_context
def spectrum(ctx, config_path, method, seed, out, taus, wavelength, dump_path):
    """Assemble the interaction block of a geometry and extract its spectrum."""
    config = ctx.obj['config']
    settings = ctx.obj['settings']
    taus = sorted(taus or REPORT_TAUS, reverse=True)

    try:
        spec = load_spec(config_path, wavelength)
        scene = scene_for(spec, None, settings)
        estimate = governing_estimate(
            scene, settings.fallback_threshold, settings.quadrature_points, settings.divergence_tol, settings.workers
        )
        knee_pred = estimate.doubled() if settings.vector_doubling else estimate.dof
        block = block_for(scene, settings)
        result = compute_spectrum(
            block, min(taus), seed=seed, method=method, dense_cap=settings.dense_cap, **settings.randomized
        )
        reports = []
        for tau in taus:
            try:
                reports.append(
                    build_rank_report(result, knee_pred, tau, settings.knee_end_tau, settings.knee_min_distance)
                )
            except FloorError as e:
                logger.warning(f"Skipping tau={tau:g}: {e}")

        writer = ArtifactWriter(out or config.output_directory)
        directory = writer.case_directory("spectrum", spec.case_id())
        rows = ((n + 1, s, s_norm) for n, (s, s_norm) in enumerate(zip(result.sigmas, result.normalized)))
        path = writer.write_csv(directory / "spectrum.csv", ["n", "sigma", "sigma_norm"], rows)
        writer.write_json(
            directory / "ranks.json",
            {
                "case_id": spec.case_id(),
                "knee_pred": knee_pred,
                "knee_detected": reports[0].knee_detected if reports else None,
                "ranks": certified_ranks(result),
                "remainder_width": {f"{r.tau:g}": r.remainder_width for r in reports},
            },
        )
        if dump_path:
            dump_block(block, dump_path, settings.dense_cap)
    except Exception as e:
        fail(e)

    click.echo(f"📈 {spec.case_id()}: {block.shape[0]}x{block.shape[1]} block, {result.method.value} SVD")
    click.echo(f"   Predicted knee: {knee_pred:.6g}")
    for report in reports:
        knee = report.knee_detected if report.knee_detected is not None else "-"
        click.echo(
            f"   tau={report.tau:g}: rank {report.rank}, detected knee {knee}, "
            f"remainder width {report.remainder_width}"
        )
    click.echo(f"   💾 Spectrum saved to: {path}")


@cli.command()
@click.option('--config', 'config_path', required=True, help='Geometry JSON file')
@click.option('--seed', type=int, default=42, help='Randomized SVD seed')
@click.option('--out', help='Output directory (default from settings)')
@click.option('--plot/--no-plot', default=True, help='Write SVG plots')
@click.option('--wavelength', type=float, help='Wavelength in meters (overrides the file)')
@click.pass_context
def analyze(ctx, config_path, seed, out, plot, wavelength):
    """Localization maps, edge concentration and DFT bands of one geometry."""
    config = ctx.obj['config']

    try:
        spec = load_spec(config_path, wavelength)
        exp_config = ExperimentConfig(
            name="custom",
            wavelength=spec.wavelength,
            seed=seed,
            plot=plot,
            geometries=[spec.to_dict()],
        )
        outcome = _run_experiment(config, ctx.obj['settings'], exp_config, out)
    except Exception as e:
        fail(e)

    case = outcome.summary.cases[0]
    click.echo(f"🔬 {case.case_id}: predicted knee {case.knee_pred:.6g}, detected {case.knee_detected}")
    for key, value in sorted(case.analysis.items()):
        if isinstance(value, float):
            click.echo(f"   {key}: {value:.6g}")
    click.echo(f"   💾 {len(outcome.artifacts)} artifact(s) written")


def _run_experiment(config: Config, settings: PipelineSettings, exp_config: ExperimentConfig, out: Optional[str]):
    writer = ArtifactWriter(out or exp_config.output_directory or config.output_directory)
    experiment = create_experiment(
        exp_config,
        settings=settings,
        writer=writer,
        threads=config.threads,
        smoothing=config.smoothing,
        edge_band=config.edge_band,
        remainder_columns=config.remainder_columns,
    )
    return experiment.run()


@cli.command()
@click.argument('experiment', required=False)
@click.option('--config', 'config_path', help='Experiment JSON file')
@click.option('--seed', type=int, help='Randomized SVD seed (default 42)')
@click.option('--out', help='Output directory (default from settings)')
@click.option('--full', is_flag=True, help='Use the full-size parameters')
@click.option('--a', type=float, help='Size override in wavelengths')
@click.option('--d', type=float, help='Separation override in wavelengths')
@click.option('--h', type=float, help='Shift/height override in wavelengths')
@click.option('--phi', type=float, help='Slant angle override in radians')
@click.option('--plot/--no-plot', default=True, help='Write SVG plots')
@click.pass_context
def run(ctx, experiment, config_path, seed, out, full, a, d, h, phi, plot):
    """Run a named experiment pipeline."""
    config = ctx.obj['config']

    try:
        data = load_json_file(config_path) if config_path else {}
        overrides = {"name": experiment, "seed": seed, "a": a, "d": d, "h": h, "phi": phi}
        data.update({k: v for k, v in overrides.items() if v is not None})
        if full:
            data["full"] = True
        if not plot:
            data["plot"] = False
        if "name" not in data:
            available = ", ".join(ExperimentFactory.get_available_experiments())
            raise ConfigError(f"No experiment given. Available experiments: {available}")
        exp_config = ExperimentConfig(**data)
        click.echo(f"🚀 Running {exp_config.name}{' (full size)' if exp_config.full else ''}...")
        outcome = _run_experiment(config, ctx.obj['settings'], exp_config, out)
    except Exception as e:
        fail(e)

    summary = outcome.summary
    click.echo(f"\n📊 Results:")
    for case in summary.cases:
        knee = case.knee_detected if case.knee_detected is not None else "-"
        click.echo(f"   {case.case_id}: predicted {case.knee_pred:.4g}, detected {knee}")
    for study in summary.scaling:
        slope = f"{study.slope:.3f}" if study.slope is not None else "-"
        click.echo(f"   📐 {study.family}: slope {slope} at tau={study.tau:g}")
    click.echo(f"\n💾 {len(outcome.artifacts)} artifact(s) written")
    click.echo(f"✅ {summary.experiment} complete!")


@cli.command()
def experiments():
    """List the registered experiment pipelines."""
    click.echo("🧪 Available experiments:")
    for name in ExperimentFactory.get_available_experiments():
        info = ExperimentFactory.get_experiment_info(name)
        click.echo(f"   {name}: {info['description']}")


@cli.command()
@click.pass_context
def config_show(ctx):
    """Show current configuration."""
    config = ctx.obj['config']

    click.echo("⚙️  Current Configuration:")
    click.echo(f"   📁 Output directory: {config.output_directory}")
    click.echo(f"   📏 Sampling density: {config.delta:g} points/λ")
    click.echo(f"   🌗 Quadrature points: {config.quadrature_points}")
    click.echo(f"   🧮 Dense cap: {config.dense_cap} entries")
    click.echo(f"   🎲 Randomized SVD: {config.randomized_settings}")
    click.echo(f"   🧵 Threads: {config.threads}")
    click.echo(f"   📝 Log level: {config.log_level}")

    click.echo(f"\n📋 File Status:")
    click.echo(f"   Settings: {'✅' if config.config_file.exists() else '❌'} {config.config_file}")
    click.echo(f"   Output dir: {'✅' if config.output_directory.exists() else '❌'}")


if __name__ == '__main__':
    cli()
