"""Command-line interface.

Subcommands::

    bubbles functionals --config cfg.json [--out DIR]   shape functionals only
    bubbles solve       --config cfg.json [--out DIR]   assemble + solve, diagnostics
    bubbles farfield    --config cfg.json [--out DIR]   full pipeline + pattern CSV
    bubbles sweep       --config cfg.json [--out DIR]   frequency sweep CSV
    bubbles study       --config cfg.json [--out DIR]   convergence study vs oracle
    bubbles oracle      --config cfg.json [--out DIR]   reference far field

Exit codes: 0 success, 1 configuration/parse error, 2 infeasible regime or
oracle domain, 3 numerically singular system.  ``--threads N`` (or the
``BUBBLES_THREADS`` environment variable, which wins) caps the BLAS thread
pools for reproducible timing.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click
import numpy as np
from threadpoolctl import threadpool_limits

from . import geometry
from .bem import OracleDomainError
from .fields import fibonacci_directions
from .foldy_lax import MixedSignError
from .functionals import compute_functionals
from .geometry import InfeasibleRegimeError, MeshError
from .io_utils import (
    write_complex_matrix,
    write_farfield_csv,
    write_farfield_json,
    write_json,
)
from .layers import SingularSystemError
from .linsolve import NumericallySingularError
from .oracle import oracle_far_field
from .physics import (
    AtResonanceError,
    NonPositiveResonanceError,
    UnreachableFrequencyError,
    minnaert_frequency,
)
from .quadrature import build_quadrature
from .runconfig import ConfigError, load_config
from .studies import (
    StudyError,
    build_cluster,
    convergence_study,
    resolve_omega,
    resonance_sweep,
    run,
    template_functionals,
)

EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_SINGULAR = 3

_INFEASIBLE = (
    InfeasibleRegimeError,
    MeshError,
    UnreachableFrequencyError,
    NonPositiveResonanceError,
    AtResonanceError,
    OracleDomainError,
    StudyError,
    MixedSignError,
)
_SINGULAR = (NumericallySingularError, SingularSystemError)


def _threads(option_value: int | None) -> int | None:
    env = os.environ.get("BUBBLES_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError("BUBBLES_THREADS", f"not an integer: {env!r}") from exc
    return option_value


def _execute(action, config_path, out, threads):
    try:
        config = load_config(config_path)
        limit = _threads(threads)
        if limit is not None:
            with threadpool_limits(limits=limit):
                action(config, out)
        else:
            action(config, out)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except _SINGULAR as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        sys.exit(EXIT_SINGULAR)
    except _INFEASIBLE as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except (ValueError, OSError) as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


def _common(command):
    command = click.option(
        "--config", "config_path", required=True,
        type=click.Path(exists=True, dir_okay=False), help="JSON run config."
    )(command)
    command = click.option(
        "--out", default=".", type=click.Path(file_okay=False),
        help="Output directory (created if missing)."
    )(command)
    command = click.option(
        "--threads", default=None, type=int,
        help="BLAS thread cap; BUBBLES_THREADS overrides."
    )(command)
    return command


@click.group()
def main() -> None:
    """Acoustic scattering by small high-contrast bubble clusters."""


@main.command()
@_common
def functionals(config_path, out, threads):
    """Shape functionals (a_hat, capacitance, volume) of the bubble template."""

    def action(config, out_dir):
        spec = config.cluster
        lo = np.asarray(spec.domain_box[0], dtype=float)
        hi = np.asarray(spec.domain_box[1], dtype=float)
        bubble = geometry._make_bubble(spec, 0.5 * (lo + hi))
        quad = build_quadrature(bubble, config.quadrature_order)
        fn = compute_functionals(quad)
        material = config.contrast.material(spec.a, config.rho0, config.k0)
        omega_m = minnaert_frequency(fn, material.rho_b, material.k_b, config.rho0)
        payload = {
            "a": spec.a,
            "shapeKind": spec.shape_kind,
            "aHat": fn.a_hat,
            "capacitance": fn.cap,
            "volume": fn.volume,
            "surfaceArea": fn.surface_area,
            "centroidOffset": [float(v) for v in fn.centroid_offset],
            "omegaM": omega_m,
            "quadratureOrder": config.quadrature_order,
            "nodes": quad.n_nodes,
        }
        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        path = target / config.outputs.functionals_json
        write_json(path, payload)
        click.echo(f"wrote {path}")

    _execute(action, config_path, out, threads)


@main.command()
@_common
def solve(config_path, out, threads):
    """Assemble and solve the interaction system; write diagnostics."""

    def action(config, out_dir):
        result = run(config)
        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        diag_path = target / config.outputs.diagnostics_json
        write_json(diag_path, result.diagnostics)
        click.echo(f"wrote {diag_path}")
        if config.outputs.matrix_dump:
            dump = target / config.outputs.matrix_dump
            write_complex_matrix(dump, result.system.matrix)
            click.echo(f"wrote {dump}")

    _execute(action, config_path, out, threads)


@main.command()
@_common
def farfield(config_path, out, threads):
    """Full pipeline: far-field CSV, summary JSON, diagnostics JSON."""

    def action(config, out_dir):
        result = run(config, out_dir=out_dir)
        for path in result.written:
            click.echo(f"wrote {path}")

    _execute(action, config_path, out, threads)


@main.command()
@_common
def sweep(config_path, out, threads):
    """Frequency sweep: cross-section and coefficient track."""

    def action(config, out_dir):
        _, diagnostics = resonance_sweep(config, out_dir=out_dir)
        click.echo(
            f"wrote {Path(out_dir) / config.outputs.sweep_csv} "
            f"(peak at omega={diagnostics['peakCrossSectionOmega']})"
        )

    _execute(action, config_path, out, threads)


@main.command()
@_common
def study(config_path, out, threads):
    """Convergence study against the configured oracle."""

    def action(config, out_dir):
        if config.study_a_values is None:
            raise ConfigError("study.aValues", "required for the study subcommand")
        result = convergence_study(
            config, config.study_a_values, config.study_oracle, out_dir=out_dir
        )
        click.echo(
            f"fitted slope {result.fitted_slope:.3f} "
            f"(predicted {result.predicted_slope:.3f}, "
            f"{'ok' if result.slope_ok else 'below tolerance'})"
        )

    _execute(action, config_path, out, threads)


@main.command()
@_common
def oracle(config_path, out, threads):
    """Reference far field from the independent solvers."""

    def action(config, out_dir):
        cluster = build_cluster(config)
        fn = template_functionals(config, cluster)
        material = config.contrast.material(config.cluster.a, config.rho0, config.k0)
        omega_m = minnaert_frequency(fn, material.rho_b, material.k_b, config.rho0)
        omega = resolve_omega(config, omega_m)
        medium = config.contrast.medium(
            config.cluster.a, cluster.m, rho0=config.rho0, k0=config.k0, omega=omega
        )
        pattern = oracle_far_field(
            cluster,
            medium,
            theta=config.theta,
            directions=fibonacci_directions(config.directions_n),
            method=config.study_oracle,
            order=config.quadrature_order,
        )
        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        csv_path = target / config.outputs.farfield_csv
        write_farfield_csv(csv_path, pattern)
        write_farfield_json(target / config.outputs.summary_json, pattern, omega, cluster.m)
        click.echo(f"wrote {csv_path} (source={pattern.source})")

    _execute(action, config_path, out, threads)


if __name__ == "__main__":
    main()
