"""Pipeline orchestration: single runs, frequency sweeps, convergence studies.

``run`` executes the full chain — cluster generation, shape functionals,
scattering coefficients, system assembly/solve, far field — and writes the
far-field CSV plus summary/diagnostics JSON.  ``resonance_sweep`` walks a
monotone frequency grid and records the cross-section and coefficient track.
``convergence_study`` reruns the pipeline over a decreasing sequence of sizes
``a``, measures the far-field deviation from an independent oracle on a fixed
direction grid, and fits the observed convergence slope.

Error metric: ``errors`` holds the direction-grid RMS of (model - oracle) for
the unit-amplitude incident wave; the expected decay rate is the minimum of
the active exponent pair (away from resonance: 2-s and 3-gamma-s-2t; near
resonance: 2-s-2*h1 and 3-2t-2s-2*h1).  ``errors_rel_oracle`` additionally
normalizes by the oracle pattern norm, which itself scales like a, so its
slope runs one order lower; both are reported.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import geometry
from .fields import (
    FarFieldPattern,
    cross_section_rule,
    far_field,
    far_values,
    fibonacci_directions,
)
from .foldy_lax import (
    FoldyLaxSystem,
    InvertibilityReport,
    assemble,
    invertibility_report,
    solve,
)
from .functionals import ShapeFunctionals, compute_functionals
from .geometry import Cluster, cluster_stats, generate_cluster
from .io_utils import (
    write_complex_matrix,
    write_farfield_csv,
    write_farfield_json,
    write_json,
    write_sweep_csv,
)
from .linsolve import NumericallySingularError
from .oracle import oracle_far_field
from .physics import (
    AtResonanceError,
    MediumSpec,
    ScatterCoefficient,
    dominating_inverse_coefficient,
    leading_coefficient,
    minnaert_frequency,
    near_resonance_omega,
    refined_inverse_coefficient,
)
from .quadrature import build_quadrature
from .runconfig import RunConfig, regime_flags

__all__ = [
    "ConvergenceStudy",
    "RunResult",
    "StudyError",
    "build_cluster",
    "convergence_study",
    "make_coefficients",
    "resolve_omega",
    "resonance_sweep",
    "run",
    "template_functionals",
]

SLOPE_TOLERANCE = 0.3
AMBIGUITY_GAP = 0.25


class StudyError(ValueError):
    """Invalid convergence-study request (bad aValues, infeasible oracle)."""


@dataclass(frozen=True)
class RunResult:
    """Everything a single pipeline execution produced."""

    config: RunConfig
    cluster: Cluster
    functionals: ShapeFunctionals
    medium: MediumSpec
    omega_m: float
    system: FoldyLaxSystem
    report: InvertibilityReport
    pattern: FarFieldPattern
    diagnostics: dict
    written: tuple[str, ...] = ()


@dataclass(frozen=True)
class ConvergenceStudy:
    """Observed far-field error decay versus the predicted exponents."""

    a_values: tuple[float, ...]
    errors: tuple[float, ...]
    errors_rel_oracle: tuple[float, ...]
    fitted_slope: float
    fitted_slope_rel: float
    predicted_slope: float
    predicted_exponents: tuple[float, float]
    ambiguous: bool
    slope_ok: bool
    oracle_kind: str
    coefficient_variant: str


def build_cluster(config: RunConfig) -> Cluster:
    """Generate the cluster, or build it from explicit centers when given."""
    if config.explicit_centers is None:
        return generate_cluster(config.cluster)
    bubbles = [
        geometry._make_bubble(config.cluster, np.asarray(center, dtype=float))
        for center in config.explicit_centers
    ]
    cluster = Cluster(bubbles=bubbles, a=config.cluster.a, d=math.inf, spec=config.cluster)
    if cluster.m > 1:
        cluster.d = cluster_stats(cluster)["d"]
    return cluster


def template_functionals(config: RunConfig, cluster: Cluster) -> ShapeFunctionals:
    """Shape functionals of the (shared) bubble template at physical size."""
    quad = build_quadrature(cluster.bubbles[0], config.quadrature_order)
    return compute_functionals(quad)


def resolve_omega(config: RunConfig, omega_m: float) -> float:
    """Operating frequency for fixed or resonance-relative modes."""
    freq = config.frequency
    if freq.mode == "fixed":
        return freq.omega
    if freq.mode == "relativeToResonance":
        return near_resonance_omega(omega_m, freq.l_m, freq.h1, config.cluster.a)
    raise StudyError("sweep-mode config has no single operating frequency")


def make_coefficients(
    config: RunConfig,
    functionals: ShapeFunctionals,
    medium: MediumSpec,
    omega_m: float,
) -> list[ScatterCoefficient]:
    """Per-bubble scattering coefficients in the configured variant."""
    variant = config.coefficient_variant
    out = []
    for index in range(medium.m):
        if variant == "leading":
            out.append(leading_coefficient(functionals, medium, index))
        elif variant == "refined":
            out.append(refined_inverse_coefficient(functionals, medium, index))
        else:
            detuning = 1.0 - (omega_m / medium.omega) ** 2
            out.append(
                dominating_inverse_coefficient(
                    functionals, medium, index, detuning, 0.0, config.cluster.a
                )
            )
    return out


def _medium(config: RunConfig, m: int, omega: float) -> MediumSpec:
    return config.contrast.medium(
        config.cluster.a, m, rho0=config.rho0, k0=config.k0, omega=omega
    )


def run(config: RunConfig, out_dir=None) -> RunResult:
    """Full pipeline; writes artifacts when ``out_dir`` is given."""
    cluster = build_cluster(config)
    functionals = template_functionals(config, cluster)
    material = config.contrast.material(config.cluster.a, config.rho0, config.k0)
    omega_m = minnaert_frequency(functionals, material.rho_b, material.k_b, config.rho0)
    omega = resolve_omega(config, omega_m)
    medium = _medium(config, cluster.m, omega)
    coefficients = make_coefficients(config, functionals, medium, omega_m)
    system = assemble(cluster, coefficients, medium, config.theta)
    regime = None if config.invertibility_regime == "auto" else config.invertibility_regime
    report = invertibility_report(
        cluster, coefficients, medium, regime=regime, gamma=config.contrast.gamma
    )
    solved = solve(system)
    pattern = far_field(solved, fibonacci_directions(config.directions_n))

    flags = regime_flags(config)
    flags["case2aTauPositive"] = bool(system.tau > 0)
    c0 = coefficients[0]
    diagnostics = {
        "M": cluster.m,
        "a": cluster.a,
        "d": cluster.d if math.isfinite(cluster.d) else None,
        "tau": system.tau,
        "omega": omega,
        "omegaM": omega_m,
        "kappa0": medium.kappa0,
        "coefficientVariant": config.coefficient_variant,
        "cInv": [c0.c_minv.real, c0.c_minv.imag],
        "crossSection": pattern.cross_section,
        "qNorm": float(np.linalg.norm(solved.q)),
        "regimeFlags": flags,
        "invertibility": {
            "regime": report.regime,
            "lhs": report.lhs,
            "rhs": report.rhs,
            "verdict": report.satisfied,
            "tau": report.tau,
            "qNormBound": _finite_or_none(
                report.q_norm_bound(float(np.linalg.norm(system.rhs) ** 2))
            ),
        },
        "solver": {
            "status": "ok",
            "residual": solved.residual_norm,
            "conditionEstimate": _finite_or_none(solved.condition_estimate),
        },
    }
    written: list[str] = []
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = config.outputs
        far_path = out / paths.farfield_csv
        write_farfield_csv(far_path, pattern)
        summary_path = out / paths.summary_json
        write_farfield_json(summary_path, pattern, omega, cluster.m)
        diag_path = out / paths.diagnostics_json
        write_json(diag_path, diagnostics)
        written = [str(far_path), str(summary_path), str(diag_path)]
        if paths.matrix_dump:
            dump_path = out / paths.matrix_dump
            write_complex_matrix(dump_path, system.matrix)
            written.append(str(dump_path))
    return RunResult(
        config=config,
        cluster=cluster,
        functionals=functionals,
        medium=medium,
        omega_m=omega_m,
        system=solved,
        report=report,
        pattern=pattern,
        diagnostics=diagnostics,
        written=tuple(written),
    )


def _finite_or_none(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def resonance_sweep(config: RunConfig, out_dir=None) -> tuple[list[dict], dict]:
    """Monotone frequency sweep: cross-section and coefficient track per omega.

    Returns (rows, diagnostics) and writes the sweep CSV plus diagnostics
    JSON when ``out_dir`` is given.  Requires the sweep frequency mode and a
    resonant contrast (beta = 2), because the tracked quantities — the sign
    change of Re C^-1 and the near-resonance limit-form comparison — only
    make sense there.
    """
    freq = config.frequency
    if freq.mode != "sweep":
        raise StudyError("resonance_sweep requires the sweep frequency mode")
    if abs(config.contrast.beta - 2.0) > 1e-12:
        raise StudyError("resonance_sweep requires beta = 2 (resonant contrast)")
    cluster = build_cluster(config)
    functionals = template_functionals(config, cluster)
    material = config.contrast.material(config.cluster.a, config.rho0, config.k0)
    omega_m = minnaert_frequency(functionals, material.rho_b, material.k_b, config.rho0)
    omegas = np.linspace(freq.omega_min, freq.omega_max, freq.count)
    cs_dirs, cs_weights = cross_section_rule()

    rows: list[dict] = []
    re_track: list[float] = []
    for omega in omegas:
        medium = _medium(config, cluster.m, float(omega))
        detuning = 1.0 - (omega_m / omega) ** 2
        dom = dominating_inverse_coefficient(
            functionals, medium, 0, detuning, 0.0, config.cluster.a
        )
        status = "ok"
        c_inv = complex(float("nan"), float("nan"))
        cross_section = float("nan")
        try:
            coefficients = make_coefficients(config, functionals, medium, omega_m)
            c_inv = coefficients[0].c_minv
            system = solve(assemble(cluster, coefficients, medium, config.theta))
            values = far_values(system.q, system.centers, medium.kappa0, cs_dirs)
            cross_section = float(np.sum(cs_weights * np.abs(values) ** 2))
        except AtResonanceError:
            status = "atResonance"
        except NumericallySingularError:
            status = "singular"
        re_track.append(c_inv.real)
        rows.append(
            {
                "omega": float(omega),
                "crossSection": cross_section,
                "reCinv": c_inv.real,
                "imCinv": c_inv.imag,
                "status": status,
                "dominatingDiff": abs(c_inv - dom.c_minv),
            }
        )

    finite_cs = [(row["crossSection"], row["omega"]) for row in rows
                 if math.isfinite(row["crossSection"])]
    peak_omega = max(finite_cs)[1] if finite_cs else None
    bin_width = float(omegas[1] - omegas[0])
    flips = [
        0.5 * (float(omegas[i]) + float(omegas[i + 1]))
        for i in range(len(rows) - 1)
        if math.isfinite(re_track[i]) and math.isfinite(re_track[i + 1])
        and re_track[i] * re_track[i + 1] < 0
    ]
    diagnostics = {
        "omegaM": omega_m,
        "binWidth": bin_width,
        "peakCrossSectionOmega": peak_omega,
        "peakWithinOneBinOfOmegaM": (
            abs(peak_omega - omega_m) <= bin_width if peak_omega is not None else False
        ),
        "signFlipOmegas": flips,
        "signFlipCount": len(flips),
        "signFlipWithinOneBinOfOmegaM": any(
            abs(f - omega_m) <= bin_width for f in flips
        ),
        "M": cluster.m,
        "coefficientVariant": config.coefficient_variant,
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_sweep_csv(out / config.outputs.sweep_csv, rows)
        write_json(out / config.outputs.diagnostics_json, diagnostics)
    return rows, diagnostics


def predicted_exponent_pair(config: RunConfig) -> tuple[float, float]:
    """Active error-exponent pair of the asymptotic expansion."""
    s = config.cluster.s
    t = config.cluster.t
    gamma = config.contrast.gamma
    if config.frequency.mode == "relativeToResonance":
        h1 = config.frequency.h1
        return (2.0 - s - 2.0 * h1, 3.0 - 2.0 * t - 2.0 * s - 2.0 * h1)
    return (2.0 - s, 3.0 - gamma - s - 2.0 * t)


def convergence_study(
    config: RunConfig,
    a_values,
    oracle_kind: str = "auto",
    out_dir=None,
) -> ConvergenceStudy:
    """Far-field error versus an oracle across a decreasing size sequence."""
    a_values = tuple(float(a) for a in a_values)
    if len(a_values) < 3:
        raise StudyError("need at least 3 aValues")
    if any(b >= a for a, b in zip(a_values, a_values[1:])):
        raise StudyError("aValues not strictly decreasing")
    directions = fibonacci_directions(config.directions_n)

    errors = []
    errors_rel = []
    for a in a_values:
        sub_config = replace(config, cluster=replace(config.cluster, a=a))
        result = run(sub_config)
        if oracle_kind == "mie" and result.cluster.m != 1:
            raise StudyError("mie oracle requires a single-bubble cluster")
        oracle = oracle_far_field(
            result.cluster,
            result.medium,
            theta=config.theta,
            directions=directions,
            method=oracle_kind,
            order=config.quadrature_order,
        )
        model = far_values(
            result.system.q, result.system.centers, result.medium.kappa0, directions
        )
        diff = model - oracle.values
        errors.append(float(np.sqrt(np.mean(np.abs(diff) ** 2))))
        errors_rel.append(float(np.linalg.norm(diff) / np.linalg.norm(oracle.values)))
        oracle_kind_used = oracle.source.split(":", 1)[1]

    log_a = np.log(np.asarray(a_values))
    fitted = float(np.polyfit(log_a, np.log(np.asarray(errors)), 1)[0])
    fitted_rel = float(np.polyfit(log_a, np.log(np.asarray(errors_rel)), 1)[0])
    exponents = predicted_exponent_pair(config)
    predicted = min(exponents)
    study = ConvergenceStudy(
        a_values=a_values,
        errors=tuple(errors),
        errors_rel_oracle=tuple(errors_rel),
        fitted_slope=fitted,
        fitted_slope_rel=fitted_rel,
        predicted_slope=predicted,
        predicted_exponents=exponents,
        ambiguous=abs(exponents[0] - exponents[1]) < AMBIGUITY_GAP,
        slope_ok=fitted >= predicted - SLOPE_TOLERANCE,
        oracle_kind=oracle_kind_used,
        coefficient_variant=config.coefficient_variant,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_study(out, config, study)
    return study


def _write_study(out: Path, config: RunConfig, study: ConvergenceStudy) -> None:
    csv_path = out / config.outputs.study_csv
    with open(csv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(("a", "error", "errorRelOracle"))
        for a, err, rel in zip(study.a_values, study.errors, study.errors_rel_oracle):
            writer.writerow([repr(a), repr(err), repr(rel)])
    payload = {
        "aValues": list(study.a_values),
        "errors": list(study.errors),
        "errorsRelOracle": list(study.errors_rel_oracle),
        "fittedSlope": study.fitted_slope,
        "fittedSlopeRelOracle": study.fitted_slope_rel,
        "predictedSlope": study.predicted_slope,
        "predictedExponents": list(study.predicted_exponents),
        "ambiguous": study.ambiguous,
        "slopeOK": study.slope_ok,
        "oracleKind": study.oracle_kind,
        "coefficientVariant": study.coefficient_variant,
    }
    write_json(out / config.outputs.study_json, payload)
