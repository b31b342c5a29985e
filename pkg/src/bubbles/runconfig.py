"""Run configuration: JSON schema, validation, and regime-inequality flags.

A run config is a JSON object with sections

* ``cluster``    — either generator parameters (seeded, reproducible) or an
  explicit ``centers`` list; mirrors :class:`bubbles.geometry.ClusterSpec`.
* ``contrast``   — density power law and interior/exterior sound-speed ratio.
* ``background`` — ambient density/bulk modulus (defaults 1, 1).
* ``frequency``  — exactly one mode: ``fixed`` (omega), ``relativeToResonance``
  (lM, h1: omega is derived from the resonance frequency so that
  1 - omega_M^2/omega^2 = lM * a^h1), or ``sweep`` (omegaMin, omegaMax, count).
* ``coefficientVariant``, ``directionsN``, ``quadratureOrder``, ``theta``,
  ``invertibilityRegime``, ``outputs`` — optional scalars with defaults.

Validation failures raise :class:`ConfigError` naming the offending key.
``regime_flags`` evaluates every inequality hypothesis of the asymptotic
regime (the shared conditions plus the four invertibility case conditions)
and returns them as named booleans for diagnostics logging; inequalities
involving the resonance-proximity exponent h1 are evaluated with h1 = 0 for
fixed/sweep frequency modes, flagged by ``nearApplicable``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import ClusterSpec
from .physics import ContrastLaw

__all__ = [
    "ConfigError",
    "FrequencySpec",
    "OutputSpec",
    "RunConfig",
    "load_config",
    "parse_config",
    "regime_flags",
]

VARIANTS = ("leading", "refined", "dominating")
REGIMES = ("auto", "negativeCm", "positiveCmTau", "positiveCmSmall")
FREQUENCY_MODES = ("fixed", "relativeToResonance", "sweep")


class ConfigError(ValueError):
    """Invalid run configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str) -> None:
        self.key = key
        super().__init__(f"config key '{key}': {message}")


@dataclass(frozen=True)
class FrequencySpec:
    """Exactly one of the three frequency modes."""

    mode: str
    omega: float | None = None
    l_m: float | None = None
    h1: float | None = None
    omega_min: float | None = None
    omega_max: float | None = None
    count: int | None = None


@dataclass(frozen=True)
class OutputSpec:
    """Artifact file names, resolved against the output directory at run time."""

    farfield_csv: str = "farfield.csv"
    summary_json: str = "summary.json"
    diagnostics_json: str = "diagnostics.json"
    sweep_csv: str = "sweep.csv"
    study_json: str = "study.json"
    study_csv: str = "study.csv"
    functionals_json: str = "functionals.json"
    matrix_dump: str | None = None


@dataclass(frozen=True)
class RunConfig:
    cluster: ClusterSpec
    contrast: ContrastLaw
    frequency: FrequencySpec
    rho0: float = 1.0
    k0: float = 1.0
    coefficient_variant: str = "leading"
    directions_n: int = 590
    quadrature_order: int = 2
    theta: tuple[float, float, float] = (0.0, 0.0, 1.0)
    invertibility_regime: str = "auto"
    outputs: OutputSpec = field(default_factory=OutputSpec)
    explicit_centers: tuple[tuple[float, float, float], ...] | None = None
    study_a_values: tuple[float, ...] | None = None
    study_oracle: str = "auto"


class _Section:
    """Typed accessor over one JSON object that tracks consumed keys."""

    def __init__(self, data: dict, prefix: str) -> None:
        if not isinstance(data, dict):
            raise ConfigError(prefix or "<root>", "expected a JSON object")
        self.data = data
        self.prefix = prefix
        self.seen: set[str] = set()

    def _key(self, name: str) -> str:
        return f"{self.prefix}.{name}" if self.prefix else name

    def take(self, name: str, kind, required: bool = False, default=None):
        if name not in self.data:
            if required:
                raise ConfigError(self._key(name), "required key missing")
            return default
        self.seen.add(name)
        value = self.data[name]
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(self._key(name), f"expected a number, got {value!r}")
            return float(value)
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(self._key(name), f"expected an integer, got {value!r}")
            return value
        if kind is str:
            if not isinstance(value, str):
                raise ConfigError(self._key(name), f"expected a string, got {value!r}")
            return value
        if kind is dict:
            if not isinstance(value, dict):
                raise ConfigError(self._key(name), f"expected an object, got {value!r}")
            return value
        if kind is list:
            if not isinstance(value, list):
                raise ConfigError(self._key(name), f"expected an array, got {value!r}")
            return value
        if kind is object:
            return value
        raise TypeError(f"unsupported kind {kind}")

    def finish(self) -> None:
        extra = set(self.data) - self.seen
        if extra:
            name = sorted(extra)[0]
            raise ConfigError(self._key(name), "unknown key")


def _parse_vector(section: _Section, name: str, length: int, default=None):
    raw = section.take(name, list, default=None)
    if raw is None:
        return default
    if len(raw) != length or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw
    ):
        raise ConfigError(section._key(name), f"expected {length} numbers")
    return tuple(float(v) for v in raw)


def parse_config(data: dict) -> RunConfig:
    """Validate a decoded JSON object into a :class:`RunConfig`."""
    root = _Section(data, "")

    cluster_raw = root.take("cluster", dict, required=True)
    sec = _Section(cluster_raw, "cluster")
    a = sec.take("a", float, required=True)
    centers_raw = sec.take("centers", list)
    explicit = None
    if centers_raw is not None:
        explicit = []
        for i, row in enumerate(centers_raw):
            if (
                not isinstance(row, list)
                or len(row) != 3
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row)
            ):
                raise ConfigError(f"cluster.centers[{i}]", "expected 3 numbers")
            explicit.append(tuple(float(v) for v in row))
        if not explicit:
            raise ConfigError("cluster.centers", "must list at least one center")
        explicit = tuple(explicit)
    occupancy_raw = sec.take("occupancy", object, default=1)
    if isinstance(occupancy_raw, int) and not isinstance(occupancy_raw, bool):
        occupancy = occupancy_raw
    elif (
        isinstance(occupancy_raw, list)
        and len(occupancy_raw) == 2
        and occupancy_raw[0] == "bernoulli"
        and isinstance(occupancy_raw[1], (int, float))
    ):
        occupancy = ("bernoulli", float(occupancy_raw[1]))
    else:
        raise ConfigError(
            "cluster.occupancy", 'expected an integer or ["bernoulli", p]'
        )
    box_lo = _parse_vector(sec, "domainBoxLo", 3, default=(0.0, 0.0, 0.0))
    box_hi = _parse_vector(sec, "domainBoxHi", 3, default=(1.0, 1.0, 1.0))
    ratios = _parse_vector(sec, "ellipsoidRatios", 3, default=(1.0, 1.0, 1.0))
    try:
        cluster = ClusterSpec(
            a=a,
            s=sec.take("s", float, default=0.0),
            t=sec.take("t", float, default=0.0),
            seed=sec.take("seed", int, default=0),
            occupancy=occupancy,
            domain_box=(box_lo, box_hi),
            d_min_factor=sec.take("dMinFactor", float, default=0.5),
            d_max_factor=sec.take("dMaxFactor", float, default=3.0),
            m_max=sec.take("mMax", float, default=2.0),
            shape_kind=sec.take("shapeKind", str, default="sphere"),
            ellipsoid_ratios=ratios,
            icosphere_subdivisions=sec.take("icosphereSubdivisions", int, default=2),
        )
    except ValueError as exc:
        raise ConfigError("cluster", str(exc)) from exc
    sec.finish()

    contrast_raw = root.take("contrast", dict, required=True)
    csec = _Section(contrast_raw, "contrast")
    try:
        contrast = ContrastLaw(
            c_rho=csec.take("cRho", float, required=True),
            beta=csec.take("beta", float, required=True),
            speed_ratio=csec.take("speedRatio", float, default=1.0),
        )
    except ValueError as exc:
        raise ConfigError("contrast", str(exc)) from exc
    csec.finish()

    background_raw = root.take("background", dict, default={})
    bsec = _Section(background_raw, "background")
    rho0 = bsec.take("rho0", float, default=1.0)
    k0 = bsec.take("k0", float, default=1.0)
    bsec.finish()
    if rho0 <= 0 or k0 <= 0:
        raise ConfigError("background", "rho0 and k0 must be positive")

    frequency = _parse_frequency(root.take("frequency", dict, required=True))

    variant = root.take("coefficientVariant", str, default="leading")
    if variant not in VARIANTS:
        raise ConfigError("coefficientVariant", f"must be one of {VARIANTS}")
    regime = root.take("invertibilityRegime", str, default="auto")
    if regime not in REGIMES:
        raise ConfigError("invertibilityRegime", f"must be one of {REGIMES}")
    directions_n = root.take("directionsN", int, default=590)
    if directions_n < 1:
        raise ConfigError("directionsN", "must be >= 1")
    order = root.take("quadratureOrder", int, default=2)
    if order < 1:
        raise ConfigError("quadratureOrder", "must be >= 1")
    theta = _parse_vector(root, "theta", 3, default=(0.0, 0.0, 1.0))
    norm = sum(t * t for t in theta) ** 0.5
    if abs(norm - 1.0) > 1e-8:
        raise ConfigError("theta", "must be a unit vector")

    study_raw = root.take("study", dict, default=None)
    study_a_values = None
    study_oracle = "auto"
    if study_raw is not None:
        ssec = _Section(study_raw, "study")
        raw_values = ssec.take("aValues", list, required=True)
        if not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0
            for v in raw_values
        ):
            raise ConfigError("study.aValues", "expected positive numbers")
        study_a_values = tuple(float(v) for v in raw_values)
        study_oracle = ssec.take("oracleKind", str, default="auto")
        if study_oracle not in ("auto", "mie", "bem"):
            raise ConfigError("study.oracleKind", "must be auto, mie, or bem")
        ssec.finish()

    outputs_raw = root.take("outputs", dict, default={})
    osec = _Section(outputs_raw, "outputs")
    outputs = OutputSpec(
        farfield_csv=osec.take("farfieldCsv", str, default="farfield.csv"),
        summary_json=osec.take("summaryJson", str, default="summary.json"),
        diagnostics_json=osec.take("diagnosticsJson", str, default="diagnostics.json"),
        sweep_csv=osec.take("sweepCsv", str, default="sweep.csv"),
        study_json=osec.take("studyJson", str, default="study.json"),
        study_csv=osec.take("studyCsv", str, default="study.csv"),
        functionals_json=osec.take("functionalsJson", str, default="functionals.json"),
        matrix_dump=osec.take("matrixDump", str, default=None),
    )
    osec.finish()
    root.finish()

    return RunConfig(
        cluster=cluster,
        contrast=contrast,
        frequency=frequency,
        rho0=rho0,
        k0=k0,
        coefficient_variant=variant,
        directions_n=directions_n,
        quadrature_order=order,
        theta=theta,
        invertibility_regime=regime,
        outputs=outputs,
        explicit_centers=explicit,
        study_a_values=study_a_values,
        study_oracle=study_oracle,
    )


def _parse_frequency(raw: dict) -> FrequencySpec:
    sec = _Section(raw, "frequency")
    mode = sec.take("mode", str, required=True)
    if mode not in FREQUENCY_MODES:
        raise ConfigError("frequency.mode", f"must be one of {FREQUENCY_MODES}")
    if mode == "fixed":
        omega = sec.take("omega", float, required=True)
        if omega <= 0:
            raise ConfigError("frequency.omega", "must be positive")
        spec = FrequencySpec(mode=mode, omega=omega)
    elif mode == "relativeToResonance":
        l_m = sec.take("lM", float, required=True)
        h1 = sec.take("h1", float, required=True)
        if l_m == 0:
            raise ConfigError("frequency.lM", "must be nonzero")
        if not 0.0 < h1 < 1.0:
            raise ConfigError("frequency.h1", "must lie in (0, 1)")
        spec = FrequencySpec(mode=mode, l_m=l_m, h1=h1)
    else:
        omega_min = sec.take("omegaMin", float, required=True)
        omega_max = sec.take("omegaMax", float, required=True)
        count = sec.take("count", int, required=True)
        if omega_min <= 0 or omega_max <= omega_min:
            raise ConfigError("frequency.omegaMin", "need 0 < omegaMin < omegaMax")
        if count < 2:
            raise ConfigError("frequency.count", "need at least 2 sweep points")
        spec = FrequencySpec(mode=mode, omega_min=omega_min, omega_max=omega_max, count=count)
    sec.finish()
    return spec


def load_config(path) -> RunConfig:
    """Read and validate a JSON config file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<json>", f"invalid JSON: {exc}") from exc
    return parse_config(data)


def regime_flags(config: RunConfig) -> dict:
    """Every asymptotic-regime inequality as a named boolean.

    The shared hypotheses and all four invertibility case hypotheses are
    always present.  ``tauPositive`` depends on the realized cluster and is
    filled in by the pipeline after assembly (None here).
    """
    s = config.cluster.s
    t = config.cluster.t
    gamma = config.contrast.gamma
    near = config.frequency.mode == "relativeToResonance"
    h1 = config.frequency.h1 if near else 0.0
    l_m = config.frequency.l_m if near else 0.0
    flags = {
        "nearApplicable": near,
        "tInRange": 0.0 <= t < 0.5,
        "sInRange": 0.0 <= s <= 1.5,
        "gammaInRange": 0.0 <= gamma <= 1.0,
        "sPlusGammaLeq2": s + gamma <= 2.0,
        "tGeqSThird": t >= s / 3.0,
        "nearH1InRange": (0.0 < h1 < 1.0) if near else True,
        "nearLmNonzero": (l_m != 0.0) if near else True,
        "nearBelowSPlusH1Leq1": s + h1 <= 1.0,
        "nearAboveTPlusH1Leq1": t + h1 <= 1.0,
        "nearAboveSPlusH1Bound": s + h1 < min(1.5 - t, 2.0 - h1),
        "case1aGammaPlusSLeq2": gamma + s <= 2.0,
        "case1aTWindow": s / 3.0 <= t <= 1.0,
        "case1bTWindow": s / 3.0 <= t <= 1.0,
        "case1bSPlusH1Leq1": 1.0 - h1 - s >= 0.0,
        "case2aTLeq1MinusH1": t <= 1.0 - h1,
        "case2aSLeq1": s <= 1.0,
        "case2aTauPositive": None,
        "case2bTWindow": s / 3.0 <= t <= 1.0,
        "case2bSPlusH1Leq1": 1.0 - h1 - s >= 0.0,
    }
    return flags
