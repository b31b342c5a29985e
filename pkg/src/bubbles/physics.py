"""Material laws, wavenumbers, Minnaert resonance, and scattering coefficients.

The background medium carries density ``rho0`` and bulk modulus ``k0``; each
bubble carries ``(rho_b, k_b)``.  Wavenumbers derive from the frequency:
``kappa = omega * sqrt(rho / k)``.  A bubble's monopole response blows up at
the Minnaert frequency

    omega_M^2 = 8 pi k_b / ((rho_b - rho0) * a_hat),

positive because ``a_hat < 0`` and ``rho_b < rho0`` for light bubbles.  The
per-bubble scattering strength C (the diagonal of the interaction system)
exists in three forms:

* ``leading``:   C = kappa_b^2 |D| / (rho_b/(rho_b - rho0) - kappa_b^2 a_hat / 8 pi);
  the denominator equals rho_b/(rho_b - rho0) * (1 - omega^2/omega_M^2), so it
  vanishes exactly at resonance and its inverse's real part changes sign there.
* ``refined``:   adds radiation damping and capacitance corrections; reduces
  to the leading inverse plus ``i kappa_b / 4 pi`` exactly when the interior
  and exterior wavenumbers coincide.
* ``dominating``: the near-resonance limit form used for sweep comparisons,
  with the detuning written as ``1 - omega_M^2/omega^2 = l_M a^{h1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .functionals import ShapeFunctionals

__all__ = [
    "LEADING",
    "REFINED",
    "DOMINATING",
    "AtResonanceError",
    "BubbleMaterial",
    "ContrastLaw",
    "DegenerateCoefficientError",
    "MediumSpec",
    "NonPositiveResonanceError",
    "ScatterCoefficient",
    "UnreachableFrequencyError",
    "dominating_inverse_coefficient",
    "leading_coefficient",
    "minnaert_frequency",
    "near_resonance_omega",
    "refined_inverse_coefficient",
]

LEADING = "leading"
REFINED = "refined"
DOMINATING = "dominating"

# Relative denominator threshold below which the leading coefficient is
# treated as exactly at resonance.
_RESONANCE_TOL = 1e-12


class AtResonanceError(ZeroDivisionError):
    """Leading coefficient evaluated at (numerically) exact resonance."""


class NonPositiveResonanceError(ValueError):
    """Minnaert frequency undefined: requires rho_b < rho0 and a_hat < 0."""


class UnreachableFrequencyError(ValueError):
    """Requested detuning l_M * a^h1 >= 1 puts omega beyond every real value."""


class DegenerateCoefficientError(ZeroDivisionError):
    """A denominator of the refined coefficient formula vanished."""


@dataclass(frozen=True)
class BubbleMaterial:
    """Density and bulk modulus of one bubble's interior."""

    rho_b: float
    k_b: float

    def __post_init__(self) -> None:
        if not (self.rho_b > 0 and self.k_b > 0):
            raise ValueError("bubble material requires rho_b > 0 and k_b > 0")


@dataclass(frozen=True)
class MediumSpec:
    """Background material, per-bubble materials, and the working frequency."""

    rho0: float
    k0: float
    per_bubble: tuple[BubbleMaterial, ...]
    omega: float
    omega_max: float | None = None
    speed_ratio_bounds: tuple[float, float] = (0.5, 2.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_bubble", tuple(self.per_bubble))
        if not (self.rho0 > 0 and self.k0 > 0):
            raise ValueError("background requires rho0 > 0 and k0 > 0")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if self.omega_max is not None and self.omega > self.omega_max:
            raise ValueError(f"omega {self.omega} exceeds omega_max {self.omega_max}")
        lo, hi = self.speed_ratio_bounds
        for index in range(len(self.per_bubble)):
            ratio = self.speed_ratio(index)
            if not lo <= ratio <= hi:
                raise ValueError(
                    f"bubble {index}: speed ratio kappa_b/kappa0 = {ratio:.6g} "
                    f"outside bounds [{lo}, {hi}]"
                )

    @property
    def m(self) -> int:
        return len(self.per_bubble)

    @property
    def kappa0(self) -> float:
        return self.omega * math.sqrt(self.rho0 / self.k0)

    def kappa_b(self, index: int) -> float:
        mat = self.per_bubble[index]
        return self.omega * math.sqrt(mat.rho_b / mat.k_b)

    def speed_ratio(self, index: int) -> float:
        return self.kappa_b(index) / self.kappa0

    def with_omega(self, omega: float) -> "MediumSpec":
        return MediumSpec(
            rho0=self.rho0,
            k0=self.k0,
            per_bubble=self.per_bubble,
            omega=omega,
            omega_max=self.omega_max,
            speed_ratio_bounds=self.speed_ratio_bounds,
        )


@dataclass(frozen=True)
class ContrastLaw:
    """Density contrast rho_b = c_rho * a^beta * rho0 with the bulk modulus
    chosen so the interior/exterior wavenumber ratio equals ``speed_ratio``."""

    c_rho: float
    beta: float
    speed_ratio: float = 1.0

    def __post_init__(self) -> None:
        if not self.c_rho > 0:
            raise ValueError("c_rho must be positive")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not 0.5 < self.speed_ratio < 2.0:
            raise ValueError("speed_ratio must lie in (0.5, 2)")

    @property
    def gamma(self) -> float:
        return self.beta - 1.0

    def material(self, a: float, rho0: float, k0: float) -> BubbleMaterial:
        rho_b = self.c_rho * a**self.beta * rho0
        k_b = k0 * (rho_b / rho0) / self.speed_ratio**2
        return BubbleMaterial(rho_b=rho_b, k_b=k_b)

    def medium(
        self,
        a: float,
        count: int,
        rho0: float,
        k0: float,
        omega: float,
        omega_max: float | None = None,
    ) -> MediumSpec:
        mat = self.material(a, rho0, k0)
        return MediumSpec(
            rho0=rho0, k0=k0, per_bubble=(mat,) * count, omega=omega, omega_max=omega_max
        )


@dataclass(frozen=True)
class ScatterCoefficient:
    """One bubble's interaction strength C and its inverse."""

    c_m: complex
    c_minv: complex
    variant: str

    def __post_init__(self) -> None:
        if self.variant not in (LEADING, REFINED, DOMINATING):
            raise ValueError(f"unknown coefficient variant {self.variant!r}")
        product = self.c_m * self.c_minv
        if abs(product - 1.0) > 1e-12:
            raise ValueError("c_m and c_minv must be exact reciprocals")

    @classmethod
    def from_c(cls, c_m: complex, variant: str) -> "ScatterCoefficient":
        return cls(c_m=c_m, c_minv=1.0 / c_m, variant=variant)

    @classmethod
    def from_cinv(cls, c_minv: complex, variant: str) -> "ScatterCoefficient":
        return cls(c_m=1.0 / c_minv, c_minv=c_minv, variant=variant)


def minnaert_frequency(
    functionals: ShapeFunctionals, rho_b: float, k_b: float, rho0: float
) -> float:
    """Resonance frequency omega_M = sqrt(8 pi k_b / ((rho_b - rho0) a_hat))."""
    if functionals.a_hat >= 0:
        raise NonPositiveResonanceError("a_hat must be negative")
    if rho_b >= rho0:
        raise NonPositiveResonanceError(
            f"resonance requires rho_b < rho0, got rho_b={rho_b} >= rho0={rho0}"
        )
    return math.sqrt(8.0 * math.pi * k_b / ((rho_b - rho0) * functionals.a_hat))


def leading_coefficient(
    functionals: ShapeFunctionals, medium: MediumSpec, bubble_index: int
) -> ScatterCoefficient:
    """Leading-order C from volume, a_hat, and material contrast."""
    mat = medium.per_bubble[bubble_index]
    kb = medium.kappa_b(bubble_index)
    contrast = mat.rho_b / (mat.rho_b - medium.rho0)
    shape_term = kb**2 * functionals.a_hat / (8.0 * math.pi)
    denominator = contrast - shape_term
    scale = max(abs(contrast), abs(shape_term))
    if abs(denominator) < _RESONANCE_TOL * scale:
        raise AtResonanceError(
            "leading coefficient denominator vanishes: omega is at the Minnaert frequency"
        )
    return ScatterCoefficient.from_c(kb**2 * functionals.volume / denominator, LEADING)


def refined_inverse_coefficient(
    functionals: ShapeFunctionals, medium: MediumSpec, bubble_index: int
) -> ScatterCoefficient:
    """Refined C^-1 with radiation damping and capacitance corrections.

    With P = kappa_b^2 + (rho_b/rho0)(kappa_b^2 - kappa0^2):

        C^-1 = P^-1 [I_d - i I_d J / P] + kappa_b^-2 [I_s - I_d J^2 / kappa_b^4]

        I_d = |D|^-1 (rho_b/(rho_b - rho0)
                      + (1/8 pi)(-kappa_b^2 - (rho_b/rho0)(kappa_b^2 - kappa0^2)) a_hat)
        I_s = i (kappa_b^3/(4 pi)
                 - (1/32 pi^2)(kappa0 - kappa_b) kappa_b^2 |D|^-1 a_hat Cap)
        J   = (rho0/(rho_b - rho0)) (1/4 pi)(kappa0 - kappa_b) kappa_b^2
              * (1 + (1/8 pi) a_hat |D|^-1 Cap) Cap

    When kappa_b = kappa0 all J terms vanish and the value reduces to the
    leading inverse plus i kappa_b/(4 pi) exactly.
    """
    mat = medium.per_bubble[bubble_index]
    k0 = medium.kappa0
    kb = medium.kappa_b(bubble_index)
    rho_ratio = mat.rho_b / medium.rho0
    inv_vol = 1.0 / functionals.volume
    a_hat = functionals.a_hat
    cap = functionals.cap
    p = kb**2 + rho_ratio * (kb**2 - k0**2)
    if abs(p) < _RESONANCE_TOL * kb**2 or kb == 0:
        raise DegenerateCoefficientError("refined coefficient denominator vanishes")
    i_d = inv_vol * (
        mat.rho_b / (mat.rho_b - medium.rho0)
        + (1.0 / (8.0 * math.pi)) * (-(kb**2) - rho_ratio * (kb**2 - k0**2)) * a_hat
    )
    i_s = 1j * (
        kb**3 / (4.0 * math.pi)
        - (1.0 / (32.0 * math.pi**2)) * (k0 - kb) * kb**2 * inv_vol * a_hat * cap
    )
    j = (
        (medium.rho0 / (mat.rho_b - medium.rho0))
        * (1.0 / (4.0 * math.pi))
        * (k0 - kb)
        * kb**2
        * (1.0 + (1.0 / (8.0 * math.pi)) * a_hat * inv_vol * cap)
        * cap
    )
    c_inv = (i_d - 1j * i_d * j / p) / p + (i_s - i_d * j**2 / kb**4) / kb**2
    return ScatterCoefficient.from_cinv(c_inv, REFINED)


def dominating_inverse_coefficient(
    functionals: ShapeFunctionals,
    medium: MediumSpec,
    bubble_index: int,
    l_m: float,
    h1: float,
    a: float,
) -> ScatterCoefficient:
    """Near-resonance limit form of C^-1 for detuning 1 - omega_M^2/omega^2
    = l_M a^{h1}; in physical (unscaled) functionals:

        C^-1 = -l_M a^{h1} a_hat / (8 pi |D|)
               + i (kappa_b/(4 pi) - (1/32 pi^2)(kappa0 - kappa_b) a_hat Cap / |D|)
    """
    k0 = medium.kappa0
    kb = medium.kappa_b(bubble_index)
    real_part = -l_m * a**h1 * functionals.a_hat / (8.0 * math.pi * functionals.volume)
    imag_part = kb / (4.0 * math.pi) - (1.0 / (32.0 * math.pi**2)) * (
        k0 - kb
    ) * functionals.a_hat * functionals.cap / functionals.volume
    return ScatterCoefficient.from_cinv(real_part + 1j * imag_part, DOMINATING)


def near_resonance_omega(omega_m: float, l_m: float, h1: float, a: float) -> float:
    """Frequency with detuning 1 - omega_M^2/omega^2 = l_M a^{h1} exactly."""
    if not 0.0 < h1 <= 1.0:
        raise ValueError("h1 must lie in (0, 1]")
    if not a > 0:
        raise ValueError("a must be positive")
    detuning = l_m * a**h1
    if detuning >= 1.0:
        raise UnreachableFrequencyError(
            f"detuning l_M a^h1 = {detuning:.6g} >= 1 admits no real frequency"
        )
    return omega_m / math.sqrt(1.0 - detuning)
