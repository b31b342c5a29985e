"""Partial-wave (separation-of-variables) solution for one penetrable sphere.

Solves the transmission problem for a unit plane wave hitting a single
homogeneous sphere: exterior field u = u_inc + sum_l a_l h_l(k0 r) P_l,
interior field u = sum_l b_l j_l(kb r) P_l, with continuity of u and of
(1/rho) du/dr across the interface.  This is an independent reference
solution: it shares no code path with the point-interaction model.

Far-field normalization matches :mod:`bubbles.fields`:

    u_far(xhat) = (4 pi / k0) * sum_l (-i)^(l+1) a_l P_l(xhat.theta)
                  * exp(i k0 (theta - xhat).z)

for a sphere centered at z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import spherical_jn, spherical_yn

__all__ = [
    "PartialWaveSolution",
    "TruncationError",
    "far_values",
    "interior_values",
    "mie_sphere",
]

_L_MAX_CAP = 120
_TAIL_TOL = 1e-12


class TruncationError(RuntimeError):
    """Partial-wave tail failed to fall below tolerance before the cap."""


def _hl(l: np.ndarray, x: float, derivative: bool = False) -> np.ndarray:
    """Spherical Hankel function of the first kind h_l(x) (or h_l')."""
    return spherical_jn(l, x, derivative) + 1j * spherical_yn(l, x, derivative)


@dataclass(frozen=True)
class PartialWaveSolution:
    """Partial-wave coefficients of the single-sphere transmission problem."""

    radius: float
    center: np.ndarray
    kappa0: float
    kappa_b: float
    rho0: float
    rho_b: float
    exterior_coeffs: np.ndarray
    interior_coeffs: np.ndarray

    @property
    def l_max(self) -> int:
        return len(self.exterior_coeffs) - 1


def mie_sphere(radius, rho_b, k_b, medium, l_max: int | None = None,
               center=(0.0, 0.0, 0.0)) -> PartialWaveSolution:
    """Solve the single-sphere transmission problem.

    ``medium`` provides the background density/bulk modulus and operating
    frequency; ``rho_b``/``k_b`` are the sphere's material constants.  When
    ``l_max`` is None the expansion order is grown until the relative tail
    drops below 1e-12.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if rho_b <= 0.0 or k_b <= 0.0:
        raise ValueError("sphere material constants must be positive")
    kappa0 = medium.kappa0
    kappa_b = medium.omega * math.sqrt(rho_b / k_b)
    rho0 = medium.rho0

    if l_max is not None:
        a_l, b_l = _coefficients(l_max, radius, kappa0, kappa_b, rho0, rho_b)
    else:
        l_max = max(8, int(math.ceil(kappa0 * radius)) + 8)
        while True:
            a_l, b_l = _coefficients(l_max, radius, kappa0, kappa_b, rho0, rho_b)
            peak = np.max(np.abs(a_l))
            if peak == 0.0 or np.abs(a_l[-1]) <= _TAIL_TOL * peak:
                break
            if l_max >= _L_MAX_CAP:
                raise TruncationError(
                    f"partial-wave tail above {_TAIL_TOL:g} at l_max={l_max}"
                )
            l_max = min(2 * l_max, _L_MAX_CAP)
    return PartialWaveSolution(
        radius=float(radius),
        center=np.asarray(center, dtype=float),
        kappa0=float(kappa0),
        kappa_b=float(kappa_b),
        rho0=float(rho0),
        rho_b=float(rho_b),
        exterior_coeffs=a_l,
        interior_coeffs=b_l,
    )


def _coefficients(l_max, radius, kappa0, kappa_b, rho0, rho_b):
    l = np.arange(l_max + 1)
    x0 = kappa0 * radius
    xb = kappa_b * radius
    j0, j0p = spherical_jn(l, x0), spherical_jn(l, x0, True)
    jb, jbp = spherical_jn(l, xb), spherical_jn(l, xb, True)
    h0, h0p = _hl(l, x0), _hl(l, x0, True)
    inc = (1j) ** l * (2 * l + 1)
    # Continuity of u and (1/rho) du/dr at r = radius.
    num = (kappa_b / rho_b) * jbp * j0 - (kappa0 / rho0) * j0p * jb
    den = (kappa0 / rho0) * h0p * jb - (kappa_b / rho_b) * jbp * h0
    with np.errstate(invalid="ignore", over="ignore"):
        a_l = inc * num / den
        b_l = (inc * j0 + a_l * h0) / jb
    # Far below-threshold orders underflow to 0/0; they contribute nothing.
    a_l = np.where(np.isfinite(a_l), a_l, 0.0)
    b_l = np.where(np.isfinite(b_l), b_l, 0.0)
    return a_l, b_l


def far_values(solution: PartialWaveSolution, directions, theta) -> np.ndarray:
    """Far-field pattern samples in the engine normalization (see module doc)."""
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    theta = np.asarray(theta, dtype=float)
    mu = np.clip(directions @ theta, -1.0, 1.0)
    l = np.arange(solution.l_max + 1)
    coeffs = (4.0 * math.pi / solution.kappa0) * (-1j) ** (l + 1) * solution.exterior_coeffs
    series = np.polynomial.legendre.legval(mu, coeffs)
    phase = np.exp(1j * solution.kappa0 * ((theta - directions) @ solution.center))
    return series * phase


def interior_values(solution: PartialWaveSolution, points, theta) -> np.ndarray:
    """Total field inside the sphere at the given points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    theta = np.asarray(theta, dtype=float)
    rel = points - solution.center[None, :]
    r = np.linalg.norm(rel, axis=-1)
    if np.any(r > solution.radius * (1.0 + 1e-12)):
        raise ValueError("interior evaluation outside the sphere")
    mu = np.zeros_like(r)
    nz = r > 0.0
    mu[nz] = np.clip((rel[nz] @ theta) / r[nz], -1.0, 1.0)
    l = np.arange(solution.l_max + 1)
    radial = spherical_jn(l[None, :], solution.kappa_b * r[:, None])
    leg = np.polynomial.legendre.legvander(mu, solution.l_max)
    # The coefficients expand the wave about the center, so the incident
    # phase at the center multiplies the whole series.
    phase = np.exp(1j * solution.kappa0 * (theta @ solution.center))
    return (radial * leg) @ solution.interior_coeffs * phase
