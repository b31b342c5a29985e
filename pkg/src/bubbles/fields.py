"""Incident, scattered, and far fields of a solved interaction system.

Conventions: the incident wave is the unit plane wave exp(i k0 theta.x).
The far-field pattern is normalized so that

    u_scattered(R xhat) ~ exp(i k0 R) / (4 pi R) * u_far(xhat)     (R -> inf)

with u_far(xhat) = sum over bubbles of exp(-i k0 xhat.z_m) Q_m.  The
scattering cross-section integrates |u_far|^2 over the unit sphere of
directions with a fixed Gauss-Legendre x trapezoid product rule, independent
of the direction grid the pattern was sampled on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .foldy_lax import FoldyLaxSystem, fundamental_solution
from .geometry import Cluster
from .quadrature import _sphere_grid

__all__ = [
    "DEFAULT_DIRECTIONS",
    "FarFieldPattern",
    "PointInsideExclusionZoneError",
    "cross_section_rule",
    "far_field",
    "far_values",
    "fibonacci_directions",
    "incident_field",
    "scattered_near_field",
]

DEFAULT_DIRECTIONS = 590
# Cross-section product rule resolution (Gauss-Legendre in cos(theta) x
# uniform in phi).
_CROSS_SECTION_NODES = (50, 100)


class PointInsideExclusionZoneError(ValueError):
    """Near-field requested at a point too close to a bubble center."""


@dataclass(frozen=True)
class FarFieldPattern:
    """Sampled far-field pattern and its scattering cross-section."""

    directions: np.ndarray
    theta: np.ndarray
    values: np.ndarray
    cross_section: float
    kappa0: float
    source: str = "foldyLax"

    @property
    def n_directions(self) -> int:
        return len(self.directions)


def incident_field(medium, theta, x):
    """Unit plane wave exp(i kappa0 theta.x); broadcasts over points."""
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    phase = 1j * medium.kappa0 * (x @ theta)
    out = np.exp(phase)
    return complex(out) if np.ndim(out) == 0 else out


def scattered_near_field(solution: FoldyLaxSystem, cluster: Cluster, x):
    """Scattered field sum of Q_m Phi_k0(x, z_m) at exterior points.

    Points must keep distance > a from every center (the point-interaction
    field is meaningless inside or on a bubble).
    """
    if solution.q is None:
        raise ValueError("system must be solved before field evaluation")
    pts = np.asarray(x, dtype=float)
    scalar = pts.ndim == 1
    pts = np.atleast_2d(pts)
    dist = np.linalg.norm(pts[:, None, :] - solution.centers[None, :, :], axis=-1)
    if np.any(dist <= cluster.a):
        raise PointInsideExclusionZoneError(
            "near-field point within distance a of a bubble center"
        )
    kernel = fundamental_solution(solution.kappa0, pts[:, None, :], solution.centers[None, :, :])
    out = kernel @ solution.q
    return complex(out[0]) if scalar else out


def fibonacci_directions(n: int = DEFAULT_DIRECTIONS) -> np.ndarray:
    """Deterministic Fibonacci sphere lattice of ``n`` unit directions."""
    if n < 1:
        raise ValueError("need at least one direction")
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def cross_section_rule() -> tuple[np.ndarray, np.ndarray]:
    """Fixed direction quadrature (nodes, solid-angle weights) for
    cross-section integrals; weights sum to 4 pi."""
    dirs, weights, _ = _sphere_grid(*_CROSS_SECTION_NODES)
    return dirs, weights


def far_values(q: np.ndarray, centers: np.ndarray, kappa0: float, directions: np.ndarray) -> np.ndarray:
    """sum over m of exp(-i k0 xhat.z_m) Q_m for each direction."""
    return np.exp(-1j * kappa0 * (directions @ centers.T)) @ q


def far_field(
    solution: FoldyLaxSystem,
    directions: np.ndarray | None = None,
    source: str = "foldyLax",
) -> FarFieldPattern:
    """Far-field pattern of a solved system on the given (or default
    Fibonacci) direction grid, with cross-section from the fixed product rule."""
    if solution.q is None:
        raise ValueError("system must be solved before field evaluation")
    if directions is None:
        directions = fibonacci_directions()
    directions = np.asarray(directions, dtype=float)
    values = far_values(solution.q, solution.centers, solution.kappa0, directions)
    cs_dirs, cs_weights = cross_section_rule()
    cs_values = far_values(solution.q, solution.centers, solution.kappa0, cs_dirs)
    cross_section = float(np.sum(cs_weights * np.abs(cs_values) ** 2))
    return FarFieldPattern(
        directions=directions,
        theta=solution.theta,
        values=values,
        cross_section=cross_section,
        kappa0=solution.kappa0,
        source=source,
    )
