"""Boundary-integral reference solver for a few well-separated spheres.

Independent oracle for the point-interaction model: the exact transmission
problem is solved with a single-trace boundary-element discretization.  The
exterior field is represented as u_inc + sum_l S^{k0} phi_l and the field
inside sphere s as S^{k_s} psi_s.  Continuity of the field and of the
weighted normal flux across each interface gives, per sphere i,

    (I)   S^{k_i} psi_i - sum_l S^{k0} phi_l           = u_inc
    (II)  (1/2 I + K*^{k_i}) psi_i
          - (rho_i/rho0)(-1/2 I + K*^{k0}) phi_i
          - (rho_i/rho0) sum_{l != i} d/dnu_i S^{k0} phi_l
                                        = (rho_i/rho0) d/dnu_i u_inc

collocated at the product-rule nodes of each sphere.  The flux equation is
stated scaled by rho_i/rho0 so that its rows stay O(1) even at extreme
density contrast; the solution is unchanged.  Self-interaction
blocks use the spectrally exact sphere operators; cross blocks have smooth
kernels and use plain product-rule quadrature, which is why the solver
requires comfortable separation between spheres.

The far field is returned in the same normalization as :mod:`bubbles.fields`
(pattern = 4 pi times the physical one):

    u_far(xhat) = sum_l integral over boundary_l of exp(-i k0 xhat.y) phi_l(y) dsigma(y)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import incident_field
from .foldy_lax import fundamental_solution
from .geometry import Cluster
from .layers import ADJOINT_DOUBLE_LAYER, SINGLE_LAYER, SingularSystemError, assemble_layer
from .linsolve import NumericallySingularError, solve_dense
from .physics import MediumSpec
from .quadrature import SurfaceQuadrature, build_quadrature

__all__ = [
    "BemSolution",
    "OracleDomainError",
    "MAX_SPHERES",
    "bem_far_values",
    "bem_interior_field",
    "bem_solve",
]

MAX_SPHERES = 5
_RESIDUAL_TOL = 1e-8


class OracleDomainError(ValueError):
    """Configuration outside the boundary-element oracle's validated domain."""


@dataclass(frozen=True)
class BemSolution:
    """Solved surface densities of the transmission problem."""

    quads: tuple[SurfaceQuadrature, ...]
    phi: tuple[np.ndarray, ...]
    psi: tuple[np.ndarray, ...]
    kappa0: float
    theta: np.ndarray
    residual: float
    condition_estimate: float

    @property
    def m(self) -> int:
        return len(self.quads)


def _validate(cluster: Cluster) -> None:
    m = len(cluster.bubbles)
    if m == 0:
        raise OracleDomainError("cluster has no bubbles")
    if m > MAX_SPHERES:
        raise OracleDomainError(
            f"boundary-element oracle supports at most {MAX_SPHERES} spheres, got {m}"
        )
    radii = []
    for index, shape in enumerate(cluster.bubbles):
        if shape.kind != "sphere":
            raise OracleDomainError(
                f"bubble {index}: boundary-element oracle requires spheres, got {shape.kind!r}"
            )
        radii.append(shape.scale * shape.radius)
    centers = cluster.centers()
    for i in range(m):
        for l in range(i):
            gap = float(np.linalg.norm(centers[i] - centers[l])) - radii[i] - radii[l]
            if gap < max(radii[i], radii[l]):
                raise OracleDomainError(
                    f"spheres {l} and {i} too close for the oracle quadrature: "
                    f"surface gap {gap:.3g} below max radius {max(radii[i], radii[l]):.3g}"
                )


def _normal_derivative_kernel(x, nu_x, y, kappa: float) -> np.ndarray:
    """nu_x . grad_x Phi_kappa(x, y) for node blocks x (P,3), y (Q,3)."""
    diff = x[:, None, :] - y[None, :, :]
    r = np.linalg.norm(diff, axis=-1)
    phi = np.exp(1j * kappa * r) / (4.0 * math.pi * r)
    radial = (nu_x[:, None, 0] * diff[..., 0] + nu_x[:, None, 1] * diff[..., 1]
              + nu_x[:, None, 2] * diff[..., 2]) / r
    return phi * (1j * kappa - 1.0 / r) * radial


def bem_solve(cluster: Cluster, medium: MediumSpec, order: int = 2, theta=(0.0, 0.0, 1.0)) -> BemSolution:
    """Solve the transmission problem for a plane wave on a sphere cluster."""
    _validate(cluster)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (3,) or abs(np.linalg.norm(theta) - 1.0) > 1e-10:
        raise ValueError("incident direction must be a unit 3-vector")
    m = len(cluster.bubbles)
    if medium.m != m:
        raise ValueError(f"medium lists {medium.m} bubbles, cluster has {m}")
    kappa0 = medium.kappa0
    quads = tuple(build_quadrature(shape, order) for shape in cluster.bubbles)
    counts = [quad.n_nodes for quad in quads]
    offsets = np.concatenate([[0], np.cumsum([2 * n for n in counts])])
    total = int(offsets[-1])

    a = np.zeros((total, total), dtype=complex)
    b = np.zeros(total, dtype=complex)
    ops_s0 = [assemble_layer(quad, SINGLE_LAYER, kappa0) for quad in quads]
    for i, quad_i in enumerate(quads):
        n_i = counts[i]
        row = int(offsets[i])
        kappa_i = medium.kappa_b(i)
        scale_i = medium.per_bubble[i].rho_b / medium.rho0
        s_self = ops_s0[i].matrix * quad_i.weights[None, :]
        s_inner = assemble_layer(quad_i, SINGLE_LAYER, kappa_i).matrix * quad_i.weights[None, :]
        k_outer = (
            assemble_layer(quad_i, ADJOINT_DOUBLE_LAYER, kappa0).matrix
            * quad_i.weights[None, :]
        )
        k_inner = (
            assemble_layer(quad_i, ADJOINT_DOUBLE_LAYER, kappa_i).matrix
            * quad_i.weights[None, :]
        )
        eye = np.eye(n_i)
        # Field-continuity rows, then flux-continuity rows of bubble i.
        a[row:row + n_i, row:row + n_i] = -s_self
        a[row:row + n_i, row + n_i:row + 2 * n_i] = s_inner
        a[row + n_i:row + 2 * n_i, row:row + n_i] = scale_i * (0.5 * eye - k_outer)
        a[row + n_i:row + 2 * n_i, row + n_i:row + 2 * n_i] = 0.5 * eye + k_inner
        for l, quad_l in enumerate(quads):
            if l == i:
                continue
            col = int(offsets[l])
            cross_s = (
                fundamental_solution(kappa0, quad_i.nodes[:, None, :], quad_l.nodes[None, :, :])
                * quad_l.weights[None, :]
            )
            cross_d = (
                _normal_derivative_kernel(quad_i.nodes, quad_i.normals, quad_l.nodes, kappa0)
                * quad_l.weights[None, :]
            )
            a[row:row + n_i, col:col + counts[l]] = -cross_s
            a[row + n_i:row + 2 * n_i, col:col + counts[l]] = -scale_i * cross_d
        ui = incident_field(medium, theta, quad_i.nodes)
        b[row:row + n_i] = ui
        b[row + n_i:row + 2 * n_i] = scale_i * 1j * kappa0 * (quad_i.normals @ theta) * ui

    try:
        result = solve_dense(a, b, tol=_RESIDUAL_TOL)
    except NumericallySingularError as exc:
        raise SingularSystemError(
            f"transmission system solve failed: {exc}", exc.condition_estimate
        ) from exc
    phi = []
    psi = []
    for i in range(m):
        row = int(offsets[i])
        phi.append(result.x[row:row + counts[i]])
        psi.append(result.x[row + counts[i]:row + 2 * counts[i]])
    return BemSolution(
        quads=quads,
        phi=tuple(phi),
        psi=tuple(psi),
        kappa0=kappa0,
        theta=theta,
        residual=result.residual,
        condition_estimate=result.condition_estimate,
    )


def bem_far_values(solution: BemSolution, directions) -> np.ndarray:
    """Far-field pattern samples (engine normalization, see module doc)."""
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    out = np.zeros(len(directions), dtype=complex)
    for quad, phi in zip(solution.quads, solution.phi):
        phase = np.exp(-1j * solution.kappa0 * (directions @ quad.nodes.T))
        out += phase @ (quad.weights * phi)
    return out


def bem_interior_field(solution: BemSolution, index: int, points, medium: MediumSpec) -> np.ndarray:
    """Total field inside sphere ``index`` via its interior representation."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    quad = solution.quads[index]
    kappa_i = medium.kappa_b(index)
    kernel = fundamental_solution(kappa_i, points[:, None, :], quad.nodes[None, :, :])
    return kernel @ (quad.weights * solution.psi[index])
