"""Per-bubble shape functionals feeding the scattering coefficients.

Everything here derives from the Newton potential of the bubble body,

    N(s) = integral over D of |s - y|^(-1) dy,   s on the boundary:

* ``A(s) = -2 N(s)`` — a strictly negative boundary function;
* ``a_hat`` — its area-weighted boundary average;
* ``cap`` — electrostatic capacitance, the total charge of the equilibrium
  density solving ``S0 g = 1``;
* ``volume`` — divergence-theorem surface formula ``(1/3) sum w_i x_i.nu_i``.

Evaluation routes by quadrature kind:

* sphere: closed forms (uniform-ball potential, equilibrium density 1/r);
* ellipsoid: closed-form interior potential via Carlson symmetric elliptic
  integrals; capacitance via a single-layer solve on a matched triangulation
  (layer operators are not assembled on smooth ellipsoid quadratures);
* mesh: the Newton potential reduced exactly to boundary integrals — the
  divergence theorem applied to the field (y-s)/(2|y-s|) gives
  ``N(s) = sum over panels of h_F(s)/2 * integral over F of dsigma/|s-y|``
  with ``h_F(s)`` the signed height of the panel plane over ``s`` — and the
  panel integrals evaluated by adaptive subdivision quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import elliprd, elliprf

from .geometry import BubbleShape, icosphere
from .layers import SINGLE_LAYER, _near_moment_integrals, assemble_layer, solve_single_layer
from .quadrature import _TRI1_BARY, SurfaceQuadrature, build_quadrature

__all__ = [
    "ShapeFunctionals",
    "compute_A_function",
    "compute_a_hat",
    "compute_capacitance",
    "compute_functionals",
    "compute_volume",
    "ellipsoid_newton_potential",
]

# Pair batches for the mesh Newton-potential reduction; bounds the transient
# arrays of the adaptive panel quadrature.
_PAIR_CHUNK = 200_000


@dataclass(frozen=True)
class ShapeFunctionals:
    """Scalar shape data of one bubble (physical units)."""

    a_hat: float
    cap: float
    volume: float
    surface_area: float
    centroid_offset: np.ndarray


def ellipsoid_newton_potential(points: np.ndarray, semi_axes: np.ndarray) -> np.ndarray:
    """Newton potential of a homogeneous solid ellipsoid, at interior or
    boundary ``points`` (relative to the ellipsoid center).

    The classical closed form: with semi-axes (A, B, C),

        N(x) = pi A B C [ 2 R_F(A^2,B^2,C^2)
                          - (2/3)(x1^2 R_D(B^2,C^2,A^2)
                                  + x2^2 R_D(A^2,C^2,B^2)
                                  + x3^2 R_D(A^2,B^2,C^2)) ]

    in terms of Carlson's symmetric integrals R_F and R_D.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a2, b2, c2 = (float(v) ** 2 for v in semi_axes)
    rf = elliprf(a2, b2, c2)
    rd = (elliprd(b2, c2, a2), elliprd(a2, c2, b2), elliprd(a2, b2, c2))
    quad_term = sum(pts[:, i] ** 2 * rd[i] for i in range(3))
    vol_pref = math.pi * float(np.prod(np.asarray(semi_axes, dtype=float)))
    out = vol_pref * (2.0 * rf - (2.0 / 3.0) * quad_term)
    return out if np.asarray(points).ndim > 1 else out[0]


def _mesh_a_values(quad: SurfaceQuadrature) -> np.ndarray:
    """A at every node of a mesh quadrature, by the boundary reduction of the
    Newton potential (computed in reference coordinates, scaled at the end)."""
    verts = quad.meta["vertices"]
    tris = quad.meta["triangles"]
    tri = verts[tris]
    panel_normals = quad.meta["panel_normals"]
    edges = np.linalg.norm(np.roll(tri, -1, axis=1) - tri, axis=2)
    diam = edges.max(axis=1)
    x = quad.ref_nodes
    # Signed height of each panel plane over each node; coplanar pairs (the
    # node's own panel and flat neighbors) contribute h * O(log) -> 0 and are
    # skipped outright.
    h = np.einsum("pi,pi->p", tri[:, 0, :], panel_normals)[None, :] - x @ panel_normals.T
    keep_rows, keep_cols = np.nonzero(np.abs(h) > 1e-9 * diam[None, :])
    face_int = np.zeros_like(h)
    for start in range(0, len(keep_rows), _PAIR_CHUNK):
        qi = keep_rows[start : start + _PAIR_CHUNK]
        qp = keep_cols[start : start + _PAIR_CHUNK]
        vals = _near_moment_integrals(x[qi], tri[qp], SINGLE_LAYER, 0.0, None, _TRI1_BARY)
        face_int[qi, qp] = 4.0 * math.pi * vals[:, 0].real
    newton = 0.5 * np.einsum("np,np->n", h, face_int)
    return -2.0 * newton * quad.shape.scale**2


def _a_values(quad: SurfaceQuadrature) -> np.ndarray:
    kind = quad.meta.get("kind")
    if kind == "sphere":
        r = quad.meta["radius"]
        return np.full(quad.n_nodes, -(8.0 * math.pi / 3.0) * r * r)
    if kind == "ellipsoid":
        rel = quad.nodes - quad.shape.center
        return -2.0 * ellipsoid_newton_potential(rel, quad.meta["semi_axes"])
    return _mesh_a_values(quad)


def compute_A_function(quad: SurfaceQuadrature, s: int | np.ndarray | None = None):
    """Boundary function ``A(s) = -2 * (Newton potential of the body at s)``.

    ``s`` selects a quadrature node: an integer index, or a point that must
    coincide with a node.  With ``s=None`` the values at all nodes are
    returned as an array.
    """
    values = _a_values(quad)
    if s is None:
        return values
    if np.isscalar(s) or np.asarray(s).ndim == 0:
        return float(values[int(s)])
    point = np.asarray(s, dtype=float)
    dist = np.linalg.norm(quad.nodes - point[None, :], axis=1)
    idx = int(np.argmin(dist))
    if dist[idx] > 1e-9 * (1.0 + np.linalg.norm(point)):
        raise ValueError("A is evaluated at quadrature nodes; no node matches the given point")
    return float(values[idx])


def compute_a_hat(quad: SurfaceQuadrature) -> float:
    """Area-weighted boundary average of A; strictly negative."""
    values = _a_values(quad)
    return float(np.sum(quad.weights * values) / np.sum(quad.weights))


def _matched_triangulation(quad: SurfaceQuadrature) -> SurfaceQuadrature:
    """Mesh quadrature on an icosphere-based triangulation inscribed in the
    ellipsoid carried by ``quad`` (used for the capacitance solve)."""
    shape = quad.shape
    subdivisions = 2 if quad.order == 1 else 3
    verts, tris = icosphere(subdivisions, 1.0)
    verts = verts / np.linalg.norm(verts, axis=1, keepdims=True)
    mesh_shape = BubbleShape(
        kind="mesh",
        center=shape.center,
        scale=shape.scale,
        vertices=verts * np.asarray(shape.semi_axes, dtype=float)[None, :],
        triangles=tris,
    )
    return build_quadrature(mesh_shape, 1, quad.bubble_ref)


def compute_capacitance(quad: SurfaceQuadrature) -> float:
    """Total charge of the equilibrium density: ``sum w * g`` with ``S0 g = 1``."""
    if quad.meta.get("kind") == "ellipsoid":
        quad = _matched_triangulation(quad)
    op = assemble_layer(quad, SINGLE_LAYER, 0.0)
    g = solve_single_layer(op, np.ones(quad.n_nodes))
    return float(np.real(np.sum(quad.weights * g)))


def compute_volume(quad: SurfaceQuadrature) -> float:
    """Enclosed volume via the divergence theorem: ``(1/3) sum w_i x_i.nu_i``."""
    return float(np.sum(quad.weights * np.einsum("ni,ni->n", quad.nodes, quad.normals)) / 3.0)


def compute_functionals(quad: SurfaceQuadrature) -> ShapeFunctionals:
    """All scalar functionals of one bubble from a single quadrature."""
    area = float(np.sum(quad.weights))
    centroid = quad.weights @ quad.nodes / area
    return ShapeFunctionals(
        a_hat=compute_a_hat(quad),
        cap=compute_capacitance(quad),
        volume=compute_volume(quad),
        surface_area=area,
        centroid_offset=centroid - quad.shape.center,
    )
