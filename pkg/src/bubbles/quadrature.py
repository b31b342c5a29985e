"""Surface quadratures on bubble boundaries.

Analytic spheres and ellipsoids get a product rule — Gauss–Legendre in
``u = cos(theta)`` times an equispaced trapezoid rule in ``phi`` — which is
spectrally accurate for smooth integrands.  Triangle meshes get panel rules:
the centroid rule at order 1 and the interior symmetric 3-point (degree-2)
rule at higher orders, with the mesh subdivided flat (children stay in the
parent plane, so the discretized polyhedron is unchanged) as the order grows.

Node counts increase strictly with the resolution order for every shape kind.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import BubbleShape

__all__ = ["SurfaceQuadrature", "build_quadrature", "winding_number"]

# Sphere/ellipsoid grid sizes per resolution order.
THETA_NODES_PER_ORDER = 6


@dataclass(frozen=True)
class SurfaceQuadrature:
    """Nodes, area weights, and unit outward normals on one bubble surface.

    ``nodes`` are world coordinates; ``ref_nodes`` are the same nodes in the
    bubble's centered reference frame (``nodes = center + scale*ref_nodes``
    up to rounding), kept because kernel evaluations between nearby nodes are
    far better conditioned there.  ``meta`` carries the structure the layer
    assembly dispatches on (grid sizes for product rules, panel arrays for
    meshes).
    """

    nodes: np.ndarray
    weights: np.ndarray
    normals: np.ndarray
    bubble_ref: int
    shape: BubbleShape
    order: int
    ref_nodes: np.ndarray
    ref_weights: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.weights)

    def total_area(self) -> float:
        return float(np.sum(self.weights))


def _sphere_grid(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit-sphere directions and solid-angle weights of the product rule.

    Returns ``(directions (N,3), weights (N,), u_nodes)`` with
    ``sum(weights) = 4*pi`` exactly.
    """
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * np.pi / n_phi
    su = np.sqrt(1.0 - u**2)
    dirs = np.empty((n_theta, n_phi, 3))
    dirs[..., 0] = su[:, None] * np.cos(phi)[None, :]
    dirs[..., 1] = su[:, None] * np.sin(phi)[None, :]
    dirs[..., 2] = u[:, None]
    w = np.broadcast_to((wu * wphi)[:, None], (n_theta, n_phi))
    return dirs.reshape(-1, 3), w.reshape(-1).copy(), u


def _build_sphere(shape: BubbleShape, order: int, bubble_ref: int) -> SurfaceQuadrature:
    n_theta = THETA_NODES_PER_ORDER * order
    n_phi = 2 * n_theta
    dirs, w_solid, _ = _sphere_grid(n_theta, n_phi)
    r = shape.radius  # reference radius; physical radius is r*scale
    ref_nodes = r * dirs
    ref_weights = r * r * w_solid
    nodes = shape.center + shape.scale * ref_nodes
    weights = shape.scale**2 * ref_weights
    return SurfaceQuadrature(
        nodes=nodes,
        weights=weights,
        normals=dirs.copy(),
        bubble_ref=bubble_ref,
        shape=shape,
        order=order,
        ref_nodes=ref_nodes,
        ref_weights=ref_weights,
        meta={
            "kind": "sphere",
            "n_theta": n_theta,
            "n_phi": n_phi,
            "radius": r * shape.scale,
            "directions": dirs,
        },
    )


def _build_ellipsoid(shape: BubbleShape, order: int, bubble_ref: int) -> SurfaceQuadrature:
    n_theta = THETA_NODES_PER_ORDER * order
    n_phi = 2 * n_theta
    dirs, w_solid, _ = _sphere_grid(n_theta, n_phi)
    A, B, C = shape.semi_axes
    ref_nodes = dirs * np.array([A, B, C])
    # dsigma = |x_u x x_phi| du dphi with |x_u x x_phi| =
    # sqrt(B^2C^2 sin^2 th cos^2 ph + A^2C^2 sin^2 th sin^2 ph + A^2B^2 cos^2 th),
    # while w_solid already carries du dphi.
    grad = ref_nodes / np.array([A * A, B * B, C * C])
    jac = np.linalg.norm(grad, axis=1) * (A * B * C)
    ref_weights = jac * w_solid
    normals = grad / np.linalg.norm(grad, axis=1, keepdims=True)
    nodes = shape.center + shape.scale * ref_nodes
    weights = shape.scale**2 * ref_weights
    return SurfaceQuadrature(
        nodes=nodes,
        weights=weights,
        normals=normals,
        bubble_ref=bubble_ref,
        shape=shape,
        order=order,
        ref_nodes=ref_nodes,
        ref_weights=ref_weights,
        meta={
            "kind": "ellipsoid",
            "n_theta": n_theta,
            "n_phi": n_phi,
            "semi_axes": shape.semi_axes * shape.scale,
        },
    )


def _subdivide_flat(vertices: np.ndarray, triangles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One 4-way midpoint split of every triangle, in the parent planes."""
    vlist = list(map(tuple, vertices))
    cache: dict[tuple[int, int], int] = {}

    def midpoint(i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        if key not in cache:
            p = 0.5 * (np.asarray(vlist[i]) + np.asarray(vlist[j]))
            vlist.append(tuple(p))
            cache[key] = len(vlist) - 1
        return cache[key]

    out = []
    for a, b, c in triangles:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        out.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
    return np.asarray(vlist, dtype=float), np.asarray(out, dtype=int)


# Barycentric coordinates of the interior symmetric degree-2 rule.
_TRI3_BARY = np.array(
    [
        [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
        [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
    ]
)
_TRI1_BARY = np.array([[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]])


def _build_mesh(shape: BubbleShape, order: int, bubble_ref: int) -> SurfaceQuadrature:
    verts, tris = shape.vertices, shape.triangles
    for _ in range(order - 1):
        verts, tris = _subdivide_flat(verts, tris)
    p0, p1, p2 = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
    cross = np.cross(p1 - p0, p2 - p0)
    areas = 0.5 * np.linalg.norm(cross, axis=1)
    panel_normals = cross / (2.0 * areas)[:, None]
    bary = _TRI1_BARY if order == 1 else _TRI3_BARY
    n_per_panel = len(bary)
    # nodes[panel, rulepoint] = sum_k bary_k * vertex_k
    pts = (
        bary[None, :, 0, None] * p0[:, None, :]
        + bary[None, :, 1, None] * p1[:, None, :]
        + bary[None, :, 2, None] * p2[:, None, :]
    )
    ref_nodes = pts.reshape(-1, 3)
    ref_weights = np.repeat(areas / n_per_panel, n_per_panel)
    normals = np.repeat(panel_normals, n_per_panel, axis=0)
    panel_of_node = np.repeat(np.arange(len(tris)), n_per_panel)
    nodes = shape.center + shape.scale * ref_nodes
    weights = shape.scale**2 * ref_weights
    return SurfaceQuadrature(
        nodes=nodes,
        weights=weights,
        normals=normals,
        bubble_ref=bubble_ref,
        shape=shape,
        order=order,
        ref_nodes=ref_nodes,
        ref_weights=ref_weights,
        meta={
            "kind": "mesh",
            "vertices": verts,
            "triangles": tris,
            "areas": areas,
            "panel_normals": panel_normals,
            "panel_of_node": panel_of_node,
            "nodes_per_panel": n_per_panel,
        },
    )


def build_quadrature(shape: BubbleShape, order: int, bubble_ref: int = -1) -> SurfaceQuadrature:
    """Quadrature on the bubble surface at the given resolution order (>= 1).

    Node count increases strictly with ``order``.  Weights sum to the surface
    area; normals are unit outward.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if shape.kind == "sphere":
        return _build_sphere(shape, order, bubble_ref)
    if shape.kind == "ellipsoid":
        return _build_ellipsoid(shape, order, bubble_ref)
    return _build_mesh(shape, order, bubble_ref)


def winding_number(shape: BubbleShape, points: np.ndarray) -> np.ndarray:
    """Generalized winding number of the bubble surface around each point:
    close to 1 inside, 0 outside.  Used by containment checks."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if shape.kind == "sphere":
        r = np.linalg.norm(points - shape.center, axis=1)
        return (r < shape.radius * shape.scale).astype(float)
    if shape.kind == "ellipsoid":
        q = (points - shape.center) / (shape.semi_axes * shape.scale)
        return (np.linalg.norm(q, axis=1) < 1.0).astype(float)
    verts = shape.physical_vertices()
    tris = shape.triangles
    # Van Oosterom–Strackee signed solid angle, summed over triangles.
    total = np.zeros(len(points))
    a = verts[tris[:, 0]][None, :, :] - points[:, None, :]
    b = verts[tris[:, 1]][None, :, :] - points[:, None, :]
    c = verts[tris[:, 2]][None, :, :] - points[:, None, :]
    la = np.linalg.norm(a, axis=2)
    lb = np.linalg.norm(b, axis=2)
    lc = np.linalg.norm(c, axis=2)
    num = np.einsum("pij,pij->pi", a, np.cross(b, c))
    den = (
        la * lb * lc
        + np.einsum("pij,pij->pi", a, b) * lc
        + np.einsum("pij,pij->pi", b, c) * la
        + np.einsum("pij,pij->pi", a, c) * lb
    )
    total = np.sum(2.0 * np.arctan2(num, den), axis=1)
    return total / (4.0 * np.pi)
