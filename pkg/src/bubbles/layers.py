"""Boundary layer operators on a single bubble surface.

Discretizes the Helmholtz single layer

    (S^k g)(x)   = integral over the surface of Phi_k(x, y) g(y) dsigma(y)

and the adjoint double layer (K^k)* with kernel d/dnu_x Phi_k(x, y), where
Phi_k(x, y) = exp(ik|x-y|)/(4 pi |x-y|).

Two discretization paths:

* Analytic spheres: the operators are diagonal in spherical harmonics with
  eigenvalues ``i k r^2 j_l(kr) h_l(kr)`` (single layer) and
  ``(i k^2 r^2 / 2)(j_l h_l' + j_l' h_l)(kr)`` (adjoint double layer), so the
  matrix is the harmonic-truncated kernel: a Legendre series in the angle
  between nodes, cut at the degree the product quadrature integrates exactly.
  Applied to resolvable harmonics the discrete operator is exact, which is
  what makes the sphere the verification workhorse.
* Triangle meshes: Nystrom kernel matrix with panel corrections — the panel
  containing the node (and any coplanar touching panel) is integrated by a
  closed-form in-plane polar rule, nearby panels by adaptive 4-way
  subdivision, everything else by point evaluation.

Matrices are "kernel style": applying an operator to surface samples ``g``
computes ``matrix @ (weights * g)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import spherical_jn, spherical_yn

from .linsolve import NumericallySingularError, solve_dense
from .quadrature import _TRI1_BARY, _TRI3_BARY, SurfaceQuadrature

__all__ = [
    "SINGLE_LAYER",
    "ADJOINT_DOUBLE_LAYER",
    "LayerOperator",
    "SingularSystemError",
    "UnsupportedQuadratureError",
    "assemble_layer",
    "apply_layer",
    "solve_single_layer",
    "sphere_mode_eigenvalues",
]

SINGLE_LAYER = "singleLayer"
ADJOINT_DOUBLE_LAYER = "adjointDoubleLayer"

# Off-plane panels closer than NEAR_RATIO panel diameters get subdivision
# treatment; subdivision stops once a child is FAR_RATIO diameters away.
NEAR_RATIO = 2.0
FAR_RATIO = 2.0
MAX_SUBDIVISION_DEPTH = 8


class UnsupportedQuadratureError(ValueError):
    """Layer assembly is not provided for this quadrature kind."""


class SingularSystemError(RuntimeError):
    """Surface solve failed; carries ``condition_estimate``."""

    def __init__(self, message: str, condition_estimate: float):
        super().__init__(message)
        self.condition_estimate = condition_estimate


@dataclass(frozen=True)
class LayerOperator:
    kind: str
    wavenumber: complex
    matrix: np.ndarray
    quad: SurfaceQuadrature

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def sphere_mode_eigenvalues(kind: str, kappa: complex, radius: float, lmax: int) -> np.ndarray:
    """Eigenvalues on spherical harmonics of degree 0..lmax for a sphere of
    the given radius."""
    l = np.arange(lmax + 1)
    if kind == SINGLE_LAYER:
        static = radius / (2.0 * l + 1.0) + 0.0j
    else:
        static = -1.0 / (2.0 * (2.0 * l + 1.0)) + 0.0j
    if kappa == 0:
        return static
    z = kappa * radius
    # Overflow/underflow at high degree is expected and repaired below.
    with np.errstate(invalid="ignore", over="ignore"):
        jl = spherical_jn(l, z)
        jlp = spherical_jn(l, z, derivative=True)
        yl = spherical_yn(l, z)
        ylp = spherical_yn(l, z, derivative=True)
        hl = jl + 1j * yl
        hlp = jlp + 1j * ylp
        if kind == SINGLE_LAYER:
            lam = 1j * kappa * radius**2 * jl * hl
        else:
            lam = 0.5j * kappa**2 * radius**2 * (jl * hlp + jlp * hl)
    # For |kappa| r << 1 and large l, j_l underflows (to subnormals, losing
    # precision, or to an exact zero) while y_l overflows; the static
    # (kappa = 0) eigenvalue is then the correct limit.  j_l only reaches
    # such magnitudes deep in the z << l decay region, never near a true zero.
    bad = ~np.isfinite(lam) | (np.abs(jl) < 1e-290)
    if np.any(bad):
        lam[bad] = static[bad]
    return lam


def _assemble_sphere(quad: SurfaceQuadrature, kind: str, kappa: complex) -> np.ndarray:
    meta = quad.meta
    r = meta["radius"]
    dirs = meta["directions"]
    # The kernel keeps degrees 0..n_theta and lumps the tail onto the
    # identity with coefficient mu = lambda_{n_theta+1}.  Kernel degree l
    # times density degree l' <= n_theta - 1 stays within the product rule's
    # exactness window, so every resolvable harmonic sees its exact
    # eigenvalue; unresolvable components get the tail-scale response mu
    # instead of 0, which for the zero-wavenumber single layer (mu > 0) makes
    # the matrix positive definite outright.
    lmax = meta["n_theta"]
    lam = sphere_mode_eigenvalues(kind, kappa, r, lmax + 1)
    mu = lam[lmax + 1]
    coeff = (lam[: lmax + 1] - mu) * (2.0 * np.arange(lmax + 1) + 1.0) / (4.0 * math.pi * r * r)
    cosg = np.clip(dirs @ dirs.T, -1.0, 1.0)
    matrix = np.asarray(np.polynomial.legendre.legval(cosg, coeff), dtype=complex)
    matrix[np.diag_indices_from(matrix)] += mu / quad.weights
    return matrix


# ---------------------------------------------------------------------------
# Mesh path
# ---------------------------------------------------------------------------


def _phi_kernel(kappa: complex, r: np.ndarray) -> np.ndarray:
    return np.exp(1j * kappa * r) / (4.0 * math.pi * r)


def _kstar_kernel(kappa: complex, dx: np.ndarray, r: np.ndarray, nu: np.ndarray) -> np.ndarray:
    """Adjoint double-layer kernel for observation offsets dx = x - y with
    |dx| = r and observation normal nu (broadcast against dx)."""
    proj = np.einsum("...i,...i->...", dx, nu)
    return proj * (1j * kappa * r - 1.0) * np.exp(1j * kappa * r) / (4.0 * math.pi * r**3)


def _triangle_rule(tri: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Interior 3-point degree-2 rule on triangles ``tri`` of shape (..., 3, 3).

    Returns points (..., 3, 3) and weights (..., 3)."""
    bary = np.array(
        [
            [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
            [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
            [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
        ]
    )
    pts = np.einsum("kv,...vi->...ki", bary, tri)
    area = 0.5 * np.linalg.norm(
        np.cross(tri[..., 1, :] - tri[..., 0, :], tri[..., 2, :] - tri[..., 0, :]), axis=-1
    )
    w = np.repeat(area[..., None] / 3.0, 3, axis=-1)
    return pts, w


def _inplane_newton_integral(x: np.ndarray, tri: np.ndarray, normal: np.ndarray) -> np.ndarray:
    """Closed-form integral of 1/|x-y| over flat triangles whose plane
    contains x.  Batched: x (Q,3), tri (Q,3,3), normal (Q,3)."""
    total = np.zeros(len(x))
    for k in range(3):
        a = tri[:, k, :] - x
        b = tri[:, (k + 1) % 3, :] - x
        seg = b - a
        seglen = np.linalg.norm(seg, axis=1)
        ok = seglen > 0
        u = np.zeros_like(seg)
        u[ok] = seg[ok] / seglen[ok, None]
        # Signed height of x over the edge line: twice the signed area of
        # (x, a, b) divided by the edge length.
        signed_h = np.einsum("qi,qi->q", np.cross(a, b), normal)
        signed_h[ok] /= seglen[ok]
        ra = np.linalg.norm(a, axis=1)
        rb = np.linalg.norm(b, axis=1)
        ta = np.einsum("qi,qi->q", a, u)
        tb = np.einsum("qi,qi->q", b, u)
        num = rb + tb
        den = ra + ta
        good = ok & (np.abs(signed_h) > 1e-14 * seglen) & (num > 0) & (den > 0)
        contrib = np.zeros(len(x))
        contrib[good] = signed_h[good] * np.log(num[good] / den[good])
        total += contrib
    return total


def _split4(tri: np.ndarray) -> np.ndarray:
    """4-way midpoint split: (..., 3, 3) -> (..., 4, 3, 3) flattened on axis 0."""
    m01 = 0.5 * (tri[:, 0] + tri[:, 1])
    m12 = 0.5 * (tri[:, 1] + tri[:, 2])
    m20 = 0.5 * (tri[:, 2] + tri[:, 0])
    children = np.empty((len(tri), 4, 3, 3))
    children[:, 0] = np.stack([tri[:, 0], m01, m20], axis=1)
    children[:, 1] = np.stack([tri[:, 1], m12, m01], axis=1)
    children[:, 2] = np.stack([tri[:, 2], m20, m12], axis=1)
    children[:, 3] = np.stack([m01, m12, m20], axis=1)
    return children


def _node_shape_functions(
    pts: np.ndarray, panel: np.ndarray, bary: np.ndarray
) -> np.ndarray:
    """Values at ``pts`` (Q, K, 3) of the affine functions on flat panels
    ``panel`` (Q, 3, 3) that are 1 at one of the panel's rule nodes
    (barycentric rows of ``bary``) and 0 at the others.  Output (Q, K, n)."""
    n_rule = len(bary)
    if n_rule == 1:
        return np.ones(pts.shape[:-1] + (1,))
    # Barycentric coordinates (t1, t2) of pts with respect to the panel via
    # the in-plane Gram system of the edge vectors.
    e1 = panel[:, 1, :] - panel[:, 0, :]
    e2 = panel[:, 2, :] - panel[:, 0, :]
    d = pts - panel[:, None, 0, :]
    g11 = np.einsum("qi,qi->q", e1, e1)[:, None]
    g12 = np.einsum("qi,qi->q", e1, e2)[:, None]
    g22 = np.einsum("qi,qi->q", e2, e2)[:, None]
    b1 = np.einsum("qki,qi->qk", d, e1)
    b2 = np.einsum("qki,qi->qk", d, e2)
    det = g11 * g22 - g12 * g12
    t1 = (g22 * b1 - g12 * b2) / det
    t2 = (g11 * b2 - g12 * b1) / det
    # Affine map from (1, t1, t2) to the nodal basis: columns of the inverse
    # of the rule-node coordinate matrix.
    a = np.column_stack([np.ones(n_rule), bary[:, 1], bary[:, 2]])
    ainv = np.linalg.inv(a)
    ones = np.ones_like(t1)
    return np.stack(
        [ainv[0, k] * ones + ainv[1, k] * t1 + ainv[2, k] * t2 for k in range(n_rule)],
        axis=-1,
    )


def _inplane_moment_integrals(
    x: np.ndarray,
    tri: np.ndarray,
    normal: np.ndarray,
    kappa: complex,
    bary: np.ndarray,
    diam: np.ndarray,
) -> np.ndarray:
    """Single-layer moment integrals over flat panels whose plane contains x.

    The Newton part splits as lam_k(x) * I0 plus a bounded remainder with
    integrand (lam_k(y) - lam_k(x)) / (4 pi |x-y|); the remainder and the
    smooth wavenumber part are integrated by a twice-subdivided panel rule.
    Returns (Q, n_rule_nodes)."""
    i0 = _inplane_newton_integral(x, tri, normal) / (4.0 * math.pi)
    lam_x = _node_shape_functions(x[:, None, :], tri, bary)[:, 0, :]
    out = lam_x * i0[:, None] + 0.0j
    sub = _split4(_split4(tri).reshape(-1, 3, 3)).reshape(len(tri), 16, 3, 3)
    pts, w = _triangle_rule(sub)
    pts = pts.reshape(len(tri), 48, 3)
    w = w.reshape(len(tri), 48)
    r = np.linalg.norm(x[:, None, :] - pts, axis=-1)
    tiny = r < 1e-12 * diam[:, None]
    safe = np.where(tiny, 1.0, r)
    lam_p = _node_shape_functions(pts, tri, bary)
    newton_rem = (lam_p - lam_x[:, None, :]) / (4.0 * math.pi * safe[..., None])
    newton_rem[tiny] = 0.0
    out += np.einsum("qk,qkn->qn", w, newton_rem)
    if kappa != 0:
        smooth = (np.exp(1j * kappa * safe) - 1.0) / (4.0 * math.pi * safe)
        smooth[tiny] = 1j * kappa / (4.0 * math.pi)
        out += np.einsum("qk,qkn->qn", w * smooth, lam_p)
    return out


def _near_moment_integrals(
    x: np.ndarray,
    tri: np.ndarray,
    kind: str,
    kappa: complex,
    nu: np.ndarray | None,
    bary: np.ndarray,
) -> np.ndarray:
    """Adaptive panel moment integrals for off-plane near pairs.

    For each pair (observation point ``x[q]``, flat panel ``tri[q]``) returns
    the integrals of kernel times the panel's nodal affine basis, shape
    (Q, n_rule_nodes) — so the correction reproduces affine densities.
    """
    q0 = len(x)
    n_rule = len(bary)
    out = np.zeros((q0, n_rule), dtype=complex)
    idx = np.arange(q0)
    cur = tri
    for depth in range(MAX_SUBDIVISION_DEPTH + 1):
        if len(idx) == 0:
            break
        cen = cur.mean(axis=1)
        edges = np.linalg.norm(np.roll(cur, -1, axis=1) - cur, axis=2)
        diam = edges.max(axis=1)
        dist = np.linalg.norm(x[idx] - cen, axis=1)
        done = (dist >= FAR_RATIO * diam) | (depth == MAX_SUBDIVISION_DEPTH)
        if np.any(done):
            sel = idx[done]
            tsel = cur[done]
            pts, w = _triangle_rule(tsel)
            d = x[sel][:, None, :] - pts
            r = np.linalg.norm(d, axis=-1)
            if kind == SINGLE_LAYER:
                vals = _phi_kernel(kappa, r)
            else:
                vals = _kstar_kernel(kappa, d, r, nu[sel][:, None, :])
            lam = _node_shape_functions(pts, tri[sel], bary)
            np.add.at(out, sel, np.einsum("qk,qk,qkn->qn", vals, w, lam))
        keep = ~done
        idx = np.repeat(idx[keep], 4)
        cur = _split4(cur[keep]).reshape(-1, 3, 3)
    return out


def _assemble_mesh(quad: SurfaceQuadrature, kind: str, kappa: complex) -> np.ndarray:
    meta = quad.meta
    scale = quad.shape.scale
    kref = kappa * scale
    x = quad.ref_nodes
    w_ref = quad.ref_weights
    normals = quad.normals
    verts, tris = meta["vertices"], meta["triangles"]
    panel_of_node = meta["panel_of_node"]
    npp = meta["nodes_per_panel"]
    n = len(x)
    p = len(tris)
    tri = verts[tris]
    centroids = tri.mean(axis=1)
    edges = np.linalg.norm(np.roll(tri, -1, axis=1) - tri, axis=2)
    diam = edges.max(axis=1)
    panel_normals = meta["panel_normals"]

    # Far part: plain kernel values between distinct nodes.  The (N,N,3)
    # displacement tensor is avoided: only distances and normal projections
    # are formed.
    from scipy.spatial.distance import cdist

    r = cdist(x, x)
    np.fill_diagonal(r, 1.0)
    if kind == SINGLE_LAYER:
        matrix = _phi_kernel(kref, r)
    else:
        proj = np.einsum("ij,ij->i", x, normals)[:, None] - normals @ x.T
        matrix = proj * (1j * kref * r - 1.0) * np.exp(1j * kref * r) / (4.0 * math.pi * r**3)
    np.fill_diagonal(matrix, 0.0)

    # Near set: panels sharing a vertex with the node's panel, plus panels
    # within NEAR_RATIO diameters of the node.
    vert_panels: dict[int, list[int]] = {}
    for pi, t in enumerate(tris):
        for v in t:
            vert_panels.setdefault(int(v), []).append(pi)
    adjacency = [set() for _ in range(p)]
    for pi, t in enumerate(tris):
        for v in t:
            adjacency[pi].update(vert_panels[int(v)])
    node_panel_dist = np.linalg.norm(x[:, None, :] - centroids[None, :, :], axis=-1)
    near_mask = node_panel_dist <= NEAR_RATIO * diam[None, :]
    pairs_i: list[int] = []
    pairs_p: list[int] = []
    for i in range(n):
        near = set(np.nonzero(near_mask[i])[0].tolist())
        near.update(adjacency[panel_of_node[i]])
        for pi in sorted(near):
            pairs_i.append(i)
            pairs_p.append(pi)
    pairs_i_arr = np.asarray(pairs_i, dtype=int)
    pairs_p_arr = np.asarray(pairs_p, dtype=int)

    # Split pairs into in-plane (node lies in the panel plane) and off-plane.
    h = np.abs(
        np.einsum(
            "qi,qi->q",
            x[pairs_i_arr] - tri[pairs_p_arr, 0, :],
            panel_normals[pairs_p_arr],
        )
    )
    inplane = h <= 1e-9 * diam[pairs_p_arr]
    bary = _TRI1_BARY if npp == 1 else _TRI3_BARY
    integrals = np.zeros((len(pairs_i_arr), npp), dtype=complex)
    if np.any(inplane):
        qi = pairs_i_arr[inplane]
        qp = pairs_p_arr[inplane]
        if kind == SINGLE_LAYER:
            integrals[inplane] = _inplane_moment_integrals(
                x[qi], tri[qp], panel_normals[qp], kref, bary, diam[qp]
            )
        # adjoint double layer: (x - y) . nu_x vanishes identically in-plane.
    off = ~inplane
    if np.any(off):
        qi = pairs_i_arr[off]
        qp = pairs_p_arr[off]
        integrals[off] = _near_moment_integrals(
            x[qi],
            tri[qp],
            kind,
            kref,
            normals[qi] if kind == ADJOINT_DOUBLE_LAYER else None,
            bary,
        )

    # Write corrections: column p*npp + k receives the integral of kernel
    # times the panel's k-th nodal affine function, so near panels integrate
    # affine densities consistently with the rest of the rule.
    cols = (pairs_p_arr[:, None] * npp + np.arange(npp)[None, :]).ravel()
    rows = np.repeat(pairs_i_arr, npp)
    matrix[rows, cols] = integrals.ravel() / w_ref[cols]

    if kind == SINGLE_LAYER:
        matrix = 0.5 * (matrix + matrix.T)
        return matrix / scale
    return matrix / scale**2


def assemble_layer(quad: SurfaceQuadrature, kind: str, kappa: complex) -> LayerOperator:
    """Dense kernel-style matrix of the requested layer operator."""
    if kind not in (SINGLE_LAYER, ADJOINT_DOUBLE_LAYER):
        raise ValueError(f"unknown operator kind {kind!r}")
    if not np.isfinite(complex(kappa)):
        raise ValueError("wavenumber must be finite")
    qkind = quad.meta.get("kind")
    if qkind == "sphere":
        matrix = _assemble_sphere(quad, kind, complex(kappa))
    elif qkind == "mesh":
        matrix = _assemble_mesh(quad, kind, complex(kappa))
    else:
        raise UnsupportedQuadratureError(
            "layer operators are assembled on sphere or mesh quadratures; "
            "triangulate ellipsoids first"
        )
    return LayerOperator(kind=kind, wavenumber=complex(kappa), matrix=matrix, quad=quad)


def apply_layer(op: LayerOperator, values: np.ndarray) -> np.ndarray:
    """Apply the operator to surface samples: ``matrix @ (weights * values)``."""
    return op.matrix @ (op.quad.weights * np.asarray(values))


def solve_single_layer(op: LayerOperator, rhs: np.ndarray) -> np.ndarray:
    """Density ``g`` with ``S g = rhs`` to relative residual 1e-8."""
    if op.kind != SINGLE_LAYER:
        raise ValueError("solve_single_layer requires a single-layer operator")
    a = op.matrix * op.quad.weights[None, :]
    try:
        result = solve_dense(a, np.asarray(rhs, dtype=complex), tol=1e-8)
    except NumericallySingularError as exc:
        raise SingularSystemError(
            f"single-layer solve failed: {exc}", exc.condition_estimate
        ) from exc
    return result.x
