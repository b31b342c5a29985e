"""Bubble shapes, cluster generation, and pairwise-distance statistics.

A cluster is a collection of small bubbles ``D_m`` of maximum diameter ``a``
placed in a domain box (default the unit cube).  The placement follows a
subcube construction: the box is tiled by cubes of side ``a/2 + d_t**alpha``
with ``alpha = s / (3 t)`` (``alpha := 1`` when ``t = s = 0``), each subcube
receives bubbles according to an occupancy rule, and positions are jittered
inside a margin that guarantees the pairwise *surface* distance stays at or
above ``d_t``.  The realized count obeys ``M <= m_max * a**-s`` and the
realized minimum distance lands in ``[d_min * a**t, d_max * a**t]``; both are
verified after generation and violations raise :class:`InfeasibleRegimeError`
naming the broken inequality.

Anisotropic (non-cubic) boxes are accepted and tiled the same way, but no
uniformity claims are made about the distance-sum constants in that case.

Everything here is deterministic for a fixed seed and free of global state.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BubbleShape",
    "ClusterSpec",
    "Cluster",
    "InfeasibleRegimeError",
    "MeshError",
    "generate_cluster",
    "distance_sum",
    "counting_bound",
    "cluster_stats",
    "icosphere",
    "random_star_mesh",
    "validate_mesh",
    "read_mesh",
    "write_mesh",
    "cluster_to_json",
    "cluster_from_json",
]

# Upper bound on rejection-sampling retries before the requested regime is
# declared infeasible.
REJECTION_CAP = 10_000


class InfeasibleRegimeError(ValueError):
    """Requested cluster regime cannot be realized; message names the violated
    inequality."""


class MeshError(ValueError):
    """Triangle surface mesh fails a closedness/orientation/degeneracy check."""


# ---------------------------------------------------------------------------
# Shapes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BubbleShape:
    """One bubble: a reference shape scaled by ``scale`` and centered at ``center``.

    kind
        ``"sphere"`` (reference radius ``radius``), ``"ellipsoid"`` (reference
        ``semi_axes``), or ``"mesh"`` (reference ``vertices``/``triangles``,
        vertices expressed relative to the reference center).
    center
        Placement point ``z_m``.
    scale
        Uniform scaling applied to the reference shape.
    """

    kind: str
    center: np.ndarray
    scale: float = 1.0
    radius: float | None = None
    semi_axes: np.ndarray | None = None
    vertices: np.ndarray | None = None
    triangles: np.ndarray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.kind == "sphere":
            if self.radius is None or self.radius <= 0:
                raise ValueError("sphere requires a positive radius")
        elif self.kind == "ellipsoid":
            axes = np.asarray(self.semi_axes, dtype=float)
            if axes.shape != (3,) or np.any(axes <= 0):
                raise ValueError("ellipsoid requires three positive semi-axes")
            object.__setattr__(self, "semi_axes", axes)
        elif self.kind == "mesh":
            verts = np.asarray(self.vertices, dtype=float)
            tris = np.asarray(self.triangles, dtype=int)
            validate_mesh(verts, tris)
            object.__setattr__(self, "vertices", verts)
            object.__setattr__(self, "triangles", tris)
        else:
            raise ValueError(f"unknown shape kind: {self.kind!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    # -- geometric queries -------------------------------------------------

    def bounding_radius(self) -> float:
        """Radius of the smallest origin-centered ball known to contain the
        scaled reference shape (exact for spheres and ellipsoids)."""
        if self.kind == "sphere":
            return self.radius * self.scale
        if self.kind == "ellipsoid":
            return float(np.max(self.semi_axes)) * self.scale
        return float(np.max(np.linalg.norm(self.vertices, axis=1))) * self.scale

    def inner_radius(self) -> float:
        """Radius of a ball centered at ``center`` contained in the shape
        (exact for spheres/ellipsoids, vertex-based lower bound for meshes)."""
        if self.kind == "sphere":
            return self.radius * self.scale
        if self.kind == "ellipsoid":
            return float(np.min(self.semi_axes)) * self.scale
        # Distance from the center to the closest triangle plane.
        v = self.vertices * self.scale
        t = self.triangles
        p0, p1, p2 = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
        n = np.cross(p1 - p0, p2 - p0)
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        return float(np.min(np.abs(np.einsum("ij,ij->i", n, p0))))

    def diameter(self) -> float:
        return 2.0 * self.bounding_radius()

    def physical_vertices(self) -> np.ndarray:
        """Mesh vertices in world coordinates (mesh kind only)."""
        if self.kind != "mesh":
            raise ValueError("physical_vertices is defined for mesh shapes")
        return self.vertices * self.scale + self.center


# ---------------------------------------------------------------------------
# Cluster specification and realization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterSpec:
    """Parameters of the bubble distribution.

    ``a`` is the target maximum bubble diameter, ``s`` the count exponent
    (``M = O(a**-s)``), ``t`` the distance exponent (minimum distance of order
    ``a**t``).  ``occupancy`` is either an integer 0..4 (bubbles per subcube)
    or ``("bernoulli", p)``.  ``d_min_factor``/``d_max_factor`` bracket the
    realized minimum surface distance in units of ``a**t`` and ``m_max`` caps
    the realized count at ``m_max * a**-s``.
    """

    a: float
    s: float = 0.0
    t: float = 0.0
    seed: int = 0
    occupancy: int | tuple[str, float] = 1
    domain_box: tuple[tuple[float, float, float], tuple[float, float, float]] = (
        (0.0, 0.0, 0.0),
        (1.0, 1.0, 1.0),
    )
    d_min_factor: float = 0.5
    d_max_factor: float = 3.0
    m_max: float = 2.0
    shape_kind: str = "sphere"
    # Axis ratios for ellipsoid bubbles / subdivision level for icosphere
    # (mesh) bubbles; ignored for spheres.
    ellipsoid_ratios: tuple[float, float, float] = (1.0, 1.0, 1.0)
    icosphere_subdivisions: int = 2

    def __post_init__(self) -> None:
        if self.a <= 0:
            raise InfeasibleRegimeError("a > 0 violated")
        if not (0.0 <= self.t < 0.5):
            raise InfeasibleRegimeError(f"0 <= t < 1/2 violated (t={self.t})")
        if not (0.0 <= self.s <= 1.5):
            raise InfeasibleRegimeError(f"0 <= s <= 3/2 violated (s={self.s})")
        if self.t == 0.0 and self.s > 0.0:
            raise InfeasibleRegimeError(
                f"t >= s/3 violated (t=0 with s={self.s}: the relation "
                "3*alpha*t = s admits no alpha)"
            )
        if self.t > 0.0 and self.t < self.s / 3.0:
            raise InfeasibleRegimeError(
                f"t >= s/3 violated (t={self.t}, s/3={self.s / 3.0})"
            )
        if isinstance(self.occupancy, int):
            if not (0 <= self.occupancy <= 4):
                raise InfeasibleRegimeError("occupancy count must be in 0..4")
        else:
            rule, p = self.occupancy
            if rule != "bernoulli" or not (0.0 <= p <= 1.0):
                raise InfeasibleRegimeError(
                    "occupancy must be an int 0..4 or ('bernoulli', p in [0,1])"
                )
        lo, hi = np.asarray(self.domain_box[0]), np.asarray(self.domain_box[1])
        if np.any(hi <= lo):
            raise InfeasibleRegimeError("domain box must have positive extent")
        if not (0 < self.d_min_factor <= self.d_max_factor):
            raise InfeasibleRegimeError("0 < d_min_factor <= d_max_factor violated")

    @property
    def alpha(self) -> float:
        """Exponent in the subcube side, from ``3 * alpha * t = s``."""
        if self.t == 0.0:
            return 1.0
        return self.s / (3.0 * self.t)


@dataclass
class Cluster:
    """A realized cluster: ordered bubbles plus recomputable statistics."""

    bubbles: list[BubbleShape]
    a: float
    d: float
    spec: ClusterSpec | None = None

    @property
    def m(self) -> int:
        return len(self.bubbles)

    def centers(self) -> np.ndarray:
        return np.array([b.center for b in self.bubbles], dtype=float)

    def bounding_radii(self) -> np.ndarray:
        return np.array([b.bounding_radius() for b in self.bubbles], dtype=float)


def _make_bubble(spec: ClusterSpec, center: np.ndarray) -> BubbleShape:
    """Bubble of diameter exactly ``spec.a`` with the requested template shape."""
    if spec.shape_kind == "sphere":
        return BubbleShape(kind="sphere", center=center, radius=0.5, scale=spec.a)
    if spec.shape_kind == "ellipsoid":
        ratios = np.asarray(spec.ellipsoid_ratios, dtype=float)
        axes = 0.5 * ratios / np.max(ratios)  # reference diameter 1
        return BubbleShape(kind="ellipsoid", center=center, semi_axes=axes, scale=spec.a)
    if spec.shape_kind == "icosphere":
        verts, tris = icosphere(spec.icosphere_subdivisions, radius=0.5)
        return BubbleShape(
            kind="mesh", center=center, vertices=verts, triangles=tris, scale=spec.a
        )
    raise InfeasibleRegimeError(f"unsupported generator shape kind {spec.shape_kind!r}")


def generate_cluster(spec: ClusterSpec) -> Cluster:
    """Place bubbles on a jittered subcube grid honoring the distance regime.

    Deterministic for a fixed ``spec`` (including the seed).  Raises
    :class:`InfeasibleRegimeError` when the requested exponents are
    inconsistent, when rejection sampling exceeds ``REJECTION_CAP`` draws, or
    when the realized statistics fall outside the requested brackets.
    """
    rng = np.random.default_rng(spec.seed)
    a, t = spec.a, spec.t
    alpha = spec.alpha
    lo = np.asarray(spec.domain_box[0], dtype=float)
    hi = np.asarray(spec.domain_box[1], dtype=float)
    extent = hi - lo

    # Target minimum surface distance.  The a/2 cushion keeps the realized
    # minimum at or above d_min * a**t even when cells admit no jitter.
    d_floor = spec.d_min_factor * a**t
    d_t = d_floor + 0.5 * a
    cell = 0.5 * a + d_t**alpha
    n_cells = np.maximum(1, np.floor(extent / cell).astype(int))
    if np.any(extent < a):
        raise InfeasibleRegimeError("domain box smaller than bubble diameter a")

    m_cap = max(1, int(math.floor(spec.m_max * a ** (-spec.s))))

    # Occupied cells per the occupancy rule.
    idx = np.indices(n_cells).reshape(3, -1).T  # (Ncells, 3)
    if isinstance(spec.occupancy, int):
        counts = np.full(len(idx), spec.occupancy, dtype=int)
    else:
        _, p = spec.occupancy
        counts = rng.binomial(1, p, size=len(idx))
    slots: list[tuple[int, int, int]] = []
    for cell_idx, c in zip(idx, counts):
        slots.extend([tuple(cell_idx)] * int(c))
    if not slots:
        raise InfeasibleRegimeError("occupancy rule produced an empty cluster")
    if len(slots) > m_cap:
        keep = rng.choice(len(slots), size=m_cap, replace=False)
        keep.sort()
        slots = [slots[i] for i in keep]

    # Special case: a single cell spanning the box places its bubble at the
    # box center (degenerate M=1 regime).
    if len(slots) == 1 and np.all(n_cells == 1):
        center = 0.5 * (lo + hi)
        bubble = _make_bubble(spec, center)
        return Cluster(bubbles=[bubble], a=bubble.diameter(), d=math.inf, spec=spec)

    # Jitter margin: keeping each center within its cell shrunk by
    # (a + d_t)/2 on every side guarantees center separation >= a + d_t
    # across distinct cells, i.e. surface separation >= d_t.
    jitter = max(0.0, cell - a - d_t)
    half = 0.5 * jitter

    centers = np.empty((len(slots), 3), dtype=float)
    occupied: dict[tuple[int, int, int], list[int]] = {}
    for k, cidx in enumerate(slots):
        base = lo + (np.asarray(cidx) + 0.5) * cell
        same_cell = occupied.setdefault(cidx, [])
        placed = False
        for _ in range(REJECTION_CAP):
            pos = base + rng.uniform(-half, half, size=3) if half > 0 else base.copy()
            if all(
                np.linalg.norm(pos - centers[j]) >= a + d_t for j in same_cell
            ):
                centers[k] = pos
                same_cell.append(k)
                placed = True
                break
            if half == 0:
                break
        if not placed:
            raise InfeasibleRegimeError(
                "rejection cap exceeded: occupancy "
                f"{spec.occupancy!r} incompatible with min distance {d_t:.3g} "
                f"in cells of side {cell:.3g}"
            )

    bubbles = [_make_bubble(spec, c) for c in centers]
    cluster = Cluster(bubbles=bubbles, a=max(b.diameter() for b in bubbles), d=math.inf, spec=spec)
    stats = cluster_stats(cluster)
    cluster.d = stats["d"]

    if cluster.m > 1:
        d_lo, d_hi = spec.d_min_factor * a**t, spec.d_max_factor * a**t
        # Relative slack absorbs rounding when centers sit exactly at the
        # zero-jitter spacing.
        if cluster.d < d_lo * (1.0 - 1e-9):
            raise InfeasibleRegimeError(
                f"d_min * a**t <= realized d violated ({d_lo:.3g} > {cluster.d:.3g})"
            )
        if cluster.d > d_hi * (1.0 + 1e-9):
            raise InfeasibleRegimeError(
                f"realized d <= d_max * a**t violated ({cluster.d:.3g} > {d_hi:.3g})"
            )
    if cluster.m > m_cap:
        raise InfeasibleRegimeError("realized M exceeds m_max * a**-s")
    return cluster


# ---------------------------------------------------------------------------
# Distance statistics
# ---------------------------------------------------------------------------


def distance_sum(cluster: Cluster, j: int, k: float) -> float:
    """Exact ``sum_{i != j} |z_i - z_j|**-k`` by a direct scan."""
    if cluster.m < 2:
        raise ValueError("distance_sum requires at least two bubbles")
    if k < 0:
        raise ValueError("exponent k must be >= 0")
    z = cluster.centers()
    diff = np.delete(z, j, axis=0) - z[j]
    r = np.linalg.norm(diff, axis=1)
    return float(np.sum(r ** (-k)))


def counting_bound(k: float, d: float, alpha: float) -> float:
    """Layer-counting bound for ``sum_{i != j} |z_i - z_j|**-k``.

    ``d**-k + d**-3alpha`` for k < 3, ``d**-3 + d**-3alpha |ln d|`` at k = 3,
    and ``d**-k + d**-alpha*k`` for k > 3.
    """
    if d <= 0:
        raise ValueError("d must be positive")
    if k < 3:
        return d ** (-k) + d ** (-3.0 * alpha)
    if k == 3:
        return d ** (-3.0) + d ** (-3.0 * alpha) * abs(math.log(d))
    return d ** (-k) + d ** (-alpha * k)


def _pairwise_surface_distance(cluster: Cluster) -> float:
    """Minimum surface distance |z_i - z_j| - r_i - r_j over pairs (bounding
    radii; exact for spheres)."""
    if cluster.m < 2:
        return math.inf
    z = cluster.centers()
    r = cluster.bounding_radii()
    diff = z[:, None, :] - z[None, :, :]
    dist = np.linalg.norm(diff, axis=-1) - r[:, None] - r[None, :]
    iu = np.triu_indices(cluster.m, k=1)
    return float(np.min(dist[iu]))


def cluster_stats(cluster: Cluster) -> dict:
    """Recompute M, max diameter, min pairwise surface distance, and the
    per-bubble surface-centroid offsets |z̄_m − z_m|."""
    from .quadrature import build_quadrature  # local import to avoid a cycle

    offsets = []
    for b in cluster.bubbles:
        if b.kind == "sphere":
            offsets.append(0.0)
        else:
            q = build_quadrature(b, order=2)
            zbar = np.average(q.nodes, axis=0, weights=q.weights)
            offsets.append(float(np.linalg.norm(zbar - b.center)))
    return {
        "M": cluster.m,
        "a": max(b.diameter() for b in cluster.bubbles),
        "d": _pairwise_surface_distance(cluster),
        "centroidOffsets": offsets,
    }


# ---------------------------------------------------------------------------
# Triangle meshes
# ---------------------------------------------------------------------------

# Triangle areas below DEGENERATE_AREA_FACTOR * a**2 fail validation.
DEGENERATE_AREA_FACTOR = 1e-12


def _triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p0 = vertices[triangles[:, 0]]
    p1 = vertices[triangles[:, 1]]
    p2 = vertices[triangles[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)


def mesh_volume(vertices: np.ndarray, triangles: np.ndarray) -> float:
    """Signed volume of the closed surface (positive for outward orientation)."""
    p0 = vertices[triangles[:, 0]]
    p1 = vertices[triangles[:, 1]]
    p2 = vertices[triangles[:, 2]]
    return float(np.einsum("ij,ij->", p0, np.cross(p1, p2)) / 6.0)


def validate_mesh(vertices: np.ndarray, triangles: np.ndarray) -> None:
    """Check closedness, consistent outward orientation, and non-degeneracy.

    Raises :class:`MeshError` with a specific message on the first failure.
    """
    vertices = np.asarray(vertices, dtype=float)
    triangles = np.asarray(triangles, dtype=int)
    if vertices.ndim != 2 or vertices.shape[1] != 3:
        raise MeshError("vertices must be an (n, 3) array")
    if triangles.ndim != 2 or triangles.shape[1] != 3:
        raise MeshError("triangles must be an (m, 3) index array")
    if triangles.min(initial=0) < 0 or triangles.max(initial=-1) >= len(vertices):
        raise MeshError("triangle indices out of range")
    # Closed + orientable: every directed edge appears exactly once and its
    # reverse exactly once.
    edges: dict[tuple[int, int], int] = {}
    for tri in triangles:
        for e in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            if e in edges:
                raise MeshError(f"directed edge {e} repeated: inconsistent orientation")
            edges[e] = 1
    for u, v in edges:
        if (v, u) not in edges:
            raise MeshError(f"boundary edge ({u}, {v}): mesh is not closed")
    scale = float(np.max(np.linalg.norm(vertices, axis=1)))
    areas = _triangle_areas(vertices, triangles)
    if np.any(areas <= DEGENERATE_AREA_FACTOR * max(scale, 1e-300) ** 2):
        raise MeshError("degenerate triangle (area below threshold)")
    if mesh_volume(vertices, triangles) <= 0:
        raise MeshError("negative enclosed volume: orientation is inward")


def icosphere(subdivisions: int, radius: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Icosahedron subdivided ``subdivisions`` times, vertices on the sphere.

    Returns ``(vertices, triangles)`` with outward-oriented triangles.
    """
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
            (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
            (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
        ],
        dtype=float,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array(
        [
            (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
            (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
            (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
            (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
        ],
        dtype=int,
    )
    vlist = [tuple(v) for v in verts]
    cache: dict[tuple[int, int], int] = {}

    def midpoint(i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        if key in cache:
            return cache[key]
        p = np.asarray(vlist[i]) + np.asarray(vlist[j])
        p /= np.linalg.norm(p)
        vlist.append(tuple(p))
        cache[key] = len(vlist) - 1
        return cache[key]

    tris = faces
    for _ in range(subdivisions):
        new_tris = []
        for a_, b_, c_ in tris:
            ab, bc, ca = midpoint(a_, b_), midpoint(b_, c_), midpoint(c_, a_)
            new_tris.extend([(a_, ab, ca), (b_, bc, ab), (c_, ca, bc), (ab, bc, ca)])
        tris = np.asarray(new_tris, dtype=int)
    vertices = np.asarray(vlist, dtype=float) * radius
    if mesh_volume(vertices, tris) < 0:
        tris = tris[:, [0, 2, 1]]
    return vertices, np.asarray(tris, dtype=int)


def random_star_mesh(
    seed: int, subdivisions: int = 2, amplitude: float = 0.3
) -> tuple[np.ndarray, np.ndarray]:
    """Random star-shaped closed surface: an icosphere with a smooth random
    radial modulation ``r(x̂) = 1 + amplitude * f(x̂)``, ``|f| <= 1``.

    Used as a stress family for shape-functional sign/negativity checks.
    """
    rng = np.random.default_rng(seed)
    verts, tris = icosphere(subdivisions, radius=1.0)
    axes = rng.normal(size=(4, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    coeff = rng.uniform(-1.0, 1.0, size=4)
    degrees = rng.integers(1, 4, size=4)
    f = np.zeros(len(verts))
    for ax, c, deg in zip(axes, coeff, degrees):
        f += c * np.polynomial.legendre.Legendre.basis(int(deg))(verts @ ax)
    f /= max(1.0, np.max(np.abs(f)))
    radii = 1.0 + amplitude * f
    return verts * radii[:, None], tris


# ---------------------------------------------------------------------------
# Mesh file format and cluster JSON export
# ---------------------------------------------------------------------------


def read_mesh(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read the ASCII triangle-surface format.

    Line 1: vertex count; then one ``x y z`` line per vertex; then the
    triangle count; then 0-based ``i j k`` index triples.
    """
    tokens = Path(path).read_text().split()
    pos = 0

    def take(n: int) -> list[str]:
        nonlocal pos
        if pos + n > len(tokens):
            raise MeshError(f"{path}: truncated mesh file")
        out = tokens[pos : pos + n]
        pos += n
        return out

    nv = int(take(1)[0])
    verts = np.array(take(3 * nv), dtype=float).reshape(nv, 3)
    nt = int(take(1)[0])
    tris = np.array(take(3 * nt), dtype=int).reshape(nt, 3)
    validate_mesh(verts, tris)
    return verts, tris


def write_mesh(path: str | Path, vertices: np.ndarray, triangles: np.ndarray) -> None:
    lines = [str(len(vertices))]
    lines += [
        f"{float(v[0])!r} {float(v[1])!r} {float(v[2])!r}"
        for v in np.asarray(vertices, dtype=float)
    ]
    lines.append(str(len(triangles)))
    lines += [f"{t[0]} {t[1]} {t[2]}" for t in np.asarray(triangles, dtype=int)]
    Path(path).write_text("\n".join(lines) + "\n")


def cluster_to_json(cluster: Cluster) -> str:
    """Serialize a cluster to the export schema
    ``{a, s, t, seed, bubbles: [{kind, center, params}]}``."""
    spec = cluster.spec
    bubbles = []
    for b in cluster.bubbles:
        if b.kind == "sphere":
            params = {"radius": b.radius * b.scale}
        elif b.kind == "ellipsoid":
            params = {"semiAxes": list(b.semi_axes * b.scale)}
        else:
            params = {
                "vertices": (b.vertices * b.scale).tolist(),
                "triangles": b.triangles.tolist(),
            }
        bubbles.append({"kind": b.kind, "center": list(b.center), "params": params})
    doc = {
        "a": cluster.a,
        "s": spec.s if spec else None,
        "t": spec.t if spec else None,
        "seed": spec.seed if spec else None,
        "bubbles": bubbles,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def cluster_from_json(text: str) -> Cluster:
    doc = json.loads(text)
    bubbles = []
    for b in doc["bubbles"]:
        kind, center, params = b["kind"], b["center"], b["params"]
        if kind == "sphere":
            bubbles.append(
                BubbleShape(kind="sphere", center=center, radius=params["radius"])
            )
        elif kind == "ellipsoid":
            bubbles.append(
                BubbleShape(kind="ellipsoid", center=center, semi_axes=params["semiAxes"])
            )
        else:
            bubbles.append(
                BubbleShape(
                    kind="mesh",
                    center=center,
                    vertices=params["vertices"],
                    triangles=params["triangles"],
                )
            )
    cluster = Cluster(
        bubbles=bubbles,
        a=max(b.diameter() for b in bubbles),
        d=math.inf,
    )
    cluster.d = _pairwise_surface_distance(cluster)
    return cluster
