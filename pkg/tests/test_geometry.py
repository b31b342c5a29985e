"""Cluster generation, shapes, meshes, and distance statistics."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bubbles.geometry import (
    BubbleShape,
    Cluster,
    ClusterSpec,
    InfeasibleRegimeError,
    MeshError,
    cluster_from_json,
    cluster_stats,
    cluster_to_json,
    counting_bound,
    distance_sum,
    generate_cluster,
    icosphere,
    mesh_volume,
    random_star_mesh,
    read_mesh,
    validate_mesh,
    write_mesh,
)
from bubbles.quadrature import winding_number


# ---------------------------------------------------------------------------
# Spec validation
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [
        {"a": -1.0},
        {"a": 0.0},
        {"a": 0.01, "t": -0.1},
        {"a": 0.01, "t": 0.5},
        {"a": 0.01, "s": 1.6, "t": 0.4},
        {"a": 0.01, "s": 0.5, "t": 0.0},  # t = 0 admits no alpha when s > 0
        {"a": 0.01, "s": 1.0, "t": 0.2},  # t < s/3
        {"a": 0.01, "occupancy": 5},
        {"a": 0.01, "occupancy": -1},
        {"a": 0.01, "occupancy": ("bernoulli", 1.5)},
        {"a": 0.01, "occupancy": ("poisson", 0.5)},
        {"a": 0.01, "domain_box": ((0, 0, 0), (0, 1, 1))},
        {"a": 0.01, "d_min_factor": 0.0},
        {"a": 0.01, "d_min_factor": 2.0, "d_max_factor": 1.0},
    ],
)
def test_spec_rejects_inconsistent_regimes(kwargs):
    with pytest.raises(InfeasibleRegimeError):
        ClusterSpec(**kwargs)


def test_spec_alpha_from_exponent_relation():
    assert ClusterSpec(a=0.01, s=1.0, t=1.0 / 3.0).alpha == pytest.approx(1.0)
    assert ClusterSpec(a=0.01, s=0.9, t=0.45).alpha == pytest.approx(2.0 / 3.0)
    assert ClusterSpec(a=0.01, s=0.0, t=0.0).alpha == 1.0


def test_spec_error_message_names_violated_inequality():
    with pytest.raises(InfeasibleRegimeError, match="t >= s/3"):
        ClusterSpec(a=0.01, s=1.0, t=0.2)
    with pytest.raises(InfeasibleRegimeError, match="0 <= t < 1/2"):
        ClusterSpec(a=0.01, t=0.7)


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


def test_generate_is_deterministic_per_seed():
    spec = ClusterSpec(a=0.02, s=1.0, t=1.0 / 3.0, seed=11)
    c1 = generate_cluster(spec)
    c2 = generate_cluster(spec)
    assert c1.m == c2.m
    np.testing.assert_array_equal(c1.centers(), c2.centers())
    c3 = generate_cluster(ClusterSpec(a=0.02, s=1.0, t=1.0 / 3.0, seed=12))
    assert c1.m != c3.m or not np.array_equal(c1.centers(), c3.centers())


def test_generate_single_bubble_degenerate_box():
    # s = t = 0 tiles the unit box with one cell: bubble at the box center.
    cluster = generate_cluster(ClusterSpec(a=0.01, s=0.0, t=0.0, seed=0))
    assert cluster.m == 1
    np.testing.assert_allclose(cluster.centers()[0], [0.5, 0.5, 0.5])
    assert cluster.d == math.inf


def test_generate_realized_statistics_within_brackets():
    spec = ClusterSpec(a=0.02, s=1.0, t=1.0 / 3.0, seed=3)
    cluster = generate_cluster(spec)
    stats = cluster_stats(cluster)
    at = spec.a**spec.t
    assert 1 < cluster.m <= spec.m_max * spec.a ** (-spec.s)
    assert spec.d_min_factor * at * (1 - 1e-9) <= stats["d"]
    assert stats["d"] <= spec.d_max_factor * at * (1 + 1e-9)
    assert stats["a"] == pytest.approx(spec.a)
    assert all(off == 0.0 for off in stats["centroidOffsets"])


@settings(max_examples=15, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    a=st.sampled_from([0.05, 0.02, 0.01]),
)
def test_generate_invariants_hold_across_seeds(seed, a):
    spec = ClusterSpec(a=a, s=1.0, t=1.0 / 3.0, seed=seed)
    cluster = generate_cluster(spec)
    assert cluster.m <= spec.m_max * a ** (-spec.s)
    if cluster.m > 1:
        at = a**spec.t
        assert spec.d_min_factor * at * (1 - 1e-9) <= cluster.d
        assert cluster.d <= spec.d_max_factor * at * (1 + 1e-9)
    for bubble in cluster.bubbles:
        assert bubble.diameter() == pytest.approx(a)


def test_generate_bernoulli_occupancy_and_empty_cluster():
    spec = ClusterSpec(a=0.05, s=1.0, t=1.0 / 3.0, seed=5, occupancy=("bernoulli", 0.5))
    cluster = generate_cluster(spec)
    assert 1 <= cluster.m <= spec.m_max * spec.a ** (-spec.s)
    with pytest.raises(InfeasibleRegimeError, match="empty"):
        generate_cluster(ClusterSpec(a=0.05, s=1.0, t=1.0 / 3.0, occupancy=0))


def test_generate_rejects_box_smaller_than_bubble():
    spec = ClusterSpec(a=0.5, domain_box=((0, 0, 0), (0.3, 0.3, 0.3)))
    with pytest.raises(InfeasibleRegimeError, match="domain box"):
        generate_cluster(spec)


def test_generate_ellipsoid_and_mesh_templates():
    spec = ClusterSpec(
        a=0.02, s=1.0, t=1.0 / 3.0, seed=2, shape_kind="ellipsoid",
        ellipsoid_ratios=(2.0, 1.0, 1.0),
    )
    cluster = generate_cluster(spec)
    assert all(b.kind == "ellipsoid" for b in cluster.bubbles)
    assert all(b.diameter() == pytest.approx(0.02) for b in cluster.bubbles)

    spec = ClusterSpec(a=0.05, s=1.0, t=1.0 / 3.0, seed=2, shape_kind="icosphere",
                       icosphere_subdivisions=1)
    cluster = generate_cluster(spec)
    assert all(b.kind == "mesh" for b in cluster.bubbles)
    with pytest.raises(InfeasibleRegimeError, match="shape kind"):
        generate_cluster(ClusterSpec(a=0.05, shape_kind="torus"))


# ---------------------------------------------------------------------------
# Shapes
# ---------------------------------------------------------------------------


def test_bubble_shape_validation():
    with pytest.raises(ValueError, match="radius"):
        BubbleShape(kind="sphere", center=(0, 0, 0))
    with pytest.raises(ValueError, match="semi-axes"):
        BubbleShape(kind="ellipsoid", center=(0, 0, 0), semi_axes=(1.0, -1.0, 1.0))
    with pytest.raises(ValueError, match="kind"):
        BubbleShape(kind="cube", center=(0, 0, 0))
    with pytest.raises(ValueError, match="scale"):
        BubbleShape(kind="sphere", center=(0, 0, 0), radius=1.0, scale=0.0)


def test_bubble_shape_radii_and_diameter():
    sphere = BubbleShape(kind="sphere", center=(1, 2, 3), radius=2.0, scale=0.5)
    assert sphere.bounding_radius() == pytest.approx(1.0)
    assert sphere.inner_radius() == pytest.approx(1.0)
    assert sphere.diameter() == pytest.approx(2.0)

    ell = BubbleShape(kind="ellipsoid", center=(0, 0, 0), semi_axes=(3.0, 2.0, 1.0))
    assert ell.bounding_radius() == pytest.approx(3.0)
    assert ell.inner_radius() == pytest.approx(1.0)

    verts, tris = icosphere(1, radius=1.0)
    mesh = BubbleShape(kind="mesh", center=(0, 0, 0), vertices=verts, triangles=tris)
    assert mesh.bounding_radius() == pytest.approx(1.0)
    assert 0.8 < mesh.inner_radius() < 1.0  # inscribed polyhedron


# ---------------------------------------------------------------------------
# Distance sums and counting bounds
# ---------------------------------------------------------------------------


def _cluster_from_centers(centers, a=0.01) -> Cluster:
    bubbles = [
        BubbleShape(kind="sphere", center=np.asarray(c, float), radius=0.5, scale=a)
        for c in centers
    ]
    cluster = Cluster(bubbles=bubbles, a=a, d=math.inf)
    cluster.d = cluster_stats(cluster)["d"]
    return cluster


def test_distance_sum_matches_direct_evaluation():
    centers = [(0, 0, 0), (1, 0, 0), (0, 2, 0), (0, 0, 4)]
    cluster = _cluster_from_centers(centers)
    z = np.asarray(centers, dtype=float)
    for j in range(4):
        for k in (0.0, 1.0, 2.5, 4.0):
            expected = sum(
                np.linalg.norm(z[i] - z[j]) ** (-k) for i in range(4) if i != j
            )
            assert distance_sum(cluster, j, k) == pytest.approx(expected, rel=1e-12)


def test_distance_sum_argument_errors():
    cluster = _cluster_from_centers([(0, 0, 0)])
    with pytest.raises(ValueError, match="two bubbles"):
        distance_sum(cluster, 0, 1.0)
    cluster = _cluster_from_centers([(0, 0, 0), (1, 0, 0)])
    with pytest.raises(ValueError, match="k must be"):
        distance_sum(cluster, 0, -1.0)


def test_counting_bound_branches():
    d, alpha = 0.2, 1.0
    assert counting_bound(1.0, d, alpha) == pytest.approx(d**-1 + d**-3)
    assert counting_bound(3.0, d, alpha) == pytest.approx(
        d**-3 + d**-3 * abs(math.log(d))
    )
    assert counting_bound(4.0, d, alpha) == pytest.approx(d**-4 + d**-4)
    assert counting_bound(4.0, d, 0.5) == pytest.approx(d**-4 + d**-2)
    with pytest.raises(ValueError):
        counting_bound(2.0, 0.0, 1.0)


def test_distance_sum_dominated_by_counting_bound_shape():
    # On a regular grid with spacing ~d the layer-counting envelope holds with
    # a moderate constant for every center.
    spec = ClusterSpec(a=0.02, s=1.0, t=1.0 / 3.0, seed=7)
    cluster = generate_cluster(spec)
    alpha = spec.alpha
    for k in (1.0, 3.0, 4.0):
        bound = counting_bound(k, cluster.d, alpha)
        worst = max(distance_sum(cluster, j, k) for j in range(cluster.m))
        assert worst <= 20.0 * bound


# ---------------------------------------------------------------------------
# Meshes
# ---------------------------------------------------------------------------


def test_icosphere_is_valid_and_converges_to_sphere():
    for sub in (0, 1, 2):
        verts, tris = icosphere(sub, radius=1.0)
        validate_mesh(verts, tris)
        np.testing.assert_allclose(np.linalg.norm(verts, axis=1), 1.0, atol=1e-12)
    # Inscribed polyhedron volume approaches the ball volume from below.
    v1 = mesh_volume(*icosphere(1, 1.0))
    v2 = mesh_volume(*icosphere(2, 1.0))
    ball = 4.0 * math.pi / 3.0
    assert v1 < v2 < ball
    assert ball - v2 < 0.3 * (ball - v1)


def test_icosphere_counts():
    verts0, tris0 = icosphere(0)
    assert len(verts0) == 12 and len(tris0) == 20
    verts1, tris1 = icosphere(1)
    assert len(tris1) == 80


@pytest.mark.parametrize("seed", range(8))
def test_random_star_mesh_is_valid(seed):
    verts, tris = random_star_mesh(seed)
    validate_mesh(verts, tris)
    radii = np.linalg.norm(verts, axis=1)
    assert np.all(radii >= 0.7 - 1e-12) and np.all(radii <= 1.3 + 1e-12)


def test_validate_mesh_rejects_open_surface():
    verts, tris = icosphere(0)
    with pytest.raises(MeshError, match="not closed"):
        validate_mesh(verts, tris[:-1])


def test_validate_mesh_rejects_inconsistent_orientation():
    verts, tris = icosphere(0)
    flipped = tris.copy()
    flipped[0] = flipped[0, ::-1]
    with pytest.raises(MeshError, match="orientation"):
        validate_mesh(verts, flipped)


def test_validate_mesh_rejects_inward_orientation():
    verts, tris = icosphere(0)
    with pytest.raises(MeshError, match="inward"):
        validate_mesh(verts, tris[:, ::-1])


def test_validate_mesh_rejects_degenerate_triangle():
    verts = np.array([[0, 0, 0], [1, 0, 0], [1e-15, 0, 0], [0, 0, 1]], dtype=float)
    tris = np.array([[0, 1, 3], [1, 2, 3], [2, 0, 3], [0, 2, 1]])
    with pytest.raises(MeshError):
        validate_mesh(verts, tris)


def test_validate_mesh_rejects_bad_indices_and_shapes():
    verts, tris = icosphere(0)
    with pytest.raises(MeshError, match="out of range"):
        validate_mesh(verts, np.array([[0, 1, 99]]))
    with pytest.raises(MeshError, match="vertices"):
        validate_mesh(np.zeros((4, 2)), tris)


def test_mesh_file_roundtrip(tmp_path):
    verts, tris = icosphere(1, radius=0.7)
    path = tmp_path / "shape.mesh"
    write_mesh(path, verts, tris)
    rverts, rtris = read_mesh(path)
    np.testing.assert_array_equal(rverts, verts)
    np.testing.assert_array_equal(rtris, tris)


def test_read_mesh_truncated_file(tmp_path):
    path = tmp_path / "bad.mesh"
    path.write_text("4\n0 0 0\n")
    with pytest.raises(MeshError, match="truncated"):
        read_mesh(path)


# ---------------------------------------------------------------------------
# Winding numbers (containment)
# ---------------------------------------------------------------------------


def test_winding_number_sphere_and_ellipsoid():
    sphere = BubbleShape(kind="sphere", center=(1, 0, 0), radius=0.5)
    w = winding_number(sphere, [(1.0, 0.0, 0.1), (2.0, 0.0, 0.0)])
    np.testing.assert_allclose(w, [1.0, 0.0])
    ell = BubbleShape(kind="ellipsoid", center=(0, 0, 0), semi_axes=(2.0, 1.0, 1.0))
    w = winding_number(ell, [(1.9, 0.0, 0.0), (0.0, 1.1, 0.0)])
    np.testing.assert_allclose(w, [1.0, 0.0])


def test_winding_number_mesh():
    verts, tris = icosphere(2, radius=1.0)
    mesh = BubbleShape(kind="mesh", center=(0, 0, 0), vertices=verts, triangles=tris)
    w = winding_number(mesh, [(0.0, 0.0, 0.0), (0.5, 0.0, 0.0), (2.0, 0.0, 0.0)])
    np.testing.assert_allclose(w, [1.0, 1.0, 0.0], atol=1e-6)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def test_cluster_json_roundtrip():
    spec = ClusterSpec(a=0.02, s=1.0, t=1.0 / 3.0, seed=9)
    cluster = generate_cluster(spec)
    restored = cluster_from_json(cluster_to_json(cluster))
    assert restored.m == cluster.m
    np.testing.assert_allclose(restored.centers(), cluster.centers())
    assert restored.a == pytest.approx(cluster.a)
    assert restored.d == pytest.approx(cluster.d)


def test_cluster_json_roundtrip_mesh_and_ellipsoid():
    verts, tris = icosphere(1, 0.5)
    bubbles = [
        BubbleShape(kind="mesh", center=(0.0, 0.0, 0.0), vertices=verts, triangles=tris,
                    scale=0.01),
        BubbleShape(kind="ellipsoid", center=(1.0, 0.0, 0.0), semi_axes=(1.0, 0.5, 0.5),
                    scale=0.01),
    ]
    cluster = Cluster(bubbles=bubbles, a=0.01, d=math.inf)
    cluster.d = cluster_stats(cluster)["d"]
    restored = cluster_from_json(cluster_to_json(cluster))
    assert [b.kind for b in restored.bubbles] == ["mesh", "ellipsoid"]
    np.testing.assert_allclose(restored.bubbles[1].semi_axes, (0.01, 0.005, 0.005))
