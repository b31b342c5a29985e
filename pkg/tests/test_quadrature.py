"""Surface quadrature rules: areas, normals, node layout, and accuracy."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bubbles.geometry import BubbleShape, icosphere, mesh_volume
from bubbles.quadrature import (
    THETA_NODES_PER_ORDER,
    build_quadrature,
    winding_number,
)


def _sphere(radius=1.0, center=(0, 0, 0), scale=1.0):
    return BubbleShape(kind="sphere", center=center, radius=radius, scale=scale)


def _ellipsoid(semi_axes, center=(0, 0, 0), scale=1.0):
    return BubbleShape(kind="ellipsoid", center=center, semi_axes=semi_axes, scale=scale)


def _mesh(sub=1, radius=1.0, center=(0, 0, 0), scale=1.0):
    verts, tris = icosphere(sub, radius=radius)
    return BubbleShape(
        kind="mesh", center=center, vertices=verts, triangles=tris, scale=scale
    )


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------


def test_order_must_be_positive():
    with pytest.raises(ValueError, match="order"):
        build_quadrature(_sphere(), 0)


@pytest.mark.parametrize("shape", [_sphere(), _ellipsoid((1.0, 0.7, 0.4)), _mesh(1)])
def test_node_count_strictly_increases_with_order(shape):
    counts = [build_quadrature(shape, order).n_nodes for order in (1, 2, 3)]
    assert counts[0] < counts[1] < counts[2]


def test_sphere_grid_dimensions_follow_order():
    q = build_quadrature(_sphere(), 3)
    assert q.meta["n_theta"] == 3 * THETA_NODES_PER_ORDER
    assert q.meta["n_phi"] == 6 * THETA_NODES_PER_ORDER
    assert q.n_nodes == q.meta["n_theta"] * q.meta["n_phi"]


def test_world_nodes_are_scaled_shifted_reference_nodes():
    for shape in (
        _sphere(0.5, center=(1, 2, 3), scale=0.01),
        _ellipsoid((0.5, 0.3, 0.2), center=(-1, 0, 2), scale=0.02),
        _mesh(1, 0.5, center=(0, 1, 0), scale=0.05),
    ):
        q = build_quadrature(shape, 2)
        np.testing.assert_allclose(
            q.nodes, shape.center + shape.scale * q.ref_nodes, atol=1e-14
        )
        np.testing.assert_allclose(
            q.weights, shape.scale**2 * q.ref_weights, rtol=1e-14
        )
        assert q.bubble_ref == -1
        assert build_quadrature(shape, 2, bubble_ref=7).bubble_ref == 7


@pytest.mark.parametrize(
    "shape, keys",
    [
        (_sphere(), {"kind", "n_theta", "n_phi", "radius", "directions"}),
        (_ellipsoid((1, 0.7, 0.4)), {"kind", "n_theta", "n_phi", "semi_axes"}),
        (
            _mesh(1),
            {
                "kind",
                "vertices",
                "triangles",
                "areas",
                "panel_normals",
                "panel_of_node",
                "nodes_per_panel",
            },
        ),
    ],
)
def test_meta_carries_dispatch_structure(shape, keys):
    assert set(build_quadrature(shape, 1).meta) == keys


def test_normals_are_unit_and_outward():
    for shape in (_sphere(0.5, scale=2.0), _ellipsoid((1.0, 0.6, 0.3)), _mesh(2)):
        q = build_quadrature(shape, 2)
        np.testing.assert_allclose(
            np.linalg.norm(q.normals, axis=1), 1.0, atol=1e-12
        )
        # Outward: positive projection onto the ray from the center
        # (all three families here are star-shaped about the center).
        ray = q.nodes - shape.center
        assert np.all(np.einsum("ij,ij->i", q.normals, ray) > 0)


def test_sphere_normals_equal_node_directions():
    q = build_quadrature(_sphere(0.5, center=(1, 1, 1), scale=0.01), 1)
    ray = q.nodes - np.array([1.0, 1.0, 1.0])
    np.testing.assert_allclose(
        q.normals, ray / np.linalg.norm(ray, axis=1, keepdims=True), atol=1e-12
    )


# ---------------------------------------------------------------------------
# Areas and volumes
# ---------------------------------------------------------------------------


def test_sphere_area_is_exact():
    for order in (1, 2, 3):
        q = build_quadrature(_sphere(0.5, scale=0.01), order)
        assert q.total_area() == pytest.approx(4.0 * math.pi * 0.005**2, rel=1e-14)


def test_spheroid_areas_match_closed_forms():
    # Prolate (A > B = C): S = 2 pi B^2 (1 + (A / (B e)) asin(e)).
    A, B = 1.0, 0.6
    e = math.sqrt(1.0 - B * B / (A * A))
    s_prolate = 2.0 * math.pi * B * B * (1.0 + A / (B * e) * math.asin(e))
    q = build_quadrature(_ellipsoid((A, B, B)), 4)
    assert q.total_area() == pytest.approx(s_prolate, rel=1e-10)

    # Oblate (A = B > C): S = 2 pi A^2 (1 + ((1 - e^2) / e) atanh(e)).
    A, C = 1.0, 0.5
    e = math.sqrt(1.0 - C * C / (A * A))
    s_oblate = 2.0 * math.pi * A * A * (1.0 + (1.0 - e * e) / e * math.atanh(e))
    q = build_quadrature(_ellipsoid((A, A, C)), 4)
    assert q.total_area() == pytest.approx(s_oblate, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(
    axes=st.tuples(
        st.floats(0.3, 1.0), st.floats(0.3, 1.0), st.floats(0.3, 1.0)
    )
)
def test_ellipsoid_area_between_inscribed_and_circumscribed_spheres(axes):
    q = build_quadrature(_ellipsoid(axes), 2)
    lo = 4.0 * math.pi * min(axes) ** 2
    hi = 4.0 * math.pi * max(axes) ** 2
    assert lo - 1e-9 <= q.total_area() <= hi + 1e-9


def test_divergence_volume_identity():
    # (1/3) sum w (x - z) . nu equals the enclosed volume.
    shape = _ellipsoid((1.0, 0.7, 0.4), center=(2, 0, 1), scale=0.5)
    q = build_quadrature(shape, 4)
    vol = np.sum(q.weights * np.einsum("ij,ij->i", q.nodes - shape.center, q.normals)) / 3.0
    exact = 4.0 / 3.0 * math.pi * 1.0 * 0.7 * 0.4 * 0.5**3
    assert vol == pytest.approx(exact, rel=1e-10)


def test_mesh_quadrature_is_exact_for_the_polyhedron():
    shape = _mesh(1, radius=0.8, center=(1, 2, 3), scale=0.25)
    verts, tris = icosphere(1, radius=0.8)
    poly_volume = mesh_volume(verts * 0.25, tris)
    for order in (1, 2, 3):
        q = build_quadrature(shape, order)
        # Flat subdivision leaves the discretized surface unchanged.
        area = 0.5 * np.linalg.norm(
            np.cross(
                verts[tris[:, 1]] - verts[tris[:, 0]],
                verts[tris[:, 2]] - verts[tris[:, 0]],
            ),
            axis=1,
        ).sum() * 0.25**2
        assert q.total_area() == pytest.approx(area, rel=1e-12)
        # x . nu is linear on each flat panel, so both panel rules integrate
        # the divergence-theorem volume exactly.
        vol = np.sum(
            q.weights * np.einsum("ij,ij->i", q.nodes - shape.center, q.normals)
        ) / 3.0
        assert vol == pytest.approx(poly_volume, rel=1e-12)


def test_mesh_panel_bookkeeping():
    q1 = build_quadrature(_mesh(1), 1)
    assert q1.meta["nodes_per_panel"] == 1
    assert len(q1.meta["areas"]) == q1.n_nodes
    q2 = build_quadrature(_mesh(1), 2)
    assert q2.meta["nodes_per_panel"] == 3
    assert len(q2.meta["triangles"]) == 4 * 80  # one flat split of 80 panels
    assert q2.n_nodes == 3 * len(q2.meta["triangles"])
    np.testing.assert_array_equal(
        q2.meta["panel_of_node"], np.repeat(np.arange(len(q2.meta["triangles"])), 3)
    )


# ---------------------------------------------------------------------------
# Accuracy on smooth integrands
# ---------------------------------------------------------------------------


def test_sphere_rule_integrates_smooth_exponential_spectrally():
    # int_{S^2} exp(x . v) dA = 4 pi sinh(1) for any unit v.
    v = np.array([1.0, 2.0, -1.0])
    v /= np.linalg.norm(v)
    q = build_quadrature(_sphere(), 2)
    val = np.sum(q.weights * np.exp(q.nodes @ v))
    assert val == pytest.approx(4.0 * math.pi * math.sinh(1.0), rel=1e-13)


def test_sphere_rule_second_moments():
    # int x_i x_j dA = (4 pi / 3) delta_ij on the unit sphere.
    q = build_quadrature(_sphere(), 1)
    mom = np.einsum("k,ki,kj->ij", q.weights, q.nodes, q.nodes)
    np.testing.assert_allclose(mom, 4.0 * math.pi / 3.0 * np.eye(3), atol=1e-12)


def test_sphere_rule_oscillatory_plane_wave():
    # int_{S^2} exp(i k d . x) dA = 4 pi sin(k) / k on the unit sphere.
    k = 3.0
    d = np.array([0.0, 0.6, 0.8])
    q = build_quadrature(_sphere(), 3)
    val = np.sum(q.weights * np.exp(1j * k * (q.nodes @ d)))
    assert val == pytest.approx(4.0 * math.pi * math.sin(k) / k, abs=1e-11)


def test_winding_number_batch_and_scalar_shapes():
    sphere = _sphere(0.5, center=(1, 0, 0))
    w = winding_number(sphere, np.array([[1.0, 0.0, 0.2], [9.0, 0.0, 0.0]]))
    assert w.shape == (2,)
    np.testing.assert_allclose(w, [1.0, 0.0])
