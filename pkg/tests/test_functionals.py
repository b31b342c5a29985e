"""Shape functionals: Newton-potential boundary function, capacitance, volume."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bubbles.functionals import (
    compute_A_function,
    compute_a_hat,
    compute_capacitance,
    compute_functionals,
    compute_volume,
    ellipsoid_newton_potential,
)
from bubbles.geometry import BubbleShape, icosphere, random_star_mesh
from bubbles.quadrature import build_quadrature


def _sphere_quad(radius=1.0, scale=1.0, order=2, center=(0, 0, 0)):
    shape = BubbleShape(kind="sphere", center=center, radius=radius, scale=scale)
    return build_quadrature(shape, order)


def _ellipsoid_quad(axes, order=2, scale=1.0):
    shape = BubbleShape(kind="ellipsoid", center=(0, 0, 0), semi_axes=axes, scale=scale)
    return build_quadrature(shape, order)


def _mesh_quad(verts, tris, order=1, scale=1.0, center=(0, 0, 0)):
    shape = BubbleShape(
        kind="mesh", center=center, vertices=verts, triangles=tris, scale=scale
    )
    return build_quadrature(shape, order)


# ---------------------------------------------------------------------------
# Sphere closed forms
# ---------------------------------------------------------------------------


def test_sphere_functionals_closed_forms():
    a = 0.01  # diameter: radius 0.5 at scale a
    fn = compute_functionals(_sphere_quad(0.5, scale=a, center=(1, 2, 3)))
    r = 0.5 * a
    assert fn.a_hat == pytest.approx(-(8.0 * math.pi / 3.0) * r * r, rel=1e-12)
    assert fn.cap == pytest.approx(4.0 * math.pi * r, rel=1e-10)
    assert fn.volume == pytest.approx(4.0 / 3.0 * math.pi * r**3, rel=1e-12)
    assert fn.surface_area == pytest.approx(4.0 * math.pi * r * r, rel=1e-12)
    np.testing.assert_allclose(fn.centroid_offset, 0.0, atol=1e-12 * r)


def test_sphere_a_is_constant_on_the_boundary():
    quad = _sphere_quad(1.0, order=1)
    values = compute_A_function(quad)
    np.testing.assert_allclose(values, -(8.0 * math.pi / 3.0), rtol=1e-14)
    assert compute_A_function(quad, 5) == pytest.approx(values[5])
    assert compute_A_function(quad, quad.nodes[17]) == pytest.approx(values[17])


def test_a_point_evaluation_requires_a_node():
    quad = _sphere_quad(1.0, order=1)
    with pytest.raises(ValueError, match="no node matches"):
        compute_A_function(quad, np.array([10.0, 0.0, 0.0]))


# ---------------------------------------------------------------------------
# Ellipsoid closed form vs Monte-Carlo oracle
# ---------------------------------------------------------------------------


def test_ellipsoid_newton_potential_matches_monte_carlo():
    # N(s) = |D| * E[ 1/|s - Y| ] with Y uniform in the ellipsoid; the linear
    # image of a uniform ball sample is uniform in the ellipsoid.
    axes = np.array([1.0, 0.6, 0.4])
    rng = np.random.default_rng(42)
    n = 200_000
    dirs = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    ball = dirs * (rng.uniform(size=n) ** (1.0 / 3.0))[:, None]
    y = ball * axes
    vol = 4.0 / 3.0 * math.pi * float(axes.prod())
    for s in [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 0.6, 0.0), (0.2, 0.1, -0.05)]:
        s = np.asarray(s, dtype=float)
        mc = vol * float(np.mean(1.0 / np.linalg.norm(y - s, axis=1)))
        assert ellipsoid_newton_potential(s, axes) == pytest.approx(mc, rel=1e-2)


def test_ellipsoid_newton_potential_degenerates_to_ball():
    # Uniform unit ball: N(x) = 2 pi (r^2 - |x|^2 / 3).
    r = 0.7
    axes = (r, r, r)
    assert ellipsoid_newton_potential((0.0, 0.0, 0.0), axes) == pytest.approx(
        2.0 * math.pi * r * r, rel=1e-13
    )
    assert ellipsoid_newton_potential((r, 0.0, 0.0), axes) == pytest.approx(
        2.0 * math.pi * (r * r - r * r / 3.0), rel=1e-13
    )
    x = np.array([0.1, -0.2, 0.3])
    assert ellipsoid_newton_potential(x, axes) == pytest.approx(
        2.0 * math.pi * (r * r - float(x @ x) / 3.0), rel=1e-13
    )


def test_spherical_ellipsoid_quadrature_matches_sphere_route():
    r = 0.5
    q_ell = _ellipsoid_quad((r, r, r), order=2)
    q_sph = _sphere_quad(r, order=2)
    assert compute_a_hat(q_ell) == pytest.approx(compute_a_hat(q_sph), rel=1e-12)
    assert compute_volume(q_ell) == pytest.approx(compute_volume(q_sph), rel=1e-12)


def test_ellipsoid_a_is_negative_and_nonconstant():
    quad = _ellipsoid_quad((1.0, 0.6, 0.4), order=2)
    values = compute_A_function(quad)
    assert np.all(values < 0)
    assert values.max() - values.min() > 0.1 * abs(values.mean())
    assert compute_a_hat(quad) < 0


# ---------------------------------------------------------------------------
# Capacitance
# ---------------------------------------------------------------------------


def test_sphere_capacitance_spectral():
    assert compute_capacitance(_sphere_quad(1.0, order=2)) == pytest.approx(
        4.0 * math.pi, rel=1e-10
    )
    assert compute_capacitance(_sphere_quad(0.25, scale=0.1, order=1)) == pytest.approx(
        4.0 * math.pi * 0.025, rel=1e-8
    )


def test_prolate_capacitance_against_closed_form():
    # Cap = 4 pi A e / atanh(e) for semi-axes (A, B, B), e = sqrt(1 - B^2/A^2).
    A, B = 1.0, 0.6
    e = math.sqrt(1.0 - B * B / (A * A))
    exact = 4.0 * math.pi * A * e / math.atanh(e)
    cap = compute_capacitance(_ellipsoid_quad((A, B, B), order=2))
    # Inscribed triangulation underestimates the true capacitance slightly.
    assert cap < exact
    assert cap == pytest.approx(exact, rel=6e-3)


def test_oblate_capacitance_against_closed_form():
    # Cap = 4 pi A e / asin(e) for semi-axes (A, A, C), e = sqrt(1 - C^2/A^2).
    A, C = 1.0, 0.5
    e = math.sqrt(1.0 - C * C / (A * A))
    exact = 4.0 * math.pi * A * e / math.asin(e)
    cap = compute_capacitance(_ellipsoid_quad((A, A, C), order=1))
    assert cap == pytest.approx(exact, rel=2e-2)


def test_mesh_capacitance_unit_sphere():
    verts, tris = icosphere(2, 1.0)
    cap = compute_capacitance(_mesh_quad(verts, tris, order=1))
    assert cap == pytest.approx(4.0 * math.pi, rel=2e-2)


# ---------------------------------------------------------------------------
# Mesh route cross-check and negativity
# ---------------------------------------------------------------------------


def test_mesh_a_hat_approximates_sphere_value():
    verts, tris = icosphere(2, 1.0)
    a_hat = compute_a_hat(_mesh_quad(verts, tris, order=1))
    assert a_hat == pytest.approx(-(8.0 * math.pi / 3.0), rel=3e-2)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_star_mesh_a_hat_is_negative(seed):
    verts, tris = random_star_mesh(seed, subdivisions=2)
    quad = _mesh_quad(verts, tris, order=1)
    values = compute_A_function(quad)
    assert np.all(values < 0)
    assert compute_a_hat(quad) < 0


def test_mesh_functionals_volume_and_centroid():
    verts, tris = random_star_mesh(3, subdivisions=2)
    fn = compute_functionals(_mesh_quad(verts, tris, order=1, center=(1, 0, 0)))
    from bubbles.geometry import mesh_volume

    assert fn.volume == pytest.approx(mesh_volume(verts, tris), rel=1e-12)
    # Star meshes are generically asymmetric: the surface centroid shifts.
    assert 0 < np.linalg.norm(fn.centroid_offset) < 0.5


# ---------------------------------------------------------------------------
# Scaling laws
# ---------------------------------------------------------------------------


@settings(max_examples=10, deadline=None)
@given(delta=st.sampled_from([1e-1, 1e-2, 1e-3, 1e-4]))
def test_sphere_functionals_scale_exactly(delta):
    base = compute_functionals(_sphere_quad(0.5, scale=1.0, order=1))
    scaled = compute_functionals(_sphere_quad(0.5, scale=delta, order=1))
    assert scaled.a_hat == pytest.approx(delta**2 * base.a_hat, rel=1e-10)
    assert scaled.cap == pytest.approx(delta * base.cap, rel=1e-10)
    assert scaled.volume == pytest.approx(delta**3 * base.volume, rel=1e-10)
    assert scaled.surface_area == pytest.approx(delta**2 * base.surface_area, rel=1e-10)


def test_mesh_functionals_scale_exactly():
    verts, tris = random_star_mesh(1, subdivisions=1)
    base = compute_functionals(_mesh_quad(verts, tris, order=1, scale=1.0))
    delta = 1e-3
    scaled = compute_functionals(_mesh_quad(verts, tris, order=1, scale=delta))
    assert scaled.a_hat == pytest.approx(delta**2 * base.a_hat, rel=1e-9)
    assert scaled.cap == pytest.approx(delta * base.cap, rel=1e-9)
    assert scaled.volume == pytest.approx(delta**3 * base.volume, rel=1e-9)
