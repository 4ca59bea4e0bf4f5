import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracefg.errors import ConfigurationError
from fracefg.geometry import (Boundary, Circle, Rectangle, circle_mesh,
                              graded_breaks, make_circular_cloud,
                              make_nonuniform_grid, make_uniform_grid,
                              rectangle_mesh, truncate_horizon,
                              truncate_horizons)
from fracefg.mls import QUADRATIC, LINEAR, _neighbors


def test_uniform_grid_counts():
    c = make_uniform_grid(1, 1, 12, 12)
    assert c.n == 169
    assert np.allclose(c.spacing, 1 / 12)
    assert np.allclose(c.support_x, 2.5 / 12)


def test_uniform_grid_rectangular():
    c = make_uniform_grid(2, 1, 4, 2)
    assert c.n == 15
    assert np.allclose(c.spacing, 0.5)


def test_uniform_grid_too_coarse():
    with pytest.raises(ConfigurationError):
        make_uniform_grid(1, 1, 1, 1)


def test_boundary_tags():
    c = make_uniform_grid(1, 1, 4, 4)
    assert len(c.boundary_indices()) == 16
    assert len(c.boundary_indices(Boundary.LEFT)) == 5
    corner = np.flatnonzero((c.nodes == [0, 0]).all(axis=1))[0]
    assert c.boundary[corner] == Boundary.LEFT | Boundary.BOTTOM


def test_nonuniform_degenerates_to_uniform():
    br = np.linspace(0, 1, 9)
    a = make_nonuniform_grid(1, 1, br, br)
    b = make_uniform_grid(1, 1, 8, 8)
    assert np.array_equal(a.nodes, b.nodes)
    assert np.allclose(a.spacing, b.spacing)


def test_nonuniform_case1_supports_vary_along_x_only():
    xb = np.array([0, 0.2, 0.35, 0.45, 0.5, 0.55, 0.65, 0.8, 1.0])
    yb = np.linspace(0, 1, 7)
    c = make_nonuniform_grid(1, 1, xb, yb)
    assert c.n == len(xb) * len(yb)
    assert np.ptp(c.support_x) > 0
    assert np.ptp(c.support_y) == pytest.approx(0)


def test_nonuniform_case2_supports_vary_both():
    b = np.array([0, 0.2, 0.35, 0.45, 0.5, 0.55, 0.65, 0.8, 1.0])
    c = make_nonuniform_grid(1, 1, b, b)
    assert np.ptp(c.support_x) > 0 and np.ptp(c.support_y) > 0


def test_nonuniform_rejects_non_monotone():
    with pytest.raises(ConfigurationError):
        make_nonuniform_grid(1, 1, [0, 0.6, 0.4, 1], [0, 0.5, 1])


def test_circular_containment_and_rim():
    c = make_circular_cloud(1.0, 6)
    assert np.all(np.hypot(*c.nodes.T) <= 1 + 1e-12)
    rim = c.boundary_indices(Boundary.RIM)
    assert np.allclose(np.hypot(*c.nodes[rim].T), 1.0)


def test_circular_rim_spacing_finer():
    t = graded_breaks(1.0, 16, 0.5)
    gaps = np.diff(t)
    assert gaps[0] < gaps[len(gaps) // 2]


def test_circular_too_few_lines():
    with pytest.raises(ConfigurationError):
        make_circular_cloud(1.0, 1)


def test_circular_breaks_outside():
    with pytest.raises(ConfigurationError):
        make_circular_cloud(1.0, [-1.2, -0.5, 0, 0.5, 1.2])


@pytest.mark.parametrize("pt,hl,expect", [
    ((0.5, 0.5), 0.3, (0.3, 0.3, 0.3, 0.3)),
    ((0.1, 0.5), 0.5, (0.1, 0.5, 0.5, 0.5)),
])
def test_truncate_square(pt, hl, expect):
    hz = truncate_horizon(np.array(pt), hl, Rectangle(1, 1))
    assert (hz.l_A_x, hz.l_B_x, hz.l_A_y, hz.l_B_y) == pytest.approx(expect)


def test_truncate_circle_chord():
    hz = truncate_horizon(np.array([0.9, 0.0]), 0.5, Circle(1.0))
    assert hz.l_B_x == pytest.approx(0.1)
    assert hz.l_A_x == pytest.approx(0.5)


def test_truncate_boundary_floor():
    hz = truncate_horizon(np.array([0.0, 0.5]), 0.5, Rectangle(1, 1))
    assert hz.l_A_x == pytest.approx(0.5e-6)
    assert hz.l_A_x > 0


def test_truncate_symmetric_center():
    hz = truncate_horizon(np.array([0.0, 0.0]), 1.2, Circle(1.0))
    assert hz.l_A_x == hz.l_B_x == hz.l_A_y == hz.l_B_y == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 2.0))
def test_horizon_invariants(x, y, hl):
    out = truncate_horizons(np.array([[x, y]]), hl, Rectangle(1, 1))[0]
    assert np.all(out > 0) and np.all(out <= hl)
    dist = np.array([x, 1 - x, y, 1 - y])
    assert np.all(out <= np.maximum(dist, 1e-6 * hl) + 1e-15)


def test_rectangle_mesh_area_and_points():
    br = np.linspace(0, 1, 13)
    m = rectangle_mesh(br, br)
    assert m.n_cells == 144 and len(m.points) == 2304
    assert m.weights.sum() == pytest.approx(1.0)


def test_circle_mesh_area_and_containment():
    m = circle_mesh(1.0, 8, 8)
    assert m.weights.sum() == pytest.approx(np.pi, rel=1e-10)
    assert np.all(np.hypot(*m.points.T) <= 1.0)
    # polynomial moment of the disk: int r^2 dA = pi / 2
    assert m.integrate(np.sum(m.points ** 2, axis=1)) == pytest.approx(
        np.pi / 2, rel=1e-8)


@pytest.mark.parametrize("cloud", [
    make_uniform_grid(1, 1, 12, 12),
    make_circular_cloud(1.0, 16),
])
def test_coverage_at_gauss_points(cloud):
    if isinstance(cloud.domain, Circle):
        pts = circle_mesh(1.0, 12, 12).points
    else:
        br = np.linspace(0, 1, 13)
        pts = rectangle_mesh(br, br).points
    _, _, counts = _neighbors(pts, cloud)
    assert counts.min() >= 6
    _, _, counts = _neighbors(pts, cloud.with_support_scale(1.5))
    assert counts.min() >= 3


def test_clouds_are_immutable():
    c = make_uniform_grid(1, 1, 4, 4)
    with pytest.raises(ValueError):
        c.nodes[0, 0] = 3.0
