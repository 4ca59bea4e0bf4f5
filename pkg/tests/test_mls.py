import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracefg.errors import ConfigurationError, CoverageError
from fracefg.geometry import make_circular_cloud, make_uniform_grid
from fracefg.mls import (LINEAR, QUADRATIC, cubic_spline_weight,
                         evaluate_shape, shape_rows, tensor_weight)

GRID = make_uniform_grid(1, 1, 12, 12)
GRID_U = GRID.with_support_scale(1.5)


def test_spline_weight_values():
    w, dw, _ = cubic_spline_weight(np.array([0.0, 0.5, 1.0, 1.2]))
    assert w == pytest.approx([2 / 3, 1 / 6, 0.0, 0.0])
    assert dw[0] == 0.0


def test_spline_weight_c1_at_breaks():
    eps = 1e-9
    for r in (0.5, 1.0):
        lo = cubic_spline_weight(np.array([r - eps]))
        hi = cubic_spline_weight(np.array([r + eps]))
        assert lo[0] == pytest.approx(hi[0], abs=1e-8)
        assert lo[1] == pytest.approx(hi[1], abs=1e-7)


def test_spline_weight_rejects_negative():
    with pytest.raises(ValueError):
        cubic_spline_weight(np.array([-0.1]))


def test_tensor_weight_derivatives_fd():
    node, sup = np.array([0.5, 0.5]), np.array([0.3, 0.25])
    p, h = np.array([0.57, 0.44]), 1e-6
    w = tensor_weight(p, node, sup)
    f = lambda q: tensor_weight(q, node, sup)["phi"]
    assert w["x"] == pytest.approx(
        (f(p + [h, 0]) - f(p - [h, 0])) / (2 * h), rel=1e-6)
    assert w["y"] == pytest.approx(
        (f(p + [0, h]) - f(p - [0, h])) / (2 * h), rel=1e-6)


def _field(kind, x, y):
    if kind == "quad":
        return 1 + 2 * x - y + 0.5 * x * x + 3 * x * y - 2 * y * y
    return 1 + 2 * x - y


@pytest.mark.parametrize("cloud,order,kind", [
    (GRID, QUADRATIC, "quad"), (GRID_U, LINEAR, "lin"),
])
def test_polynomial_reproduction(cloud, order, kind):
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 1, (40, 2))
    rows = shape_rows(pts, cloud, order, deriv=2 if order == QUADRATIC else 1)
    u = _field(kind, *cloud.nodes.T)
    x, y = pts.T
    assert rows["phi"] @ u == pytest.approx(_field(kind, x, y), abs=1e-10)
    assert rows["phi"].sum(axis=1) == pytest.approx(1.0, abs=1e-12)
    if kind == "quad":
        assert rows["x"] @ u == pytest.approx(2 + x + 3 * y, abs=1e-9)
        assert rows["y"] @ u == pytest.approx(-1 + 3 * x - 4 * y, abs=1e-9)
        assert rows["xx"] @ u == pytest.approx(1.0, abs=1e-7)
        assert rows["yy"] @ u == pytest.approx(-4.0, abs=1e-7)
        assert rows["xy"] @ u == pytest.approx(3.0, abs=1e-7)
    else:
        assert rows["x"] @ u == pytest.approx(2.0, abs=1e-10)
        assert rows["y"] @ u == pytest.approx(-1.0, abs=1e-10)


def test_circle_reproduction():
    c = make_circular_cloud(1.0, 12)
    ang = np.linspace(0, 2 * np.pi, 20, endpoint=False)
    pts = np.c_[0.9 * np.cos(ang), 0.9 * np.sin(ang)]
    rows = shape_rows(pts, c, QUADRATIC, 1)
    u = _field("quad", *c.nodes.T)
    assert rows["phi"] @ u == pytest.approx(_field("quad", *pts.T), abs=1e-9)


def test_derivative_rows_match_fd():
    p, h = np.array([[0.31, 0.62]]), 1e-6
    d = shape_rows(p, GRID, QUADRATIC, 1)
    fx = (shape_rows(p + [h, 0], GRID)["phi"]
          - shape_rows(p - [h, 0], GRID)["phi"]) / (2 * h)
    assert np.allclose(d["x"], fx, atol=1e-6)


def test_evaluate_shape_active_nodes():
    s = evaluate_shape([0.5, 0.5], GRID, QUADRATIC, 2)
    assert np.all(np.diff(s.active_nodes) > 0)
    assert s.phi.sum() == pytest.approx(1.0)
    full = s.full(GRID.n, "d2phi_dxy")
    assert full.shape == (GRID.n,)


def test_second_derivative_needs_quadratic():
    with pytest.raises(ConfigurationError):
        shape_rows([[0.5, 0.5]], GRID, LINEAR, 2)


def test_coverage_error_reports_point():
    sparse = GRID.with_support_scale(0.6)
    with pytest.raises(CoverageError) as err:
        shape_rows([[0.5, 0.5]], sparse)
    assert err.value.point is not None
    assert err.value.n_active < 6


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_partition_of_unity_anywhere(x, y):
    rows = shape_rows([[x, y]], GRID, QUADRATIC, 1)
    assert rows["phi"].sum() == pytest.approx(1.0, abs=1e-11)
    assert rows["x"].sum() == pytest.approx(0.0, abs=1e-8)
