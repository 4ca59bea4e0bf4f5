"""Node clouds, background integration meshes and truncated horizons."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import IntFlag

import numpy as np

from .errors import ConfigurationError, InvariantError
from .quadrature import gauss_legendre

__all__ = [
    "Boundary", "Rectangle", "Circle", "NodeCloud", "BackgroundMesh",
    "Horizon", "make_uniform_grid", "make_nonuniform_grid",
    "make_circular_cloud", "graded_breaks", "rectangle_mesh", "circle_mesh",
    "truncate_horizon", "truncate_horizons", "QUADRATIC_SUPPORT",
    "LINEAR_SUPPORT",
]

QUADRATIC_SUPPORT = 2.5
LINEAR_SUPPORT = 1.5
HORIZON_FLOOR = 1e-6


class Boundary(IntFlag):
    NONE = 0
    LEFT = 1
    RIGHT = 2
    BOTTOM = 4
    TOP = 8
    RIM = 16


@dataclass(frozen=True)
class Rectangle:
    a: float
    b: float

    def contains(self, pts, tol=1e-12):
        pts = np.atleast_2d(pts)
        return ((pts[:, 0] >= -tol) & (pts[:, 0] <= self.a + tol)
                & (pts[:, 1] >= -tol) & (pts[:, 1] <= self.b + tol))

    def chord(self, pts, axis):
        """Lower and upper extent of the domain along ``axis`` through pts."""
        pts = np.atleast_2d(pts)
        hi = self.a if axis == 0 else self.b
        return np.zeros(len(pts)), np.full(len(pts), hi)

    @property
    def center(self):
        return np.array([0.5 * self.a, 0.5 * self.b])

    @property
    def length(self):
        return self.a


@dataclass(frozen=True)
class Circle:
    radius: float

    def contains(self, pts, tol=1e-12):
        pts = np.atleast_2d(pts)
        return np.hypot(pts[:, 0], pts[:, 1]) <= self.radius * (1 + tol) + tol

    def chord(self, pts, axis):
        pts = np.atleast_2d(pts)
        other = pts[:, 1 - axis]
        half = np.sqrt(np.maximum(self.radius ** 2 - other ** 2, 0.0))
        return -half, half

    @property
    def center(self):
        return np.zeros(2)

    @property
    def length(self):
        return self.radius


@dataclass(frozen=True)
class NodeCloud:
    """Scattered nodes with per-node spacing, support lengths and tags.

    ``spacing`` is the local nodal spacing along x and y; the MLS support of
    node i along each axis is ``support_scale * spacing[i]``.
    """

    nodes: np.ndarray
    spacing: np.ndarray
    boundary: np.ndarray
    domain: Rectangle | Circle
    support_scale: float = QUADRATIC_SUPPORT

    def __post_init__(self):
        for arr in (self.nodes, self.spacing, self.boundary):
            arr.setflags(write=False)
        if np.any(self.spacing <= 0):
            raise ConfigurationError("nodal spacing must be strictly positive")
        if not np.all(self.domain.contains(self.nodes, tol=1e-9)):
            raise ConfigurationError("node cloud has nodes outside the domain")

    @property
    def n(self):
        return len(self.nodes)

    @property
    def support(self):
        return self.support_scale * self.spacing

    @property
    def support_x(self):
        return self.support[:, 0]

    @property
    def support_y(self):
        return self.support[:, 1]

    def with_support_scale(self, scale):
        return replace(self, support_scale=float(scale))

    def boundary_indices(self, mask=None):
        flags = self.boundary if mask is None else self.boundary & int(mask)
        return np.flatnonzero(flags)


@dataclass(frozen=True)
class BackgroundMesh:
    """Integration cells with flattened Gauss points.

    ``weights`` already include the Gauss weight and the cell Jacobian, so a
    domain integral is ``sum(f(points) * weights)``.
    """

    corners: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    jacobians: np.ndarray
    order: int
    cell_of_point: np.ndarray = field(repr=False)

    @property
    def n_cells(self):
        return len(self.corners)

    @property
    def points_per_cell(self):
        return self.order ** 2

    def integrate(self, values):
        return np.tensordot(self.weights, values, axes=(0, 0))


@dataclass(frozen=True)
class Horizon:
    l_A_x: float
    l_B_x: float
    l_A_y: float
    l_B_y: float
    h_l: float


def _check_breaks(breaks, lo, hi, name):
    breaks = np.asarray(breaks, dtype=float)
    if breaks.ndim != 1 or len(breaks) < 3:
        raise ConfigurationError(f"{name} needs at least 3 values")
    if np.any(np.diff(breaks) <= 0):
        raise ConfigurationError(f"{name} must be strictly increasing")
    if not (np.isclose(breaks[0], lo) and np.isclose(breaks[-1], hi)):
        raise ConfigurationError(f"{name} must span [{lo}, {hi}]")
    return breaks


def _local_spacing(breaks, coords):
    """Largest adjacent break interval around each coordinate."""
    gaps = np.diff(breaks)
    idx = np.searchsorted(breaks, coords)
    idx = np.clip(idx, 0, len(breaks) - 1)
    exact = np.isclose(breaks[idx], coords, rtol=0, atol=1e-12 * np.ptp(breaks))
    left = np.where(idx > 0, gaps[np.clip(idx - 1, 0, len(gaps) - 1)], 0.0)
    right = np.where(idx < len(gaps), gaps[np.clip(idx, 0, len(gaps) - 1)], 0.0)
    # coordinate strictly inside a gap: that gap bounds both sides
    inside = gaps[np.clip(idx - 1, 0, len(gaps) - 1)]
    return np.where(exact, np.maximum(left, right), inside)


def make_nonuniform_grid(a, b, x_breaks, y_breaks,
                         support_scale=QUADRATIC_SUPPORT) -> NodeCloud:
    """Tensor-product cloud on [0, a] x [0, b] from break lists."""
    xb = _check_breaks(x_breaks, 0.0, a, "x_breaks")
    yb = _check_breaks(y_breaks, 0.0, b, "y_breaks")
    X, Y = np.meshgrid(xb, yb, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    sx = _local_spacing(xb, nodes[:, 0])
    sy = _local_spacing(yb, nodes[:, 1])
    tags = np.zeros(len(nodes), dtype=np.int64)
    tol = 1e-12 * max(a, b)
    tags[np.abs(nodes[:, 0]) <= tol] |= Boundary.LEFT
    tags[np.abs(nodes[:, 0] - a) <= tol] |= Boundary.RIGHT
    tags[np.abs(nodes[:, 1]) <= tol] |= Boundary.BOTTOM
    tags[np.abs(nodes[:, 1] - b) <= tol] |= Boundary.TOP
    return NodeCloud(nodes, np.column_stack([sx, sy]), tags,
                     Rectangle(float(a), float(b)), float(support_scale))


def make_uniform_grid(a, b, nx, ny, support_scale=QUADRATIC_SUPPORT):
    """(nx + 1) x (ny + 1) equally spaced nodes on [0, a] x [0, b]."""
    if int(nx) != nx or int(ny) != ny or nx < 2 or ny < 2:
        raise ConfigurationError(
            f"need at least 2 intervals per axis for an invertible moment "
            f"matrix, got nx={nx}, ny={ny}")
    return make_nonuniform_grid(a, b, np.linspace(0, a, int(nx) + 1),
                                np.linspace(0, b, int(ny) + 1), support_scale)


def graded_breaks(radius, n, grading=1.0):
    """Breaks on [-radius, radius] refined toward both ends.

    ``grading = 0`` is uniform; ``grading = 1`` is a full cosine (Chebyshev-
    Lobatto) spacing; values in between blend the two.
    """
    if n < 2:
        raise ConfigurationError("graded breaks need n >= 2")
    u = np.linspace(-1.0, 1.0, int(n) + 1)
    cheb = -np.cos(np.pi * (u + 1.0) / 2.0)
    t = (1.0 - grading) * u + grading * cheb
    t[0], t[-1] = -1.0, 1.0
    return radius * t


def make_circular_cloud(radius, breaks, support_scale=QUADRATIC_SUPPORT,
                        grading=0.5, min_gap=0.25):
    """Axis-aligned node lines inside a disk, graded toward the rim.

    Parameters
    ----------
    radius : float
    breaks : int or array_like
        Either the number of intervals of the graded line set (see
        :func:`graded_breaks`) or explicit line coordinates in
        ``[-radius, radius]``.
    grading : float
        Grading blend used when ``breaks`` is an int.
    min_gap : float
        Interior grid nodes closer to the rim than ``min_gap`` times the
        local line spacing are dropped; the rim node on the same line takes
        their place.
    """
    if radius <= 0:
        raise ConfigurationError("radius must be positive")
    if np.isscalar(breaks):
        if int(breaks) < 4:
            raise ConfigurationError(
                "circular cloud needs at least 4 line intervals for coverage")
        t = graded_breaks(radius, int(breaks), grading)
    else:
        t = np.asarray(breaks, dtype=float)
        if np.any(np.abs(t) > radius * (1 + 1e-12)):
            raise ConfigurationError("grading breaks fall outside the circle")
        t = _check_breaks(t, -radius, radius, "breaks")
        if len(t) < 5:
            raise ConfigurationError(
                "circular cloud needs at least 4 line intervals for coverage")
    gaps = _local_spacing(t, t)
    interior = []
    spacing = []
    for i, x in enumerate(t[1:-1], 1):
        for j, y in enumerate(t[1:-1], 1):
            r = np.hypot(x, y)
            local = min(gaps[i], gaps[j])
            if r < radius - min_gap * local:
                interior.append((x, y))
                spacing.append((gaps[i], gaps[j]))
    rim = []
    rim_spacing = []
    for k, c in enumerate(t[1:-1], 1):
        half = np.sqrt(radius ** 2 - c ** 2)
        for s in (-1.0, 1.0):
            rim.append((s * half, c))
            rim.append((c, s * half))
            loc = _local_spacing(t, np.array([half]))[0]
            rim_spacing.append((loc, gaps[k]))
            rim_spacing.append((gaps[k], loc))
    for p in ((radius, 0.0), (-radius, 0.0), (0.0, radius), (0.0, -radius)):
        rim.append(p)
        rim_spacing.append((gaps[0], gaps[0]))
    rim = np.array(rim)
    rim_spacing = np.array(rim_spacing)
    # drop duplicates (lines through the axes hit the same rim point twice)
    _, keep = np.unique(np.round(rim / radius, 12), axis=0, return_index=True)
    keep = np.sort(keep)
    rim, rim_spacing = rim[keep], rim_spacing[keep]
    nodes = np.vstack([np.array(interior).reshape(-1, 2), rim])
    spacing = np.vstack([np.array(spacing).reshape(-1, 2), rim_spacing])
    tags = np.zeros(len(nodes), dtype=np.int64)
    tags[len(interior):] = Boundary.RIM
    return NodeCloud(nodes, spacing, tags, Circle(float(radius)),
                     float(support_scale))


def _tensor_cells(xb, yb, order):
    rule = gauss_legendre(order)
    g, w = rule.points, rule.weights
    x0, x1 = xb[:-1], xb[1:]
    y0, y1 = yb[:-1], yb[1:]
    X0, Y0 = np.meshgrid(x0, y0, indexing="ij")
    X1, Y1 = np.meshgrid(x1, y1, indexing="ij")
    X0, Y0, X1, Y1 = X0.ravel(), Y0.ravel(), X1.ravel(), Y1.ravel()
    hx, hy = 0.5 * (X1 - X0), 0.5 * (Y1 - Y0)
    gx, gy = np.meshgrid(g, g, indexing="ij")
    wx, wy = np.meshgrid(w, w, indexing="ij")
    px = (0.5 * (X0 + X1))[:, None] + hx[:, None] * gx.ravel()[None, :]
    py = (0.5 * (Y0 + Y1))[:, None] + hy[:, None] * gy.ravel()[None, :]
    jac = hx * hy
    weights = jac[:, None] * (wx * wy).ravel()[None, :]
    corners = np.stack([np.column_stack([X0, Y0]), np.column_stack([X1, Y0]),
                        np.column_stack([X1, Y1]), np.column_stack([X0, Y1])],
                       axis=1)
    return corners, px, py, weights, jac


def rectangle_mesh(x_breaks, y_breaks, order=4) -> BackgroundMesh:
    """Axis-aligned cells on the break lines with order x order points."""
    xb = np.asarray(x_breaks, float)
    yb = np.asarray(y_breaks, float)
    corners, px, py, weights, jac = _tensor_cells(xb, yb, order)
    cell = np.repeat(np.arange(len(corners)), order * order)
    pts = np.column_stack([px.ravel(), py.ravel()])
    return BackgroundMesh(corners, pts, weights.ravel(),
                          np.repeat(jac, order * order), order, cell)


def circle_mesh(radius, n_x, n_theta, order=4) -> BackgroundMesh:
    """Disk cells from a strip mapping with the rim represented exactly.

    A parameter cell ``(s, t)`` in ``[-1, 1] x [-pi/2, pi/2]`` maps to
    ``x = R cos(t) s``, ``y = R sin(t)``.  The Jacobian ``R**2 cos(t)**2``
    is smooth, so Gauss-Legendre stays accurate right up to the rim.
    """
    if radius <= 0 or n_x < 1 or n_theta < 1:
        raise ConfigurationError("invalid circle mesh parameters")
    sb = np.linspace(-1.0, 1.0, int(n_x) + 1)
    tb = np.linspace(-0.5 * np.pi, 0.5 * np.pi, int(n_theta) + 1)
    _, ps, pt, weights, _ = _tensor_cells(sb, tb, order)
    x = radius * np.cos(pt) * ps
    y = radius * np.sin(pt)
    jac_pts = radius ** 2 * np.cos(pt) ** 2
    weights = weights * jac_pts
    S0, T0 = np.meshgrid(sb[:-1], tb[:-1], indexing="ij")
    S1, T1 = np.meshgrid(sb[1:], tb[1:], indexing="ij")

    def phys(s, t):
        return np.column_stack([radius * np.cos(t.ravel()) * s.ravel(),
                                radius * np.sin(t.ravel())])

    corners = np.stack([phys(S0, T0), phys(S1, T0), phys(S1, T1),
                        phys(S0, T1)], axis=1)
    cell = np.repeat(np.arange(len(corners)), order * order)
    return BackgroundMesh(corners, np.column_stack([x.ravel(), y.ravel()]),
                          weights.ravel(), jac_pts.ravel(), order, cell)


def truncate_horizons(points, h_l, domain, floor=HORIZON_FLOOR):
    """Vectorized horizon truncation; returns (P, 4) [lAx, lBx, lAy, lBy]."""
    if h_l <= 0:
        raise ConfigurationError("h_l must be positive")
    pts = np.atleast_2d(np.asarray(points, float))
    if not np.all(domain.contains(pts, tol=1e-9)):
        raise InvariantError("horizon requested for a point outside the domain")
    out = np.empty((len(pts), 4))
    eps = floor * h_l
    for axis in (0, 1):
        lo, hi = domain.chord(pts, axis)
        c = pts[:, axis]
        out[:, 2 * axis] = np.clip(c - lo, eps, h_l)
        out[:, 2 * axis + 1] = np.clip(hi - c, eps, h_l)
    return out


def truncate_horizon(point, h_l, domain, floor=HORIZON_FLOOR) -> Horizon:
    """Horizon lengths at one point, clipped to the domain boundary."""
    row = truncate_horizons(np.asarray(point, float)[None, :], h_l, domain,
                            floor)[0]
    return Horizon(*map(float, row), h_l=float(h_l))
