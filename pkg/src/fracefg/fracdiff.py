"""Riesz-Caputo fractional derivatives of MLS approximants.

Along direction j the derivative at a point combines a left and a right
Caputo integral of the first derivative over the truncated horizon::

    D^a f(x) = (1 - a)/2 * [ lA**(a-1) int_{x-lA}^{x} f'(s) |x-s|**-a ds
                           + lB**(a-1) int_{x}^{x+lB} f'(s) |x-s|**-a ds ]

Mapping each side onto [-1, 1] absorbs the power-law singularity into a
Gauss-Jacobi weight and leaves the constant ``(1 - a) * 2**(a - 2)`` in
front of both sums, independent of the horizon length.  The integer-order
MLS row is evaluated afresh at every Jacobi abscissa.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigurationError, InvariantError
from .geometry import truncate_horizons
from .mls import LINEAR, QUADRATIC, local_rows
from .quadrature import jacobi_pair

__all__ = ["FracParams", "FracBMatrices", "ROW_NAMES", "attenuation",
           "side_samples", "frac_row", "frac_rows", "frac_b_all",
           "dump_rows_csv", "DEFAULT_GJP"]

DEFAULT_GJP = 30
ROW_NAMES = ("u_x", "u_y", "w_x", "w_y", "w_xx", "w_yy", "w_xy", "w_yx")


@dataclass(frozen=True)
class FracParams:
    alpha: float
    h_l: float
    n_gjp: int = DEFAULT_GJP

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigurationError(
                f"fractional order alpha must lie in (0, 1], got {self.alpha}")
        if not self.h_l > 0:
            raise ConfigurationError(f"h_l must be positive, got {self.h_l}")
        if int(self.n_gjp) != self.n_gjp or self.n_gjp < 1:
            raise ConfigurationError("n_gjp must be a positive integer")

    @property
    def is_local(self):
        return self.alpha == 1.0


@dataclass(frozen=True)
class FracBMatrices:
    """Fractional strain-displacement rows at one point.

    ``Bw_xy`` is the y-fractional derivative of dw/dx and ``Bw_yx`` the
    x-fractional derivative of dw/dy; they differ in general.
    """

    Bu_x: np.ndarray
    Bu_y: np.ndarray
    Bv_x: np.ndarray
    Bv_y: np.ndarray
    Bw_x: np.ndarray
    Bw_y: np.ndarray
    Bw_xx: np.ndarray
    Bw_yy: np.ndarray
    Bw_xy: np.ndarray
    Bw_yx: np.ndarray

    @classmethod
    def from_rows(cls, rows, i=0):
        return cls(Bu_x=rows["u_x"][i], Bu_y=rows["u_y"][i],
                   Bv_x=rows["u_x"][i], Bv_y=rows["u_y"][i],
                   Bw_x=rows["w_x"][i], Bw_y=rows["w_y"][i],
                   Bw_xx=rows["w_xx"][i], Bw_yy=rows["w_yy"][i],
                   Bw_xy=rows["w_xy"][i], Bw_yx=rows["w_yx"][i])

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def attenuation(xj, sj, l_A, l_B, alpha):
    """Power-law kernel weighting the interaction of ``xj`` with ``sj``."""
    xj = np.asarray(xj, float)
    sj = np.asarray(sj, float)
    d = xj - sj
    if np.any(d == 0):
        raise ValueError("attenuation kernel is unbounded at s = x")
    if np.any((d > 0) & (d >= l_A)) or np.any((d < 0) & (-d >= l_B)):
        raise ValueError("s lies outside the horizon (x - l_A, x + l_B)")
    length = np.where(d > 0, l_A, l_B)
    return 0.5 * (1.0 - alpha) * length ** (alpha - 1.0) * np.abs(d) ** -alpha


def side_samples(coord, l_A, l_B, alpha, n_gjp):
    """Abscissae and weights of both horizon sides for many points.

    Returns ``(s, w)`` with shapes ``(P, 2 * n_gjp)``: physical coordinates
    along the derivative direction and the matching weights, already
    multiplied by the constant ``(1 - alpha) * 2**(alpha - 2)``.
    """
    left, right = jacobi_pair(n_gjp, alpha)
    coord = np.asarray(coord, float)[:, None]
    lA = np.asarray(l_A, float)[:, None]
    lB = np.asarray(l_B, float)[:, None]
    sL = coord - 0.5 * lA * (1.0 - left.points[None, :])
    sR = coord + 0.5 * lB * (1.0 + right.points[None, :])
    c = (1.0 - alpha) * 2.0 ** (alpha - 2.0)
    s = np.hstack([sL, sR])
    w = c * np.broadcast_to(np.concatenate([left.weights, right.weights]),
                            s.shape)
    return s, w


def _accumulate(n_pts, n_q, idx, vals, wq, n):
    """Sum weighted local rows of every sample into dense rows per point."""
    owner = np.repeat(np.arange(n_pts), n_q)
    weighted = vals * wq.reshape(-1)[:, None]
    flat = (owner[:, None] * n + idx).ravel()
    return np.bincount(flat, weights=weighted.ravel(),
                       minlength=n_pts * n).reshape(n_pts, n)


def _accumulate_dense(n_pts, n_q, idx, vals, wq, n):
    """Same sum, but through full-length rows at every Jacobi sample.

    This is the operation counted by the cost model (a length-n row per
    sample); it is slower than :func:`_accumulate` and kept for timing.
    """
    dense = np.zeros((n_pts * n_q, n))
    rows = np.arange(n_pts * n_q)[:, None]
    np.add.at(dense, (rows, idx), vals)
    return np.einsum("pq,pqn->pn", wq.reshape(n_pts, n_q),
                     dense.reshape(n_pts, n_q, n))


def frac_row(point, direction, base_row_fn, horizon, alpha, n_gjp, n):
    """One fractional row from an arbitrary integer-derivative row function.

    ``base_row_fn(points)`` must return dense ``(Q, n)`` rows of the integer
    derivative at the given points.  ``horizon`` is ``(l_A, l_B)`` along
    ``direction`` (0 for x, 1 for y).
    """
    point = np.asarray(point, float)
    l_A, l_B = horizon
    if not (l_A > 0 and l_B > 0):
        raise InvariantError("horizon lengths must be positive")
    if alpha == 1.0:
        return base_row_fn(point[None, :])[0]
    s, w = side_samples(point[None, direction], [l_A], [l_B], alpha, n_gjp)
    samples = np.repeat(point[None, :], s.shape[1], axis=0)
    samples[:, direction] = s[0]
    return w[0] @ base_row_fn(samples)


def _check_inside(domain, pts):
    if not np.all(domain.contains(pts, tol=1e-9)):
        raise InvariantError("fractional horizon leaves the domain")


def frac_rows(points, params, cloud_w, cloud_u=None, horizons=None,
              chunk=48, dense=False):
    """All fractional rows at many points as dense ``(P, n)`` arrays.

    Parameters
    ----------
    points : (P, 2) array
    params : FracParams
    cloud_w : NodeCloud
        Cloud for the quadratic (transverse) approximation.
    cloud_u : NodeCloud, optional
        Cloud for the linear (in-plane) approximation; defaults to
        ``cloud_w``.
    horizons : (P, 4) array, optional
        ``[l_A_x, l_B_x, l_A_y, l_B_y]``; truncated from the domain when
        omitted.
    dense : bool
        Accumulate through full-length sample rows, as in the operation
        count of :func:`fracefg.solver.flop_counts`.  Same result.

    Returns
    -------
    dict
        Keys in :data:`ROW_NAMES`; ``w_xy`` is D^a_y(dw/dx) and ``w_yx`` is
        D^a_x(dw/dy).
    """
    cloud_u = cloud_w if cloud_u is None else cloud_u
    pts = np.atleast_2d(np.asarray(points, float))
    n = cloud_w.n
    if params.is_local:
        idx_w, rw = local_rows(pts, cloud_w, QUADRATIC, 2)
        idx_u, ru = local_rows(pts, cloud_u, LINEAR, 1)
        ones = np.ones((len(pts), 1))
        acc = {}
        for name, key, idx, rows in (("u_x", "x", idx_u, ru),
                                     ("u_y", "y", idx_u, ru),
                                     ("w_x", "x", idx_w, rw),
                                     ("w_y", "y", idx_w, rw),
                                     ("w_xx", "xx", idx_w, rw),
                                     ("w_yy", "yy", idx_w, rw),
                                     ("w_xy", "xy", idx_w, rw),
                                     ("w_yx", "xy", idx_w, rw)):
            acc[name] = _accumulate(len(pts), 1, idx, rows[key], ones, n)
        return acc
    if horizons is None:
        horizons = truncate_horizons(pts, params.h_l, cloud_w.domain)
    acc = _accumulate_dense if dense else _accumulate
    out = {k: np.empty((len(pts), n)) for k in ROW_NAMES}
    for lo in range(0, len(pts), chunk):
        sl = slice(lo, lo + chunk)
        p, hz = pts[sl], horizons[sl]
        # direction x: D^a_x of u, w, dw/dx, dw/dy
        for axis, names in ((0, ("u_x", "w_x", "w_xx", "w_yx")),
                            (1, ("u_y", "w_y", "w_yy", "w_xy"))):
            s, w = side_samples(p[:, axis], hz[:, 2 * axis],
                                hz[:, 2 * axis + 1], params.alpha,
                                params.n_gjp)
            q = s.shape[1]
            samples = np.repeat(p, q, axis=0)
            samples[:, axis] = s.ravel()
            _check_inside(cloud_w.domain, samples)
            key1 = "x" if axis == 0 else "y"
            key2 = "xx" if axis == 0 else "yy"
            idx_u, ru = local_rows(samples, cloud_u, LINEAR, 1)
            idx_w, rw = local_rows(samples, cloud_w, QUADRATIC, 2)
            out[names[0]][sl] = acc(len(p), q, idx_u, ru[key1], w, n)
            out[names[1]][sl] = acc(len(p), q, idx_w, rw[key1], w, n)
            out[names[2]][sl] = acc(len(p), q, idx_w, rw[key2], w, n)
            out[names[3]][sl] = acc(len(p), q, idx_w, rw["xy"], w, n)
    return out


def frac_b_all(point, params, cloud_w, cloud_u=None) -> FracBMatrices:
    """All ten fractional rows at a single interior point."""
    rows = frac_rows(np.asarray(point, float).reshape(1, 2), params, cloud_w,
                     cloud_u)
    return FracBMatrices.from_rows(rows)


def dump_rows_csv(path, points, rows):
    """Write per-point fractional rows as ``x, y, row, node, value``."""
    pts = np.atleast_2d(points)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "row", "node", "value"])
        for name in ROW_NAMES:
            for i, p in enumerate(pts):
                for j in np.flatnonzero(rows[name][i]):
                    writer.writerow([f"{p[0]:.12g}", f"{p[1]:.12g}", name,
                                     j, f"{rows[name][i, j]:.17g}"])
