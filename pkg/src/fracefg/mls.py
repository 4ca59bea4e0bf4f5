"""Moving least squares shape functions and their derivatives in 2D.

Shape functions are built from a cubic-spline tensor weight and a linear
(m = 3) or quadratic (m = 6) monomial basis.  Derivatives follow from
differentiating ``phi = p^T A^{-1} H`` with the identity
``d(A^{-1}) = -A^{-1} dA A^{-1}``, organised through the vector
``gamma = A^{-1} p`` and its derivatives.

All evaluators are vectorized over points: rows are returned as dense
``(P, n)`` arrays over every node of the cloud.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, CoverageError

__all__ = ["LINEAR", "QUADRATIC", "basis_size", "cubic_spline_weight",
           "tensor_weight", "ShapeEval", "shape_rows", "local_rows",
           "scatter", "evaluate_shape", "COND_LIMIT"]

LINEAR = 1
QUADRATIC = 2
COND_LIMIT = 1e12
_KEYS = ("phi", "x", "y", "xx", "yy", "xy")


def basis_size(order):
    if order == LINEAR:
        return 3
    if order == QUADRATIC:
        return 6
    raise ConfigurationError(f"unsupported basis order {order!r}")


def cubic_spline_weight(r):
    """Cubic spline weight and its first two derivatives in ``r``.

    At the breakpoints r = 0.5 and r = 1 the left branch is used; value and
    slope are continuous there, the second derivative is not.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("normalized distance must be non-negative")
    inner = r <= 0.5
    outer = (r > 0.5) & (r <= 1.0)
    w = np.where(inner, 2.0 / 3.0 - 4.0 * r ** 2 + 4.0 * r ** 3,
                 np.where(outer, 4.0 / 3.0 - 4.0 * r + 4.0 * r ** 2
                          - 4.0 / 3.0 * r ** 3, 0.0))
    dw = np.where(inner, -8.0 * r + 12.0 * r ** 2,
                  np.where(outer, -4.0 + 8.0 * r - 4.0 * r ** 2, 0.0))
    ddw = np.where(inner, -8.0 + 24.0 * r,
                   np.where(outer, 8.0 - 8.0 * r, 0.0))
    return w, dw, ddw


def tensor_weight(point, node, supports):
    """Tensor-product weight at ``point`` for one node, with derivatives.

    Returns a dict with keys ``phi`` (the weight), ``x``, ``y``, ``xx``,
    ``yy`` and ``xy``; derivatives are taken with respect to ``point``.
    """
    supports = np.asarray(supports, float).reshape(1, 2)
    if np.any(supports <= 0):
        raise ValueError("support lengths must be positive")
    w = _weights_local(np.asarray(point, float).reshape(1, 2),
                       np.asarray(node, float).reshape(1, 1, 2),
                       supports.reshape(1, 1, 2), 2)
    return {k: float(v[0, 0]) for k, v in w.items()}


def _monomials(xi, eta, order, deriv, s):
    """Basis values (and derivatives wrt physical x, y) at scaled coords."""
    one, zero = np.ones_like(xi), np.zeros_like(xi)
    s = np.broadcast_to(s, xi.shape)[..., None]
    if order == LINEAR:
        out = {"phi": np.stack([one, xi, eta], -1)}
        if deriv >= 1:
            out["x"] = np.stack([zero, one, zero], -1) / s
            out["y"] = np.stack([zero, zero, one], -1) / s
        return out
    out = {"phi": np.stack([one, xi, eta, xi * xi, xi * eta, eta * eta], -1)}
    if deriv >= 1:
        out["x"] = np.stack([zero, one, zero, 2 * xi, eta, zero], -1) / s
        out["y"] = np.stack([zero, zero, one, zero, xi, 2 * eta], -1) / s
    if deriv >= 2:
        s2 = s * s
        out["xx"] = np.stack([zero, zero, zero, 2 * one, zero, zero], -1) / s2
        out["yy"] = np.stack([zero, zero, zero, zero, zero, 2 * one], -1) / s2
        out["xy"] = np.stack([zero, zero, zero, zero, one, zero], -1) / s2
    return out


def _neighbors(pts, cloud):
    """Padded index array of nodes whose support contains each point."""
    sup = cloud.support
    dx = np.abs(pts[:, 0, None] - cloud.nodes[None, :, 0])
    dy = np.abs(pts[:, 1, None] - cloud.nodes[None, :, 1])
    mask = (dx < sup[None, :, 0]) & (dy < sup[None, :, 1])
    counts = mask.sum(axis=1)
    k = max(int(counts.max()), 1)
    rows, cols = np.nonzero(mask)
    start = np.concatenate([[0], np.cumsum(counts)[:-1]])
    slot = np.arange(len(rows)) - start[rows]
    idx = np.zeros((len(pts), k), dtype=np.intp)
    valid = np.zeros((len(pts), k), dtype=bool)
    idx[rows, slot] = cols
    valid[rows, slot] = True
    return idx, valid, counts


def local_rows(points, cloud, order=QUADRATIC, deriv=0, check=True):
    """MLS rows on the active nodes of each point.

    Returns ``(idx, rows)`` where ``idx`` is a padded ``(P, k)`` node index
    array and ``rows[key]`` holds the matching ``(P, k)`` values (zero on
    padding).  The polynomial basis is centred on each evaluation point and
    scaled by the local support, which keeps the moment matrix well
    conditioned; the centre is held fixed while differentiating, so the
    derivatives are exact.
    """
    if deriv not in (0, 1, 2):
        raise ConfigurationError("deriv must be 0, 1 or 2")
    if deriv == 2 and order != QUADRATIC:
        raise ConfigurationError(
            "second derivatives require the quadratic basis")
    pts = np.atleast_2d(np.asarray(points, float))
    m = basis_size(order)
    idx, valid, counts = _neighbors(pts, cloud)
    nodes = cloud.nodes[idx]                                   # (P, k, 2)
    sup = cloud.support[idx]
    W = _weights_local(pts, nodes, sup, deriv)
    for k in W:
        W[k] = np.where(valid, W[k], 0.0)
    scale = np.max(np.where(valid[..., None], sup, 0.0), axis=(1, 2))
    scale = np.where(scale > 0, scale, 1.0)
    rel = (nodes - pts[:, None, :]) / scale[:, None, None]
    Pn = _monomials(rel[..., 0], rel[..., 1], order, 0, 1.0)["phi"]
    PnT = Pn.transpose(0, 2, 1)
    A = {k: np.matmul(PnT * v[:, None, :], Pn) for k, v in W.items()}
    if check:
        _check_moment(pts, A["phi"], counts, m)
    zero = np.zeros(len(pts))
    pb = _monomials(zero, zero, order, deriv, scale)
    Ainv = np.linalg.inv(A["phi"])

    def mv(M, v):
        return np.einsum("pij,pj->pi", M, v)

    g = {"phi": mv(Ainv, pb["phi"])}
    if deriv >= 1:
        for k in ("x", "y"):
            g[k] = mv(Ainv, pb[k] - mv(A[k], g["phi"]))
    if deriv >= 2:
        for k, (i, j) in (("xx", ("x", "x")), ("yy", ("y", "y")),
                          ("xy", ("x", "y"))):
            rhs = (pb[k] - mv(A[i], g[j]) - mv(A[j], g[i])
                   - mv(A[k], g["phi"]))
            g[k] = mv(Ainv, rhs)
    G = {k: np.einsum("pki,pi->pk", Pn, v) for k, v in g.items()}
    out = {"phi": G["phi"] * W["phi"]}
    if deriv >= 1:
        for k in ("x", "y"):
            out[k] = G[k] * W["phi"] + G["phi"] * W[k]
    if deriv >= 2:
        for k, (i, j) in (("xx", ("x", "x")), ("yy", ("y", "y")),
                          ("xy", ("x", "y"))):
            out[k] = (G[k] * W["phi"] + G[i] * W[j] + G[j] * W[i]
                      + G["phi"] * W[k])
    return idx, out


def _weights_local(pts, nodes, sup, deriv):
    dx = pts[:, None, 0] - nodes[..., 0]
    dy = pts[:, None, 1] - nodes[..., 1]
    ax, ay = sup[..., 0], sup[..., 1]
    wx, dwx, ddwx = cubic_spline_weight(np.abs(dx) / ax)
    wy, dwy, ddwy = cubic_spline_weight(np.abs(dy) / ay)
    out = {"phi": wx * wy}
    if deriv >= 1:
        gx = dwx * np.sign(dx) / ax
        gy = dwy * np.sign(dy) / ay
        out["x"] = gx * wy
        out["y"] = wx * gy
    if deriv >= 2:
        out["xx"] = ddwx / ax ** 2 * wy
        out["yy"] = wx * ddwy / ay ** 2
        out["xy"] = gx * gy
    return out


def scatter(idx, values, n):
    """Dense ``(P, n)`` array from padded local rows."""
    dense = np.zeros((idx.shape[0], n))
    np.add.at(dense, (np.arange(idx.shape[0])[:, None], idx), values)
    return dense


def shape_rows(points, cloud, order=QUADRATIC, deriv=0, check=True):
    """Dense MLS shape-function rows at many points.

    Parameters
    ----------
    points : (P, 2) array_like
    cloud : NodeCloud
    order : int
        ``LINEAR`` or ``QUADRATIC`` basis.
    deriv : int
        0, 1 or 2; second derivatives need the quadratic basis.
    check : bool
        Verify coverage and conditioning of the moment matrix.

    Returns
    -------
    dict
        ``phi`` plus ``x``, ``y`` (deriv >= 1) and ``xx``, ``yy``, ``xy``
        (deriv == 2), each an array of shape (P, n).
    """
    idx, rows = local_rows(points, cloud, order, deriv, check)
    return {k: scatter(idx, v, cloud.n) for k, v in rows.items()}


def _check_moment(pts, A, counts, m):
    bad = np.flatnonzero(counts < m)
    if bad.size:
        i = bad[0]
        raise CoverageError(
            f"only {counts[i]} nodes cover point {pts[i].tolist()} "
            f"(basis needs {m})", point=pts[i], n_active=int(counts[i]))
    ev = np.linalg.eigvalsh(A)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.abs(ev[:, -1]) / np.abs(ev[:, 0])
    bad = np.flatnonzero(~(cond < COND_LIMIT))
    if bad.size:
        i = bad[0]
        raise CoverageError(
            f"moment matrix ill-conditioned (cond={cond[i]:.3g}) at "
            f"{pts[i].tolist()} with {counts[i]} active nodes",
            point=pts[i], n_active=int(counts[i]))


@dataclass(frozen=True)
class ShapeEval:
    """Shape rows at one point, restricted to the active nodes."""

    point: np.ndarray
    active_nodes: np.ndarray
    phi: np.ndarray
    dphi_dx: np.ndarray | None = None
    dphi_dy: np.ndarray | None = None
    d2phi_dxx: np.ndarray | None = None
    d2phi_dyy: np.ndarray | None = None
    d2phi_dxy: np.ndarray | None = None

    def full(self, n, name="phi"):
        """Scatter a row back onto all ``n`` nodes."""
        row = np.zeros(n)
        row[self.active_nodes] = getattr(self, name)
        return row


def evaluate_shape(point, cloud, order=QUADRATIC, deriv=0) -> ShapeEval:
    """Shape function row (and derivatives) at a single point."""
    idx, rows = local_rows(np.asarray(point, float).reshape(1, 2), cloud,
                           order, deriv)
    keep = np.flatnonzero(rows["phi"][0] != 0)
    order_ = np.argsort(idx[0, keep])
    keep = keep[order_]
    active = idx[0, keep]
    names = dict(x="dphi_dx", y="dphi_dy", xx="d2phi_dxx", yy="d2phi_dyy",
                 xy="d2phi_dxy")
    kw = {names[k]: v[0, keep] for k, v in rows.items() if k != "phi"}
    return ShapeEval(np.asarray(point, float), active, rows["phi"][0, keep],
                     **kw)
