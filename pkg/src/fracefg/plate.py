"""Fractional-order Kirchhoff plate: constitutive law, strain rows and system.

Global unknowns are ordered in blocks ``[u0 (n), v0 (n), w0 (n)]``.  The
in-plane fields use a linear MLS basis on a tighter support, the transverse
field a quadratic one.  Strains at a point are ``Z2 (B_L + B_N / 2) u_g``
with the von Karman terms collected in ``B_N``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .fracdiff import FracBMatrices, FracParams, frac_rows
from .geometry import BackgroundMesh, Circle, LINEAR_SUPPORT, NodeCloud
from .mls import LINEAR, QUADRATIC, shape_rows

__all__ = ["Material", "PlateCase", "SystemMatrices", "PlateModel",
           "constitutive", "dt_matrix", "bl_matrix", "bn_matrix", "assemble",
           "apply_essential_bcs", "recover_strains"]


@dataclass(frozen=True)
class Material:
    E: float
    nu: float

    def __post_init__(self):
        if not self.E > 0:
            raise ConfigurationError("Young's modulus must be positive")
        if not -1.0 < self.nu < 0.5:
            raise ConfigurationError("Poisson ratio must lie in (-1, 0.5)")


def constitutive(material: Material) -> np.ndarray:
    """Plane-stress isotropic matrix relating [exx, eyy, gxy] to stress."""
    E, nu = material.E, material.nu
    f = E / (1.0 - nu ** 2)
    return np.array([[f, nu * f, 0.0],
                     [nu * f, f, 0.0],
                     [0.0, 0.0, E / (2.0 * (1.0 + nu))]])


def dt_matrix(material: Material, h: float) -> np.ndarray:
    """Thickness-integrated 6x6 rigidity: membrane h*C, bending h^3/12*C."""
    if not h > 0:
        raise ConfigurationError("thickness must be positive")
    C = constitutive(material)
    D = np.zeros((6, 6))
    D[:3, :3] = h * C
    D[3:, 3:] = h ** 3 / 12.0 * C
    return D


def bl_matrix(fb: FracBMatrices) -> np.ndarray:
    """Linear strain-displacement matrix (6 x 3n) at one point."""
    n = len(fb.Bw_x)
    B = np.zeros((6, 3 * n))
    u, v, w = slice(0, n), slice(n, 2 * n), slice(2 * n, 3 * n)
    B[0, u] = fb.Bu_x
    B[1, v] = fb.Bv_y
    B[2, u] = fb.Bu_y
    B[2, v] = fb.Bv_x
    B[3, w] = fb.Bw_xx
    B[4, w] = fb.Bw_yy
    B[5, w] = fb.Bw_xy + fb.Bw_yx
    return B


def bn_matrix(fb: FracBMatrices, state) -> np.ndarray:
    """Von Karman strain matrix (6 x 3n), linear in the current state."""
    n = len(fb.Bw_x)
    w = np.asarray(state, float)[2 * n:]
    gx = fb.Bw_x @ w
    gy = fb.Bw_y @ w
    B = np.zeros((6, 3 * n))
    ws = slice(2 * n, 3 * n)
    B[0, ws] = gx * fb.Bw_x
    B[1, ws] = gy * fb.Bw_y
    B[2, ws] = gx * fb.Bw_y + gy * fb.Bw_x
    return B


@dataclass
class PlateCase:
    """Geometry, material, load, discretization and fractional parameters.

    ``cloud`` carries the quadratic-basis support used for w0; the in-plane
    approximation uses the same nodes with ``inplane_support`` as scale.
    """

    cloud: NodeCloud
    mesh: BackgroundMesh
    material: Material
    h: float
    frac: FracParams
    q0: float
    mode: str = "linear"
    inplane_support: float = LINEAR_SUPPORT
    name: str = ""

    def __post_init__(self):
        if self.mode not in ("linear", "nonlinear"):
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if not self.h > 0:
            raise ConfigurationError("thickness must be positive")
        span = (2.0 * self.domain.radius if isinstance(self.domain, Circle)
                else min(self.domain.a, self.domain.b))
        if span / self.h < 50.0 - 1e-9:
            raise ConfigurationError(
                f"thin-plate kinematics need a/h >= 50, got {span / self.h}")

    @property
    def domain(self):
        return self.cloud.domain

    @property
    def n(self):
        return self.cloud.n

    @property
    def gdof(self):
        return 3 * self.cloud.n

    @property
    def a(self):
        d = self.domain
        return d.radius if isinstance(d, Circle) else d.a

    @property
    def probe(self):
        return self.domain.center

    @property
    def cloud_u(self):
        return self.cloud.with_support_scale(self.inplane_support)


@dataclass
class SystemMatrices:
    K: np.ndarray
    F: np.ndarray
    constrained_rows: np.ndarray = field(default_factory=lambda: np.array([], int))

    @property
    def gdof(self):
        return len(self.F)


class PlateModel:
    """Precomputed fractional rows at every Gauss point of a case.

    The rows do not depend on the displacement state, so the nonlinear
    iterations reuse them; only state-dependent products are recomputed.
    """

    def __init__(self, case: PlateCase):
        self.case = case
        n = case.n
        self.n = n
        pts = case.mesh.points
        self.wts = case.mesh.weights
        self.rows = frac_rows(pts, case.frac, case.cloud, case.cloud_u)
        self.phi_w = shape_rows(pts, case.cloud, QUADRATIC, 0)["phi"]
        self.C = constitutive(case.material)
        self.hC = case.h * self.C
        self.dC = case.h ** 3 / 12.0 * self.C
        self.K_lin = self._linear_stiffness()
        F = np.zeros(case.gdof)
        F[2 * n:] = self.wts @ self.phi_w
        self.F_unit = F
        self._bc = None

    @property
    def F(self):
        """Load vector of the current case (``q0`` times the unit load)."""
        return self.case.q0 * self.F_unit

    def with_case(self, case: PlateCase) -> "PlateModel":
        """Reuse the precomputed rows for a case that differs only in load,
        mode or name."""
        c = self.case
        same = (case.cloud is c.cloud and case.mesh is c.mesh
                and case.material == c.material and case.h == c.h
                and case.frac == c.frac
                and case.inplane_support == c.inplane_support)
        if not same:
            raise ConfigurationError(
                "cached operator does not match the case discretization")
        other = object.__new__(PlateModel)
        other.__dict__.update(self.__dict__)
        other.case = case
        return other

    # -- strain pieces -------------------------------------------------
    def _membrane_rows(self):
        r = self.rows
        return r["u_x"], r["u_y"]

    def _curvature_rows(self):
        r = self.rows
        return r["w_xx"], r["w_yy"], r["w_xy"] + r["w_yx"]

    def _linear_stiffness(self):
        n = self.n
        w = self.wts[:, None]
        Ux, Uy = self._membrane_rows()
        hC = self.hC
        K = np.zeros((3 * n, 3 * n))
        # membrane strain rows as (3, P, 2n) acting on [u, v]
        Bm = [np.hstack([Ux, np.zeros_like(Ux)]),
              np.hstack([np.zeros_like(Uy), Uy]),
              np.hstack([Uy, Ux])]
        uv = slice(0, 2 * n)
        for i in range(3):
            for j in range(3):
                if hC[i, j] != 0.0:
                    K[uv, uv] += hC[i, j] * (Bm[i] * w).T @ Bm[j]
        Bk = self._curvature_rows()
        ws = slice(2 * n, 3 * n)
        for i in range(3):
            for j in range(3):
                if self.dC[i, j] != 0.0:
                    K[ws, ws] += self.dC[i, j] * (Bk[i] * w).T @ Bk[j]
        return K

    def membrane_strain(self, state):
        n = self.n
        u, v, w = state[:n], state[n:2 * n], state[2 * n:]
        Ux, Uy = self._membrane_rows()
        gx = self.rows["w_x"] @ w
        gy = self.rows["w_y"] @ w
        eps = np.column_stack([Ux @ u + 0.5 * gx * gx,
                               Uy @ v + 0.5 * gy * gy,
                               Uy @ u + Ux @ v + gx * gy])
        return eps, gx, gy

    def internal_force(self, state, beta=1.0):
        """Internal force vector ``int (B_L + beta B_N)^T D eps dS``.

        ``beta = 1`` is the gradient of the strain energy; ``beta = 0.5``
        reproduces ``K_secant(u) u`` of the symmetric secant stiffness.
        """
        n = self.n
        state = np.asarray(state, float)
        eps, gx, gy = self.membrane_strain(state)
        N = (eps @ self.hC.T) * self.wts[:, None]
        Ux, Uy = self._membrane_rows()
        Wx, Wy = self.rows["w_x"], self.rows["w_y"]
        R = np.empty(3 * n)
        R[:n] = Ux.T @ N[:, 0] + Uy.T @ N[:, 2]
        R[n:2 * n] = Uy.T @ N[:, 1] + Ux.T @ N[:, 2]
        Kb = self.K_lin[2 * n:, 2 * n:]
        R[2 * n:] = Kb @ state[2 * n:] + beta * (
            Wx.T @ (N[:, 0] * gx + N[:, 2] * gy)
            + Wy.T @ (N[:, 1] * gy + N[:, 2] * gx))
        return R

    def tangent(self, state, beta=1.0):
        """Exact derivative of :meth:`internal_force` with respect to state.

        Every nonlinear term is a sum of ``R_a^T diag(c) R_b`` products of
        the fractional gradient rows, so the per-point coefficients are
        formed first and only six dense products are needed.
        """
        n = self.n
        state = np.asarray(state, float)
        eps, gx, gy = self.membrane_strain(state)
        w = self.wts
        H = self.hC[None, :, :] * w[:, None, None]              # (P, 3, 3)
        Nw = (eps @ self.hC.T) * w[:, None]
        Ux, Uy = self._membrane_rows()
        Wx, Wy = self.rows["w_x"], self.rows["w_y"]
        zero = np.zeros_like(gx)
        # d(membrane strain)/dw = a (x) Wx + b (x) Wy, componentwise
        a = np.stack([gx, zero, gy], axis=1)
        b = np.stack([zero, gy, gx], axis=1)
        Ha = np.einsum("pij,pj->pi", H, a)
        Hb = np.einsum("pij,pj->pi", H, b)
        T = [Ha[:, [i]] * Wx + Hb[:, [i]] * Wy for i in range(3)]
        K = self.K_lin.copy()
        us, vs, ws = slice(0, n), slice(n, 2 * n), slice(2 * n, 3 * n)
        K[us, ws] += np.vstack([Ux, Uy]).T @ np.vstack([T[0], T[2]])
        K[vs, ws] += np.vstack([Uy, Ux]).T @ np.vstack([T[1], T[2]])
        K[ws, us] += beta * K[us, ws].T
        K[ws, vs] += beta * K[vs, ws].T
        cxx = np.einsum("pi,pi->p", a, Ha) + Nw[:, 0]
        cxy = np.einsum("pi,pi->p", a, Hb) + Nw[:, 2]
        cyy = np.einsum("pi,pi->p", b, Hb) + Nw[:, 1]
        Kxy = Wx.T @ (cxy[:, None] * Wy)
        K[ws, ws] += beta * (Wx.T @ (cxx[:, None] * Wx) + Kxy + Kxy.T
                             + Wy.T @ (cyy[:, None] * Wy))
        return K

    def secant_stiffness(self, state, beta=0.5, chunk=128):
        """Secant stiffness assembled point by point from B matrices.

        Returns ``(B_L + beta B_N)^T D_t (B_L + B_N/2)``, so that
        ``K(u) u`` equals :meth:`internal_force` with the same ``beta``.  The
        default ``beta = 0.5`` is the symmetric secant; ``beta = 1`` is the
        (unsymmetric) secant of the strain-energy gradient.  A zero state
        returns the linear stiffness.
        """
        n = self.n
        D = dt_matrix(self.case.material, self.case.h)
        state = np.zeros(3 * n) if state is None else np.asarray(state, float)
        w = state[2 * n:]
        gx = self.rows["w_x"] @ w
        gy = self.rows["w_y"] @ w
        K = np.zeros((3 * n, 3 * n))
        r = self.rows
        P = len(self.wts)
        for lo in range(0, P, chunk):
            sl = slice(lo, min(lo + chunk, P))
            m = sl.stop - sl.start
            B = np.zeros((m, 6, 3 * n))
            B[:, 0, :n] = r["u_x"][sl]
            B[:, 1, n:2 * n] = r["u_y"][sl]
            B[:, 2, :n] = r["u_y"][sl]
            B[:, 2, n:2 * n] = r["u_x"][sl]
            B[:, 3, 2 * n:] = r["w_xx"][sl]
            B[:, 4, 2 * n:] = r["w_yy"][sl]
            B[:, 5, 2 * n:] = r["w_xy"][sl] + r["w_yx"][sl]
            BN = np.zeros((m, 3, n))
            BN[:, 0] = gx[sl, None] * r["w_x"][sl]
            BN[:, 1] = gy[sl, None] * r["w_y"][sl]
            BN[:, 2] = gx[sl, None] * r["w_y"][sl] + gy[sl, None] * r["w_x"][sl]
            left = B.copy()
            B[:, :3, 2 * n:] += 0.5 * BN
            left[:, :3, 2 * n:] += beta * BN
            DB = np.einsum("ij,pjk->pik", D, B) * self.wts[sl, None, None]
            K += left.reshape(-1, 3 * n).T @ DB.reshape(-1, 3 * n)
        return K

    def frac_b(self, i) -> FracBMatrices:
        return FracBMatrices.from_rows(self.rows, i)

    # -- boundary collocation -----------------------------------------
    def collocation(self):
        """Boundary node indices and the MLS rows evaluated there."""
        if self._bc is None:
            case = self.case
            idx = case.cloud.boundary_indices()
            if idx.size == 0:
                raise ConfigurationError("no boundary nodes are tagged")
            xb = case.cloud.nodes[idx]
            phi_u = shape_rows(xb, case.cloud_u, LINEAR, 0)["phi"]
            phi_w = shape_rows(xb, case.cloud, QUADRATIC, 0)["phi"]
            self._bc = (idx, phi_u, phi_w)
        return self._bc

    def constrain(self, K, rhs, state=None):
        """Replace boundary-node rows by collocation rows (in place).

        The right-hand side of each constraint row is ``-Phi(x_b) state`` so
        that ``state + solution`` reconstructs zero at every boundary node.
        """
        n = self.n
        idx, phi_u, phi_w = self.collocation()
        rows = []
        for f, phi in ((0, phi_u), (1, phi_u), (2, phi_w)):
            r = f * n + idx
            scale = np.maximum(np.abs(K[r]).max(axis=1), 1.0)
            K[r] = 0.0
            K[r, f * n:(f + 1) * n] = phi * scale[:, None]
            cur = 0.0 if state is None else phi @ state[f * n:(f + 1) * n]
            rhs[r] = -cur * scale
            rows.append(r)
        return np.concatenate(rows)

    def deflection(self, state, points=None):
        pts = self.case.probe[None, :] if points is None else np.atleast_2d(points)
        phi = shape_rows(pts, self.case.cloud, QUADRATIC, 0)["phi"]
        return phi @ np.asarray(state)[2 * self.n:]


def assemble(case: PlateCase, state=None, model: PlateModel | None = None):
    """Secant stiffness and load vector of a case at the given state.

    A zero (or omitted) state yields the linear system.
    """
    model = PlateModel(case) if model is None else model
    if state is None or not np.any(state):
        K = model.K_lin.copy()
    else:
        K = model.secant_stiffness(state)
    return SystemMatrices(K, model.F.copy())


def apply_essential_bcs(sys: SystemMatrices, case: PlateCase,
                        model: PlateModel | None = None) -> SystemMatrices:
    """Collocate u0 = v0 = w0 = 0 at every tagged boundary node."""
    model = PlateModel(case) if model is None else model
    K = sys.K.copy()
    F = sys.F.copy()
    rows = model.constrain(K, F)
    return SystemMatrices(K, F, rows)


def recover_strains(case: PlateCase, solution, points, model=None):
    """Strains and stresses at points for the mid-plane and both surfaces.

    Returns a dict with ``strain`` and ``stress`` arrays of shape
    ``(P, 3, 3)`` indexed ``[point, z in (-h/2, 0, h/2), component]``, plus
    the fractional membrane strain and curvature separately.
    """
    pts = np.atleast_2d(np.asarray(points, float))
    if not np.all(case.domain.contains(pts, tol=1e-12)):
        raise ValueError("strain recovery point outside the domain")
    n = case.n
    u = np.asarray(solution, float)
    rows = frac_rows(pts, case.frac, case.cloud, case.cloud_u)
    gx = rows["w_x"] @ u[2 * n:]
    gy = rows["w_y"] @ u[2 * n:]
    mid = np.column_stack([
        rows["u_x"] @ u[:n] + 0.5 * gx ** 2,
        rows["u_y"] @ u[n:2 * n] + 0.5 * gy ** 2,
        rows["u_y"] @ u[:n] + rows["u_x"] @ u[n:2 * n] + gx * gy])
    if case.mode == "linear":
        mid = np.column_stack([rows["u_x"] @ u[:n], rows["u_y"] @ u[n:2 * n],
                               rows["u_y"] @ u[:n]
                               + rows["u_x"] @ u[n:2 * n]])
    kappa = np.column_stack([rows["w_xx"] @ u[2 * n:],
                             rows["w_yy"] @ u[2 * n:],
                             (rows["w_xy"] + rows["w_yx"]) @ u[2 * n:]])
    zs = np.array([-0.5 * case.h, 0.0, 0.5 * case.h])
    strain = mid[:, None, :] - zs[None, :, None] * kappa[:, None, :]
    stress = strain @ constitutive(case.material).T
    return {"z": zs, "strain": strain, "stress": stress,
            "membrane": mid, "curvature": kappa}
