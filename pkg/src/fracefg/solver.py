"""Linear and incremental Newton-Raphson solution of the plate system."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ConfigurationError, NonConvergenceError, SolverError
from .plate import PlateCase, PlateModel, SystemMatrices

__all__ = ["SolverSettings", "SolveResult", "StepRecord", "solve_linear",
           "solve_nonlinear", "solve_case", "estimate_flops", "FlopReport"]

RESIDUAL_FORMS = {"energy": 1.0, "secant": 0.5}


@dataclass(frozen=True)
class SolverSettings:
    """Iteration controls.

    ``tol_disp`` defaults to ``1e-3 * h`` when left as None.  ``residual``
    selects the internal force: ``"energy"`` is the strain-energy gradient,
    ``"secant"`` is ``K_secant(u) u`` of the symmetric secant stiffness.
    ``scheme`` is ``"newton"`` (consistent tangent) or ``"picard"``
    (direct iteration ``K(u) u = lambda F`` on the secant of the chosen
    residual); ``relaxation`` damps the Picard update, which otherwise
    oscillates on the stiffening membrane response.
    """

    n_load_steps: int = 10
    tol_disp: float | None = None
    max_iters: int = 25
    residual: str = "energy"
    scheme: str = "newton"
    linear_solver: str = "lu"
    relaxation: float = 0.5

    def __post_init__(self):
        if int(self.n_load_steps) != self.n_load_steps or self.n_load_steps < 1:
            raise ConfigurationError("n_load_steps must be a positive integer")
        if self.tol_disp is not None and not self.tol_disp > 0:
            raise ConfigurationError("tol_disp must be positive")
        if self.max_iters < 1:
            raise ConfigurationError("max_iters must be positive")
        if self.residual not in RESIDUAL_FORMS:
            raise ConfigurationError(f"unknown residual form {self.residual!r}")
        if self.scheme not in ("newton", "picard"):
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        if not 0.0 < self.relaxation <= 1.0:
            raise ConfigurationError("relaxation must lie in (0, 1]")
        if self.linear_solver != "lu":
            raise ConfigurationError("only dense LU factorization is available")

    def tolerance(self, h):
        return 1e-3 * h if self.tol_disp is None else self.tol_disp


@dataclass(frozen=True)
class StepRecord:
    step: int
    load_factor: float
    iteration: int
    du_norm: float
    residual_norm: float

    def as_dict(self):
        return dict(step=self.step, load_factor=self.load_factor,
                    iteration=self.iteration, du_norm=self.du_norm,
                    residual_norm=self.residual_norm)


@dataclass(frozen=True)
class SolveResult:
    u_g: np.ndarray
    history: tuple = ()
    flop_estimate: "FlopReport | None" = None
    residual: float = 0.0
    center_deflection: float = float("nan")

    def __post_init__(self):
        self.u_g.setflags(write=False)

    @property
    def n(self):
        return len(self.u_g) // 3

    def fields(self):
        n = self.n
        return self.u_g[:n], self.u_g[n:2 * n], self.u_g[2 * n:]


def _bind(case, model):
    if model is None:
        return PlateModel(case)
    return model if model.case is case else model.with_case(case)


def _factor_solve(K, F):
    try:
        with warnings.catch_warnings():
            # singularity is reported below with the offending pivot
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(K, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SolverError(f"factorization failed: {exc}") from exc
    d = np.abs(np.diag(lu))
    scale = np.abs(K).max()
    if d.min() <= 1e-14 * max(scale, 1e-300):
        raise SolverError(
            f"stiffness matrix is singular: smallest pivot {d.min():.3e} "
            f"at row {int(d.argmin())}")
    return sla.lu_solve((lu, piv), F)


def solve_linear(sys: SystemMatrices) -> SolveResult:
    """Direct dense solve of a constrained system."""
    K, F = sys.K, sys.F
    fn = np.linalg.norm(F)
    if fn == 0.0:
        return SolveResult(np.zeros_like(F))
    u = _factor_solve(K, F)
    res = np.linalg.norm(K @ u - F) / fn
    if res >= 1e-8:
        # one step of iterative refinement before giving up
        u = u + _factor_solve(K, F - K @ u)
        res = np.linalg.norm(K @ u - F) / fn
        if res >= 1e-8:
            raise SolverError(f"linear residual {res:.3e} exceeds 1e-8")
    return SolveResult(u, residual=float(res))


def solve_nonlinear(case: PlateCase, settings: SolverSettings = SolverSettings(),
                    model: PlateModel | None = None, callback=None) -> SolveResult:
    """Incremental-load Newton-Raphson for the von Karman plate.

    Each load step iterates ``K_T du = lambda F - R(u)`` with boundary rows
    replaced by collocation constraints, until ``||du||_2`` falls below the
    displacement tolerance.  Raises :class:`NonConvergenceError` with the
    full history on failure or divergence.
    """
    model = _bind(case, model)
    beta = RESIDUAL_FORMS[settings.residual]
    tol = settings.tolerance(case.h)
    u = np.zeros(case.gdof)
    history = []
    ns = settings.n_load_steps
    for step in range(1, ns + 1):
        lam = step / ns
        rising = 0
        prev = np.inf
        for it in range(1, settings.max_iters + 1):
            if settings.scheme == "newton":
                K = model.tangent(u, beta)
                rhs = lam * model.F - model.internal_force(u, beta)
            else:
                K = model.secant_stiffness(u, beta)
                rhs = lam * model.F - model.internal_force(u, beta)
            rnorm = float(np.linalg.norm(rhs[2 * model.n:]))
            model.constrain(K, rhs, u)
            du = _factor_solve(K, rhs)
            u = u + (du if settings.scheme == "newton"
                     else settings.relaxation * du)
            dn = float(np.linalg.norm(du))
            rec = StepRecord(step, lam, it, dn, rnorm)
            history.append(rec)
            if callback is not None:
                callback(rec)
            if not np.isfinite(dn):
                raise NonConvergenceError("non-finite increment", history)
            if dn < tol:
                break
            rising = rising + 1 if dn > prev else 0
            if rising >= 3:
                raise NonConvergenceError(
                    f"increment norm grew 3 consecutive iterations at step {step}",
                    history)
            prev = dn
        else:
            raise NonConvergenceError(
                f"no convergence within {settings.max_iters} iterations "
                f"at load step {step}", history)
    w = float(model.deflection(u)[0])
    return SolveResult(u, tuple(history), estimate_flops(case),
                       center_deflection=w)


def solve_case(case: PlateCase, settings: SolverSettings = SolverSettings(),
               model: PlateModel | None = None) -> SolveResult:
    """Solve a case in its configured mode and attach the centre deflection."""
    model = _bind(case, model)
    if case.mode == "nonlinear":
        return solve_nonlinear(case, settings, model)
    K = model.K_lin.copy()
    F = model.F.copy()
    model.constrain(K, F)
    res = solve_linear(SystemMatrices(K, F))
    return SolveResult(np.array(res.u_g), (), estimate_flops(case),
                       res.residual, float(model.deflection(res.u_g)[0]))


@dataclass(frozen=True)
class FlopReport:
    gdof: int
    n_elements: int
    n_gp: int
    n_gjp: int
    b_tilde: int
    stiffness: int
    b_tilde_order: str = "O(G_DOF^2)"
    stiffness_order: str = "O(G_DOF^3)"

    @property
    def total(self):
        return self.b_tilde + self.stiffness

    def as_dict(self):
        return dict(gdof=self.gdof, n_elements=self.n_elements,
                    n_gp=self.n_gp, n_gjp=self.n_gjp, b_tilde=self.b_tilde,
                    stiffness=self.stiffness, total=self.total,
                    b_tilde_order=self.b_tilde_order,
                    stiffness_order=self.stiffness_order)


def flop_counts(gdof, n_elements, n_gp, n_gjp) -> FlopReport:
    """Operation counts of fractional B-matrix evaluation and assembly."""
    g, ne, ng, nj = int(gdof), int(n_elements), int(n_gp), int(n_gjp)
    b = ne * ng * nj * (2 * 6 * g)
    k = ne * ng * (g * g + (2 * 6 - 1) * g * g + 66 * g)
    return FlopReport(g, ne, ng, nj, b, k)


def estimate_flops(case: PlateCase) -> FlopReport:
    mesh = case.mesh
    return flop_counts(case.gdof, mesh.n_cells, mesh.points_per_cell,
                       case.frac.n_gjp)
