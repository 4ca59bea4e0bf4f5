"""Independent reference solutions used as test oracles.

None of these share code with the solver: they are classical closed forms
or a separate one-dimensional boundary-value solve.
"""
import numpy as np
from scipy.integrate import solve_bvp

E, NU, H = 1.09e6, 0.3, 0.02


def flexural_rigidity(E=E, nu=NU, h=H):
    return E * h ** 3 / (12.0 * (1.0 - nu ** 2))


def navier_center_deflection(q0, a, b, E=E, nu=NU, h=H, terms=199):
    """Centre deflection of a simply supported rectangle under uniform load
    (double sine series, odd terms only)."""
    D = flexural_rigidity(E, nu, h)
    m = np.arange(1, terms + 1, 2)[:, None]
    n = np.arange(1, terms + 1, 2)[None, :]
    coef = 16 * q0 / (np.pi ** 6 * D * m * n
                      * ((m / a) ** 2 + (n / b) ** 2) ** 2)
    return float(np.sum(coef * np.sin(m * np.pi / 2) * np.sin(n * np.pi / 2)))


def circular_center_deflection(q0, a, E=E, nu=NU, h=H):
    """Simply supported solid circular plate under uniform load."""
    return 3 * q0 * a ** 4 * (1 - nu ** 2) / (16 * E * h ** 3) \
        * (5 + nu) / (1 + nu)


def axisymmetric_von_karman(q0, a, E=E, nu=NU, h=H, nonlinear=True):
    """Centre deflection of an immovable simply supported circular plate.

    Solves the axisymmetric von Karman equations for slope ``phi = w'`` and
    radial displacement ``u`` with ``u(a) = 0``, ``M_r(a) = 0`` and
    ``w(a) = 0``.
    """
    D = flexural_rigidity(E, nu, h)
    A = E * h / (1 - nu ** 2)
    k = 1.0 if nonlinear else 0.0
    r0 = 1e-6 * a

    def rhs(r, y):
        phi, dphi, u, du, w = y
        Nr = A * (du + 0.5 * k * phi ** 2 + nu * u / r)
        d2phi = -dphi / r + phi / r ** 2 + (q0 * r / 2 + k * Nr * phi) / D
        d2u = (-k * phi * dphi - (du - u / r) / r
               - k * (1 - nu) * phi ** 2 / (2 * r))
        return np.vstack([dphi, d2phi, du, d2u, phi])

    def bc(y0, y1):
        return np.array([y0[0], y0[2], y1[2], y1[1] + nu * y1[0] / a, y1[4]])

    r = np.linspace(r0, a, 400)
    sol = solve_bvp(rhs, bc, r, np.zeros((5, r.size)), tol=1e-8,
                    max_nodes=100000)
    if not sol.success:
        raise RuntimeError(sol.message)
    return float(sol.sol(r0)[4])
