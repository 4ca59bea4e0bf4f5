"""
Linear bending of a simply supported square plate
=================================================

Uniform load on a 1 m x 1 m x 0.02 m plate.  alpha = 1 recovers classical
Kirchhoff theory; smaller alpha softens the plate.
"""
import numpy as np

from fracefg.fracdiff import FracParams
from fracefg.geometry import make_uniform_grid, rectangle_mesh
from fracefg.plate import Material, PlateCase, PlateModel
from fracefg.report import normalize
from fracefg.solver import solve_case

E, nu, h, q0 = 1.09e6, 0.3, 0.02, 1.0
n = 10
cloud = make_uniform_grid(1.0, 1.0, n, n)
breaks = np.linspace(0.0, 1.0, n + 1)
mesh = rectangle_mesh(breaks, breaks)      # 4 x 4 Gauss points per cell
print(f"{cloud.n} nodes, {3 * cloud.n} dofs, {len(mesh.points)} Gauss points")

# Navier series for the classical plate, for reference
D = E * h ** 3 / (12 * (1 - nu ** 2))
m = np.arange(1, 200, 2)
navier = 16 * q0 / (np.pi ** 6 * D) * sum(
    (-1) ** ((i + j) // 2 - 1) / (i * j * (i * i + j * j) ** 2)
    for i in m for j in m)
print("Navier w_bar = %.4f" % (navier * 100 * E * h ** 3 / q0))

for h_l in (0.3, 0.5):
    line = []
    for alpha in (1.0, 0.9, 0.8, 0.7):
        case = PlateCase(cloud, mesh, Material(E, nu), h,
                         FracParams(alpha, h_l), q0)
        res = solve_case(case)
        line.append(float(normalize(res.center_deflection, case)))
    print(f"h_l = {h_l}a: w_bar =", np.round(line, 4))

# The operator (fractional rows at every Gauss point) is the expensive
# part; a model can be rebound to a new load without recomputing it.
case = PlateCase(cloud, mesh, Material(E, nu), h, FracParams(0.8, 0.5), q0)
model = PlateModel(case)
twice = PlateCase(cloud, mesh, Material(E, nu), h, FracParams(0.8, 0.5), 2.0)
w1 = solve_case(case, model=model).center_deflection
w2 = solve_case(twice, model=model.with_case(twice)).center_deflection
print("linearity: w(2 q0) / w(q0) = %.12f" % (w2 / w1))
