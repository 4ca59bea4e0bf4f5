"""
Simply supported circular plate
===============================

Nodes lie on a graded Cartesian lattice clipped to the disk plus a ring of
rim nodes.  The classical centre deflection has a closed form.
"""
import numpy as np

from fracefg.fracdiff import FracParams
from fracefg.geometry import Boundary, circle_mesh, make_circular_cloud
from fracefg.plate import Material, PlateCase, PlateModel
from fracefg.solver import solve_case

E, nu, h, q0, R = 1.09e6, 0.3, 0.02, 1.0, 1.0
# a coarse cloud keeps the demo quick; 16 intervals and a 12 x 12 mesh
# land within 0.2% of the closed form
cloud = make_circular_cloud(R, 12, grading=0.5)
mesh = circle_mesh(R, 8, 8)
print(cloud.n, "nodes,", len(cloud.boundary_indices(Boundary.RIM)),
      "on the rim")
print("mesh area %.10f (pi = %.10f)" % (mesh.weights.sum(), np.pi))

exact = 3 * q0 * R ** 4 * (1 - nu ** 2) * (5 + nu) / (
    16 * E * h ** 3 * (1 + nu))
case = PlateCase(cloud, mesh, Material(E, nu), h, FracParams(1.0, R), q0)
w = solve_case(case).center_deflection
print("alpha = 1: w0 = %.5f m, closed form %.5f m" % (w, exact))

for h_l in (0.8, 1.2):
    ws = []
    for alpha in (0.9, 0.8, 0.7):
        c = PlateCase(cloud, mesh, Material(E, nu), h,
                      FracParams(alpha, h_l * R), q0)
        ws.append(solve_case(c).center_deflection)
    print(f"h_l = {h_l}a:", np.round(ws, 5))

# large deflection under the same load
nl = PlateCase(cloud, mesh, Material(E, nu), h, FracParams(1.0, R), q0,
               mode="nonlinear")
print("nonlinear alpha = 1: w0 = %.5f m" % solve_case(nl).center_deflection)
