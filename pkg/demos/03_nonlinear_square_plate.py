"""
Large deflection of a fractional plate
======================================

Von Karman membrane strains stiffen the plate once w is comparable with h.
Incremental Newton-Raphson follows the load path.
"""
import numpy as np

from fracefg.fracdiff import FracParams
from fracefg.geometry import make_uniform_grid, rectangle_mesh
from fracefg.plate import Material, PlateCase, PlateModel
from fracefg.solver import SolverSettings, solve_case, solve_nonlinear

E, nu, h = 1.09e6, 0.3, 0.02
n = 10
cloud = make_uniform_grid(1.0, 1.0, n, n)
breaks = np.linspace(0.0, 1.0, n + 1)
mesh = rectangle_mesh(breaks, breaks)

# load parameter P = q0 a^4 / (E h^4)
p_bar = 250.0
q0 = p_bar * E * h ** 4
case = PlateCase(cloud, mesh, Material(E, nu), h, FracParams(0.8, 0.5), q0,
                 mode="nonlinear")
model = PlateModel(case)

history = []
res = solve_nonlinear(case, SolverSettings(n_load_steps=10), model,
                      callback=history.append)
print(" step  load   iters   |du| at exit")
for step in range(1, 11):
    recs = [r for r in history if r.step == step]
    print(f"{step:5d} {recs[-1].load_factor:5.2f} {len(recs):6d} "
          f"{recs[-1].du_norm:12.3e}")
print("w/h nonlinear = %.4f" % (res.center_deflection / h))

linear = PlateCase(cloud, mesh, Material(E, nu), h, FracParams(0.8, 0.5),
                   q0, mode="linear")
w_lin = solve_case(linear, model=model.with_case(linear)).center_deflection
print("w/h linear    = %.4f" % (w_lin / h))

# fewer load steps reach the same equilibrium
w5 = solve_nonlinear(case, SolverSettings(n_load_steps=5), model)
print("5 steps vs 10: %.2e relative"
      % abs(w5.center_deflection / res.center_deflection - 1))
