"""
Refined node bands
==================

Nodes concentrated in the middle third of the span change the discrete
operator but not the answer: centreline profiles agree with the uniform grid.
"""
import numpy as np

from fracefg.fracdiff import FracParams
from fracefg.geometry import make_nonuniform_grid, rectangle_mesh
from fracefg.plate import Material, PlateCase, PlateModel
from fracefg.solver import solve_case

E, nu, h = 1.09e6, 0.3, 0.02
uniform = np.linspace(0, 1, 11)
band = np.unique(np.round(np.r_[uniform, np.linspace(1 / 3, 2 / 3, 7)], 12))
stations = np.c_[np.linspace(0, 1, 11), np.full(11, 0.5)]


def profile(xb, yb):
    cloud = make_nonuniform_grid(1.0, 1.0, xb, yb)
    case = PlateCase(cloud, rectangle_mesh(xb, yb), Material(E, nu), h,
                     FracParams(0.8, 0.5), 1.0)
    model = PlateModel(case)
    u = solve_case(case, model=model).u_g
    return model.deflection(u, stations) * 100 * E * h ** 3


ref = profile(uniform, uniform)
case1 = profile(band, uniform)
case2 = profile(band, band)
print("   x    uniform   band-x    band-xy")
for x, a, b, c in zip(stations[:, 0], ref, case1, case2):
    print(f"{x:4.1f} {a:9.4f} {b:9.4f} {c:9.4f}")
peak = ref.max()
print("max deviation / peak: %.3f%%, %.3f%%"
      % (100 * np.abs(case1 - ref).max() / peak,
         100 * np.abs(case2 - ref).max() / peak))
