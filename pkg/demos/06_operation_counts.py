"""
Operation counts
================

Closed-form FLOP estimates for fractional B-matrix evaluation and stiffness
assembly, next to measured wall time of the B-matrix stage.
"""
import time

import numpy as np

from fracefg.fracdiff import FracParams, frac_rows
from fracefg.geometry import make_uniform_grid, rectangle_mesh
from fracefg.solver import flop_counts

rep = flop_counts(507, 144, 16, 30)    # 12 x 12 grid
for k, v in rep.as_dict().items():
    print(f"{k:>16}: {v}")

# Timing: the dense path builds full-length rows for every Gauss-Jacobi
# sample, as the estimate assumes; the default path only touches the
# nodes whose supports cover each sample.
print("\n grid  G_DOF   dense [s]  neighbour [s]")
data = []
for n in (6, 8, 10):
    cloud = make_uniform_grid(1.0, 1.0, n, n)
    b = np.linspace(0, 1, n + 1)
    pts = rectangle_mesh(b, b).points
    t = []
    for dense in (True, False):
        t0 = time.perf_counter()
        frac_rows(pts, FracParams(0.8, 0.5), cloud,
                  cloud.with_support_scale(1.5), dense=dense)
        t.append(time.perf_counter() - t0)
    data.append((3 * cloud.n, *t))
    print(f"{n:5d} {3 * cloud.n:6d} {t[0]:10.2f} {t[1]:12.2f}")
g, td, ts = np.array(data).T
print("log-log slopes: dense %.2f, neighbour %.2f"
      % (np.polyfit(np.log(g), np.log(td), 1)[0],
         np.polyfit(np.log(g), np.log(ts), 1)[0]))
