import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fracefg.fracdiff import FracParams  # noqa: E402
from fracefg.geometry import make_uniform_grid, rectangle_mesh  # noqa: E402
from fracefg.plate import Material, PlateCase  # noqa: E402

E, NU, H = 1.09e6, 0.3, 0.02


def square_case(n=8, alpha=1.0, h_l=0.5, q0=1.0, mode="linear", nu=NU,
                n_gjp=30):
    cloud = make_uniform_grid(1.0, 1.0, n, n)
    br = np.linspace(0.0, 1.0, n + 1)
    return PlateCase(cloud, rectangle_mesh(br, br), Material(E, nu), H,
                     FracParams(alpha, h_l, n_gjp), q0, mode)


@pytest.fixture(scope="session")
def grid12():
    return make_uniform_grid(1.0, 1.0, 12, 12)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    lines = getattr(test_acceptance, "RESULT_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
