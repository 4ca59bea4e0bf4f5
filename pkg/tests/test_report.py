import csv

import numpy as np
import pytest

from conftest import square_case
from fracefg.report import (NODAL_COLUMNS, PROFILE_COLUMNS, compare_tables,
                            load_reference, normalize, write_nodal_csv,
                            write_profile_csv)
from fracefg.solver import solve_case


def test_normalization_formulas():
    c = square_case(4, q0=2.0)
    assert normalize(1.0, c) == pytest.approx(100 * 1.09e6 * 0.02 ** 3 / 2.0)
    assert normalize(0.04, c, "nonlinear") == pytest.approx(2.0)
    with pytest.raises(ZeroDivisionError):
        normalize(1.0, square_case(4, q0=0.0))


def test_bundled_reference_tables():
    ref = load_reference()
    assert ref.value("2", "h_l=0.5a", "alpha=0.8") == pytest.approx(5.411)
    assert ref.value("5", "h_l=1.0a", "analytical",
                     "analytical") == pytest.approx(0.0797)
    assert ref.value("flops", "G=507/Ne=144/NGP=16/NGJP=30", "b_tilde",
                     "hand") == 420_526_080


def test_compare_marks_missing_reference_incomplete():
    c = square_case(4)
    rows = compare_tables(c, 1e-3, [{"table": "2", "row": "h_l=0.9a",
                                     "column": "alpha=0.8"}], load_reference())
    assert not rows[0].complete and rows[0].passed is None


def test_compare_pass_fail():
    c = square_case(4)
    ref = load_reference()
    target = 4.5844 / normalize(1.0, c)
    req = [{"table": "2", "row": "h_l=0.5a", "column": "alpha=1.0"}]
    good = compare_tables(c, target, req, ref)[0]
    assert good.passed and good.rel_error == pytest.approx(0, abs=1e-12)
    bad = compare_tables(c, 1.1 * target, req, ref)[0]
    assert not bad.passed


def test_csv_columns_and_determinism(tmp_path):
    c = square_case(4)
    u = solve_case(c).u_g
    for i in range(2):
        write_nodal_csv(tmp_path / f"n{i}.csv", c, u)
        write_profile_csv(tmp_path / f"p{i}.csv", c, u, 11)
    assert (tmp_path / "n0.csv").read_bytes() == (tmp_path / "n1.csv").read_bytes()
    with open(tmp_path / "n0.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == NODAL_COLUMNS and len(rows) == c.n + 1
    with open(tmp_path / "p0.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == PROFILE_COLUMNS and len(rows) == 12
    w = np.array([float(r[2]) for r in rows[1:]])
    assert w[0] == pytest.approx(0, abs=1e-12 * w.max())
    assert w.argmax() == 5
