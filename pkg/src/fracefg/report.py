"""Normalization, golden reference tables, comparisons and output files."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .geometry import Circle
from .mls import LINEAR, QUADRATIC, shape_rows

__all__ = ["normalize", "ReferenceSet", "ReportRow", "compare_tables",
           "load_reference", "DEFAULT_TOLERANCE", "NODAL_COLUMNS",
           "PROFILE_COLUMNS", "write_nodal_csv", "write_profile_csv",
           "write_json", "LINEAR_FORMULA", "NONLINEAR_FORMULA"]

LINEAR_FORMULA = "w_bar = w0 * 100 E h^3 / (q0 a^4)"
NONLINEAR_FORMULA = "w_bar = w0 / h"
RAW_FORMULA = "w0 [m]"

NODAL_COLUMNS = ("x", "y", "u0", "v0", "w0")
PROFILE_COLUMNS = ("x", "y", "w0", "w_bar")

# relative tolerances by table
DEFAULT_TOLERANCE = {"1": 0.03, "2": 0.02, "3": 0.03, "5": 0.03, "6": 0.03}


def normalize(w0, case, mode=None):
    """Dimensionless deflection for the given mode.

    Linear: ``w0 * 100 E h^3 / (q0 a^4)``; nonlinear: ``w0 / h``.
    """
    mode = case.mode if mode is None else mode
    w0 = np.asarray(w0, float)
    if mode == "linear":
        if case.q0 == 0:
            raise ZeroDivisionError("linear normalization needs q0 != 0")
        E = case.material.E
        return w0 * 100.0 * E * case.h ** 3 / (case.q0 * case.a ** 4)
    if mode == "nonlinear":
        return w0 / case.h
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class Reference:
    table: str
    row: str
    column: str
    source: str
    value: float
    quantity: str
    unit: str


class ReferenceSet:
    """Golden values keyed by ``(table, row, column, source)``."""

    def __init__(self, entries):
        self.entries = {(e.table, e.row, e.column, e.source): e
                        for e in entries}

    def get(self, table, row, column, source="f-EFG"):
        return self.entries.get((str(table), row, column, source))

    def value(self, table, row, column, source="f-EFG"):
        e = self.get(table, row, column, source)
        if e is None:
            raise KeyError((table, row, column, source))
        return e.value

    def table(self, table, source="f-EFG"):
        return [e for k, e in self.entries.items()
                if k[0] == str(table) and k[3] == source]

    def __len__(self):
        return len(self.entries)


def load_reference(path=None) -> ReferenceSet:
    """Read a golden CSV; the bundled table set is used by default."""
    if path is None:
        fh = resources.files("fracefg").joinpath(
            "data/reference_tables.csv").open("r", newline="")
    else:
        try:
            fh = open(path, newline="")
        except FileNotFoundError as exc:
            raise ConfigurationError(f"{path}: reference table not found") from exc
    with fh:
        rows = list(csv.DictReader(fh))
    need = {"table", "row", "column", "value"}
    if rows and not need <= set(rows[0]):
        raise ConfigurationError(
            f"reference table needs columns {sorted(need)}")
    out = []
    for r in rows:
        try:
            v = float(r["value"])
        except ValueError as exc:
            raise ConfigurationError(f"bad reference value {r['value']!r}") from exc
        out.append(Reference(r["table"], r["row"], r["column"],
                             r.get("source") or "f-EFG", v,
                             r.get("quantity") or "w", r.get("unit") or "-"))
    return ReferenceSet(out)


@dataclass(frozen=True)
class ReportRow:
    case_id: str
    probe_x: float
    probe_y: float
    w0: float
    w0_unit: str
    normalized: float
    formula: str
    table: str = ""
    row: str = ""
    column: str = ""
    source: str = ""
    quantity: str = ""
    reference: float | None = None
    rel_error: float | None = None
    tolerance: float | None = None
    passed: bool | None = None
    complete: bool = True

    def as_dict(self):
        return asdict(self)


def _quantity(w0, case, quantity):
    if quantity == "w_bar":
        return float(normalize(w0, case, "linear")), LINEAR_FORMULA
    if quantity == "w_over_h":
        return float(normalize(w0, case, "nonlinear")), NONLINEAR_FORMULA
    return float(w0), RAW_FORMULA


def compare_tables(case, w0, requests, reference: ReferenceSet):
    """One :class:`ReportRow` per requested comparison.

    A request missing from the reference set yields a row marked
    ``complete=False`` rather than an error.
    """
    px, py = (float(v) for v in case.probe)
    base = normalize(w0, case) if case.q0 != 0 or case.mode != "linear" else 0.0
    formula = LINEAR_FORMULA if case.mode == "linear" else NONLINEAR_FORMULA
    rows = []
    if not requests:
        rows.append(ReportRow(case.name, px, py, float(w0), "m", float(base),
                              formula))
    for req in requests:
        ref = reference.get(req["table"], req["row"], req["column"],
                            req.get("source", "f-EFG"))
        tol = req.get("tolerance") or DEFAULT_TOLERANCE.get(req["table"], 0.03)
        if ref is None:
            rows.append(ReportRow(case.name, px, py, float(w0), "m",
                                  float(base), formula, req["table"],
                                  req["row"], req["column"],
                                  req.get("source", "f-EFG"), "",
                                  tolerance=tol, complete=False))
            continue
        val, form = _quantity(w0, case, ref.quantity)
        err = abs(val - ref.value) / abs(ref.value)
        rows.append(ReportRow(case.name, px, py, float(w0), "m", val, form,
                              ref.table, ref.row, ref.column, ref.source,
                              ref.quantity, ref.value, err, tol,
                              bool(err <= tol)))
    return rows


def _fmt(v):
    return f"{v:.12e}"


def write_nodal_csv(path, case, u_g):
    """MLS-reconstructed displacements at every node, fixed column order."""
    n = case.n
    nodes = case.cloud.nodes
    pu = shape_rows(nodes, case.cloud_u, LINEAR, 0)["phi"]
    pw = shape_rows(nodes, case.cloud, QUADRATIC, 0)["phi"]
    u = pu @ u_g[:n]
    v = pu @ u_g[n:2 * n]
    w = pw @ u_g[2 * n:]
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(NODAL_COLUMNS)
        for row in zip(nodes[:, 0], nodes[:, 1], u, v, w):
            wr.writerow([_fmt(x) for x in row])


def centerline(case, n_points):
    """Sample points along the horizontal centre line of the domain."""
    d = case.domain
    if isinstance(d, Circle):
        x = np.linspace(-d.radius, d.radius, n_points)
        y = np.zeros_like(x)
    else:
        x = np.linspace(0.0, d.a, n_points)
        y = np.full_like(x, 0.5 * d.b)
    return np.column_stack([x, y])


def profile(case, u_g, n_points=41):
    pts = centerline(case, n_points)
    w = shape_rows(pts, case.cloud, QUADRATIC, 0)["phi"] @ u_g[2 * case.n:]
    return pts, w


def write_profile_csv(path, case, u_g, n_points=41):
    pts, w = profile(case, u_g, n_points)
    wb = normalize(w, case) if (case.q0 != 0 or case.mode != "linear") else w
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(PROFILE_COLUMNS)
        for row in zip(pts[:, 0], pts[:, 1], w, wb):
            wr.writerow([_fmt(x) for x in row])


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def ensure_dir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
