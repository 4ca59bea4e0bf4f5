"""Run configuration: TOML parsing, validation and case construction.

A configuration file has the sections ``case``, ``material``,
``fractional``, ``load``, ``grid`` and optionally ``mesh``, ``solver``,
``output`` and ``compare``.  Every field is validated before any numerical
work starts; all problems are collected and reported together.

Units are SI throughout: lengths in m, moduli and loads in Pa.  ``h_l``
may be given in metres (``h_l``) or relative to the characteristic length
``a`` (``h_l_over_a``).
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .errors import ConfigurationError
from .fracdiff import DEFAULT_GJP, FracParams
from .geometry import (LINEAR_SUPPORT, QUADRATIC_SUPPORT, circle_mesh,
                       make_circular_cloud, make_nonuniform_grid,
                       make_uniform_grid, rectangle_mesh)
from .plate import Material, PlateCase
from .solver import SolverSettings

__all__ = ["RunConfig", "load_config", "parse_config", "build_case",
           "p_bar_to_q0", "P_BAR_CONVENTIONS"]

# "h4": P = q0 a^4 / (E h^4), the usual large-deflection load parameter;
# "h3": P = q0 a^4 / (E h^3), the literal reading of the w/h normalization.
P_BAR_CONVENTIONS = ("h4", "h3")


def p_bar_to_q0(p_bar, E, h, a, convention="h4"):
    """Invert the normalized load parameter to a pressure in Pa."""
    if convention not in P_BAR_CONVENTIONS:
        raise ConfigurationError(f"unknown P_bar convention {convention!r}")
    power = 4 if convention == "h4" else 3
    return p_bar * E * h ** power / a ** 4


@dataclass(frozen=True)
class RunConfig:
    case_id: str
    shape: str
    a: float
    b: float
    h: float
    mode: str
    E: float
    nu: float
    alpha: float
    h_l: float
    n_gjp: int
    q0: float
    grid: dict
    mesh_order: int
    mesh_cells: tuple
    solver: SolverSettings
    out_dir: str | None
    profile_points: int
    compare: tuple = ()
    p_bar: float | None = None
    p_bar_convention: str = "h4"
    source: str | None = None

    @property
    def length(self):
        return self.a


_SECTIONS = {"case", "material", "fractional", "load", "grid", "mesh",
             "solver", "output", "compare"}


class _Collector:
    def __init__(self):
        self.errors = []

    def get(self, sec, key, kind, default=None, required=True, where=""):
        name = f"{where}.{key}"
        if key not in sec:
            if required and default is None:
                self.errors.append(f"{name}: missing")
            return default
        val = sec[key]
        if kind is float:
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                self.errors.append(f"{name}: expected a number, got {val!r}")
                return default
            if not np.isfinite(val):
                self.errors.append(f"{name}: must be finite")
                return default
            return float(val)
        if kind is int:
            if isinstance(val, bool) or not isinstance(val, int):
                self.errors.append(f"{name}: expected an integer, got {val!r}")
                return default
            return val
        if kind is str:
            if not isinstance(val, str):
                self.errors.append(f"{name}: expected a string, got {val!r}")
                return default
            return val
        if kind is list:
            if not isinstance(val, list) or not all(
                    isinstance(v, (int, float)) and not isinstance(v, bool)
                    for v in val):
                self.errors.append(f"{name}: expected a list of numbers")
                return default
            return [float(v) for v in val]
        raise AssertionError(kind)

    def check(self, cond, msg):
        if not cond:
            self.errors.append(msg)


def parse_config(data: dict, source=None) -> RunConfig:
    """Validate a configuration mapping; raise with every problem found."""
    c = _Collector()
    unknown = set(data) - _SECTIONS
    for key in sorted(unknown):
        c.errors.append(f"{key}: unknown section")
    sec = {k: data.get(k, [] if k == "compare" else {}) for k in _SECTIONS}
    for k in _SECTIONS - {"compare"}:
        if not isinstance(sec[k], dict):
            c.errors.append(f"{k}: expected a table")
            sec[k] = {}

    case = sec["case"]
    case_id = c.get(case, "id", str, "case", where="case")
    shape = c.get(case, "shape", str, where="case")
    c.check(shape in (None, "rectangle", "circle"),
            f"case.shape: must be 'rectangle' or 'circle', got {shape!r}")
    mode = c.get(case, "mode", str, "linear", where="case")
    c.check(mode in ("linear", "nonlinear"),
            f"case.mode: must be 'linear' or 'nonlinear', got {mode!r}")
    if shape == "circle":
        a = c.get(case, "radius", float, where="case")
        b = a
    else:
        a = c.get(case, "a", float, where="case")
        b = c.get(case, "b", float, a, where="case")
    h = c.get(case, "h", float, where="case")
    for nm, v in (("a" if shape != "circle" else "radius", a), ("b", b),
                  ("h", h)):
        c.check(v is None or v > 0, f"case.{nm}: must be positive")
    if a and h and a > 0 and h > 0:
        span = 2 * a if shape == "circle" else min(a, b or a)
        c.check(span / h >= 50 - 1e-9,
                f"case.h: thin-plate kinematics need a/h >= 50, got {span / h:g}")

    mat = sec["material"]
    E = c.get(mat, "E", float, where="material")
    nu = c.get(mat, "nu", float, where="material")
    c.check(E is None or E > 0, "material.E: must be positive")
    c.check(nu is None or -1.0 < nu < 0.5, "material.nu: must lie in (-1, 0.5)")

    fr = sec["fractional"]
    alpha = c.get(fr, "alpha", float, where="fractional")
    c.check(alpha is None or 0.0 < alpha <= 1.0,
            f"fractional.alpha: must lie in (0, 1], got {alpha}")
    if "h_l" in fr and "h_l_over_a" in fr:
        c.errors.append("fractional: give either h_l or h_l_over_a, not both")
    if "h_l_over_a" in fr:
        rel = c.get(fr, "h_l_over_a", float, where="fractional")
        h_l = rel * a if (rel is not None and a) else None
    else:
        h_l = c.get(fr, "h_l", float, where="fractional")
    c.check(h_l is None or h_l > 0, "fractional.h_l: must be positive")
    n_gjp = c.get(fr, "n_gjp", int, DEFAULT_GJP, where="fractional")
    c.check(n_gjp is None or n_gjp >= 1, "fractional.n_gjp: must be >= 1")

    ld = sec["load"]
    p_bar = None
    conv = c.get(ld, "p_bar_convention", str, "h4", where="load")
    c.check(conv in P_BAR_CONVENTIONS,
            f"load.p_bar_convention: must be one of {P_BAR_CONVENTIONS}")
    if "q0" in ld and "p_bar" in ld:
        c.errors.append("load: give either q0 or p_bar, not both")
    if "p_bar" in ld:
        p_bar = c.get(ld, "p_bar", float, where="load")
        q0 = (p_bar_to_q0(p_bar, E, h, a, conv)
              if None not in (p_bar, E, h, a) and conv in P_BAR_CONVENTIONS
              else None)
    else:
        q0 = c.get(ld, "q0", float, where="load")
    if mode == "linear":
        c.check(q0 is None or q0 != 0.0,
                "load.q0: linear normalization needs a nonzero load")

    gr = dict(sec["grid"])
    kind = c.get(gr, "kind", str, "uniform", where="grid")
    grid = {"kind": kind}
    grid["support_scale"] = c.get(gr, "support_scale", float,
                                  QUADRATIC_SUPPORT, where="grid")
    grid["inplane_support"] = c.get(gr, "inplane_support", float,
                                    LINEAR_SUPPORT, where="grid")
    if kind == "uniform":
        grid["nx"] = c.get(gr, "nx", int, where="grid")
        grid["ny"] = c.get(gr, "ny", int, grid["nx"], where="grid")
    elif kind == "nonuniform":
        grid["x_breaks"] = c.get(gr, "x_breaks", list, where="grid")
        grid["y_breaks"] = c.get(gr, "y_breaks", list, where="grid")
    elif kind == "circular":
        grid["intervals"] = c.get(gr, "intervals", int, where="grid")
        grid["grading"] = c.get(gr, "grading", float, 0.5, where="grid")
        grid["min_gap"] = c.get(gr, "min_gap", float, 0.25, where="grid")
    else:
        c.errors.append(f"grid.kind: unknown kind {kind!r}")
    if shape == "circle":
        c.check(kind == "circular", "grid.kind: circle requires 'circular'")
    elif shape == "rectangle":
        c.check(kind != "circular", "grid.kind: rectangle cannot use 'circular'")

    me = sec["mesh"]
    order = c.get(me, "order", int, 4, where="mesh")
    c.check(order is None or order >= 1, "mesh.order: must be >= 1")
    cells = (c.get(me, "n_x", int, 12, where="mesh"),
             c.get(me, "n_theta", int, 12, where="mesh"))

    so = sec["solver"]
    try:
        settings = SolverSettings(
            n_load_steps=c.get(so, "n_load_steps", int, 10, where="solver"),
            tol_disp=c.get(so, "tol_disp", float, required=False,
                           where="solver"),
            max_iters=c.get(so, "max_iters", int, 25, where="solver"),
            residual=c.get(so, "residual", str, "energy", where="solver"),
            scheme=c.get(so, "scheme", str, "newton", where="solver"),
            relaxation=c.get(so, "relaxation", float, 0.5, where="solver"))
    except (ConfigurationError, TypeError) as exc:
        c.errors.append(f"solver: {exc}")
        settings = None

    out = sec["output"]
    out_dir = c.get(out, "dir", str, required=False, where="output")
    npts = c.get(out, "profile_points", int, 41, where="output")
    c.check(npts is None or npts >= 2, "output.profile_points: must be >= 2")

    comps = sec["compare"]
    if isinstance(comps, dict):
        comps = [comps]
    compare = []
    if not isinstance(comps, list):
        c.errors.append("compare: expected an array of tables")
        comps = []
    for i, item in enumerate(comps):
        if not isinstance(item, dict):
            c.errors.append(f"compare[{i}]: expected a table")
            continue
        key = tuple(str(item.get(k, "")) for k in ("table", "row", "column"))
        if not all(key):
            c.errors.append(f"compare[{i}]: needs table, row and column")
        tol = item.get("tolerance")
        if tol is not None and (isinstance(tol, bool)
                                or not isinstance(tol, (int, float))
                                or tol <= 0):
            c.errors.append(f"compare[{i}].tolerance: must be positive")
        compare.append(dict(table=key[0], row=key[1], column=key[2],
                            source=str(item.get("source", "f-EFG")),
                            tolerance=None if tol is None else float(tol)))
    if c.errors:
        raise ConfigurationError("invalid configuration:\n  "
                                 + "\n  ".join(c.errors))
    return RunConfig(case_id, shape, a, b, h, mode, E, nu, alpha, h_l,
                     n_gjp, q0, grid, order, cells, settings, out_dir, npts,
                     tuple(compare), p_bar, conv, source)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigurationError(f"{path}: no such configuration file") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: malformed TOML: {exc}") from exc
    return parse_config(data, str(path))


def build_case(cfg: RunConfig) -> PlateCase:
    """Materialize the node cloud, mesh and parameters of a configuration."""
    g = cfg.grid
    s, su = g["support_scale"], g["inplane_support"]
    if cfg.shape == "circle":
        cloud = make_circular_cloud(cfg.a, g["intervals"], s, g["grading"],
                                    g["min_gap"])
        mesh = circle_mesh(cfg.a, cfg.mesh_cells[0], cfg.mesh_cells[1],
                           cfg.mesh_order)
    else:
        if g["kind"] == "uniform":
            cloud = make_uniform_grid(cfg.a, cfg.b, g["nx"], g["ny"], s)
            xb = np.linspace(0.0, cfg.a, g["nx"] + 1)
            yb = np.linspace(0.0, cfg.b, g["ny"] + 1)
        else:
            xb = np.asarray(g["x_breaks"])
            yb = np.asarray(g["y_breaks"])
            cloud = make_nonuniform_grid(cfg.a, cfg.b, xb, yb, s)
        mesh = rectangle_mesh(xb, yb, cfg.mesh_order)
    frac = FracParams(cfg.alpha, cfg.h_l, cfg.n_gjp)
    return PlateCase(cloud, mesh, Material(cfg.E, cfg.nu), cfg.h, frac,
                     cfg.q0, cfg.mode, su, cfg.case_id)
