"""Command-line front end: sweeps over (x, T) with the asymptotic law and both engines.

Examples::

    pi2 --mode asym --x 1000 -1000 --T 0
    pi2 --mode ode --T 0 1 --L 20 --format svg --output profile.svg
    pi2 --mode rh --x-range 50:400:8 --T 0 --format json
    pi2 --mode compare --x-range -30:30:13 --T 0 1 --L 35
    pi2 --mode reg-scan --x 10000 --T 0 --grid 81

Settings may also come from a JSON file (``--config``); flags override it.
Unknown keys are rejected.  The resolved configuration, defaults included,
is written as ``#`` lines at the top of CSV output and under ``metadata``
in JSON output.  Log verbosity follows the ``PI2_LOG`` environment variable.
"""

import argparse
import dataclasses
import io
import json
import logging
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .asymptotics import LENS_ANGLE, re_g_grid, solve_z0, y_leading
from .ode_engine import BVPConfig, continuation_in_T, jet_at
from .rh_engine import RHConfig, rh_evaluate
from .svg import polyline_svg, sign_map_svg

MODES = ("asym", "ode", "rh", "compare", "reg-scan")
FORMATS = ("csv", "json", "svg")

EXIT_OK, EXIT_CONFIG, EXIT_ENGINE = 0, 2, 3

log = logging.getLogger("pi2")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str
    x_values: tuple = ()
    T_values: tuple = (0.0,)
    bvp: BVPConfig = field(default_factory=BVPConfig)
    rh: RHConfig = field(default_factory=RHConfig)
    output: str = None
    format: str = "csv"
    jobs: int = 1
    #: reg-scan: grid points per axis and half-width of the window around z0_hat
    grid: int = 81
    window: float = 6.0

    def metadata(self):
        """Resolved settings for the output header; jobs is left out so files do not
        depend on the worker count."""
        d = {"version": __version__, "mode": self.mode, "x": list(self.x_values),
             "T": list(self.T_values), "format": self.format,
             "bvp": dataclasses.asdict(self.bvp), "rh": dataclasses.asdict(self.rh)}
        if self.mode == "reg-scan":
            d["grid"] = self.grid
            d["window"] = self.window
        return d


# ---------------------------------------------------------------- parsing

_TOP_KEYS = {"mode", "x", "x_range", "T", "format", "output", "jobs", "grid", "window",
             "bvp", "rh"}
_FLAG_TO_BVP = {"L": "L", "mesh_density": "mesh_density", "newton_tol": "newton_tol",
                "newton_max_iter": "newton_max_iter"}
_FLAG_TO_RH = {"neumann_order": "neumann_order", "dense": "dense", "delta": "delta",
               "x_min": "x_min"}


def parse_range(text):
    """``a:b:n`` -> n equispaced values from a to b."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"x-range {text!r}: expected a:b:n")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"x-range {text!r}: {exc}") from None
    if n < 1:
        raise ConfigError(f"x-range {text!r}: count must be >= 1")
    return tuple(float(v) for v in np.linspace(a, b, n))


def _parser():
    p = argparse.ArgumentParser(prog="pi2", description="Real solution of the P_I^2 equation.")
    # let values such as -1e6 or -100:100:41 through as values rather than options
    p._negative_number_matcher = re.compile(r"^-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?(:\S*)?$")
    p.add_argument("--config", help="JSON file with settings; flags override it")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--x", nargs="+", type=float)
    p.add_argument("--x-range", dest="x_range")
    p.add_argument("--T", nargs="+", type=float)
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--output", help="output file (default: standard output)")
    p.add_argument("--jobs", type=int)
    p.add_argument("--grid", type=int, help="reg-scan points per axis")
    p.add_argument("--window", type=float, help="reg-scan half-width around z0_hat")
    p.add_argument("--L", type=float, help="ODE window half-width")
    p.add_argument("--mesh-density", dest="mesh_density", type=int)
    p.add_argument("--newton-tol", dest="newton_tol", type=float)
    p.add_argument("--newton-max-iter", dest="newton_max_iter", type=int)
    p.add_argument("--neumann-order", dest="neumann_order", type=int)
    p.add_argument("--dense", action="store_true", default=None)
    p.add_argument("--delta", type=float, help="disk radius of the RH contour")
    p.add_argument("--x-min", dest="x_min", type=float)
    return p


def _load_file(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path!r} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path!r}: top level must be an object")
    for k in data:
        if k not in _TOP_KEYS:
            raise ConfigError(f"config file {path!r}: unknown key {k!r}")
    for section, cls in (("bvp", BVPConfig), ("rh", RHConfig)):
        names = {f.name for f in dataclasses.fields(cls)}
        sub = data.get(section, {})
        if not isinstance(sub, dict):
            raise ConfigError(f"config file {path!r}: {section!r} must be an object")
        for k in sub:
            if k not in names:
                raise ConfigError(f"config file {path!r}: unknown key {section}.{k}")
    return data


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def parse_config(argv=None):
    """Build a validated :class:`RunConfig` from command-line arguments."""
    args = _parser().parse_args(argv)
    data = _load_file(args.config) if args.config else {}
    bvp = dict(data.get("bvp", {}))
    rh = dict(data.get("rh", {}))
    for flag, key in _FLAG_TO_BVP.items():
        if getattr(args, flag) is not None:
            bvp[key] = getattr(args, flag)
    for flag, key in _FLAG_TO_RH.items():
        if getattr(args, flag) is not None:
            rh[key] = getattr(args, flag)
    merged = {k: data.get(k) for k in ("mode", "x", "x_range", "T", "format", "output",
                                      "jobs", "grid", "window")}
    for k in merged:
        v = getattr(args, k)
        if v is not None:
            merged[k] = v
    if merged["mode"] is None:
        raise ConfigError("mode is required")
    if merged["mode"] not in MODES:
        raise ConfigError(f"unknown mode {merged['mode']!r}")
    if merged["x"] is not None and merged["x_range"] is not None:
        raise ConfigError("give either x or x_range, not both")
    if merged["x_range"] is not None:
        xs = parse_range(str(merged["x_range"]))
    elif merged["x"] is not None:
        xs = tuple(float(v) for v in _as_list(merged["x"]))
    else:
        xs = ()
    Ts = tuple(float(v) for v in _as_list(merged["T"])) if merged["T"] is not None else (0.0,)
    if not Ts:
        raise ConfigError("T list is empty")
    mode = merged["mode"]
    if mode != "ode" and not xs:
        raise ConfigError(f"mode {mode} needs x values (--x or --x-range)")
    if mode != "ode" and any(v == 0 for v in xs):
        raise ConfigError("x = 0 is allowed only in ode mode")
    fmt = merged["format"] or "csv"
    if fmt not in FORMATS:
        raise ConfigError(f"unknown format {fmt!r}")
    jobs = int(merged["jobs"] or 1)
    if jobs < 1:
        raise ConfigError("jobs must be >= 1")
    try:
        bvp_cfg = BVPConfig(**bvp)
        rh_cfg = RHConfig(**rh)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    grid = int(merged["grid"] or 81)
    window = float(merged["window"] or 6.0)
    if grid < 2 or window <= 0:
        raise ConfigError("grid must be >= 2 and window > 0")
    return RunConfig(mode=mode, x_values=xs, T_values=Ts, bvp=bvp_cfg, rh=rh_cfg,
                     output=merged["output"], format=fmt, jobs=jobs, grid=grid, window=window)


# ---------------------------------------------------------------- engines

class EngineError(RuntimeError):
    def __init__(self, record):
        self.record = record
        super().__init__(record.get("message", ""))


def _rh_point(args):
    x, T, cfg = args
    try:
        return rh_evaluate(x, T, cfg)
    except Exception as exc:          # surfaced as a record, handled by the caller
        return {"error": type(exc).__name__, "message": str(exc), "x": x, "T": T}


def _map(fn, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


def _rh_all(cfg, pairs, strict=True):
    out = _map(_rh_point, [(x, T, cfg.rh) for x, T in pairs], cfg.jobs)
    for r in out:
        if strict and isinstance(r, dict):
            raise EngineError(r)
    return out


def _ode_grids(cfg):
    try:
        return dict(zip(cfg.T_values, continuation_in_T(cfg.bvp, list(cfg.T_values))))
    except Exception as exc:
        raise EngineError({"error": type(exc).__name__, "message": str(exc),
                           "engine": "ode"}) from exc


def _slope(xs, ds):
    xs, ds = np.abs(np.asarray(xs, float)), np.asarray(ds, float)
    ok = np.isfinite(ds) & (ds > 0)
    if ok.sum() < 2 or np.ptp(np.log(xs[ok])) == 0:
        return math.nan
    return float(np.polyfit(np.log(xs[ok]), np.log(ds[ok]), 1)[0])


def _rows_asym(cfg):
    rows = []
    for T in cfg.T_values:
        for x in cfg.x_values:
            G = solve_z0(x, T)
            rows.append({"x": x, "T": T, "z0": G.z0, "y_leading": y_leading(x, T)})
    return rows


def _rows_ode(cfg):
    grids = _ode_grids(cfg)
    rows = []
    for T in cfg.T_values:
        g = grids[T]
        if cfg.x_values:
            for x in cfg.x_values:
                j = jet_at(g, x)
                rows.append({"x": x, "T": T, "y": j.y, "y_x": j.y_x, "y_xx": j.y_xx,
                             "y_xxx": j.y_xxx, "y_xxxx": j.y_xxxx,
                             "residual_norm": g.residual_norm})
        else:
            for x, v, r in zip(g.nodes, g.values, g.node_residuals):
                rows.append({"x": float(x), "T": T, "y": v[0], "y_x": v[1], "y_xx": v[2],
                             "y_xxx": v[3], "residual": float(r)})
    return rows


def _rows_rh(cfg):
    pairs = [(x, T) for T in cfg.T_values for x in cfg.x_values]
    rows = []
    for r in _rh_all(cfg, pairs):
        R1 = r.moments.R1
        rows.append({"x": r.x, "T": r.T, "y": r.y, "y_leading": y_leading(r.x, r.T),
                     "R1_11": R1[0, 0].real, "R1_12": R1[0, 1].real, "R1_21": R1[1, 0].real,
                     "R1_22": R1[1, 1].real, "R1_imag_max": float(np.max(np.abs(R1.imag))),
                     "sigma": r.contour.sigma, "est_error": r.moments.est_error,
                     "max_jump_deviation": r.max_jump_deviation,
                     "panel_count": r.contour.panel_count, "_dump": json.loads(r.to_json())})
    return rows


def _rows_compare(cfg):
    pairs = [(x, T) for T in cfg.T_values for x in cfg.x_values]
    need_ode = any(abs(x) <= cfg.bvp.L for x, _ in pairs)
    grids = _ode_grids(cfg) if need_ode else {}
    rh_pairs = [(x, T) for x, T in pairs if abs(x) >= cfg.rh.x_min]
    rh = dict(zip(rh_pairs, _rh_all(cfg, rh_pairs)))
    rows = []
    for x, T in pairs:
        ya = y_leading(x, T)
        yo = jet_at(grids[T], x).y if abs(x) <= cfg.bvp.L else math.nan
        yr = rh[(x, T)].y if (x, T) in rh else math.nan
        both = math.isfinite(yo) and math.isfinite(yr)
        rows.append({"x": x, "T": T, "y_asym": ya, "y_ode": yo, "y_rh": yr,
                     "abs_ode_rh": abs(yo - yr) if both else math.nan,
                     "abs_rh_asym": abs(yr - ya), "abs_ode_asym": abs(yo - ya),
                     "status": "ok" if both else "no overlap"})
    for T in cfg.T_values:
        for sgn in (1.0, -1.0):
            grp = [r for r in rows if r["T"] == T and r["x"] * sgn > 0]
            s_rh = _slope([r["x"] for r in grp], [r["abs_rh_asym"] for r in grp])
            s_ode = _slope([r["x"] for r in grp], [r["abs_ode_asym"] for r in grp])
            for r in grp:
                r["slope_rh_asym"] = s_rh
                r["slope_ode_asym"] = s_ode
    return rows


def _rows_regscan(cfg):
    rows, maps = [], []
    for T in cfg.T_values:
        for x in cfg.x_values:
            G = solve_z0(x, T)
            c = G.z0_hat
            re = np.linspace(c - cfg.window, c + cfg.window, cfg.grid)
            im = np.linspace(-cfg.window, cfg.window, cfg.grid)
            vals = re_g_grid(G, re, im)
            maps.append((x, T, re, im, vals, G))
            for j, b in enumerate(im):
                for i, a in enumerate(re):
                    rows.append({"x": x, "T": T, "re": float(a), "im": float(b),
                                 "re_g": float(vals[j, i]), "sign": int(np.sign(vals[j, i]))})
    return rows, maps


# ---------------------------------------------------------------- output

_COLUMNS = {
    "asym": ["x", "T", "z0", "y_leading"],
    "ode_points": ["x", "T", "y", "y_x", "y_xx", "y_xxx", "y_xxxx", "residual_norm"],
    "ode_grid": ["T", "x", "y", "y_x", "y_xx", "y_xxx", "residual"],
    "rh": ["x", "T", "y", "y_leading", "R1_11", "R1_12", "R1_21", "R1_22", "R1_imag_max",
           "sigma", "est_error", "max_jump_deviation", "panel_count"],
    "compare": ["x", "T", "y_asym", "y_ode", "y_rh", "abs_ode_rh", "abs_rh_asym",
                "abs_ode_asym", "slope_rh_asym", "slope_ode_asym", "status"],
    "reg-scan": ["x", "T", "re", "im", "re_g", "sign"],
}


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.17g}"


def _csv(cfg, columns, rows):
    buf = io.StringIO()
    for k, v in cfg.metadata().items():
        buf.write(f"# {k}: {json.dumps(v, sort_keys=True)}\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_cell(r[c]) for c in columns) + "\n")
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def _json(cfg, columns, rows):
    out = []
    for r in rows:
        rec = {c: _jsonable(r[c]) for c in columns}
        if "_dump" in r:
            rec["diagnostics"] = r["_dump"]
        out.append(rec)
    return json.dumps({"metadata": cfg.metadata(), "rows": out}, sort_keys=True, indent=1) + "\n"


def _svg(cfg, columns, rows, maps=None):
    if cfg.mode == "reg-scan":
        x, T, re, im, vals, G = maps[0]
        marks = [complex(G.z0), G.z0_hat + np.exp(1j * LENS_ANGLE),
                 G.z0_hat + np.exp(-1j * LENS_ANGLE)]
        return sign_map_svg(re, im, vals, title=f"sign of Re g, x = {x:g}, T = {T:g}",
                            marks=marks)
    series = {}
    for T in cfg.T_values:
        grp = sorted((r for r in rows if r["T"] == T), key=lambda r: r["x"])
        keys = {"asym": ["y_leading"], "ode": ["y"], "rh": ["y"],
                "compare": ["y_asym", "y_ode", "y_rh"]}[cfg.mode]
        for k in keys:
            label = f"{k} T={T:g}" if len(keys) > 1 else f"T={T:g}"
            series[label] = ([r["x"] for r in grp], [r[k] for r in grp])
    return polyline_svg(series, title=f"y(x, T), {cfg.mode}")


def run(cfg):
    """Execute ``cfg``; returns the rendered output text."""
    maps = None
    if cfg.mode == "asym":
        rows, cols = _rows_asym(cfg), _COLUMNS["asym"]
    elif cfg.mode == "ode":
        rows = _rows_ode(cfg)
        cols = _COLUMNS["ode_points" if cfg.x_values else "ode_grid"]
    elif cfg.mode == "rh":
        rows, cols = _rows_rh(cfg), _COLUMNS["rh"]
    elif cfg.mode == "compare":
        rows, cols = _rows_compare(cfg), _COLUMNS["compare"]
    else:
        (rows, maps), cols = _rows_regscan(cfg), _COLUMNS["reg-scan"]
    if cfg.format == "csv":
        return _csv(cfg, cols, rows)
    if cfg.format == "json":
        return _json(cfg, cols, rows)
    return _svg(cfg, cols, rows, maps)


def _setup_logging():
    level = os.environ.get("PI2_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _setup_logging()
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = run(cfg)
    except EngineError as exc:
        print(json.dumps(exc.record, sort_keys=True), file=sys.stderr)
        return EXIT_ENGINE
    except Exception as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_ENGINE
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
