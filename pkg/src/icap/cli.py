"""Batch front end: run named cases, write field and diagnostic CSVs,
drive convergence studies.

Config resolution is file < flags: a plain ``key = value`` file (with
optional ``[section]`` headers, sections are cosmetic) supplies values
that individual command-line flags override, and anything still unset
falls back to the named case's defaults. Unknown keys are rejected.

Outputs per run: one field CSV per requested snapshot plus the final
field, a diagnostics time series, and ``manifest.json`` holding every
resolved parameter, the wall time and final error norms where the case
has an exact reference. CSV outputs are deterministic byte for byte for
a given config; the manifest is informational (wall time varies).

Exit codes: 0 ok, 2 config error, 3 instability abort (the last finite
state is flushed as ``field_lastgood.csv`` before exiting).
"""

from __future__ import annotations

import argparse
import configparser
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .cases import CASES, SCHEMES, build, convergence_study, run_tophat1d
from .diagnostics import DiagnosticSeries, error_norms
from .grid import ConfigError
from .integrate import InstabilityError, advance

FIELD_FMT = ["%d", "%d", "%.17g", "%.17g", "%.17g"]


@dataclass
class RunConfig:
    """Fully resolved run parameters; None means 'use the case default'."""

    case: str
    scheme: str | None = None
    beta: float = 2.0
    integrator: str | None = None
    cfl: float | None = None
    nx: int | None = None
    ny: int | None = None
    t_end: float | None = None
    snapshots: tuple | None = None
    outdir: str | None = None
    formats: tuple = ("csv",)


def _floats(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as e:
        raise ConfigError(f"bad number list {text!r}") from e


def _formats(text: str) -> tuple:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    for p in parts:
        if p != "csv":
            raise ConfigError(f"unsupported output format {p!r} (only csv)")
    return parts or ("csv",)


def _conv(kind, key):
    def f(text):
        try:
            return kind(text)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad value for {key}: {text!r}") from e
    return f


# every config-file key, with its parser; each is also a CLI flag
KEYS = {
    "case": str,
    "scheme": str,
    "beta": _conv(float, "beta"),
    "integrator": str,
    "cfl": _conv(float, "cfl"),
    "nx": _conv(int, "nx"),
    "ny": _conv(int, "ny"),
    "t_end": _conv(float, "t_end"),
    "snapshots": _floats,
    "outdir": str,
    "formats": _formats,
}


def parse_config_file(path: str) -> dict:
    """Flat key -> raw string dict from a ``key = value`` file."""
    try:
        text = open(path).read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e}") from e
    # synthetic leading section so headerless files parse; strict=False lets
    # a file's own [run] section merge with it, later duplicates winning
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                   strict=False)
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as e:
        raise ConfigError(f"bad config {path!r}: {e}") from e
    out = {}
    for section in cp.sections():
        for key, val in cp.items(section):
            out[key] = val
    return out


def resolve_config(file_values: dict, flag_values: dict) -> RunConfig:
    """Merge raw file values and typed flag overrides into a RunConfig."""
    merged = {}
    for key, raw in file_values.items():
        if key not in KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = KEYS[key](raw)
    for key, val in flag_values.items():
        if val is not None:
            merged[key] = KEYS[key](val) if isinstance(val, str) else val
    if "case" not in merged:
        raise ConfigError("no case named (config key or --case)")
    if merged["case"] not in CASES:
        raise ConfigError(f"unknown case {merged['case']!r}; "
                          f"known: {', '.join(sorted(CASES))}")
    cfg = RunConfig(**merged)
    if cfg.scheme is not None and cfg.scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {cfg.scheme!r}; pick one of {SCHEMES}")
    if cfg.integrator is not None and cfg.integrator not in ("euler", "rk2"):
        raise ConfigError(f"integrator must be euler or rk2, got {cfg.integrator!r}")
    if (cfg.nx is None) != (cfg.ny is None) or \
            (cfg.nx is not None and cfg.nx != cfg.ny):
        # every registered case lives on a square grid
        raise ConfigError("nx and ny must be given together and equal")
    return cfg


def _thread_cap() -> int | None:
    """ICAP_THREADS validation. The kernels are sequential in-process, so
    any positive cap is trivially honored; the value is recorded in the
    manifest for provenance."""
    raw = os.environ.get("ICAP_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError as e:
        raise ConfigError(f"ICAP_THREADS must be an integer, got {raw!r}") from e
    if n < 1:
        raise ConfigError(f"ICAP_THREADS must be >= 1, got {n}")
    return n


def field_csv(grid_like, values: np.ndarray, t: float) -> str:
    """Serialize one field: header then i,j,x,y,value rows, row-major."""
    nx, ny = values.shape
    h = grid_like.h
    x = grid_like.x0 + (np.arange(nx) + 0.5) * h
    y = grid_like.y0 + (np.arange(ny) + 0.5) * h
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    xx, yy = np.meshgrid(x, y, indexing="ij")
    rows = np.column_stack([ii.ravel(), jj.ravel(), xx.ravel(), yy.ravel(),
                            values.ravel()])
    buf = io.StringIO()
    buf.write("# nx=%d ny=%d h=%.17g t=%.17g\n" % (nx, ny, h, t))
    np.savetxt(buf, rows, fmt=FIELD_FMT, delimiter=",")
    return buf.getvalue()


@dataclass
class _Grid1D:
    h: float
    x0: float = 0.0
    y0: float = 0.0


def _write(outdir: str, name: str, text: str) -> str:
    path = os.path.join(outdir, name)
    with open(path, "w") as f:
        f.write(text)
    return path


def _snapshot_name(t: float) -> str:
    return "field_t%.6f.csv" % t


def _run_1d(cfg: RunConfig, outdir: str, manifest: dict) -> int:
    scheme = cfg.scheme or CASES["tophat1d"].scheme
    if not scheme.startswith("muscl:"):
        raise ConfigError("tophat1d runs the 1d limiter schemes (muscl:*)")
    if (cfg.integrator or "euler") != "euler":
        raise ConfigError("tophat1d is forward Euler only")
    n = cfg.nx or CASES["tophat1d"].default_n
    nu = CASES["tophat1d"].cfl if cfg.cfl is None else cfg.cfl
    t_end = CASES["tophat1d"].t_end if cfg.t_end is None else cfg.t_end
    t0 = time.perf_counter()
    z, series, ref = run_tophat1d(n=n, nu=nu, t_end=t_end,
                                  kind=scheme.split(":", 1)[1])
    h = 1.0 / n
    _write(outdir, "field_final.csv",
           field_csv(_Grid1D(h), z[:, None], t_end))
    _write(outdir, "diagnostics.csv", series.to_csv())
    d = z - ref
    manifest["resolved"].update(scheme=scheme, integrator="euler", nx=n, ny=1,
                                cfl=nu, t_end=t_end, h=h)
    manifest["norms"] = {"l1": float(np.abs(d).sum() * h),
                         "l2": float(np.sqrt((d * d).sum() * h)),
                         "linf": float(np.abs(d).max()),
                         "econs": abs(float(d.sum()) * h)}
    manifest["steps"] = len(series.times) - 1
    manifest["wall_time_s"] = time.perf_counter() - t0
    _write(outdir, "manifest.json", json.dumps(manifest, indent=2, sort_keys=True))
    return 0


def run_command(cfg: RunConfig) -> int:
    outdir = cfg.outdir or os.path.join("runs", cfg.case)
    os.makedirs(outdir, exist_ok=True)
    manifest = {
        "version": __version__,
        "command": "run",
        "resolved": {k: (list(v) if isinstance(v, tuple) else v)
                     for k, v in asdict(cfg).items()},
        "threads": _thread_cap(),
        "norms": None,
    }
    if CASES[cfg.case].dim == 1:
        return _run_1d(cfg, outdir, manifest)

    p = build(cfg.case, scheme=cfg.scheme, integrator=cfg.integrator,
              n=cfg.nx, cfl=cfg.cfl, beta=cfg.beta, t_end=cfg.t_end)
    snaps = CASES[cfg.case].snapshot_times if cfg.snapshots is None \
        else cfg.snapshots
    manifest["resolved"].update(
        scheme=p.scheme, integrator=p.tc.scheme, nx=p.grid.nx, ny=p.grid.ny,
        cfl=p.tc.cfl, t_end=p.tc.t_end, h=p.grid.h, dt=p.dt,
        snapshots=list(snaps))

    series = DiagnosticSeries()
    series.sample(p.z0, 0.0)
    sampled = [0]

    def on_step(z, t, k):
        series.sample(z, t)
        sampled[0] = k

    written = []

    def on_snapshot(z, t):
        written.append(_write(outdir, _snapshot_name(t),
                              field_csv(z.grid, z.interior, t)))

    t0 = time.perf_counter()
    try:
        zf, t, steps = advance(p.z0, p.rate, p.tc, p.bc, p.dt,
                               snapshot_times=snaps, on_snapshot=on_snapshot,
                               on_step=on_step)
    except InstabilityError as e:
        _write(outdir, "field_lastgood.csv",
               field_csv(e.state.grid, e.state.interior, e.t))
        _write(outdir, "diagnostics.csv", series.to_csv())
        manifest["aborted"] = str(e)
        manifest["wall_time_s"] = time.perf_counter() - t0
        _write(outdir, "manifest.json",
               json.dumps(manifest, indent=2, sort_keys=True))
        print(f"error: {e}; last finite state flushed", file=sys.stderr)
        return 3
    wall = time.perf_counter() - t0

    _write(outdir, "field_final.csv", field_csv(zf.grid, zf.interior, t))
    _write(outdir, "diagnostics.csv", series.to_csv())
    try:
        manifest["norms"] = error_norms(zf, p.reference()).as_dict()
    except ValueError:
        manifest["norms"] = None  # case has no closed-form reference here
    manifest["steps"] = steps
    manifest["wall_time_s"] = wall
    manifest["files"] = sorted(os.path.basename(w) for w in written) + \
        ["diagnostics.csv", "field_final.csv"]
    _write(outdir, "manifest.json", json.dumps(manifest, indent=2, sort_keys=True))
    return 0


def convergence_command(args) -> int:
    grids = tuple(int(g) for g in _floats(args.grids))
    if len(grids) < 2:
        raise ConfigError("convergence needs at least two grid sizes")
    outdir = args.outdir or os.path.join("runs", f"{args.case}_convergence")
    os.makedirs(outdir, exist_ok=True)
    _thread_cap()
    rows, slopes = convergence_study(
        args.case, grids, scheme=args.scheme or "mlp",
        beta=args.beta, integrator=args.integrator or "rk2",
        cfl=args.cfl, t_end=args.t_end)
    buf = io.StringIO()
    buf.write("h,l1,l2,linf,econs\n")
    for h, e in rows:
        buf.write("%.17g,%.17g,%.17g,%.17g,%.17g\n"
                  % (h, e.l1, e.l2, e.linf, e.econs))
    for key in ("l1", "l2", "linf", "econs"):
        s = slopes[key]
        buf.write("# slope_%s=%s\n" % (key, "exact" if s is None else "%.12g" % s))
    text = buf.getvalue()
    _write(outdir, "convergence.csv", text)
    print(text, end="")
    return 0


def list_cases_command() -> int:
    for name, info in CASES.items():
        print(f"{name:<16} n={info.default_n:<4} t_end={info.t_end:<10.6g} "
              f"cfl={info.cfl:<5g} {info.scheme}+{info.integrator}")
        print(f"{'':<16} {info.description}")
    return 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="icap",
                                 description="interface-capturing benchmark runner")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one case, write CSV outputs")
    run.add_argument("--config", help="key = value config file")
    for key in KEYS:
        run.add_argument("--" + key.replace("_", "-"), dest=key)

    conv = sub.add_parser("convergence", help="error norms over a grid sequence")
    conv.add_argument("--case", required=True)
    conv.add_argument("--grids", required=True, help="comma list, e.g. 32,64,128")
    conv.add_argument("--scheme")
    conv.add_argument("--integrator")
    conv.add_argument("--beta", type=float, default=2.0)
    conv.add_argument("--cfl", type=float)
    conv.add_argument("--t-end", dest="t_end", type=float)
    conv.add_argument("--outdir")

    sub.add_parser("list-cases", help="show registered cases and defaults")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            file_values = parse_config_file(args.config) if args.config else {}
            flag_values = {k: getattr(args, k) for k in KEYS}
            cfg = resolve_config(file_values, flag_values)
            return run_command(cfg)
        if args.command == "convergence":
            return convergence_command(args)
        return list_cases_command()
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
