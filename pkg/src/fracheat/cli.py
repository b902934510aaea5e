"""Command line front end.

Every command reads an optional YAML config, applies command line overrides,
computes, and only then writes its outputs: one JSON report plus CSV tables
for curve-like results. Floats are serialized with 17 significant digits, so
identical config and seed give byte-identical files.

Exit codes: 0 success, 2 validation error (bad config or arguments),
3 numerical failure, 4 a verification found violations it could not certify
away within its parameter grids.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .ballavg import approx_error, ball_avg_apply, multiplier_shape_report
from .badsets import (bad_set_D, bad_set_S, diff_field, distance_proxies,
                      distance_upper_oracle, eps_sweep, theta_profile,
                      verify_prop_61, verify_prop_62, verify_prop_63)
from .errors import NumericalError, ValidationError
from .grid import PeriodicGrid, SampledFunction
from .heat import FracHeatParams, TimeGrid, heat_deriv_field, kernel_values, semigroup_apply
from .hyperbolic import carleson_M, mu_measure
from .selftest import run_selftest
from .smoothness import (lambda_s_norm_diff, lambda_s_seminorm_diff, lambda_s_seminorm_heat,
                         make_lacunary, make_mode, make_random_decay, make_smoothstep)
from .wavelets import LatticeSpec, WaveletSystem

DEFAULTS = {
    "function": {"kind": "lacunary", "s": 0.5, "mode": 4, "seed": 0,
                 "edges": [0.25, 0.75], "samples": None, "path": None},
    "grid": {"dim": 1, "size": 4096},
    "params": {"alpha": 2.0, "r": 2, "s": 0.5},
    "times": {"octaves": 8, "per_octave": 16},
    "wavelets": {"filter_order": None, "levels": 8},
    "lattice": {"kind": "lq_Lp", "p": 2.0, "q": 2.0, "tau": 0.1, "theta": 1.0},
    "kernel": {"alpha": 1.0, "n": 1, "k": 0, "radii": None},
    "semigroup": {"t": 0.25},
    "lipnorm": {"route": "both", "r1": None},
    "ballavg": {"ell": 1, "t": 0.125},
    "badset": {"which": "heat", "eps": None, "eps_scale": 0.5, "r1": 2},
    "sweep": {"num_eps": 32, "decades": 4.0, "cut_frac": 0.05},
    "verify": {"which": "all", "eps_scale": 0.5, "eps1_scale": 0.25, "r1": 6,
               "ell": 1, "inject_octave_shift": 0, "octaves": 12,
               "delta_grid": None, "R_grid": None, "c_grid": None},
    "distance": {"num_eps": 24, "decades": 4.0, "cut_frac": 0.05, "budget": None},
    "selftest": {"checks": None},
}


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------


def _plain(obj):
    """Numpy-free copy: scalars to python types, arrays to nested lists."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _emit(obj, indent: int) -> str:
    pad, pad1 = " " * indent, " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"  # JSON has no inf/nan
        return "%.17g" % obj
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f"{pad1}{json.dumps(str(k))}: {_emit(v, indent + 2)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        flat = all(not isinstance(v, (dict, list)) for v in obj)
        if flat:
            return "[" + ", ".join(_emit(v, 0) for v in obj) + "]"
        rows = [f"{pad1}{_emit(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    raise ValidationError(f"cannot serialize {type(obj).__name__}")


def _json_text(obj) -> str:
    return _emit(_plain(obj), 0) + "\n"


def _csv_text(header, columns) -> str:
    cols = [np.asarray(c) for c in columns]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join("%.17g" % float(v) for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------


def _merge(base: dict, over: dict) -> dict:
    out = {k: dict(v) if isinstance(v, dict) else v for k, v in base.items()}
    for k, v in over.items():
        if k not in out:
            raise ValidationError(f"unknown config section or key: {k}")
        if isinstance(out[k], dict):
            if not isinstance(v, dict):
                raise ValidationError(f"config section {k} must be a mapping")
            for kk, vv in v.items():
                if kk not in out[k]:
                    raise ValidationError(f"unknown config key: {k}.{kk}")
                out[k][kk] = vv
        else:
            out[k] = v
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return _merge(DEFAULTS, {})
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"malformed config: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValidationError("config root must be a mapping")
    return _merge(DEFAULTS, data)


def _apply_overrides(cfg: dict, pairs) -> None:
    for section, key, value in pairs:
        if value is not None:
            cfg[section][key] = value


# ---------------------------------------------------------------------------
# object builders
# ---------------------------------------------------------------------------


def _build_grid(cfg) -> PeriodicGrid:
    g = cfg["grid"]
    return PeriodicGrid(int(g["dim"]), int(g["size"]))


def _build_function(cfg) -> SampledFunction:
    fc = cfg["function"]
    kind = fc["kind"]
    if kind == "samples":
        if fc["path"] is not None:
            vals = np.loadtxt(fc["path"], delimiter=",")
        elif fc["samples"] is not None:
            vals = np.asarray(fc["samples"], dtype=float)
        else:
            raise ValidationError("function.kind samples needs samples or path")
        dim = vals.ndim
        grid = PeriodicGrid(dim, vals.shape[0])
        if vals.shape != grid.shape:
            raise ValidationError(f"sample array shape {vals.shape} is not square")
        return SampledFunction(grid, vals)
    grid = _build_grid(cfg)
    s = float(fc["s"])
    if kind == "lacunary":
        return make_lacunary(grid, s)
    if kind == "mode":
        return make_mode(grid, fc["mode"])
    if kind == "smoothstep":
        return make_smoothstep(grid, tuple(fc["edges"]))
    if kind == "random-decay":
        return make_random_decay(grid, s, seed=int(fc["seed"]))
    raise ValidationError(f"unknown function.kind: {kind}")


def _build_params(cfg) -> FracHeatParams:
    p = cfg["params"]
    return FracHeatParams(alpha=float(p["alpha"]), r=int(p["r"]), s=float(p["s"]))


def _build_times(cfg, octaves=None) -> TimeGrid:
    t = cfg["times"]
    return TimeGrid(int(octaves if octaves is not None else t["octaves"]),
                    int(t["per_octave"]))


def _build_wavelets(cfg) -> WaveletSystem:
    w = cfg["wavelets"]
    order = w["filter_order"]
    if order is None:
        order = 8 if float(cfg["params"]["s"]) <= 1.0 else 10
    return WaveletSystem(filter_order=int(order), levels=w["levels"])


def _build_lattice(cfg) -> LatticeSpec:
    sp = cfg["lattice"]
    tau = float(sp["tau"]) if sp["kind"] in ("lq_Lp_tau", "Lp_tau_lq") else 0.0
    return LatticeSpec(kind=sp["kind"], p=float(sp["p"]), q=float(sp["q"]),
                       tau=tau, theta=float(sp["theta"]))


def _metadata(cfg, command: str, seed, threads: int) -> dict:
    return {"command": command, "version": __version__,
            "seed": int(cfg["function"]["seed"]) if seed is None else int(seed),
            "threads": int(threads), "config": cfg}


# ---------------------------------------------------------------------------
# commands: each returns (exit_code, {filename: text})
# ---------------------------------------------------------------------------


def cmd_kernel(cfg, meta):
    kc = cfg["kernel"]
    radii = kc["radii"]
    radii = np.linspace(0.0, 10.0, 21) if radii is None else np.asarray(radii, dtype=float)
    vals, errs = kernel_values(float(kc["alpha"]), int(kc["n"]), radii,
                               k=int(kc["k"]), with_error=True)
    payload = {"meta": meta, "radii": radii, "values": vals, "error_estimates": errs}
    return 0, {"kernel.json": _json_text(payload),
               "kernel.csv": _csv_text(["radius", "value", "error_estimate"],
                                       [radii, vals, errs])}


def cmd_semigroup(cfg, meta):
    f = _build_function(cfg)
    t = float(cfg["semigroup"]["t"])
    alpha = float(cfg["params"]["alpha"])
    out = semigroup_apply(f, alpha, t)
    payload = {"meta": meta, "t": t, "alpha": alpha,
               "input_sup": f.sup_norm(), "output_sup": out.sup_norm()}
    files = {"semigroup.json": _json_text(payload)}
    if f.grid.dim == 1:
        files["semigroup.csv"] = _csv_text(["x", "input", "output"],
                                           [f.grid.axis_points(), f.values, out.values])
    return 0, files


def cmd_lipnorm(cfg, meta):
    f = _build_function(cfg)
    p = _build_params(cfg)
    lc = cfg["lipnorm"]
    r1 = lc["r1"]
    route = lc["route"]
    if route not in ("heat", "diff", "both"):
        raise ValidationError(f"unknown lipnorm.route: {route}")
    payload = {"meta": meta, "s": p.s}
    if route in ("heat", "both"):
        payload["seminorm_heat"] = lambda_s_seminorm_heat(f, p, _build_times(cfg))
    if route in ("diff", "both"):
        payload["seminorm_diff"] = lambda_s_seminorm_diff(f, p.s, r1=r1)
        payload["norm_diff"] = lambda_s_norm_diff(f, p.s, r1=r1)
    if route == "both":
        payload["ratio_heat_over_diff"] = payload["seminorm_heat"] / payload["seminorm_diff"]
    return 0, {"lipnorm.json": _json_text(payload)}


def cmd_ballavg(cfg, meta):
    f = _build_function(cfg)
    bc = cfg["ballavg"]
    ell, t = int(bc["ell"]), float(bc["t"])
    out = ball_avg_apply(f, ell, t)
    payload = {"meta": meta, "ell": ell, "t": t,
               "sup_error": approx_error(f, ell, t),
               "multiplier_shape": multiplier_shape_report(ell, f.grid.dim)}
    files = {"ballavg.json": _json_text(payload)}
    if f.grid.dim == 1:
        files["ballavg.csv"] = _csv_text(["x", "input", "averaged"],
                                         [f.grid.axis_points(), f.values, out.values])
    return 0, files


def _resolve_eps(eps, scale, envelope):
    if eps is not None:
        return float(eps)
    return float(scale) * envelope


def cmd_badset(cfg, meta):
    f = _build_function(cfg)
    p = _build_params(cfg)
    times = _build_times(cfg)
    bc = cfg["badset"]
    which = bc["which"]
    if which == "heat":
        field = heat_deriv_field(f, p, times)
        env = field.envelope()
        eps = _resolve_eps(bc["eps"], bc["eps_scale"], env)
        A = bad_set_D(field, p.s, eps)
    elif which == "diff":
        field = diff_field(f, int(bc["r1"]), times)
        env = field.envelope(p.s)
        eps = _resolve_eps(bc["eps"], bc["eps_scale"], env)
        A = bad_set_S(f, int(bc["r1"]), p.s, eps, times)
    else:
        raise ValidationError(f"unknown badset.which: {which}")
    theta = theta_profile(A)
    cell = f.grid.spacing ** f.grid.dim
    mu_per = theta.reshape(times.octaves, -1).sum(axis=1) * cell
    counts = A.mask.reshape(times.octaves, -1).sum(axis=1)
    payload = {"meta": meta, "which": which, "eps": eps, "envelope": env,
               "count": int(A.count()), "mu": mu_measure(A), "carleson": carleson_M(A),
               "octave_counts": counts, "octave_mu": mu_per}
    return 0, {"badset.json": _json_text(payload),
               "badset.csv": _csv_text(["octave", "count", "mu"],
                                       [np.arange(times.octaves), counts, mu_per])}


def cmd_sweep(cfg, meta):
    f = _build_function(cfg)
    p = _build_params(cfg)
    sc = cfg["sweep"]
    sw = eps_sweep(f, p, _build_times(cfg), _build_wavelets(cfg), _build_lattice(cfg),
                   num_eps=int(sc["num_eps"]), decades=float(sc["decades"]),
                   cut_frac=float(sc["cut_frac"]))
    payload = {"meta": meta, "envelope": sw.envelope, "theta": sw.theta,
               "cut_frac": sw.cut_frac, "index_X": sw.index_X, "index_X0": sw.index_X0,
               "eps": sw.eps, "norm_X": sw.norm_X, "norm_X0": sw.norm_X0,
               "mu": sw.mu, "carleson": sw.carleson}
    return 0, {"sweep.json": _json_text(payload),
               "sweep.csv": _csv_text(["eps", "norm_X", "norm_X0", "mu", "carleson"],
                                      [sw.eps, sw.norm_X, sw.norm_X0, sw.mu, sw.carleson])}


def _grid_or_none(v):
    return None if v is None else [float(x) for x in v]


def cmd_verify(cfg, meta, threads: int):
    f = _build_function(cfg)
    p = _build_params(cfg)
    vc = cfg["verify"]
    times = _build_times(cfg, octaves=vc["octaves"])
    which = vc["which"]
    if which == "all":
        which = ["prop_61", "prop_62", "prop_63"]
    elif isinstance(which, str):
        which = [which]
    known = {"prop_61", "prop_62", "prop_63"}
    if not set(which) <= known:
        raise ValidationError(f"verify.which must be from {sorted(known)}")
    W = heat_deriv_field(f, p, times)
    lam = W.envelope()
    eps = float(vc["eps_scale"]) * lam
    eps1 = float(vc["eps1_scale"]) * lam
    dgrid = _grid_or_none(vc["delta_grid"])
    Rgrid = _grid_or_none(vc["R_grid"])
    cgrid = _grid_or_none(vc["c_grid"])

    jobs = {}
    if "prop_61" in which:
        jobs["prop_61"] = lambda: verify_prop_61(
            W, p.s, eps, eps1, delta_grid=dgrid,
            inject_octave_shift=int(vc["inject_octave_shift"]))
    if "prop_62" in which:
        jobs["prop_62"] = lambda: verify_prop_62(
            f, p, int(vc["r1"]), p.s, eps, R_grid=Rgrid, c_grid=cgrid, times=times)
    if "prop_63" in which:
        jobs["prop_63"] = lambda: verify_prop_63(
            f, p, int(vc["ell"]), p.s, eps, R_grid=Rgrid, c_grid=cgrid, times=times)

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {name: pool.submit(fn) for name, fn in jobs.items()}
            results = {name: fut.result() for name, fut in futures.items()}
    else:
        results = {name: fn() for name, fn in jobs.items()}

    certified = True
    for name, rep in results.items():
        if name == "prop_61":
            certified = certified and rep["largest_passing"] is not None
        else:
            certified = certified and rep["minimal_R"] is not None
    payload = {"meta": meta, "eps": eps, "eps1": eps1, "envelope": lam,
               "certified": certified, "reports": results}
    return (0 if certified else 4), {"verify.json": _json_text(payload)}


def cmd_distance(cfg, meta):
    f = _build_function(cfg)
    p = _build_params(cfg)
    dc = cfg["distance"]
    sys_w = _build_wavelets(cfg)
    rep = distance_proxies(f, p, _build_times(cfg), sys_w,
                           num_eps=int(dc["num_eps"]), decades=float(dc["decades"]),
                           cut_frac=float(dc["cut_frac"]))
    payload = {"meta": meta, "report": rep}
    if dc["budget"] is not None:
        payload["upper_oracle"] = distance_upper_oracle(
            f, sys_w, _build_lattice(cfg), p.s, norm_budget=float(dc["budget"]))
    names = ["besov", "besov_sup", "tl", "tl_sup", "besov_tau", "tl_tau"]
    cols = [rep["eps"]] + [rep["spaces"][nm]["curve"] for nm in names]
    return 0, {"distance.json": _json_text(payload),
               "distance.csv": _csv_text(["eps"] + names, cols)}


def cmd_selftest(cfg, meta):
    checks = cfg["selftest"]["checks"]
    if isinstance(checks, str):
        checks = [int(v) for v in checks.split(",")]
    results = run_selftest(checks)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.number:2d} {r.name}: "
              f"{r.detail} ({r.seconds:.1f}s)")
    payload = {"meta": meta,
               "results": [{"number": r.number, "name": r.name,
                            "passed": r.passed, "detail": r.detail} for r in results]}
    code = 0 if results and all(r.passed for r in results) else 3
    return code, {"selftest.json": _json_text(payload)}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(sp):
    sp.add_argument("--config", default=None, help="YAML config file")
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--seed", type=int, default=None, help="RNG seed (unsigned 64-bit)")
    sp.add_argument("--threads", type=int, default=1, help="worker threads")


def _add_shared_overrides(sp):
    sp.add_argument("--function-kind", dest="function_kind", default=None,
                    choices=["lacunary", "mode", "smoothstep", "random-decay", "samples"])
    sp.add_argument("--function-s", dest="function_s", type=float, default=None)
    sp.add_argument("--grid-size", dest="grid_size", type=int, default=None)
    sp.add_argument("--grid-dim", dest="grid_dim", type=int, default=None)
    sp.add_argument("--params-alpha", dest="params_alpha", type=float, default=None)
    sp.add_argument("--params-r", dest="params_r", type=int, default=None)
    sp.add_argument("--params-s", dest="params_s", type=float, default=None)
    sp.add_argument("--octaves", type=int, default=None)
    sp.add_argument("--per-octave", dest="per_octave", type=int, default=None)


def _floats(text):
    return [float(v) for v in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracheat",
                                 description="fractional heat smoothness toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", help="kernel values at given radii")
    _add_common(k)
    k.add_argument("--alpha", type=float, default=None)
    k.add_argument("--n", type=int, default=None, choices=[1, 2])
    k.add_argument("--k", type=int, default=None, choices=[0, 1, 2])
    k.add_argument("--radii", type=_floats, default=None)

    sg = sub.add_parser("semigroup", help="apply the semigroup at one time")
    _add_common(sg)
    _add_shared_overrides(sg)
    sg.add_argument("--t", type=float, default=None)

    ln = sub.add_parser("lipnorm", help="smoothness seminorms by both routes")
    _add_common(ln)
    _add_shared_overrides(ln)
    ln.add_argument("--route", default=None, choices=["heat", "diff", "both"])
    ln.add_argument("--r1", type=int, default=None)

    ba = sub.add_parser("ballavg", help="iterated ball average at one scale")
    _add_common(ba)
    _add_shared_overrides(ba)
    ba.add_argument("--ell", type=int, default=None)
    ba.add_argument("--t", type=float, default=None)

    bs = sub.add_parser("badset", help="threshold exceedance set summary")
    _add_common(bs)
    _add_shared_overrides(bs)
    bs.add_argument("--which", default=None, choices=["heat", "diff"])
    bs.add_argument("--eps", type=float, default=None)
    bs.add_argument("--eps-scale", dest="eps_scale", type=float, default=None)
    bs.add_argument("--r1", type=int, default=None)

    sw = sub.add_parser("sweep", help="norm curves over an epsilon ladder")
    _add_common(sw)
    _add_shared_overrides(sw)
    sw.add_argument("--num-eps", dest="num_eps", type=int, default=None)
    sw.add_argument("--decades", type=float, default=None)
    sw.add_argument("--cut-frac", dest="cut_frac", type=float, default=None)

    vf = sub.add_parser("verify", help="octave inclusion verifiers")
    _add_common(vf)
    _add_shared_overrides(vf)
    vf.add_argument("--which", default=None)
    vf.add_argument("--eps-scale", dest="eps_scale", type=float, default=None)
    vf.add_argument("--eps1-scale", dest="eps1_scale", type=float, default=None)
    vf.add_argument("--r1", type=int, default=None)
    vf.add_argument("--ell", type=int, default=None)
    vf.add_argument("--inject-octave-shift", dest="inject_octave_shift",
                    type=int, default=None)
    vf.add_argument("--verify-octaves", dest="verify_octaves", type=int, default=None)
    vf.add_argument("--delta-grid", dest="delta_grid", type=_floats, default=None)
    vf.add_argument("--R-grid", dest="R_grid", type=_floats, default=None)
    vf.add_argument("--c-grid", dest="c_grid", type=_floats, default=None)

    ds = sub.add_parser("distance", help="distance proxy curves and indices")
    _add_common(ds)
    _add_shared_overrides(ds)
    ds.add_argument("--num-eps", dest="num_eps", type=int, default=None)
    ds.add_argument("--decades", type=float, default=None)
    ds.add_argument("--cut-frac", dest="cut_frac", type=float, default=None)
    ds.add_argument("--budget", type=float, default=None)

    st = sub.add_parser("selftest", help="run the full check battery")
    _add_common(st)
    st.add_argument("--checks", default=None, help="comma list of check numbers")
    return ap


_SHARED_MAP = [
    ("function_kind", "function", "kind"), ("function_s", "function", "s"),
    ("grid_size", "grid", "size"), ("grid_dim", "grid", "dim"),
    ("params_alpha", "params", "alpha"), ("params_r", "params", "r"),
    ("params_s", "params", "s"),
    ("octaves", "times", "octaves"), ("per_octave", "times", "per_octave"),
]

_COMMAND_MAP = {
    "kernel": [("alpha", "kernel", "alpha"), ("n", "kernel", "n"),
               ("k", "kernel", "k"), ("radii", "kernel", "radii")],
    "semigroup": [("t", "semigroup", "t")],
    "lipnorm": [("route", "lipnorm", "route"), ("r1", "lipnorm", "r1")],
    "ballavg": [("ell", "ballavg", "ell"), ("t", "ballavg", "t")],
    "badset": [("which", "badset", "which"), ("eps", "badset", "eps"),
               ("eps_scale", "badset", "eps_scale"), ("r1", "badset", "r1")],
    "sweep": [("num_eps", "sweep", "num_eps"), ("decades", "sweep", "decades"),
              ("cut_frac", "sweep", "cut_frac")],
    "verify": [("which", "verify", "which"), ("eps_scale", "verify", "eps_scale"),
               ("eps1_scale", "verify", "eps1_scale"), ("r1", "verify", "r1"),
               ("ell", "verify", "ell"),
               ("inject_octave_shift", "verify", "inject_octave_shift"),
               ("verify_octaves", "verify", "octaves"),
               ("delta_grid", "verify", "delta_grid"),
               ("R_grid", "verify", "R_grid"), ("c_grid", "verify", "c_grid")],
    "distance": [("num_eps", "distance", "num_eps"), ("decades", "distance", "decades"),
                 ("cut_frac", "distance", "cut_frac"), ("budget", "distance", "budget")],
    "selftest": [("checks", "selftest", "checks")],
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ValidationError("threads must be >= 1")
        if args.seed is not None and not (0 <= args.seed < 2 ** 64):
            raise ValidationError("seed must fit in an unsigned 64-bit integer")
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["function"]["seed"] = int(args.seed)
        pairs = _SHARED_MAP + _COMMAND_MAP[args.command]
        _apply_overrides(cfg, [(sec, key, getattr(args, attr, None))
                               for attr, sec, key in pairs])
        meta = _metadata(cfg, args.command, args.seed, args.threads)
        if args.command == "kernel":
            code, files = cmd_kernel(cfg, meta)
        elif args.command == "semigroup":
            code, files = cmd_semigroup(cfg, meta)
        elif args.command == "lipnorm":
            code, files = cmd_lipnorm(cfg, meta)
        elif args.command == "ballavg":
            code, files = cmd_ballavg(cfg, meta)
        elif args.command == "badset":
            code, files = cmd_badset(cfg, meta)
        elif args.command == "sweep":
            code, files = cmd_sweep(cfg, meta)
        elif args.command == "verify":
            code, files = cmd_verify(cfg, meta, args.threads)
        elif args.command == "distance":
            code, files = cmd_distance(cfg, meta)
        else:
            code, files = cmd_selftest(cfg, meta)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
