"""Command line entry point.

    heatreach simulate   --config run.json --out DIR
    heatreach synthesize --config run.json --out DIR [--seed S]
    heatreach decompose  --config run.json --out DIR [--resolution N]
    heatreach cousin     --config run.json --out DIR [--resolution N]
    heatreach verify SUITE [--config run.json] --out DIR [--resolution N] [--seed S]

Exit codes: 0 all checks pass, 1 numeric failure, 2 usage or config error.
Each run writes ``<name>.json`` (deterministic payload) and
``<name>.meta.json`` (timing and invocation).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import cauchy as cz
from . import cousin as cs
from . import heat as ht
from . import io
from . import verify as vf
from .domains import Z0, Z1
from .spaces import MEMBERSHIP_DRIFT, vertex_weighted_norm

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# ranges for numeric keys, wherever they occur in a config
RANGES = {
    "tau": (0.0, math.inf, False), "N": (1, 2000, True), "R": (0.0, 128.0, False),
    "K": (1, 64, True), "M": (1, 100, True), "grid": (2, 200, True), "resolution": (1, 64, True),
    "a": (0.0, 10.0, False), "threshold": (0.0, math.inf, False), "generator_K": (1, 16, True),
}


def _check_range(key, value):
    if key == "radii":
        for r in value:
            _check_range("R", r)
        return
    if key not in RANGES or value is None:
        return
    lo, hi, closed_lo = RANGES[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise UsageError(f"{key} must be a number")
    ok = (lo <= value if closed_lo else lo < value) and value <= hi
    if not ok:
        raise UsageError(f"{key} = {value} outside {'[' if closed_lo else '('}{lo}, {hi}]")


def load_config(path, defaults: dict, overrides: dict) -> dict:
    cfg = {}
    if path is not None:
        try:
            cfg = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {path}: {e}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
    for k, v in overrides.items():
        if v is not None:
            cfg[k] = v
    if defaults is not None:
        bad = sorted(set(cfg) - set(defaults))
        if bad:
            raise UsageError(f"unknown config keys: {bad}")
        cfg = {**defaults, **cfg}
    for k, v in cfg.items():
        _check_range(k, v)
    return cfg


def _resolve(base, p):
    p = Path(p)
    return p if p.is_absolute() else Path(base) / p


def _state_input(desc, N, base):
    """Initial state or target from an expression in x, a state CSV or raw coefficients."""
    if desc is None:
        return ht.SineState.zero(N)
    if isinstance(desc, str):
        return ht.SineState.from_function(io.compile_expression(desc, "x"), N)
    if isinstance(desc, dict) and set(desc) == {"file"}:
        st = io.read_states_csv(_resolve(base, desc["file"]))
        return st[-1].truncated(N)
    if isinstance(desc, dict) and set(desc) == {"coeffs"}:
        a = np.array([complex(*c) if isinstance(c, list) else complex(c) for c in desc["coeffs"]])
        return ht.SineState(a).truncated(N)
    raise UsageError(f"state must be an expression in x, {{'file': path}} or {{'coeffs': [...]}}, got {desc!r}")


def _control_input(desc, tau, base):
    if desc is None:
        return ht.ControlSignal.zero(tau)
    if isinstance(desc, dict) and set(desc) == {"file"}:
        return io.read_control_csv(_resolve(base, desc["file"]), tau)
    if isinstance(desc, dict) and set(desc) <= {"u0", "upi"}:
        f0 = io.compile_expression(desc["u0"], "t") if "u0" in desc else None
        fpi = io.compile_expression(desc["upi"], "t") if "upi" in desc else None
        return ht.ControlSignal.from_functions(f0, fpi, tau)
    raise UsageError(f"control must be {{'u0': expr, 'upi': expr}} or {{'file': path}}, got {desc!r}")


def _field_input(desc, base):
    if isinstance(desc, str):
        return io.compile_expression(desc, "z")
    if isinstance(desc, dict) and set(desc) == {"file"}:
        return io.field_interpolant(_resolve(base, desc["file"]))
    raise UsageError(f"field must be an expression in z or {{'file': path}}, got {desc!r}")


VERTICES = {"0": 0j, "pi": np.pi + 0j, "z0": Z0, "z1": Z1}
PIECE_FILES = {"g1+": "piece_g1_plus.csv", "g1-": "piece_g1_minus.csv",
               "g2-": "piece_g2_minus.csv", "g2+": "piece_g2_plus.csv"}


# --------------------------------------------------------------------------
# subcommands; each returns (name, report, passed)

SIMULATE_DEFAULTS = {"tau": 1.0, "N": 200, "t_grid": [0.0, 0.5, 1.0], "initial": "sin(x)", "control": None}


def cmd_simulate(cfg, out, base):
    tg = cfg["t_grid"]
    if not isinstance(tg, list) or not tg:
        raise UsageError("t_grid must be a nonempty list of times")
    if any(not 0 <= t <= cfg["tau"] for t in tg):
        raise UsageError(f"t_grid entries must lie in [0, tau = {cfg['tau']}]")
    f = _state_input(cfg["initial"], cfg["N"], base)
    u = _control_input(cfg["control"], cfg["tau"], base)
    states = ht.simulate(f, u, tg)
    io.write_states_csv(states, out / "states.csv")
    norms = [s.norm() for s in states]
    rep = {"N": cfg["N"], "tau": cfg["tau"], "t": list(tg),
           "coefficient_norm": norms,
           "energy": [np.pi / 4 * n ** 2 for n in norms],
           "a1": [complex(s.coeffs[0]) for s in states],
           "files": {"states": "states.csv"}}
    return "simulate", rep, True


SYNTH_DEFAULTS = {"scenario": "null", "tau": 1.0, "N": 20, "K": 24, "lambda": None, "sweep": False,
                  "threshold": None, "initial": None, "target": None, "generator_K": 4, "seed": 0}


def cmd_synthesize(cfg, out, base):
    tau, N, K = cfg["tau"], cfg["N"], cfg["K"]
    sc = cfg["scenario"]
    rep = {"scenario": sc, "seed": cfg["seed"]}
    if sc == "null":
        f = _state_input(cfg["initial"] or "sin(x)", N, base)
        target = ht.SineState.zero(N)
        thr = cfg["threshold"] or 1e-8
    elif sc == "inverse_crime":
        rng = np.random.default_rng(cfg["seed"])
        c = rng.standard_normal((2, cfg["generator_K"]))
        basis = ht.legendre_basis(tau, cfg["generator_K"])
        gen = [lambda s, _c=cc: sum(ck * p(s) for ck, p in zip(_c, basis)) for cc in c]
        f = None
        target = ht.control_to_state(ht.ControlSignal.from_functions(gen[0], gen[1], tau), N)
        rep["generator_coefficients"] = c.tolist()
        thr = cfg["threshold"] or 1e-6
    elif sc == "target":
        if cfg["target"] is None:
            raise UsageError("scenario 'target' needs a target")
        target = _state_input(cfg["target"], N, base)
        f = None if cfg["initial"] is None else _state_input(cfg["initial"], N, base)
        thr = cfg["threshold"] or 1e-6
    else:
        raise UsageError(f"unknown scenario {sc!r}; choose null, inverse_crime or target")
    lam = cfg["lambda"]
    if lam is not None and not (isinstance(lam, (int, float)) and lam >= 0):
        raise UsageError("lambda must be a nonnegative number or null")
    u, srep = ht.synthesize_lsq(target, tau, K=K, lam=lam, f=f)
    d = srep.to_dict()
    lc = d.pop("lcurve")
    rep.update(d)
    if sc == "null":
        metric = d["final_state_norm"] / f.norm()
        rep["final_relative_norm"] = metric
    else:
        metric = d["residual"]
    rep.update({"metric": metric, "threshold": thr, "files": {"control": "control.csv"}})
    io.write_control_csv(u, out / "control.csv")
    if cfg["sweep"]:
        with open(out / "lcurve.csv", "w") as fh:
            fh.write("lambda,residual,solution_norm\n")
            for row in lc:
                fh.write(",".join(repr(float(row[k])) for k in ("lambda", "residual", "solution_norm")) + "\n")
        r = np.array([row["residual"] for row in lc])
        sn = np.array([row["solution_norm"] for row in lc])
        rep["lcurve"] = lc
        rep["lcurve_monotone"] = bool(np.all(np.diff(r) >= -1e-12 * np.max(r)) and
                                      np.all(np.diff(sn) <= 1e-12 * np.max(sn)))
        rep["files"]["lcurve"] = "lcurve.csv"
    passed = bool(np.isfinite(metric) and metric < thr)
    rep["pass"] = passed
    return "synthesize", rep, passed


DECOMPOSE_DEFAULTS = {"trace": "1", "singular_vertices": [], "grid": 20, "a": 0.5,
                      "membership": False, "resolution": 6, "R": 16.0}


def cmd_decompose(cfg, out, base):
    try:
        sv = tuple(VERTICES[str(v)] for v in cfg["singular_vertices"])
    except KeyError as e:
        raise UsageError(f"singular vertex {e} not one of {sorted(VERTICES)}") from None
    trace = cz.BoundaryTrace(_field_input(cfg["trace"], base), singular_vertices=sv)
    rep = {"l1": trace.l1, "llogl": trace.llogl, "l1_finite": trace.l1_finite,
           "llogl_finite": trace.llogl_finite}
    if not trace.l1_finite:
        rep["error"] = "trace has infinite L1(dD) norm"
        rep["quantity"] = {"name": "l1", "value": trace.l1}
        rep["pass"] = False
        return "decompose", rep, False
    pieces = cz.decompose(trace)
    z = vf.square_grid(cfg["grid"])
    for p in pieces:
        io.write_field_csv(z, p(z), out / PIECE_FILES[p.label])
    c = np.pi / 2 + 0j
    rep["center_values"] = {p.label: complex(p(c)) for p in pieces}
    rep["center_reconstruction"] = complex(cz.reconstruct(pieces, c))
    far = {}
    for p in pieces:
        fr = cz.far_field_bound(p, cfg["a"])
        far[p.label] = {"C_empirical": fr.C_empirical, "bound": fr.bound, "ratio": fr.C_empirical / fr.bound}
    rep["far_field"] = far
    ok = all(v["ratio"] <= 3.0 for v in far.values())
    if cfg["membership"]:
        mem = {}
        for k in (1, 2):
            m = cz.sector_membership(pieces, k, cfg["resolution"], cfg["R"])
            mem[f"k{k}"] = {"norm": m.norm, "norm_refined": m.norm_refined, "drift": m.drift,
                            "finite": m.finite}
            ok = ok and m.finite and m.drift < MEMBERSHIP_DRIFT
        rep["membership"] = mem
    rep["files"] = {p.label: PIECE_FILES[p.label] for p in pieces}
    rep["pass"] = bool(ok)
    return "decompose", rep, bool(ok)


COUSIN_DEFAULTS = {"phi": "(z - z0)*(z - z1)", "radii": [8.0, 16.0, 32.0], "grid": 20, "cutoff": "exp",
                   "multiplier": "P4", "resolution": 3, "hormander": True, "check_solver": True}
MULTIPLIERS = {"P4": cs.P4, "1+z^2": cs.one_plus_z2}


def cmd_cousin(cfg, out, base):
    phi = _field_input(cfg["phi"], base)
    if cfg["multiplier"] not in MULTIPLIERS:
        raise UsageError(f"multiplier must be one of {sorted(MULTIPLIERS)}")
    try:
        cut = cs.CutoffKind(cfg["cutoff"])
    except ValueError:
        raise UsageError(f"cutoff must be one of {[k.value for k in cs.CutoffKind]}") from None
    if len(cfg["radii"]) < 2:
        raise UsageError("radii needs at least two truncation radii")
    wn = vertex_weighted_norm(phi)
    if not np.isfinite(wn.value):
        rep = {"error": "vertex-weighted norm of phi diverges",
               "quantity": {"name": "vertex_weighted_norm", "value": wn.value,
                            "diverges_at": wn.extra["diverges_at"],
                            "near_vertex_annuli": wn.extra["near_vertex"]},
               "pass": False}
        return "cousin", rep, False
    f1, f2, sr = cs.cousin_split(phi, multiplier=MULTIPLIERS[cfg["multiplier"]], cutoff=cut,
                                 radii=tuple(cfg["radii"]), resolution=cfg["resolution"],
                                 hormander=cfg["hormander"], check_solver=cfg["check_solver"])
    rep = sr.to_dict()
    rep.pop("elapsed")
    rep.pop("schema")
    z = vf.square_grid(cfg["grid"])
    io.write_field_csv(z, f1(z), out / "f1.csv")
    io.write_field_csv(z, f2(z), out / "f2.csv")
    stable = {k: cs.norms_stable(v) for k, v in sr.norms.items()}
    ok = (sr.identity_error < 1e-6 and max(sr.dbar_residuals.values()) < 1e-4 and all(stable.values()))
    rep.update({"norms_stable": stable, "files": {"f1": "f1.csv", "f2": "f2.csv"}, "pass": bool(ok)})
    return "cousin", rep, bool(ok)


def cmd_verify(cfg, out, base, suite):
    if suite not in vf.SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {sorted(vf.SUITES)}")
    rep = vf.run_suite(suite, cfg)
    return f"verify_{suite}", rep, rep["pass"]


COMMANDS = {"simulate": (cmd_simulate, SIMULATE_DEFAULTS), "synthesize": (cmd_synthesize, SYNTH_DEFAULTS),
            "decompose": (cmd_decompose, DECOMPOSE_DEFAULTS), "cousin": (cmd_cousin, COUSIN_DEFAULTS)}


def build_parser():
    ap = argparse.ArgumentParser(prog="heatreach", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--resolution", type=int, help="quadrature resolution (overrides config)")
        p.add_argument("--seed", type=int, help="seed for generated test families (overrides config)")
        return p

    for name in COMMANDS:
        common(sub.add_parser(name))
    v = common(sub.add_parser("verify"))
    v.add_argument("suite", help=f"one of {', '.join(vf.SUITES)}")
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    out = Path(args.out)
    base = Path(args.config).parent if args.config else Path(".")
    overrides = {"resolution": args.resolution, "seed": args.seed}
    t0 = time.time()
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "verify":
            if args.suite not in vf.SUITES:
                raise UsageError(f"unknown suite {args.suite!r}; choose from {sorted(vf.SUITES)}")
            cfg = load_config(args.config, None, overrides)
            name, rep, ok = cmd_verify(cfg, out, base, args.suite)
        else:
            fn, defaults = COMMANDS[args.command]
            cfg = load_config(args.config, defaults, overrides)
            name, rep, ok = fn(cfg, out, base)
    except (UsageError, vf.ConfigError, io.FormatError) as e:
        print(f"heatreach {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    rep = {"command": args.command, "config": cfg, **rep}
    io.write_report(rep, out / f"{name}.json",
                    {"elapsed_seconds": round(time.time() - t0, 3), "argv": argv})
    status = "pass" if ok else "FAIL"
    print(f"heatreach {args.command}: {status} -> {out / (name + '.json')}")
    if not ok and "error" in rep:
        print(f"  {rep['error']}: {rep['quantity']}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
