"""CSV and JSON formats for states, controls, complex fields and reports.

Complex values always travel as two real columns ``re``, ``im``.

    state CSV     t, n, re, im          (one row per sine coefficient; several t allowed)
    control CSV   time, u0_re, u0_im, upi_re, upi_im
    field CSV     x, y, re, im          (a complex field sampled at z = x + i y)
    report JSON   {"schema": 1, ...}    (deterministic payload; run metadata goes to a sidecar)

Analytic inputs may also be given as expressions such as ``"(z - z0)*(z - z1)*exp(z)"``.
"""

from __future__ import annotations

import ast
import csv
import json
import math
import time
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from scipy.special import erfc

from .domains import Z0, Z1
from .heat import ControlSignal, SineState
from .transforms import TimeSignal

SCHEMA = 1


class FormatError(ValueError):
    pass


def _rows(path, required):
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        cols = rd.fieldnames or []
        missing = [c for c in required if c not in cols]
        if missing:
            raise FormatError(f"{path}: missing columns {missing}")
        try:
            return [{k: float(r[k]) for k in cols if k} for r in rd]
        except (TypeError, ValueError) as e:
            raise FormatError(f"{path}: non-numeric entry ({e})") from None


def write_states_csv(states: Sequence[SineState], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "n", "re", "im"])
        for st in states:
            for n, c in enumerate(st.coeffs, start=1):
                w.writerow([repr(float(st.t)), n, repr(float(c.real)), repr(float(c.imag))])


def read_states_csv(path) -> list:
    rows = _rows(path, ["n", "re"])
    by_t = {}
    for r in rows:
        by_t.setdefault(r.get("t", 0.0), []).append(r)
    out = []
    for t in sorted(by_t):
        rr = by_t[t]
        N = int(max(r["n"] for r in rr))
        a = np.zeros(N, dtype=complex)
        for r in rr:
            n = int(r["n"])
            if n < 1 or n != r["n"]:
                raise FormatError(f"{path}: mode index must be a positive integer")
            a[n - 1] = r["re"] + 1j * r.get("im", 0.0)
        out.append(SineState(a, t))
    return out


def write_control_csv(u: ControlSignal, path, n: int = 1001) -> None:
    t = np.linspace(0.0, u.tau, n)
    a, b = u.u0(t), u.upi(t)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "u0_re", "u0_im", "upi_re", "upi_im"])
        for ti, ai, bi in zip(t, a, b):
            w.writerow([repr(float(ti)), repr(float(ai.real)), repr(float(ai.imag)),
                        repr(float(bi.real)), repr(float(bi.imag))])


def read_control_csv(path, tau: float | None = None) -> ControlSignal:
    """Piecewise-linear controls from samples; the horizon is the last time.

    Accepts the two-column-per-value layout or plain real ``u0``/``upi``.
    """
    rows = _rows(path, ["time"])
    if not rows:
        raise FormatError(f"{path}: no rows")
    t = np.array([r["time"] for r in rows])
    if np.any(np.diff(t) <= 0) or t[0] != 0:
        raise FormatError(f"{path}: times must start at 0 and increase")

    def col(name):
        if f"{name}_re" in rows[0]:
            return np.array([r[f"{name}_re"] + 1j * r.get(f"{name}_im", 0.0) for r in rows])
        if name in rows[0]:
            return np.array([r[name] + 0j for r in rows])
        raise FormatError(f"{path}: missing column {name}")

    T = float(t[-1])
    if tau is not None and not math.isclose(T, tau, rel_tol=1e-9):
        raise FormatError(f"{path}: control horizon {T:g} does not match tau = {tau:g}")
    sig = []
    for name in ("u0", "upi"):
        v = col(name)
        fn = lambda s, _v=v: np.interp(np.real(s), t, _v.real) + 1j * np.interp(np.real(s), t, _v.imag)
        sig.append(TimeSignal.on_interval(fn, T, analytic=False))
    return ControlSignal(sig[0], sig[1], T)


def write_field_csv(z, values, path) -> None:
    z = np.asarray(z, dtype=complex).ravel()
    v = np.asarray(values, dtype=complex).ravel()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "re", "im"])
        for zi, vi in zip(z, v):
            w.writerow([repr(float(zi.real)), repr(float(zi.imag)), repr(float(vi.real)), repr(float(vi.imag))])


def read_field_csv(path) -> tuple:
    rows = _rows(path, ["x", "y", "re", "im"])
    z = np.array([r["x"] + 1j * r["y"] for r in rows])
    v = np.array([r["re"] + 1j * r["im"] for r in rows])
    return z, v


def field_interpolant(path) -> Callable:
    """Nearest-sample evaluator for a field CSV (used for traces given as samples)."""
    z, v = read_field_csv(path)

    def fn(p):
        p = np.asarray(p, dtype=complex)
        i = np.argmin(np.abs(p.ravel()[:, None] - z[None, :]), axis=1)
        return v[i].reshape(p.shape)

    return fn


EXPR_NAMES = {
    "pi": np.pi, "e": np.e, "i": 1j, "j": 1j, "z0": Z0, "z1": Z1,
    "exp": np.exp, "log": np.log, "sqrt": np.sqrt, "sin": np.sin, "cos": np.cos,
    "tan": np.tan, "sinh": np.sinh, "cosh": np.cosh, "abs": np.abs, "erfc": erfc,
    "real": np.real, "imag": np.imag, "conj": np.conj,
}
_EXPR_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
               ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)


def compile_expression(text: str, var: str = "z") -> Callable:
    """Vectorized callable for an arithmetic expression in one variable.

    Only numbers, the variable, +-*/**, and the functions and constants in
    EXPR_NAMES are accepted.
    """
    try:
        tree = ast.parse(str(text), mode="eval")
    except SyntaxError as e:
        raise FormatError(f"cannot parse expression {text!r}: {e.msg}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _EXPR_NODES):
            raise FormatError(f"expression {text!r}: {type(node).__name__} not allowed")
        if isinstance(node, ast.Name) and node.id != var and node.id not in EXPR_NAMES:
            raise FormatError(f"expression {text!r}: unknown name {node.id!r}")
        if isinstance(node, ast.Call) and not isinstance(node.func, ast.Name):
            raise FormatError(f"expression {text!r}: only plain function calls allowed")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float, complex)):
            raise FormatError(f"expression {text!r}: non-numeric constant")
    code = compile(tree, "<expr>", "eval")

    def fn(x):
        x = np.asarray(x, dtype=complex)
        with np.errstate(all="ignore"):
            v = eval(code, {"__builtins__": {}}, {**EXPR_NAMES, var: x})
        return np.broadcast_to(np.asarray(v, dtype=complex), x.shape).copy()

    fn.__doc__ = f"{var} -> {text}"
    return fn


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def write_report(report: dict, path, meta: dict | None = None) -> None:
    """Deterministic JSON report plus a ``.meta.json`` sidecar with timing."""
    payload = {"schema": SCHEMA, **_clean(report)}
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    side = {"schema": SCHEMA, "written_at": time.strftime("%Y-%m-%dT%H:%M:%S"), **_clean(meta or {})}
    Path(str(path).removesuffix(".json") + ".meta.json").write_text(json.dumps(side, sort_keys=True, indent=2) + "\n")


def read_report(path) -> dict:
    d = json.loads(Path(path).read_text())
    if d.get("schema") != SCHEMA:
        raise FormatError(f"{path}: unsupported schema {d.get('schema')!r}")
    return d
