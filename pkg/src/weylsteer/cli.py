"""Command-line front end: ``weylsteer {decompose,steer,solve,table}``."""

import argparse
import csv
import json
import math
import re
import sys

import numpy as np

from . import design, golden, steer, tracking
from .cartan import class_vector_from_unitary, cnot_class_residual, local_invariants, CNOT_CLASS_TOL
from .errors import (ConvergenceError, InfeasibleError, ReconstructionError, SingularStateError,
                     TrackingDomainError)
from .hamiltonians import ConstantEnvelope, ControlSignals, SampledEnvelope, Sin2Envelope
from .qmat import deviation_from_unitary, expm_hermitian, fidelity

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4
EXIT_GOLDEN = 5

MATRIX_UNITARY_TOL = 1e-8
HALF_PI = math.pi / 2
CSV_COLUMNS = ("t", "c1", "c2", "c3", "alpha", "beta", "zeta", "xi", "recon_fidelity")

DESIGN_MODELS = {
    "sym-dc": "SymDcMinus",
    "sym-dc-plus": "SymDcPlus",
    "asym-dc": "AsymDcMinus",
    "asym-dc-plus": "AsymDcPlus",
}


class ParseError(ValueError):
    pass


# --- matrix files ----------------------------------------------------------

_TOKEN = re.compile(r"\([^)]*\)|\S+")


def parse_entry(tok):
    tok = tok.strip()
    if tok.startswith("("):
        if not tok.endswith(")"):
            raise ValueError(tok)
        parts = tok[1:-1].split(",")
        if len(parts) != 2:
            raise ValueError(tok)
        return complex(float(parts[0]), float(parts[1]))
    return complex(tok.replace("i", "j").replace("I", "j"))


def parse_matrix(text):
    """4x4 complex matrix from text; blank lines and ``#`` comments are skipped."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = _TOKEN.findall(line)
        if len(toks) != 4:
            raise ParseError(f"line {lineno}: expected 4 entries, found {len(toks)}")
        try:
            rows.append([parse_entry(t) for t in toks])
        except ValueError:
            raise ParseError(f"line {lineno}: cannot parse entry in {line!r}") from None
        if len(rows) > 4:
            raise ParseError(f"line {lineno}: more than 4 rows")
    if len(rows) != 4:
        raise ParseError(f"expected 4 rows, found {len(rows)}")
    return np.array(rows, dtype=complex)


def format_entry(z):
    return f"({z.real:.17g},{z.imag:.17g})"


def format_matrix(u):
    return "\n".join(" ".join(format_entry(complex(z)) for z in row) for row in u) + "\n"


# --- run specs -------------------------------------------------------------

def _envelope(spec, default_period):
    kind = spec.get("kind", "constant")
    if kind == "constant":
        return ConstantEnvelope(spec.get("value", 1.0))
    if kind == "sin2":
        return Sin2Envelope(spec.get("period", default_period))
    if kind == "table":
        return SampledEnvelope(spec["t"], spec["gamma"])
    raise ParseError(f"unknown gamma kind {kind!r}")


def _scale_envelope(env, ctrl):
    # controls multiplied by the envelope
    def wrap(s):
        if callable(s):
            return lambda t: float(env(t)) * s(t)
        value = float(s)
        return lambda t: float(env(t)) * value
    return ControlSignals(*(wrap(s) for s in ctrl.signals()), frame=ctrl.frame)


def build_run(spec):
    """Resolve a run spec to ``(kind, hamiltonian, t_end, n_samples, units)``.

    ``kind`` is ``"tracking"``, ``"controls"`` or ``"design"``.
    """
    try:
        model = spec["model"]
        mkind = model["kind"]
        grid = spec.get("grid", {})
        units = spec.get("units", "radians")
        n_samples = int(grid.get("n_samples", 200))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"run spec missing field: {exc}") from None
    if units not in ("radians", "pi-over-2"):
        raise ParseError(f"units must be 'radians' or 'pi-over-2', got {units!r}")
    if n_samples < 2:
        raise ParseError("grid.n_samples must be at least 2")
    gamma = spec.get("gamma", {"kind": "constant"})

    if mkind in tracking.DEVICE_KINDS:
        dev = tracking.DeviceModel(mkind, float(model.get("g", 1.0)), float(model.get("k", 0.0)))
        omega1 = model.get("omega1")
        omega2 = float(model.get("omega2", 0.0))
        if omega1 is None:
            sol = tracking.cnot_condition(dev, int(model.get("n", 1)), model.get("m"), verify=False)
            omega1 = sol.rabi["omega1"]
            omega2 = sol.rabi.get("omega2", 0.0)
        # amplitudes are given in units of g
        omega1 = float(omega1) * dev.g
        omega2 = float(omega2) * dev.g
        area = dev.cnot_area()
        env = _envelope(gamma, 2 * area)
        h = dev.hamiltonian(omega1, omega2, env)
        t_end = grid.get("t_end")
        if t_end is None:
            t_end = 2 * area if isinstance(env, Sin2Envelope) else area / env.area(1.0)
        return "tracking", h, float(t_end), n_samples, units

    if mkind == "controls":
        u = model.get("u", [0.0] * 7)
        if len(u) != 7:
            raise ParseError("model.u must list 7 controls (X1, X2, XX, YY, ZZ, YZ, ZY)")
        t_end = float(grid.get("t_end", 1.0))
        ctrl = ControlSignals(*(float(x) for x in u), frame=model.get("frame", "x"))
        if gamma.get("kind", "constant") != "constant" or gamma.get("value", 1.0) != 1.0:
            ctrl = _scale_envelope(_envelope(gamma, t_end), ctrl)
        return "controls", ctrl, t_end, n_samples, units

    if mkind in DESIGN_MODELS:
        dm = design.DesignModel(DESIGN_MODELS[mkind], float(model.get("g", 1.0)), float(model.get("k", 0.0)))
        params = (float(model["omega2"]), float(model.get("omega3", model.get("omega4", 0.0))))
        t_end = float(grid.get("t_end", 1.0))
        return "design", (dm, params), t_end, n_samples, units

    raise ParseError(f"unknown model kind {mkind!r}")


def run_trajectory(spec):
    """Rows ``(t, c1, c2, c3, alpha, beta, zeta, xi, recon_fidelity)`` in radians."""
    kind, h, t_end, n, _ = build_run(spec)
    times = np.linspace(0.0, t_end, n)
    if kind == "tracking":
        states = tracking.tracking_states(h, times)
        fid = np.array([
            fidelity(steer.cartan_form(s, h.frame), tracking.propagate_tracking(h, t))
            for s, t in zip(states, times)
        ])
    elif kind == "controls":
        ansatz = steer.AnsatzKind(spec.get("ansatz", "full"))
        traj = steer.integrate(h, ansatz, t_end, n)
        states, fid = traj.states, traj.recon_fidelity
    else:
        dm, params = h
        ham = design.build_design_hamiltonian(dm, params)
        states = np.full((n, 7), np.nan)
        for i, t in enumerate(times):
            states[i, 2:5] = class_vector_from_unitary(expm_hermitian(ham, t))
        fid = np.full(n, np.nan)
    # state order is (alpha, beta, c1, c2, c3, zeta, xi)
    cols = np.column_stack([times, states[:, 2:5], states[:, 0:2], states[:, 5:7], fid])
    return cols


def write_csv(rows, out, units="radians"):
    scale = 1.0 if units == "radians" else 1.0 / HALF_PI
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        vals = [r[0]] + [v * scale for v in r[1:8]] + [r[8]]
        w.writerow([f"{v:.12g}" for v in vals])


# --- commands --------------------------------------------------------------

def _class_text(c):
    return "(" + ", ".join(f"{x / HALF_PI:.10g}" for x in c) + ") x pi/2"


def cmd_decompose(args, out):
    with open(args.file) as fh:
        u = parse_matrix(fh.read())
    dev = deviation_from_unitary(u)
    if dev > MATRIX_UNITARY_TOL:
        raise ParseError(f"matrix is not unitary: ||U^dag U - 1|| = {dev:.3e}")
    c = class_vector_from_unitary(u)
    inv = local_invariants(u)
    res = cnot_class_residual(u)
    if res < CNOT_CLASS_TOL:
        verdict = "CNOT-class"
    elif max(abs(x) for x in c) < CNOT_CLASS_TOL:
        verdict = "identity-class"
    else:
        verdict = "other"
    print(f"class: {_class_text(c)}", file=out)
    print(f"class_radians: {c[0]:.17g} {c[1]:.17g} {c[2]:.17g}", file=out)
    print(f"g1: {inv.g1.real + 0.0:.12g}{inv.g1.imag + 0.0:+.12g}i", file=out)
    print(f"g2: {inv.g2:.12g}", file=out)
    print(f"cnot_residual: {res:.3e}", file=out)
    print(f"verdict: {verdict}", file=out)
    return EXIT_OK


def cmd_steer(args, out):
    with open(args.runspec) as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"run spec: line {exc.lineno}: {exc.msg}") from None
    units = spec.get("units", "radians")
    rows = run_trajectory(spec)
    if args.out and args.out != "-":
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh, units)
    else:
        write_csv(rows, out, units)
    return EXIT_OK


def _design_seed(path):
    with open(path) as fh:
        try:
            s = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"seed file: line {exc.lineno}: {exc.msg}") from None
    try:
        return (float(s["t_cnot"]), float(s["omega2"]), float(s.get("omega3", s.get("omega4"))))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"seed file needs t_cnot, omega2 and omega3/omega4: {exc}") from None


def solve_model(name, g=1.0, k=0.0, n=None, m=None, seed=None):
    if name in tracking.DEVICE_KINDS:
        if n is None:
            raise ParseError(f"--n is required for model {name}")
        return tracking.cnot_condition(tracking.DeviceModel(name, g, k), n, m)
    if name in DESIGN_MODELS:
        dm = design.DesignModel(DESIGN_MODELS[name], g, k)
        if seed is not None:
            return design.solve_design(dm, seed)
        sols = design.continuation_scan(dm, [0.0, k] if k != 0 else [0.0])
        if sols[-1] is None:
            raise ConvergenceError(f"{dm.variant}: continuation to k={k:g} failed")
        return sols[-1]
    raise ParseError(f"unknown model {name!r}")


def cmd_solve(args, out):
    seed = _design_seed(args.seed_file) if args.seed_file else None
    sol = solve_model(args.model, args.g, args.k, args.n, args.m, seed)
    print(f"model: {sol.model}", file=out)
    print(f"k: {sol.k:g}", file=out)
    if sol.n is not None:
        print(f"n: {sol.n}", file=out)
    if sol.m is not None:
        print(f"m: {sol.m}", file=out)
    print(f"t_cnot: {sol.t_cnot:.6f} pi/2g", file=out)
    print(f"t_cnot_seconds: {sol.t_seconds:.9g}", file=out)
    for name, value in sol.rabi.items():
        print(f"{name}/g: {value:.6f}", file=out)
    print(f"eta: {sol.eta:.4f}", file=out)
    print(f"class_residual: {sol.residual:.3e}", file=out)
    print(f"constraints_ok: {str(sol.constraints_ok).lower()}", file=out)
    for note in sol.notes:
        if not note.startswith(("newton", "square")):
            print(f"note: {note}", file=out)
    return EXIT_OK


def table_rows(which):
    """Regenerate a table as a list of tuples in its golden column order."""
    rows = []
    if which == 1:
        for k, n, _, _ in golden.TABLE_1:
            sol = tracking.cnot_condition(tracking.DeviceModel("dc-detune", 1.0, k), n)
            rows.append((k, n, sol.rabi["omega1"], sol.t_cnot))
        return rows
    variant = "SymDcMinus" if which == 2 else "AsymDcMinus"
    ks = [r[0] for r in golden.TABLES[which]]
    for k, sol in zip(ks, design.continuation_scan(design.DesignModel(variant), ks)):
        if sol is None:
            rows.append((k, math.nan, math.nan, math.nan, math.nan))
        else:
            vals = list(sol.rabi.values())
            rows.append((k, sol.t_cnot, vals[0], vals[1], sol.eta))
    return rows


def table_diff(which, rows, tol=golden.GOLDEN_TOL):
    """Cells differing from the golden table by more than ``tol``."""
    bad = []
    cols = golden.COLUMNS[which]
    for i, (got, ref) in enumerate(zip(rows, golden.TABLES[which])):
        for name, a, b in zip(cols, got, ref):
            if not abs(a - b) <= tol:
                bad.append((i, name, a, b))
    return bad


def cmd_table(args, out):
    which = int(args.which)
    rows = table_rows(which)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(golden.COLUMNS[which])
    for r in rows:
        if which == 1:
            w.writerow([r[0], r[1], f"{r[2]:.6f}", f"{r[3]:.6f}"])
        else:
            w.writerow([r[0]] + [f"{v:.6f}" for v in r[1:4]] + [f"{r[4]:.4f}"])
    if args.diff:
        bad = table_diff(which, rows)
        for i, name, a, b in bad:
            print(f"row {i + 1} {name}: got {a:.6f}, expected {b:.6f}", file=sys.stderr)
        if bad:
            return EXIT_GOLDEN
        print(f"table {which}: all rows within {golden.GOLDEN_TOL:g}", file=sys.stderr)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="weylsteer", description="Two-qubit CNOT steering tools.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="class vector and invariants of a 4x4 unitary")
    d.add_argument("file")
    d.set_defaults(func=cmd_decompose)

    s = sub.add_parser("steer", help="steering trajectory as CSV")
    s.add_argument("runspec")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_steer)

    v = sub.add_parser("solve", help="CNOT condition for a device or design model")
    v.add_argument("--model", required=True, choices=list(tracking.DEVICE_KINDS) + list(DESIGN_MODELS))
    v.add_argument("--g", type=float, default=1.0)
    v.add_argument("--k", type=float, default=0.0)
    v.add_argument("--n", type=int)
    v.add_argument("--m", type=int)
    v.add_argument("--seed-file")
    v.set_defaults(func=cmd_solve)

    t = sub.add_parser("table", help="regenerate a design table as CSV")
    t.add_argument("which", choices=["1", "2", "3"])
    t.add_argument("--diff", action="store_true", help="compare with the golden values")
    t.set_defaults(func=cmd_table)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SingularStateError, TrackingDomainError, ReconstructionError, ConvergenceError) as exc:
        where = getattr(exc, "t", None) or getattr(exc, "tau", None)
        suffix = f" (t = {where:.9g})" if where is not None else ""
        print(f"numerical failure: {exc}{suffix}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
