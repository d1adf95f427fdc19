"""Acceptance criteria; each test records one PASS/FAIL line in the summary."""

import math
import time

import numpy as np
from scipy.linalg import expm

from weylsteer import design, golden, steer, tracking
from weylsteer.cartan import (CNOT, CNOT_INVARIANTS, assemble_cnot, class_vector_from_unitary,
                              local_invariants)
from weylsteer.hamiltonians import ControlSignals, Sin2Envelope
from weylsteer.lie import LABELS, all_pairs, commutator, element_matrix, generator_matrix
from weylsteer.qmat import PAULI, expm_hermitian, fidelity, random_hermitian, random_local

CNOT_POINT = (math.pi / 2, 0.0, 0.0)
EQ5 = np.array([[1, 0, 0, -1j], [0, 1, -1j, 0], [0, -1j, 1, 0], [-1j, 0, 0, 1]]) / math.sqrt(2)


def _k(a, b):
    return np.kron(PAULI[a], PAULI[b])


def _table1():
    out = []
    for k, n, _, _ in golden.TABLE_1:
        out.append(tracking.cnot_condition(tracking.DeviceModel("dc-detune", 1.0, k), n))
    return out


def _design_table(which):
    variant = "SymDcMinus" if which == 2 else "AsymDcMinus"
    ks = [r[0] for r in golden.TABLES[which]]
    return design.continuation_scan(design.DesignModel(variant), ks)


def test_criterion_01_table_one(report):
    t0 = time.perf_counter()
    sols = _table1()
    dt = time.perf_counter() - t0
    err = max(abs(s.rabi["omega1"] - row[2]) for s, row in zip(sols, golden.TABLE_1))
    t_err = max(abs(s.t_cnot - row[3]) for s, row in zip(sols, golden.TABLE_1))
    ok = len(sols) == 17 and err < 5e-5 and t_err < 1e-12 and dt < 1.0
    report(1, ok, f"17 rows, max |dOmega1| = {err:.1e}, {dt:.2f} s")
    assert ok


def test_criterion_02_inductive_rf_values(report):
    t0 = time.perf_counter()
    sol = tracking.cnot_condition(tracking.DeviceModel("inductive-rf", 1.0, 0.1), 1, 1)
    dt = time.perf_counter() - t0
    e1 = abs(sol.rabi["omega1"] - 3.8716)
    e2 = abs(sol.rabi["omega2"] - 0.0258)
    ok = e1 < 5e-5 and e2 < 5e-5 and dt < 1.0
    report(2, ok, f"Omega1 = {sol.rabi['omega1']:.6f}, Omega2 = {sol.rabi['omega2']:.6f}, {dt:.2f} s")
    assert ok


def _check_design_table(which, report):
    t0 = time.perf_counter()
    sols = _design_table(which)
    dt = time.perf_counter() - t0
    worst = [0.0, 0.0]
    missing = 0
    for sol, row in zip(sols, golden.TABLES[which]):
        if sol is None:
            missing += 1
            continue
        got = (sol.t_cnot, *sol.rabi.values())
        worst[0] = max(worst[0], max(abs(a - b) for a, b in zip(got, row[1:4])))
        worst[1] = max(worst[1], abs(sol.eta - row[4]))
    ok = missing == 0 and len(sols) == 17 and worst[0] < 1e-4 and worst[1] < 1e-3 and dt < 60
    report(which + 1, ok, f"17 rows, max |d(t, Omega)| = {worst[0]:.1e}, max |d eta| = {worst[1]:.1e}, {dt:.2f} s")
    return ok


def test_criterion_03_table_two(report):
    assert _check_design_table(2, report)


def test_criterion_04_table_three(report):
    assert _check_design_table(3, report)


def test_criterion_05_cnot_landing(report):
    worst_inv = worst_cls = 0.0
    count = 0
    for sol, (k, n, _, _) in zip(_table1(), golden.TABLE_1):
        mdl = tracking.DeviceModel("dc-detune", 1.0, k)
        h = mdl.hamiltonian(sol.rabi["omega1"])
        u = steer.direct_propagate(h, sol.t_seconds)
        worst_inv = max(worst_inv, local_invariants(u).distance(CNOT_INVARIANTS))
        worst_cls = max(worst_cls, max(abs(a - b) for a, b in zip(class_vector_from_unitary(u), CNOT_POINT)))
        count += 1
    mdl = tracking.DeviceModel("inductive-rf", 1.0, 0.1)
    sol = tracking.cnot_condition(mdl, 1, 1)
    u = steer.direct_propagate(mdl.hamiltonian(sol.rabi["omega1"], sol.rabi["omega2"]), sol.t_seconds)
    worst_inv = max(worst_inv, local_invariants(u).distance(CNOT_INVARIANTS))
    worst_cls = max(worst_cls, max(abs(a - b) for a, b in zip(class_vector_from_unitary(u), CNOT_POINT)))
    count += 1
    for which in (2, 3):
        for sol in _design_table(which):
            mdl = design.DesignModel(sol.model, sol.g, sol.k)
            u = expm_hermitian(design.build_design_hamiltonian(mdl, tuple(sol.rabi.values())), sol.t_seconds)
            worst_inv = max(worst_inv, local_invariants(u).distance(CNOT_INVARIANTS))
            worst_cls = max(worst_cls, max(abs(a - b) for a, b in zip(class_vector_from_unitary(u), CNOT_POINT)))
            count += 1
    ok = worst_inv < 1e-6 and worst_cls < 1e-6
    report(5, ok, f"{count} gates, max invariant error {worst_inv:.1e}, max class error {worst_cls:.1e}")
    assert ok


def test_criterion_06_triple_agreement(report):
    t0 = time.perf_counter()
    worst_state = 0.0
    worst_fid = 1.0
    for kind, k, n in (("capacitive", 0.0, 1), ("inductive-rf", 0.1, 1), ("dc-detune", 0.1, 6)):
        mdl = tracking.DeviceModel(kind, 1.0, k)
        sol = tracking.cnot_condition(mdl, n, verify=False)
        area = mdl.cnot_area()
        for env, t_cnot in ((None, area), (Sin2Envelope(2 * area), 2 * area)):
            h = mdl.hamiltonian(sol.rabi["omega1"], sol.rabi.get("omega2", 0.0), env)
            traj = steer.integrate(h, steer.AnsatzKind.TRACKING, t_cnot, 200, check=False)
            ref = tracking.tracking_states(h, traj.times)
            worst_state = max(worst_state, float(np.abs(traj.states - ref).max()))
            for s, t in zip(traj.states, traj.times):
                worst_fid = min(worst_fid, fidelity(steer.cartan_form(s, h.frame), steer.direct_propagate(h, t)))
    dt = time.perf_counter() - t0
    ok = worst_state < 1e-8 and worst_fid >= 1 - 1e-8 and dt < 30
    report(6, ok, f"6 runs x 200 samples, max state error {worst_state:.1e}, "
                  f"min fidelity 1 - {1 - worst_fid:.1e}, {dt:.2f} s")
    assert ok


def test_criterion_07_commutator_table(report):
    worst = 0.0
    for a, b in all_pairs():
        ga, gb = generator_matrix(a), generator_matrix(b)
        worst = max(worst, float(np.abs(ga @ gb - gb @ ga - element_matrix(commutator(a, b))).max()))
    n = len(list(all_pairs()))
    ok = n == 49 and worst < 1e-14
    report(7, ok, f"{n} pairs, max error {worst:.1e}")
    assert ok


def test_criterion_08_det_identity(report, rng):
    worst_det = worst_fwd = 0.0
    skipped = 0
    for _ in range(1000):
        s = rng.uniform(-math.pi, math.pi, 7)
        u = rng.normal(size=7)
        ref = math.cos(s[3]) ** 2 - math.cos(s[4]) ** 2
        worst_det = max(worst_det, abs(np.linalg.det(steer.steering_matrix(s)) - ref),
                        abs(steer.trig_intermediates(s).detM - ref))
        if abs(ref) < steer.DEGENERACY_EPS:
            skipped += 1
            continue
        worst_fwd = max(worst_fwd, float(np.abs(steer.steering_matrix(s) @ steer.rhs_full(s, u) - u).max()))
    ok = worst_det < 1e-13 and worst_fwd < 1e-10
    report(8, ok, f"1000 states ({skipped} singular skipped), max det error {worst_det:.1e}, "
                  f"max forward error {worst_fwd:.1e}")
    assert ok


def test_criterion_09_cnot_anchor(report):
    g = 1.0
    u = expm(-1j * (math.pi / (2 * g)) * g * _k("x", "x") / 2)
    e5 = float(np.abs(u - EQ5).max())
    e6 = max(abs(a - b) for a, b in zip(class_vector_from_unitary(u), CNOT_POINT))
    k1 = expm(-1j * math.pi / 4 * _k("y", "i")) @ expm(1j * math.pi / 4 * (_k("x", "i") - _k("i", "x")))
    k2 = expm(1j * math.pi / 4 * _k("y", "i"))
    e7 = float(np.abs(np.exp(1j * math.pi / 4) * k1 @ u @ k2 - CNOT).max())
    e7b = float(np.abs(assemble_cnot(u) - CNOT).max())
    ok = e5 < 1e-12 and e6 < 1e-10 and e7 < 1e-10 and e7b < 1e-10
    report(9, ok, f"matrix {e5:.1e}, class {e6:.1e}, assembly {max(e7, e7b):.1e}")
    assert ok


def test_criterion_10_local_invariance(report, rng):
    worst_inv = worst_cls = 0.0
    for _ in range(1000):
        u = expm_hermitian(random_hermitian(rng, 2.0))
        v = random_local(rng) @ u @ random_local(rng)
        worst_inv = max(worst_inv, local_invariants(u).distance(local_invariants(v)))
        worst_cls = max(worst_cls, max(abs(a - b) for a, b in zip(class_vector_from_unitary(u),
                                                                  class_vector_from_unitary(v))))
    ok = worst_inv < 1e-10 and worst_cls < 1e-8
    report(10, ok, f"1000 trials, max invariant change {worst_inv:.1e}, max class change {worst_cls:.1e}")
    assert ok


def _smooth(rng, lo, hi):
    a, b, w, p = rng.uniform(lo, hi), rng.uniform(-0.3, 0.3), rng.uniform(0.5, 3), rng.uniform(0, 6)
    return lambda t: a + b * math.sin(w * t + p)


def test_criterion_11_case_systems(report, rng):
    t0 = time.perf_counter()
    kinds = steer.AnsatzKind
    worst = 0.0
    runs = 0
    for _ in range(3):
        o1, o2, gx = _smooth(rng, -1, 1), _smooth(rng, -1, 1), _smooth(rng, -1, 1)
        g2, g3 = _smooth(rng, 0.4, 1), _smooth(rng, 0.4, 1)
        cases = (
            (kinds.CASE1, ControlSignals(o1, 0.0, gx, g2)),
            (kinds.CASE2, ControlSignals(o1, lambda t, f=o1: -f(t), gx, g2, g3, frame="z")),
            (kinds.CASE3, ControlSignals(o1, o2, gx, g2, g2)),
        )
        for kind, ctrl in cases:
            traj = steer.integrate(ctrl, kind, 1.0, 200)
            worst = max(worst, 1 - traj.worst()[1])
            for i in (20, 80, 140, 199):
                u = steer.direct_propagate(ctrl, traj.times[i], n_slices=1000, method="midpoint")
                worst = max(worst, 1 - fidelity(steer.cartan_form(traj.states[i], ctrl.frame), u))
            runs += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-7 and dt < 60
    report(11, ok, f"{runs} runs (cases 1-3), min fidelity 1 - {worst:.1e}, {dt:.2f} s")
    assert ok
