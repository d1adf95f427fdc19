"""Numerical steering in the Cartan form.

The gate is written as

    U(t) = exp(-a X1 - b X2) exp(-c1 XX - c2 YY - c3 ZZ) exp(-z X1 - x X2)

and the seven exponents are integrated from ``U(0) = 1``. Differentiating the
product and matching generator coefficients gives ``M(state) d(state)/dt = u``
with ``det M = cos^2 c2 - cos^2 c3``. The reduced ansatz systems keep some
exponents tied together (e.g. ``zeta = alpha``) and have their own, weaker,
singular sets.

Every system is singular at the all-zero initial state, so integration starts
from a short seed step: the analytic tracking solution when the Hamiltonian
has tracking form, otherwise a least-squares fit of the ansatz to the directly
propagated gate, started from the first-order (symmetric-split) expansion.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import least_squares

from . import tracking
from .errors import ReconstructionError, SingularStateError
from .hamiltonians import ControlSignals, SteeringState, TrackingHamiltonian
from .lie import pauli_axes
from .qmat import IDENTITY, PAULI, expm_hermitian, fidelity, recon_tol

DEGENERACY_EPS = 1e-9
RTOL = 1e-10
ATOL = 1e-12
SEED_FRACTION = 1e-4
MAX_RESEEDS = 50


class TrigIntermediates(NamedTuple):
    A1: float
    A2: float
    A3: float
    A4: float
    C1: float
    C2: float
    C3: float
    C4: float
    C22: float
    C33: float
    detM: float


def trig_intermediates(state):
    a, b, _, c2, c3 = state[:5]
    ca, sa, cb, sb = math.cos(a), math.sin(a), math.cos(b), math.sin(b)
    cc2, sc2, cc3, sc3 = math.cos(c2), math.sin(c2), math.cos(c3), math.sin(c3)
    # cos^2 c2 - cos^2 c3 written as a product so it keeps relative accuracy near 0
    det = math.sin(c3 - c2) * math.sin(c3 + c2)
    return TrigIntermediates(
        ca * cb, sa * sb, ca * sb, sa * cb,
        cc2 * cc3, sc2 * sc3, cc2 * sc3, sc2 * cc3,
        cc2 * sc2, cc3 * sc3, det,
    )


def steering_matrix(state):
    """``M`` acting on ``d/dt (alpha, beta, c1, c2, c3, zeta, xi)``.

    Rows are the control components in generator order
    ``(X1, X2, XX, YY, ZZ, YZ, ZY)``.
    """
    T = trig_intermediates(state)
    A1, A2, A3, A4, C1, C2, C3, C4 = T[:8]
    # columns: alpha, beta, c1, c2, c3, zeta, xi
    return np.array([
        [1, 0, 0, 0, 0, C1, C2],
        [0, 1, 0, 0, 0, C2, C1],
        [0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, A1, A2, -A3 * C3 + A4 * C4, A3 * C4 - A4 * C3],
        [0, 0, 0, A2, A1, A4 * C3 - A3 * C4, -A4 * C4 + A3 * C3],
        [0, 0, 0, A3, -A4, A1 * C3 + A2 * C4, -A1 * C4 - A2 * C3],
        [0, 0, 0, A4, -A3, -A2 * C3 - A1 * C4, A2 * C4 + A1 * C3],
    ], dtype=float)


def _singular(what, value, t):
    where = "" if t is None else f" at t = {t:.9g}"
    return SingularStateError(f"{what} = {value:.3e} below {DEGENERACY_EPS:g}{where}", t=t, det=value)


def rhs_full(state, u, t=None):
    """Derivative of all seven exponents (explicit inverse of ``M``)."""
    O1, O2, gxx, gyy, gzz, gyz, gzy = u
    T = trig_intermediates(state)
    A1, A2, A3, A4, C1, C2, C3, C4, C22, C33, D = T
    if abs(D) < DEGENERACY_EPS:
        raise _singular("det M", D, t)
    da = O1 + (gyy * (A3 * C33 + A4 * C22) - gzz * (A3 * C22 + A4 * C33)
               - gyz * (A1 * C33 - A2 * C22) - gzy * (A1 * C22 - A2 * C33)) / D
    db = O2 + (gyy * (A3 * C22 + A4 * C33) - gzz * (A3 * C33 + A4 * C22)
               - gyz * (A1 * C22 - A2 * C33) - gzy * (A1 * C33 - A2 * C22)) / D
    dc2 = gyy * A1 + gzz * A2 + gyz * A3 + gzy * A4
    dc3 = gyy * A2 + gzz * A1 - gyz * A4 - gzy * A3
    dz = (-gyy * (A3 * C3 + A4 * C4) + gzz * (A3 * C4 + A4 * C3)
          + gyz * (A1 * C3 - A2 * C4) + gzy * (A1 * C4 - A2 * C3)) / D
    dx = (-gyy * (A3 * C4 + A4 * C3) + gzz * (A3 * C3 + A4 * C4)
          + gyz * (A1 * C4 - A2 * C3) + gzy * (A1 * C3 - A2 * C4)) / D
    return np.array([da, db, gxx, dc2, dc3, dz, dx])


def rhs_tracking(state, u, t=None):
    """Symmetric ansatz ``zeta = alpha``, ``xi = beta`` for tracking controls."""
    O1, O2, gxx, gyy, gzz = u[:5]
    a, b, _, c2, c3 = state[:5]
    den = (math.cos(c2) + math.cos(c3)) ** 2
    if den < DEGENERACY_EPS:
        raise _singular("(cos c2 + cos c3)^2", den, t)
    one_c1 = 1.0 + math.cos(c2) * math.cos(c3)
    c2s = math.sin(c2) * math.sin(c3)
    da = (O1 * one_c1 - O2 * c2s) / den
    db = (O2 * one_c1 - O1 * c2s) / den
    A1 = math.cos(a) * math.cos(b)
    A2 = math.sin(a) * math.sin(b)
    return np.array([da, db, gxx, gyy * A1 + gzz * A2, gyy * A2 + gzz * A1, da, db])


def rhs_case1(state, u, t=None):
    """``c3 = beta = xi = 0``; controls ``w1 X1 + g1 XX + g2 YY``."""
    O1, _, gxx, g2 = u[:4]
    a, c2 = state[0], state[3]
    s2 = math.sin(c2)
    if abs(s2) < DEGENERACY_EPS:
        raise _singular("sin c2", s2, t)
    sa = math.sin(a)
    return np.array([
        O1 - g2 * sa * math.cos(c2) / s2, 0.0, gxx, g2 * math.cos(a), 0.0, g2 * sa / s2, 0.0,
    ])


def rhs_case2(state, u, t=None):
    """``beta = -alpha``, ``xi = -zeta``; controls ``w1 (X1 - X2) + g1 XX + g2 YY + g3 ZZ``.

    The alpha rate carries ``(cos c3 sin c3 - sin c2 cos c2)/(cos^2 c2 - cos^2 c3)``,
    which equals ``cot(c2 + c3)``; the removable zero at ``c2 = c3`` is cancelled.
    """
    O1, _, gxx, g2, g3 = u[:5]
    a, c2, c3 = state[0], state[3], state[4]
    s = math.sin(c2 + c3)
    if abs(s) < DEGENERACY_EPS:
        raise _singular("sin(c2 + c3)", s, t)
    ca, sa = math.cos(a), math.sin(a)
    da = O1 - (g2 + g3) * ca * sa * math.cos(c2 + c3) / s
    dz = (g2 + g3) * ca * sa / s
    return np.array([
        da, -da, gxx, g2 * ca * ca - g3 * sa * sa, g3 * ca * ca - g2 * sa * sa, dz, -dz,
    ])


def rhs_case3(state, u, t=None):
    """``c3 = c2``, ``xi = 0``; controls ``w1 X1 + w2 X2 + g1 XX + g2 (YY + ZZ)``."""
    O1, O2, gxx, g2 = u[:4]
    a, b, _, c2 = state[:4]
    cc, sc = math.cos(c2), math.sin(c2)
    det = cc * sc
    if abs(det) < DEGENERACY_EPS:
        raise _singular("det M1 = cos c2 sin c2", det, t)
    A1 = math.cos(a) * math.cos(b)
    A2 = math.sin(a) * math.sin(b)
    d34 = math.cos(a) * math.sin(b) - math.sin(a) * math.cos(b)
    dc2 = g2 * (A1 + A2)
    return np.array([
        O1 + g2 * d34 * cc / sc, O2 + g2 * d34 * sc / cc, gxx, dc2, dc2, -g2 * d34 / det, 0.0,
    ])


class AnsatzKind(enum.Enum):
    FULL = "full"
    TRACKING = "tracking"
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"

    @property
    def rhs(self):
        return _RHS[self]

    @property
    def free(self):
        """Indices of independent exponents."""
        return _FREE[self]

    def expand(self, p):
        """Full state from the independent exponents."""
        s = np.zeros(7)
        s[list(self.free)] = p
        return self.project(s)

    def project(self, s):
        s = np.array(s, dtype=float)
        if self is AnsatzKind.TRACKING:
            s[5], s[6] = s[0], s[1]
        elif self is AnsatzKind.CASE1:
            s[1] = s[4] = s[6] = 0.0
        elif self is AnsatzKind.CASE2:
            s[1], s[6] = -s[0], -s[5]
        elif self is AnsatzKind.CASE3:
            s[4], s[6] = s[3], 0.0
        return s

    def check_controls(self, u, tol=1e-12):
        """Raise ``ValueError`` when a control vector is outside this ansatz's family."""
        O1, O2, gxx, gyy, gzz, gyz, gzy = u
        bad = None
        if self is AnsatzKind.TRACKING and (abs(gyz) > tol or abs(gzy) > tol):
            bad = "tracking form has no YZ/ZY controls"
        elif self is AnsatzKind.CASE1 and max(abs(O2), abs(gzz), abs(gyz), abs(gzy)) > tol:
            bad = "case 1 allows only X1, XX and YY controls"
        elif self is AnsatzKind.CASE2 and (abs(O1 + O2) > tol or abs(gyz) > tol or abs(gzy) > tol):
            bad = "case 2 needs w2 = -w1 and no YZ/ZY controls"
        elif self is AnsatzKind.CASE3 and (abs(gyy - gzz) > tol or abs(gyz) > tol or abs(gzy) > tol):
            bad = "case 3 needs equal YY and ZZ controls and no YZ/ZY controls"
        if bad:
            raise ValueError(bad)


_RHS = {
    AnsatzKind.FULL: rhs_full,
    AnsatzKind.TRACKING: rhs_tracking,
    AnsatzKind.CASE1: rhs_case1,
    AnsatzKind.CASE2: rhs_case2,
    AnsatzKind.CASE3: rhs_case3,
}

_FREE = {
    AnsatzKind.FULL: (0, 1, 2, 3, 4, 5, 6),
    AnsatzKind.TRACKING: (0, 1, 2, 3, 4),
    AnsatzKind.CASE1: (0, 2, 3, 5),
    AnsatzKind.CASE2: (0, 2, 3, 4, 5),
    AnsatzKind.CASE3: (0, 1, 2, 3, 5),
}


def _local_pair(a, b, frame):
    # exp(-a X1 - b X2): the two local generators commute
    p1 = np.kron(*_paulis("X1", frame))
    p2 = np.kron(*_paulis("X2", frame))
    f1 = math.cos(a / 2) * IDENTITY - 1j * math.sin(a / 2) * p1
    f2 = math.cos(b / 2) * IDENTITY - 1j * math.sin(b / 2) * p2
    return f1 @ f2


def _paulis(label, frame):
    a1, a2 = pauli_axes(label, frame)
    return PAULI[a1], PAULI[a2]


def _central_triple(c1, c2, c3, frame):
    out = IDENTITY
    for label, c in (("XX", c1), ("YY", c2), ("ZZ", c3)):
        p = np.kron(*_paulis(label, frame))
        out = out @ (math.cos(c / 2) * IDENTITY - 1j * math.sin(c / 2) * p)
    return out


def cartan_form(state, frame="x"):
    """Assemble ``k1 U_ent k2`` from the seven exponents."""
    a, b, c1, c2, c3, z, x = (float(v) for v in state)
    return _local_pair(a, b, frame) @ _central_triple(c1, c2, c3, frame) @ _local_pair(z, x, frame)


def cartan_factors(state, frame="x"):
    """``(k1, U_ent, k2)`` for a steering state."""
    a, b, c1, c2, c3, z, x = (float(v) for v in state)
    return _local_pair(a, b, frame), _central_triple(c1, c2, c3, frame), _local_pair(z, x, frame)


# --- propagation -----------------------------------------------------------

def _as_controls(h):
    if isinstance(h, TrackingHamiltonian):
        return h.controls()
    if isinstance(h, ControlSignals):
        return h
    raise TypeError(f"expected ControlSignals or TrackingHamiltonian, got {type(h).__name__}")


def _is_constant(ctrl):
    return all(not callable(s) for s in ctrl.signals())


_GAUSS = math.sqrt(3) / 6


def _slice_step(ctrl, t0, dt, method):
    if method == "midpoint":
        return expm_hermitian(ctrl.hamiltonian(t0 + dt / 2), dt)
    if method == "magnus4":
        h1 = ctrl.hamiltonian(t0 + (0.5 - _GAUSS) * dt)
        h2 = ctrl.hamiltonian(t0 + (0.5 + _GAUSS) * dt)
        # Omega = -i dt (H1+H2)/2 + (sqrt3 dt^2/12) [-iH2, -iH1]
        comm = -(h2 @ h1 - h1 @ h2)
        omega = -0.5j * dt * (h1 + h2) + (math.sqrt(3) * dt * dt / 12) * comm
        return expm_hermitian(1j * omega, 1.0)
    raise ValueError(f"unknown propagation method {method!r}")


def _auto_slices(ctrl, t0, t1, h_max=0.01):
    span = t1 - t0
    if span <= 0:
        return 1
    probe = [ctrl.values(t) for t in np.linspace(t0, t1, 9)]
    scale = 1.0 + max(float(np.abs(v).sum()) for v in probe)
    return max(1, int(math.ceil(span * scale / h_max)))


def propagate_interval(h, u0, t0, t1, n_slices=None, method="magnus4"):
    """Advance ``u0`` from ``t0`` to ``t1`` under ``h``."""
    if t1 == t0:
        return np.array(u0, dtype=complex)
    if isinstance(h, TrackingHamiltonian):
        step = tracking.propagate_tracking(h, t1) @ tracking.propagate_tracking(h, t0).conj().T
        return step @ u0
    ctrl = _as_controls(h)
    if _is_constant(ctrl):
        return expm_hermitian(ctrl.hamiltonian(t0), t1 - t0) @ u0
    if n_slices is None:
        n_slices = _auto_slices(ctrl, t0, t1)
    dt = (t1 - t0) / n_slices
    u = np.array(u0, dtype=complex)
    for j in range(n_slices):
        u = _slice_step(ctrl, t0 + j * dt, dt, method) @ u
    return u


def direct_propagate(h, t, n_slices=None, method="magnus4"):
    """Solve ``dU/dt = -iH(t) U``, ``U(0) = 1`` up to time ``t``.

    Tracking Hamiltonians and constant controls are exponentiated exactly;
    general controls use ``n_slices`` time-ordered slices (``midpoint`` for a
    piecewise-constant product, ``magnus4`` for two-point Gauss Magnus).
    """
    return propagate_interval(h, IDENTITY, 0.0, float(t), n_slices, method)


def propagate_grid(h, times, method="magnus4"):
    times = np.asarray(times, dtype=float)
    out = []
    u = IDENTITY.copy()
    prev = 0.0
    for t in times:
        u = propagate_interval(h, u, prev, t, method=method)
        out.append(u)
        prev = t
    return out


# --- integration -----------------------------------------------------------

@dataclass
class Trajectory:
    """Sampled steering exponents with their reconstruction fidelity."""

    times: np.ndarray
    states: np.ndarray
    recon_fidelity: np.ndarray
    frame: str = "x"
    ansatz: AnsatzKind = AnsatzKind.FULL
    reseeds: int = 0

    def state(self, i):
        return SteeringState(*self.states[i])

    @property
    def final(self):
        return self.state(-1)

    def worst(self):
        i = int(np.argmin(self.recon_fidelity))
        return float(self.times[i]), float(self.recon_fidelity[i])


def first_order_state(ctrl, t, ansatz):
    """Symmetric-split first-order guess from the integrated controls."""
    ts = np.linspace(0.0, t, 17)
    vals = np.array([ctrl.values(s) for s in ts])
    w = np.full(len(ts), 1.0)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    ints = (t / (3 * (len(ts) - 1))) * (w @ vals)
    O1, O2, gxx, gyy, gzz = ints[:5]
    s = np.array([O1 / 2, O2 / 2, gxx, gyy, gzz, O1 / 2, O2 / 2])
    if ansatz is AnsatzKind.CASE3:
        s[0], s[1], s[5], s[4] = (O1 + O2) / 2, O2, (O1 - O2) / 2, gyy
    return ansatz.project(s)


def fit_state(target, ansatz, guess, frame="x"):
    """Least-squares ansatz exponents reproducing ``target``."""
    free = list(ansatz.free)

    def resid(p):
        d = cartan_form(ansatz.expand(p), frame) - target
        return np.concatenate([d.real.ravel(), d.imag.ravel()])

    p0 = np.asarray(guess, dtype=float)[free]
    res = least_squares(resid, p0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
    return ansatz.expand(res.x)


def _seed(h, ctrl, ansatz, t_seed):
    if isinstance(h, TrackingHamiltonian):
        return ansatz.project(np.array(tracking.tracking_state(h, t_seed)))
    target = direct_propagate(h, t_seed)
    return fit_state(target, ansatz, first_order_state(ctrl, t_seed, ansatz), ctrl.frame)


def integrate(h, ansatz=AnsatzKind.FULL, t_end=1.0, n_samples=200, *,
              seed_fraction=SEED_FRACTION, check=True, rtol=RTOL, atol=ATOL):
    """Integrate the steering exponents on ``n_samples`` equally spaced times.

    Each sample is checked against direct propagation; the run is rejected
    when the worst fidelity drops below ``1 - recon_tol()``.

    Raises:
        ReconstructionError: some sample fails the reconstruction check.
        SingularStateError: singular crossings could not be stepped over.
        ValueError: the Hamiltonian does not belong to the ansatz family.
    """
    if not isinstance(ansatz, AnsatzKind):
        ansatz = AnsatzKind(ansatz)
    ctrl = _as_controls(h)
    frame = ctrl.frame
    times = np.linspace(0.0, float(t_end), int(n_samples))
    for t in np.linspace(0.0, t_end, 7):
        ansatz.check_controls(ctrl.values(t), tol=1e-9)
    states = np.zeros((len(times), 7))

    if ctrl.is_zero() or t_end == 0.0:
        fid = np.ones(len(times))
        return Trajectory(times, states, fid, frame, ansatz)

    rhs = ansatz.rhs

    def fun(t, y):
        return ansatz.project(rhs(y, ctrl.values(t), t))

    filled = np.zeros(len(times), dtype=bool)
    filled[0] = True
    reseeds = 0
    if ansatz is AnsatzKind.TRACKING:
        t_cur, y_cur = 0.0, np.zeros(7)
    else:
        t_cur = seed_fraction * t_end
        y_cur = _seed(h, ctrl, ansatz, t_cur)
        _fill_window(h, ansatz, frame, times, states, filled, 0.0, np.zeros(7), t_cur, y_cur)

    while t_cur < t_end:
        solver = DOP853(fun, t_cur, y_cur, t_end, rtol=rtol, atol=atol)
        try:
            while solver.status == "running":
                t_prev = solver.t
                solver.step()
                if solver.status == "failed":
                    raise SingularStateError(solver.message or "step failed", t=solver.t)
                dense = solver.dense_output()
                sel = (~filled) & (times > t_prev) & (times <= solver.t)
                for i in np.nonzero(sel)[0]:
                    states[i] = ansatz.project(dense(times[i]))
                    filled[i] = True
            t_cur = t_end
        except SingularStateError as exc:
            reseeds += 1
            if reseeds > MAX_RESEEDS:
                raise SingularStateError(
                    f"too many singular crossings; last near t = {solver.t:.9g}", t=solver.t
                ) from exc
            t0, y0 = solver.t, np.array(solver.y)
            t1 = min(t0 + seed_fraction * t_end, t_end)
            target = direct_propagate(h, t1)
            y1 = fit_state(target, ansatz, y0, frame)
            _fill_window(h, ansatz, frame, times, states, filled, t0, y0, t1, y1)
            t_cur, y_cur = t1, y1
            if t_cur >= t_end:
                break

    if not filled.all():
        missing = times[~filled]
        raise SingularStateError(f"samples not reached: t = {missing[:3]}", t=float(missing[0]))

    us = propagate_grid(h, times)
    fid = np.array([fidelity(cartan_form(s, frame), u) for s, u in zip(states, us)])
    traj = Trajectory(times, states, fid, frame, ansatz, reseeds)
    if check:
        t_bad, f_bad = traj.worst()
        if f_bad < 1.0 - recon_tol():
            raise ReconstructionError(
                f"reconstruction fidelity {f_bad:.12f} at t = {t_bad:.9g} "
                f"below 1 - {recon_tol():g}", t=t_bad, fidelity=f_bad,
            )
    return traj


def _fill_window(h, ansatz, frame, times, states, filled, t0, y0, t1, y1):
    # samples inside a seeded window are fitted to the propagated gate directly
    sel = (~filled) & (times > t0) & (times <= t1)
    for i in np.nonzero(sel)[0]:
        t = times[i]
        if t == t1:
            states[i] = y1
        else:
            w = (t - t0) / (t1 - t0)
            guess = (1 - w) * np.asarray(y0) + w * np.asarray(y1)
            states[i] = fit_state(direct_propagate(h, t), ansatz, guess, frame)
        filled[i] = True
