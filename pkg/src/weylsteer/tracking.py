"""Closed-form steering under tracking controls.

For ``iH = gamma(t)[w1 X1 + w2 X2 + g1(t) XX + g2 YY + g3 ZZ]`` the gate keeps
the symmetric Cartan form ``exp(-a X1 - b X2) exp(-c.A) exp(-a X1 - b X2)``.
With ``A(t) = int_0^t gamma``:

    sin((c2 +- c3)/2) = f_pm = (g2 +- g3)/W_pm * sin(W_pm A / 2),
    W_pm = sqrt((g2 +- g3)^2 + (w1 -+ w2)^2),

and ``a``, ``b`` follow by quadrature. Because every rate carries the same
factor ``gamma``, ``a`` and ``b`` depend on time only through ``A``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .cartan import class_vector_from_unitary, local_invariants, CNOT_CLASS, CNOT_INVARIANTS
from .errors import InfeasibleError, TrackingDomainError
from .hamiltonians import ConstantEnvelope, SteeringState, TrackingHamiltonian, envelope_area
from .lie import ClassVector
from .qmat import expm_hermitian
from .solution import DesignSolution

DENOMINATOR_EPS = 1e-6
_UNIT_AMPLITUDE_TOL = 1e-13


def _branch(h, sign):
    gs = h.g2 + sign * h.g3
    ws = h.omega1 - sign * h.omega2
    return gs, math.hypot(gs, ws)


def f_plus_minus(h, area):
    """Return ``(f+, f-)`` at envelope area ``area``."""
    out = []
    for sign in (1, -1):
        gs, w = _branch(h, sign)
        if w == 0.0:
            out.append(0.0)
        else:
            out.append(gs / w * math.sin(w * area / 2))
    return tuple(out)


def _half_angle(h, sign, area):
    # (c2 +- c3)/2 on the continuous branch through the origin
    gs, w = _branch(h, sign)
    if w == 0.0:
        return 0.0
    amp = gs / w
    phase = w * area / 2
    if abs(abs(amp) - 1.0) < _UNIT_AMPLITUDE_TOL:
        # arcsin(+-sin x) folds at x = pi/2; the smooth solution is +-x
        return math.copysign(phase, amp)
    return math.asin(amp * math.sin(phase))


def c23_from_area(h, area):
    hp = _half_angle(h, 1, area)
    hm = _half_angle(h, -1, area)
    return hp + hm, hp - hm


def class_vector_tracking(h, t):
    """Unwrapped class vector ``(c1, c2, c3)`` at time ``t`` (frame labels, not canonical)."""
    c2, c3 = c23_from_area(h, h.area(t))
    return ClassVector(h.c1(t), c2, c3)


def _rates(h, area):
    c2, c3 = c23_from_area(h, area)
    cos2, cos3 = math.cos(c2), math.cos(c3)
    sin2, sin3 = math.sin(c2), math.sin(c3)
    den = (cos2 + cos3) ** 2
    one_c1 = 1.0 + cos2 * cos3
    c2_ = sin2 * sin3
    return (
        (h.omega1 * one_c1 - h.omega2 * c2_) / den,
        (h.omega2 * one_c1 - h.omega1 * c2_) / den,
    )


def _check_denominator(h, t_end, n=513):
    for tau in np.linspace(0.0, t_end, n):
        c2, c3 = c23_from_area(h, h.area(tau))
        if abs(math.cos(c2) + math.cos(c3)) < DENOMINATOR_EPS:
            raise TrackingDomainError(
                f"cos c2 + cos c3 vanishes near t = {tau:.6g}; "
                "the symmetric tracking form has no continuation there",
                tau=float(tau),
            )


def _alpha_beta_areas(h, areas):
    """Cumulative ``(alpha, beta)`` at increasing envelope areas."""
    out = np.zeros((len(areas), 2))
    if h.omega1 == 0.0 and h.omega2 == 0.0:
        return out
    acc = np.zeros(2)
    prev = 0.0
    for i, a in enumerate(areas):
        if a != prev:
            for j in range(2):
                val, _ = quad(lambda s: _rates(h, s)[j], prev, a,
                              epsabs=1e-15, epsrel=1e-12, limit=400)
                acc[j] += val
        out[i] = acc
        prev = a
    return out


def alpha_beta_tracking(h, t):
    """Local rotation angles ``(alpha, beta)`` at time ``t``.

    Raises:
        TrackingDomainError: ``cos c2 + cos c3`` collapses on ``[0, t]``.
    """
    _check_denominator(h, t)
    alpha, beta = _alpha_beta_areas(h, [h.area(t)])[0]
    return float(alpha), float(beta)


def tracking_state(h, t):
    """Full steering state with ``zeta = alpha``, ``xi = beta``."""
    alpha, beta = alpha_beta_tracking(h, t)
    c = class_vector_tracking(h, t)
    return SteeringState(alpha, beta, c.c1, c.c2, c.c3, alpha, beta)


def tracking_states(h, times):
    """States at an increasing time grid, as an ``(n, 7)`` array."""
    times = np.asarray(times, dtype=float)
    if len(times) == 0:
        return np.zeros((0, 7))
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be non-decreasing")
    _check_denominator(h, times[-1])
    areas = [h.area(t) for t in times]
    ab = _alpha_beta_areas(h, areas)
    out = np.zeros((len(times), 7))
    for i, (t, a) in enumerate(zip(times, areas)):
        c2, c3 = c23_from_area(h, a)
        out[i] = (ab[i, 0], ab[i, 1], h.c1(t), c2, c3, ab[i, 0], ab[i, 1])
    return out


def rabi_for_axis_point(g1, g2, g3, c1_target, n, m):
    """Drive amplitudes that land on the axis point ``(c1_target, 0, 0)``.

    Raises:
        InfeasibleError: a radicand is negative for this ``(n, m)``.
    """
    p = (2 * math.pi * n * g1 / c1_target) ** 2 - (g2 - g3) ** 2
    q = (2 * math.pi * m * g1 / c1_target) ** 2 - (g2 + g3) ** 2
    if p < 0:
        raise InfeasibleError(
            f"n={n}: radicand (2 pi n g1/c1)^2 - (g2-g3)^2 = {p:.6g} is negative"
        )
    if q < 0:
        raise InfeasibleError(
            f"m={m}: radicand (2 pi m g1/c1)^2 - (g2+g3)^2 = {q:.6g} is negative"
        )
    sp, sq = math.sqrt(p), math.sqrt(q)
    return 0.5 * (sp + sq), 0.5 * (sp - sq)


DEVICE_KINDS = ("capacitive", "inductive-rf", "dc-detune")


@dataclass(frozen=True)
class DeviceModel:
    """Coupled-qubit device with exchange ``g`` and anisotropy ``k``.

    * ``capacitive``: ``(gamma/2)[w1 sx1 + g(sx sx + sy sy)]``
    * ``inductive-rf``: ``(gamma/2)[w1 sx1 + w2 sx2 + g(sx sx + sy sy + k sz sz)]``
    * ``dc-detune``: ``(gamma/2)[w1 (sz1 - sz2) + g(k sz sz + sx sx + sy sy)]``,
      handled in the ``z`` frame where ``(X1, X2, XX, YY, ZZ)`` denote
      ``(Z1, Z2, ZZ, XX, YY)``.
    """

    kind: str
    g: float = 1.0
    k: float = 0.0

    def __post_init__(self):
        if self.kind not in DEVICE_KINDS:
            raise ValueError(f"unknown device model {self.kind!r}")
        if not self.g > 0:
            raise ValueError("coupling g must be positive")

    @property
    def frame(self):
        return "z" if self.kind == "dc-detune" else "x"

    @property
    def couplings(self):
        """``(g1, g2, g3)`` in the model's frame."""
        g, k = self.g, self.k
        if self.kind == "capacitive":
            return g, g, 0.0
        if self.kind == "inductive-rf":
            return g, g, k * g
        return k * g, g, g

    def hamiltonian(self, omega1, omega2=0.0, envelope=None):
        g1, g2, g3 = self.couplings
        if self.kind == "capacitive" and omega2:
            raise ValueError("the capacitive model carries a single Rabi term")
        if self.kind == "dc-detune":
            omega2 = -omega1
        return TrackingHamiltonian(omega1, omega2, g1, g2, g3,
                                   envelope or ConstantEnvelope(1.0), self.frame)

    def cnot_area(self):
        """Envelope area ``int gamma`` that puts ``c1`` at ``pi/2``."""
        g1 = self.couplings[0]
        if g1 == 0:
            raise InfeasibleError("no XX-axis coupling: c1 never reaches pi/2")
        return math.pi / (2 * abs(g1))


def cnot_condition(model, n, m=None, verify=True):
    """Closed-form CNOT design for a device model.

    For ``dc-detune`` the single integer ``n`` sets ``w1 = g sqrt((2kn)^2 - 1)``;
    for ``capacitive`` ``m`` defaults to ``n`` (one Rabi term); ``inductive-rf``
    takes both integers. ``t_cnot`` assumes ``gamma = 1``.

    Raises:
        InfeasibleError: radicands negative for the chosen integers.
    """
    g1, g2, g3 = model.couplings
    area = model.cnot_area()
    c1 = math.pi / 2
    if model.kind == "dc-detune":
        if m is not None and m != n:
            raise ValueError("dc-detune designs take a single integer n")
        if (2 * model.k * n) ** 2 <= 1:
            raise InfeasibleError(
                f"(2 k n)^2 = {(2 * model.k * n) ** 2:.6g} must exceed 1 for k={model.k}, n={n}"
            )
        w1, w2 = rabi_for_axis_point(g1, g2, g3, c1, 0, n)
        rabi = {"omega1": w1 / model.g}
        m_out = None
    else:
        if m is None:
            m = n
        if model.kind == "capacitive" and m != n:
            raise ValueError("the capacitive model needs n == m (no second Rabi term)")
        w1, w2 = rabi_for_axis_point(g1, g2, g3, c1, n, m)
        rabi = {"omega1": w1 / model.g}
        if model.kind == "inductive-rf":
            rabi["omega2"] = w2 / model.g
        m_out = m
    t_cnot = area * 2 * model.g / math.pi
    sol = DesignSolution(
        model=model.kind, g=model.g, k=model.k, t_cnot=t_cnot, rabi=rabi,
        eta=4.0 / t_cnot, area=area, n=n, m=m_out,
    )
    if verify:
        h = model.hamiltonian(w1, w2 if model.kind == "inductive-rf" else 0.0)
        u = propagate_tracking(h, area)
        cvec = class_vector_from_unitary(u)
        sol.residual = max(
            local_invariants(u).distance(CNOT_INVARIANTS),
            max(abs(a - b) for a, b in zip(cvec, CNOT_CLASS)),
        )
    return sol


def propagate_tracking(h, t):
    """Exact propagator of a tracking Hamiltonian.

    ``XX`` is central in L0, so ``U = exp(-i H0 A(t)) exp(-i H_xx c1(t))``.
    """
    u = expm_hermitian(h.static_hamiltonian(), h.area(t))
    return u @ expm_hermitian(h.xx_hamiltonian(), h.c1(t))


def f_pm_residual(h, t, dt=1e-5):
    """Residual of ``(f')^2 + (gamma W f / 2)^2 - (gamma (g2 +- g3) / 2)^2`` at ``t``."""
    out = []
    gam = h.gamma(t)
    for sign, idx in ((1, 0), (-1, 1)):
        gs, w = _branch(h, sign)
        fp = (f_plus_minus(h, h.area(t + dt))[idx] - f_plus_minus(h, h.area(t - dt))[idx]) / (2 * dt)
        f = f_plus_minus(h, h.area(t))[idx]
        out.append(fp ** 2 + (gam * w * f / 2) ** 2 - (gam * gs / 2) ** 2)
    return tuple(out)


__all__ = [
    "DeviceModel", "alpha_beta_tracking", "class_vector_tracking", "cnot_condition",
    "envelope_area", "f_plus_minus", "propagate_tracking", "rabi_for_axis_point",
    "tracking_state", "tracking_states",
]
