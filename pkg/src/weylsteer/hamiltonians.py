"""Steering controls, tracking envelopes and Hamiltonian containers.

Controls are the coefficients of ``iH(t) = sum_k u_k(t) G_k`` over the L0
generators ``G = (X1, X2, XX, YY, ZZ, YZ, ZY)`` of a chosen frame.
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .lie import LABELS, generator_matrix

Signal = Union[float, Callable[[float], float]]

QUAD_EPSREL = 1e-12


class SteeringState(NamedTuple):
    """Exponents of ``exp(-a X1 - b X2) exp(-c1 XX - c2 YY - c3 ZZ) exp(-z X1 - x X2)``."""

    alpha: float = 0.0
    beta: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0
    zeta: float = 0.0
    xi: float = 0.0


STATE_FIELDS = SteeringState._fields


class ConstantEnvelope:
    def __init__(self, value=1.0):
        self.value = float(value)

    def __call__(self, t):
        return self.value * np.ones_like(np.asarray(t, dtype=float))[()]

    def area(self, t):
        return self.value * float(t)

    def describe(self):
        return {"kind": "constant", "value": self.value}


class Sin2Envelope:
    """``sin^2(pi t / T)``, one smooth pulse over ``[0, T]``."""

    def __init__(self, period):
        if period <= 0:
            raise ValueError("period must be positive")
        self.period = float(period)

    def __call__(self, t):
        return np.sin(math.pi * np.asarray(t, dtype=float) / self.period) ** 2

    def area(self, t):
        t = float(t)
        w = 2 * math.pi / self.period
        return t / 2 - math.sin(w * t) / (2 * w)

    def describe(self):
        return {"kind": "sin2", "period": self.period}


class SampledEnvelope:
    """Tabulated envelope with monotone cubic interpolation."""

    def __init__(self, times, values):
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or len(times) < 2:
            raise ValueError("envelope table needs matching 1-D time and value arrays")
        if np.any(np.diff(times) <= 0):
            raise ValueError("envelope table times must be strictly increasing")
        self._interp = PchipInterpolator(times, values, extrapolate=False)
        self._anti = self._interp.antiderivative()
        self.t0 = times[0]
        self.times = times
        self.values = values

    def __call__(self, t):
        v = self._interp(t)
        return np.nan_to_num(v, nan=0.0)[()]

    def area(self, t):
        t = min(max(float(t), self.t0), self.times[-1])
        return float(self._anti(t) - self._anti(self.t0))

    def describe(self):
        return {"kind": "table", "t": self.times.tolist(), "gamma": self.values.tolist()}


def envelope_area(gamma, t):
    """``int_0^t gamma`` by adaptive quadrature (relative tolerance 1e-12)."""
    t = float(t)
    if t == 0.0:
        return 0.0
    value, _ = quad(
        lambda s: float(gamma(s)), 0.0, t, epsabs=1e-15, epsrel=QUAD_EPSREL, limit=400
    )
    return value


def _as_callable(sig):
    if callable(sig):
        return sig
    value = float(sig)
    return lambda t: value


@dataclass
class ControlSignals:
    """Seven steering controls (rad/s) over the L0 generators of ``frame``."""

    omega_1x: Signal = 0.0
    omega_2x: Signal = 0.0
    g_xx: Signal = 0.0
    g_yy: Signal = 0.0
    g_zz: Signal = 0.0
    g_yz: Signal = 0.0
    g_zy: Signal = 0.0
    frame: str = "x"

    def signals(self):
        return (self.omega_1x, self.omega_2x, self.g_xx, self.g_yy, self.g_zz,
                self.g_yz, self.g_zy)

    def values(self, t):
        """Control vector at ``t`` in generator order ``X1, X2, XX, YY, ZZ, YZ, ZY``."""
        return np.array([float(_as_callable(s)(t)) for s in self.signals()])

    def hamiltonian(self, t):
        return hamiltonian_from_controls(self.values(t), self.frame)

    def is_zero(self):
        return all(not callable(s) and float(s) == 0.0 for s in self.signals())


def hamiltonian_from_controls(u, frame="x"):
    """Hermitian ``H`` with ``iH = sum_k u_k G_k``."""
    ih = np.zeros((4, 4), dtype=complex)
    for value, label in zip(u, LABELS):
        if value:
            ih += value * generator_matrix(label, frame)
    return -1j * ih


@dataclass
class TrackingHamiltonian:
    """``iH(t) = gamma(t) [w1 X1 + w2 X2 + g1(t) XX + g2 YY + g3 ZZ]``."""

    omega1: float = 0.0
    omega2: float = 0.0
    g1: Signal = 0.0
    g2: float = 0.0
    g3: float = 0.0
    envelope: object = None
    frame: str = "x"

    def __post_init__(self):
        if self.envelope is None:
            self.envelope = ConstantEnvelope(1.0)

    def gamma(self, t):
        return float(self.envelope(t))

    def area(self, t):
        if hasattr(self.envelope, "area"):
            return self.envelope.area(t)
        return envelope_area(self.envelope, t)

    def c1(self, t):
        """``int_0^t gamma(s) g1(s) ds``."""
        if not callable(self.g1):
            return float(self.g1) * self.area(t)
        g1 = self.g1
        value, _ = quad(lambda s: self.gamma(s) * g1(s), 0.0, float(t),
                        epsabs=1e-15, epsrel=QUAD_EPSREL, limit=400)
        return value

    def controls(self):
        gam = self.gamma
        g1 = _as_callable(self.g1)
        w1, w2, g2, g3 = self.omega1, self.omega2, self.g2, self.g3
        return ControlSignals(
            omega_1x=lambda t: gam(t) * w1,
            omega_2x=lambda t: gam(t) * w2,
            g_xx=lambda t: gam(t) * g1(t),
            g_yy=lambda t: gam(t) * g2,
            g_zz=lambda t: gam(t) * g3,
            frame=self.frame,
        )

    def static_hamiltonian(self):
        """``H0`` without the central ``XX`` term: ``iH0 = w1 X1 + w2 X2 + g2 YY + g3 ZZ``."""
        return hamiltonian_from_controls(
            (self.omega1, self.omega2, 0.0, self.g2, self.g3, 0.0, 0.0), self.frame
        )

    def xx_hamiltonian(self):
        """Hermitian generator of the central term, ``i H_xx = XX``."""
        return hamiltonian_from_controls((0, 0, 1.0, 0, 0, 0, 0), self.frame)
