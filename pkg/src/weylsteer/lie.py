"""The seven-generator algebra L0 and the Weyl chamber.

Generators are ``(i/2)`` times a Pauli product, e.g. ``XX = (i/2) sx (x) sx``.
A *frame* relabels the Pauli axes cyclically so that the same algebra can be
built on ``(Y1, Y2)`` or ``(Z1, Z2)`` local terms; in frame ``"z"`` the labels
``(X1, X2, XX, YY, ZZ)`` stand for the operators ``(Z1, Z2, ZZ, XX, YY)``.
"""

import itertools
import math
from typing import NamedTuple

import numpy as np

from .qmat import PAULI

LABELS = ("X1", "X2", "XX", "YY", "ZZ", "YZ", "ZY")

# label -> (axis on qubit 1, axis on qubit 2); "i" is the identity
_AXES = {
    "X1": ("x", "i"),
    "X2": ("i", "x"),
    "XX": ("x", "x"),
    "YY": ("y", "y"),
    "ZZ": ("z", "z"),
    "YZ": ("y", "z"),
    "ZY": ("z", "y"),
}

# cyclic axis maps; each is a proper rotation so commutators are preserved
FRAMES = {
    "x": {"x": "x", "y": "y", "z": "z", "i": "i"},
    "y": {"x": "y", "y": "z", "z": "x", "i": "i"},
    "z": {"x": "z", "y": "x", "z": "y", "i": "i"},
}

# [row, column] commutators; entries are (sign, label) or None for zero
_TABLE_ROWS = {
    "X1": [None, None, None, (-1, "ZY"), (1, "YZ"), (-1, "ZZ"), (1, "YY")],
    "X2": [None, None, None, (-1, "YZ"), (1, "ZY"), (1, "YY"), (-1, "ZZ")],
    "XX": [None] * 7,
    "YY": [(1, "ZY"), (1, "YZ"), None, None, None, (-1, "X2"), (-1, "X1")],
    "ZZ": [(-1, "YZ"), (-1, "ZY"), None, None, None, (1, "X1"), (1, "X2")],
    "YZ": [(1, "ZZ"), (-1, "YY"), None, (1, "X2"), (-1, "X1"), None, None],
    "ZY": [(-1, "YY"), (1, "ZZ"), None, (1, "X1"), (-1, "X2"), None, None],
}

CHAMBER_TOL = 1e-10


class ClassVector(NamedTuple):
    """Local-class coordinates ``(c1, c2, c3)`` in radians."""

    c1: float
    c2: float
    c3: float

    def in_pi_over_2(self):
        return ClassVector(*(2.0 * c / math.pi for c in self))


def _check_label(label):
    if label not in _AXES:
        raise ValueError(f"unknown generator label {label!r}")


def _check_frame(frame):
    if frame not in FRAMES:
        raise ValueError(f"unknown frame {frame!r}; expected one of {sorted(FRAMES)}")


def pauli_axes(label, frame="x"):
    """Physical Pauli axes ``(qubit 1, qubit 2)`` behind a label in a frame."""
    _check_label(label)
    _check_frame(frame)
    amap = FRAMES[frame]
    a1, a2 = _AXES[label]
    return amap[a1], amap[a2]


def generator_matrix(label, frame="x"):
    """The anti-Hermitian 4x4 matrix of an L0 generator."""
    a1, a2 = pauli_axes(label, frame)
    return 0.5j * np.kron(PAULI[a1], PAULI[a2])


def commutator(a, b):
    """Table commutator ``[a, b]`` as a dict ``{label: coefficient}``.

    The zero element is the empty dict.
    """
    _check_label(a)
    _check_label(b)
    entry = _TABLE_ROWS[a][LABELS.index(b)]
    if entry is None:
        return {}
    sign, label = entry
    return {label: float(sign)}


def element_matrix(coeffs, frame="x"):
    """Matrix of ``sum_k coeffs[k] * generator_k``."""
    out = np.zeros((4, 4), dtype=complex)
    for label, value in coeffs.items():
        out += value * generator_matrix(label, frame)
    return out


def decompose_element(matrix, frame="x"):
    """Coefficients of a matrix along the L0 generators, plus the residual norm.

    Generators are orthogonal under the trace form with norm ``tr(G^dagger G) = 1``.
    """
    matrix = np.asarray(matrix)
    coeffs = {}
    for label in LABELS:
        g = generator_matrix(label, frame)
        coeffs[label] = float(np.real(np.trace(g.conj().T @ matrix)))
    residual = float(np.max(np.abs(matrix - element_matrix(coeffs, frame))))
    return coeffs, residual


def _snap(x, tol):
    x = math.fmod(x, math.pi)
    if x < 0:
        x += math.pi
    if x < tol or math.pi - x < tol:
        return 0.0
    return x


def chamber_violation(c):
    """Largest violation of the chamber conditions; 0 inside the chamber."""
    c1, c2, c3 = c
    v = max(0.0, c2 - c1, c3 - c2, -c3, c1 + c2 - math.pi, c1 - math.pi)
    if c3 <= CHAMBER_TOL:
        v = max(v, c1 - math.pi / 2)
    return v


def in_weyl_chamber(c, tol=CHAMBER_TOL):
    return chamber_violation(c) <= tol and c[0] < math.pi - tol


_EVEN_SIGNS = ((1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1))


def weyl_orbit(c, tol=CHAMBER_TOL):
    """Sorted representatives of ``c`` under pair sign flips and pi shifts.

    Coordinates are reduced modulo pi; permutations are absorbed by sorting.
    """
    out = []
    for signs in _EVEN_SIGNS:
        v = sorted((_snap(s * x, tol) for s, x in zip(signs, c)), reverse=True)
        out.append(ClassVector(*v))
    return out


def canonicalize_weyl(c, tol=CHAMBER_TOL):
    """Map a class vector to its representative in the canonical Weyl chamber.

    The canonical chamber is ``pi > c1 >= c2 >= c3 >= 0``, ``c1 + c2 <= pi``,
    and ``c1 <= pi/2`` whenever ``c3 == 0``. Ties on the chamber boundary go
    to the lexicographically smallest member.
    """
    c = tuple(float(x) for x in c)
    if not all(math.isfinite(x) for x in c):
        raise ValueError(f"class vector must be finite, got {c}")
    orbit = weyl_orbit(c, tol)
    scored = [(chamber_violation(v), v) for v in orbit]
    best = min(s for s, _ in scored)
    admissible = [v for s, v in scored if s <= max(best, tol)]
    return min(admissible, key=lambda v: tuple(round(x, 12) for x in v))


def all_pairs():
    return itertools.product(LABELS, LABELS)
