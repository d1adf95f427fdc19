"""Local-equivalence analysis of two-qubit gates.

Invariants follow the magic-basis construction: with ``UB = B^dagger U B`` and
``m = UB^T UB``,

    g1 = tr(m)^2 / (16 det U),    g2 = (tr(m)^2 - tr(m^2)) / (4 det U).

Class vectors use the convention
``U_ent = exp(-(i/2)(c1 sx sx + c2 sy sy + c3 sz sz))``.
"""

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotCnotClassError
from .lie import ClassVector, canonicalize_weyl
from .qmat import IDENTITY, PAULI, pauli_on_qubit, pauli_product

CNOT_CLASS = ClassVector(math.pi / 2, 0.0, 0.0)
CNOT_CLASS_TOL = 1e-6
CLUSTER_TOL = 1e-9

_S2 = 1.0 / math.sqrt(2.0)
# columns: (|00>+|11>), -i(|00>-|11>), -i(|01>+|10>), (|01>-|10>), all / sqrt 2
MAGIC = _S2 * np.array(
    [
        [1, -1j, 0, 0],
        [0, 0, -1j, 1],
        [0, 0, -1j, -1],
        [1, 1j, 0, 0],
    ],
    dtype=complex,
)
MAGIC.flags.writeable = False

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CNOT.flags.writeable = False


class LocalInvariants(NamedTuple):
    g1: complex
    g2: float

    def distance(self, other):
        return max(abs(self.g1 - other.g1), abs(self.g2 - other.g2))


CNOT_INVARIANTS = LocalInvariants(0j, 1.0)


@dataclass(frozen=True)
class CartanFactorization:
    """``U = exp(i phase) k1 u_ent k2`` with local ``k1``, ``k2``."""

    phase: float
    k1: np.ndarray
    u_ent: np.ndarray
    k2: np.ndarray
    c: ClassVector

    def product(self):
        return cmath.exp(1j * self.phase) * self.k1 @ self.u_ent @ self.k2


def _pauli_exp(p, angle):
    # exp(-i angle p / 2) for an involutory Pauli product p
    return math.cos(angle / 2) * IDENTITY - 1j * math.sin(angle / 2) * p


def entangler_from_class(c):
    """Build ``exp(-(i/2)(c1 XX + c2 YY + c3 ZZ))`` as three commuting factors."""
    c1, c2, c3 = (float(x) for x in c)
    return (
        _pauli_exp(pauli_product("x", "x"), c1)
        @ _pauli_exp(pauli_product("y", "y"), c2)
        @ _pauli_exp(pauli_product("z", "z"), c3)
    )


def magic_m(u):
    """The symmetric matrix ``m = UB^T UB`` in the magic basis."""
    ub = MAGIC.conj().T @ np.asarray(u, dtype=complex) @ MAGIC
    return ub.T @ ub


def local_invariants(u):
    u = np.asarray(u, dtype=complex)
    m = magic_m(u)
    det_u = np.linalg.det(u)
    tr = np.trace(m)
    tr2 = tr * tr
    g1 = complex(tr2 / (16 * det_u))
    g2 = complex((tr2 - np.trace(m @ m)) / (4 * det_u))
    return LocalInvariants(g1, float(g2.real))


def _spectral_phases(c):
    c1, c2, c3 = c
    return np.array([c1 - c2 + c3, -c1 + c2 + c3, c1 + c2 - c3, -c1 - c2 - c3])


def invariants_from_class(c):
    """Closed-form invariants of ``entangler_from_class(c)``.

    In the magic basis the entangler is diagonal, so ``m`` has eigenvalues
    ``exp(-i lambda_j)`` with ``lambda = (c1-c2+c3, -c1+c2+c3, c1+c2-c3, -c1-c2-c3)``.
    """
    z = np.exp(-1j * _spectral_phases(tuple(float(x) for x in c)))
    tr = z.sum()
    g1 = complex(tr * tr / 16)
    g2 = complex((tr * tr - (z * z).sum()) / 4)
    return LocalInvariants(g1, float(g2.real))


def _cluster_phases(phases, tol=CLUSTER_TOL):
    """Average eigenphases that coincide within ``tol`` on the circle."""
    phases = np.array(phases, dtype=float)
    n = len(phases)
    done = [False] * n
    for i in range(n):
        if done[i]:
            continue
        group = [i]
        for j in range(i + 1, n):
            if not done[j]:
                d = (phases[j] - phases[i] + math.pi) % (2 * math.pi) - math.pi
                if abs(d) <= tol:
                    group.append(j)
        if len(group) > 1:
            ref = phases[i]
            offs = [(phases[j] - ref + math.pi) % (2 * math.pi) - math.pi for j in group]
            mean = ref + sum(offs) / len(offs)
            for j in group:
                phases[j] = mean
                done[j] = True
        done[i] = True
    return phases


def class_vector_from_unitary(u):
    """Canonical Weyl-chamber class vector of a two-qubit unitary.

    The eigenphases of ``m`` give the spectral phases ``lambda_j`` up to order
    and 2 pi; each assignment yields a candidate through half-sums of pairs.
    Candidates are canonicalized and the one whose invariants best match ``u``
    is returned.
    """
    u = np.asarray(u, dtype=complex)
    det_u = np.linalg.det(u)
    u0 = u / det_u ** 0.25
    m = magic_m(u0)
    lam = -np.angle(np.linalg.eigvals(m))
    lam = _cluster_phases(lam)
    target = local_invariants(u0)
    best = None
    seen = set()
    for perm in itertools.permutations(range(4)):
        l1, l2, l3, _ = (lam[p] for p in perm)
        cand = canonicalize_weyl(((l1 + l3) / 2, (l2 + l3) / 2, (l1 + l2) / 2))
        key = tuple(round(x, 11) for x in cand)
        if key in seen:
            continue
        seen.add(key)
        r = invariants_from_class(cand).distance(target)
        if best is None or r < best[0]:
            best = (r, cand)
    return best[1]


def cnot_class_residual(u):
    """Max-abs distance of the invariants of ``u`` from those of CNOT, ``(0, 1)``."""
    return local_invariants(u).distance(CNOT_INVARIANTS)


def is_cnot_class(u, tol=CNOT_CLASS_TOL):
    return cnot_class_residual(u) <= tol


def canonical_cnot():
    return CNOT.copy()


def _k1():
    a = _pauli_exp(pauli_on_qubit("y", 1), math.pi / 2)  # exp(-i pi/4 sy1)
    # sx1 and sx2 commute, so exp(i pi/4 (sx1 - sx2)) factorizes
    b = _pauli_exp(pauli_on_qubit("x", 1), -math.pi / 2) @ _pauli_exp(
        pauli_on_qubit("x", 2), math.pi / 2
    )
    return a @ b


def _k2():
    return _pauli_exp(pauli_on_qubit("y", 1), -math.pi / 2)  # exp(i pi/4 sy1)


def assemble_cnot(u, k1=None, k2=None):
    """Flank a CNOT-class gate with fixed local rotations to get the canonical CNOT.

    ``u`` must equal ``k1 @ U_ent @ k2`` where ``U_ent`` is the straight-line
    CNOT-class gate generated by ``sx sx``; pass the local factors when they
    are not identities.

    Raises:
        NotCnotClassError: ``u`` is not in the CNOT class, or its entangling
            factor is not the ``sx sx`` representative.
    """
    u = np.asarray(u, dtype=complex)
    residual = cnot_class_residual(u)
    if residual > CNOT_CLASS_TOL:
        c = class_vector_from_unitary(u)
        raise NotCnotClassError(
            f"gate is not in the CNOT class: invariant residual {residual:.3e}, "
            f"class vector {tuple(round(2 * x / math.pi, 9) for x in c)} x pi/2"
        )
    core = u
    if k1 is not None:
        core = np.asarray(k1).conj().T @ core
    if k2 is not None:
        core = core @ np.asarray(k2).conj().T
    out = cmath.exp(1j * math.pi / 4) * _k1() @ core @ _k2()
    # remove any leftover global phase from the local factors
    phase = np.trace(CNOT.conj().T @ out) / 4
    if abs(abs(phase) - 1) > 1e-8:
        raise NotCnotClassError(
            "entangling factor is not exp(-(i pi/4) sx sx); supply its local factors"
        )
    return out / (phase / abs(phase))


def local_factor(a, b):
    """``a (x) b`` for 2x2 single-qubit gates."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def single_qubit_rotation(axis, angle):
    """``exp(-i angle sigma^axis / 2)`` on one qubit."""
    return math.cos(angle / 2) * PAULI["i"] - 1j * math.sin(angle / 2) * PAULI[axis]
