"""Dense 4x4 complex linear algebra for two-qubit gates."""

import os

import numpy as np

UNITARITY_TOL = 1e-12
HERMITICITY_TOL = 1e-12
RECON_TOL = 1e-8

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
for _m in PAULI.values():
    _m.flags.writeable = False

IDENTITY = np.eye(4, dtype=complex)
IDENTITY.flags.writeable = False


def recon_tol():
    """Reconstruction tolerance, overridable through ``WEYLSTEER_TOL``."""
    value = os.environ.get("WEYLSTEER_TOL")
    return float(value) if value else RECON_TOL


def pauli_on_qubit(axis, qubit):
    """Return ``sigma^axis`` acting on qubit 1 or 2 of the pair (no i/2 factor)."""
    if axis not in ("x", "y", "z"):
        raise ValueError(f"unknown Pauli axis {axis!r}")
    if qubit == 1:
        return np.kron(PAULI[axis], PAULI["i"])
    if qubit == 2:
        return np.kron(PAULI["i"], PAULI[axis])
    raise ValueError(f"qubit must be 1 or 2, got {qubit!r}")


def pauli_product(axis1, axis2):
    """``sigma_1^axis1 sigma_2^axis2``."""
    return np.kron(PAULI[axis1], PAULI[axis2])


def deviation_from_unitary(u):
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - IDENTITY)))


def is_unitary(u, tol=UNITARITY_TOL):
    u = np.asarray(u)
    if u.shape != (4, 4):
        return False
    return deviation_from_unitary(u) <= tol and abs(abs(np.linalg.det(u)) - 1) <= tol


def is_hermitian(h, tol=HERMITICITY_TOL):
    h = np.asarray(h)
    return h.shape == (4, 4) and float(np.max(np.abs(h - h.conj().T))) <= tol


def expm_hermitian(h, t=1.0):
    """Return ``exp(-i h t)`` for a Hermitian 4x4 ``h``.

    The exponential goes through the eigendecomposition of ``h``, so the
    result is unitary to rounding for any ``t``.

    Raises:
        ValueError: ``h`` is not Hermitian within ``HERMITICITY_TOL``.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ValueError("generator is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def expm_antihermitian(a):
    """``exp(a)`` for anti-Hermitian ``a``; same route as :func:`expm_hermitian`."""
    return expm_hermitian(1j * np.asarray(a, dtype=complex), 1.0)


def fidelity(u, v):
    """Phase-insensitive gate agreement ``|tr(u^dagger v)| / 4``."""
    u = np.asarray(u)
    v = np.asarray(v)
    return float(min(1.0, abs(np.trace(u.conj().T @ v)) / 4.0))


def kron_local(a, b):
    """Local gate ``a (x) b`` from two 2x2 matrices."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def random_su2(rng):
    """Haar-random 2x2 special unitary."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    a, b, c, d = q
    return np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])


def random_local(rng):
    return kron_local(random_su2(rng), random_su2(rng))


def random_hermitian(rng, scale=1.0):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    return scale * 0.5 * (m + m.conj().T)
