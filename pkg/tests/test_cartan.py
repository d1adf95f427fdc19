import math

import numpy as np
import pytest

from weylsteer import cartan, qmat
from weylsteer.errors import NotCnotClassError
from weylsteer.lie import canonicalize_weyl

EQ5 = np.array([[1, 0, 0, -1j], [0, 1, -1j, 0], [0, -1j, 1, 0], [-1j, 0, 0, 1]]) / math.sqrt(2)
SWAP = np.eye(4)[[0, 2, 1, 3]]


def test_straight_line_gate():
    u = qmat.expm_hermitian(qmat.pauli_product("x", "x") / 2, math.pi / 2)
    assert np.abs(u - EQ5).max() < 1e-12
    assert np.abs(cartan.entangler_from_class((math.pi / 2, 0, 0)) - EQ5).max() < 1e-15


def test_cnot_invariants_and_class():
    for u in (EQ5, cartan.CNOT):
        inv = cartan.local_invariants(u)
        assert inv.distance(cartan.CNOT_INVARIANTS) < 1e-14
        assert cartan.class_vector_from_unitary(u) == pytest.approx((math.pi / 2, 0, 0), abs=1e-10)


def test_identity_and_swap():
    inv = cartan.local_invariants(np.eye(4))
    assert inv.g1 == pytest.approx(1) and inv.g2 == pytest.approx(3)
    assert cartan.class_vector_from_unitary(np.eye(4)) == pytest.approx((0, 0, 0), abs=1e-12)
    inv = cartan.local_invariants(SWAP)
    assert inv.g1 == pytest.approx(-1) and inv.g2 == pytest.approx(-3)
    assert cartan.class_vector_from_unitary(SWAP) == pytest.approx((math.pi / 2,) * 3, abs=1e-10)


def test_invariants_closed_form(rng):
    for _ in range(200):
        c = rng.uniform(-4, 4, 3)
        u = cartan.entangler_from_class(c)
        assert cartan.invariants_from_class(c).distance(cartan.local_invariants(u)) < 1e-12


def test_class_extraction_roundtrip(rng):
    for _ in range(300):
        c = canonicalize_weyl(rng.uniform(0, math.pi, 3))
        u = np.exp(1j * rng.uniform(0, 6)) * (
            qmat.random_local(rng) @ cartan.entangler_from_class(c) @ qmat.random_local(rng)
        )
        assert cartan.class_vector_from_unitary(u) == pytest.approx(c, abs=1e-8)


def test_local_invariance(rng):
    for _ in range(200):
        u = qmat.expm_hermitian(qmat.random_hermitian(rng))
        v = qmat.random_local(rng) @ u @ qmat.random_local(rng)
        assert cartan.local_invariants(u).distance(cartan.local_invariants(v)) < 1e-10


def test_assemble_cnot_from_straight_line():
    assert np.abs(cartan.assemble_cnot(EQ5) - cartan.CNOT).max() < 1e-10


def test_assemble_cnot_strips_local_factors(rng):
    k1, k2 = qmat.random_local(rng), qmat.random_local(rng)
    assert np.abs(cartan.assemble_cnot(k1 @ EQ5 @ k2, k1, k2) - cartan.CNOT).max() < 1e-10


def test_assemble_cnot_rejects_other_class():
    with pytest.raises(NotCnotClassError, match="class vector"):
        cartan.assemble_cnot(SWAP)
