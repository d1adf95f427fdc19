import math

import numpy as np
import pytest

from weylsteer import tracking
from weylsteer.cartan import CNOT_INVARIANTS, class_vector_from_unitary, local_invariants
from weylsteer.errors import InfeasibleError
from weylsteer.hamiltonians import Sin2Envelope, TrackingHamiltonian
from weylsteer.qmat import fidelity
from weylsteer.steer import cartan_form


def test_capacitive_rabi():
    sol = tracking.cnot_condition(tracking.DeviceModel("capacitive"), 1)
    assert sol.rabi["omega1"] == pytest.approx(math.sqrt(15), abs=1e-12)
    assert sol.residual < 1e-10


def test_inductive_rf_rabi():
    sol = tracking.cnot_condition(tracking.DeviceModel("inductive-rf", 1.0, 0.1), 1, 1)
    assert sol.rabi["omega1"] == pytest.approx(3.8716, abs=5e-5)
    assert sol.rabi["omega2"] == pytest.approx(0.0258, abs=5e-5)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dc_detune_closed_form(n):
    k = 0.1 * n + 0.5
    sol = tracking.cnot_condition(tracking.DeviceModel("dc-detune", 1.0, k), n)
    assert sol.rabi["omega1"] == pytest.approx(math.sqrt((2 * k * n) ** 2 - 1), rel=1e-12)
    assert sol.residual < 1e-9


def test_dc_detune_infeasible():
    with pytest.raises(InfeasibleError, match="must exceed 1"):
        tracking.cnot_condition(tracking.DeviceModel("dc-detune", 1.0, 0.1), 3)


def test_rabi_radicand_error():
    with pytest.raises(InfeasibleError, match="radicand"):
        tracking.rabi_for_axis_point(0.1, 1.0, 0.0, math.pi / 2, 1, 1)


def test_f_pm_ode_residual():
    h = TrackingHamiltonian(1.3, 0.4, 1.0, 0.9, 0.2, Sin2Envelope(5.0))
    for t in (0.3, 1.1, 2.7):
        assert max(map(abs, tracking.f_pm_residual(h, t))) < 1e-8


@pytest.mark.parametrize("kind, k, n", [("capacitive", 0, 1), ("inductive-rf", 0.1, 1), ("dc-detune", 0.1, 6)])
def test_analytic_state_reconstructs(kind, k, n):
    mdl = tracking.DeviceModel(kind, 1.0, k)
    sol = tracking.cnot_condition(mdl, n)
    h = mdl.hamiltonian(sol.rabi["omega1"], sol.rabi.get("omega2", 0.0))
    times = np.linspace(0, mdl.cnot_area(), 41)
    states = tracking.tracking_states(h, times)
    for s, t in zip(states, times):
        assert fidelity(cartan_form(s, h.frame), tracking.propagate_tracking(h, t)) > 1 - 1e-12
    u = tracking.propagate_tracking(h, times[-1])
    assert local_invariants(u).distance(CNOT_INVARIANTS) < 1e-10
    assert class_vector_from_unitary(u) == pytest.approx((math.pi / 2, 0, 0), abs=1e-8)


def test_single_state_matches_grid():
    h = TrackingHamiltonian(2.0, 0.5, 1.0, 1.0, 0.3)
    grid = tracking.tracking_states(h, [0.0, 0.4, 0.8])
    assert np.allclose(tracking.tracking_state(h, 0.8), grid[-1], atol=1e-12)


def test_time_dependent_g1():
    h = TrackingHamiltonian(1.0, 0.0, lambda t: 1 + 0.5 * math.sin(t), 1.0, 0.0, Sin2Envelope(3.0))
    s = tracking.tracking_state(h, 2.0)
    assert fidelity(cartan_form(s), tracking.propagate_tracking(h, 2.0)) > 1 - 1e-12
