"""Weyl-chamber steering and CNOT design for two coupled qubits."""

from .cartan import (CNOT, CNOT_CLASS, LocalInvariants, assemble_cnot, class_vector_from_unitary,
                     entangler_from_class, is_cnot_class, local_invariants)
from .design import DesignModel, continuation_scan, efficiency, solve_design
from .errors import (ConvergenceError, InfeasibleError, NotCnotClassError, ReconstructionError,
                     SingularStateError, TrackingDomainError, WeylSteerError)
from .hamiltonians import (ConstantEnvelope, ControlSignals, SampledEnvelope, Sin2Envelope,
                           SteeringState, TrackingHamiltonian)
from .lie import ClassVector, canonicalize_weyl, commutator, generator_matrix
from .solution import DesignSolution
from .steer import AnsatzKind, Trajectory, direct_propagate, integrate
from .tracking import DeviceModel, cnot_condition, tracking_state, tracking_states

__version__ = "0.1.0"
