"""Simulation of nonadiabatic holonomic gates on ancilla-encoded qubits."""

from .channel import Channel
from .gates import (
    CNOT,
    GateRealization,
    GateSpec,
    build_h1,
    build_h2,
    build_h3,
    exact_u1,
    exact_u2,
    exact_u3,
    induced_channel,
    realize_gate,
)
from .holonomy import Subspace, holonomy_check, logical_action, projector
from .pauli import OperatorSum, PauliString, parse_pauli, partial_trace, pauli_to_dense
from .propagator import (
    FactorSequence,
    TrotterSchedule,
    build_t1_sequence,
    build_t2_sequence,
    build_t3_sequence,
    exact_evolution,
    expm_hermitian,
    product_error,
    trotter_product,
)
from .tomography import (
    ChiMatrix,
    OperatorBasis,
    ProcessTomography,
    attenuate,
    chi_fid_attenuated,
    chi_fid_unattenuated,
    chi_of_unitary,
    qpt_chi,
    state_fid_attenuated,
    state_fid_unattenuated,
)

__version__ = "0.1.0"
