from .ir import Circuit, Gate, GateKind, circuit_to_text, dump_circuit, parse_circuit
from .library import (
    dense_hamiltonian,
    diagonal_phase_circuit,
    full_hamiltonian_step_circuit,
    inverse_qft_circuit,
    kinetic_step_circuit,
    pauli_exponential_gates,
    qft_circuit,
    trotter_step_circuit,
    z_string_exponential,
)
from .metrics import depth, gate_counts, two_qubit_count
from .transpile import TranspileTarget, transpile

__all__ = [
    "Circuit", "Gate", "GateKind", "circuit_to_text", "dump_circuit", "parse_circuit",
    "dense_hamiltonian", "diagonal_phase_circuit", "full_hamiltonian_step_circuit",
    "inverse_qft_circuit", "kinetic_step_circuit", "pauli_exponential_gates", "qft_circuit",
    "trotter_step_circuit", "z_string_exponential", "depth", "gate_counts", "two_qubit_count",
    "TranspileTarget", "transpile",
]
