"""Circuit builders for the split-operator propagator."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..grid import SpatialGrid
from ..pauli import (
    MAX_FULL_QUBITS,
    DiagonalDecomposition,
    GeneralPauliTerm,
    decompose_diagonal,
    decompose_full,
)
from .ir import Circuit, Gate, cnot, cphase, global_phase, h, rz, swap


def _qft_gates(n: int) -> list[Gate]:
    gates = []
    for j in reversed(range(n)):
        gates.append(h(j))
        for k in reversed(range(j)):
            gates.append(cphase(math.pi / 2 ** (j - k), j, k))
    for i in range(n // 2):
        gates.append(swap(i, n - 1 - i))
    return gates


def qft_circuit(n: int) -> Circuit:
    """|j> -> M**-1/2 sum_k exp(+2 pi i j k / M) |k>, with an explicit bit-reversal SWAP layer."""
    if n < 1:
        raise ValueError("QFT needs at least one qubit")
    return Circuit(n, tuple(_qft_gates(n)), f"qft{n}")


def inverse_qft_circuit(n: int) -> Circuit:
    return Circuit(n, qft_circuit(n).inverse().gates, f"iqft{n}")


def _ladder(qubits: Sequence[int]) -> list[Gate]:
    return [cnot(a, b) for a, b in zip(qubits[:-1], qubits[1:])]


def _z_string_gates(z_mask: int, angle: float) -> list[Gate]:
    qs = [q for q in range(z_mask.bit_length()) if (z_mask >> q) & 1]
    lad = _ladder(qs)
    return lad + [rz(2.0 * angle, qs[-1])] + lad[::-1]


def z_string_exponential(z_mask: int, angle: float, n: int) -> Circuit:
    """exp(-i angle Z_mask): CNOT chain folds parity onto the highest masked qubit, RZ, unfold."""
    if z_mask <= 0 or z_mask >= (1 << n):
        raise ValueError(f"z_mask must be in [1, 2**{n}), got {z_mask}")
    return Circuit(n, tuple(_z_string_gates(z_mask, angle)), f"expZ[{z_mask:#x}]")


def diagonal_phase_circuit(decomp: DiagonalDecomposition, dt: float) -> Circuit:
    """exp(-i V dt) for diagonal V; the Z strings commute so the product is exact."""
    gates = []
    for t in decomp.terms:
        if t.z_mask == 0:
            gates.append(global_phase(-t.coefficient * dt))
        else:
            gates.extend(_z_string_gates(t.z_mask, t.coefficient * dt))
    return Circuit(decomp.n_qubits, tuple(gates), "potential")


def kinetic_step_circuit(grid: SpatialGrid, mu_au: float, dt: float) -> Circuit:
    n = grid.n_qubits
    kin = decompose_diagonal(grid.kinetic_diagonal(mu_au))
    gates = qft_circuit(n).gates + diagonal_phase_circuit(kin, dt).gates + inverse_qft_circuit(n).gates
    return Circuit(n, gates, "kinetic")


def trotter_step_circuit(grid: SpatialGrid, potential_decomp: DiagonalDecomposition,
                         mu_au: float, dt: float) -> Circuit:
    """Potential sub-step, then kinetic sub-step."""
    if potential_decomp.n_qubits != grid.n_qubits:
        raise ValueError("decomposition width does not match grid")
    step = diagonal_phase_circuit(potential_decomp, dt) + kinetic_step_circuit(grid, mu_au, dt)
    return Circuit(grid.n_qubits, step.gates, "trotter_step")


def pauli_exponential_gates(term: GeneralPauliTerm, angle: float) -> list[Gate]:
    """exp(-i angle P) for a general string: rotate X/Y onto Z, Z-string core, rotate back."""
    support = term.x_mask | term.z_mask
    if support == 0:
        return [global_phase(-angle)]
    pre, post = [], []
    for q in range(support.bit_length()):
        xb, zb = (term.x_mask >> q) & 1, (term.z_mask >> q) & 1
        if xb and not zb:
            pre.append(h(q))
            post.append(h(q))
        elif xb and zb:
            # RZ(-pi/2) then H maps Y to Z; the RZ phases cancel between pre and post
            pre.extend([rz(-math.pi / 2, q), h(q)])
            post.extend([h(q), rz(math.pi / 2, q)])
    return pre + _z_string_gates(support, angle) + post


def full_hamiltonian_step_circuit(h_matrix, dt: float) -> Circuit:
    """First-order product of exp(-i c_k P_k dt) over the full Pauli expansion of H.

    The strings do not commute, so this only approximates exp(-i H dt); it exists
    to measure the cost of the brute-force encoding.
    """
    hm = np.asarray(h_matrix)
    n = hm.shape[0].bit_length() - 1
    if n > MAX_FULL_QUBITS:
        raise ValueError(f"full decomposition limited to {MAX_FULL_QUBITS} qubits, got {n}")
    gates = []
    for term in decompose_full(hm):
        gates.extend(pauli_exponential_gates(term, term.coefficient.real * dt))
    return Circuit(n, tuple(gates), "full_hamiltonian_step")


def dense_hamiltonian(grid: SpatialGrid, potential, mu_au: float) -> np.ndarray:
    """H = V + F^dag diag(T) F with F the unitary DFT in the QFT sign convention."""
    m = grid.m_points
    j = np.arange(m)
    f = np.exp(2j * np.pi * np.outer(j, j) / m) / math.sqrt(m)
    kin = f.conj().T @ np.diag(grid.kinetic_diagonal(mu_au)) @ f
    return np.diag(np.asarray(potential, dtype=float)).astype(complex) + kin
