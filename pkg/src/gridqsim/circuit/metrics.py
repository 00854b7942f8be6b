from __future__ import annotations

from collections import Counter

from .ir import Circuit


def depth(circuit: Circuit) -> int:
    """Longest chain of gates sharing qubits (ASAP layering); global phases are free."""
    level = [0] * circuit.n_qubits
    for g in circuit.gates:
        if not g.qubits:
            continue
        t = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = t
    return max(level, default=0)


def gate_counts(circuit: Circuit) -> dict[str, int]:
    return dict(Counter(g.kind.value for g in circuit.gates))


def two_qubit_count(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if g.arity == 2)
