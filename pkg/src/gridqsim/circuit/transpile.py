"""Lowering to a hardware-like basis {CZ, RZ, SX, X} with SWAP routing.

The default target is a linear nearest-neighbour chain ("heron-like"). It is an
explicit stand-in for a vendor backend, so depths are only meaningful relative to
each other. Global phases produced by the rewrites are tracked exactly and emitted
as one trailing GLOBAL_PHASE gate unless ``keep_global_phase=False``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import networkx as nx

from .ir import Circuit, Gate, GateKind, cz, global_phase, rz, swap, sx

DEFAULT_BASIS = frozenset({"CZ", "RZ", "SX", "X"})


@dataclass(frozen=True)
class TranspileTarget:
    n_qubits: int
    basis_gates: frozenset = DEFAULT_BASIS
    coupling_map: tuple[tuple[int, int], ...] = ()
    name: str = "heron-like"
    _graph: nx.Graph = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        basis = frozenset(self.basis_gates)
        if not basis <= DEFAULT_BASIS or not {"CZ", "RZ", "SX"} <= basis:
            raise ValueError(f"basis must contain CZ, RZ, SX and be a subset of {sorted(DEFAULT_BASIS)}")
        object.__setattr__(self, "basis_gates", basis)
        edges = self.coupling_map or tuple((q, q + 1) for q in range(self.n_qubits - 1))
        edges = tuple(sorted({tuple(sorted(e)) for e in edges}))
        g = nx.Graph()
        g.add_nodes_from(range(self.n_qubits))
        g.add_edges_from(edges)
        if g.number_of_nodes() != self.n_qubits:
            raise ValueError("coupling map references qubits outside the target")
        if not nx.is_connected(g):
            raise ValueError("coupling map must be connected")
        object.__setattr__(self, "coupling_map", edges)
        object.__setattr__(self, "_graph", g)

    @classmethod
    def linear(cls, n_qubits: int) -> "TranspileTarget":
        return cls(n_qubits)

    @classmethod
    def all_to_all(cls, n_qubits: int) -> "TranspileTarget":
        edges = tuple((a, b) for a in range(n_qubits) for b in range(a + 1, n_qubits))
        return cls(n_qubits, coupling_map=edges, name="all-to-all")

    def coupled(self, a: int, b: int) -> bool:
        return self._graph.has_edge(a, b)

    def path(self, a: int, b: int) -> list[int]:
        return nx.shortest_path(self._graph, a, b)


def _route(gates: Iterable[Gate], target: TranspileTarget) -> list[Gate]:
    """Walk the first operand along a shortest path, apply the gate, then walk it back."""
    out = []
    for g in gates:
        if g.arity == 2 and not target.coupled(*g.qubits):
            a, b = g.qubits
            path = target.path(a, b)
            hops = [swap(p, q) for p, q in zip(path[:-2], path[1:-1])]
            out.extend(hops)
            out.append(Gate(g.kind, (path[-2], b), g.theta))
            out.extend(reversed(hops))
        else:
            out.append(g)
    return out


class _Lowerer:
    def __init__(self, basis: frozenset):
        self.basis = basis
        self.phase = 0.0
        self.out: list[Gate] = []

    def h(self, q):
        # H = e^{i pi/4} RZ(pi/2) SX RZ(pi/2)
        self.out += [rz(math.pi / 2, q), sx(q), rz(math.pi / 2, q)]
        self.phase += math.pi / 4

    def x(self, q):
        if "X" in self.basis:
            self.out.append(Gate(GateKind.X, (q,)))
        else:
            # X = SX SX
            self.out += [sx(q), sx(q)]

    def phase_gate(self, theta, q):
        # PHASE(t) = e^{i t/2} RZ(t)
        self.out.append(rz(theta, q))
        self.phase += theta / 2

    def cnot(self, c, t):
        self.h(t)
        self.out.append(cz(c, t))
        self.h(t)

    def lower(self, g: Gate) -> None:
        k, q, t = g.kind, g.qubits, g.theta
        if k is GateKind.GLOBAL_PHASE:
            self.phase += t
        elif k in (GateKind.RZ, GateKind.SX, GateKind.CZ):
            self.out.append(g)
        elif k is GateKind.X:
            self.x(q[0])
        elif k is GateKind.H:
            self.h(q[0])
        elif k is GateKind.PHASE:
            self.phase_gate(t, q[0])
        elif k is GateKind.CNOT:
            self.cnot(*q)
        elif k is GateKind.SWAP:
            a, b = q
            self.cnot(a, b)
            self.cnot(b, a)
            self.cnot(a, b)
        elif k is GateKind.CPHASE:
            # CP(t) = P(t/2)_c P(t/2)_t CNOT P(-t/2)_t CNOT
            c, tq = q
            self.phase_gate(t / 2, c)
            self.phase_gate(t / 2, tq)
            self.cnot(c, tq)
            self.phase_gate(-t / 2, tq)
            self.cnot(c, tq)
        else:
            raise ValueError(f"cannot lower {k.value}")


def transpile(circuit: Circuit, target: Optional[TranspileTarget] = None,
              keep_global_phase: bool = True) -> Circuit:
    if target is None:
        target = TranspileTarget.linear(circuit.n_qubits)
    if circuit.n_qubits > target.n_qubits:
        raise ValueError(f"circuit has {circuit.n_qubits} qubits, target only {target.n_qubits}")
    low = _Lowerer(target.basis_gates)
    for g in _route(circuit.gates, target):
        low.lower(g)
    gates = low.out
    ph = math.remainder(low.phase, 2 * math.pi)
    if keep_global_phase and ph != 0.0:
        gates = gates + [global_phase(ph)]
    return Circuit(target.n_qubits, tuple(gates), f"{circuit.label}@{target.name}")


__all__ = ["TranspileTarget", "transpile", "DEFAULT_BASIS"]
