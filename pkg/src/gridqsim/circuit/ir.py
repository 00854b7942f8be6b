"""Gate-list circuit representation and its line-oriented text format.

Every gate kind has an exact matrix. Two-qubit matrices are written in the
basis |q1 q0> ordered (00, 01, 10, 11) where q0 = qubits[0] is the low bit,
i.e. for CNOT/CPHASE the control is the low bit.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO

import numpy as np


class GateKind(str, enum.Enum):
    H = "H"
    X = "X"
    SX = "SX"
    RZ = "RZ"
    PHASE = "PHASE"
    CZ = "CZ"
    CPHASE = "CPHASE"
    CNOT = "CNOT"
    SWAP = "SWAP"
    GLOBAL_PHASE = "GLOBAL_PHASE"


_ARITY = {
    GateKind.H: 1, GateKind.X: 1, GateKind.SX: 1, GateKind.RZ: 1, GateKind.PHASE: 1,
    GateKind.CZ: 2, GateKind.CPHASE: 2, GateKind.CNOT: 2, GateKind.SWAP: 2,
    GateKind.GLOBAL_PHASE: 0,
}
_PARAMETRIC = {GateKind.RZ, GateKind.PHASE, GateKind.CPHASE, GateKind.GLOBAL_PHASE}
# gates whose matrix is diagonal in the computational basis
DIAGONAL_KINDS = frozenset({GateKind.RZ, GateKind.PHASE, GateKind.CZ, GateKind.CPHASE,
                            GateKind.GLOBAL_PHASE})

_S2 = 1 / math.sqrt(2)
_FIXED = {
    GateKind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.SX: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    # control = low bit
    GateKind.CNOT: np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex),
    GateKind.SWAP: np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...] = ()
    theta: Optional[float] = None

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != _ARITY[kind]:
            raise ValueError(f"{kind.value} acts on {_ARITY[kind]} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{kind.value}: repeated qubit in {self.qubits}")
        if kind in _PARAMETRIC:
            if self.theta is None or not math.isfinite(self.theta):
                raise ValueError(f"{kind.value} needs a finite angle")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise ValueError(f"{kind.value} takes no angle")

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def matrix(self) -> np.ndarray:
        k, t = self.kind, self.theta
        if k in _FIXED:
            return _FIXED[k]
        if k is GateKind.RZ:
            return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
        if k is GateKind.PHASE:
            return np.diag([1, np.exp(1j * t)])
        if k is GateKind.CPHASE:
            return np.diag([1, 1, 1, np.exp(1j * t)])
        if k is GateKind.GLOBAL_PHASE:
            return np.array([[np.exp(1j * t)]])
        raise AssertionError(k)

    def inverse(self) -> list["Gate"]:
        k = self.kind
        if k in _PARAMETRIC:
            return [Gate(k, self.qubits, -self.theta)]
        if k is GateKind.SX:
            # SX^-1 = SX^3
            return [self, self, self]
        return [self]

    def to_text(self) -> str:
        s = self.kind.value
        if self.qubits:
            s += " " + ",".join(str(q) for q in self.qubits)
        if self.theta is not None:
            s += f";theta={self.theta!r}"
        return s

    @classmethod
    def from_text(cls, line: str) -> "Gate":
        head, _, param = line.strip().partition(";")
        kind, _, qs = head.strip().partition(" ")
        qubits = tuple(int(q) for q in qs.split(",")) if qs.strip() else ()
        theta = None
        if param:
            key, _, val = param.partition("=")
            if key.strip() != "theta":
                raise ValueError(f"unknown gate parameter {key!r}")
            theta = float(val)
        return cls(GateKind(kind.strip()), qubits, theta)


# Convenience constructors
def h(q): return Gate(GateKind.H, (q,))
def x(q): return Gate(GateKind.X, (q,))
def sx(q): return Gate(GateKind.SX, (q,))
def rz(theta, q): return Gate(GateKind.RZ, (q,), theta)
def phase(theta, q): return Gate(GateKind.PHASE, (q,), theta)
def cz(a, b): return Gate(GateKind.CZ, (a, b))
def cphase(theta, control, target): return Gate(GateKind.CPHASE, (control, target), theta)
def cnot(control, target): return Gate(GateKind.CNOT, (control, target))
def swap(a, b): return Gate(GateKind.SWAP, (a, b))
def global_phase(theta): return Gate(GateKind.GLOBAL_PHASE, (), theta)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        gates = tuple(self.gates)
        for g in gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"{g.to_text()}: qubit out of range for {self.n_qubits} qubits")
        object.__setattr__(self, "gates", gates)

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot concatenate circuits of different width")
        label = " + ".join(s for s in (self.label, other.label) if s)
        return Circuit(self.n_qubits, self.gates + other.gates, label)

    def inverse(self) -> "Circuit":
        gates = [ig for g in reversed(self.gates) for ig in g.inverse()]
        return Circuit(self.n_qubits, tuple(gates), f"{self.label}^-1" if self.label else "")

    def repeat(self, times: int) -> "Circuit":
        return Circuit(self.n_qubits, self.gates * times, self.label)


def dump_circuit(circuit: Circuit, fh: TextIO) -> None:
    fh.write(f"qubits={circuit.n_qubits}\n")
    for g in circuit.gates:
        fh.write(g.to_text() + "\n")


def circuit_to_text(circuit: Circuit) -> str:
    lines = [f"qubits={circuit.n_qubits}"] + [g.to_text() for g in circuit.gates]
    return "\n".join(lines) + "\n"


def parse_circuit(lines: Iterable[str]) -> Circuit:
    it = (ln.strip() for ln in lines)
    it = (ln for ln in it if ln and not ln.startswith("#"))
    header = next(it, None)
    if header is None or not header.startswith("qubits="):
        raise ValueError("circuit text must start with 'qubits=<n>'")
    n = int(header.split("=", 1)[1])
    return Circuit(n, tuple(Gate.from_text(ln) for ln in it))
