"""Statevector simulator.

Amplitudes are a flat array indexed by the basis integer (qubit 0 = least
significant bit). Gates are applied in place on a private copy via stride
views: qubit q is axis 1 of ``a.reshape(2**(n-1-q), 2, 2**q, batch)``. The
trailing batch axis lets ``circuit_unitary`` push all basis states at once.

Noise is a Monte-Carlo trajectory model: after each gate a uniformly random
non-identity Pauli hits the gate's qubits with probability p1 (one-qubit gates)
or p2 (two-qubit gates). It is a qualitative stand-in, not a calibrated device model.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, TextIO

import numpy as np

from .circuit.ir import DIAGONAL_KINDS, Circuit, Gate, GateKind

MAX_UNITARY_QUBITS = 10

_PAULI_1Q = (
    None,
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "StateVector":
        a = np.zeros(1 << n_qubits, dtype=complex)
        a[index] = 1.0
        return cls(n_qubits, a)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(self.probabilities.sum())


@dataclass(frozen=True)
class ShotHistogram:
    shots: int
    counts: dict[int, int]

    def frequencies(self, m_points: int) -> np.ndarray:
        f = np.zeros(m_points)
        for k, c in self.counts.items():
            f[k] = c
        return f / self.shots

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "count"])
        for k in sorted(self.counts):
            w.writerow([k, self.counts[k]])


@dataclass(frozen=True)
class NoiseSpec:
    p1: float = 0.0
    p2: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("p1", "p2"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    @property
    def is_noiseless(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0


# --- kernels -------------------------------------------------------------------

def _check_qubits(gate: Gate, n: int) -> None:
    for q in gate.qubits:
        if not 0 <= q < n:
            raise IndexError(f"{gate.to_text()}: qubit {q} out of range for {n} qubits")


def _apply_1q(a: np.ndarray, mat: np.ndarray, q: int, n: int) -> None:
    v = a.reshape(1 << (n - 1 - q), 2, 1 << q, -1)
    a0 = v[:, 0].copy()
    a1 = v[:, 1]
    v[:, 0] = mat[0, 0] * a0 + mat[0, 1] * a1
    v[:, 1] = mat[1, 0] * a0 + mat[1, 1] * a1


def _apply_2q(a: np.ndarray, mat: np.ndarray, q_lo: int, q_hi: int, n: int) -> None:
    # matrix basis |q_hi q_lo>; q_lo is qubits[0]
    t = a.reshape((2,) * n + (-1,))
    ax_hi, ax_lo = n - 1 - q_hi, n - 1 - q_lo
    m4 = mat.reshape(2, 2, 2, 2)
    out = np.tensordot(m4, t, axes=([2, 3], [ax_hi, ax_lo]))
    t[...] = np.moveaxis(out, [0, 1], [ax_hi, ax_lo])


def _bit(n: int, q: int) -> np.ndarray:
    return (np.arange(1 << n) >> q) & 1


def _apply_diagonal(a: np.ndarray, gate: Gate, n: int) -> None:
    k, t = gate.kind, gate.theta
    if k is GateKind.GLOBAL_PHASE:
        a *= np.exp(1j * t)
        return
    if k is GateKind.RZ:
        b = _bit(n, gate.qubits[0])
        ph = np.exp(1j * t * (b - 0.5))
    elif k is GateKind.PHASE:
        ph = np.where(_bit(n, gate.qubits[0]) == 1, np.exp(1j * t), 1.0)
    else:
        both = _bit(n, gate.qubits[0]) & _bit(n, gate.qubits[1])
        val = -1.0 if k is GateKind.CZ else np.exp(1j * t)
        ph = np.where(both == 1, val, 1.0)
    a *= ph[:, None]


def _apply_inplace(a: np.ndarray, gate: Gate, n: int) -> None:
    if gate.kind in DIAGONAL_KINDS:
        _apply_diagonal(a, gate, n)
    elif gate.arity == 1:
        _apply_1q(a, gate.matrix(), gate.qubits[0], n)
    else:
        _apply_2q(a, gate.matrix(), gate.qubits[0], gate.qubits[1], n)


def _as_work(state: StateVector) -> np.ndarray:
    return np.array(state.amplitudes, dtype=complex).reshape(-1, 1)


# --- public API ----------------------------------------------------------------

def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    _check_qubits(gate, state.n_qubits)
    a = _as_work(state)
    _apply_inplace(a, gate, state.n_qubits)
    return StateVector(state.n_qubits, a[:, 0])


def run_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(f"circuit width {circuit.n_qubits} != state width {state.n_qubits}")
    n = state.n_qubits
    a = _as_work(state)
    for g in circuit.gates:
        _check_qubits(g, n)
        _apply_inplace(a, g, n)
    return StateVector(n, a[:, 0])


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    n = circuit.n_qubits
    if n > MAX_UNITARY_QUBITS:
        raise ValueError(f"dense unitary limited to {MAX_UNITARY_QUBITS} qubits, got {n}")
    u = np.eye(1 << n, dtype=complex)
    for g in circuit.gates:
        _apply_inplace(u, g, n)
    return u


def sample_shots(state: StateVector, shots: int, seed: int) -> ShotHistogram:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = state.probabilities
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, probs)
    return ShotHistogram(shots, {int(k): int(c) for k, c in enumerate(draws) if c})


def _pauli_error(a: np.ndarray, gate: Gate, n: int, rng: np.random.Generator) -> None:
    if gate.arity == 1:
        _apply_1q(a, _PAULI_1Q[rng.integers(1, 4)], gate.qubits[0], n)
        return
    code = int(rng.integers(1, 16))
    for q, c in zip(gate.qubits, (code & 3, code >> 2)):
        if c:
            _apply_1q(a, _PAULI_1Q[c], q, n)


def run_circuit_noisy(state: StateVector, circuit: Circuit, noise: NoiseSpec,
                      rng: Optional[np.random.Generator] = None) -> StateVector:
    """One stochastic trajectory; ``rng`` overrides noise.seed for chained runs."""
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    n = state.n_qubits
    a = _as_work(state)
    for g in circuit.gates:
        _check_qubits(g, n)
        _apply_inplace(a, g, n)
        p = noise.p1 if g.arity == 1 else noise.p2 if g.arity == 2 else 0.0
        if p > 0.0 and rng.random() < p:
            _pauli_error(a, g, n, rng)
    return StateVector(n, a[:, 0])
