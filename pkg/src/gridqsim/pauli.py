"""Pauli-string decompositions.

Diagonal operators expand in the 2**n commuting Z strings; a Z string is a bitmask
(bit j set means Z on qubit j) whose eigenvalue on basis state m is
(-1)**popcount(mask & m). General operators expand in all 4**n strings, encoded
symplectically as (x_mask, z_mask) with I=00, X=10, Z=01, Y=11 per qubit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

PRUNE_EPSILON = 1e-14
MAX_FULL_QUBITS = 7


def popcount(x: int) -> int:
    return bin(x).count("1")


def parity_signs(mask: int, m_points: int) -> np.ndarray:
    """(-1)**popcount(mask & m) for m = 0..M-1."""
    m = np.arange(m_points)
    bits = mask & m
    par = np.zeros(m_points, dtype=np.int64)
    while np.any(bits):
        par ^= bits & 1
        bits = bits >> 1
    return 1 - 2 * par


def _n_qubits_for(length: int) -> int:
    if length < 1 or length & (length - 1):
        raise ValueError(f"length {length} is not a power of two")
    return length.bit_length() - 1


def walsh_hadamard(values) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform in natural (bitmask) order.

    out[k] = sum_m (-1)**popcount(k & m) * values[m]; O(M log M).
    """
    a = np.array(values, dtype=np.result_type(np.asarray(values).dtype, float), copy=True)
    n = _n_qubits_for(len(a))
    for q in range(n):
        blk = a.reshape(-1, 2, 1 << q)
        lo = blk[:, 0, :].copy()
        hi = blk[:, 1, :]
        blk[:, 0, :] = lo + hi
        blk[:, 1, :] = lo - hi
    return a


@dataclass(frozen=True)
class ZStringTerm:
    z_mask: int
    coefficient: float

    def eigenvalues(self, n_qubits: int) -> np.ndarray:
        return self.coefficient * parity_signs(self.z_mask, 1 << n_qubits)


@dataclass(frozen=True)
class DiagonalDecomposition:
    n_qubits: int
    terms: tuple[ZStringTerm, ...]

    def __post_init__(self):
        masks = [t.z_mask for t in self.terms]
        if masks != sorted(set(masks)):
            raise ValueError("terms must have unique masks in ascending order")
        if masks and not 0 <= masks[-1] < (1 << self.n_qubits):
            raise ValueError("mask out of range for n_qubits")

    def __len__(self):
        return len(self.terms)

    def identity_coefficient(self) -> float:
        if self.terms and self.terms[0].z_mask == 0:
            return self.terms[0].coefficient
        return 0.0

    def as_dict(self) -> dict[int, float]:
        return {t.z_mask: t.coefficient for t in self.terms}


def decompose_diagonal(diag_values, prune_epsilon: float = PRUNE_EPSILON) -> DiagonalDecomposition:
    v = np.asarray(diag_values, dtype=float)
    if v.ndim != 1:
        raise ValueError("diagonal must be a 1-D vector")
    n = _n_qubits_for(len(v))
    if not np.all(np.isfinite(v)):
        raise ValueError("diagonal contains non-finite values")
    coeffs = walsh_hadamard(v) / len(v)
    terms = tuple(
        ZStringTerm(int(k), float(c)) for k, c in enumerate(coeffs) if abs(c) >= prune_epsilon
    )
    return DiagonalDecomposition(n, terms)


def coefficient_bruteforce(z_mask: int, diag_values) -> float:
    """Direct trace formula Tr(P V) / 2**n; the independent check for decompose_diagonal."""
    v = np.asarray(diag_values, dtype=float)
    total = 0.0
    for m, vm in enumerate(v):
        total += -vm if popcount(z_mask & m) & 1 else vm
    return total / len(v)


def reconstruct_diagonal(decomp: DiagonalDecomposition) -> np.ndarray:
    out = np.zeros(1 << decomp.n_qubits)
    for t in decomp.terms:
        out += t.eigenvalues(decomp.n_qubits)
    return out


def write_decomposition(decomp: DiagonalDecomposition, fh: TextIO) -> None:
    fh.write(f"# n_qubits={decomp.n_qubits}\n")
    for t in decomp.terms:
        fh.write(f"0x{t.z_mask:x} {t.coefficient:.12g}\n")


def read_decomposition(lines: Iterable[str]) -> DiagonalDecomposition:
    n = None
    terms = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            if key.strip() == "n_qubits":
                n = int(val)
            continue
        mask, coef = line.split()
        terms.append(ZStringTerm(int(mask, 16), float(coef)))
    if n is None:
        raise ValueError("missing '# n_qubits=' header")
    return DiagonalDecomposition(n, tuple(terms))


# --- general 4**n decomposition -------------------------------------------------

_LABELS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


@dataclass(frozen=True)
class GeneralPauliTerm:
    x_mask: int
    z_mask: int
    coefficient: complex

    def label(self, n_qubits: int) -> str:
        """String written qubit n-1 first, e.g. 'XZ' is X on qubit 1, Z on qubit 0."""
        return "".join(
            _LABELS[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)]
            for q in reversed(range(n_qubits))
        )

    def is_diagonal(self) -> bool:
        return self.x_mask == 0


def pauli_matrix(x_mask: int, z_mask: int, n_qubits: int) -> np.ndarray:
    """Dense matrix of the Hermitian string i**popcount(x&z) X^x Z^z."""
    dim = 1 << n_qubits
    b = np.arange(dim)
    phase = (1j) ** popcount(x_mask & z_mask)
    mat = np.zeros((dim, dim), dtype=complex)
    mat[b ^ x_mask, b] = phase * parity_signs(z_mask, dim)
    return mat


def decompose_full(h_matrix, prune_epsilon: float = PRUNE_EPSILON,
                   hermitian_atol: float = 1e-10) -> list[GeneralPauliTerm]:
    """Expand a Hermitian matrix over all 4**n Pauli strings, c = Tr(P H) / 2**n.

    For each x_mask the trace reduces to a Walsh-Hadamard transform of the
    shifted diagonal H[b, b ^ x], so the whole expansion costs O(4**n n).
    """
    h = np.asarray(h_matrix, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("expected a square matrix")
    n = _n_qubits_for(h.shape[0])
    if n > MAX_FULL_QUBITS:
        raise ValueError(f"full decomposition limited to {MAX_FULL_QUBITS} qubits, got {n}")
    if not np.allclose(h, h.conj().T, atol=hermitian_atol, rtol=0):
        raise ValueError("matrix is not Hermitian")
    dim = 1 << n
    b = np.arange(dim)
    pc = np.array([popcount(k) for k in range(dim)])
    terms = []
    for x in range(dim):
        shifted = h[b, b ^ x]
        wh = walsh_hadamard(shifted) / dim
        # Tr(P H) with P = i**|x&z| X^x Z^z
        coeffs = (1j) ** (pc[x & b] % 4) * wh
        for z in range(dim):
            c = coeffs[z]
            if abs(c) >= prune_epsilon:
                terms.append(GeneralPauliTerm(x, z, complex(c)))
    return terms


def reconstruct_full(terms: Iterable[GeneralPauliTerm], n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for t in terms:
        out += t.coefficient * pauli_matrix(t.x_mask, t.z_mask, n_qubits)
    return out

