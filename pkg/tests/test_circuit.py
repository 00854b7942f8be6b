import io
import math

import numpy as np
import pytest
import scipy.linalg

from gridqsim.circuit import (
    Circuit,
    GateKind,
    TranspileTarget,
    circuit_to_text,
    dense_hamiltonian,
    depth,
    diagonal_phase_circuit,
    dump_circuit,
    full_hamiltonian_step_circuit,
    gate_counts,
    inverse_qft_circuit,
    kinetic_step_circuit,
    parse_circuit,
    qft_circuit,
    transpile,
    trotter_step_circuit,
    z_string_exponential,
)
from gridqsim.circuit.ir import Gate, cnot, cphase, global_phase, h, phase, rz, swap, sx, x
from gridqsim.grid import make_grid
from gridqsim.pauli import decompose_diagonal, pauli_matrix
from gridqsim.sim import circuit_unitary

X = np.array([[0, 1], [1, 0]], dtype=complex)


def dft(m):
    j = np.arange(m)
    return np.exp(2j * np.pi * np.outer(j, j) / m) / math.sqrt(m)


def equal_up_to_phase(a, b, atol):
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    ph = a[k] / b[k]
    return abs(abs(ph) - 1) < atol and np.abs(a - ph * b).max() < atol


def random_circuit(n, length, seed):
    rng = np.random.default_rng(seed)
    gates = []
    for _ in range(length):
        kind = rng.choice(["H", "X", "SX", "RZ", "PHASE", "CNOT", "CPHASE", "SWAP", "CZ"])
        if n == 1 and kind in ("CNOT", "CPHASE", "SWAP", "CZ"):
            kind = "H"
        if kind in ("CNOT", "CPHASE", "SWAP", "CZ"):
            a, b = rng.choice(n, size=2, replace=False)
            qs = (int(a), int(b))
        else:
            qs = (int(rng.integers(n)),)
        theta = float(rng.uniform(-4, 4)) if kind in ("RZ", "PHASE", "CPHASE") else None
        gates.append(Gate(GateKind(kind), qs, theta))
    return Circuit(n, tuple(gates))


class TestGateIR:
    def test_rejects_bad_gates(self):
        with pytest.raises(ValueError):
            cnot(1, 1)
        with pytest.raises(ValueError):
            Gate(GateKind.RZ, (0,))
        with pytest.raises(ValueError):
            Gate(GateKind.H, (0,), 0.1)
        with pytest.raises(ValueError):
            Circuit(2, (h(2),))

    def test_text_roundtrip(self):
        c = Circuit(3, (h(0), cphase(0.1234567890123, 2, 0), rz(-1e-9, 1), global_phase(0.5), swap(0, 2)))
        text = circuit_to_text(c)
        assert text.splitlines()[0] == "qubits=3"
        assert "CPHASE 2,0;theta=0.1234567890123" in text
        assert "GLOBAL_PHASE;theta=0.5" in text
        assert parse_circuit(io.StringIO(text)) == c
        buf = io.StringIO()
        dump_circuit(c, buf)
        assert buf.getvalue() == text

    def test_golden_double_well_step_potential(self):
        d = decompose_diagonal([0, -6, 0, -6])
        text = circuit_to_text(diagonal_phase_circuit(d, 0.0625))
        assert text == "qubits=2\nGLOBAL_PHASE;theta=0.1875\nRZ 0;theta=0.375\n"

    def test_parse_requires_header(self):
        with pytest.raises(ValueError):
            parse_circuit(["H 0"])

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_inverse(self, n):
        c = random_circuit(n, 30, seed=n)
        u = circuit_unitary(c)
        np.testing.assert_allclose(circuit_unitary(c.inverse()), u.conj().T, atol=1e-12)


class TestQFT:
    def test_one_qubit_is_hadamard(self):
        c = qft_circuit(1)
        assert [g.kind for g in c] == [GateKind.H]
        np.testing.assert_allclose(circuit_unitary(c), np.array([[1, 1], [1, -1]]) / math.sqrt(2))

    def test_two_qubit_structure(self):
        c = qft_circuit(2)
        assert [g.kind for g in c] == [GateKind.H, GateKind.CPHASE, GateKind.H, GateKind.SWAP]
        assert c.gates[1].theta == pytest.approx(math.pi / 2)
        np.testing.assert_allclose(circuit_unitary(c), dft(4), atol=1e-12)
        # omega = i
        np.testing.assert_allclose(dft(4)[1], np.array([1, 1j, -1, -1j]) / 2, atol=1e-15)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_matches_dft_and_count(self, n):
        c = qft_circuit(n)
        assert len(c) == n * (n + 1) // 2 + n // 2
        np.testing.assert_allclose(circuit_unitary(c), dft(2 ** n), atol=1e-12)

    def test_four_qubit_count(self):
        assert len(qft_circuit(4)) == 12

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_inverse(self, n):
        u = circuit_unitary(qft_circuit(n))
        ui = circuit_unitary(inverse_qft_circuit(n))
        np.testing.assert_allclose(u @ ui, np.eye(2 ** n), atol=1e-12)
        np.testing.assert_allclose(ui, u.conj().T, atol=1e-12)

    def test_inverse_one_qubit_is_h(self):
        assert [g.kind for g in inverse_qft_circuit(1)] == [GateKind.H]


class TestZStringExponential:
    def test_single_bit(self):
        c = z_string_exponential(0b100, 0.3, 3)
        assert [g.to_text() for g in c] == [rz(0.6, 2).to_text()]

    def test_zero_angle_identity(self):
        np.testing.assert_allclose(circuit_unitary(z_string_exponential(0b1011, 0.0, 4)), np.eye(16), atol=1e-14)

    def test_zzzz(self):
        theta = 0.731
        c = z_string_exponential(0b1111, theta, 4)
        counts = gate_counts(c)
        assert counts == {"CNOT": 6, "RZ": 1}
        expected = scipy.linalg.expm(-1j * theta * pauli_matrix(0, 0b1111, 4))
        np.testing.assert_allclose(circuit_unitary(c), expected, atol=1e-12)
        par = np.array([bin(m).count("1") & 1 for m in range(16)])
        np.testing.assert_allclose(np.diag(circuit_unitary(c)), np.exp(-1j * theta * (1 - 2 * par)), atol=1e-12)

    @pytest.mark.parametrize("mask", range(1, 16))
    def test_all_masks_n4(self, mask):
        c = z_string_exponential(mask, -1.3, 4)
        w = bin(mask).count("1")
        assert gate_counts(c).get("CNOT", 0) == 2 * (w - 1)
        expected = scipy.linalg.expm(1.3j * pauli_matrix(0, mask, 4))
        np.testing.assert_allclose(circuit_unitary(c), expected, atol=1e-12)

    @pytest.mark.parametrize("mask", [0, 16, 17])
    def test_rejects(self, mask):
        with pytest.raises(ValueError):
            z_string_exponential(mask, 0.1, 4)


class TestDiagonalPhase:
    def test_constant_is_global_phase(self):
        c = diagonal_phase_circuit(decompose_diagonal(np.full(8, 1.5)), 0.2)
        assert [g.kind for g in c] == [GateKind.GLOBAL_PHASE]
        np.testing.assert_allclose(circuit_unitary(c), np.exp(-0.3j) * np.eye(8), atol=1e-15)

    def test_double_well(self):
        c = diagonal_phase_circuit(decompose_diagonal([0, -6, 0, -6]), 0.0625)
        assert c.gates[0].kind is GateKind.GLOBAL_PHASE and c.gates[0].theta == pytest.approx(0.1875)
        e = np.exp(0.375j)
        np.testing.assert_allclose(circuit_unitary(c), np.diag([1, e, 1, e]), atol=1e-14)

    def test_zero_dt(self):
        v = np.random.default_rng(0).normal(size=8)
        np.testing.assert_allclose(circuit_unitary(diagonal_phase_circuit(decompose_diagonal(v), 0.0)),
                                   np.eye(8), atol=1e-15)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_exact(self, n):
        rng = np.random.default_rng(n)
        v, dt = rng.uniform(-20, 20, size=2 ** n), 0.137
        u = circuit_unitary(diagonal_phase_circuit(decompose_diagonal(v), dt))
        np.testing.assert_allclose(u, np.diag(np.exp(-1j * v * dt)), atol=1e-12)


class TestKineticAndTrotter:
    def test_kinetic_zero_dt(self):
        c = kinetic_step_circuit(make_grid(3, 0, 3), 1.0, 0.0)
        np.testing.assert_allclose(circuit_unitary(c), np.eye(8), atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_kinetic_matches_dense(self, n):
        g = make_grid(n, 0, 4)
        dt = 0.07
        f = dft(g.m_points)
        expected = f.conj().T @ np.diag(np.exp(-1j * g.kinetic_diagonal(1.0) * dt)) @ f
        np.testing.assert_allclose(circuit_unitary(kinetic_step_circuit(g, 1.0, dt)), expected, atol=1e-12)

    def test_trotter_v_zero_is_kinetic(self):
        g = make_grid(3, 0, 4)
        c = trotter_step_circuit(g, decompose_diagonal(np.zeros(8)), 1.0, 0.1)
        assert c.gates == kinetic_step_circuit(g, 1.0, 0.1).gates

    def test_trotter_zero_dt(self):
        g = make_grid(3, 0, 3)
        v = 0.5 * (g.points - 1.5) ** 2
        c = trotter_step_circuit(g, decompose_diagonal(v), 1.0, 0.0)
        np.testing.assert_allclose(circuit_unitary(c), np.eye(8), atol=1e-12)

    def test_trotter_harmonic_dense_oracle(self):
        g = make_grid(3, 0, 3)
        v = 0.5 * (g.points - 1.5) ** 2
        dt = 0.1625
        f = dft(8)
        kin = scipy.linalg.expm(-1j * dt * (f.conj().T @ np.diag(g.kinetic_diagonal(1.0)) @ f))
        pot = scipy.linalg.expm(-1j * dt * np.diag(v))
        u = circuit_unitary(trotter_step_circuit(g, decompose_diagonal(v), 1.0, dt))
        # potential acts first, then kinetic
        np.testing.assert_allclose(u, kin @ pot, atol=1e-10)

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            trotter_step_circuit(make_grid(3, 0, 1), decompose_diagonal(np.zeros(4)), 1.0, 0.1)


class TestFullHamiltonian:
    def test_single_x(self):
        theta = 0.42
        c = full_hamiltonian_step_circuit(X, theta)
        assert [g.kind for g in c] == [GateKind.H, GateKind.RZ, GateKind.H]
        assert c.gates[1].theta == pytest.approx(2 * theta)
        np.testing.assert_allclose(circuit_unitary(c), scipy.linalg.expm(-1j * theta * X), atol=1e-12)

    def test_zero_dt(self):
        g = make_grid(2, 0, 3)
        h_ = dense_hamiltonian(g, 0.5 * (g.points - 1.5) ** 2, 1.0)
        np.testing.assert_allclose(circuit_unitary(full_hamiltonian_step_circuit(h_, 0.0)), np.eye(4), atol=1e-12)

    def test_diagonal_reduces_to_z_path(self):
        v = np.random.default_rng(2).normal(size=8)
        full = full_hamiltonian_step_circuit(np.diag(v), 0.3)
        diag = diagonal_phase_circuit(decompose_diagonal(v), 0.3)
        assert gate_counts(full) == gate_counts(diag)
        np.testing.assert_allclose(circuit_unitary(full), circuit_unitary(diag), atol=1e-12)

    def test_y_terms(self):
        y = np.array([[0, -1j], [1j, 0]])
        h_ = np.kron(y, X) + 0.5 * np.kron(y, np.eye(2)) - 0.3 * np.kron(np.eye(2), X)
        c = full_hamiltonian_step_circuit(h_, 0.2)
        # the two strings commute here, so the product is exact
        np.testing.assert_allclose(circuit_unitary(c), scipy.linalg.expm(-0.2j * h_), atol=1e-12)

    def test_first_order_error(self):
        g = make_grid(2, 0, 3)
        h_ = dense_hamiltonian(g, 0.5 * (g.points - 1.5) ** 2, 1.0)
        errs = [np.linalg.norm(circuit_unitary(full_hamiltonian_step_circuit(h_, dt))
                               - scipy.linalg.expm(-1j * dt * h_), 2) for dt in (0.01, 0.005)]
        assert 3.0 < errs[0] / errs[1] < 5.0  # local error O(dt^2)

    def test_rejects_wide(self):
        with pytest.raises(ValueError):
            full_hamiltonian_step_circuit(np.eye(256), 0.1)


class TestTranspile:
    def test_basis_rz_unchanged(self):
        c = Circuit(1, (rz(0.3, 0),))
        assert transpile(c).gates == c.gates

    def test_cnot_on_coupled_pair(self):
        c = Circuit(2, (cnot(0, 1),))
        t = transpile(c)
        kinds = {g.kind.value for g in t}
        assert kinds <= {"CZ", "RZ", "SX", "X", "GLOBAL_PHASE"}
        assert gate_counts(t)["CZ"] == 1
        assert equal_up_to_phase(circuit_unitary(t), circuit_unitary(c), 1e-8)

    def test_routing_cnot_0_3(self):
        c = Circuit(4, (cnot(0, 3),))
        t = transpile(c, TranspileTarget.linear(4))
        for g in t:
            if g.arity == 2:
                assert abs(g.qubits[0] - g.qubits[1]) == 1
        # 2 SWAPs there and back (3 CZ each) plus the CNOT itself
        assert gate_counts(t)["CZ"] == 4 * 3 + 1
        assert equal_up_to_phase(circuit_unitary(t), circuit_unitary(c), 1e-8)

    @pytest.mark.parametrize("n,seed", [(1, 0), (2, 1), (3, 2), (4, 3), (4, 4)])
    def test_random_semantics_preserved(self, n, seed):
        c = random_circuit(n, 40, seed)
        t = transpile(c)
        assert {g.kind.value for g in t} <= {"CZ", "RZ", "SX", "X", "GLOBAL_PHASE"}
        # phase is tracked, so equality is exact, not just up to phase
        np.testing.assert_allclose(circuit_unitary(t), circuit_unitary(c), atol=1e-10)

    def test_drop_global_phase_flag(self):
        c = Circuit(2, (h(0), global_phase(0.3), cnot(0, 1)))
        t = transpile(c, keep_global_phase=False)
        assert all(g.kind is not GateKind.GLOBAL_PHASE for g in t)
        assert equal_up_to_phase(circuit_unitary(t), circuit_unitary(c), 1e-8)

    def test_without_x_in_basis(self):
        target = TranspileTarget(1, basis_gates=frozenset({"CZ", "RZ", "SX"}))
        t = transpile(Circuit(1, (x(0),)), target)
        assert [g.kind for g in t] == [GateKind.SX, GateKind.SX]
        np.testing.assert_allclose(circuit_unitary(t), X, atol=1e-15)

    def test_rejects_wider_circuit(self):
        with pytest.raises(ValueError):
            transpile(Circuit(3, (h(2),)), TranspileTarget.linear(2))

    def test_target_validation(self):
        with pytest.raises(ValueError):
            TranspileTarget(4, coupling_map=((0, 1), (2, 3)))
        with pytest.raises(ValueError):
            TranspileTarget(2, basis_gates=frozenset({"CZ", "RZ", "H"}))
        t = TranspileTarget(3, coupling_map=((1, 0), (1, 2)))
        assert t.coupled(0, 1) and t.coupled(1, 0) and not t.coupled(0, 2)

    def test_trotter_step_transpiles(self):
        g = make_grid(3, 0, 4)
        v = np.zeros(8)
        v[2:4] = v[6:] = -6
        c = trotter_step_circuit(g, decompose_diagonal(v), 1.0, 0.0625)
        np.testing.assert_allclose(circuit_unitary(transpile(c)), circuit_unitary(c), atol=1e-10)


class TestDepth:
    def test_empty(self):
        assert depth(Circuit(3)) == 0

    def test_serial(self):
        assert depth(Circuit(1, tuple(h(0) for _ in range(7)))) == 7

    def test_parallel(self):
        assert depth(Circuit(2, (h(0), h(1)))) == 1

    def test_global_phase_free(self):
        assert depth(Circuit(2, (global_phase(1.0), h(0), global_phase(2.0)))) == 1

    def test_two_qubit_chain(self):
        c = Circuit(3, (h(0), cnot(0, 1), h(2), cnot(1, 2), sx(0)))
        assert depth(c) == 3

    def test_gate_counts(self):
        c = Circuit(2, (h(0), h(1), cnot(0, 1), phase(0.1, 0)))
        assert gate_counts(c) == {"H": 2, "CNOT": 1, "PHASE": 1}
