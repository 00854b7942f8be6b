"""Split-operator time evolution over three interchangeable backends.

Every backend applies one step as: potential phase exp(-i V dt) first, then the
kinetic propagator QFT^-1 exp(-i T dt) QFT.

CIRCUIT        compiled gate circuit run on the statevector simulator
DENSE_TROTTER  explicit step matrix built from the analytic DFT matrix
FFT_ORACLE     pointwise phases and numpy FFTs
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.linalg

from .circuit.ir import Circuit
from .circuit.library import dense_hamiltonian, trotter_step_circuit
from .grid import ObservableSnapshot, SpatialGrid, WavePacket
from .pauli import decompose_diagonal
from .sim import NoiseSpec, StateVector, run_circuit, run_circuit_noisy, sample_shots

AMU_IN_ELECTRON_MASSES = 1822.888486


class Backend(str, enum.Enum):
    CIRCUIT = "circuit"
    DENSE_TROTTER = "dense"
    FFT_ORACLE = "fft"


@dataclass(frozen=True)
class PropagationPlan:
    grid: SpatialGrid
    potential: np.ndarray
    mu_au: float
    dt_au: float
    n_steps: int
    backend: Backend = Backend.CIRCUIT
    noise: Optional[NoiseSpec] = None
    shots: Optional[int] = None
    trajectories: int = 1
    shot_seed: int = 0
    track_right_well: bool = False

    def __post_init__(self):
        v = np.array(self.potential, dtype=float)
        if v.shape != (self.grid.m_points,):
            raise ValueError(f"potential has shape {v.shape}, grid needs ({self.grid.m_points},)")
        if not np.all(np.isfinite(v)):
            raise ValueError("potential contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "potential", v)
        object.__setattr__(self, "backend", Backend(self.backend))
        if not self.mu_au > 0:
            raise ValueError("mass must be positive")
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if self.trajectories < 1:
            raise ValueError("trajectories must be >= 1")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.backend is not Backend.CIRCUIT and (self.noisy or self.shots):
            raise ValueError("noise and shot sampling need the circuit backend")

    @classmethod
    def from_amu(cls, grid: SpatialGrid, potential, mu_amu: float, dt_au: float,
                 n_steps: int, **kw) -> "PropagationPlan":
        return cls(grid, potential, mu_amu * AMU_IN_ELECTRON_MASSES, dt_au, n_steps, **kw)

    @property
    def noisy(self) -> bool:
        return self.noise is not None and not self.noise.is_noiseless

    @property
    def t_fin(self) -> float:
        return self.n_steps * self.dt_au

    def with_backend(self, backend: Backend) -> "PropagationPlan":
        return replace(self, backend=Backend(backend))


# --- step operators ------------------------------------------------------------

def step_circuit(plan: PropagationPlan, dt: Optional[float] = None) -> Circuit:
    dt = plan.dt_au if dt is None else dt
    return trotter_step_circuit(plan.grid, decompose_diagonal(plan.potential), plan.mu_au, dt)


def dft_matrix(m_points: int) -> np.ndarray:
    j = np.arange(m_points)
    return np.exp(2j * np.pi * np.outer(j, j) / m_points) / math.sqrt(m_points)


def dense_step_matrix(plan: PropagationPlan, dt: Optional[float] = None) -> np.ndarray:
    dt = plan.dt_au if dt is None else dt
    f = dft_matrix(plan.grid.m_points)
    kin = f.conj().T @ np.diag(np.exp(-1j * plan.grid.kinetic_diagonal(plan.mu_au) * dt)) @ f
    return kin @ np.diag(np.exp(-1j * plan.potential * dt))


def _fft_step(psi: np.ndarray, v_phase: np.ndarray, t_phase: np.ndarray) -> np.ndarray:
    # forward QFT convention exp(+2 pi i jk/M) is ifft up to normalization
    return np.fft.fft(t_phase * np.fft.ifft(v_phase * psi))


def evolve_amplitudes(plan: PropagationPlan, initial: WavePacket) -> list[np.ndarray]:
    """Noise-free amplitude after each step (length n_steps + 1)."""
    if plan.noisy or plan.shots:
        raise ValueError("amplitude series is only defined for noise-free, shot-free plans")
    _check_initial(plan, initial)
    psi = np.array(initial.amplitudes)
    out = [psi.copy()]
    if plan.backend is Backend.CIRCUIT:
        circ = step_circuit(plan)
        state = StateVector(plan.grid.n_qubits, psi)
        for _ in range(plan.n_steps):
            state = run_circuit(state, circ)
            out.append(np.array(state.amplitudes))
    elif plan.backend is Backend.DENSE_TROTTER:
        u = dense_step_matrix(plan)
        for _ in range(plan.n_steps):
            psi = u @ psi
            out.append(psi.copy())
    else:
        v_phase = np.exp(-1j * plan.potential * plan.dt_au)
        t_phase = np.exp(-1j * plan.grid.kinetic_diagonal(plan.mu_au) * plan.dt_au)
        for _ in range(plan.n_steps):
            psi = _fft_step(psi, v_phase, t_phase)
            out.append(psi.copy())
    return out


def _check_initial(plan: PropagationPlan, initial: WavePacket) -> None:
    if initial.grid.m_points != plan.grid.m_points:
        raise ValueError("initial packet and plan use different grids")
    if abs(initial.norm - 1.0) > 1e-10:
        raise ValueError(f"initial packet not normalized (norm {initial.norm})")


def _noisy_densities(plan: PropagationPlan, initial: WavePacket) -> list[np.ndarray]:
    circ = step_circuit(plan)
    rng = np.random.default_rng(plan.noise.seed)
    n = plan.grid.n_qubits
    acc = np.zeros((plan.n_steps + 1, plan.grid.m_points))
    for _ in range(plan.trajectories):
        state = StateVector(n, initial.amplitudes)
        acc[0] += state.probabilities
        for k in range(1, plan.n_steps + 1):
            state = run_circuit_noisy(state, circ, plan.noise, rng=rng)
            acc[k] += state.probabilities
    return list(acc / plan.trajectories)


def propagate(plan: PropagationPlan, initial: WavePacket) -> list[ObservableSnapshot]:
    """Snapshots at t = 0, dt, ..., n_steps * dt.

    With ``shots`` set, each post-step density is the empirical histogram of
    that many samples (seeded by ``shot_seed + step``).
    """
    _check_initial(plan, initial)
    if plan.noisy:
        densities = _noisy_densities(plan, initial)
    else:
        clean = replace(plan, shots=None)
        densities = [np.abs(a) ** 2 for a in evolve_amplitudes(clean, initial)]
    if plan.shots:
        n = plan.grid.n_qubits
        densities = [
            d if k == 0 else sample_shots(
                StateVector(n, np.sqrt(d)), plan.shots, plan.shot_seed + k
            ).frequencies(plan.grid.m_points)
            for k, d in enumerate(densities)
        ]
    return [
        ObservableSnapshot.from_density(k, k * plan.dt_au, plan.grid, d, plan.track_right_well)
        for k, d in enumerate(densities)
    ]


# --- cross-checks ----------------------------------------------------------------

def phase_aligned_deviation(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - e^{i phi} b| with phi chosen to align the global phase."""
    overlap = np.vdot(b, a)
    ph = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(a - ph * b)))


@dataclass(frozen=True)
class BackendComparison:
    circuit_vs_dense: tuple[float, ...]
    dense_vs_fft: tuple[float, ...]

    @property
    def max_deviation(self) -> float:
        return max(self.circuit_vs_dense + self.dense_vs_fft)


def compare_backends(plan: PropagationPlan, initial: WavePacket) -> BackendComparison:
    if plan.noisy or plan.shots:
        raise ValueError("backend comparison needs a noise-free, shot-free plan")
    runs = {b: evolve_amplitudes(plan.with_backend(b), initial) for b in Backend}
    cd = tuple(phase_aligned_deviation(a, b) for a, b in
               zip(runs[Backend.CIRCUIT], runs[Backend.DENSE_TROTTER]))
    df = tuple(phase_aligned_deviation(a, b) for a, b in
               zip(runs[Backend.DENSE_TROTTER], runs[Backend.FFT_ORACLE]))
    return BackendComparison(cd, df)


def exact_propagator(plan: PropagationPlan, t: Optional[float] = None) -> np.ndarray:
    """exp(-i H t) by dense matrix exponential (reference for Trotter error)."""
    t = plan.t_fin if t is None else t
    return scipy.linalg.expm(-1j * t * dense_hamiltonian(plan.grid, plan.potential, plan.mu_au))


@dataclass(frozen=True)
class ConvergenceRow:
    n_steps: int
    dt: float
    error: float


def trotter_convergence(plan: PropagationPlan, initial: WavePacket,
                        exact_reference: Optional[np.ndarray] = None,
                        levels: int = 4) -> list[ConvergenceRow]:
    """Final-state 2-norm error vs exact evolution, halving dt at fixed t_fin."""
    if plan.grid.n_qubits > 6:
        raise ValueError("dense reference limited to 6 qubits")
    if exact_reference is None:
        exact_reference = exact_propagator(plan)
    target = exact_reference @ initial.amplitudes
    rows = []
    for lvl in range(levels):
        steps = plan.n_steps * 2 ** lvl
        sub = replace(plan, n_steps=steps, dt_au=plan.t_fin / steps, noise=None, shots=None)
        final = evolve_amplitudes(sub, initial)[-1]
        rows.append(ConvergenceRow(steps, sub.dt_au, float(np.linalg.norm(final - target))))
    return rows
