"""Spatial grid, wave-packet encoding and position-space observables.

Grid point ``m`` sits at ``r_min + m * delta_r`` with ``delta_r = (r_max - r_min) / M``;
the right endpoint is excluded so the grid is periodic and matches the FFT momentum grid.
Basis index ``m`` is little-endian: qubit 0 is the least significant bit.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

MAX_QUBITS = 24


@dataclass(frozen=True)
class SpatialGrid:
    n_qubits: int
    r_min: float
    r_max: float

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        if not (math.isfinite(self.r_min) and math.isfinite(self.r_max)) or self.r_max <= self.r_min:
            raise ValueError(f"need finite r_max > r_min, got [{self.r_min}, {self.r_max}]")

    @property
    def m_points(self) -> int:
        return 1 << self.n_qubits

    @property
    def delta_r(self) -> float:
        return (self.r_max - self.r_min) / self.m_points

    @property
    def points(self) -> np.ndarray:
        return self.r_min + self.delta_r * np.arange(self.m_points)

    def momenta(self) -> np.ndarray:
        """Momentum for each QFT index; index M/2 takes the negative branch."""
        m = self.m_points
        j = np.arange(m)
        signed = np.where(j < m // 2, j, j - m)
        return 2.0 * np.pi * signed / (m * self.delta_r)

    def kinetic_diagonal(self, mu_au: float) -> np.ndarray:
        """p_j**2 / (2 mu) in Hartree, mass in electron masses."""
        if not mu_au > 0:
            raise ValueError(f"mass must be positive, got {mu_au}")
        return self.momenta() ** 2 / (2.0 * mu_au)


def make_grid(n_qubits: int, r_min: float, r_max: float) -> SpatialGrid:
    return SpatialGrid(int(n_qubits), float(r_min), float(r_max))


@dataclass(frozen=True)
class WavePacket:
    grid: SpatialGrid
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.m_points,):
            raise ValueError(f"expected {self.grid.m_points} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(self.density.sum())

    @classmethod
    def normalized(cls, grid: SpatialGrid, amplitudes) -> "WavePacket":
        amps = np.asarray(amplitudes, dtype=complex)
        nrm = np.linalg.norm(amps)
        if nrm == 0:
            raise ValueError("cannot normalize a zero vector")
        return cls(grid, amps / nrm)


def init_step_packet(grid: SpatialGrid) -> WavePacket:
    """Flat real packet over the second quarter of the grid, M/4 <= m < M/2."""
    if grid.n_qubits < 2:
        raise ValueError("step packet needs at least 2 qubits (M/4 >= 1)")
    m = grid.m_points
    amps = np.zeros(m, dtype=complex)
    amps[m // 4 : m // 2] = 2.0 / math.sqrt(m)
    return WavePacket(grid, amps)


def delta_packet(grid: SpatialGrid, index: int) -> WavePacket:
    amps = np.zeros(grid.m_points, dtype=complex)
    amps[index] = 1.0
    return WavePacket(grid, amps)


# Observables are defined on densities so sampled (shot-based) densities reuse them.

def mean_r_of_density(grid: SpatialGrid, density: np.ndarray) -> float:
    return float(np.dot(grid.points, density))


def sigma_of_density(grid: SpatialGrid, density: np.ndarray) -> float:
    r = grid.points
    mean = np.dot(r, density)
    var = np.dot(r * r, density) - mean * mean
    return math.sqrt(max(float(var), 0.0))


def tunneling_window(m_points: int) -> tuple[int, int]:
    """Index range [lo, hi) of the initial well; fractional bounds are floored (M=4 -> [0, 2))."""
    return m_points // 8, (5 * m_points) // 8


def right_well_of_density(density: np.ndarray) -> float:
    # probability outside the initial well; equals 1 - sum(window) for a normalized density
    lo, hi = tunneling_window(len(density))
    p = float(np.sum(density[:lo]) + np.sum(density[hi:]))
    return min(max(p, 0.0), 1.0)


def expectation_r(psi: WavePacket) -> float:
    return mean_r_of_density(psi.grid, psi.density)


def width_sigma(psi: WavePacket) -> float:
    return sigma_of_density(psi.grid, psi.density)


def right_well_population(psi: WavePacket) -> float:
    return right_well_of_density(psi.density)


def resample_to_common_grid(density: Sequence[float], target_m: int = 32) -> np.ndarray:
    """Split each cell's probability equally among its target_m / M children."""
    density = np.asarray(density, dtype=float)
    m = len(density)
    if m == 0 or m & (m - 1) or target_m < m or target_m % m:
        raise ValueError(f"target size {target_m} is not a multiple of source size {m}")
    factor = target_m // m
    if factor & (factor - 1):
        raise ValueError(f"target/source ratio {factor} is not a power of two")
    return np.repeat(density / factor, factor)


@dataclass(frozen=True)
class ObservableSnapshot:
    step_index: int
    time: float
    mean_r: float
    sigma: float
    norm: float
    right_well_population: Optional[float]
    density: np.ndarray = field(repr=False)

    @classmethod
    def from_density(cls, step_index: int, time: float, grid: SpatialGrid,
                     density: np.ndarray, with_right_well: bool = False) -> "ObservableSnapshot":
        density = np.asarray(density, dtype=float)
        norm = float(density.sum())
        return cls(
            step_index=step_index,
            time=time,
            mean_r=mean_r_of_density(grid, density),
            sigma=sigma_of_density(grid, density),
            norm=norm,
            right_well_population=right_well_of_density(density) if with_right_well else None,
            density=density,
        )


def _fmt(x: Optional[float]) -> str:
    return "NA" if x is None else f"{x:.12g}"


def snapshot_header(m_points: int) -> list[str]:
    return ["step", "time", "mean_r", "sigma", "norm", "right_well_population"] + [
        f"d{i}" for i in range(m_points)
    ]


def write_snapshots_csv(snapshots: Iterable[ObservableSnapshot], fh: TextIO) -> None:
    """One row per snapshot; right_well_population is ``NA`` when not applicable."""
    snapshots = list(snapshots)
    if not snapshots:
        raise ValueError("no snapshots to write")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(snapshot_header(len(snapshots[0].density)))
    for s in snapshots:
        writer.writerow(
            [s.step_index, _fmt(s.time), _fmt(s.mean_r), _fmt(s.sigma), _fmt(s.norm),
             _fmt(s.right_well_population)] + [_fmt(float(d)) for d in s.density]
        )


def read_snapshots_csv(fh: TextIO, grid: SpatialGrid) -> list[ObservableSnapshot]:
    reader = csv.reader(fh)
    header = next(reader)
    if header != snapshot_header(grid.m_points):
        raise ValueError("snapshot CSV header does not match grid size")
    out = []
    for row in reader:
        rw = None if row[5] == "NA" else float(row[5])
        out.append(ObservableSnapshot(
            step_index=int(row[0]), time=float(row[1]), mean_r=float(row[2]),
            sigma=float(row[3]), norm=float(row[4]), right_well_population=rw,
            density=np.array([float(x) for x in row[6:]]),
        ))
    return out
