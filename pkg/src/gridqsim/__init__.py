"""Grid-based wave-packet dynamics compiled to quantum circuits.

A 1D wave function on 2**n grid points is stored in an n-qubit register. The
split-operator step is compiled to Z-string exponentials for the potential and a
QFT-conjugated diagonal for the kinetic energy, then run on a statevector
simulator and checked against dense-matrix and FFT references.
"""
from .grid import (
    ObservableSnapshot,
    SpatialGrid,
    WavePacket,
    expectation_r,
    init_step_packet,
    make_grid,
    resample_to_common_grid,
    right_well_population,
    width_sigma,
)
from .pauli import (
    DiagonalDecomposition,
    GeneralPauliTerm,
    ZStringTerm,
    coefficient_bruteforce,
    decompose_diagonal,
    decompose_full,
    reconstruct_diagonal,
)
from .propagator import Backend, PropagationPlan, compare_backends, propagate, trotter_convergence
from .scenarios import ScenarioConfig, ScenarioKind, default_config, depth_report, run_scenario

__version__ = "0.1.0"
