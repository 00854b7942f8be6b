"""The three benchmark scenarios, config files, and the depth-scaling report.

Config files are flat ``key = value`` lines; ``#`` starts a comment. Keys are
the ScenarioConfig field names. Masses carry a unit: ``mass_unit = amu`` (atomic
mass units, 1822.888486 electron masses) or ``mass_unit = electron``.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, TextIO

import numpy as np

from .circuit.library import dense_hamiltonian, full_hamiltonian_step_circuit, trotter_step_circuit
from .circuit.metrics import depth
from .circuit.transpile import TranspileTarget, transpile
from .grid import SpatialGrid, init_step_packet, make_grid, resample_to_common_grid, write_snapshots_csv
from .pauli import decompose_diagonal
from .propagator import AMU_IN_ELECTRON_MASSES, Backend, PropagationPlan, propagate
from .sim import NoiseSpec

log = logging.getLogger(__name__)

COMMON_GRID_POINTS = 32
DEFAULT_STEPS = 8


class ScenarioKind(str, enum.Enum):
    FREE_PARTICLE = "free"
    TUNNELING = "tunneling"
    HARMONIC = "harmonic"

    @classmethod
    def parse(cls, text: str) -> "ScenarioKind":
        t = text.strip().lower().replace("-", "_")
        aliases = {"free": cls.FREE_PARTICLE, "free_particle": cls.FREE_PARTICLE,
                   "tunneling": cls.TUNNELING, "tunnelling": cls.TUNNELING,
                   "harmonic": cls.HARMONIC}
        if t not in aliases:
            raise ValueError(f"unknown scenario {text!r}")
        return aliases[t]


class MassUnit(str, enum.Enum):
    AMU = "amu"
    ELECTRON = "electron"


@dataclass(frozen=True)
class ScenarioConfig:
    kind: ScenarioKind
    n_qubits: int
    r_min: float
    r_max: float
    mu: float
    mass_unit: MassUnit
    dt_au: float
    n_steps: int = DEFAULT_STEPS
    v_min: float = 0.0
    omega: float = 0.0
    r_eq: float = 0.0
    backend: Backend = Backend.CIRCUIT
    noise_p1: float = 0.0
    noise_p2: float = 0.0
    trajectories: int = 1
    shots: Optional[int] = None
    seed: int = 0
    output: Optional[str] = None
    common_grid: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        object.__setattr__(self, "mass_unit", MassUnit(self.mass_unit))
        object.__setattr__(self, "backend", Backend(self.backend))
        if not self.mu > 0:
            raise ValueError("mass must be positive")
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")

    @property
    def mu_au(self) -> float:
        """Mass in electron masses; the only place the amu conversion happens."""
        if self.mass_unit is MassUnit.AMU:
            return self.mu * AMU_IN_ELECTRON_MASSES
        return self.mu

    @property
    def t_fin(self) -> float:
        return self.n_steps * self.dt_au

    @property
    def noise(self) -> Optional[NoiseSpec]:
        if self.noise_p1 == 0.0 and self.noise_p2 == 0.0:
            return None
        return NoiseSpec(self.noise_p1, self.noise_p2, self.seed)

    def grid(self) -> SpatialGrid:
        return make_grid(self.n_qubits, self.r_min, self.r_max)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def default_config(kind, n_qubits: int) -> ScenarioConfig:
    kind = ScenarioKind(kind)
    if not 2 <= n_qubits <= 5:
        log.warning("%d qubits is outside the benchmarked range 2..5", n_qubits)
    if kind is ScenarioKind.FREE_PARTICLE:
        # OH reduced mass
        return ScenarioConfig(kind, n_qubits, 0.0, 5.0, mu=0.9412, mass_unit=MassUnit.AMU,
                              dt_au=125.0)
    if kind is ScenarioKind.TUNNELING:
        return ScenarioConfig(kind, n_qubits, 0.0, 4.0, mu=1.0, mass_unit=MassUnit.ELECTRON,
                              dt_au=0.0625, v_min=-6.0)
    return ScenarioConfig(kind, n_qubits, 0.0, 3.0, mu=1.0, mass_unit=MassUnit.ELECTRON,
                          dt_au=0.1625, omega=1.0, r_eq=1.5)


def build_potential(config: ScenarioConfig, grid: Optional[SpatialGrid] = None) -> np.ndarray:
    """Potential in Hartree at every grid point."""
    grid = config.grid() if grid is None else grid
    m = grid.m_points
    if config.kind is ScenarioKind.FREE_PARTICLE:
        return np.zeros(m)
    if config.kind is ScenarioKind.TUNNELING:
        v = np.zeros(m)
        v[m // 4 : m // 2] = config.v_min
        v[3 * m // 4 :] = config.v_min
        return v
    return 0.5 * config.mu_au * config.omega ** 2 * (grid.points - config.r_eq) ** 2


def make_plan(config: ScenarioConfig) -> PropagationPlan:
    grid = config.grid()
    return PropagationPlan(
        grid=grid,
        potential=build_potential(config, grid),
        mu_au=config.mu_au,
        dt_au=config.dt_au,
        n_steps=config.n_steps,
        backend=config.backend,
        noise=config.noise,
        shots=config.shots,
        trajectories=config.trajectories,
        shot_seed=config.seed,
        track_right_well=config.kind is ScenarioKind.TUNNELING,
    )


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    snapshots: list
    files: list = field(default_factory=list)

    def series(self, attr: str) -> np.ndarray:
        return np.array([getattr(s, attr) for s in self.snapshots], dtype=float)


def write_common_grid_csv(snapshots, fh: TextIO, target_m: int = COMMON_GRID_POINTS) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["step", "time"] + [f"c{i}" for i in range(target_m)])
    for s in snapshots:
        w.writerow([s.step_index, f"{s.time:.12g}"] +
                   [f"{x:.12g}" for x in resample_to_common_grid(s.density, target_m)])


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Propagate the scenario; write CSV output when ``config.output`` is set.

    The common-grid file goes next to the snapshot file with a ``.common32``
    suffix before the extension.
    """
    plan = make_plan(config)
    snaps = propagate(plan, init_step_packet(plan.grid))
    result = ScenarioResult(config, snaps)
    if config.output:
        out = Path(config.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", newline="") as fh:
            write_snapshots_csv(snaps, fh)
        result.files.append(out)
        if config.common_grid:
            cg = out.with_name(f"{out.stem}.common{COMMON_GRID_POINTS}{out.suffix or '.csv'}")
            with cg.open("w", newline="") as fh:
                write_common_grid_csv(snaps, fh)
            result.files.append(cg)
    return result


# --- config files --------------------------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key == "kind":
        return ScenarioKind.parse(raw)
    if key == "mass_unit":
        return MassUnit(raw.lower())
    if key == "backend":
        return Backend(raw.lower())
    if key in ("n_qubits", "n_steps", "seed", "trajectories"):
        return int(raw)
    if key == "shots":
        return None if raw.lower() in ("", "none") else int(raw)
    if key == "output":
        return None if raw.lower() in ("", "none") else raw
    if key == "common_grid":
        if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"bad boolean {raw!r} for common_grid")
        return raw.lower() in ("true", "1", "yes")
    return float(raw)


def parse_config_text(text: str, overrides: Optional[dict] = None) -> ScenarioConfig:
    """Parse ``key = value`` lines; unset keys fall back to the scenario defaults."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip()
        if not sep or key not in _FIELD_TYPES:
            raise ValueError(f"line {lineno}: expected 'key = value' with a known key, got {line!r}")
        values[key] = _coerce(key, raw)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if "kind" not in values:
        raise ValueError("config must set 'kind'")
    base = default_config(values["kind"], values.get("n_qubits", 5))
    return base.replace(**values)


def load_config(path, overrides: Optional[dict] = None) -> ScenarioConfig:
    return parse_config_text(Path(path).read_text(), overrides)


def format_config(config: ScenarioConfig) -> str:
    buf = io.StringIO()
    for f in dataclasses.fields(config):
        v = getattr(config, f.name)
        if isinstance(v, enum.Enum):
            v = v.value
        elif v is None:
            v = "none"
        elif isinstance(v, float):
            v = repr(v)
        buf.write(f"{f.name} = {v}\n")
    return buf.getvalue()


# --- depth report ----------------------------------------------------------------

@dataclass(frozen=True)
class DepthRow:
    n_qubits: int
    depth_full: int
    depth_diagonal_qft: int

    @property
    def ratio(self) -> float:
        return self.depth_full / self.depth_diagonal_qft


def depth_report(n_min: int = 2, n_max: int = 6, target_factory=TranspileTarget.linear,
                 scenario_kind=ScenarioKind.HARMONIC) -> list[DepthRow]:
    """Transpiled depth of one time step: full Pauli expansion vs Z strings + QFT."""
    if n_max > 7:
        raise ValueError("full decomposition limited to 7 qubits")
    rows = []
    for n in range(n_min, n_max + 1):
        cfg = default_config(scenario_kind, n)
        grid = cfg.grid()
        v = build_potential(cfg, grid)
        target = target_factory(n)
        ours = trotter_step_circuit(grid, decompose_diagonal(v), cfg.mu_au, cfg.dt_au)
        full = full_hamiltonian_step_circuit(dense_hamiltonian(grid, v, cfg.mu_au), cfg.dt_au)
        rows.append(DepthRow(n, depth(transpile(full, target)), depth(transpile(ours, target))))
    return rows


def write_depth_report(rows: Iterable[DepthRow], fh: TextIO, scenario_kind=ScenarioKind.HARMONIC,
                       target_name: str = "heron-like") -> None:
    kind = ScenarioKind(scenario_kind)
    fh.write(f"# hamiltonian={kind.value} (default scenario parameters, dt = scenario default)\n")
    fh.write(f"# target={target_name} basis=CZ,RZ,SX,X coupling=linear-chain\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "depth_full", "depth_diagonal_qft", "ratio"])
    for r in rows:
        w.writerow([r.n_qubits, r.depth_full, r.depth_diagonal_qft, f"{r.ratio:.6g}"])


def is_nondecreasing(xs) -> bool:
    return all(b >= a for a, b in zip(xs, xs[1:]))


def direction_reversals(series, atol: float = 1e-12) -> int:
    """Sign changes of the first difference, ignoring flat segments."""
    d = np.diff(np.asarray(series, dtype=float))
    s = np.sign(d[np.abs(d) > atol])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def total_variation(p, q) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))


__all__ = [
    "ScenarioKind", "MassUnit", "ScenarioConfig", "ScenarioResult", "DepthRow",
    "default_config", "build_potential", "make_plan", "run_scenario", "depth_report",
    "write_depth_report", "parse_config_text", "load_config", "format_config",
    "write_common_grid_csv", "direction_reversals", "is_nondecreasing", "total_variation",
]
