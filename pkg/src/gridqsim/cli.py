"""Command-line entry point.

Exit codes: 0 success, 1 usage/config/IO error, 2 numerical-validation failure.
"""
from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .circuit.ir import dump_circuit
from .circuit.transpile import TranspileTarget, transpile
from .grid import init_step_packet, write_snapshots_csv
from .pauli import decompose_diagonal, write_decomposition
from .propagator import Backend, compare_backends, step_circuit
from .scenarios import (
    ScenarioKind,
    build_potential,
    default_config,
    depth_report,
    load_config,
    make_plan,
    run_scenario,
    write_depth_report,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
NORM_TOL = 1e-10
BACKEND_TOL = 1e-9
DEFAULT_SHOTS = 8192

log = logging.getLogger("gridqsim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value scenario file")
    p.add_argument("--scenario", type=ScenarioKind.parse, default=None,
                   help="free | tunneling | harmonic")
    p.add_argument("--qubits", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--steps", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridqsim", description="Split-operator wave-packet circuits.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="propagate a scenario and write observables CSV")
    _scenario_args(run)
    run.add_argument("--backend", type=Backend, choices=list(Backend))
    run.add_argument("--shots", nargs="?", type=int, const=DEFAULT_SHOTS,
                     help=f"sample densities from shots (default count {DEFAULT_SHOTS})")
    run.add_argument("--noise-p1", type=float)
    run.add_argument("--noise-p2", type=float)
    run.add_argument("--trajectories", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=Path)
    run.add_argument("--common-grid", action="store_true", default=None,
                     help="also write densities resampled to 32 points")

    dr = sub.add_parser("depth-report", help="transpiled depth: full Pauli vs Z strings + QFT")
    dr.add_argument("--scenario", type=ScenarioKind.parse, default=ScenarioKind.HARMONIC)
    dr.add_argument("--n-min", type=int, default=2)
    dr.add_argument("--n-max", type=int, default=6)
    dr.add_argument("--out", type=Path)

    dec = sub.add_parser("decompose", help="Z-string table of a scenario potential")
    _scenario_args(dec)
    dec.add_argument("--kinetic", action="store_true", help="decompose the kinetic diagonal instead")
    dec.add_argument("--out", type=Path)

    em = sub.add_parser("emit-circuit", help="one Trotter step in text form")
    _scenario_args(em)
    em.add_argument("--transpile", action="store_true")
    em.add_argument("--out", type=Path)

    cmp_ = sub.add_parser("compare", help="cross-check circuit, dense and FFT backends")
    _scenario_args(cmp_)
    cmp_.add_argument("--out", type=Path)
    return parser


def _config_from(args):
    overrides = {
        "kind": args.scenario, "n_qubits": args.qubits, "dt_au": args.dt, "n_steps": args.steps,
    }
    for key, attr in [("backend", "backend"), ("shots", "shots"), ("noise_p1", "noise_p1"),
                      ("noise_p2", "noise_p2"), ("trajectories", "trajectories"),
                      ("seed", "seed"), ("common_grid", "common_grid")]:
        overrides[key] = getattr(args, attr, None)
    if getattr(args, "out", None) is not None and args.command == "run":
        overrides["output"] = str(args.out)
    if args.config is not None:
        return load_config(args.config, overrides)
    if args.scenario is None:
        raise UsageError("either --scenario or --config is required")
    base = default_config(args.scenario, args.qubits or 5)
    return base.replace(**{k: v for k, v in overrides.items() if v is not None})


@contextlib.contextmanager
def _output(path: Optional[Path]):
    if path is None:
        yield sys.stdout
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            yield fh


def _cmd_run(args) -> int:
    cfg = _config_from(args)
    res = run_scenario(cfg)
    if cfg.output is None:
        write_snapshots_csv(res.snapshots, sys.stdout)
    for f in res.files:
        log.info("wrote %s", f)
    if cfg.noise is None and cfg.shots is None:
        drift = max(abs(s.norm - 1.0) for s in res.snapshots)
        if drift > NORM_TOL:
            print(f"norm drift {drift:.3e} exceeds {NORM_TOL:g}", file=sys.stderr)
            return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_depth(args) -> int:
    if args.n_min < 1 or args.n_max < args.n_min:
        raise UsageError("need 1 <= n-min <= n-max")
    rows = depth_report(args.n_min, args.n_max, TranspileTarget.linear, args.scenario)
    with _output(args.out) as fh:
        write_depth_report(rows, fh, args.scenario)
    return EXIT_OK


def _cmd_decompose(args) -> int:
    cfg = _config_from(args)
    grid = cfg.grid()
    values = grid.kinetic_diagonal(cfg.mu_au) if args.kinetic else build_potential(cfg, grid)
    with _output(args.out) as fh:
        write_decomposition(decompose_diagonal(values), fh)
    return EXIT_OK


def _cmd_emit(args) -> int:
    cfg = _config_from(args)
    circ = step_circuit(make_plan(cfg.replace(backend=Backend.CIRCUIT)))
    if args.transpile:
        circ = transpile(circ, TranspileTarget.linear(circ.n_qubits))
    with _output(args.out) as fh:
        dump_circuit(circ, fh)
    return EXIT_OK


def _cmd_compare(args) -> int:
    cfg = _config_from(args)
    plan = make_plan(cfg.replace(noise_p1=0.0, noise_p2=0.0, shots=None))
    cmp_ = compare_backends(plan, init_step_packet(plan.grid))
    with _output(args.out) as fh:
        fh.write("step,circuit_vs_dense,dense_vs_fft\n")
        for k, (a, b) in enumerate(zip(cmp_.circuit_vs_dense, cmp_.dense_vs_fft)):
            fh.write(f"{k},{a:.3e},{b:.3e}\n")
    if not np.isfinite(cmp_.max_deviation) or cmp_.max_deviation >= BACKEND_TOL:
        print(f"backend deviation {cmp_.max_deviation:.3e} exceeds {BACKEND_TOL:g}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run, "depth-report": _cmd_depth, "decompose": _cmd_decompose,
    "emit-circuit": _cmd_emit, "compare": _cmd_compare,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"gridqsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
