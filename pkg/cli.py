"""
Floquet Invariants — Command Line
Subcommands over the orchestrator with machine-readable output.

Usage:
    python cli.py invariants --graph kagome --max-n 3 --json
    python cli.py cycles --graph pendant --max-len 2 --index 1
    python cli.py verify-trace --graph kagome --potential q.pot --csv out.csv
    python cli.py isospectral --graph pendant --q1 zero --q2 "-2 2" --mode periodic
    python cli.py builtin zd 3,3 --emit zd33.graph
    python cli.py zd-fourier --p 3,3 --potential q.pot
    python cli.py inspect --graph kagome

Exit codes: 0 success / isospectral, 1 not isospectral, 2 input error,
3 verification failure.
"""

import argparse
import csv
import json
import logging
import os
import sys
from typing import List, Optional, Sequence

# ─── Add this dir to path for flat imports ───────────────────────────────
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from models import (
    DEFAULT_SEED, GRID_POINTS, LENGTH_CAP, LOG_LEVEL, RANDOM_SAMPLES, TOLERANCE,
    VerificationReport,
)
from orchestrator import SpectralOrchestrator
from polynomial import PotentialPolynomial

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT_ERROR = 2
EXIT_VERIFICATION_FAILED = 3


# ══════════════════════════════════════════════════════════════════════════════
# ARGUMENTS
# ══════════════════════════════════════════════════════════════════════════════

def _index_arg(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"index must be comma-separated integers, got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Emit JSON instead of text")
    common.add_argument("--max-n", type=int, default=None, help="Maximal invariant order (default: vertex count)")
    common.add_argument("--cap", type=int, default=LENGTH_CAP, help="Cycle length / order cap")

    parser = argparse.ArgumentParser(
        prog="floquet-invariants",
        description="Floquet and periodic spectral invariants of periodic Schrödinger operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", parents=[common], help="Invariant table I_n^m as exact polynomials")
    p.add_argument("--graph", required=True, help="Builtin name, graph file or inline graph text")
    p.add_argument("--potential", default=None, help="Evaluate the table at this potential")
    p.add_argument("--index", type=_index_arg, action="append", default=None,
                   help="Primitive index m for the linear/quadratic invariants (repeatable)")

    p = sub.add_parser("cycles", parents=[common], help="Prime cycles of the modified graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-len", type=int, default=None, help="Maximal cycle length (default: --max-n or 4)")
    p.add_argument("--index", type=_index_arg, default=None, help="Only cycles with this index")
    p.add_argument("--base", action="store_true", help="Cycles of the fundamental graph instead")

    p = sub.add_parser("verify-trace", parents=[common], help="Check the trace formula numerically")
    p.add_argument("--graph", required=True)
    p.add_argument("--potential", default=None, help="Potential file (default: the graph file's potential)")
    p.add_argument("--grid", type=int, default=GRID_POINTS)
    p.add_argument("--samples", type=int, default=RANDOM_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--tol", type=float, default=TOLERANCE)
    p.add_argument("--csv", default=None, help="Write every sample to this CSV file")

    p = sub.add_parser("isospectral", parents=[common], help="Decide isospectrality of two potentials")
    p.add_argument("--graph", required=True)
    p.add_argument("--q1", required=True)
    p.add_argument("--q2", required=True)
    p.add_argument("--mode", choices=["floquet", "periodic"], default="floquet")

    p = sub.add_parser("builtin", parents=[common], help="Print or write a builtin graph file")
    p.add_argument("name", nargs="+", help="cycle N | pendant | kagome | zd P1,...,Pd")
    p.add_argument("--emit", default=None, help="Write the graph file here")

    p = sub.add_parser("zd-fourier", parents=[common], help="Z^d invariants: closed forms vs Fourier forms")
    p.add_argument("--p", required=True, help="Periods, e.g. 3,3")
    p.add_argument("--potential", required=True)
    p.add_argument("--tol", type=float, default=TOLERANCE)

    p = sub.add_parser("inspect", parents=[common], help="Structural facts about a graph")
    p.add_argument("--graph", required=True)

    return parser


# ══════════════════════════════════════════════════════════════════════════════
# OUTPUT
# ══════════════════════════════════════════════════════════════════════════════

def _emit_json(result: dict):
    payload = {k: v for k, v in result.items() if k != "report"}
    print(json.dumps(payload, sort_keys=True, indent=2))


def _fail(result: dict) -> int:
    print(f"error: {result['error']}", file=sys.stderr)
    return EXIT_INPUT_ERROR


def _format_index(m: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in m) + ")"


def _poly_text(records: List[dict]) -> str:
    if not records:
        return "0"
    nu = len(records[0]["exps"])
    return str(PotentialPolynomial.from_json(nu, records))


def write_csv(path: str, report: VerificationReport, dim: int):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["n"] + [f"k{j + 1}" for j in range(dim)]
                        + ["lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"])
        for s in report.samples:
            writer.writerow(
                [s.n] + [repr(x) for x in s.k]
                + [repr(s.lhs.real), repr(s.lhs.imag), repr(s.rhs.real), repr(s.rhs.imag), repr(s.residual)]
            )


# ══════════════════════════════════════════════════════════════════════════════
# COMMANDS
# ══════════════════════════════════════════════════════════════════════════════

def cmd_invariants(orch: SpectralOrchestrator, args) -> int:
    result = orch.compute_invariants(args.graph, args.max_n, potential=args.potential, indices=args.index)
    if not result["success"]:
        return _fail(result)
    if args.json:
        _emit_json(result)
        return EXIT_OK
    for entry in result["entries"]:
        print(f"I_{entry['n']}^{_format_index(entry['m'])} = {_poly_text(entry['poly'])}")
    for entry in result["marginals"]:
        print(f"I_{entry['n']} = {_poly_text(entry['poly'])}")
    for value in result.get("values", []):
        print(f"I_{value['n']}^{_format_index(value['m'])}(Q) = {value['value']}")
    for value in result.get("periodic_values", []):
        print(f"I_{value['n']}(Q) = {value['value']}")
    for lq in result.get("linear_quadratic", []):
        print(f"n({_format_index(lq['m'])}) = {lq['shortest_length']}, bipartite={lq['bipartite']}")
        print(f"  I_{lq['linear']['n']}^{_format_index(lq['m'])} = {_poly_text(lq['linear']['poly'])}")
        print(f"  I_{lq['quadratic']['n']}^{_format_index(lq['m'])} = {_poly_text(lq['quadratic']['poly'])}")
    return EXIT_OK


def cmd_cycles(orch: SpectralOrchestrator, args) -> int:
    max_len = args.max_len or args.max_n or 4
    result = orch.list_cycles(args.graph, max_len, index=args.index, base=args.base)
    if not result["success"]:
        return _fail(result)
    if args.json:
        print(json.dumps(result["cycles"], sort_keys=True, indent=2))
        return EXIT_OK
    for c in result["cycles"]:
        edges = "[" + ",".join(str(e) for e in c["edges"]) + "]"
        print(f"{edges} {c['length']} {_format_index(c['index'])} {c['weight']}")
    return EXIT_OK


def cmd_verify_trace(orch: SpectralOrchestrator, args) -> int:
    result = orch.verify_trace(args.graph, args.potential, max_n=args.max_n, grid=args.grid,
                               samples=args.samples, seed=args.seed, tol=args.tol)
    if not result["success"]:
        return _fail(result)
    if args.csv:
        write_csv(args.csv, result["report"], result["dim"])
    if args.json:
        _emit_json(result)
    else:
        status = "PASS" if result["passed"] else "FAIL"
        print(f"{status}: {result['samples']} samples, n <= {result['max_n']}, "
              f"max residual {result['max_residual']:.3e} (tolerance {result['tolerance']:g} relative)")
    return EXIT_OK if result["passed"] else EXIT_VERIFICATION_FAILED


def cmd_isospectral(orch: SpectralOrchestrator, args) -> int:
    result = orch.check_isospectral(args.graph, args.q1, args.q2, args.mode)
    if not result["success"]:
        return _fail(result)
    _emit_json(result)
    return EXIT_OK if result["isospectral"] else EXIT_FALSE


def cmd_builtin(orch: SpectralOrchestrator, args) -> int:
    name = " ".join(args.name)
    result = orch.emit_builtin(name)
    if not result["success"]:
        return _fail(result)
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as f:
            f.write(result["graph"])
        logger.info(f"Wrote builtin '{name}' to {args.emit}")
    if args.json:
        _emit_json(result)
    elif not args.emit:
        sys.stdout.write(result["graph"])
    return EXIT_OK


def cmd_zd_fourier(orch: SpectralOrchestrator, args) -> int:
    orch.tolerance = args.tol
    result = orch.zd_fourier(args.p, args.potential)
    if not result["success"]:
        return _fail(result)
    if args.json:
        _emit_json(result)
    else:
        print(f"I1: direct {result['I1']['direct']}, fourier {result['I1']['fourier']:.12g}")
        print(f"I2: direct {result['I2']['direct']}, fourier {result['I2']['fourier']:.12g}")
        print(f"I3: direct {result['I3']['direct']}")
        for axis in result["axes"]:
            print(f"I_{axis['order']}^e{axis['axis'] + 1}: direct {axis['direct']}, "
                  f"fourier {axis['fourier']:.12g}, residual {axis['residual']:.3e}")
        print(f"max residual {result['max_residual']:.3e}")
    return EXIT_OK if result["passed"] else EXIT_VERIFICATION_FAILED


def cmd_inspect(orch: SpectralOrchestrator, args) -> int:
    result = orch.inspect_graph(args.graph)
    if not result["success"]:
        return _fail(result)
    if args.json:
        _emit_json(result)
        return EXIT_OK
    summary = result["summary"]
    for key in sorted(summary):
        if key != "rank":
            print(f"{key}: {summary[key]}")
    rank = summary["rank"]
    print(f"index lattice: rank {rank['rank']}, index {rank['lattice_index']}, full={rank['full_rank']}")
    return EXIT_OK


COMMANDS = {
    "invariants": cmd_invariants,
    "cycles": cmd_cycles,
    "verify-trace": cmd_verify_trace,
    "isospectral": cmd_isospectral,
    "builtin": cmd_builtin,
    "zd-fourier": cmd_zd_fourier,
    "inspect": cmd_inspect,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, dispatch, and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT_ERROR
    if args.cap < 1:
        print("error: --cap must be positive", file=sys.stderr)
        return EXIT_INPUT_ERROR

    orch = SpectralOrchestrator(cap=args.cap)
    try:
        return COMMANDS[args.command](orch, args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def main():
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL, logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    sys.exit(run())


if __name__ == "__main__":
    main()
