"""
Floquet Invariants — Orchestrator
Deterministic front-end logic shared by the CLI and the REST server.

Design: every public method resolves its inputs (builtin names, file paths or
inline text), runs one library operation and returns a plain dict:
- {"success": True, ...} with JSON-ready results
- {"success": False, "error": ..., "error_type": ...} on any SpectralError
"""

import logging
import os
from typing import Iterable, Optional, Sequence, Union

from builtin_graphs import BUILTIN_EXAMPLES, build, builtin_catalogue, is_builtin_name
from cycles import enumerate_prime_cycles
from floquet import is_isospectral, pendant_isospectral_pair, verify_trace_formula
from graph_core import (
    graph_summary, parse_graph_document, parse_potential, parse_value, serialize_graph,
    serialize_potential,
)
from invariants import evaluate, invariant_table, linear_quadratic_invariants
from lattice import make_spec, parse_periods, zd_fourier_comparison
from models import (
    DEFAULT_SEED, GRID_POINTS, LENGTH_CAP, RANDOM_SAMPLES, TOLERANCE,
    CycleKind, FundamentalGraph, GraphFormatError, Potential, SpectralError, SpectrumMode,
)

logger = logging.getLogger(__name__)

PotentialSource = Union[str, Sequence[str], None]


def _failure(error: Exception) -> dict:
    return {"success": False, "error": str(error), "error_type": type(error).__name__}


class SpectralOrchestrator:
    """
    Resolves graph and potential sources and runs invariant computations.

    Holds the effective configuration (length cap, oracle tolerance, sampling)
    so the CLI flags and the server defaults flow through one place.
    """

    def __init__(self, cap: int = LENGTH_CAP, tolerance: float = TOLERANCE,
                 grid: int = GRID_POINTS, samples: int = RANDOM_SAMPLES, seed: int = DEFAULT_SEED):
        self.cap = cap
        self.tolerance = tolerance
        self.grid = grid
        self.samples = samples
        self.seed = seed

    # ── Input resolution ────────────────────────────────────────────────

    def resolve_graph(self, source: str):
        """Return (graph, potential declared in the file or zero)."""
        if is_builtin_name(source):
            graph = build(source)
            return graph, Potential.zero(graph.nu)
        if "\n" not in source and os.path.isfile(source):
            with open(source, encoding="utf-8") as f:
                text = f.read()
        elif "\n" in source or source.lstrip().startswith("dim"):
            text = source
        else:
            raise GraphFormatError(f"'{source}' is neither a builtin graph nor a readable file")
        document = parse_graph_document(text)
        return document.graph, document.potential

    def resolve_potential(self, source: PotentialSource, graph: FundamentalGraph,
                          fallback: Optional[Potential] = None) -> Potential:
        """A potential from a file path, inline potential-file text or a list of value strings."""
        if source is None:
            return fallback if fallback is not None else Potential.zero(graph.nu)
        if isinstance(source, str):
            if source.strip() == "zero":
                return Potential.zero(graph.nu)
            if "\n" not in source and os.path.isfile(source):
                with open(source, encoding="utf-8") as f:
                    return parse_potential(f.read(), graph.nu)
            if "vertices" in source:
                return parse_potential(source, graph.nu)
            source = source.split()
        values = [parse_value(v) for v in source]
        if len(values) != graph.nu:
            raise GraphFormatError(f"expected {graph.nu} potential values, got {len(values)}")
        return Potential.from_values(values)

    # ── Graphs ───────────────────────────────────────────────────────────

    def list_builtins(self) -> dict:
        return {"success": True, "builtins": builtin_catalogue()}

    def emit_builtin(self, name: str) -> dict:
        try:
            graph = build(name)
        except SpectralError as e:
            return _failure(e)
        return {"success": True, "name": name, "graph": serialize_graph(graph)}

    def inspect_graph(self, source: str) -> dict:
        try:
            graph, _ = self.resolve_graph(source)
            return {"success": True, "graph": graph.to_dict(), "summary": graph_summary(graph)}
        except (SpectralError, OSError) as e:
            return _failure(e)

    # ── Invariants ───────────────────────────────────────────────────────

    def compute_invariants(self, source: str, max_n: Optional[int] = None,
                           potential: PotentialSource = None, evaluate_values: bool = False,
                           indices: Optional[Iterable[Sequence[int]]] = None) -> dict:
        """Invariant table up to max_n, optionally evaluated at a potential."""
        try:
            graph, declared = self.resolve_graph(source)
            table = invariant_table(graph, max_n, cap=self.cap)
            result = {"success": True, "graph": graph.to_dict(), **table.to_dict()}
            if evaluate_values or potential is not None:
                q = self.resolve_potential(potential, graph, declared)
                result["potential"] = q.to_dict()
                result["values"] = [
                    {"n": n, "m": list(m), "value": str(evaluate(poly, q))}
                    for (n, m), poly in sorted(table.entries.items())
                ]
                result["periodic_values"] = [
                    {"n": n, "value": str(evaluate(poly, q))} for n, poly in table.marginals.items()
                ]
            if indices:
                result["linear_quadratic"] = [
                    linear_quadratic_invariants(graph, m, cap=self.cap).to_dict() for m in indices
                ]
            return result
        except (SpectralError, OSError) as e:
            return _failure(e)

    def list_cycles(self, source: str, max_len: int, index: Optional[Sequence[int]] = None,
                    base: bool = False) -> dict:
        try:
            graph, _ = self.resolve_graph(source)
            kind = CycleKind.BASE if base else CycleKind.MODIFIED
            cycles = enumerate_prime_cycles(graph, max_len, m=index, kind=kind, cap=self.cap)
            return {"success": True, "count": len(cycles), "cycles": [c.to_dict() for c in cycles]}
        except (SpectralError, OSError) as e:
            return _failure(e)

    # ── Spectra ──────────────────────────────────────────────────────────

    def check_isospectral(self, source: str, q1: PotentialSource, q2: PotentialSource,
                          mode: str = "floquet") -> dict:
        modes = [m.value for m in SpectrumMode]
        if mode not in modes:
            return {"success": False, "error": f"mode must be one of {modes}, got '{mode}'",
                    "error_type": "ValueError"}
        try:
            graph, _ = self.resolve_graph(source)
            p1 = self.resolve_potential(q1, graph)
            p2 = self.resolve_potential(q2, graph)
            result = is_isospectral(graph, p1, p2, SpectrumMode(mode), cap=self.cap)
            return {"success": True, **result.to_dict()}
        except (SpectralError, OSError) as e:
            return _failure(e)

    def pendant_partner(self, potential: PotentialSource) -> dict:
        try:
            graph = build("pendant")
            q = self.resolve_potential(potential, graph)
            first, second = pendant_isospectral_pair(graph, q)
            return {
                "success": True,
                "solutions": [first.to_dict(), second.to_dict()],
                "potential_files": [serialize_potential(first), serialize_potential(second)],
            }
        except (SpectralError, OSError) as e:
            return _failure(e)

    def verify_trace(self, source: str, potential: PotentialSource = None,
                     max_n: Optional[int] = None, grid: Optional[int] = None,
                     samples: Optional[int] = None, seed: Optional[int] = None,
                     tol: Optional[float] = None) -> dict:
        """Trace-formula check; `report` is kept for CSV output and stripped by JSON writers."""
        try:
            graph, declared = self.resolve_graph(source)
            q = self.resolve_potential(potential, graph, declared)
            report = verify_trace_formula(
                graph, q, max_n=max_n,
                grid=self.grid if grid is None else grid,
                samples=self.samples if samples is None else samples,
                seed=self.seed if seed is None else seed,
                tol=self.tolerance if tol is None else tol,
                cap=self.cap,
            )
            return {"success": True, "dim": graph.dim, "potential": q.to_dict(),
                    **report.to_dict(), "report": report}
        except (SpectralError, OSError) as e:
            return _failure(e)

    # ── Z^d ──────────────────────────────────────────────────────────────

    def zd_fourier(self, periods: Union[str, Sequence[int]], potential: PotentialSource) -> dict:
        try:
            spec = parse_periods(periods) if isinstance(periods, str) else make_spec(periods)
            graph = build("zd " + ",".join(str(p) for p in spec.periods))
            q = self.resolve_potential(potential, graph)
            comparison = zd_fourier_comparison(spec, q)
            comparison["passed"] = comparison["max_residual"] <= self.tolerance
            return {"success": True, **comparison}
        except (SpectralError, OSError) as e:
            return _failure(e)

    def status(self) -> dict:
        return {
            "success": True,
            "cap": self.cap,
            "tolerance": self.tolerance,
            "grid": self.grid,
            "samples": self.samples,
            "seed": self.seed,
            "builtins": list(BUILTIN_EXAMPLES),
        }
