"""
Floquet Invariants — Floquet Verification
Builds the fiber matrices H(k) = A(k) + Q, checks the trace formula
Tr(H^n(k) - A^n(k)) = sum_m n I_n^m(Q) cos<m, k> numerically, and decides
Floquet / periodic isospectrality exactly through the invariants.
"""

import itertools
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from builtin_graphs import build_pendant
from invariants import closed_path_trace_values, index_representatives, invariant_values
from models import (
    DEFAULT_SEED, GRID_POINTS, RANDOM_SAMPLES, TOLERANCE,
    FloquetMatrix, FundamentalGraph, GraphValidationError, IsospectralResult,
    InvariantError, Potential, SpectrumMode, VerificationReport, VerificationSample, check_cap,
)
from polynomial import ZERO, ComplexRational

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════════
# FLOQUET MATRICES
# ══════════════════════════════════════════════════════════════════════════════

def _check_potential(graph: FundamentalGraph, potential: Potential):
    if potential.nu != graph.nu:
        raise GraphValidationError(f"potential has {potential.nu} values, graph has {graph.nu} vertices")


def build_floquet(graph: FundamentalGraph, potential: Optional[Potential], k: Sequence[float]) -> FloquetMatrix:
    """H(k)[v, u] = sum over edges v -> u of exp(i <tau(e), k>) + Q(v) delta_{vu}; A(k) when potential is None."""
    k = np.asarray(k, dtype=np.float64).reshape(-1)
    if k.shape[0] != graph.dim:
        raise GraphValidationError(f"quasimomentum has {k.shape[0]} components, expected {graph.dim}")
    tails = np.array([e.tail for e in graph.edges], dtype=np.int64)
    heads = np.array([e.head for e in graph.edges], dtype=np.int64)
    indices = np.array([e.index for e in graph.edges], dtype=np.float64).reshape(len(graph.edges), graph.dim)

    entries = np.zeros((graph.nu, graph.nu), dtype=np.complex128)
    np.add.at(entries, (tails, heads), np.exp(1j * (indices @ k)))
    if potential is not None:
        _check_potential(graph, potential)
        entries += np.diag(potential.to_complex_array())
    return FloquetMatrix(k=k, entries=entries)


def trace_power(matrix: FloquetMatrix, n: int) -> complex:
    if n < 1:
        raise ValueError(f"power must be positive, got {n}")
    return trace_powers(matrix, n)[-1]


def trace_powers(matrix: FloquetMatrix, max_n: int) -> List[complex]:
    """[Tr M, Tr M^2, ..., Tr M^max_n] with a running product."""
    traces = []
    power = np.eye(matrix.size, dtype=np.complex128)
    for _ in range(max_n):
        power = power @ matrix.entries
        traces.append(complex(np.trace(power)))
    return traces


def periodic_trace_moments(graph: FundamentalGraph, potential: Potential, max_n: int) -> List[complex]:
    """Tr H(0)^n for n <= max_n; equal moments up to nu mean equal periodic spectra."""
    return trace_powers(build_floquet(graph, potential, np.zeros(graph.dim)), max_n)


# ══════════════════════════════════════════════════════════════════════════════
# TRACE FORMULA ORACLE
# ══════════════════════════════════════════════════════════════════════════════

def quasimomentum_samples(dim: int, grid: int, samples: int, seed: int) -> np.ndarray:
    """Offset uniform grid k_j = -pi + (2 pi / N)(i + 1/3), then seeded uniform random points."""
    axis = -np.pi + (2 * np.pi / grid) * (np.arange(grid) + 1.0 / 3.0) if grid > 0 else np.empty(0)
    points = [np.array(p) for p in itertools.product(axis, repeat=dim)]
    rng = np.random.default_rng(seed)
    points.extend(rng.uniform(-np.pi, np.pi, size=(samples, dim)))
    return np.array(points, dtype=np.float64).reshape(len(points), dim)


def verify_trace_formula(graph: FundamentalGraph, potential: Potential,
                         max_n: Optional[int] = None, grid: Optional[int] = None,
                         samples: Optional[int] = None, seed: Optional[int] = None,
                         tol: Optional[float] = None, cap: Optional[int] = None) -> VerificationReport:
    """Compare matrix traces against the invariant side for every n <= max_n and sampled k."""
    _check_potential(graph, potential)
    max_n = graph.nu if max_n is None else max_n
    check_cap(max_n, cap, "order")
    grid = GRID_POINTS if grid is None else grid
    samples = RANDOM_SAMPLES if samples is None else samples
    seed = DEFAULT_SEED if seed is None else seed
    tol = TOLERANCE if tol is None else tol

    values = closed_path_trace_values(graph, potential, max_n, cap)
    rhs_terms: List[Tuple[np.ndarray, np.ndarray]] = []
    for n in range(1, max_n + 1):
        items = sorted(values[n].items())
        ms = np.array([m for m, _ in items], dtype=np.float64).reshape(len(items), graph.dim)
        ts = np.array([complex(t) for _, t in items], dtype=np.complex128)
        rhs_terms.append((ms, ts))

    ks = quasimomentum_samples(graph.dim, grid, samples, seed)
    per_k = []
    for k in ks:
        with_potential = trace_powers(build_floquet(graph, potential, k), max_n)
        without = trace_powers(build_floquet(graph, None, k), max_n)
        per_k.append([h - a for h, a in zip(with_potential, without)])

    report = VerificationReport(max_n=max_n, tolerance=tol)
    for n in range(1, max_n + 1):
        ms, ts = rhs_terms[n - 1]
        rhs = np.cos(ks @ ms.T) @ ts if len(ts) else np.zeros(len(ks), dtype=np.complex128)
        for i, k in enumerate(ks):
            report.samples.append(VerificationSample(
                n=n, k=tuple(float(x) for x in k), lhs=per_k[i][n - 1], rhs=complex(rhs[i]),
            ))

    if report.passed:
        logger.info(f"Trace formula verified: {len(report.samples)} samples, max residual {report.max_residual:.3e}")
    else:
        logger.warning(
            f"Trace formula FAILED: max residual {report.max_residual:.3e} > {report.threshold:.3e}"
        )
    return report


# ══════════════════════════════════════════════════════════════════════════════
# ISOSPECTRALITY
# ══════════════════════════════════════════════════════════════════════════════

def isospectral_floquet(graph: FundamentalGraph, q1: Potential, q2: Potential,
                        cap: Optional[int] = None) -> IsospectralResult:
    """Equal Floquet spectra iff I_n^m(Q1) = I_n^m(Q2) for all n <= nu and all m."""
    _check_potential(graph, q1)
    _check_potential(graph, q2)
    values_1 = invariant_values(graph, q1, graph.nu, cap)
    values_2 = invariant_values(graph, q2, graph.nu, cap)
    for n in range(1, graph.nu + 1):
        for m in index_representatives(graph, n):
            a = values_1[n].get(m, ZERO)
            b = values_2[n].get(m, ZERO)
            if a != b:
                logger.info(f"Floquet spectra differ: I_{n}^{m} = {a} vs {b}")
                return IsospectralResult(SpectrumMode.FLOQUET, False, n, m, a, b)
    return IsospectralResult(SpectrumMode.FLOQUET, True)


def _periodic_values(graph: FundamentalGraph, potential: Potential, cap: Optional[int]) -> List[ComplexRational]:
    values = invariant_values(graph, potential, graph.nu, cap)
    totals = []
    for n in range(1, graph.nu + 1):
        total = ZERO
        for value in values[n].values():
            total = total + value
        totals.append(total)
    return totals


def isospectral_periodic(graph: FundamentalGraph, q1: Potential, q2: Potential,
                         cap: Optional[int] = None) -> IsospectralResult:
    """Equal periodic spectra iff I_n(Q1) = I_n(Q2) for all n <= nu."""
    _check_potential(graph, q1)
    _check_potential(graph, q2)
    totals_1 = _periodic_values(graph, q1, cap)
    totals_2 = _periodic_values(graph, q2, cap)
    for n, (a, b) in enumerate(zip(totals_1, totals_2), start=1):
        if a != b:
            logger.info(f"Periodic spectra differ: I_{n} = {a} vs {b}")
            return IsospectralResult(SpectrumMode.PERIODIC, False, n, None, a, b)
    return IsospectralResult(SpectrumMode.PERIODIC, True)


def is_isospectral(graph: FundamentalGraph, q1: Potential, q2: Potential,
                   mode: SpectrumMode, cap: Optional[int] = None) -> IsospectralResult:
    if mode is SpectrumMode.FLOQUET:
        return isospectral_floquet(graph, q1, q2, cap)
    return isospectral_periodic(graph, q1, q2, cap)


def pendant_isospectral_pair(graph: FundamentalGraph, potential: Potential) -> Tuple[Potential, Potential]:
    """
    The two potentials with the periodic spectrum of Q on the pendant graph:
    Q itself and (q1 - 2, q0 + 2).
    """
    if graph.signature() != build_pendant().signature():
        raise InvariantError("the isospectral pair is only known for the pendant graph")
    _check_potential(graph, potential)
    q0, q1 = potential.values
    partner = Potential.from_values([q1 - 2, q0 + 2])
    if not isospectral_periodic(graph, potential, partner).isospectral:
        raise InvariantError(f"partner {partner.to_dict()['values']} is not isospectral to the input")
    return potential, partner
