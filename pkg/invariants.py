"""
Floquet Invariants — Invariant Engine
Exact Floquet invariants I_n^m(Q) and periodic invariants I_n(Q) as
polynomials in the potential values.

Two independent routes are provided:
- prime-cycle sums over cycles of the modified graph (invariant_floquet,
  invariant_periodic), with the 1/r factor of r-fold repetitions;
- a transfer-matrix pass over closed paths (closed_path_traces), which gives
  n * I_n^m for every index at once and backs invariant_table.
"""

import itertools
import logging
import math
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from cycles import base_prime_cycles, enumerate_prime_cycles
from graph_core import is_periodic_bipartite, vertex_distances
from models import (
    LENGTH_CAP, CapExceededError, Cycle, FundamentalGraph, GraphValidationError, Index,
    InvariantError, InvariantTable, LinearQuadraticInvariants, Potential, check_cap,
)
from polynomial import ComplexRational, PotentialPolynomial, symmetric_h

logger = logging.getLogger(__name__)

TraceTable = Dict[int, Dict[Index, PotentialPolynomial]]
ValueTable = Dict[int, Dict[Index, ComplexRational]]


# ══════════════════════════════════════════════════════════════════════════════
# HELPERS
# ══════════════════════════════════════════════════════════════════════════════

def _as_index(m: Sequence[int], dim: int) -> Index:
    m = tuple(int(x) for x in m)
    if len(m) != dim:
        raise GraphValidationError(f"index {m} has length {len(m)}, expected {dim}")
    return m


def _divisors(n: int) -> List[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def is_primitive(m: Sequence[int]) -> bool:
    return math.gcd(*m) == 1


def support_indices(graph: FundamentalGraph, n: int) -> List[Index]:
    """Every index m in the box |m_j| <= (n-1) * max|tau_j|, in lexicographic order."""
    ranges = [range(-(n - 1) * t, (n - 1) * t + 1) for t in graph.tau_max]
    return [tuple(m) for m in itertools.product(*ranges)]


def index_representatives(graph: FundamentalGraph, n: int) -> List[Index]:
    """
    One index out of each pair {m, -m} of the support box, plus m = 0.

    Ordered by descending Euclidean norm, then descending lexicographic order.
    """
    reps = []
    for m in support_indices(graph, n):
        nonzero = [x for x in m if x]
        if not nonzero or nonzero[0] > 0:
            reps.append(m)
    return sorted(reps, key=lambda m: (sum(x * x for x in m), m), reverse=True)


def cycle_potential(cycle: Cycle, nu: int) -> PotentialPolynomial:
    """Q(c): sum of the potential over the vertex sequence of a cycle."""
    total = PotentialPolynomial.zero(nu)
    for v in cycle.vertices:
        total = total + PotentialPolynomial.variable(nu, v)
    return total


def evaluate(poly: PotentialPolynomial, potential: Potential) -> ComplexRational:
    return poly.evaluate(potential.values)


# ══════════════════════════════════════════════════════════════════════════════
# PRIME-CYCLE SUMS
# ══════════════════════════════════════════════════════════════════════════════

def invariant_floquet(graph: FundamentalGraph, n: int, m: Sequence[int],
                      cap: Optional[int] = None) -> PotentialPolynomial:
    """I_n^m = sum over prime cycles c with an added loop, r|c| = n, r tau(c) = m, of w(c)^r / r."""
    check_cap(n, cap, "order")
    m = _as_index(m, graph.dim)
    total = PotentialPolynomial.zero(graph.nu)
    for length in _divisors(n):
        r = n // length
        if any(x % r for x in m):
            continue
        root_index = tuple(x // r for x in m)
        for cycle in enumerate_prime_cycles(graph, length, m=root_index, length=length, cap=cap):
            total = total + (cycle.weight() ** r).scale(Fraction(1, r))
    return total


def invariant_periodic(graph: FundamentalGraph, n: int,
                       cap: Optional[int] = None) -> PotentialPolynomial:
    """I_n = sum over all indices of I_n^m."""
    check_cap(n, cap, "order")
    total = PotentialPolynomial.zero(graph.nu)
    for length in _divisors(n):
        r = n // length
        for cycle in enumerate_prime_cycles(graph, length, length=length, cap=cap):
            total = total + (cycle.weight() ** r).scale(Fraction(1, r))
    return total


def primitive_index_invariant(graph: FundamentalGraph, n: int, m: Sequence[int],
                              cap: Optional[int] = None) -> PotentialPolynomial:
    """For primitive m only the r = 1 term survives: the sum of w(c) over prime cycles."""
    m = _as_index(m, graph.dim)
    if not is_primitive(m):
        raise InvariantError(f"index {m} is not primitive")
    check_cap(n, cap, "order")
    total = PotentialPolynomial.zero(graph.nu)
    for cycle in enumerate_prime_cycles(graph, n, m=m, length=n, cap=cap):
        total = total + cycle.weight()
    return total


def prime_order_invariant(graph: FundamentalGraph, n: int, m: Sequence[int],
                          cap: Optional[int] = None) -> PotentialPolynomial:
    """For prime n: sum of w(c) over prime cycles of length n, plus (1/n) sum q^n when m = 0."""
    m = _as_index(m, graph.dim)
    if n < 2 or any(n % k == 0 for k in range(2, math.isqrt(n) + 1)):
        raise InvariantError(f"order {n} is not prime")
    check_cap(n, cap, "order")
    total = PotentialPolynomial.zero(graph.nu)
    for cycle in enumerate_prime_cycles(graph, n, m=m, length=n, cap=cap):
        total = total + cycle.weight()
    if not any(m):
        total = total + PotentialPolynomial.power_sum(graph.nu, n).scale(Fraction(1, n))
    return total


# ══════════════════════════════════════════════════════════════════════════════
# TRANSFER-MATRIX TRACES
# ══════════════════════════════════════════════════════════════════════════════

class _IndexCodec:
    """Packs an index vector bounded by max_n * tau_max into one integer."""

    def __init__(self, graph: FundamentalGraph, max_n: int):
        self.offsets = [max_n * t for t in graph.tau_max]
        self.strides = []
        stride = 1
        for offset in self.offsets:
            self.strides.append(stride)
            stride *= 2 * offset + 1
        self.zero = sum(o * s for o, s in zip(self.offsets, self.strides))

    def delta(self, index: Index) -> int:
        return sum(t * s for t, s in zip(index, self.strides))

    def decode(self, code: int) -> Index:
        digits = []
        for offset in self.offsets:
            radix = 2 * offset + 1
            digits.append(code % radix - offset)
            code //= radix
        return tuple(digits)


def _moves(graph: FundamentalGraph, codec: _IndexCodec) -> List[List[Tuple[int, int]]]:
    moves: List[List[Tuple[int, int]]] = [[] for _ in range(graph.nu)]
    for e in graph.edges:
        moves[e.tail].append((e.head, codec.delta(e.index)))
    return moves


@lru_cache(maxsize=64)
def _symbolic_traces(graph: FundamentalGraph, max_n: int) -> TraceTable:
    nu = graph.nu
    codec = _IndexCodec(graph, max_n)
    moves = _moves(graph, codec)
    distances = vertex_distances(graph)
    radix = max_n + 1
    strides = [radix ** v for v in range(nu)]

    harvest: Dict[int, Dict[Tuple[int, int], int]] = {n: defaultdict(int) for n in range(1, max_n + 1)}
    for start in range(nu):
        frontier = {(start, codec.zero, 0): 1}
        for step in range(1, max_n + 1):
            remaining = max_n - step
            successor: Dict[Tuple[int, int, int], int] = defaultdict(int)
            for (v, icode, qcode), count in frontier.items():
                if distances[v][start] <= remaining:
                    successor[(v, icode, qcode + strides[v])] += count
                for w, delta in moves[v]:
                    if distances[w][start] <= remaining:
                        successor[(w, icode + delta, qcode)] += count
            frontier = successor
            bucket = harvest[step]
            for (v, icode, qcode), count in frontier.items():
                if v == start and qcode:
                    bucket[(icode, qcode)] += count
        logger.debug(f"Traces from vertex {start}: {len(frontier)} final states")

    table: TraceTable = {}
    for n, bucket in harvest.items():
        terms: Dict[Index, Dict[Tuple[int, ...], int]] = defaultdict(dict)
        for (icode, qcode), count in bucket.items():
            exps = []
            for _ in range(nu):
                exps.append(qcode % radix)
                qcode //= radix
            terms[codec.decode(icode)][tuple(exps)] = count
        table[n] = {m: PotentialPolynomial(nu, t) for m, t in sorted(terms.items())}
    return table


def closed_path_traces(graph: FundamentalGraph, max_n: int,
                       cap: Optional[int] = None) -> TraceTable:
    """
    t_n^m = sum of weights of closed paths of length n and index m that use at
    least one added loop, for every n <= max_n, as integer polynomials.

    The trace formula reads Tr(H^n(k) - A^n(k)) = sum_m t_n^m cos<m, k>, and
    t_n^m = n * I_n^m.
    """
    check_cap(max_n, cap, "order")
    return _symbolic_traces(graph, max_n)


def invariant_table(graph: FundamentalGraph, max_n: Optional[int] = None,
                    cap: Optional[int] = None) -> InvariantTable:
    """The complete system {I_n^m : n <= max_n} (max_n defaults to the vertex count)."""
    max_n = graph.nu if max_n is None else max_n
    traces = closed_path_traces(graph, max_n, cap)
    table = InvariantTable(max_n=max_n, dim=graph.dim, nu=graph.nu, tau_max=graph.tau_max)
    for n, by_index in traces.items():
        for m, poly in by_index.items():
            table.entries[(n, m)] = poly.scale(Fraction(1, n))
    logger.info(f"Invariant table built: nu={graph.nu}, max_n={max_n}, {len(table.entries)} nonzero entries")
    return table


@lru_cache(maxsize=64)
def _base_walk_counts(graph: FundamentalGraph, max_n: int) -> Dict[int, Dict[int, int]]:
    """Closed walks in the fundamental graph alone, by length and index code."""
    codec = _IndexCodec(graph, max_n)
    moves = _moves(graph, codec)
    distances = vertex_distances(graph)
    counts: Dict[int, Dict[int, int]] = {n: defaultdict(int) for n in range(1, max_n + 1)}
    for start in range(graph.nu):
        frontier = {(start, codec.zero): 1}
        for step in range(1, max_n + 1):
            remaining = max_n - step
            successor: Dict[Tuple[int, int], int] = defaultdict(int)
            for (v, icode), count in frontier.items():
                for w, delta in moves[v]:
                    if distances[w][start] <= remaining:
                        successor[(w, icode + delta)] += count
            frontier = successor
            for (v, icode), count in frontier.items():
                if v == start:
                    counts[step][icode] += count
    return counts


def closed_path_trace_values(graph: FundamentalGraph, potential: Potential, max_n: int,
                             cap: Optional[int] = None) -> ValueTable:
    """
    Exact values t_n^m(Q) for one potential, without building polynomials.

    The potential is scaled to Gaussian integers by its common denominator D:
    base edges carry weight D and the added loop at v carries D * Q(v), so all
    arithmetic stays in integers until the final division by D^n.
    """
    check_cap(max_n, cap, "order")
    if potential.nu != graph.nu:
        raise GraphValidationError(f"potential has {potential.nu} values, graph has {graph.nu} vertices")
    codec = _IndexCodec(graph, max_n)
    moves = _moves(graph, codec)
    distances = vertex_distances(graph)
    scale = potential.common_denominator()
    loop_re = [int(v.re * scale) for v in potential.values]
    loop_im = [int(v.im * scale) for v in potential.values]

    sums: Dict[int, Dict[int, List[int]]] = {n: defaultdict(lambda: [0, 0]) for n in range(1, max_n + 1)}
    for start in range(graph.nu):
        frontier = {(start, codec.zero): (1, 0)}
        for step in range(1, max_n + 1):
            remaining = max_n - step
            successor: Dict[Tuple[int, int], List[int]] = defaultdict(lambda: [0, 0])
            for (v, icode), (re, im) in frontier.items():
                if distances[v][start] <= remaining and (loop_re[v] or loop_im[v]):
                    slot = successor[(v, icode)]
                    slot[0] += re * loop_re[v] - im * loop_im[v]
                    slot[1] += re * loop_im[v] + im * loop_re[v]
                for w, delta in moves[v]:
                    if distances[w][start] <= remaining:
                        slot = successor[(w, icode + delta)]
                        slot[0] += re * scale
                        slot[1] += im * scale
            frontier = {key: (s[0], s[1]) for key, s in successor.items()}
            bucket = sums[step]
            for (v, icode), (re, im) in frontier.items():
                if v == start:
                    bucket[icode][0] += re
                    bucket[icode][1] += im

    base_counts = _base_walk_counts(graph, max_n)
    values: ValueTable = {}
    for n in range(1, max_n + 1):
        denominator = scale ** n
        by_index: Dict[Index, ComplexRational] = {}
        codes = set(sums[n]) | set(base_counts[n])
        for icode in sorted(codes):
            re, im = sums[n].get(icode, (0, 0))
            value = ComplexRational(Fraction(re, denominator) - base_counts[n].get(icode, 0),
                                    Fraction(im, denominator))
            if not value.is_zero():
                by_index[codec.decode(icode)] = value
        values[n] = by_index
    return values


def invariant_values(graph: FundamentalGraph, potential: Potential, max_n: Optional[int] = None,
                     cap: Optional[int] = None) -> ValueTable:
    """Exact values I_n^m(Q) = t_n^m(Q) / n for n <= max_n; zero entries are omitted."""
    max_n = graph.nu if max_n is None else max_n
    traces = closed_path_trace_values(graph, potential, max_n, cap)
    return {
        n: {m: value * ComplexRational(Fraction(1, n)) for m, value in by_index.items()}
        for n, by_index in traces.items()
    }


# ══════════════════════════════════════════════════════════════════════════════
# CLOSED FORMS FOR n <= 3
# ══════════════════════════════════════════════════════════════════════════════

def closed_form_small_n(graph: FundamentalGraph, n: int,
                        m: Optional[Sequence[int]] = None) -> PotentialPolynomial:
    """
    Explicit I_n^m (or I_n when m is None) for n in {1, 2, 3} from the base
    prime cycles of length 1 and 2 and their cycle potentials Q(c):

        I_1^m = [m = 0] sum q
        I_2^m = [m = 0] (1/2) sum q^2 + sum_{P_1^m} Q(c)
        I_3^m = [m = 0] (1/3) sum q^3 + sum_{P_1^m} Q(c)^2 + sum_{P_2^m} Q(c)
                + sum_{c in P_1, 2 tau(c) = m} Q(c)
    """
    if n not in (1, 2, 3):
        raise InvariantError(f"closed forms exist only for n <= 3, got {n}")
    nu = graph.nu
    periodic = m is None
    if not periodic:
        m = _as_index(m, graph.dim)
    at_zero = periodic or not any(m)

    def selected(cycle: Cycle) -> bool:
        return periodic or cycle.index == m

    total = PotentialPolynomial.zero(nu)
    if at_zero:
        total = total + PotentialPolynomial.power_sum(nu, n).scale(Fraction(1, n))
    if n == 1:
        return total

    loops = base_prime_cycles(graph, 1) if graph.has_loops else []
    if n == 2:
        for c in loops:
            if selected(c):
                total = total + cycle_potential(c, nu)
        return total

    for c in loops:
        q = cycle_potential(c, nu)
        if selected(c):
            total = total + q * q
        if periodic or tuple(2 * x for x in c.index) == m:
            total = total + q
    for c in base_prime_cycles(graph, 2):
        if selected(c):
            total = total + cycle_potential(c, nu)
    return total


def simple_graph_third_invariant(graph: FundamentalGraph) -> PotentialPolynomial:
    """I_3^0 = (1/3) sum q^3 + sum kappa_v q_v, valid when the periodic graph has no multiple edges."""
    if not graph.is_periodic_simple:
        raise InvariantError("the periodic graph has multiple edges")
    nu = graph.nu
    total = PotentialPolynomial.power_sum(nu, 3).scale(Fraction(1, 3))
    for v, degree in enumerate(graph.degrees):
        total = total + PotentialPolynomial.variable(nu, v).scale(degree)
    return total


# ══════════════════════════════════════════════════════════════════════════════
# LINEAR AND QUADRATIC INVARIANTS
# ══════════════════════════════════════════════════════════════════════════════

def shortest_cycle_length(graph: FundamentalGraph, m: Sequence[int],
                          cap: Optional[int] = None) -> int:
    """n(m): the length of the shortest cycle of the fundamental graph with index m."""
    m = _as_index(m, graph.dim)
    limit = LENGTH_CAP if cap is None else cap
    for n in range(1, limit + 1):
        if base_prime_cycles(graph, n, m, cap=limit):
            return n
    raise InvariantError(f"no cycle with index {m} of length <= {limit}")


def _vertex_variables(cycle: Cycle, nu: int) -> List[PotentialPolynomial]:
    return [PotentialPolynomial.variable(nu, v) for v in cycle.vertices]


def linear_quadratic_invariants(graph: FundamentalGraph, m: Sequence[int],
                                cap: Optional[int] = None) -> LinearQuadraticInvariants:
    """
    The first two nonvanishing invariants of a primitive index m:

        I_{n+1}^m = sum_{P_n^m} h_1(q over c)
        I_{n+2}^m = sum_{P_n^m} h_2(q over c) + sum_{P_{n+1}^m} h_1(q over c)

    with n = n(m). On a bipartite periodic graph P_{n+1}^m is empty.
    """
    m = _as_index(m, graph.dim)
    if not any(m) or not is_primitive(m):
        raise InvariantError(f"index {m} is not primitive")
    n = shortest_cycle_length(graph, m, cap)
    try:
        check_cap(n + 2, cap, "order")
    except CapExceededError as e:
        raise InvariantError(f"invariants of index {m} need order {n + 2}: {e}")

    nu = graph.nu
    bipartite = is_periodic_bipartite(graph)
    linear = PotentialPolynomial.zero(nu)
    quadratic = PotentialPolynomial.zero(nu)
    for cycle in base_prime_cycles(graph, n, m, cap=cap):
        variables = _vertex_variables(cycle, nu)
        linear = linear + symmetric_h(1, variables)
        quadratic = quadratic + symmetric_h(2, variables)

    # closed paths with index m all share one length parity on a bipartite lift
    longer = [] if bipartite else base_prime_cycles(graph, n + 1, m, cap=cap)
    for cycle in longer:
        quadratic = quadratic + symmetric_h(1, _vertex_variables(cycle, nu))

    logger.info(f"Linear/quadratic invariants for m={m}: n(m)={n}, bipartite={bipartite}")
    return LinearQuadraticInvariants(
        index=m, shortest_length=n, linear=linear, quadratic=quadratic, bipartite=bipartite,
    )
