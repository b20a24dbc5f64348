"""
Floquet Invariants — Cycle Engine
Closed paths and prime cycles of the modified fundamental graph: depth-first
enumeration with distance and index pruning, canonical rotation forms and
prime decomposition.
"""

import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from graph_core import modified_graph, vertex_distances
from models import (
    ClosedPath, Cycle, CycleKind, FundamentalGraph, GraphValidationError, Index,
    ModifiedFundamentalGraph, OrientedEdge, PrimeDecomposition, check_cap,
)

logger = logging.getLogger(__name__)


def _as_modified(graph) -> ModifiedFundamentalGraph:
    if isinstance(graph, FundamentalGraph):
        return modified_graph(graph)
    return graph


def _as_index(m: Optional[Sequence[int]], dim: int) -> Optional[Index]:
    if m is None:
        return None
    m = tuple(int(x) for x in m)
    if len(m) != dim:
        raise GraphValidationError(f"index {m} has length {len(m)}, expected {dim}")
    return m


@lru_cache(maxsize=128)
def _out_edges(mg: ModifiedFundamentalGraph) -> Tuple[Tuple[OrientedEdge, ...], ...]:
    """Outgoing edges per vertex (base edges and the added loop), sorted by id."""
    buckets: List[List[OrientedEdge]] = [[] for _ in range(mg.nu)]
    for e in mg.all_edges:
        buckets[e.tail].append(e)
    return tuple(tuple(sorted(b, key=lambda e: e.id)) for b in buckets)


def _index_reachable(target: Index, partial: List[int], remaining: int, tau_max: Index) -> bool:
    return all(abs(t - p) <= remaining * bound for t, p, bound in zip(target, partial, tau_max))


# ══════════════════════════════════════════════════════════════════════════════
# CLOSED PATHS
# ══════════════════════════════════════════════════════════════════════════════

def enumerate_closed_paths(graph, n: int, m: Optional[Sequence[int]] = None,
                           require_added_loop: bool = False,
                           cap: Optional[int] = None) -> List[ClosedPath]:
    """
    All rooted closed paths of length exactly n, for every start vertex.

    Ordered by start vertex, then lexicographically by edge ids.
    """
    check_cap(n, cap)
    mg = _as_modified(graph)
    target = _as_index(m, mg.dim)
    distances = vertex_distances(mg.base)
    tau_max = mg.base.tau_max
    out_edges = _out_edges(mg)

    paths: List[ClosedPath] = []
    edges: List[int] = []
    tails: List[int] = []
    index = [0] * mg.dim
    exponents = [0] * mg.nu

    def extend(start: int, vertex: int):
        depth = len(edges)
        remaining = n - depth
        if remaining == 0:
            if vertex != start:
                return
            if target is not None and tuple(index) != target:
                return
            if require_added_loop and not any(exponents):
                return
            paths.append(ClosedPath(
                edges=tuple(edges), start_vertex=start, index=tuple(index),
                exponents=tuple(exponents), vertices=tuple(tails),
            ))
            return
        if distances[vertex][start] > remaining:
            return
        if target is not None and not _index_reachable(target, index, remaining, tau_max):
            return
        for e in out_edges[vertex]:
            edges.append(e.id)
            tails.append(vertex)
            if e.added:
                exponents[vertex] += 1
            for j, t in enumerate(e.index):
                index[j] += t
            extend(start, e.head)
            for j, t in enumerate(e.index):
                index[j] -= t
            if e.added:
                exponents[vertex] -= 1
            tails.pop()
            edges.pop()

    for start in range(mg.nu):
        extend(start, start)
    logger.debug(f"Enumerated {len(paths)} closed paths of length {n}")
    return paths


# ══════════════════════════════════════════════════════════════════════════════
# CANONICAL FORMS
# ══════════════════════════════════════════════════════════════════════════════

def minimal_rotation(sequence: Sequence[int]) -> int:
    """Offset of the lexicographically smallest rotation."""
    n = len(sequence)
    seq = tuple(sequence)
    return min(range(n), key=lambda i: seq[i:] + seq[:i])


def canonicalize(path: ClosedPath) -> Cycle:
    """Rotation-minimal representative of the cycle through `path`."""
    shift = minimal_rotation(path.edges)
    edges = path.edges[shift:] + path.edges[:shift]
    vertices = path.vertices[shift:] + path.vertices[:shift] if path.vertices else ()
    return Cycle(canonical_edges=edges, index=path.index, exponents=path.exponents,
                 vertices=vertices)


def smallest_period(sequence: Sequence[int]) -> int:
    n = len(sequence)
    seq = tuple(sequence)
    for p in range(1, n + 1):
        if n % p == 0 and seq == seq[p:] + seq[:p]:
            return p
    return n


def prime_decompose(cycle: Cycle) -> PrimeDecomposition:
    """Write cycle = root^r with the smallest possible root."""
    period = smallest_period(cycle.canonical_edges)
    r = cycle.length // period
    root = Cycle(
        canonical_edges=cycle.canonical_edges[:period],
        index=tuple(x // r for x in cycle.index),
        exponents=tuple(x // r for x in cycle.exponents),
        vertices=cycle.vertices[:period] if cycle.vertices else (),
    )
    return PrimeDecomposition(prime_root=root, multiplicity=r)


def reverse_cycle(graph, cycle: Cycle) -> Cycle:
    """The cycle traversed backwards: reversed edges, negated index, same weight."""
    mg = _as_modified(graph)
    reversed_edges = [mg.edge(i) for i in reversed(cycle.canonical_edges)]
    path = ClosedPath(
        edges=tuple(e.reverse_id for e in reversed_edges),
        start_vertex=reversed_edges[0].head,
        index=tuple(-x for x in cycle.index),
        exponents=cycle.exponents,
        vertices=tuple(e.head for e in reversed_edges),
    )
    return canonicalize(path)


# ══════════════════════════════════════════════════════════════════════════════
# PRIME CYCLES
# ══════════════════════════════════════════════════════════════════════════════

def _matches_kind(exponents: Sequence[int], kind: CycleKind) -> bool:
    if kind is CycleKind.MODIFIED:
        return any(exponents)
    if kind is CycleKind.BASE:
        return not any(exponents)
    return True


def enumerate_prime_cycles(graph, max_len: int, m: Optional[Sequence[int]] = None,
                           kind: CycleKind = CycleKind.MODIFIED,
                           length: Optional[int] = None,
                           cap: Optional[int] = None) -> List[Cycle]:
    """
    Distinct prime cycles of length <= max_len, each exactly once.

    Every cycle is found from its smallest edge id only: the search rooted at
    edge e0 uses edges with id >= e0. `length` restricts to one exact length
    and `m` to one cycle index. The default kind gives the cycles containing
    an added loop; CycleKind.BASE gives the cycles of the fundamental graph.
    """
    check_cap(max_len, cap)
    mg = _as_modified(graph)
    target = _as_index(m, mg.dim)
    distances = vertex_distances(mg.base)
    tau_max = mg.base.tau_max
    out_edges = _out_edges(mg)
    skip_added = kind is CycleKind.BASE
    depth_limit = max_len if length is None else min(max_len, length)

    found: List[Cycle] = []
    edges: List[int] = []
    tails: List[int] = []
    index = [0] * mg.dim
    exponents = [0] * mg.nu

    def consider():
        depth = len(edges)
        if length is not None and depth != length:
            return
        if target is not None and tuple(index) != target:
            return
        if not _matches_kind(exponents, kind):
            return
        seq = tuple(edges)
        if minimal_rotation(seq) != 0 or smallest_period(seq) != depth:
            return
        found.append(Cycle(canonical_edges=seq, index=tuple(index),
                           exponents=tuple(exponents), vertices=tuple(tails)))

    def extend(first_id: int, start: int, vertex: int):
        depth = len(edges)
        if depth and vertex == start:
            consider()
        remaining = depth_limit - depth
        if remaining == 0:
            return
        if distances[vertex][start] > remaining:
            return
        if target is not None and not _index_reachable(target, index, remaining, tau_max):
            return
        for e in out_edges[vertex]:
            if e.id < first_id or (skip_added and e.added):
                continue
            edges.append(e.id)
            tails.append(vertex)
            if e.added:
                exponents[vertex] += 1
            for j, t in enumerate(e.index):
                index[j] += t
            extend(first_id, start, e.head)
            for j, t in enumerate(e.index):
                index[j] -= t
            if e.added:
                exponents[vertex] -= 1
            tails.pop()
            edges.pop()

    for first in mg.all_edges:
        if skip_added and first.added:
            continue
        edges.append(first.id)
        tails.append(first.tail)
        if first.added:
            exponents[first.tail] += 1
        for j, t in enumerate(first.index):
            index[j] += t
        extend(first.id, first.tail, first.head)
        for j, t in enumerate(first.index):
            index[j] -= t
        if first.added:
            exponents[first.tail] -= 1
        tails.pop()
        edges.pop()

    found.sort(key=lambda c: (c.length, c.canonical_edges))
    logger.debug(f"Found {len(found)} prime cycles ({kind.value}) up to length {depth_limit}")
    return found


def base_prime_cycles(graph: FundamentalGraph, length: int,
                      m: Optional[Sequence[int]] = None,
                      cap: Optional[int] = None) -> List[Cycle]:
    """Prime cycles of the fundamental graph with exactly `length` edges."""
    return enumerate_prime_cycles(graph, length, m=m, kind=CycleKind.BASE, length=length, cap=cap)
