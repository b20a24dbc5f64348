"""
Floquet Invariants — Graph Core
Parsing, serialization and validation of fundamental graphs with indexed
edges, the modified graph with added loops, and structural diagnostics.

Graph file format (line oriented, `#` starts a comment):

    dim D                 first non-comment line, D >= 1
    vertices N [names]    exactly once, declares vertices 0..N-1
    edge U V M1 ... MD    one unoriented edge, index read in the U -> V orientation
    potential V RE [IM]   rational literals, missing vertices default to 0
"""

import itertools
import logging
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from models import (
    FundamentalGraph, GraphDocument, GraphFormatError, GraphValidationError,
    Index, ModifiedFundamentalGraph, OrientedEdge, Potential, RankDiagnostic,
)
from polynomial import ComplexRational, parse_rational

logger = logging.getLogger(__name__)

KEYWORDS = ("dim", "vertices", "edge", "potential")


# ══════════════════════════════════════════════════════════════════════════════
# CONSTRUCTION
# ══════════════════════════════════════════════════════════════════════════════

def assemble_graph(dim: int, num_vertices: int,
                   declared: Iterable[Tuple[int, int, Sequence[int]]],
                   names: Optional[Sequence[Optional[str]]] = None) -> FundamentalGraph:
    """
    Build a validated FundamentalGraph from unoriented edge declarations.

    Each declaration (u, v, tau) yields the oriented edge u -> v with index tau
    and its reverse v -> u with index -tau.
    """
    if dim < 1:
        raise GraphValidationError(f"dimension must be at least 1, got {dim}")
    if num_vertices < 1:
        raise GraphValidationError(f"graph needs at least one vertex, got {num_vertices}")

    edges: List[OrientedEdge] = []
    for k, (u, v, index) in enumerate(declared):
        index = tuple(int(x) for x in index)
        if len(index) != dim:
            raise GraphValidationError(
                f"edge {k} ({u}-{v}) has an index of length {len(index)}, expected {dim}"
            )
        for w in (u, v):
            if not 0 <= w < num_vertices:
                raise GraphValidationError(f"edge {k} refers to unknown vertex {w}")
        if u == v and not any(index):
            raise GraphValidationError(f"edge {k} is a loop at vertex {u} with zero index")
        edges.append(OrientedEdge(id=2 * k, pair_id=k, tail=u, head=v, index=index))
        edges.append(OrientedEdge(id=2 * k + 1, pair_id=k, tail=v, head=u,
                                  index=tuple(-x for x in index)))

    multigraph = nx.MultiGraph()
    multigraph.add_nodes_from(range(num_vertices))
    multigraph.add_edges_from((e.tail, e.head) for e in edges[0::2])
    if not nx.is_connected(multigraph):
        components = nx.number_connected_components(multigraph)
        raise GraphValidationError(f"fundamental graph is disconnected ({components} components)")

    if names is None:
        names = ()
    else:
        names = tuple(names)
        if len(names) != num_vertices:
            raise GraphValidationError(f"expected {num_vertices} vertex names, got {len(names)}")

    return FundamentalGraph(dim=dim, num_vertices=num_vertices, edges=tuple(edges), names=names)


@lru_cache(maxsize=128)
def modified_graph(graph: FundamentalGraph) -> ModifiedFundamentalGraph:
    """Add one zero-index loop e_v per vertex; loop ids follow the base edge ids."""
    base_count = len(graph.edges)
    zero = (0,) * graph.dim
    loops = tuple(
        OrientedEdge(id=base_count + v, pair_id=base_count // 2 + v, tail=v, head=v,
                     index=zero, added=True)
        for v in range(graph.num_vertices)
    )
    return ModifiedFundamentalGraph(base=graph, added_loops=loops)


@lru_cache(maxsize=128)
def vertex_distances(graph: FundamentalGraph) -> Tuple[Tuple[int, ...], ...]:
    """All-pairs shortest path lengths in the underlying multigraph."""
    simple = nx.Graph()
    simple.add_nodes_from(range(graph.num_vertices))
    simple.add_edges_from((e.tail, e.head) for e in graph.declared_edges if not e.is_loop)
    lengths = dict(nx.all_pairs_shortest_path_length(simple))
    return tuple(
        tuple(lengths[u][v] for v in range(graph.num_vertices))
        for u in range(graph.num_vertices)
    )


def degree_potential(graph: FundamentalGraph) -> Potential:
    return Potential.from_values(graph.degrees)


def minus_degree_potential(graph: FundamentalGraph) -> Potential:
    return Potential.from_values(-d for d in graph.degrees)


# ══════════════════════════════════════════════════════════════════════════════
# PARSING
# ══════════════════════════════════════════════════════════════════════════════

def _tokenize(text: str):
    """Yield (line_number, [(column, token), ...]) for every non-empty line."""
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = []
        column = 0
        for piece in line.split():
            column = line.index(piece, column)
            tokens.append((column + 1, piece))
            column += len(piece)
        if tokens:
            yield line_number, tokens


def _int_token(token, line: int, what: str) -> int:
    column, text = token
    try:
        return int(text)
    except ValueError:
        raise GraphFormatError(f"expected an integer {what}, got '{text}'", line, column)


def _rational_token(token, line: int) -> ComplexRational:
    column, text = token
    try:
        return ComplexRational(parse_rational(text))
    except ValueError:
        raise GraphFormatError(f"expected a rational literal, got '{text}'", line, column)


def _parse_potential_line(tokens, line: int, nu: int, values: Dict[int, ComplexRational]):
    if len(tokens) not in (3, 4):
        raise GraphFormatError("expected 'potential V RE [IM]'", line, tokens[0][0])
    vertex = _int_token(tokens[1], line, "vertex id")
    if not 0 <= vertex < nu:
        raise GraphValidationError(f"line {line}: potential on unknown vertex {vertex}")
    if vertex in values:
        raise GraphValidationError(f"line {line}: potential of vertex {vertex} declared twice")
    re = _rational_token(tokens[2], line).re
    im = _rational_token(tokens[3], line).re if len(tokens) == 4 else 0
    values[vertex] = ComplexRational(re, im)


def _parse_vertices_line(tokens, line: int):
    if len(tokens) < 2:
        raise GraphFormatError("expected 'vertices N [names...]'", line, tokens[0][0])
    nu = _int_token(tokens[1], line, "vertex count")
    if nu < 1:
        raise GraphValidationError(f"line {line}: vertex count must be positive, got {nu}")
    names = [t for _, t in tokens[2:]]
    if names and len(names) != nu:
        raise GraphFormatError(f"expected {nu} vertex names, got {len(names)}", line, tokens[2][0])
    return nu, (tuple(names) if names else None)


def parse_graph_document(text: str) -> GraphDocument:
    """Parse a graph file, including any `potential` lines it carries."""
    dim: Optional[int] = None
    nu: Optional[int] = None
    names = None
    declared = []
    potential_values: Dict[int, ComplexRational] = {}

    for line, tokens in _tokenize(text):
        keyword_column, keyword = tokens[0]
        if keyword not in KEYWORDS:
            raise GraphFormatError(f"unknown keyword '{keyword}'", line, keyword_column)

        if dim is None and keyword != "dim":
            raise GraphFormatError("'dim D' must be the first declaration", line, keyword_column)

        if keyword == "dim":
            if dim is not None:
                raise GraphFormatError("'dim' declared twice", line, keyword_column)
            if len(tokens) != 2:
                raise GraphFormatError("expected 'dim D'", line, keyword_column)
            dim = _int_token(tokens[1], line, "dimension")
            if dim < 1:
                raise GraphFormatError(f"dimension must be at least 1, got {dim}", line, tokens[1][0])

        elif keyword == "vertices":
            if nu is not None:
                raise GraphValidationError(f"line {line}: duplicate vertices declaration")
            nu, names = _parse_vertices_line(tokens, line)

        elif keyword == "edge":
            if nu is None:
                raise GraphFormatError("'vertices N' must precede edges", line, keyword_column)
            if len(tokens) != 3 + dim:
                raise GraphFormatError(
                    f"edge index has {len(tokens) - 3} components, expected {dim}",
                    line, keyword_column,
                )
            u = _int_token(tokens[1], line, "vertex id")
            v = _int_token(tokens[2], line, "vertex id")
            index = tuple(_int_token(t, line, "index component") for t in tokens[3:])
            for w in (u, v):
                if not 0 <= w < nu:
                    raise GraphValidationError(f"line {line}: unknown vertex {w}")
            if u == v and not any(index):
                raise GraphValidationError(f"line {line}: loop at vertex {u} has zero index")
            declared.append((u, v, index))

        else:  # potential
            if nu is None:
                raise GraphFormatError("'vertices N' must precede potentials", line, keyword_column)
            _parse_potential_line(tokens, line, nu, potential_values)

    if dim is None:
        raise GraphFormatError("missing 'dim D' declaration")
    if nu is None:
        raise GraphFormatError("missing 'vertices N' declaration")

    graph = assemble_graph(dim, nu, declared, names)
    potential = Potential.from_values(potential_values.get(v, ComplexRational()) for v in range(nu))
    logger.info(f"Parsed graph: d={dim}, nu={nu}, {len(declared)} edges")
    return GraphDocument(graph=graph, potential=potential, declared_potential=bool(potential_values))


def parse_graph(text: str) -> FundamentalGraph:
    return parse_graph_document(text).graph


def parse_potential(text: str, nu: Optional[int] = None) -> Potential:
    """
    Parse a potential file: a `vertices N` header and `potential` lines.

    `dim` and `edge` lines are skipped, so a graph file carrying potentials can
    be used as a potential source as well.
    """
    declared_nu: Optional[int] = None
    values: Dict[int, ComplexRational] = {}
    for line, tokens in _tokenize(text):
        keyword_column, keyword = tokens[0]
        if keyword not in KEYWORDS:
            raise GraphFormatError(f"unknown keyword '{keyword}'", line, keyword_column)
        if keyword in ("dim", "edge"):
            continue
        if keyword == "vertices":
            if declared_nu is not None:
                raise GraphValidationError(f"line {line}: duplicate vertices declaration")
            declared_nu, _ = _parse_vertices_line(tokens, line)
            continue
        if declared_nu is None:
            raise GraphFormatError("'vertices N' must precede potentials", line, keyword_column)
        _parse_potential_line(tokens, line, declared_nu, values)

    if declared_nu is None:
        raise GraphFormatError("missing 'vertices N' declaration")
    if nu is not None and declared_nu != nu:
        raise GraphValidationError(f"potential is declared on {declared_nu} vertices, graph has {nu}")
    return Potential.from_values(values.get(v, ComplexRational()) for v in range(declared_nu))


def parse_value(text: str) -> ComplexRational:
    """Parse one potential value written as `p/q` or `re,im`."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (1, 2):
        raise GraphFormatError(f"cannot parse potential value '{text}'")
    try:
        re = parse_rational(parts[0])
        im = parse_rational(parts[1]) if len(parts) == 2 else 0
    except ValueError as e:
        raise GraphFormatError(f"cannot parse potential value '{text}': {e}")
    return ComplexRational(re, im)


# ══════════════════════════════════════════════════════════════════════════════
# SERIALIZATION
# ══════════════════════════════════════════════════════════════════════════════

def _potential_lines(potential: Potential) -> List[str]:
    lines = []
    for v, value in enumerate(potential.values):
        if value.is_zero():
            continue
        line = f"potential {v} {value.re}"
        if value.im:
            line += f" {value.im}"
        lines.append(line)
    return lines


def serialize_graph(graph: FundamentalGraph, potential: Optional[Potential] = None) -> str:
    """Canonical graph file text; parse_graph(serialize_graph(g)) == g."""
    lines = [f"dim {graph.dim}"]
    header = f"vertices {graph.num_vertices}"
    if graph.names:
        header += " " + " ".join(graph.names)
    lines.append(header)
    for e in graph.declared_edges:
        lines.append(f"edge {e.tail} {e.head} " + " ".join(str(x) for x in e.index))
    if potential is not None:
        lines.extend(_potential_lines(potential))
    return "\n".join(lines) + "\n"


def serialize_potential(potential: Potential) -> str:
    return "\n".join([f"vertices {potential.nu}"] + _potential_lines(potential)) + "\n"


# ══════════════════════════════════════════════════════════════════════════════
# DIAGNOSTICS
# ══════════════════════════════════════════════════════════════════════════════

def _vertex_offsets(graph: FundamentalGraph) -> List[Index]:
    """Lattice offsets phi(v) along a BFS spanning tree rooted at vertex 0."""
    simple = nx.Graph()
    simple.add_nodes_from(range(graph.num_vertices))
    simple.add_edges_from((e.tail, e.head) for e in graph.declared_edges if not e.is_loop)
    first_edge = {}
    for e in graph.edges:
        first_edge.setdefault((e.tail, e.head), e)

    offsets: List[Optional[Index]] = [None] * graph.num_vertices
    offsets[0] = (0,) * graph.dim
    for u, v in nx.bfs_edges(simple, 0):
        tree_edge = first_edge[(u, v)]
        offsets[v] = tuple(a + b for a, b in zip(offsets[u], tree_edge.index))
    return offsets


def _integer_row_basis(rows: List[List[int]], dim: int) -> List[Index]:
    """Row echelon basis of the integer row lattice (Euclid on each column)."""
    rows = [list(r) for r in rows if any(r)]
    basis = []
    for col in range(dim):
        active = [r for r in rows if r[col] != 0]
        while len(active) > 1:
            pivot = min(active, key=lambda r: abs(r[col]))
            for r in active:
                if r is not pivot:
                    q = r[col] // pivot[col]
                    for j in range(dim):
                        r[j] -= q * pivot[j]
            active = [r for r in active if r[col] != 0]
        if active:
            pivot = active[0]
            rows = [r for r in rows if r is not pivot]
            if pivot[col] < 0:
                pivot = [-x for x in pivot]
            basis.append(tuple(pivot))
        rows = [r for r in rows if any(r)]
    return basis


def validate_full_rank(graph: FundamentalGraph) -> RankDiagnostic:
    """
    Compute the subgroup of Z^d generated by the fundamental cycle indices.

    A proper subgroup means the periodic lift is disconnected; this is logged
    as a warning and never raised.
    """
    offsets = _vertex_offsets(graph)
    generators = []
    for e in graph.declared_edges:
        g = tuple(a + t - b for a, t, b in zip(offsets[e.tail], e.index, offsets[e.head]))
        if any(g) and g not in generators:
            generators.append(g)

    basis = _integer_row_basis([list(g) for g in generators], graph.dim)
    rank = len(basis)
    lattice_index = None
    if rank == graph.dim:
        lattice_index = 1
        for col, row in enumerate(basis):
            lattice_index *= abs(row[col])

    diagnostic = RankDiagnostic(
        dim=graph.dim,
        generators=tuple(generators),
        basis=tuple(basis),
        rank=rank,
        lattice_index=lattice_index,
    )
    if not diagnostic.full_rank:
        logger.warning(
            f"Cycle indices generate a subgroup of rank {rank} and index {lattice_index} "
            f"in Z^{graph.dim}; the periodic graph is disconnected"
        )
    return diagnostic


def bipartite_parity(graph: FundamentalGraph) -> Optional[Tuple[int, ...]]:
    """
    Parity functional phi in {0,1}^d proving the periodic graph bipartite, or None.

    The lift is 2-coloured by f(v) + <phi, gamma> (mod 2) exactly when
    f(head) - f(tail) = 1 + <phi, tau(e)> (mod 2) holds on every edge.
    """
    for phi in itertools.product((0, 1), repeat=graph.dim):
        colours: List[Optional[int]] = [None] * graph.num_vertices
        colours[0] = 0
        stack = [0]
        consistent = True
        while stack and consistent:
            u = stack.pop()
            for e in graph.out_edges(u):
                flip = (1 + sum(p * t for p, t in zip(phi, e.index))) % 2
                wanted = colours[u] ^ flip
                if colours[e.head] is None:
                    colours[e.head] = wanted
                    stack.append(e.head)
                elif colours[e.head] != wanted:
                    consistent = False
                    break
        if consistent:
            return tuple(phi)
    return None


def is_periodic_bipartite(graph: FundamentalGraph) -> bool:
    return bipartite_parity(graph) is not None


def graph_summary(graph: FundamentalGraph) -> dict:
    """Structural facts about a fundamental graph, as printed by `inspect`."""
    degrees = graph.degrees
    parity = bipartite_parity(graph)
    return {
        "dim": graph.dim,
        "vertices": graph.num_vertices,
        "edges": len(graph.declared_edges),
        "degrees": list(degrees),
        "regular_degree": degrees[0] if len(set(degrees)) == 1 else None,
        "tau_max": list(graph.tau_max),
        "tau_plus": graph.tau_plus,
        "has_loops": graph.has_loops,
        "has_multiple_edges": graph.has_multiple_edges,
        "periodic_simple": graph.is_periodic_simple,
        "bipartite": parity is not None,
        "bipartite_parity": list(parity) if parity is not None else None,
        "rank": validate_full_rank(graph).to_dict(),
    }
