"""
Floquet Invariants — Data Models
Defines configuration, the error hierarchy and all core entities: fundamental
graphs, potentials, cycles, invariant tables and verification reports.
"""

import logging
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from polynomial import ComplexRational, PotentialPolynomial

logger = logging.getLogger(__name__)

Index = Tuple[int, ...]


# ══════════════════════════════════════════════════════════════════════════════
# CONFIGURATION
# ══════════════════════════════════════════════════════════════════════════════

def _env_number(name: str, default, cast, minimum=None):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = cast(raw)
    except ValueError:
        logger.warning(f"Ignoring {name}={raw!r}: not a valid {cast.__name__}, using {default}")
        return default
    if minimum is not None and value < minimum:
        logger.warning(f"Ignoring {name}={raw!r}: must be >= {minimum}, using {default}")
        return default
    return value


# Maximal path / cycle length and invariant order
LENGTH_CAP = _env_number("FLOQUET_LENGTH_CAP", 12, int, minimum=1)

# Relative tolerance of the trace-formula oracle
TOLERANCE = _env_number("FLOQUET_TOLERANCE", 1e-9, float, minimum=0.0)

# Quasimomentum grid points per axis and random samples
GRID_POINTS = _env_number("FLOQUET_GRID", 8, int, minimum=1)
RANDOM_SAMPLES = _env_number("FLOQUET_SAMPLES", 16, int, minimum=0)

DEFAULT_SEED = _env_number("FLOQUET_SEED", 0, int)

LOG_LEVEL = os.environ.get("FLOQUET_LOG_LEVEL", "WARNING").upper()


# ══════════════════════════════════════════════════════════════════════════════
# ERRORS
# ══════════════════════════════════════════════════════════════════════════════

class SpectralError(Exception):
    """Base exception for every failure the library reports to callers."""


class GraphFormatError(SpectralError):
    """Syntax error in a graph or potential file."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(f"{where}{message}")


class GraphValidationError(SpectralError):
    """Structurally invalid graph or potential."""


class CapExceededError(SpectralError):
    """A requested length or order exceeds the configured cap."""


class InvariantError(SpectralError):
    """An invariant cannot be computed for the given arguments."""


class BuiltinError(SpectralError):
    """Unknown builtin graph name or bad builder parameters."""


def check_cap(length: int, cap: Optional[int] = None, what: str = "length"):
    cap = LENGTH_CAP if cap is None else cap
    if length < 1:
        raise CapExceededError(f"{what} must be at least 1, got {length}")
    if length > cap:
        raise CapExceededError(f"{what} {length} exceeds the cap {cap}")


# ══════════════════════════════════════════════════════════════════════════════
# ENUMS
# ══════════════════════════════════════════════════════════════════════════════

class CycleKind(Enum):
    BASE = "base"          # only edges of the fundamental graph
    MODIFIED = "modified"  # contains at least one added loop
    ANY = "any"


class SpectrumMode(Enum):
    FLOQUET = "floquet"    # spectra of H(k) for every quasimomentum
    PERIODIC = "periodic"  # spectrum of H(0)


# ══════════════════════════════════════════════════════════════════════════════
# GRAPHS
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class OrientedEdge:
    """One orientation of an edge of the fundamental graph, or an added loop."""
    id: int
    pair_id: int
    tail: int
    head: int
    index: Index
    added: bool = False

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    @property
    def reverse_id(self) -> int:
        if self.added:
            return self.id
        return self.id ^ 1

    def to_dict(self):
        return {
            "id": self.id,
            "pair_id": self.pair_id,
            "tail": self.tail,
            "head": self.head,
            "index": list(self.index),
            "added": self.added,
        }


@dataclass(frozen=True)
class FundamentalGraph:
    """
    Finite quotient of a periodic graph, with Z^d-valued edge indices.

    Declared edge k is stored as oriented edges 2k (declared orientation) and
    2k+1 (reverse, negated index). Build instances through
    graph_core.assemble_graph so the structural invariants are checked.
    """
    dim: int
    num_vertices: int
    edges: Tuple[OrientedEdge, ...]
    names: Tuple[Optional[str], ...] = ()

    @property
    def nu(self) -> int:
        return self.num_vertices

    @property
    def declared_edges(self) -> Tuple[OrientedEdge, ...]:
        return self.edges[0::2]

    def edge(self, edge_id: int) -> OrientedEdge:
        return self.edges[edge_id]

    def out_edges(self, vertex: int) -> List[OrientedEdge]:
        return [e for e in self.edges if e.tail == vertex]

    def degree(self, vertex: int) -> int:
        """Number of oriented edges with tail `vertex` (a loop counts twice)."""
        return sum(1 for e in self.edges if e.tail == vertex)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(self.degree(v) for v in range(self.num_vertices))

    @property
    def tau_max(self) -> Tuple[int, ...]:
        """Per-coordinate maximum of |tau_j(e)| over base edges."""
        return tuple(
            max((abs(e.index[j]) for e in self.edges), default=0)
            for j in range(self.dim)
        )

    @property
    def tau_plus(self) -> float:
        """Maximum Euclidean norm of a base edge index."""
        return max((math.sqrt(sum(x * x for x in e.index)) for e in self.edges), default=0.0)

    @property
    def has_loops(self) -> bool:
        return any(e.is_loop for e in self.edges)

    @property
    def has_multiple_edges(self) -> bool:
        """Two declared edges join the same pair of quotient vertices."""
        seen = set()
        for e in self.declared_edges:
            key = (min(e.tail, e.head), max(e.tail, e.head))
            if key in seen:
                return True
            seen.add(key)
        return False

    @property
    def is_periodic_simple(self) -> bool:
        """The periodic lift has no multiple edges."""
        keys = [(e.tail, e.head, e.index) for e in self.edges]
        return len(keys) == len(set(keys))

    def vertex_label(self, vertex: int) -> str:
        if vertex < len(self.names) and self.names[vertex]:
            return self.names[vertex]
        return str(vertex)

    def signature(self) -> Tuple:
        """Order-independent description of the oriented edge multiset."""
        return (self.dim, self.num_vertices, tuple(sorted((e.tail, e.head, e.index) for e in self.edges)))

    def to_dict(self):
        return {
            "dim": self.dim,
            "vertices": self.num_vertices,
            "names": [self.vertex_label(v) for v in range(self.num_vertices)],
            "edges": [
                {"tail": e.tail, "head": e.head, "index": list(e.index)}
                for e in self.declared_edges
            ],
            "degrees": list(self.degrees),
        }


@dataclass(frozen=True)
class GraphDocument:
    """Contents of a graph file: the graph and the potential declared alongside it."""
    graph: FundamentalGraph
    potential: "Potential"
    declared_potential: bool = False


@dataclass(frozen=True)
class ModifiedFundamentalGraph:
    """Fundamental graph plus one zero-index loop e_v per vertex, weighted by q_v."""
    base: FundamentalGraph
    added_loops: Tuple[OrientedEdge, ...]

    @property
    def nu(self) -> int:
        return self.base.num_vertices

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def all_edges(self) -> Tuple[OrientedEdge, ...]:
        return self.base.edges + self.added_loops

    def edge(self, edge_id: int) -> OrientedEdge:
        base_count = len(self.base.edges)
        if edge_id < base_count:
            return self.base.edges[edge_id]
        return self.added_loops[edge_id - base_count]

    def added_loop(self, vertex: int) -> OrientedEdge:
        return self.added_loops[vertex]

    def is_added(self, edge_id: int) -> bool:
        return edge_id >= len(self.base.edges)


@dataclass(frozen=True)
class Potential:
    """Periodic potential given by its values on the fundamental vertices."""
    values: Tuple[ComplexRational, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(ComplexRational.coerce(v) for v in self.values))

    @classmethod
    def zero(cls, nu: int) -> "Potential":
        return cls(tuple(ComplexRational() for _ in range(nu)))

    @classmethod
    def from_values(cls, values) -> "Potential":
        return cls(tuple(values))

    @property
    def nu(self) -> int:
        return len(self.values)

    @property
    def is_real(self) -> bool:
        return all(v.is_real for v in self.values)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)

    def common_denominator(self) -> int:
        result = 1
        for v in self.values:
            for part in (v.re, v.im):
                result = result * part.denominator // math.gcd(result, part.denominator)
        return result

    def to_complex_array(self) -> np.ndarray:
        return np.array([complex(v) for v in self.values], dtype=np.complex128)

    def to_dict(self):
        return {"values": [str(v) for v in self.values], "real": self.is_real}


# ══════════════════════════════════════════════════════════════════════════════
# CYCLES
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class ClosedPath:
    """A rooted closed edge sequence in the modified fundamental graph."""
    edges: Tuple[int, ...]
    start_vertex: int
    index: Index
    exponents: Tuple[int, ...]
    vertices: Tuple[int, ...] = ()

    @property
    def length(self) -> int:
        return len(self.edges)

    def weight(self) -> PotentialPolynomial:
        return PotentialPolynomial.monomial(self.exponents)

    @property
    def uses_added_loop(self) -> bool:
        return any(self.exponents)

    def to_dict(self):
        return {
            "edges": list(self.edges),
            "start": self.start_vertex,
            "index": list(self.index),
            "exponents": list(self.exponents),
        }


@dataclass(frozen=True)
class Cycle:
    """Rotation class of a closed path, stored as its lexicographically minimal rotation."""
    canonical_edges: Tuple[int, ...]
    index: Index
    exponents: Tuple[int, ...]
    vertices: Tuple[int, ...] = ()

    @property
    def length(self) -> int:
        return len(self.canonical_edges)

    @property
    def kind(self) -> CycleKind:
        return CycleKind.MODIFIED if any(self.exponents) else CycleKind.BASE

    def weight(self) -> PotentialPolynomial:
        return PotentialPolynomial.monomial(self.exponents)

    def monomial_text(self) -> str:
        factors = [f"q{v}^{e}" for v, e in enumerate(self.exponents) if e]
        return "*".join(factors) if factors else "1"

    def to_dict(self):
        return {
            "edges": list(self.canonical_edges),
            "length": self.length,
            "index": list(self.index),
            "weight": self.monomial_text(),
            "exponents": list(self.exponents),
            "kind": self.kind.value,
        }


@dataclass(frozen=True)
class PrimeDecomposition:
    prime_root: Cycle
    multiplicity: int

    def to_dict(self):
        return {"root": self.prime_root.to_dict(), "multiplicity": self.multiplicity}


# ══════════════════════════════════════════════════════════════════════════════
# INVARIANTS
# ══════════════════════════════════════════════════════════════════════════════

@dataclass
class InvariantTable:
    """
    Exact invariants I_n^m for 1 <= n <= max_n.

    Only nonzero entries are stored; every (n, m) outside `entries` is the
    zero polynomial.
    """
    max_n: int
    dim: int
    nu: int
    tau_max: Index
    entries: Dict[Tuple[int, Index], PotentialPolynomial] = field(default_factory=dict)

    def get(self, n: int, m: Index) -> PotentialPolynomial:
        return self.entries.get((n, tuple(m)), PotentialPolynomial.zero(self.nu))

    def indices(self, n: int) -> List[Index]:
        return sorted(m for (order, m) in self.entries if order == n)

    def marginal(self, n: int) -> PotentialPolynomial:
        total = PotentialPolynomial.zero(self.nu)
        for (order, _), poly in self.entries.items():
            if order == n:
                total = total + poly
        return total

    @property
    def marginals(self) -> Dict[int, PotentialPolynomial]:
        return {n: self.marginal(n) for n in range(1, self.max_n + 1)}

    def support_bound(self, n: int) -> Index:
        return tuple((n - 1) * t for t in self.tau_max)

    def to_records(self) -> List[dict]:
        return [
            {"n": n, "m": list(m), "poly": poly.to_json()}
            for (n, m), poly in sorted(self.entries.items())
        ]

    def to_dict(self):
        return {
            "max_n": self.max_n,
            "dim": self.dim,
            "nu": self.nu,
            "entries": self.to_records(),
            "marginals": [
                {"n": n, "poly": poly.to_json()} for n, poly in self.marginals.items()
            ],
        }


@dataclass(frozen=True)
class LinearQuadraticInvariants:
    """The first two nonvanishing invariants I_{n+1}^m, I_{n+2}^m of a primitive index m."""
    index: Index
    shortest_length: int
    linear: PotentialPolynomial
    quadratic: PotentialPolynomial
    bipartite: bool

    def to_dict(self):
        return {
            "m": list(self.index),
            "shortest_length": self.shortest_length,
            "linear": {"n": self.shortest_length + 1, "poly": self.linear.to_json()},
            "quadratic": {"n": self.shortest_length + 2, "poly": self.quadratic.to_json()},
            "bipartite": self.bipartite,
        }


@dataclass(frozen=True)
class RankDiagnostic:
    """Subgroup of Z^d generated by the indices of fundamental cycles."""
    dim: int
    generators: Tuple[Index, ...]
    basis: Tuple[Index, ...]
    rank: int
    lattice_index: Optional[int]   # [Z^d : subgroup], None when rank < dim

    @property
    def full_rank(self) -> bool:
        return self.rank == self.dim and self.lattice_index == 1

    def to_dict(self):
        return {
            "dim": self.dim,
            "generators": [list(g) for g in self.generators],
            "basis": [list(b) for b in self.basis],
            "rank": self.rank,
            "lattice_index": self.lattice_index,
            "full_rank": self.full_rank,
        }


# ══════════════════════════════════════════════════════════════════════════════
# FLOQUET VERIFICATION
# ══════════════════════════════════════════════════════════════════════════════

@dataclass
class FloquetMatrix:
    k: np.ndarray
    entries: np.ndarray

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, atol=atol))


@dataclass(frozen=True)
class VerificationSample:
    n: int
    k: Tuple[float, ...]
    lhs: complex
    rhs: complex

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


@dataclass
class VerificationReport:
    """Comparison of Tr(H^n(k) - A^n(k)) against the invariant side of the trace formula."""
    max_n: int
    tolerance: float
    samples: List[VerificationSample] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max((s.residual for s in self.samples), default=0.0)

    @property
    def max_lhs(self) -> float:
        return max((abs(s.lhs) for s in self.samples), default=0.0)

    @property
    def threshold(self) -> float:
        return self.tolerance * max(1.0, self.max_lhs)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.threshold

    def to_dict(self):
        return {
            "max_n": self.max_n,
            "samples": len(self.samples),
            "tolerance": self.tolerance,
            "max_residual": self.max_residual,
            "max_abs_lhs": self.max_lhs,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class IsospectralResult:
    mode: SpectrumMode
    isospectral: bool
    witness_n: Optional[int] = None
    witness_m: Optional[Index] = None
    value_1: Optional[ComplexRational] = None
    value_2: Optional[ComplexRational] = None

    def to_dict(self):
        result = {"mode": self.mode.value, "isospectral": self.isospectral}
        if not self.isospectral:
            result["witness"] = {
                "n": self.witness_n,
                "m": list(self.witness_m) if self.witness_m is not None else None,
                "value_1": str(self.value_1),
                "value_2": str(self.value_2),
            }
        return result


# ══════════════════════════════════════════════════════════════════════════════
# LATTICE Z^d
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class ZdSpec:
    """Z^d with period lattice p_1 Z + ... + p_d Z."""
    periods: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.periods)

    @property
    def volume(self) -> int:
        return math.prod(self.periods)

    @property
    def double_axes(self) -> int:
        """Number of periods equal to 2 (each creates double edges)."""
        return sum(1 for p in self.periods if p == 2)

    def to_dict(self):
        return {"periods": list(self.periods), "p": self.volume, "d0": self.double_axes}


@dataclass
class FourierPotential:
    """Discrete Fourier transform of a potential on the period box, indexed by frequency."""
    spec: ZdSpec
    values: np.ndarray


@dataclass(frozen=True)
class ZdPeriodicInvariants:
    i1: ComplexRational
    i2: ComplexRational
    i3: ComplexRational

    def to_dict(self):
        return {"I1": str(self.i1), "I2": str(self.i2), "I3": str(self.i3)}
