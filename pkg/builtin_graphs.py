"""
Floquet Invariants — Builtin Graphs
Constructors for the worked example graphs:

    cycle N      the lattice Z with period N (a ring with one wrap edge of index 1)
    pendant      Z with a pendant edge at every vertex; v0 carries the +-1 loops,
                 v1 is the pendant vertex
    kagome       the Kagome lattice, three vertices of degree 4
    zd P1,...    Z^d with periods P1, ..., Pd
"""

import logging
import re
from typing import List

from graph_core import assemble_graph, serialize_graph
from lattice import build_zd, parse_periods
from models import BuiltinError, FundamentalGraph

logger = logging.getLogger(__name__)

# Names listed by `builtin` and /api/builtins
BUILTIN_EXAMPLES = ["cycle 5", "pendant", "kagome", "zd 3,3", "zd 2,2"]

# Kagome edges e1..e6 in the U -> V orientation
KAGOME_EDGES = [
    (0, 1, (0, 0)),
    (1, 0, (1, 0)),
    (0, 2, (0, 0)),
    (2, 0, (0, 1)),
    (2, 1, (0, 0)),
    (1, 2, (1, -1)),
]


def build_cycle(nu: int) -> FundamentalGraph:
    if nu < 1:
        raise BuiltinError(f"cycle length must be positive, got {nu}")
    declared = [(v, v + 1, (0,)) for v in range(nu - 1)]
    declared.append((nu - 1, 0, (1,)))
    return assemble_graph(1, nu, declared)


def build_pendant() -> FundamentalGraph:
    return assemble_graph(1, 2, [(0, 1, (0,)), (0, 0, (1,))])


def build_kagome() -> FundamentalGraph:
    return assemble_graph(2, 3, KAGOME_EDGES)


_NAME_PATTERN = re.compile(r"^\s*(cycle|pendant|kagome|zd)\s*(?:[:\s]\s*(.*?))?\s*$")


def build(name: str) -> FundamentalGraph:
    """Build a graph from `cycle 5`, `cycle:5`, `pendant`, `kagome`, `zd 3,3` or `zd:3,3`."""
    match = _NAME_PATTERN.match(name)
    if not match:
        raise BuiltinError(f"unknown builtin graph '{name}'")
    kind, argument = match.group(1), (match.group(2) or "").strip()

    if kind in ("pendant", "kagome"):
        if argument:
            raise BuiltinError(f"builtin '{kind}' takes no parameters")
        graph = build_pendant() if kind == "pendant" else build_kagome()
    elif kind == "cycle":
        try:
            nu = int(argument)
        except ValueError:
            raise BuiltinError(f"expected 'cycle N', got '{name}'")
        graph = build_cycle(nu)
    else:
        if not argument:
            raise BuiltinError(f"expected 'zd P1,...,Pd', got '{name}'")
        graph = build_zd(parse_periods(argument))

    logger.debug(f"Built '{name}': nu={graph.nu}, d={graph.dim}")
    return graph


def is_builtin_name(text: str) -> bool:
    return bool(_NAME_PATTERN.match(text)) and "\n" not in text


def builtin_catalogue() -> List[dict]:
    return [
        {"name": name, "graph": serialize_graph(build(name))}
        for name in BUILTIN_EXAMPLES
    ]
