"""
Floquet Invariants — Lattice Z^d
Fundamental graphs of Z^d with period lattice p_1 Z + ... + p_d Z, closed-form
invariants for them, and their discrete Fourier counterparts.

Vertices of the period box are numbered n_1 + p_1 n_2 + p_1 p_2 n_3 + ...
(the first coordinate varies fastest).
"""

import itertools
import logging
from collections import defaultdict
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from graph_core import assemble_graph
from models import (
    BuiltinError, FourierPotential, FundamentalGraph, GraphValidationError, Index,
    InvariantError, Potential, ZdPeriodicInvariants, ZdSpec,
)
from polynomial import ZERO, ComplexRational, PotentialPolynomial

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════════
# PERIOD BOX
# ══════════════════════════════════════════════════════════════════════════════

def make_spec(periods: Sequence[int]) -> ZdSpec:
    periods = tuple(int(p) for p in periods)
    if not periods:
        raise BuiltinError("Z^d needs at least one period")
    if any(p < 2 for p in periods):
        raise BuiltinError(f"every period must be at least 2, got {list(periods)}")
    return ZdSpec(periods=periods)


def parse_periods(text: str) -> ZdSpec:
    """`3,3` -> ZdSpec((3, 3))."""
    try:
        periods = [int(p) for p in text.replace(" ", "").split(",") if p]
    except ValueError:
        raise BuiltinError(f"cannot parse periods '{text}'")
    return make_spec(periods)


def vertex_id(spec: ZdSpec, point: Sequence[int]) -> int:
    vid = 0
    stride = 1
    for n, p in zip(point, spec.periods):
        vid += (n % p) * stride
        stride *= p
    return vid


def lattice_point(spec: ZdSpec, vid: int) -> Index:
    point = []
    for p in spec.periods:
        point.append(vid % p)
        vid //= p
    return tuple(point)


def build_zd(spec: ZdSpec) -> FundamentalGraph:
    """
    One edge from every vertex to its +e_j neighbour for each axis j. Only the
    wrap-around edge from n_j = p_j - 1 to n_j = 0 carries the index e_j; for
    p_j = 2 the two edges between a pair of vertices form a double edge.
    """
    declared = []
    for vid in range(spec.volume):
        point = lattice_point(spec, vid)
        for j, p in enumerate(spec.periods):
            neighbour = list(point)
            neighbour[j] = (point[j] + 1) % p
            index = [0] * spec.dim
            if point[j] == p - 1:
                index[j] = 1
            declared.append((vid, vertex_id(spec, neighbour), index))
    names = ["(" + ",".join(str(x) for x in lattice_point(spec, v)) + ")" for v in range(spec.volume)]
    return assemble_graph(spec.dim, spec.volume, declared, names)


def _check_potential(spec: ZdSpec, potential: Potential):
    if potential.nu != spec.volume:
        raise GraphValidationError(f"potential has {potential.nu} values, the period box has {spec.volume}")


def _rows(spec: ZdSpec, axis: int) -> Dict[Index, List[int]]:
    """Vertex ids grouped by every coordinate except `axis`."""
    if not 0 <= axis < spec.dim:
        raise InvariantError(f"axis {axis} out of range for d={spec.dim}")
    rows: Dict[Index, List[int]] = defaultdict(list)
    for vid in range(spec.volume):
        point = lattice_point(spec, vid)
        rows[point[:axis] + point[axis + 1:]].append(vid)
    return dict(rows)


# ══════════════════════════════════════════════════════════════════════════════
# CLOSED FORMS
# ══════════════════════════════════════════════════════════════════════════════

def zd_periodic_polynomials(spec: ZdSpec) -> Tuple[PotentialPolynomial, PotentialPolynomial, PotentialPolynomial]:
    """I_1 = sum q, I_2 = (1/2) sum q^2, I_3 = (1/3) sum q^3 + 2 (d + d_0) I_1."""
    p = spec.volume
    i1 = PotentialPolynomial.power_sum(p, 1)
    i2 = PotentialPolynomial.power_sum(p, 2).scale(Fraction(1, 2))
    i3 = PotentialPolynomial.power_sum(p, 3).scale(Fraction(1, 3)) + i1.scale(2 * (spec.dim + spec.double_axes))
    return i1, i2, i3


def zd_floquet_polynomials(spec: ZdSpec, axis: int) -> Tuple[PotentialPolynomial, PotentialPolynomial]:
    """
    I_{p_j+1}^{e_j} = I_1 and I_{p_j+2}^{e_j} = I_2 + (1/2) sum over rows along
    axis j of the squared row sum.
    """
    p = spec.volume
    i1, i2, _ = zd_periodic_polynomials(spec)
    row_squares = PotentialPolynomial.zero(p)
    for members in _rows(spec, axis).values():
        row_sum = PotentialPolynomial.zero(p)
        for vid in members:
            row_sum = row_sum + PotentialPolynomial.variable(p, vid)
        row_squares = row_squares + row_sum * row_sum
    return i1, i2 + row_squares.scale(Fraction(1, 2))


def zd_periodic_invariants(spec: ZdSpec, potential: Potential) -> ZdPeriodicInvariants:
    _check_potential(spec, potential)
    i1, i2, i3 = (poly.evaluate(potential.values) for poly in zd_periodic_polynomials(spec))
    return ZdPeriodicInvariants(i1=i1, i2=i2, i3=i3)


def zd_floquet_invariants(spec: ZdSpec, potential: Potential, axis: int) -> Tuple[ComplexRational, ComplexRational]:
    """Values of (I_{p_j+1}^{e_j}, I_{p_j+2}^{e_j}) for axis j (0-based)."""
    _check_potential(spec, potential)
    linear, quadratic = zd_floquet_polynomials(spec, axis)
    return linear.evaluate(potential.values), quadratic.evaluate(potential.values)


def row_sum_square_invariant(spec: ZdSpec, potential: Potential, axis: int) -> ComplexRational:
    """Sum over rows along axis j of the squared row sum; equals 2 (I_{p_j+2}^{e_j} - I_2)."""
    _check_potential(spec, potential)
    total = ZERO
    for members in _rows(spec, axis).values():
        row_sum = ZERO
        for vid in members:
            row_sum = row_sum + potential.values[vid]
        total = total + row_sum * row_sum
    return total


# ══════════════════════════════════════════════════════════════════════════════
# FOURIER FORM
# ══════════════════════════════════════════════════════════════════════════════

def potential_grid(spec: ZdSpec, potential: Potential) -> np.ndarray:
    _check_potential(spec, potential)
    return potential.to_complex_array().reshape(spec.periods, order="F")


def dft(spec: ZdSpec, potential: Potential) -> FourierPotential:
    """Q^(l) = (1/p) sum_n exp(-2 pi i sum_j l_j n_j / p_j) Q(n)."""
    grid = potential_grid(spec, potential)
    return FourierPotential(spec=spec, values=np.fft.fftn(grid) / spec.volume)


def inverse_dft(fourier: FourierPotential) -> np.ndarray:
    """Potential values on the period box, in vertex-id order."""
    grid = np.fft.ifftn(fourier.values * fourier.spec.volume)
    return grid.reshape(-1, order="F")


def fourier_row_invariant(fourier: FourierPotential, axis: int) -> float:
    """Sum of |Q^(l)|^2 over frequencies with l_j = 0."""
    section = np.take(fourier.values, 0, axis=axis)
    return float(np.sum(np.abs(section) ** 2))


def fourier_linear_invariant(spec: ZdSpec, potential: Potential) -> complex:
    """I_1 = p Q^(0), valid for complex potentials as well."""
    fourier = dft(spec, potential)
    return complex(spec.volume * fourier.values[(0,) * spec.dim])


def fourier_invariants(spec: ZdSpec, potential: Potential) -> Dict[str, object]:
    """
    I_1, I_2 and I_{p_j+2}^{e_j} for every axis, computed from the DFT of a
    real potential.
    """
    if not potential.is_real:
        raise InvariantError("Fourier forms of I_2 and I_{p_j+2}^{e_j} require a real potential")
    fourier = dft(spec, potential)
    p = spec.volume
    i2 = p / 2 * float(np.sum(np.abs(fourier.values) ** 2))
    floquet = [
        i2 + p * spec.periods[j] / 2 * fourier_row_invariant(fourier, j)
        for j in range(spec.dim)
    ]
    return {
        "I1": complex(p * fourier.values[(0,) * spec.dim]).real,
        "I2": i2,
        "floquet": floquet,
    }


def zd_fourier_comparison(spec: ZdSpec, potential: Potential) -> dict:
    """Direct closed forms next to their Fourier forms, with relative residuals."""
    direct = zd_periodic_invariants(spec, potential)
    fourier = fourier_invariants(spec, potential)

    def residual(exact: ComplexRational, approx: float) -> float:
        value = complex(exact)
        return abs(value - approx) / max(1.0, abs(value))

    axes = []
    for j in range(spec.dim):
        linear, quadratic = zd_floquet_invariants(spec, potential, j)
        axes.append({
            "axis": j,
            "order": spec.periods[j] + 2,
            "direct": str(quadratic),
            "fourier": fourier["floquet"][j],
            "residual": residual(quadratic, fourier["floquet"][j]),
            "linear": str(linear),
        })
    result = {
        "spec": spec.to_dict(),
        "I1": {"direct": str(direct.i1), "fourier": fourier["I1"], "residual": residual(direct.i1, fourier["I1"])},
        "I2": {"direct": str(direct.i2), "fourier": fourier["I2"], "residual": residual(direct.i2, fourier["I2"])},
        "I3": {"direct": str(direct.i3)},
        "axes": axes,
    }
    result["max_residual"] = max(
        [result["I1"]["residual"], result["I2"]["residual"]] + [a["residual"] for a in axes]
    )
    logger.info(f"Z^d Fourier comparison for {list(spec.periods)}: max residual {result['max_residual']:.3e}")
    return result


def box_points(spec: ZdSpec) -> List[Index]:
    """Lattice points of the period box in vertex-id order."""
    return [tuple(reversed(t)) for t in itertools.product(*(range(p) for p in reversed(spec.periods)))]
