"""
Floquet Invariants — Exact Polynomial Arithmetic
Complex rationals and sparse multivariate polynomials in the potential values
q_0, ..., q_{nu-1}, with exact rational coefficients.
"""

import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

Exponents = Tuple[int, ...]
RationalLike = Union[int, Fraction]


# ══════════════════════════════════════════════════════════════════════════════
# COMPLEX RATIONALS
# ══════════════════════════════════════════════════════════════════════════════

def parse_rational(text: str) -> Fraction:
    """Parse an integer or `p/q` literal. Raises ValueError on bad input."""
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in '{text}'")


@dataclass(frozen=True)
class ComplexRational:
    """An exact complex number re + i*im with rational parts."""
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value) -> "ComplexRational":
        if isinstance(value, ComplexRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        if isinstance(value, str):
            return cls(parse_rational(value))
        raise TypeError(f"cannot interpret {value!r} as a complex rational")

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __add__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return ComplexRational.coerce(other) - self

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __mul__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative powers are not supported")
        result = ComplexRational(Fraction(1))
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        try:
            other = ComplexRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def to_dict(self):
        return {"re": str(self.re), "im": str(self.im)}


ZERO = ComplexRational()
ONE = ComplexRational(Fraction(1))


# ══════════════════════════════════════════════════════════════════════════════
# SPARSE POLYNOMIALS
# ══════════════════════════════════════════════════════════════════════════════

def _grlex_key(exps: Exponents):
    # highest total degree first, then lexicographically largest exponent vector
    return (-sum(exps), tuple(-e for e in exps))


class PotentialPolynomial:
    """
    Sparse polynomial in the potential values q_0..q_{nu-1}.

    Terms are stored as {exponent vector: rational coefficient}; zero
    coefficients are never stored. Instances are treated as immutable values.
    """

    __slots__ = ("nu", "_terms")

    def __init__(self, nu: int, terms: Optional[Mapping[Exponents, RationalLike]] = None):
        self.nu = nu
        self._terms: Dict[Exponents, Fraction] = {}
        if terms:
            for exps, coeff in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != nu:
                    raise ValueError(f"exponent vector {exps} does not have length {nu}")
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                coeff = Fraction(coeff)
                if coeff:
                    self._terms[exps] = self._terms.get(exps, Fraction(0)) + coeff
                    if not self._terms[exps]:
                        del self._terms[exps]

    # ─── Constructors ──────────────────────────────────────────────────────

    @classmethod
    def zero(cls, nu: int) -> "PotentialPolynomial":
        return cls(nu)

    @classmethod
    def constant(cls, nu: int, value: RationalLike) -> "PotentialPolynomial":
        return cls(nu, {(0,) * nu: value})

    @classmethod
    def variable(cls, nu: int, vertex: int) -> "PotentialPolynomial":
        exps = [0] * nu
        exps[vertex] = 1
        return cls(nu, {tuple(exps): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff: RationalLike = 1) -> "PotentialPolynomial":
        return cls(len(exps), {tuple(exps): coeff})

    @classmethod
    def power_sum(cls, nu: int, power: int) -> "PotentialPolynomial":
        """Σ_v q_v^power."""
        terms = {}
        for v in range(nu):
            exps = [0] * nu
            exps[v] = power
            terms[tuple(exps)] = 1
        return cls(nu, terms)

    # ─── Inspection ────────────────────────────────────────────────────────

    @property
    def terms(self) -> Dict[Exponents, Fraction]:
        return dict(self._terms)

    def sorted_terms(self) -> List[Tuple[Exponents, Fraction]]:
        """Terms in canonical graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda item: _grlex_key(item[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(e) for e in self._terms), default=-1)

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def has_integer_coefficients(self) -> bool:
        return all(c.denominator == 1 for c in self._terms.values())

    # ─── Arithmetic ────────────────────────────────────────────────────────

    def _lift(self, other) -> "PotentialPolynomial":
        if isinstance(other, PotentialPolynomial):
            if other.nu != self.nu:
                raise ValueError(f"polynomials over {self.nu} and {other.nu} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return PotentialPolynomial.constant(self.nu, other)
        raise TypeError(f"cannot combine polynomial with {type(other).__name__}")

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self._terms)
        for exps, coeff in other._terms.items():
            terms[exps] = terms.get(exps, Fraction(0)) + coeff
        return PotentialPolynomial(self.nu, terms)

    __radd__ = __add__

    def __neg__(self):
        return PotentialPolynomial(self.nu, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._lift(other)
        terms: Dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                terms[exps] = terms.get(exps, Fraction(0)) + c1 * c2
        return PotentialPolynomial(self.nu, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative powers are not supported")
        result = PotentialPolynomial.constant(self.nu, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, factor: RationalLike) -> "PotentialPolynomial":
        factor = Fraction(factor)
        return PotentialPolynomial(self.nu, {e: c * factor for e, c in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PotentialPolynomial.constant(self.nu, other)
        if not isinstance(other, PotentialPolynomial):
            return NotImplemented
        return self.nu == other.nu and self._terms == other._terms

    def __hash__(self):
        return hash((self.nu, frozenset(self._terms.items())))

    # ─── Evaluation ────────────────────────────────────────────────────────

    def evaluate(self, values: Sequence) -> ComplexRational:
        """Exact substitution q_v -> values[v] (complex rationals or rationals)."""
        if len(values) != self.nu:
            raise ValueError(f"expected {self.nu} potential values, got {len(values)}")
        values = [ComplexRational.coerce(v) for v in values]
        powers: Dict[Tuple[int, int], ComplexRational] = {}
        total = ZERO
        for exps, coeff in self._terms.items():
            term = ComplexRational(coeff)
            for v, e in enumerate(exps):
                if e:
                    key = (v, e)
                    if key not in powers:
                        powers[key] = values[v] ** e
                    term = term * powers[key]
            total = total + term
        return total

    # ─── Serialization ─────────────────────────────────────────────────────

    def to_json(self) -> List[dict]:
        return [{"coeff": str(c), "exps": list(e)} for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, nu: int, records: Iterable[dict]) -> "PotentialPolynomial":
        return cls(nu, {tuple(r["exps"]): Fraction(r["coeff"]) for r in records})

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exps, coeff in self.sorted_terms():
            factors = [f"q{v}^{e}" if e > 1 else f"q{v}" for v, e in enumerate(exps) if e]
            if not factors:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append("*".join(factors))
            elif coeff == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(f"{coeff}*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"PotentialPolynomial({self})"


# ══════════════════════════════════════════════════════════════════════════════
# SYMMETRIC POLYNOMIALS
# ══════════════════════════════════════════════════════════════════════════════

def symmetric_h(s: int, values: Sequence):
    """
    Complete homogeneous symmetric polynomial h_s of degree s in `values`.

    Works for numbers, complex rationals and polynomials alike; h_2 includes
    the squares (j <= l). Returns 0 for an empty sequence.
    """
    if s not in (1, 2):
        raise ValueError(f"h_s is only provided for s in (1, 2), got {s}")
    values = list(values)
    if s == 1:
        terms = values
    else:
        terms = [values[j] * values[l] for j in range(len(values)) for l in range(j, len(values))]
    if not terms:
        return 0
    return reduce(operator.add, terms)


def power_sum(s: int, values: Sequence):
    """Power sum Σ x_j^s, used in the Newton identity 2h_2 = h_1^2 + p_2."""
    values = list(values)
    if not values:
        return 0
    return reduce(operator.add, [x ** s for x in values])
