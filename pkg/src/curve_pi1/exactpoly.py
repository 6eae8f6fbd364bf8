"""
Exact sparse polynomials for the curve family

Houses the projective curves F_{N,a,b}, their affine charts, the local
blow-up charts and the coordinate shifts used while following a branch.
Coefficients are exact rationals; arithmetic, expansion and substitution
are delegated to sympy's Poly over QQ.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import sympy
from sympy import Poly, QQ, Rational
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Coefficient = Union[int, Fraction]


class PolynomialError(ValueError):
    """Raised when a polynomial operation receives unusable input."""
    pass


class ZeroPolynomialError(PolynomialError):
    """Raised when an operation is undefined on the zero polynomial."""
    pass


class CurveParamsError(ValueError):
    """Raised when (N, a, b) violate the family's constraints."""
    pass


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    raise PolynomialError(f"Coefficient {value!r} is not an exact rational")


@dataclass(frozen=True)
class SparsePolynomial:
    """Immutable polynomial: variable names plus canonically ordered terms."""
    variables: Tuple[str, ...]
    terms: Tuple[Tuple[Exponent, Fraction], ...]

    def __post_init__(self):
        nvars = len(self.variables)
        if len(set(self.variables)) != nvars:
            raise PolynomialError(f"Repeated variable names in {self.variables}")
        previous = None
        for exponent, coefficient in self.terms:
            if len(exponent) != nvars:
                raise PolynomialError(f"Exponent {exponent} does not match variables {self.variables}")
            if any(e < 0 for e in exponent):
                raise PolynomialError(f"Negative exponent {exponent}")
            if coefficient == 0:
                raise PolynomialError("Zero coefficients are never stored")
            if previous is not None and exponent <= previous:
                raise PolynomialError("Terms must be strictly increasing in lexicographic order")
            previous = exponent

    # --- construction ---

    @classmethod
    def from_terms(cls, variables: Sequence[str], terms: Union[Mapping[Exponent, Coefficient],
                                                               Iterable[Tuple[Exponent, Coefficient]]]) -> 'SparsePolynomial':
        """Build a canonical polynomial, merging repeated exponents and dropping zeros."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: Dict[Exponent, Fraction] = {}
        for exponent, coefficient in items:
            key = tuple(int(e) for e in exponent)
            merged[key] = merged.get(key, Fraction(0)) + _to_fraction(coefficient)
        canonical = tuple(sorted((e, c) for e, c in merged.items() if c != 0))
        return cls(tuple(variables), canonical)

    @classmethod
    def zero(cls, variables: Sequence[str]) -> 'SparsePolynomial':
        return cls(tuple(variables), ())

    @classmethod
    def constant(cls, variables: Sequence[str], value: Coefficient) -> 'SparsePolynomial':
        return cls.from_terms(variables, {(0,) * len(variables): value})

    @classmethod
    def monomial(cls, variables: Sequence[str], exponent: Exponent, coefficient: Coefficient = 1) -> 'SparsePolynomial':
        return cls.from_terms(variables, {tuple(exponent): coefficient})

    @classmethod
    def gen(cls, variables: Sequence[str], name: str) -> 'SparsePolynomial':
        """The polynomial consisting of the single variable `name`."""
        variables = tuple(variables)
        if name not in variables:
            raise PolynomialError(f"Unknown variable '{name}'. Available: {', '.join(variables)}")
        exponent = tuple(1 if v == name else 0 for v in variables)
        return cls.monomial(variables, exponent)

    @classmethod
    def from_poly(cls, poly: Poly, variables: Optional[Sequence[str]] = None) -> 'SparsePolynomial':
        names = tuple(variables) if variables is not None else tuple(str(g) for g in poly.gens)
        return cls.from_terms(names, [(monom, coeff) for monom, coeff in poly.terms() if coeff != 0])

    # --- sympy bridge ---

    @property
    def symbols(self) -> Tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(name) for name in self.variables)

    def to_poly(self) -> Poly:
        rep = {exponent: Rational(c.numerator, c.denominator) for exponent, c in self.terms}
        if not rep:
            rep = {(0,) * len(self.variables): Rational(0)}
        return Poly.from_dict(rep, *self.symbols, domain=QQ)

    def to_expr(self) -> sympy.Expr:
        return self.to_poly().as_expr()

    # --- inspection ---

    def as_dict(self) -> Dict[Exponent, Fraction]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> Tuple[Exponent, ...]:
        return tuple(exponent for exponent, _ in self.terms)

    def coefficient(self, exponent: Exponent) -> Fraction:
        return self.as_dict().get(tuple(exponent), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coefficient((0,) * len(self.variables))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self.is_zero:
            return -1
        return max(sum(e) for e in self.support())

    def lowest_degree(self) -> int:
        """Smallest total degree among the terms (the order at the origin)."""
        if self.is_zero:
            raise ZeroPolynomialError("The zero polynomial has no lowest degree")
        return min(sum(e) for e in self.support())

    def is_homogeneous(self) -> bool:
        if self.is_zero:
            return True
        return len({sum(e) for e in self.support()}) == 1

    def homogeneous_part(self, degree: int) -> 'SparsePolynomial':
        return SparsePolynomial(self.variables, tuple((e, c) for e, c in self.terms if sum(e) == degree))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.terms)

    # --- arithmetic ---

    def _check_compatible(self, other: 'SparsePolynomial'):
        if self.variables != other.variables:
            raise PolynomialError(f"Variable mismatch: {self.variables} vs {other.variables}")

    def _coerce(self, other) -> 'SparsePolynomial':
        if isinstance(other, SparsePolynomial):
            self._check_compatible(other)
            return other
        if isinstance(other, (int, Fraction)):
            return SparsePolynomial.constant(self.variables, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return SparsePolynomial.from_terms(self.variables, list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self):
        return SparsePolynomial(self.variables, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero or other.is_zero:
            return SparsePolynomial.zero(self.variables)
        return SparsePolynomial.from_poly(self.to_poly() * other.to_poly(), self.variables)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise PolynomialError(f"Only non-negative integer powers are supported, got {exponent!r}")
        if exponent == 0:
            return SparsePolynomial.constant(self.variables, 1)
        if self.is_zero:
            return self
        return SparsePolynomial.from_poly(self.to_poly() ** exponent, self.variables)

    def scale(self, factor: Coefficient) -> 'SparsePolynomial':
        factor = _to_fraction(factor)
        return SparsePolynomial.from_terms(self.variables, [(e, c * factor) for e, c in self.terms])

    # --- substitution ---

    def substitute(self, images: Mapping[str, 'SparsePolynomial'],
                   variables: Optional[Sequence[str]] = None) -> 'SparsePolynomial':
        """
        Simultaneously replace variables by polynomials.

        Args:
            images: variable name -> polynomial, all over the target variables
            variables: target variables (defaults to this polynomial's)

        Returns:
            The expanded composite polynomial over the target variables
        """
        target = tuple(variables) if variables is not None else self.variables
        for name, image in images.items():
            if name not in self.variables:
                raise PolynomialError(f"Cannot substitute unknown variable '{name}'")
            if image.variables != target:
                raise PolynomialError(f"Image of '{name}' lives over {image.variables}, expected {target}")
        if self.is_zero:
            return SparsePolynomial.zero(target)
        mapping = {sympy.Symbol(name): images[name].to_expr() for name in images}
        expr = self.to_expr().xreplace(mapping)
        target_symbols = [sympy.Symbol(name) for name in target]
        return SparsePolynomial.from_poly(Poly(sympy.expand(expr), *target_symbols, domain=QQ), target)

    def map_exponents(self, transform) -> 'SparsePolynomial':
        """Apply a monomial map exponent -> exponent (exact, no expansion needed)."""
        return SparsePolynomial.from_terms(self.variables, [(transform(e), c) for e, c in self.terms])

    # --- text codec ---

    def to_text(self) -> str:
        if self.is_zero:
            return "0"
        pieces = []
        for exponent, coefficient in reversed(self.terms):
            factors = []
            for name, power in zip(self.variables, exponent):
                if power == 1:
                    factors.append(name)
                elif power > 1:
                    factors.append(f"{name}^{power}")
            magnitude = abs(coefficient)
            if magnitude != 1 or not factors:
                factors.insert(0, str(magnitude))
            sign = "-" if coefficient < 0 else "+"
            pieces.append((sign, "*".join(factors)))
        first_sign, first_body = pieces[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self) -> str:
        return self.to_text()

    def to_dict(self) -> Dict:
        return {
            'variables': list(self.variables),
            'text': self.to_text(),
            'terms': [[list(e), _format_coefficient(c)] for e, c in self.terms],
        }


def _format_coefficient(value: Fraction) -> Union[int, str]:
    return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


_TOKEN_CHECK = re.compile(r"^[\sA-Za-z0-9_+\-*/^().]*$")

# Names the parser may resolve besides the variables; no builtins, no sympy functions
_PARSE_GLOBALS = {
    '__builtins__': {},
    'Integer': sympy.Integer,
    'Rational': sympy.Rational,
    'Float': sympy.Float,
    'Symbol': sympy.Symbol,
}


def parse_polynomial(text: str, variables: Sequence[str]) -> SparsePolynomial:
    """
    Parse `coef*x^i*y^j` style text over the given variables.

    Raises:
        PolynomialError: on malformed text or unknown symbols
    """
    if not _TOKEN_CHECK.match(text):
        raise PolynomialError(f"Unexpected characters in polynomial text: {text!r}")
    local = {name: sympy.Symbol(name) for name in variables}
    try:
        expr = parse_expr(text, local_dict=local, global_dict=dict(_PARSE_GLOBALS),
                          transformations=standard_transformations + (convert_xor,))
    except Exception as e:
        raise PolynomialError(f"Could not parse polynomial {text!r}: {e}")
    if not isinstance(expr, sympy.Expr):
        raise PolynomialError(f"{text!r} does not describe a polynomial")
    unknown = expr.free_symbols - set(local.values())
    if unknown:
        names = ', '.join(sorted(str(s) for s in unknown))
        raise PolynomialError(f"Unknown symbols {names} in {text!r}")
    try:
        poly = Poly(sympy.expand(expr), *local.values(), domain=QQ)
    except sympy.PolynomialError as e:
        raise PolynomialError(f"{text!r} is not a polynomial: {e}")
    return SparsePolynomial.from_poly(poly, tuple(variables))


# =============================================================================
# The curve family
# =============================================================================

@dataclass(frozen=True)
class CurveParams:
    """(N, a, b) with N = 2m+1 odd, gcd(a,b) = 1 and gcd(N, a+b) = 1."""
    N: int
    a: int
    b: int

    def __post_init__(self):
        for name in ('N', 'a', 'b'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise CurveParamsError(f"{name} must be a positive integer, got {value!r}")
        if self.N % 2 == 0:
            raise CurveParamsError(f"N must be odd, got {self.N}")
        if self.N < 3:
            raise CurveParamsError(f"N must be at least 3 so that m = (N-1)/2 >= 1, got {self.N}")
        if gcd(self.a, self.b) != 1:
            raise CurveParamsError(f"a and b must be coprime, got gcd({self.a}, {self.b}) = {gcd(self.a, self.b)}")
        if gcd(self.N, self.d) != 1:
            raise CurveParamsError(f"N and d = a+b must be coprime, got gcd({self.N}, {self.d}) = {gcd(self.N, self.d)}")

    @property
    def m(self) -> int:
        return (self.N - 1) // 2

    @property
    def d(self) -> int:
        return self.a + self.b

    @property
    def degree(self) -> int:
        return self.d * self.N

    @property
    def multiplicity_at_p(self) -> int:
        return (self.N - 1) * self.d

    @property
    def generic_fiber_points(self) -> int:
        """Points of a generic line through P outside P."""
        return self.degree - self.multiplicity_at_p

    def to_dict(self) -> Dict:
        return {'N': self.N, 'a': self.a, 'b': self.b, 'm': self.m, 'd': self.d}


PROJECTIVE_VARIABLES = ('x', 'y', 'z')


def build_curve(params: CurveParams) -> SparsePolynomial:
    """x^{aN} y^{bN} + (x^N + y^N + x^m y^m z)^d, fully expanded."""
    x, y, z = sympy.symbols(PROJECTIVE_VARIABLES)
    N, a, b, m, d = params.N, params.a, params.b, params.m, params.d
    expr = x ** (a * N) * y ** (b * N) + (x ** N + y ** N + x ** m * y ** m * z) ** d
    curve = SparsePolynomial.from_poly(Poly(expr, x, y, z, domain=QQ), PROJECTIVE_VARIABLES)
    logger.debug(f"Built F_{{{N},{a},{b}}} with {len(curve.terms)} terms, degree {curve.degree()}")
    return curve


def _chart_index(p: SparsePolynomial, chart: Union[int, str]) -> int:
    if isinstance(chart, str):
        if chart not in p.variables:
            raise PolynomialError(f"Unknown chart variable '{chart}'. Available: {', '.join(p.variables)}")
        return p.variables.index(chart)
    if not 0 <= chart < len(p.variables):
        raise PolynomialError(f"Chart index {chart} out of range for {len(p.variables)} variables")
    return chart


def dehomogenize(p: SparsePolynomial, chart: Union[int, str]) -> SparsePolynomial:
    """Set the chart variable to 1 and drop it."""
    index = _chart_index(p, chart)
    remaining = p.variables[:index] + p.variables[index + 1:]
    return SparsePolynomial.from_terms(remaining, [(e[:index] + e[index + 1:], c) for e, c in p.terms])


def homogenize(p: SparsePolynomial, degree: int, variable: str = 'z', position: Optional[int] = None) -> SparsePolynomial:
    """Reinsert `variable` so that every term has total degree `degree`."""
    if p.degree() > degree:
        raise PolynomialError(f"Cannot homogenize degree {p.degree()} polynomial to degree {degree}")
    if variable in p.variables:
        raise PolynomialError(f"Variable '{variable}' already present")
    index = len(p.variables) if position is None else position
    variables = p.variables[:index] + (variable,) + p.variables[index:]
    return SparsePolynomial.from_terms(
        variables, [(e[:index] + (degree - sum(e),) + e[index:], c) for e, c in p.terms])


# =============================================================================
# Local moves: blow-up charts, shifts, swaps
# =============================================================================

class ChartTransform(NamedTuple):
    strict: SparsePolynomial
    exceptional_multiplicity: int


CHARTS = ('A', 'B')


def _require_plane(p: SparsePolynomial):
    if len(p.variables) != 2:
        raise PolynomialError(f"Expected a polynomial in two variables, got {p.variables}")


def chart_substitute(p: SparsePolynomial, chart: str) -> SparsePolynomial:
    """
    Total transform under a blow-up chart.

    Chart A substitutes (u, v) <- (u, u*v); chart B substitutes (u, v) <- (u*v, v).
    """
    _require_plane(p)
    if chart == 'A':
        return p.map_exponents(lambda e: (e[0] + e[1], e[1]))
    if chart == 'B':
        return p.map_exponents(lambda e: (e[0], e[0] + e[1]))
    raise PolynomialError(f"Unknown chart '{chart}'. Available: {', '.join(CHARTS)}")


def blowup_chart(p: SparsePolynomial, chart: str) -> ChartTransform:
    """
    Strict transform of p at the origin in the given chart.

    Returns:
        (strict transform, power of the exceptional variable removed)

    Raises:
        ZeroPolynomialError: p is zero
        PolynomialError: the origin is not on p
    """
    _require_plane(p)
    if p.is_zero:
        raise ZeroPolynomialError("Cannot blow up the zero polynomial")
    if p.constant_term() != 0:
        raise PolynomialError("The origin is not on the curve; nothing to blow up")
    total = chart_substitute(p, chart)
    axis = 0 if chart == 'A' else 1
    power = min(e[axis] for e in total.support())
    strict = total.map_exponents(lambda e: tuple(v - power if i == axis else v for i, v in enumerate(e)))
    return ChartTransform(strict, power)


def translate(p: SparsePolynomial, c: Coefficient, k: int) -> SparsePolynomial:
    """Substitute y <- y - c*x^k (k >= 0) in a polynomial over (x, y)."""
    _require_plane(p)
    if k < 0:
        raise PolynomialError(f"Shift exponent must be non-negative, got {k}")
    c = _to_fraction(c)
    if c == 0 or p.is_zero:
        return p
    xname, yname = p.variables
    x = SparsePolynomial.gen(p.variables, xname)
    y = SparsePolynomial.gen(p.variables, yname)
    image = y - (x ** k).scale(c)
    return p.substitute({xname: x, yname: image})


def shift(p: SparsePolynomial, c: Coefficient, k: int) -> SparsePolynomial:
    """Substitute y <- y1 - c*x^k, k a positive integer; the result is in (x, y1)."""
    if not isinstance(k, int) or k < 1:
        raise PolynomialError(f"shift expects a positive integer exponent, got {k!r}")
    return translate(p, c, k)


def swap_variables(p: SparsePolynomial) -> SparsePolynomial:
    """Exchange the roles of the two coordinates, keeping the variable names."""
    _require_plane(p)
    return p.map_exponents(lambda e: (e[1], e[0]))


# =============================================================================
# Torus-type decomposition
# =============================================================================

@dataclass(frozen=True)
class TorusDecomposition:
    """F = f_p^q + f_q^p with deg f_p = p and deg f_q = q."""
    p: int
    q: int
    f_p: SparsePolynomial
    f_q: SparsePolynomial

    def combined(self) -> SparsePolynomial:
        return self.f_p ** self.q + self.f_q ** self.p

    def verify(self, curve: SparsePolynomial) -> bool:
        return self.combined() == curve

    def to_dict(self) -> Dict:
        return {'p': self.p, 'q': self.q, 'f_p': self.f_p.to_text(), 'f_q': self.f_q.to_text()}


def torus_decomposition(params: CurveParams) -> TorusDecomposition:
    """The family is (d, N)-torus: f_d = x^a y^b and f_N = x^N + y^N + x^m y^m z."""
    v = PROJECTIVE_VARIABLES
    f_d = SparsePolynomial.monomial(v, (params.a, params.b, 0))
    f_n = SparsePolynomial.from_terms(v, {(params.N, 0, 0): 1, (0, params.N, 0): 1, (params.m, params.m, 1): 1})
    return TorusDecomposition(p=params.d, q=params.N, f_p=f_d, f_q=f_n)
