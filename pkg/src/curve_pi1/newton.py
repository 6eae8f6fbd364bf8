"""
Newton polygon analysis of plane curve germs at the origin.

Only the lower-left (local) part of the polygon is computed: the compact
faces joining the leftmost-lowest support point to the lowest-leftmost one.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, FrozenSet, List, Optional, Tuple

import sympy
from sympy import Poly, QQ, factor_list

from .exactpoly import PolynomialError, SparsePolynomial, ZeroPolynomialError

logger = logging.getLogger(__name__)

Point = Tuple[int, int]


@dataclass(frozen=True)
class NewtonEdge:
    """Hull segment from `start` (upper left) down to `end` (lower right)."""
    start: Point
    end: Point

    @property
    def width(self) -> int:
        return self.end[0] - self.start[0]

    @property
    def height(self) -> int:
        return self.start[1] - self.end[1]

    @property
    def lattice_length(self) -> int:
        return gcd(self.width, self.height)

    @property
    def direction(self) -> Point:
        g = self.lattice_length
        return (self.width // g, -self.height // g)

    @property
    def inclination(self) -> Fraction:
        """-di/dj along the edge; y ~ r*x^inclination on this edge."""
        return Fraction(self.width, self.height)

    def contains(self, point: Point) -> bool:
        i, j = point
        if not (self.start[0] <= i <= self.end[0] and self.end[1] <= j <= self.start[1]):
            return False
        return (i - self.start[0]) * self.height == (self.start[1] - j) * self.width

    def to_dict(self) -> Dict:
        return {
            'start': list(self.start),
            'end': list(self.end),
            'direction': list(self.direction),
            'lattice_length': self.lattice_length,
        }


@dataclass(frozen=True)
class NewtonPolygon:
    support: FrozenSet[Point]
    edges: Tuple[NewtonEdge, ...]

    @property
    def vertices(self) -> List[Point]:
        if not self.edges:
            return []
        return [self.edges[0].start] + [e.end for e in self.edges]

    def to_dict(self) -> Dict:
        return {'edges': [e.to_dict() for e in self.edges]}


def _cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _require_nonzero(p: SparsePolynomial):
    if p.is_zero:
        raise ZeroPolynomialError("Newton analysis of the zero polynomial is undefined")


def polygon(p: SparsePolynomial) -> NewtonPolygon:
    """Lower-left convex hull of the support (Andrew's monotone chain)."""
    _require_nonzero(p)
    if len(p.variables) != 2:
        raise PolynomialError(f"Newton polygons need two variables, got {p.variables}")
    points = sorted(set(p.support()))
    first = points[0]
    last = min(points, key=lambda pt: (pt[1], pt[0]))

    lower: List[Point] = []
    for pt in points:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    chain = lower[:lower.index(last) + 1]
    edges = tuple(NewtonEdge(a, b) for a, b in zip(chain, chain[1:]))
    assert not edges or edges[0].start == first
    return NewtonPolygon(frozenset(points), edges)


def multiplicity(p: SparsePolynomial) -> int:
    """Order of p at the origin."""
    _require_nonzero(p)
    return p.lowest_degree()


def initial_form(p: SparsePolynomial) -> SparsePolynomial:
    return p.homogeneous_part(multiplicity(p))


# --- tangent cone ---

@dataclass(frozen=True)
class TangentLine:
    """Line through the origin: y = slope*x, or x = 0 when slope is None."""
    slope: Optional[Fraction]
    exponent: int

    @property
    def label(self) -> str:
        return direction_label(self.slope)


def direction_label(slope: Optional[Fraction]) -> str:
    if slope is None:
        return "x=0"
    if slope == 0:
        return "y=0"
    if slope == 1:
        return "y=x"
    if slope == -1:
        return "y=-x"
    return f"y={slope}*x"


def parse_direction(label: str) -> Optional[Fraction]:
    """Inverse of direction_label."""
    text = label.replace(" ", "")
    if text == "x=0":
        return None
    if text == "y=0":
        return Fraction(0)
    if text == "y=x":
        return Fraction(1)
    if text == "y=-x":
        return Fraction(-1)
    if text.startswith("y=") and text.endswith("*x"):
        try:
            return Fraction(text[2:-2])
        except ValueError:
            pass
    raise PolynomialError(f"Unrecognised direction '{label}'. Use x=0, y=0, y=x, y=-x or y=<rational>*x")


@dataclass(frozen=True)
class TangentCone:
    lines: Tuple[TangentLine, ...]
    remainder: Optional[SparsePolynomial]

    @property
    def remainder_degree(self) -> int:
        return 0 if self.remainder is None else self.remainder.degree()

    @property
    def x_power(self) -> int:
        return sum(line.exponent for line in self.lines if line.slope is None)

    @property
    def y_power(self) -> int:
        return sum(line.exponent for line in self.lines if line.slope == 0)

    def line(self, slope: Optional[Fraction]) -> Optional[TangentLine]:
        for candidate in self.lines:
            if candidate.slope == slope:
                return candidate
        return None

    def to_dict(self) -> Dict:
        return {
            'lines': [{'direction': l.label, 'exponent': l.exponent} for l in self.lines],
            'remainder': None if self.remainder is None else self.remainder.to_text(),
        }


def _univariate(coefficients: Dict[int, Fraction]) -> Poly:
    t = sympy.Symbol('t')
    rep = {(k,): sympy.Rational(c.numerator, c.denominator) for k, c in coefficients.items()}
    return Poly.from_dict(rep, t, domain=QQ)


def tangent_cone(p: SparsePolynomial) -> TangentCone:
    """
    Factor the initial form into x-power, y-power and rational lines.

    Irrational content is kept unfactored in `remainder` (homogeneous in x, y).
    """
    form = initial_form(p)
    ax = min(e[0] for e in form.support())
    ay = min(e[1] for e in form.support())
    lines: List[TangentLine] = []
    if ax:
        lines.append(TangentLine(None, ax))
    if ay:
        lines.append(TangentLine(Fraction(0), ay))

    # y/x = t on the cofactor; x and y no longer divide it
    cofactor = {e[1] - ay: c for e, c in form.terms}
    remainder = None
    if len(cofactor) > 1:
        _, factors = factor_list(_univariate(cofactor))
        rest = sympy.Integer(1)
        t = sympy.Symbol('t')
        for factor, exponent in factors:
            if factor.degree() == 1:
                a1, a0 = factor.all_coeffs()
                root = -sympy.Rational(a0) / sympy.Rational(a1)
                lines.append(TangentLine(Fraction(int(root.p), int(root.q)), exponent))
            else:
                rest *= factor.as_expr() ** exponent
        if rest != 1:
            rest_poly = Poly(rest, t, domain=QQ)
            deg = rest_poly.degree()
            x, y = p.variables
            remainder = SparsePolynomial.from_terms(
                (x, y), [((deg - k, k), c) for (k,), c in rest_poly.terms()])
    lines.sort(key=lambda l: (l.slope is not None, l.slope if l.slope is not None else 0))
    return TangentCone(tuple(lines), remainder)


# --- quasi-homogeneous type ---

@dataclass(frozen=True)
class QuasiType:
    pair: Optional[Tuple[int, int]]
    reason: Optional[str] = None

    @property
    def conclusive(self) -> bool:
        return self.pair is not None

    def to_dict(self):
        return list(self.pair) if self.pair else {'inconclusive': self.reason}


def quasi_type(p: SparsePolynomial) -> QuasiType:
    """(p, q) when the polygon is the single coprime segment (0,p)-(q,0)."""
    poly = polygon(p)
    if not poly.edges:
        return QuasiType(None, "no compact edge")
    if len(poly.edges) > 1:
        return QuasiType(None, f"multi-edge ({len(poly.edges)} edges)")
    edge = poly.edges[0]
    if edge.start[0] != 0 or edge.end[1] != 0:
        return QuasiType(None, "missing endpoint on an axis")
    if edge.lattice_length != 1:
        return QuasiType(None, f"non-coprime edge (gcd {edge.lattice_length})")
    return QuasiType((edge.height, edge.width))


# --- edge polynomials ---

def _check_edge(p: SparsePolynomial, edge: NewtonEdge):
    if edge not in polygon(p).edges:
        raise PolynomialError(f"Edge {edge.start}-{edge.end} is not an edge of the Newton polygon")


def edge_polynomial(p: SparsePolynomial, edge: NewtonEdge, reduced: bool = False) -> SparsePolynomial:
    """
    Sum of c*t^(j - j_end) over the support points on the edge.

    With reduced=True the variable is s = t^(height/lattice_length), so the
    degree equals the lattice length.
    """
    step = edge.height // edge.lattice_length if reduced else 1
    coefficients = {((e[1] - edge.end[1]) // step,): c for e, c in p.terms if edge.contains(e)}
    return SparsePolynomial.from_terms(('s',) if reduced else ('t',), coefficients)


@dataclass(frozen=True)
class EdgeRoots:
    roots: Tuple[Tuple[Fraction, int], ...]
    unresolved_degree: int

    @property
    def resolved(self) -> bool:
        return self.unresolved_degree == 0

    def to_dict(self) -> Dict:
        return {
            'roots': [[str(r), k] for r, k in self.roots],
            'unresolved_degree': self.unresolved_degree,
        }


def rational_roots(poly: SparsePolynomial) -> EdgeRoots:
    """Rational roots with multiplicity of a univariate polynomial, plus unresolved degree."""
    coefficients = {e[0]: c for e, c in poly.terms}
    _, factors = factor_list(_univariate(coefficients))
    roots = []
    unresolved = 0
    for factor, exponent in factors:
        if factor.degree() == 1:
            a1, a0 = factor.all_coeffs()
            root = -sympy.Rational(a0) / sympy.Rational(a1)
            roots.append((Fraction(int(root.p), int(root.q)), exponent))
        elif factor.degree() > 1:
            unresolved += factor.degree() * exponent
    roots.sort()
    return EdgeRoots(tuple(roots), unresolved)


def edge_roots(p: SparsePolynomial, edge: NewtonEdge) -> EdgeRoots:
    """Rational roots of the edge polynomial; a root r means y ~ r*x^(width/height)."""
    _check_edge(p, edge)
    return rational_roots(edge_polynomial(p, edge))
