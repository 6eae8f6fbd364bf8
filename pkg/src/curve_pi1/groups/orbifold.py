"""
Fundamental groups of genus-0 orbifolds and the pencil of a torus-type curve.
"""

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, List, Optional, Tuple

from sympy import factor_list

from ..braid import FreeWord
from ..exactpoly import PROJECTIVE_VARIABLES, SparsePolynomial
from .presentation import Presentation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrbifoldSpec:
    """Genus-0 orbifold: cone points of the given orders plus `punctures` removed points."""
    punctures: int = 0
    cone_points: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.punctures < 0:
            raise ValueError(f"Puncture count must be non-negative, got {self.punctures}")
        for m in self.cone_points:
            if m < 2:
                raise ValueError(f"Cone point orders must be >= 2, got {m}")

    def to_dict(self) -> Dict:
        return {'genus': 0, 'punctures': self.punctures, 'cone_points': list(self.cone_points)}


def orbifold_pi1(spec: OrbifoldSpec) -> Presentation:
    """Generators: cone points then punctures; relators: u_{n+k}...u_1 and u_j^{m_j}."""
    n = len(spec.cone_points)
    rank = n + spec.punctures
    if rank == 0:
        return Presentation((), ())
    generators = tuple(f"u{i}" for i in range(1, rank + 1))
    relators = [FreeWord.descending_product(rank)]
    relators += [FreeWord.generator(rank, j + 1) ** m for j, m in enumerate(spec.cone_points)]
    return Presentation(generators, tuple(relators))


@dataclass(frozen=True)
class TorusPencil:
    p: int
    q: int
    spec: OrbifoldSpec
    certificate: Dict[str, int]

    def to_dict(self) -> Dict:
        return {'p': self.p, 'q': self.q, 'spec': self.spec.to_dict(), 'fiber_multiplicities': self.certificate}


def _fiber_multiplicity(member: SparsePolynomial) -> int:
    """gcd of the exponents in the factorisation of a pencil member."""
    _, factors = factor_list(member.to_poly())
    exponents = [e for _, e in factors]
    g = 0
    for e in exponents:
        g = gcd(g, e)
    return g


def _generic_form(degree: int) -> SparsePolynomial:
    v = PROJECTIVE_VARIABLES
    return SparsePolynomial.from_terms(v, {(degree, 0, 0): 1, (0, degree, 0): 1, (0, 0, degree): 1})


def torus_pencil_orbifold(p: int, q: int, f_p: Optional[SparsePolynomial] = None,
                          f_q: Optional[SparsePolynomial] = None) -> TorusPencil:
    """
    Orbifold base of [x:y:z] -> [f_p^q : f_q^p], punctured at [1:-1].

    The fiber over [0:1] is f_p^q and over [1:0] is f_q^p; their
    multiplicities are read from the factorisations. Order-1 points are dropped.

    Raises:
        ValueError: gcd(p, q) != 1
    """
    if p < 1 or q < 1 or gcd(p, q) != 1:
        raise ValueError(f"Torus pencil needs coprime positive (p, q), got ({p}, {q})")
    f_p = f_p if f_p is not None else _generic_form(p)
    f_q = f_q if f_q is not None else _generic_form(q)
    certificate = {
        '[0:1]': _fiber_multiplicity(f_p ** q),
        '[1:0]': _fiber_multiplicity(f_q ** p),
    }
    cones = tuple(m for m in (certificate['[0:1]'], certificate['[1:0]']) if m > 1)
    spec = OrbifoldSpec(punctures=1, cone_points=cones)
    logger.debug(f"Torus pencil ({p},{q}): fiber multiplicities {certificate}")
    return TorusPencil(p, q, spec, certificate)


def torus_decomposition_note(p: int, q: int) -> Optional[str]:
    """Other coprime non-trivial factor pairs of pq; None when (p, q) is the only one."""
    n = p * q
    pairs: List[Tuple[int, int]] = []
    for small in range(2, int(n ** 0.5) + 1):
        if n % small == 0 and gcd(small, n // small) == 1:
            pairs.append((small, n // small))
    others = [pair for pair in pairs if pair != tuple(sorted((p, q)))]
    if not others:
        return None
    return (f"pq = {n} also splits as " + ", ".join(f"({a},{b})" for a, b in others)
            + "; the decomposition is not canonical")
