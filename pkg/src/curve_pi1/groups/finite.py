"""
Finite target groups as multiplication tables, and homomorphism counting.

Counting enumerates generator-image tuples: the first image is fanned out to
worker threads, the remaining coordinates are enumerated in numpy chunks and
filtered relator by relator.

The `full` catalog lists one group of every isomorphism type of order at
most 24, then A5 and Sym5.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional

import numpy as np
from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.named_groups import AlternatingGroup, DihedralGroup, SymmetricGroup

from .. import config
from .presentation import Presentation

logger = logging.getLogger(__name__)


class HomCountBudgetExceeded(Exception):
    """The number of generator-image tuples exceeds the configured cap."""

    def __init__(self, target: str, tuples: int, cap: int):
        super().__init__(f"{tuples} tuples into {target} exceed the cap of {cap}")
        self.target = target
        self.tuples = tuples
        self.cap = cap


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    name: str
    table: np.ndarray
    identity: int

    @property
    def order(self) -> int:
        return self.table.shape[0]

    @property
    def inverse(self) -> np.ndarray:
        return _inverses(self)

    def power(self, k: int) -> np.ndarray:
        """g^k for every element g (k >= 0)."""
        elements = np.arange(self.order)
        result = np.full(self.order, self.identity)
        for _ in range(k):
            result = self.table[result, elements]
        return result

    def count_solutions(self, k: int) -> int:
        """#{g : g^k = 1}"""
        return int(np.count_nonzero(self.power(k) == self.identity))


@lru_cache(maxsize=None)
def _inverses(group: FiniteGroup) -> np.ndarray:
    rows, cols = np.nonzero(group.table == group.identity)
    inverse = np.empty(group.order, dtype=np.int64)
    inverse[rows] = cols
    return inverse


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return FiniteGroup('trivial' if n == 1 else f"C{n}", (idx[:, None] + idx[None, :]) % n, 0)


def permutation_group_table(name: str, group: PermutationGroup) -> FiniteGroup:
    """Table of a sympy permutation group, elements sorted by array form."""
    elements = sorted(group.generate(), key=lambda p: p.array_form)
    index = {tuple(p.array_form): i for i, p in enumerate(elements)}
    table = np.empty((len(elements), len(elements)), dtype=np.int64)
    for i, p in enumerate(elements):
        for j, q in enumerate(elements):
            table[i, j] = index[tuple((p * q).array_form)]
    identity = index[tuple(range(group.degree))]
    return FiniteGroup(name, table, identity)


def direct_product(name: str, left: FiniteGroup, right: FiniteGroup) -> FiniteGroup:
    """Element (g, h) has index g * |right| + h."""
    m = right.order
    g = np.repeat(np.arange(left.order), m)
    h = np.tile(np.arange(m), left.order)
    table = left.table[g[:, None], g[None, :]] * m + right.table[h[:, None], h[None, :]]
    return FiniteGroup(name, table, left.identity * m + right.identity)


def abelian_group(name: str, *orders: int) -> FiniteGroup:
    group = cyclic_group(orders[0])
    for n in orders[1:]:
        group = direct_product(name, group, cyclic_group(n))
    return group


def metacyclic_group(name: str, n: int, m: int, r: int, s: int = 0) -> FiniteGroup:
    """
    <a, x | a^n, x^m = a^s, x a x^-1 = a^r>, of order n*m.

    Element a^i x^j has index i + n*j. Needs r^m = 1 and r*s = s modulo n.

    Raises:
        ValueError: the parameters do not define a group of order n*m
    """
    if pow(r, m, n) != 1 % n or (r * s - s) % n:
        raise ValueError(f"({n}, {m}, {r}, {s}) does not define a metacyclic group")
    idx = np.arange(n * m)
    i, j = idx % n, idx // n
    twist = np.array([pow(r, k, n) for k in range(m)])
    wraps = (j[:, None] + j[None, :]) >= m
    i_prod = (i[:, None] + twist[j][:, None] * i[None, :] + s * wraps) % n
    j_prod = (j[:, None] + j[None, :]) % m
    return FiniteGroup(name, i_prod + n * j_prod, 0)


def dicyclic_group(name: str, k: int) -> FiniteGroup:
    """Order 4k; Q8 is k = 2."""
    return metacyclic_group(name, 2 * k, 2, -1, k)


def semidirect_product(name: str, normal: FiniteGroup, acting: FiniteGroup, action: np.ndarray) -> FiniteGroup:
    """
    N x| H with h n h^-1 = action[h, n]; element (n, h) has index n + |N|*h.

    `action` must be a homomorphism H -> Aut(N), one row per element of H.
    """
    size = normal.order
    idx = np.arange(size * acting.order)
    n, h = idx % size, idx // size
    n_prod = normal.table[n[:, None], action[h[:, None], n[None, :]]]
    h_prod = acting.table[h[:, None], h[None, :]]
    return FiniteGroup(name, n_prod + size * h_prod, normal.identity + size * acting.identity)


def cyclic_action(automorphism: np.ndarray, m: int) -> np.ndarray:
    """Rows sigma^0 .. sigma^(m-1) for C_m acting through one automorphism (sigma^m = 1)."""
    rows = [np.arange(automorphism.shape[0])]
    for _ in range(1, m):
        rows.append(automorphism[rows[-1]])
    if not np.array_equal(automorphism[rows[-1]], rows[0]):
        raise ValueError(f"Automorphism order does not divide {m}")
    return np.array(rows)


def extend_to_automorphism(group: FiniteGroup, generators: List[int], images: List[int]) -> np.ndarray:
    """
    Element map of the automorphism sending each generator to its image.

    Raises:
        ValueError: the images do not define an automorphism
    """
    mapping = {group.identity: group.identity}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s, t in zip(generators, images):
                h = int(group.table[g, s])
                value = int(group.table[mapping[g], t])
                if h not in mapping:
                    mapping[h] = value
                    nxt.append(h)
                elif mapping[h] != value:
                    raise ValueError(f"Generator images do not define a homomorphism of {group.name}")
        frontier = nxt
    if len(mapping) != group.order or len(set(mapping.values())) != group.order:
        raise ValueError(f"Generator images do not define an automorphism of {group.name}")
    return np.array([mapping[g] for g in range(group.order)])


def _inversion_action(normal: FiniteGroup, character: np.ndarray) -> np.ndarray:
    """H acts on an abelian N by inversion where character is odd, trivially elsewhere."""
    identity = np.arange(normal.order)
    return np.array([normal.inverse if odd else identity for odd in character])


def _pauli_group() -> FiniteGroup:
    # monomial action of X, Z and iI on the eight vectors i^t e_k (index 4k + t)
    x = Permutation([4, 5, 6, 7, 0, 1, 2, 3])
    z = Permutation([0, 1, 2, 3, 6, 7, 4, 5])
    i = Permutation([1, 2, 3, 0, 5, 6, 7, 4])
    return permutation_group_table('C4oD8', PermutationGroup([x, z, i]))


def _special_linear_2_3() -> FiniteGroup:
    quaternion = dicyclic_group('Q8', 2)
    a, x = 1, 4  # a^1 x^0 and a^0 x^1
    ax = int(quaternion.table[a, x])
    # i -> j -> k -> i
    rotate = extend_to_automorphism(quaternion, [a, x], [x, ax])
    return semidirect_product('SL(2,3)', quaternion, cyclic_group(3), cyclic_action(rotate, 3))


def _semidirect_c2c2_c4() -> FiniteGroup:
    klein = abelian_group('C2xC2', 2, 2)
    swap = np.array([0, 2, 1, 3])
    return semidirect_product('C2^2:C4', klein, cyclic_group(4), cyclic_action(swap, 4))


def _generalized_dihedral_c3c3() -> FiniteGroup:
    base = abelian_group('C3xC3', 3, 3)
    return semidirect_product('C3:Sym3', base, cyclic_group(2), _inversion_action(base, np.array([0, 1])))


def _semidirect_c3_d8() -> FiniteGroup:
    # D8 acts on C3 through D8/<a^2, x>: a^i x^j inverts iff i is odd
    dihedral = metacyclic_group('D8', 4, 2, -1)
    c3 = cyclic_group(3)
    return semidirect_product('C3:D8', c3, dihedral, _inversion_action(c3, np.arange(8) % 2))


def _sym(n: int) -> Callable[[], FiniteGroup]:
    return lambda: permutation_group_table(f"Sym{n}", SymmetricGroup(n))


def _product(name: str, left: str, right: str) -> Callable[[], FiniteGroup]:
    return lambda: direct_product(name, TargetGroupFactory.create_target(left), TargetGroupFactory.create_target(right))


class TargetGroupFactory:
    """Registry of named target groups; tables are built once per process."""

    _targets: Dict[str, Callable[[], FiniteGroup]] = {
        'trivial': lambda: cyclic_group(1),
        'Sym3': _sym(3),
        'Sym4': _sym(4),
        'Sym5': _sym(5),
        'A4': lambda: permutation_group_table('A4', AlternatingGroup(4)),
        'A5': lambda: permutation_group_table('A5', AlternatingGroup(5)),
    }
    _cache: Dict[str, FiniteGroup] = {}

    @classmethod
    def register_target(cls, name: str, builder: Callable[[], FiniteGroup]):
        cls._targets[name] = builder
        cls._cache.pop(name, None)
        logger.debug(f"Registered target group: {name}")

    @classmethod
    def create_target(cls, name: str) -> FiniteGroup:
        """
        Raises:
            ValueError: unknown target name
        """
        if name not in cls._targets:
            available = ', '.join(cls._targets.keys())
            raise ValueError(f"Unknown target group '{name}'. Available: {available}")
        if name not in cls._cache:
            cls._cache[name] = cls._targets[name]()
        return cls._cache[name]

    @classmethod
    def list_targets(cls) -> list:
        return list(cls._targets.keys())


for _n in range(2, 25):
    TargetGroupFactory.register_target(f"C{_n}", lambda n=_n: cyclic_group(n))
for _n in range(3, 13):
    TargetGroupFactory.register_target(
        f"D{2 * _n}", lambda n=_n: permutation_group_table(f"D{2 * n}", DihedralGroup(n)))

_ABELIAN = {
    'C2xC2': (2, 2), 'C2xC4': (2, 4), 'C2xC2xC2': (2, 2, 2), 'C3xC3': (3, 3), 'C2xC6': (2, 6),
    'C2xC8': (2, 8), 'C4xC4': (4, 4), 'C2xC2xC4': (2, 2, 4), 'C2xC2xC2xC2': (2, 2, 2, 2), 'C3xC6': (3, 6),
    'C2xC10': (2, 10), 'C2xC12': (2, 12), 'C2xC2xC6': (2, 2, 6),
}
for _name, _orders in _ABELIAN.items():
    TargetGroupFactory.register_target(_name, lambda name=_name, orders=_orders: abelian_group(name, *orders))

# (n, m, r, s) for <a, x | a^n, x^m = a^s, x a x^-1 = a^r>
_METACYCLIC = {
    'Q8': (4, 2, -1, 2), 'Dic3': (6, 2, -1, 3), 'Q16': (8, 2, -1, 4), 'Dic5': (10, 2, -1, 5),
    'Dic6': (12, 2, -1, 6), 'SD16': (8, 2, 3, 0), 'M16': (8, 2, 5, 0), 'C4:C4': (4, 4, -1, 0),
    'F20': (5, 4, 2, 0), 'C7:C3': (7, 3, 2, 0), 'C3:C8': (3, 8, -1, 0),
}
for _name, _params in _METACYCLIC.items():
    TargetGroupFactory.register_target(_name, lambda name=_name, params=_params: metacyclic_group(name, *params))

for _name, _left, _right in [('C2xD8', 'C2', 'D8'), ('C2xQ8', 'C2', 'Q8'), ('C3xSym3', 'C3', 'Sym3'),
                             ('C4xSym3', 'C4', 'Sym3'), ('C2xDic3', 'C2', 'Dic3'), ('C3xD8', 'C3', 'D8'),
                             ('C3xQ8', 'C3', 'Q8'), ('C2xA4', 'C2', 'A4'), ('C2xC2xSym3', 'C2xC2', 'Sym3')]:
    TargetGroupFactory.register_target(_name, _product(_name, _left, _right))

TargetGroupFactory.register_target('C4oD8', _pauli_group)
TargetGroupFactory.register_target('SL(2,3)', _special_linear_2_3)
TargetGroupFactory.register_target('C2^2:C4', _semidirect_c2c2_c4)
TargetGroupFactory.register_target('C3:Sym3', _generalized_dihedral_c3c3)
TargetGroupFactory.register_target('C3:D8', _semidirect_c3_d8)

# one group per isomorphism class, by order
GROUPS_UP_TO_24: List[str] = [
    'trivial', 'C2', 'C3', 'C4', 'C2xC2', 'C5', 'C6', 'Sym3', 'C7',
    'C8', 'C2xC4', 'C2xC2xC2', 'D8', 'Q8', 'C9', 'C3xC3', 'C10', 'D10', 'C11',
    'C12', 'C2xC6', 'A4', 'D12', 'Dic3', 'C13', 'C14', 'D14', 'C15',
    'C16', 'C2xC8', 'C4xC4', 'C2xC2xC4', 'C2xC2xC2xC2', 'D16', 'SD16', 'Q16', 'M16', 'C4:C4', 'C2xD8', 'C2xQ8',
    'C2^2:C4', 'C4oD8',
    'C17', 'C18', 'C3xC6', 'D18', 'C3xSym3', 'C3:Sym3', 'C19',
    'C20', 'C2xC10', 'D20', 'Dic5', 'F20', 'C21', 'C7:C3', 'C22', 'D22', 'C23',
    'C24', 'C2xC12', 'C2xC2xC6', 'C3:C8', 'SL(2,3)', 'Dic6', 'C4xSym3', 'D24', 'C2xDic3', 'C3:D8', 'C3xD8',
    'C3xQ8', 'Sym4', 'C2xA4', 'C2xC2xSym3',
]

CATALOGS: Dict[str, List[str]] = {
    'tiny': ['trivial', 'C2', 'C3', 'Sym3'],
}
CATALOGS['small'] = CATALOGS['tiny'] + ['C4', 'C5', 'C6', 'D8', 'D10', 'A4', 'Sym4', 'Sym5']
CATALOGS['full'] = GROUPS_UP_TO_24 + ['A5', 'Sym5']


def catalog(name: str) -> List[str]:
    if name not in CATALOGS:
        raise ValueError(f"Unknown catalog '{name}'. Available: {', '.join(CATALOGS)}")
    return list(CATALOGS[name])


# --- counting ---

def _count_for_first(pres: Presentation, group: FiniteGroup, first: int, chunk: int) -> int:
    n, k = group.order, pres.rank
    inverse = group.inverse
    relators = sorted(pres.relators, key=len)
    total = n ** (k - 1)
    count = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        rest = list(np.unravel_index(idx, (n,) * (k - 1))) if k > 1 else []
        images = [np.full(idx.shape[0], first, dtype=np.int64)] + [np.asarray(c, dtype=np.int64) for c in rest]
        for relator in relators:
            value = np.full(images[0].shape[0], group.identity, dtype=np.int64)
            for a in relator.letters:
                image = images[abs(a) - 1]
                value = group.table[value, image if a > 0 else inverse[image]]
            keep = value == group.identity
            images = [im[keep] for im in images]
            if images[0].shape[0] == 0:
                break
        count += int(images[0].shape[0])
    return count


def hom_count(pres: Presentation, group: FiniteGroup, tuple_cap: Optional[int] = None,
              workers: Optional[int] = None, chunk: Optional[int] = None) -> int:
    """
    Exact number of homomorphisms pres -> group.

    Raises:
        HomCountBudgetExceeded: order^rank is above tuple_cap
    """
    cap = config.Config.HOM_TUPLE_CAP if tuple_cap is None else tuple_cap
    workers = config.Config.HOM_WORKERS if workers is None else workers
    chunk = config.Config.HOM_CHUNK if chunk is None else chunk
    n, k = group.order, pres.rank
    if k == 0:
        return 1
    tuples = n ** k
    if tuples > cap:
        raise HomCountBudgetExceeded(group.name, tuples, cap)
    if not pres.relators:
        return tuples
    logger.debug(f"Counting homomorphisms into {group.name}: {tuples} tuples over {workers} workers")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        counts = pool.map(lambda g: _count_for_first(pres, group, g, max(1, chunk)), range(n))
        return sum(counts)


def free_product_count(p: int, q: int, group: FiniteGroup) -> int:
    """Homomorphisms Z/p * Z/q -> group: #{g^p = 1} * #{g^q = 1}."""
    return group.count_solutions(p) * group.count_solutions(q)


# --- fingerprints ---

@dataclass(frozen=True)
class FingerprintEntry:
    target: str
    count: Optional[int]

    @property
    def exhausted(self) -> bool:
        return self.count is None

    def to_dict(self) -> Dict:
        return {'target': self.target, 'count': self.count,
                'status': 'budget-exhausted' if self.exhausted else 'ok'}


@dataclass(frozen=True)
class HomFingerprint:
    catalog: str
    entries: tuple

    def counts(self) -> Dict[str, Optional[int]]:
        return {e.target: e.count for e in self.entries}

    @property
    def complete(self) -> bool:
        return not any(e.exhausted for e in self.entries)

    def compare(self, other: 'HomFingerprint') -> Dict[str, str]:
        """Per target: match, mismatch or unknown (either side exhausted)."""
        theirs = other.counts()
        verdicts = {}
        for entry in self.entries:
            other_count = theirs.get(entry.target)
            if entry.count is None or other_count is None:
                verdicts[entry.target] = 'unknown'
            else:
                verdicts[entry.target] = 'match' if entry.count == other_count else 'mismatch'
        return verdicts

    def to_dict(self) -> Dict:
        return {'catalog': self.catalog, 'entries': [e.to_dict() for e in self.entries]}


def fingerprint(pres: Presentation, catalog_name: str = 'small', tuple_cap: Optional[int] = None,
                workers: Optional[int] = None, chunk: Optional[int] = None) -> HomFingerprint:
    entries = []
    for name in catalog(catalog_name):
        group = TargetGroupFactory.create_target(name)
        try:
            count = hom_count(pres, group, tuple_cap, workers, chunk)
        except HomCountBudgetExceeded as e:
            logger.warning(f"Fingerprint entry {name} skipped: {e}")
            count = None
        entries.append(FingerprintEntry(name, count))
    logger.info(f"Fingerprint over catalog '{catalog_name}': {[e.count for e in entries]}")
    return HomFingerprint(catalog_name, tuple(entries))


def free_product_fingerprint(p: int, q: int, catalog_name: str = 'small') -> HomFingerprint:
    entries = tuple(FingerprintEntry(name, free_product_count(p, q, TargetGroupFactory.create_target(name)))
                    for name in catalog(catalog_name))
    return HomFingerprint(catalog_name, entries)
