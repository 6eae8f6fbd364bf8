"""
The free product Z/p * Z/q with generators a (order p) and b (order q).

Elements are kept in alternating syllable normal form, so equality of
elements is equality of normal forms.
"""

import logging
import re
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .. import config
from ..braid import FreeWord
from .presentation import Presentation

logger = logging.getLogger(__name__)

Syllable = Tuple[str, int]


@dataclass(frozen=True)
class FreeProductWord:
    p: int
    q: int
    syllables: Tuple[Syllable, ...] = ()

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError(f"Factor orders must be positive, got ({self.p}, {self.q})")
        object.__setattr__(self, 'syllables', _normal_form(self.p, self.q, self.syllables))

    def order_of(self, tag: str) -> int:
        return self.p if tag == 'a' else self.q

    @classmethod
    def identity(cls, p: int, q: int) -> 'FreeProductWord':
        return cls(p, q, ())

    @classmethod
    def a(cls, p: int, q: int, exponent: int = 1) -> 'FreeProductWord':
        return cls(p, q, (('a', exponent),))

    @classmethod
    def b(cls, p: int, q: int, exponent: int = 1) -> 'FreeProductWord':
        return cls(p, q, (('b', exponent),))

    @classmethod
    def parse(cls, text: str, p: int, q: int) -> 'FreeProductWord':
        syllables = []
        for token in text.replace("*", " ").split():
            if token in ("1", "e"):
                continue
            match = re.fullmatch(r"([ab])(?:\^(-?\d+))?", token)
            if not match:
                raise ValueError(f"Bad free-product token '{token}'")
            syllables.append((match.group(1), int(match.group(2) or 1)))
        return cls(p, q, tuple(syllables))

    def _check(self, other: 'FreeProductWord'):
        if (self.p, self.q) != (other.p, other.q):
            raise ValueError(f"Cannot combine Z/{self.p}*Z/{self.q} with Z/{other.p}*Z/{other.q}")

    def __mul__(self, other: 'FreeProductWord') -> 'FreeProductWord':
        self._check(other)
        return FreeProductWord(self.p, self.q, self.syllables + other.syllables)

    def inverse(self) -> 'FreeProductWord':
        return FreeProductWord(self.p, self.q, tuple((t, -e) for t, e in reversed(self.syllables)))

    def __pow__(self, n: int) -> 'FreeProductWord':
        base = self if n >= 0 else self.inverse()
        return FreeProductWord(self.p, self.q, base.syllables * abs(n))

    @property
    def is_identity(self) -> bool:
        return not self.syllables

    @property
    def syllable_length(self) -> int:
        return len(self.syllables)

    def to_text(self) -> str:
        if not self.syllables:
            return "1"
        return " ".join(t if e == 1 else f"{t}^{e}" for t, e in self.syllables)

    def __str__(self) -> str:
        return self.to_text()


def _normal_form(p: int, q: int, syllables: Iterable[Syllable]) -> Tuple[Syllable, ...]:
    stack: List[Syllable] = []
    for tag, exponent in syllables:
        if tag not in ('a', 'b'):
            raise ValueError(f"Unknown factor tag '{tag}'")
        order = p if tag == 'a' else q
        exponent %= order
        if stack and stack[-1][0] == tag:
            exponent = (stack.pop()[1] + exponent) % order
        if exponent:
            stack.append((tag, exponent))
    return tuple(stack)


def fp_normal_form(w: FreeProductWord) -> FreeProductWord:
    return FreeProductWord(w.p, w.q, w.syllables)


def fp_multiply(w1: FreeProductWord, w2: FreeProductWord) -> FreeProductWord:
    return w1 * w2


def normal_forms(p: int, q: int, max_syllables: int) -> List[FreeProductWord]:
    """All elements of syllable length <= max_syllables, shortest first."""
    words = [FreeProductWord.identity(p, q)]
    frontier = [()]
    for _ in range(max_syllables):
        nxt = []
        for syllables in frontier:
            tags = ('a', 'b') if not syllables else (('b',) if syllables[-1][0] == 'a' else ('a',))
            for tag in tags:
                order = p if tag == 'a' else q
                for e in range(1, order):
                    nxt.append(syllables + ((tag, e),))
        words.extend(FreeProductWord(p, q, s) for s in nxt)
        frontier = nxt
    return words


def image_of(w: FreeWord, images: Sequence[FreeProductWord]) -> FreeProductWord:
    p, q = images[0].p, images[0].q
    syllables: List[Syllable] = []
    for a in w.letters:
        image = images[abs(a) - 1] if a > 0 else images[abs(a) - 1].inverse()
        syllables.extend(image.syllables)
    return FreeProductWord(p, q, tuple(syllables))


@dataclass(frozen=True)
class HomCheck:
    is_hom: bool
    failing_relator: Optional[int] = None

    def to_dict(self) -> Dict:
        return {'is_hom': self.is_hom, 'failing_relator': self.failing_relator}


def eval_hom(pres: Presentation, images: Sequence[FreeProductWord]) -> HomCheck:
    """IsHom, or the index of the first relator whose image is not the identity."""
    if len(images) != pres.rank:
        raise ValueError(f"{len(images)} images for {pres.rank} generators")
    for index, relator in enumerate(pres.relators):
        if not image_of(relator, images).is_identity:
            return HomCheck(False, index)
    return HomCheck(True)


def reaches_generators(images: Sequence[FreeProductWord], search_length: int) -> bool:
    """Breadth-first search over products of images^{+-1} of length <= L for both a and b."""
    if not images:
        return False
    p, q = images[0].p, images[0].q
    targets = {FreeProductWord.a(p, q), FreeProductWord.b(p, q)}
    if p == 1:
        targets.discard(FreeProductWord.a(p, q))
    if q == 1:
        targets.discard(FreeProductWord.b(p, q))
    steps = [w for img in images for w in (img, img.inverse()) if not w.is_identity]
    identity = FreeProductWord.identity(p, q)
    seen = {identity}
    queue = deque([(identity, 0)])
    found = set(t for t in targets if t in seen)
    while queue and found != targets:
        element, depth = queue.popleft()
        if depth == search_length:
            continue
        for step in steps:
            nxt = element * step
            if nxt not in seen:
                seen.add(nxt)
                if nxt in targets:
                    found.add(nxt)
                queue.append((nxt, depth + 1))
    return found == targets


@dataclass(frozen=True)
class HopfReport:
    is_hom: bool
    surjective_within_L: bool
    injective_on_ball_R: Optional[bool]
    ball_size: int
    search_length: int
    ball_radius: int

    def to_dict(self) -> Dict:
        return {
            'is_hom': self.is_hom,
            'surjective_within_L': self.surjective_within_L,
            'injective_on_ball_R': self.injective_on_ball_R,
            'ball_size': self.ball_size,
            'search_length': self.search_length,
            'ball_radius': self.ball_radius,
        }


def bounded_hopf_check(p: int, q: int, images: Sequence[FreeProductWord], ball_radius: Optional[int] = None,
                       search_length: Optional[int] = None) -> HopfReport:
    """
    Bounded evidence that a -> images[0], b -> images[1] is an automorphism.

    Injectivity is tested only on normal forms of syllable length <= R and
    only for homomorphisms (None otherwise).
    """
    R = config.Config.HOPF_BALL_RADIUS if ball_radius is None else ball_radius
    L = config.Config.HOPF_SEARCH_LENGTH if search_length is None else search_length
    if len(images) != 2:
        raise ValueError(f"Expected images of a and b, got {len(images)}")
    img_a, img_b = images
    is_hom = (img_a ** p).is_identity and (img_b ** q).is_identity
    surjective = reaches_generators(images, L)
    injective = None
    ball = normal_forms(p, q, R)
    if is_hom:
        seen = set()
        injective = True
        for w in ball:
            image = image_of_syllables(w, img_a, img_b)
            if image in seen:
                injective = False
                break
            seen.add(image)
    return HopfReport(is_hom, surjective, injective, len(ball), L, R)


def image_of_syllables(w: FreeProductWord, img_a: FreeProductWord, img_b: FreeProductWord) -> FreeProductWord:
    result = FreeProductWord.identity(img_a.p, img_a.q)
    for tag, e in w.syllables:
        result = result * ((img_a if tag == 'a' else img_b) ** e)
    return result


@dataclass(frozen=True)
class EpimorphismSearch:
    images: Optional[Tuple[FreeProductWord, ...]]
    tried: int
    exhausted: bool

    @property
    def found(self) -> bool:
        return self.images is not None

    def to_dict(self) -> Dict:
        return {
            'found': self.found,
            'images': [w.to_text() for w in self.images] if self.images else None,
            'tried': self.tried,
            'exhausted': self.exhausted,
        }


def find_epimorphism(pres: Presentation, p: int, q: int, max_syllables: Optional[int] = None,
                     candidate_cap: Optional[int] = None, search_length: Optional[int] = None) -> EpimorphismSearch:
    """
    Backtracking search, shorter images first, for a surjective homomorphism pres -> Z/p * Z/q.

    A relator is checked as soon as all its generators have images.
    """
    max_syllables = config.Config.EPI_MAX_SYLLABLES if max_syllables is None else max_syllables
    cap = config.Config.EPI_CANDIDATE_CAP if candidate_cap is None else candidate_cap
    L = config.Config.HOPF_SEARCH_LENGTH if search_length is None else search_length
    candidates = normal_forms(p, q, max_syllables)
    k = pres.rank
    if k == 0:
        return EpimorphismSearch(() if p == q == 1 else None, 0, False)

    ready: List[List[int]] = [[] for _ in range(k)]
    for index, relator in enumerate(pres.relators):
        ready[max(abs(a) for a in relator.letters) - 1].append(index)

    tried = 0
    assignment: List[FreeProductWord] = []

    def extend(position: int) -> Optional[Tuple[FreeProductWord, ...]]:
        nonlocal tried
        for candidate in candidates:
            if tried >= cap:
                return None
            tried += 1
            assignment.append(candidate)
            padded = assignment + [candidate] * (k - len(assignment))
            if all(image_of(pres.relators[i], padded).is_identity for i in ready[position]):
                if position == k - 1:
                    if reaches_generators(assignment, L):
                        return tuple(assignment)
                else:
                    found = extend(position + 1)
                    if found is not None:
                        return found
            assignment.pop()
        return None

    images = extend(0)
    exhausted = images is None and tried >= cap
    if images is not None:
        logger.info(f"Epimorphism onto Z/{p}*Z/{q} after {tried} candidates: {[w.to_text() for w in images]}")
    else:
        logger.info(f"No epimorphism onto Z/{p}*Z/{q} within {tried} candidates (cap {cap})")
    return EpimorphismSearch(images, tried, exhausted)
