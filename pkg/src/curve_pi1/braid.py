"""
Braid words, free-group words and the Hurwitz action.

Letters are signed integers: +i is the generator i, -i its inverse.
Free words print as "m1 m2^-1", braid words as "s1 s2^-1".

Action convention: sigma_i sends mu_i -> mu_{i+1} and
mu_{i+1} -> mu_{i+1} mu_i mu_{i+1}^-1, so the descending product
mu_d ... mu_1 is fixed by every braid. A word acts by its letters from the
last to the first, hence (w1 w2) acts as w1 after w2.
"""

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .exactpoly import CurveParams

logger = logging.getLogger(__name__)


class BraidError(ValueError):
    """Raised on malformed words or rank mismatches."""
    pass


def free_reduce(letters: Iterable[int]) -> Tuple[int, ...]:
    reduced: List[int] = []
    for a in letters:
        if reduced and reduced[-1] == -a:
            reduced.pop()
        else:
            reduced.append(a)
    return tuple(reduced)


_TOKEN = re.compile(r"^([a-z])(\d+)(?:\^(-?\d+))?$")


def _parse_letters(text: str, prefix: str, bound: int, kind: str) -> Tuple[int, ...]:
    text = text.strip()
    if text in ("", "1", "e"):
        return ()
    letters: List[int] = []
    for token in text.replace("*", " ").split():
        match = _TOKEN.match(token)
        if not match or match.group(1) != prefix:
            raise BraidError(f"Bad {kind} token '{token}'; expected {prefix}<index>[^<exponent>]")
        index = int(match.group(2))
        exponent = int(match.group(3)) if match.group(3) else 1
        if not 1 <= index <= bound:
            raise BraidError(f"{kind} index {index} out of range 1..{bound}")
        sign = 1 if exponent > 0 else -1
        letters.extend([sign * index] * abs(exponent))
    return tuple(letters)


def _format_letters(letters: Sequence[int], prefix: str) -> str:
    if not letters:
        return "1"
    return " ".join(f"{prefix}{abs(a)}" + ("^-1" if a < 0 else "") for a in letters)


@dataclass(frozen=True)
class FreeWord:
    """Freely reduced word in mu_1..mu_rank."""
    rank: int
    letters: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise BraidError(f"Free group rank must be positive, got {self.rank}")
        for a in self.letters:
            if a == 0 or abs(a) > self.rank:
                raise BraidError(f"Letter {a} outside rank {self.rank}")
        object.__setattr__(self, 'letters', free_reduce(self.letters))

    @classmethod
    def identity(cls, rank: int) -> 'FreeWord':
        return cls(rank, ())

    @classmethod
    def generator(cls, rank: int, index: int) -> 'FreeWord':
        return cls(rank, (index,))

    @classmethod
    def parse(cls, text: str, rank: int) -> 'FreeWord':
        return cls(rank, _parse_letters(text, 'm', rank, 'free word'))

    @classmethod
    def descending_product(cls, rank: int) -> 'FreeWord':
        """mu_rank ... mu_1"""
        return cls(rank, tuple(range(rank, 0, -1)))

    def _check(self, other: 'FreeWord'):
        if not isinstance(other, FreeWord) or other.rank != self.rank:
            raise BraidError(f"Cannot combine words of rank {self.rank} and {getattr(other, 'rank', None)}")

    def __mul__(self, other: 'FreeWord') -> 'FreeWord':
        self._check(other)
        return FreeWord(self.rank, self.letters + other.letters)

    def inverse(self) -> 'FreeWord':
        return FreeWord(self.rank, tuple(-a for a in reversed(self.letters)))

    def __pow__(self, n: int) -> 'FreeWord':
        base = self if n >= 0 else self.inverse()
        return FreeWord(self.rank, base.letters * abs(n))

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def conjugate(self, by: 'FreeWord') -> 'FreeWord':
        """by * self * by^-1"""
        return by * self * by.inverse()

    def substitute(self, images: Sequence['FreeWord']) -> 'FreeWord':
        """Image under the homomorphism mu_i -> images[i-1]."""
        if len(images) != self.rank:
            raise BraidError(f"{len(images)} images for rank {self.rank}")
        target = images[0].rank
        letters: List[int] = []
        for a in self.letters:
            image = images[abs(a) - 1]
            letters.extend(image.letters if a > 0 else image.inverse().letters)
        return FreeWord(target, tuple(letters))

    def to_text(self) -> str:
        return _format_letters(self.letters, 'm')

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class BraidWord:
    """Word in the Artin generators sigma_1..sigma_{strands-1}; no normal form."""
    strands: int
    letters: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.strands < 1:
            raise BraidError(f"A braid needs at least one strand, got {self.strands}")
        for a in self.letters:
            if a == 0 or abs(a) > self.strands - 1:
                raise BraidError(f"Artin generator {a} outside 1..{self.strands - 1}")

    @classmethod
    def parse(cls, text: str, strands: int) -> 'BraidWord':
        return cls(strands, _parse_letters(text, 's', strands - 1, 'braid'))

    def __mul__(self, other: 'BraidWord') -> 'BraidWord':
        if not isinstance(other, BraidWord) or other.strands != self.strands:
            raise BraidError("Cannot multiply braids on different strand counts")
        return BraidWord(self.strands, self.letters + other.letters)

    def inverse(self) -> 'BraidWord':
        return BraidWord(self.strands, tuple(-a for a in reversed(self.letters)))

    def __pow__(self, n: int) -> 'BraidWord':
        base = self if n >= 0 else self.inverse()
        return BraidWord(self.strands, base.letters * abs(n))

    def __len__(self) -> int:
        return len(self.letters)

    def to_text(self) -> str:
        return _format_letters(self.letters, 's')

    def __str__(self) -> str:
        return self.to_text()


# --- the action ---

@lru_cache(maxsize=None)
def _letter_images(letter: int, rank: int) -> Tuple[FreeWord, ...]:
    i = abs(letter)
    images = [FreeWord.generator(rank, j) for j in range(1, rank + 1)]
    mu_i, mu_next = images[i - 1], images[i]
    if letter > 0:
        images[i - 1] = mu_next
        images[i] = mu_i.conjugate(mu_next)
    else:
        images[i - 1] = mu_next.conjugate(mu_i.inverse())
        images[i] = mu_i
    return tuple(images)


def automorphism(w: BraidWord) -> Tuple[FreeWord, ...]:
    """Images of mu_1..mu_d under the automorphism of w."""
    images = tuple(FreeWord.generator(w.strands, j) for j in range(1, w.strands + 1))
    for letter in reversed(w.letters):
        step = _letter_images(letter, w.strands)
        images = tuple(x.substitute(step) for x in images)
    return images


def hurwitz_act(w: BraidWord, x: FreeWord) -> FreeWord:
    """
    Raises:
        BraidError: x.rank differs from w.strands
    """
    if x.rank != w.strands:
        raise BraidError(f"Braid on {w.strands} strands cannot act on a rank {x.rank} word")
    return x.substitute(automorphism(w))


def acts_equal(w1: BraidWord, w2: BraidWord) -> bool:
    if w1.strands != w2.strands:
        raise BraidError("Braids on different strand counts")
    return automorphism(w1) == automorphism(w2)


def descending_cycle(strands: int) -> BraidWord:
    """sigma_{d-1} ... sigma_1"""
    return BraidWord(strands, tuple(range(strands - 1, 0, -1)))


def full_twist(d: int) -> BraidWord:
    if d < 2:
        raise BraidError(f"The full twist needs d >= 2, got {d}")
    return descending_cycle(d) ** d


@dataclass(frozen=True)
class MonodromyBraids:
    beta_0: BraidWord
    beta_inf: BraidWord
    beta: BraidWord

    def to_dict(self) -> Dict[str, object]:
        return {
            'strands': self.beta.strands,
            'beta': self.beta.to_text(),
            'beta_0_length': len(self.beta_0),
            'beta_inf_length': len(self.beta_inf),
            'beta_0_power_of_beta': len(self.beta_0) // max(1, len(self.beta)),
            'beta_inf_power_of_beta': len(self.beta_inf) // max(1, len(self.beta)),
        }


def monodromy_braids(params: CurveParams) -> MonodromyBraids:
    beta = descending_cycle(params.d) ** params.N
    return MonodromyBraids(beta ** params.a, beta ** params.b, beta)


def central_relation_holds(params: CurveParams) -> bool:
    """beta_0 * beta_inf acts as the N-th power of the full twist."""
    if params.d < 2:
        return True
    braids = monodromy_braids(params)
    return acts_equal(braids.beta_0 * braids.beta_inf, full_twist(params.d) ** params.N)


# --- sampling for self-checks ---

def random_braid_word(strands: int, length: int, rng: np.random.Generator) -> BraidWord:
    if strands < 2:
        return BraidWord(strands, ())
    indices = rng.integers(1, strands, size=length)
    signs = rng.choice([-1, 1], size=length)
    return BraidWord(strands, tuple(int(i * s) for i, s in zip(indices, signs)))


def random_free_word(rank: int, length: int, rng: np.random.Generator) -> FreeWord:
    indices = rng.integers(1, rank + 1, size=length)
    signs = rng.choice([-1, 1], size=length)
    return FreeWord(rank, tuple(int(i * s) for i, s in zip(indices, signs)))


@dataclass
class SelfCheckReport:
    checks: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> Dict[str, object]:
        return {'passed': self.passed, 'checks': self.checks}


def self_check(max_strands: int = 4, samples: int = 20, seed: int = 0, word_length: int = 8) -> SelfCheckReport:
    """Action, braid relations, fixed descending product and central twist on random samples."""
    rng = np.random.default_rng(seed)
    checks: Dict[str, bool] = {}
    for d in range(2, max_strands + 1):
        product = FreeWord.descending_product(d)
        delta = product
        fixed = action = inverse = True
        for _ in range(samples):
            w1 = random_braid_word(d, word_length, rng)
            w2 = random_braid_word(d, word_length, rng)
            x = random_free_word(d, word_length, rng)
            fixed &= hurwitz_act(w1, product) == product
            action &= hurwitz_act(w1 * w2, x) == hurwitz_act(w1, hurwitz_act(w2, x))
            inverse &= hurwitz_act(w1.inverse(), hurwitz_act(w1, x)) == x
        checks[f"d={d}: descending product fixed"] = fixed
        checks[f"d={d}: group action"] = action
        checks[f"d={d}: inverse words"] = inverse

        relations = True
        for i in range(1, d - 1):
            relations &= acts_equal(BraidWord(d, (i, i + 1, i)), BraidWord(d, (i + 1, i, i + 1)))
        for i in range(1, d):
            for j in range(i + 2, d):
                relations &= acts_equal(BraidWord(d, (i, j)), BraidWord(d, (j, i)))
        checks[f"d={d}: braid relations"] = relations

        twist = automorphism(full_twist(d))
        checks[f"d={d}: full twist is conjugation"] = all(
            twist[j - 1] == FreeWord.generator(d, j).conjugate(delta) for j in range(1, d + 1))
        checks[f"d={d}: full twist is central"] = all(
            acts_equal(full_twist(d) * BraidWord(d, (i,)), BraidWord(d, (i,)) * full_twist(d)) for i in range(1, d))
    failed = [k for k, v in checks.items() if not v]
    if failed:
        logger.warning(f"Braid self-check failures: {failed}")
    return SelfCheckReport(checks)
