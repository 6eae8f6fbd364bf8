"""
Finite presentations over FreeWord relators.

Text format: ``< a b | a^2, b^3, (a b)^5 >``. Generators are separated by
spaces or commas; relators by commas. Inside a relator, juxtaposition (or
``*``) multiplies, ``^k`` raises a letter or a parenthesised group to an
integer power, and ``lhs = rhs`` stands for lhs * rhs^-1.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..braid import BraidWord, FreeWord, hurwitz_act

logger = logging.getLogger(__name__)


class PresentationError(ValueError):
    """Raised on malformed presentation text or inconsistent generator sets."""
    pass


def cyclic_reduce(w: FreeWord) -> FreeWord:
    letters = list(w.letters)
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        letters = letters[1:-1]
    return FreeWord(w.rank, tuple(letters))


def cyclic_key(w: FreeWord) -> Tuple[int, ...]:
    """Canonical representative of the conjugacy class of w and of w^-1."""
    w = cyclic_reduce(w)
    if w.is_identity:
        return ()
    candidates = []
    for word in (w.letters, w.inverse().letters):
        candidates.extend(word[r:] + word[:r] for r in range(len(word)))
    return min(candidates, key=lambda t: (len(t), t))


@dataclass(frozen=True)
class Presentation:
    generators: Tuple[str, ...]
    relators: Tuple[FreeWord, ...] = ()

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise PresentationError(f"Duplicate generator names in {self.generators}")
        rank = len(self.generators)
        cleaned = []
        for r in self.relators:
            if r.rank != rank:
                raise PresentationError(f"Relator {r} has rank {r.rank}, presentation has {rank} generators")
            r = cyclic_reduce(r)
            if not r.is_identity:
                cleaned.append(r)
        object.__setattr__(self, 'relators', tuple(cleaned))

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)

    def word_text(self, w: FreeWord) -> str:
        if w.is_identity:
            return "1"
        pieces = []
        letters = list(w.letters)
        i = 0
        while i < len(letters):
            j = i
            while j < len(letters) and letters[j] == letters[i]:
                j += 1
            name = self.generators[abs(letters[i]) - 1]
            power = (j - i) * (1 if letters[i] > 0 else -1)
            pieces.append(name if power == 1 else f"{name}^{power}")
            i = j
        return " ".join(pieces)

    def to_text(self) -> str:
        return f"< {' '.join(self.generators)} | {', '.join(self.word_text(r) for r in self.relators)} >"

    def __str__(self) -> str:
        return self.to_text()

    def to_dict(self) -> Dict:
        return {
            'generators': list(self.generators),
            'relators': [self.word_text(r) for r in self.relators],
            'text': self.to_text(),
        }


# --- parsing ---

_RELATOR_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[()*^=])|(?P<int>-?\d+))")


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _RELATOR_TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise PresentationError(f"Unexpected character at '{text[pos:pos + 10]}'")
        kind = match.lastgroup
        tokens.append((kind, match.group(kind)))
        pos = match.end()
    return tokens


class _RelatorParser:
    def __init__(self, tokens: List[Tuple[str, str]], index: Dict[str, int]):
        self.tokens = tokens
        self.pos = 0
        self.index = index

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Tuple[str, str]:
        token = self.peek()
        if token is None:
            raise PresentationError("Relator ends unexpectedly")
        self.pos += 1
        return token

    def product(self) -> List[int]:
        letters: List[int] = []
        while True:
            token = self.peek()
            if token is None or token == ('sym', ')') or token == ('sym', '='):
                return letters
            if token == ('sym', '*'):
                self.take()
                continue
            letters.extend(self.factor())

    def factor(self) -> List[int]:
        kind, value = self.take()
        if kind == 'name':
            if value not in self.index:
                raise PresentationError(f"Unknown generator '{value}'. Available: {', '.join(self.index)}")
            base = [self.index[value]]
        elif kind == 'int' and value == '1':
            base = []
        elif (kind, value) == ('sym', '('):
            base = self.product()
            if self.take() != ('sym', ')'):
                raise PresentationError("Unbalanced parentheses")
        else:
            raise PresentationError(f"Unexpected token '{value}'")
        if self.peek() == ('sym', '^'):
            self.take()
            kind, value = self.take()
            if kind != 'int':
                raise PresentationError(f"Exponent must be an integer, got '{value}'")
            power = int(value)
            inverse = [-a for a in reversed(base)]
            base = (base if power >= 0 else inverse) * abs(power)
        return base


def parse_relator(text: str, generators: Sequence[str]) -> FreeWord:
    index = {name: i + 1 for i, name in enumerate(generators)}
    parser = _RelatorParser(_tokenize(text), index)
    letters = parser.product()
    if parser.peek() == ('sym', '='):
        parser.take()
        rhs = parser.product()
        letters = letters + [-a for a in reversed(rhs)]
    if parser.peek() is not None:
        raise PresentationError(f"Trailing input in relator '{text}'")
    return FreeWord(len(generators), tuple(letters))


def _split_top_level(text: str) -> List[str]:
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == '(':
            depth += 1
        elif ch == ')':
            depth -= 1
        if ch == ',' and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return [p for p in (s.strip() for s in parts) if p]


def parse_presentation(text: str) -> Presentation:
    """
    Raises:
        PresentationError: malformed text or unknown generator names
    """
    body = text.strip()
    if not (body.startswith('<') and body.endswith('>')) or body.count('|') != 1:
        raise PresentationError(f"Expected '< generators | relators >', got '{text}'")
    gens_text, rels_text = body[1:-1].split('|')
    generators = tuple(g for g in re.split(r"[\s,]+", gens_text.strip()) if g)
    for g in generators:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", g):
            raise PresentationError(f"Bad generator name '{g}'")
    if not generators:
        return Presentation((), ())
    relators = tuple(parse_relator(r, generators) for r in _split_top_level(rels_text))
    return Presentation(generators, relators)


# --- Zariski-van Kampen ---

@dataclass(frozen=True)
class ZvkPresentation:
    presentation: Presentation
    raw_relators: Tuple[FreeWord, ...]
    redundant: Tuple[int, ...] = field(default=())

    @property
    def raw_count(self) -> int:
        return len(self.raw_relators)

    def to_dict(self) -> Dict:
        return {
            'presentation': self.presentation.to_dict(),
            'raw_relator_count': self.raw_count,
            'redundant_raw_indices': list(self.redundant),
        }


def fiber_generators(d: int) -> Tuple[str, ...]:
    return tuple(f"m{i}" for i in range(1, d + 1))


def zvk_presentation(braids: Sequence[BraidWord], d: int, central_exponent: Optional[int] = None) -> ZvkPresentation:
    """
    Generators mu_1..mu_d; relators mu_i^-1 * beta(mu_i) for every braid and
    every i, then (mu_d ... mu_1)^N when a central exponent is given.

    The i = d relator of each braid is kept but listed in `redundant`: it
    follows from the others because the descending product is fixed.
    """
    raw: List[FreeWord] = []
    redundant: List[int] = []
    for beta in braids:
        if beta.strands != d:
            raise PresentationError(f"Braid on {beta.strands} strands in a {d}-strand presentation")
        for i in range(1, d + 1):
            mu = FreeWord.generator(d, i)
            if i == d:
                redundant.append(len(raw))
            raw.append(mu.inverse() * hurwitz_act(beta, mu))
    if central_exponent is not None:
        raw.append(FreeWord.descending_product(d) ** central_exponent)
    presentation = Presentation(fiber_generators(d), tuple(raw))
    logger.debug(f"ZvK presentation: {len(raw)} raw relators, {len(presentation.relators)} after reduction")
    return ZvkPresentation(presentation, tuple(raw), tuple(redundant))
