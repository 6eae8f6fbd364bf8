"""
Deterministic Tietze simplification of finite presentations.

A pass drops duplicate relators, then either eliminates a generator that
occurs once in some relator or shortens one relator by another.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .. import config
from ..braid import FreeWord
from .presentation import Presentation, cyclic_key, cyclic_reduce

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TietzeResult:
    presentation: Presentation
    budget_exhausted: bool
    passes: int
    moves: Tuple[str, ...] = field(default=())

    def to_dict(self) -> Dict:
        return {
            'presentation': self.presentation.to_dict(),
            'budget_exhausted': self.budget_exhausted,
            'passes': self.passes,
            'moves': list(self.moves),
        }


def _rotations(w: FreeWord) -> List[FreeWord]:
    letters = w.letters
    return [FreeWord(w.rank, letters[r:] + letters[:r]) for r in range(len(letters))]


def remove_duplicates(pres: Presentation) -> Tuple[Presentation, int]:
    """Drop relators conjugate to an earlier relator or to its inverse."""
    seen = set()
    kept = []
    for r in pres.relators:
        key = cyclic_key(r)
        if key in seen:
            continue
        seen.add(key)
        kept.append(r)
    return Presentation(pres.generators, tuple(kept)), len(pres.relators) - len(kept)


def _elimination_candidate(pres: Presentation) -> Optional[Tuple[int, int]]:
    """(relator index, generator) with the generator occurring exactly once in that relator."""
    best = None
    for idx, r in enumerate(pres.relators):
        counts: Dict[int, int] = {}
        for a in r.letters:
            counts[abs(a)] = counts.get(abs(a), 0) + 1
        for gen, count in counts.items():
            if count != 1:
                continue
            elsewhere = sum(abs(a) == gen for j, other in enumerate(pres.relators) if j != idx for a in other.letters)
            key = (len(r), elsewhere, -gen, idx)
            if best is None or key < best[0]:
                best = (key, idx, gen)
    return (best[1], best[2]) if best else None


def eliminate_generator(pres: Presentation, relator_index: int, gen: int) -> Presentation:
    """Solve relator `relator_index` for generator `gen` and substitute it everywhere."""
    r = pres.relators[relator_index]
    position = next(i for i, a in enumerate(r.letters) if abs(a) == gen)
    rotated = r.letters[position:] + r.letters[:position]
    rest = FreeWord(r.rank, rotated[1:])
    # g * rest = 1 gives g = rest^-1; g^-1 * rest = 1 gives g = rest
    expression = rest.inverse() if rotated[0] > 0 else rest

    new_rank = pres.rank - 1
    renumber = {}
    for old in range(1, pres.rank + 1):
        if old != gen:
            renumber[old] = len(renumber) + 1
    images = []
    for old in range(1, pres.rank + 1):
        if old == gen:
            letters = tuple((1 if a > 0 else -1) * renumber[abs(a)] for a in expression.letters)
        else:
            letters = (renumber[old],)
        images.append(letters)

    def rewrite(w: FreeWord) -> FreeWord:
        out: List[int] = []
        for a in w.letters:
            image = images[abs(a) - 1]
            out.extend(image if a > 0 else tuple(-b for b in reversed(image)))
        return FreeWord(new_rank, tuple(out))

    generators = tuple(g for i, g in enumerate(pres.generators, start=1) if i != gen)
    if not generators:
        # the group was cyclic of order 1 on this generator
        return Presentation((), ())
    relators = tuple(rewrite(w) for j, w in enumerate(pres.relators) if j != relator_index)
    return Presentation(generators, relators)


def _shorten_once(pres: Presentation) -> Optional[Tuple[Presentation, str]]:
    """Replace one relator by a strictly shorter product with a conjugate of another (or its inverse)."""
    relators = list(pres.relators)
    for i, r in enumerate(relators):
        best: Optional[FreeWord] = None
        for j, other in enumerate(relators):
            if i == j:
                continue
            partners = _rotations(other) + _rotations(other.inverse())
            for candidate_base in _rotations(r):
                for partner in partners:
                    candidate = cyclic_reduce(candidate_base * partner)
                    if len(candidate) < len(r) and (best is None or
                                                     (len(candidate), candidate.letters) < (len(best), best.letters)):
                        best = candidate
        if best is not None:
            move = f"shorten relator {i}: {len(r)} -> {len(best)}"
            relators[i] = best
            return Presentation(pres.generators, tuple(relators)), move
    return None


def tietze_simplify(pres: Presentation, budget: Optional[int] = None) -> TietzeResult:
    """
    Deterministic Tietze passes: deduplicate, eliminate a generator, shorten.

    Every move presents an isomorphic group. Stops at a fixpoint or after
    `budget` passes (default Config.TIETZE_MAX_PASSES), flagging exhaustion.
    """
    limit = config.Config.TIETZE_MAX_PASSES if budget is None else budget
    moves: List[str] = []
    current = pres
    for passes in range(1, limit + 1):
        changed = False
        current, dropped = remove_duplicates(current)
        if dropped:
            moves.append(f"drop {dropped} duplicate relator(s)")

        candidate = _elimination_candidate(current)
        if candidate is not None:
            idx, gen = candidate
            name = current.generators[gen - 1]
            current = eliminate_generator(current, idx, gen)
            moves.append(f"eliminate {name} using relator {idx}")
            changed = True
        else:
            shortened = _shorten_once(current)
            if shortened is not None:
                current, move = shortened
                moves.append(move)
                changed = True

        logger.debug(f"Tietze pass {passes}: {current.rank} generators, total length {current.total_length}")
        if not changed:
            current, dropped = remove_duplicates(current)
            logger.info(f"Tietze fixpoint after {passes} passes: {current}")
            return TietzeResult(current, False, passes, tuple(moves))

    current, _ = remove_duplicates(current)
    logger.warning(f"Tietze budget of {limit} passes exhausted")
    return TietzeResult(current, True, limit, tuple(moves))
