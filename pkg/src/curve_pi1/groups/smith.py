"""
Integer Smith normal form with unimodular transforms, on plain Python ints.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

from sympy import Matrix

from .presentation import Presentation

logger = logging.getLogger(__name__)

IntMatrix = List[List[int]]


@dataclass(frozen=True)
class SmithForm:
    """U * A * V == D."""
    D: IntMatrix
    U: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> List[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    def is_unimodular(self) -> bool:
        return all(abs(int(Matrix(M).det())) == 1 for M in (self.U, self.V) if M)


def _identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> SmithForm:
    A = [[int(v) for v in row] for row in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(target, source, q):
        A[target] = [a - q * b for a, b in zip(A[target], A[source])]
        U[target] = [a - q * b for a, b in zip(U[target], U[source])]

    def add_col(target, source, q):
        for M in (A, V):
            for row in M:
                row[target] -= q * row[source]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            pivot = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // pivot)
                    clean &= A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // pivot)
                    clean &= A[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % pivot), None)
            if bad is None:
                break
            # pull a non-multiple into row t; the next round finds a smaller pivot
            add_row(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return SmithForm(A, U, V)


@dataclass(frozen=True)
class AbelianInvariants:
    factors: List[int]

    @property
    def free_rank(self) -> int:
        return sum(1 for f in self.factors if f == 0)

    @property
    def torsion(self) -> List[int]:
        return [f for f in self.factors if f]

    def to_text(self) -> str:
        if not self.factors:
            return "trivial"
        return " x ".join("Z" if f == 0 else f"Z/{f}" for f in self.factors)

    def to_dict(self) -> dict:
        return {'factors': self.factors, 'text': self.to_text()}


def exponent_matrix(pres: Presentation) -> IntMatrix:
    rows = []
    for r in pres.relators:
        row = [0] * pres.rank
        for a in r.letters:
            row[abs(a) - 1] += 1 if a > 0 else -1
        rows.append(row)
    return rows


def abelianization(pres: Presentation) -> AbelianInvariants:
    """Invariant factors of the relator exponent-sum matrix; 1s dropped, 0s kept for free rank."""
    rows = exponent_matrix(pres)
    if not rows:
        return AbelianInvariants([0] * pres.rank)
    diagonal = smith_normal_form(rows).diagonal
    factors = [d for d in diagonal if d != 1]
    factors += [0] * (pres.rank - len(diagonal))
    factors.sort(key=lambda f: (f == 0, f))
    logger.debug(f"Abelianization of {pres.rank} generators / {len(rows)} relators: {factors}")
    return AbelianInvariants(factors)
