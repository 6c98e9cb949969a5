"""Exact rational linear algebra on lists of :class:`fractions.Fraction`."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list  # list of rows


class SingularSystemError(ArithmeticError):
    pass


def zeros(n: int, m: int) -> Matrix:
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    if A and len(A[0]) != len(B):
        raise ValueError(f"shape mismatch: {len(A)}x{len(A[0])} times {len(B)}x?")
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [Fraction(0)] * cols
        for k, a in enumerate(row):
            if a:
                bk = B[k]
                for j in range(cols):
                    if bk[j]:
                        acc[j] += a * bk[j]
        out.append(acc)
    return out


def vecmat(v: Sequence, A: Sequence[Sequence]) -> list:
    return matmul([list(v)], A)[0] if A else []


def matvec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in A]


def leq(A: Sequence[Sequence], B: Sequence[Sequence]) -> bool:
    return all(a <= b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def first_violation(A, B):
    """First ``(i, j)`` with ``A[i][j] > B[i][j]``, or ``None``."""
    for i, (ra, rb) in enumerate(zip(A, B)):
        for j, (a, b) in enumerate(zip(ra, rb)):
            if a > b:
                return i, j
    return None


def solve_linear(A: Sequence[Sequence], b: Sequence) -> list:
    """Solve the square system ``A x = b`` exactly by Gauss-Jordan elimination."""
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(b[i])] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise SingularSystemError(f"singular at column {col}")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        if p != 1:
            M[col] = [v / p for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]
