"""Exact primal simplex for ``max c.z  s.t.  G z <= h, z >= 0`` with ``h >= 0``.

The origin is feasible, so no phase one is needed.  Bland's rule keeps the
pivoting deterministic and cycle-free.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class UnboundedError(ArithmeticError):
    pass


def maximize(c: Sequence, G: Sequence[Sequence], h: Sequence) -> list:
    n = len(c)
    m = len(G)
    if any(v < 0 for v in h):
        raise ValueError("origin must be feasible (h >= 0)")
    width = n + m + 1
    T = []
    for i in range(m):
        row = [Fraction(v) for v in G[i]] + [Fraction(0)] * m + [Fraction(h[i])]
        row[n + i] = Fraction(1)
        T.append(row)
    obj = [-Fraction(v) for v in c] + [Fraction(0)] * (m + 1)
    basis = [n + i for i in range(m)]
    while True:
        enter = next((j for j in range(width - 1) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise UnboundedError("objective is unbounded")
        r = best[1]
        piv = T[r][enter]
        T[r] = [v / piv for v in T[r]]
        for i in range(m):
            if i != r and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [a - f * b for a, b in zip(T[i], T[r])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [a - f * b for a, b in zip(obj, T[r])]
        basis[r] = enter
    z = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            z[b] = T[i][-1]
    return z
