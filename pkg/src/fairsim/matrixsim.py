"""Matrix fair simulation between PBWAs.

A witness is a substochastic matrix ``A`` over ``Y x X`` that forward-simulates
``X`` by ``Y`` and whose two blocks ``A11`` (non-accepting ``Y`` vs
non-accepting ``X``) and ``A12`` (non-accepting ``Y`` vs accepting ``X``) come
with increasing approximation sequences.  ``A12`` must be built up from zero
in steps, so accepting behaviour of ``X`` cannot be matched forever by
non-accepting behaviour of ``Y``.

Sequences of length at most omega are presented finitely: an explicit prefix
``P_0 .. P_k`` and, for omega, the limit pair ``L = (A11, A12)`` together
with a ratio ``r`` in ``[0, 1)``.  The unpresented tail is
``Q_n = r**n * P_k + (1 - r**n) * L``.  Every condition on the tail is affine
in ``(Q_{n+1}, Q_n)``, and each such pair is a convex combination of
``(Q_1, P_k)`` and ``(L, L)``, so checking those two pairs covers the whole
tail exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import networkx as nx

from .linalg import first_violation, matmul, vecmat
from .pbwa import Pbwa, PbwaError, as_fraction, chain_graph
from .simplex import maximize


class WitnessError(ValueError):
    """Witness dimensions or alphabets do not fit the automata."""


def _frac_matrix(rows) -> tuple:
    return tuple(tuple(as_fraction(v) for v in row) for row in rows)


@dataclass(frozen=True)
class MatrixWitness:
    """Rows indexed by the simulating automaton's states, columns by the simulated one's."""

    matrix: tuple

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frac_matrix(self.matrix))

    @classmethod
    def from_entries(cls, X: Pbwa, Y: Pbwa, entries: Mapping) -> "MatrixWitness":
        """``entries[y][x] = p``; absent entries are zero."""
        rows = [[Fraction(0)] * X.n for _ in range(Y.n)]
        for y, row in entries.items():
            for x, p in row.items():
                rows[Y.index(y)][X.index(x)] = as_fraction(p)
        return cls(rows)

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> tuple:
        return tuple(tuple(self.matrix[r][c] for c in cols) for r in rows)


@dataclass(frozen=True)
class ApproxSequences:
    """Finitely presented approximation sequences for ``A11`` and ``A12``.

    ``omega=False``: ``seq11``/``seq12`` list the whole sequence, the last
    element being the final one.  ``omega=True``: they list a prefix, the
    limit pair is ``limit11``/``limit12`` and the tail is geometric with
    ``ratio``.
    """

    seq11: tuple
    seq12: tuple
    omega: bool = False
    limit11: tuple | None = None
    limit12: tuple | None = None
    ratio: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "seq11", tuple(_frac_matrix(m) for m in self.seq11))
        object.__setattr__(self, "seq12", tuple(_frac_matrix(m) for m in self.seq12))
        if self.limit11 is not None:
            object.__setattr__(self, "limit11", _frac_matrix(self.limit11))
        if self.limit12 is not None:
            object.__setattr__(self, "limit12", _frac_matrix(self.limit12))
        if self.ratio is not None:
            object.__setattr__(self, "ratio", as_fraction(self.ratio))

    @property
    def bound(self):
        """``"omega"`` or the finite length bound."""
        return "omega" if self.omega else len(self.seq11) - 1

    def element(self, n: int) -> tuple:
        """The ``n``-th pair, extending the prefix by the geometric tail."""
        k = len(self.seq11) - 1
        if n <= k:
            return self.seq11[n], self.seq12[n]
        if not self.omega:
            raise IndexError(n)
        t = self.ratio ** (n - k)
        return (
            _mix(t, self.seq11[k], self.limit11),
            _mix(t, self.seq12[k], self.limit12),
        )

    @property
    def final(self) -> tuple:
        if self.omega:
            return self.limit11, self.limit12
        return self.seq11[-1], self.seq12[-1]


def _mix(t, P, L) -> tuple:
    return tuple(tuple(t * p + (1 - t) * l for p, l in zip(rp, rl)) for rp, rl in zip(P, L))


@dataclass(frozen=True)
class Verdict:
    holds: bool
    condition: str | None = None
    letter: str | None = None
    entry: tuple | None = None
    detail: str = ""

    def __bool__(self):
        return self.holds


OK = Verdict(True)


@dataclass
class _Setup:
    X: Pbwa
    Y: Pbwa
    A: tuple
    X1: tuple
    X2: tuple
    Y1: tuple
    Y2: tuple
    MX1: dict = field(default_factory=dict)
    MX2: dict = field(default_factory=dict)
    MY1: dict = field(default_factory=dict)

    @classmethod
    def make(cls, X: Pbwa, Y: Pbwa, A) -> "_Setup":
        if tuple(X.alphabet) != tuple(Y.alphabet) and set(X.alphabet) != set(Y.alphabet):
            raise WitnessError(f"alphabet mismatch: {X.alphabet} vs {Y.alphabet}")
        A = A.matrix if isinstance(A, MatrixWitness) else _frac_matrix(A)
        if len(A) != Y.n or any(len(r) != X.n for r in A):
            raise WitnessError(f"witness must be {Y.n}x{X.n} (Y states x X states)")
        s = cls(X, Y, A, X.block(1), X.block(2), Y.block(1), Y.block(2))
        for a in X.alphabet:
            MX, MY = X.matrices[a], Y.matrices[a]
            s.MX1[a] = [list(MX[i]) for i in s.X1]
            s.MX2[a] = [list(MX[i]) for i in s.X2]
            s.MY1[a] = [list(MY[j]) for j in s.Y1]
        return s

    def block(self, rows, cols) -> tuple:
        return tuple(tuple(self.A[r][c] for c in cols) for r in rows)

    @property
    def A11(self):
        return self.block(self.Y1, self.X1)

    @property
    def A12(self):
        return self.block(self.Y1, self.X2)

    def assemble(self, a11, a12) -> list:
        """Full ``Y x X`` matrix with the ``Y1`` rows replaced by ``(a11, a12)``."""
        B = [list(r) for r in self.A]
        for r, y in enumerate(self.Y1):
            for c, x in enumerate(self.X1):
                B[y][x] = a11[r][c]
            for c, x in enumerate(self.X2):
                B[y][x] = a12[r][c]
        return B

    def rhs(self, a, a11, a12) -> list:
        return matmul(self.MY1[a], self.assemble(a11, a12))

    def lhs11(self, a, a11) -> list:
        return matmul([list(r) for r in a11], self.MX1[a]) if self.X1 and self.Y1 else []

    def lhs12(self, a, a12) -> list:
        return matmul([list(r) for r in a12], self.MX2[a]) if self.X2 and self.Y1 else []

    def entry(self, i, j) -> tuple:
        return (self.Y.states[self.Y1[i]], self.X.states[j])

    def check_c(self, a11, a12, where: str) -> Verdict:
        for a in self.X.alphabet:
            bad = first_violation(self.lhs11(a, a11), self.rhs(a, a11, a12))
            if bad:
                return Verdict(False, "3c", a, self.entry(*bad), f"A11 invariant fails at {where}")
        return OK

    def check_e(self, nxt12, a11, a12, where: str) -> Verdict:
        for a in self.X.alphabet:
            bad = first_violation(self.lhs12(a, nxt12), self.rhs(a, a11, a12))
            if bad:
                return Verdict(False, "3e", a, self.entry(*bad), f"A12 step fails at {where}")
        return OK


def _shape_ok(m, rows, cols) -> bool:
    return len(m) == rows and all(len(r) == cols for r in m)


def _leq(P, Q) -> bool:
    return all(p <= q for rp, rq in zip(P, Q) for p, q in zip(rp, rq))


def check_forward(X: Pbwa, Y: Pbwa, A) -> Verdict:
    """Conditions 1 (substochastic rows) and 2 (forward simulation matrix)."""
    s = _Setup.make(X, Y, A)
    for r, row in enumerate(s.A):
        for c, v in enumerate(row):
            if not 0 <= v <= 1:
                return Verdict(False, "1", None, (Y.states[r], X.states[c]), f"entry {v} not in [0,1]")
        if sum(row) > 1:
            return Verdict(False, "1", None, (Y.states[r],), f"row mass {sum(row)} > 1")
    iy = vecmat(Y.initial, [list(r) for r in s.A])
    for c, (p, q) in enumerate(zip(X.initial, iy)):
        if p > q:
            return Verdict(False, "2", None, (X.states[c],), f"initial {p} > {q}")
    for a in X.alphabet:
        left = matmul([list(r) for r in s.A], [list(r) for r in X.matrices[a]])
        right = matmul([list(r) for r in Y.matrices[a]], [list(r) for r in s.A])
        bad = first_violation(left, right)
        if bad:
            return Verdict(
                False, "2", a, (Y.states[bad[0]], X.states[bad[1]]), "A M_X(a) <= M_Y(a) A fails"
            )
    return OK


def verify_matrix_fair_sim(X: Pbwa, Y: Pbwa, A, seqs: ApproxSequences) -> Verdict:
    """Check every fair-simulation condition exactly; report the first failure."""
    v = check_forward(X, Y, A)
    if not v:
        return v
    s = _Setup.make(X, Y, A)
    n1, m1, m2 = len(s.Y1), len(s.X1), len(s.X2)
    P11, P12 = seqs.seq11, seqs.seq12
    if not P11 or len(P11) != len(P12):
        raise WitnessError("sequences must be nonempty and of equal length")
    for m in P11:
        if not _shape_ok(m, n1, m1):
            raise WitnessError(f"A11 approximants must be {n1}x{m1}")
    for m in P12:
        if not _shape_ok(m, n1, m2):
            raise WitnessError(f"A12 approximants must be {n1}x{m2}")
    k = len(P11) - 1
    L11, L12 = seqs.final
    if seqs.omega:
        if L11 is None or L12 is None or seqs.ratio is None:
            raise WitnessError("an omega presentation needs a limit pair and a ratio")
        if not (_shape_ok(L11, n1, m1) and _shape_ok(L12, n1, m2)):
            raise WitnessError("limit pair has the wrong shape")

    if L11 != s.A11 or L12 != s.A12:
        return Verdict(False, "3b", None, None, "final approximants differ from A11/A12")
    for n in range(k):
        if not (_leq(P11[n], P11[n + 1]) and _leq(P12[n], P12[n + 1])):
            return Verdict(False, "3-increasing", None, (n,), f"approximant {n + 1} below {n}")
    if seqs.omega and not (_leq(P11[k], L11) and _leq(P12[k], L12)):
        return Verdict(False, "3-increasing", None, (k,), "last prefix element exceeds the limit")
    for n in range(k + 1):
        v = s.check_c(P11[n], P12[n], f"index {n}")
        if not v:
            return v
    if any(p != 0 for row in P12[0] for p in row):
        return Verdict(False, "3d", None, (0,), "A12 approximant 0 is not the zero matrix")
    for n in range(k):
        v = s.check_e(P12[n + 1], P11[n], P12[n], f"index {n}")
        if not v:
            return v
    if seqs.omega:
        r = seqs.ratio
        if not 0 <= r < 1:
            return Verdict(False, "3f", None, None, f"tail ratio {r} not in [0,1)")
        v = s.check_c(L11, L12, "omega")
        if not v:
            return v
        q1 = _mix(r, P12[k], L12)
        v = s.check_e(q1, P11[k], P12[k], f"tail start (index {k})")
        if not v:
            return v
        v = s.check_e(L12, L11, L12, "the limit")
        if not v:
            return v
    return OK


@dataclass
class SearchTrace:
    """Iterates produced by :func:`search_sequences`, kept for inspection."""

    a11: list = field(default_factory=list)
    a12: list = field(default_factory=list)
    outcome: str = ""


def _lp_max(lo: list, ub: list, rows: list, rhs: list) -> list:
    """Maximise the entry sum of ``z`` in ``[lo, ub]`` subject to ``rows.z <= rhs``.

    ``lo`` must be feasible.  Variables are flattened row-major.
    """
    nv = len(lo)
    if nv == 0:
        return []
    G, h = [], []
    for coeffs, b in zip(rows, rhs):
        slack = b - sum((c * l for c, l in zip(coeffs, lo)), Fraction(0))
        if slack < 0:
            raise AssertionError("lower bound infeasible in step LP")
        if any(coeffs):
            G.append(coeffs)
            h.append(slack)
    for k in range(nv):
        e = [Fraction(0)] * nv
        e[k] = Fraction(1)
        G.append(e)
        h.append(ub[k] - lo[k])
    z = maximize([Fraction(1)] * nv, G, h)
    return [l + d for l, d in zip(lo, z)]


def _flat(m) -> list:
    return [v for row in m for v in row]


def _shape(v, rows, cols) -> tuple:
    return tuple(tuple(v[r * cols:(r + 1) * cols]) for r in range(rows))


def _next_a11(s: _Setup, lo11, a12) -> tuple:
    """Largest-sum ``A11`` approximant above ``lo11`` satisfying the invariant."""
    n1, m1 = len(s.Y1), len(s.X1)
    idx = {(r, c): r * m1 + c for r in range(n1) for c in range(m1)}
    x1pos = {x: c for c, x in enumerate(s.X1)}
    zero11 = [[Fraction(0)] * m1 for _ in range(n1)]
    rows, rhs = [], []
    for a in s.X.alphabet:
        const = s.rhs(a, zero11, a12)  # contribution of everything except A11
        for r in range(n1):
            for x in range(s.X.n):
                coeffs = [Fraction(0)] * (n1 * m1)
                for c in range(m1):
                    coeffs[idx[r, c]] += s.MX1[a][c][x]
                if x in x1pos:
                    for r2 in range(n1):
                        coeffs[idx[r2, x1pos[x]]] -= s.MY1[a][r][s.Y1[r2]]
                rows.append(coeffs)
                rhs.append(const[r][x])
    ub = _flat(s.A11)
    return _shape(_lp_max(_flat(lo11), ub, rows, rhs), n1, m1)


def _next_a12(s: _Setup, lo12, a11, a12) -> tuple:
    """Largest-sum step successor of ``A12`` above ``lo12``."""
    n1, m2 = len(s.Y1), len(s.X2)
    rows, rhs = [], []
    for a in s.X.alphabet:
        R = s.rhs(a, a11, a12)
        for r in range(n1):
            for x in range(s.X.n):
                coeffs = [Fraction(0)] * (n1 * m2)
                for c in range(m2):
                    coeffs[r * m2 + c] = s.MX2[a][c][x]
                rows.append(coeffs)
                rhs.append(R[r][x])
    return _shape(_lp_max(_flat(lo12), _flat(s.A12), rows, rhs), n1, m2)


def _tail_ratio(s: _Setup, p11, p12) -> Fraction | None:
    """Least ratio making the geometric tail from ``(p11, p12)`` valid, if below 1."""
    L12 = s.A12
    r = Fraction(0)
    for a in s.X.alphabet:
        R = s.rhs(a, p11, p12)
        Lk = s.lhs12(a, p12)
        LL = s.lhs12(a, L12)
        for i in range(len(LL)):
            for j in range(len(LL[i])):
                gap = LL[i][j] - Lk[i][j]
                need = LL[i][j] - R[i][j]
                if gap > 0:
                    r = max(r, need / gap)
                elif need > 0:
                    return None
    return r if r < 1 else None


def search_sequences(
    X: Pbwa, Y: Pbwa, A, iteration_cap: int = 64, trace: SearchTrace | None = None
) -> ApproxSequences | None:
    """Search approximation sequences for ``A`` by a maximal monotone iteration.

    Returns ``None`` when the search is inconclusive.  A returned value
    always passes :func:`verify_matrix_fair_sim`.
    """
    if not check_forward(X, Y, A):
        return None
    s = _Setup.make(X, Y, A)
    trace = trace if trace is not None else SearchTrace()
    L11, L12 = s.A11, s.A12
    n1, m1, m2 = len(s.Y1), len(s.X1), len(s.X2)
    limit_ok = bool(s.check_c(L11, L12, "omega")) and bool(s.check_e(L12, L11, L12, "limit"))
    if not limit_ok:
        trace.outcome = "limit pair violates the invariant or step"
        return None

    a12 = tuple(tuple(Fraction(0) for _ in range(m2)) for _ in range(n1))
    a11 = _next_a11(s, [[Fraction(0)] * m1 for _ in range(n1)], a12)
    seq11, seq12 = [a11], [a12]
    trace.a11.append(a11)
    trace.a12.append(a12)
    for _ in range(iteration_cap):
        if a11 == L11 and a12 == L12:
            trace.outcome = "finite"
            return ApproxSequences(tuple(seq11), tuple(seq12))
        r = _tail_ratio(s, a11, a12)
        if r == 0:
            # one step reaches the target: a finite sequence suffices
            trace.outcome = "finite"
            return ApproxSequences(tuple(seq11) + (L11,), tuple(seq12) + (L12,))
        if r is not None:
            trace.outcome = "omega"
            return ApproxSequences(tuple(seq11), tuple(seq12), True, L11, L12, r)
        n12 = _next_a12(s, a12, a11, a12)
        n11 = _next_a11(s, a11, n12)
        if not (_leq(a11, n11) and _leq(a12, n12)):
            raise AssertionError("search iteration is not monotone")
        if n11 == a11 and n12 == a12:
            trace.outcome = "stalled below the target"
            return None
        a11, a12 = n11, n12
        seq11.append(a11)
        seq12.append(a12)
        trace.a11.append(a11)
        trace.a12.append(a12)
    trace.outcome = "iteration cap reached"
    return None


def accepting_closure(Y: Pbwa) -> Pbwa:
    """Make accepting every state with a positive-probability path to an accepting state."""
    g = chain_graph(Y)
    promoted = set(Y.accepting)
    for y in Y.accepting:
        promoted |= nx.ancestors(g, y)
    return Y.with_accepting(frozenset(promoted) & set(Y.states))


__all__ = [
    "ApproxSequences",
    "MatrixWitness",
    "SearchTrace",
    "Verdict",
    "WitnessError",
    "PbwaError",
    "accepting_closure",
    "check_forward",
    "search_sequences",
    "verify_matrix_fair_sim",
]
