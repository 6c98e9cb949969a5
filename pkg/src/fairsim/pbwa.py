"""Probabilistic Büchi word automata over exact rationals.

A PBWA is generative: from state ``x`` it emits letter ``a`` and moves to
``x'`` with probability ``M(a)[x][x']``.  Rows may sum to less than one; the
missing mass is divergence, modelled by an absorbing sink.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .linalg import solve_linear


class PbwaError(ValueError):
    """Invalid automaton data (shape, range or substochasticity)."""


class _Sink:
    __slots__ = ()

    def __repr__(self):
        return "⊥"

    def __reduce__(self):
        return "SINK"


SINK = _Sink()


def as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        raise PbwaError(f"floating point value {v!r} not allowed; use p/q")
    return Fraction(v)


@dataclass(frozen=True, eq=False)
class Pbwa:
    states: tuple
    alphabet: tuple
    matrices: Mapping[str, tuple]
    initial: tuple
    accepting: frozenset

    def __post_init__(self):
        states = tuple(self.states)
        alphabet = tuple(self.alphabet)
        n = len(states)
        if len(set(states)) != n:
            raise PbwaError("duplicate state names")
        if len(set(alphabet)) != len(alphabet):
            raise PbwaError("duplicate letters")
        if set(self.matrices) - set(alphabet):
            raise PbwaError(f"matrices given for unknown letters {sorted(set(self.matrices) - set(alphabet))}")
        mats = {}
        for a in alphabet:
            raw = self.matrices.get(a)
            if raw is None:
                mats[a] = tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
                continue
            if len(raw) != n or any(len(r) != n for r in raw):
                raise PbwaError(f"matrix for letter {a!r} must be {n}x{n}")
            mats[a] = tuple(tuple(as_fraction(v) for v in row) for row in raw)
        init = tuple(as_fraction(v) for v in self.initial)
        if len(init) != n:
            raise PbwaError(f"initial vector must have {n} entries")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        if not self.accepting <= set(states):
            raise PbwaError("accepting states must be states")
        for a, m in mats.items():
            for i, row in enumerate(m):
                for j, v in enumerate(row):
                    if not 0 <= v <= 1:
                        raise PbwaError(f"M({a})[{states[i]!r}][{states[j]!r}] = {v} not in [0,1]")
        for i, x in enumerate(states):
            mass = sum(sum(mats[a][i]) for a in alphabet)
            if mass > 1:
                raise PbwaError(f"row mass of {x!r} is {mass} > 1")
        for x, v in zip(states, init):
            if not 0 <= v <= 1:
                raise PbwaError(f"initial probability of {x!r} is {v} not in [0,1]")
        if sum(init) > 1:
            raise PbwaError(f"initial mass {sum(init)} > 1")

    @classmethod
    def build(cls, states, alphabet, transitions: Iterable, initial: Mapping, accepting) -> "Pbwa":
        """Construct from ``(x, a, x', p)`` entries and a sparse initial map."""
        states = tuple(states)
        idx = {x: i for i, x in enumerate(states)}
        n = len(states)
        mats = {a: [[Fraction(0)] * n for _ in range(n)] for a in alphabet}
        for x, a, x2, p in transitions:
            if a not in mats:
                raise PbwaError(f"unknown letter {a!r}")
            if x not in idx or x2 not in idx:
                raise PbwaError(f"transition {x!r} -{a}-> {x2!r} uses unknown states")
            mats[a][idx[x]][idx[x2]] += as_fraction(p)
        init = [Fraction(0)] * n
        for x, p in initial.items():
            if x not in idx:
                raise PbwaError(f"initial mass on unknown state {x!r}")
            init[idx[x]] += as_fraction(p)
        return cls(states, tuple(alphabet), mats, tuple(init), frozenset(accepting))

    def __eq__(self, other):
        if not isinstance(other, Pbwa):
            return NotImplemented
        return (
            self.states == other.states
            and self.alphabet == other.alphabet
            and self.matrices == other.matrices
            and self.initial == other.initial
            and self.accepting == other.accepting
        )

    def __hash__(self):
        return hash((self.states, self.alphabet, self.initial, self.accepting))

    @property
    def n(self) -> int:
        return len(self.states)

    def index(self, x) -> int:
        return self.states.index(x)

    def block(self, i: int) -> tuple:
        """Indices of non-accepting (``i == 1``) or accepting (``i == 2``) states."""
        if i == 1:
            return tuple(k for k, x in enumerate(self.states) if x not in self.accepting)
        if i == 2:
            return tuple(k for k, x in enumerate(self.states) if x in self.accepting)
        raise ValueError(f"block index must be 1 or 2, got {i}")

    def with_accepting(self, accepting) -> "Pbwa":
        return Pbwa(self.states, self.alphabet, self.matrices, self.initial, frozenset(accepting))

    def row_mass(self, i: int) -> Fraction:
        return sum((sum(self.matrices[a][i]) for a in self.alphabet), Fraction(0))

    def letter_matrix(self, a) -> tuple:
        try:
            return self.matrices[a]
        except KeyError:
            raise PbwaError(f"unknown letter {a!r}") from None


def chain_matrix(aut: Pbwa) -> list:
    """Letter-summed transition matrix extended by the divergence sink (last index)."""
    n = aut.n
    P = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        for a in aut.alphabet:
            for j, v in enumerate(aut.matrices[a][i]):
                P[i][j] += v
        P[i][n] = 1 - sum(P[i][:n])
    P[n][n] = Fraction(1)
    return P


def chain_graph(aut: Pbwa) -> nx.DiGraph:
    P = chain_matrix(aut)
    nodes = list(aut.states) + [SINK]
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    for i, u in enumerate(nodes):
        for j, v in enumerate(nodes):
            if P[i][j] > 0:
                g.add_edge(u, v)
    return g


def nodiv_k(aut: Pbwa, k: int) -> list:
    """The ``k``-th iterate of the no-divergence recurrence, starting from ones."""
    if k < 0:
        raise ValueError("k must be non-negative")
    v = [Fraction(1)] * aut.n
    for _ in range(k):
        v = [
            sum(
                (aut.matrices[a][i][j] * v[j] for a in aut.alphabet for j in range(aut.n)),
                Fraction(0),
            )
            for i in range(aut.n)
        ]
    return v


def reach_probability(aut: Pbwa, targets) -> list:
    """Exact probability of eventually reaching ``targets`` (states or ``SINK``).

    States with no path to the targets get 0; the remaining linear system
    then has a unique solution.
    """
    P = chain_matrix(aut)
    nodes = list(aut.states) + [SINK]
    targets = set(targets)
    g = chain_graph(aut)
    can = set()
    for t in targets:
        can |= nx.ancestors(g, t) | {t}
    unknown = [i for i, v in enumerate(nodes) if v in can and v not in targets]
    pos = {i: k for k, i in enumerate(unknown)}
    A = [[Fraction(0)] * len(unknown) for _ in unknown]
    b = [Fraction(0)] * len(unknown)
    for k, i in enumerate(unknown):
        A[k][k] += 1
        for j, v in enumerate(nodes):
            p = P[i][j]
            if not p:
                continue
            if v in targets:
                b[k] += p
            elif j in pos:
                A[k][pos[j]] -= p
    sol = solve_linear(A, b) if unknown else []
    out = []
    for i, v in enumerate(nodes[:-1]):
        if v in targets:
            out.append(Fraction(1))
        elif i in pos:
            out.append(sol[pos[i]])
        else:
            out.append(Fraction(0))
    return out


def nodiv(aut: Pbwa) -> list:
    """Limit of ``nodiv_k``: one minus the probability of reaching the sink."""
    return [1 - p for p in reach_probability(aut, {SINK})]


def bsccs(aut: Pbwa) -> list:
    """Bottom strongly connected components of the chain, as frozensets.

    Ordered by the first state index of each component; the sink's component
    comes last and is listed only when some state can diverge.
    """
    g = chain_graph(aut)
    cond = nx.condensation(g)
    out = []
    for c in cond.nodes:
        if cond.out_degree(c) == 0:
            out.append(frozenset(cond.nodes[c]["members"]))
    if g.in_degree(SINK) == 1:  # only its own self-loop
        out.remove(frozenset({SINK}))
    order = {x: i for i, x in enumerate(list(aut.states) + [SINK])}
    return sorted(out, key=lambda comp: min(order[x] for x in comp))


def accepting_bscc_union(aut: Pbwa) -> frozenset:
    """States of the bottom components that contain an accepting state."""
    out = set()
    for comp in bsccs(aut):
        if comp & aut.accepting:
            out |= comp
    return frozenset(out)


def acceptance_vector(aut: Pbwa) -> list:
    """Per state, the probability of visiting accepting states infinitely often."""
    U = accepting_bscc_union(aut)
    if not U:
        return [Fraction(0)] * aut.n
    return reach_probability(aut, U)


def word_vector(aut: Pbwa, word: Sequence) -> list:
    """Sub-distribution over states after emitting ``word`` from the initial vector."""
    v = list(aut.initial)
    for a in word:
        M = aut.letter_matrix(a)
        v = [sum((v[i] * M[i][j] for i in range(aut.n)), Fraction(0)) for j in range(aut.n)]
    return v


def cylinder_prob(aut: Pbwa, word: Sequence, acc: Sequence | None = None) -> Fraction:
    """Language measure of the cylinder of all infinite words extending ``word``."""
    acc = acceptance_vector(aut) if acc is None else acc
    v = word_vector(aut, word)
    return sum((p * q for p, q in zip(v, acc)), Fraction(0))


def words(alphabet: Sequence, maxlen: int):
    """All words of length ``0..maxlen`` by length, then lexicographically."""
    layer = [()]
    for _ in range(maxlen + 1):
        yield from layer
        layer = [w + (a,) for w in layer for a in alphabet]
