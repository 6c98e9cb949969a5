"""Bounded language oracles.

These are deliberately independent of the simulation machinery: they decide
membership or compare languages on finite representatives (lasso words,
depth-bounded tree prefixes, cylinder sets) by exhaustive enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import networkx as nx

from .game import nonempty_states
from .nbta import AutomatonError, Nbta
from .pbwa import Pbwa, acceptance_vector, cylinder_prob, words


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word ``stem . loop^omega``."""

    stem: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(self.stem))
        object.__setattr__(self, "loop", tuple(self.loop))
        if not self.loop:
            raise ValueError("loop of a lasso word must be nonempty")

    def __str__(self):
        return f"{''.join(map(str, self.stem))}({''.join(map(str, self.loop))})^w"


def _require_unary(*auts: Nbta):
    for aut in auts:
        if not aut.is_unary():
            bad = [s for s, n in aut.alphabet.arities.items() if n != 1]
            raise AutomatonError(f"word automaton expected; symbols {bad} are not unary")


def _read(aut: Nbta, S, a) -> frozenset:
    return frozenset(ch[0] for x in S for sym, ch in aut.delta[x] if sym == a)


def nbw_lasso_member(X: Nbta, w: LassoWord) -> bool:
    """Whether ``w`` is accepted, by cycle search in the product with the loop."""
    _require_unary(X)
    S = frozenset(X.initial)
    for a in w.stem:
        S = _read(X, S, a)
    n = len(w.loop)
    g = nx.DiGraph()
    for x in X.states:
        for i in range(n):
            g.add_node((x, i))
            for sym, (c,) in X.delta[x]:
                if sym == w.loop[i]:
                    g.add_edge((x, i), (c, (i + 1) % n))
    reach = set()
    for x in S:
        reach |= nx.descendants(g, (x, 0)) | {(x, 0)}
    for comp in nx.strongly_connected_components(g.subgraph(reach)):
        if not any(x in X.accepting for x, _ in comp):
            continue
        if len(comp) > 1 or any(g.has_edge(v, v) for v in comp):
            return True
    return False


def lasso_member_bruteforce(X: Nbta, w: LassoWord) -> bool:
    """Reference check via the loop's relation with an accepting-visit flag.

    ``R[x][y]`` is 0 (no run), 1 (a run) or 2 (a run touching ``Acc``) for
    reading the loop once from ``x`` to ``y``.  The word is accepted iff some
    state reached after the stem and some loop iterations sits on a cycle of
    ``R`` with a flagged step.  Closures are taken by repeated squaring over
    ``|X|`` rounds, with no graph library involved.
    """
    _require_unary(X)
    states = list(X.states)
    cur = {x for x in X.initial}
    for a in w.stem:
        cur = {ch[0] for x in cur for sym, ch in X.delta[x] if sym == a}
    R = {}
    for x in states:
        front = {(x, int(x in X.accepting))}
        for a in w.loop:
            nxt = set()
            for y, f in front:
                for sym, ch in X.delta[y]:
                    if sym == a:
                        nxt.add((ch[0], f | int(ch[0] in X.accepting)))
            front = nxt
        for y, f in front:
            R[x, y] = max(R.get((x, y), 0), 1 + f)

    def compose(P, Q):
        out = {}
        for (x, y), p in P.items():
            for z in states:
                q = Q.get((y, z), 0)
                if q:
                    out[x, z] = max(out.get((x, z), 0), max(p, q))
        return out

    def union(P, Q):
        out = dict(P)
        for k, v in Q.items():
            out[k] = max(out.get(k, 0), v)
        return out

    closure = dict(R)
    for _ in range(len(states)):
        closure = union(closure, compose(closure, closure))
    starts = set(cur) | {y for (x, y) in closure if x in cur}
    return any(closure.get((y, y), 0) == 2 for y in starts)


def lassos(alphabet: Sequence, stem_bound: int, loop_bound: int):
    """Lassos by stem length, loop length, then lexicographically."""
    alphabet = sorted(alphabet)
    for s in range(stem_bound + 1):
        for l in range(1, loop_bound + 1):
            for stem in itertools.product(alphabet, repeat=s):
                for loop in itertools.product(alphabet, repeat=l):
                    yield LassoWord(stem, loop)


def nbw_inclusion_bounded(X: Nbta, Y: Nbta, stem_bound: int, loop_bound: int) -> LassoWord | None:
    """First lasso within the bounds accepted by ``X`` but not by ``Y``."""
    _require_unary(X, Y)
    if X.alphabet != Y.alphabet:
        raise AutomatonError("automata must share their alphabet")
    for w in lassos(X.alphabet.symbols, stem_bound, loop_bound):
        if nbw_lasso_member(X, w) and not nbw_lasso_member(Y, w):
            return w
    return None


HOLE = None  # a truncated subtree at the depth bound


@dataclass(frozen=True)
class PrefixTree:
    """A tree prefix: ``label`` with children, or the hole ``HOLE`` at the bound."""

    label: str | None
    children: tuple = ()

    @classmethod
    def hole(cls) -> "PrefixTree":
        return cls(HOLE)

    @property
    def is_hole(self) -> bool:
        return self.label is HOLE

    @property
    def depth(self) -> int:
        """Number of labelled levels."""
        if self.is_hole:
            return 0
        return 1 + max((c.depth for c in self.children), default=0)

    def well_formed(self, aut: Nbta, k: int) -> bool:
        """Arity-consistent and truncated exactly at depth ``k``."""
        if self.is_hole:
            return k == 0
        if k == 0 or self.label not in aut.alphabet.arities:
            return False
        if len(self.children) != aut.alphabet.arity(self.label):
            return False
        return all(c.well_formed(aut, k - 1) for c in self.children)

    def __str__(self):
        if self.is_hole:
            return "_"
        if not self.children:
            return str(self.label)
        return f"{self.label}({', '.join(map(str, self.children))})"


def _realizable_from(aut: Nbta, t: PrefixTree, live: frozenset) -> frozenset:
    if t.is_hole:
        return live
    kids = [_realizable_from(aut, c, live) for c in t.children]
    return frozenset(
        x
        for x in aut.states
        if any(
            sym == t.label and all(c in k for c, k in zip(ch, kids))
            for sym, ch in aut.delta[x]
        )
    )


def prefix_realizable(aut: Nbta, t: PrefixTree) -> bool:
    """Whether some run over ``t`` from an initial state ends in states with nonempty language."""
    return bool(_realizable_from(aut, t, nonempty_states(aut)) & aut.initial)


def tree_prefix_inclusion(X: Nbta, Y: Nbta, k: int) -> PrefixTree | None:
    """First depth-``k`` prefix realizable in ``X`` but not in ``Y``.

    A necessary condition for language inclusion only.  Trees are grouped by
    the pair of state sets that realize them, so each depth keeps at most one
    representative per pair.
    """
    if X.alphabet != Y.alphabet:
        raise AutomatonError("automata must share their alphabet")
    if k < 0:
        raise ValueError("depth must be non-negative")
    live_x, live_y = nonempty_states(X), nonempty_states(Y)
    layer = {(live_x, live_y): PrefixTree.hole()}
    for _ in range(k):
        nxt = {}
        sigs = list(layer)
        for sym, n in X.alphabet.arities.items():
            for combo in itertools.product(range(len(sigs)), repeat=n):
                kx = [sigs[i][0] for i in combo]
                ky = [sigs[i][1] for i in combo]
                sx = _step(X, sym, kx)
                sy = _step(Y, sym, ky)
                if (sx, sy) not in nxt:
                    nxt[sx, sy] = PrefixTree(sym, tuple(layer[sigs[i]] for i in combo))
        layer = nxt
    for (sx, sy), t in layer.items():
        if sx & X.initial and not sy & Y.initial:
            return t
    return None


def _step(aut: Nbta, sym, kids) -> frozenset:
    return frozenset(
        x
        for x in aut.states
        if any(s == sym and all(c in k for c, k in zip(ch, kids)) for s, ch in aut.delta[x])
    )


def cylinder_inclusion(X: Pbwa, Y: Pbwa, maxlen: int) -> tuple | None:
    """First word ``w`` with ``|w| <= maxlen`` whose cylinder is heavier under ``X``."""
    if set(X.alphabet) != set(Y.alphabet):
        raise ValueError("automata must share their alphabet")
    ax, ay = acceptance_vector(X), acceptance_vector(Y)
    for w in words(sorted(X.alphabet), maxlen):
        if cylinder_prob(X, w, ax) > cylinder_prob(Y, w, ay):
            return w
    return None
