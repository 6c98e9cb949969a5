"""Parity games: the fair-simulation game, small progress measures, and the
Büchi tree nonemptiness game.

Convention: a play is won by Even iff the maximal priority occurring
infinitely often is even.  A player who has no move loses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Mapping

from .nbta import AutomatonError, Nbta, _check_alphabets

EVEN = 0
ODD = 1

START = "*"


@dataclass(frozen=True)
class ParityGame:
    positions: tuple
    owner: Mapping[Hashable, int]
    moves: Mapping[Hashable, tuple]
    priority: Mapping[Hashable, int]

    def __post_init__(self):
        pos = set(self.positions)
        if len(pos) != len(self.positions):
            raise ValueError("duplicate positions")
        for v in self.positions:
            if self.owner[v] not in (EVEN, ODD):
                raise ValueError(f"bad owner for {v!r}")
            if self.priority[v] < 0:
                raise ValueError(f"negative priority at {v!r}")
            for w in self.moves.get(v, ()):
                if w not in pos:
                    raise ValueError(f"move {v!r} -> {w!r} leaves the game")

    @property
    def max_priority(self) -> int:
        return max(self.priority.values(), default=0)

    def successors(self, v) -> tuple:
        return tuple(self.moves.get(v, ()))

    def dump(self, winners: Mapping | None = None) -> str:
        """One line per position: ``index owner priority -> successors [winner]``."""
        index = {v: k for k, v in enumerate(self.positions)}
        lines = []
        for v in self.positions:
            succ = " ".join(str(index[w]) for w in self.successors(v))
            who = "even" if self.owner[v] == EVEN else "odd"
            line = f"{index[v]} {who} {self.priority[v]} -> [{succ}] {v!r}"
            if winners is not None:
                line += f" winner={'even' if winners[v] == EVEN else 'odd'}"
            lines.append(line)
        return "\n".join(lines)


def build_simulation_game(X: Nbta, Y: Nbta) -> ParityGame:
    """The fair-simulation game of ``X`` against ``Y``, restricted to the
    positions reachable from ``START``.

    Positions are tagged tuples: ``("*",)``, ``("x", x)``, ``("xy", x, y)``,
    ``("ay", a, y)`` and ``("tuple", pairs)``.
    """
    _check_alphabets(X, Y)
    acc_x, acc_y = X.accepting, Y.accepting
    owner, moves, prio = {}, {}, {}
    start = (START,)
    order = []
    stack = [start]
    seen = {start}

    def expand(v):
        tag = v[0]
        if tag == START:
            return ODD, 0, tuple(("x", x) for x in sorted(X.initial, key=repr))
        if tag == "x":
            x = v[1]
            return EVEN, 0, tuple(("xy", x, y) for y in sorted(Y.initial, key=repr))
        if tag == "xy":
            _, x, y = v
            if y in acc_y:
                p = 2
            elif x in acc_x:
                p = 1
            else:
                p = 0
            return ODD, p, tuple(("ay", a, y) for a in sorted(X.delta[x], key=repr))
        if tag == "ay":
            _, (sym, xs), y = v
            succ = []
            for bsym, ys in sorted(Y.delta[y], key=repr):
                if bsym == sym:
                    succ.append(("tuple", tuple(zip(xs, ys))))
            return EVEN, 0, tuple(succ)
        if tag == "tuple":
            return ODD, 0, tuple(("xy", x, y) for x, y in v[1])
        raise AssertionError(v)

    while stack:
        v = stack.pop()
        order.append(v)
        o, p, succ = expand(v)
        owner[v], prio[v], moves[v] = o, p, succ
        for w in succ:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return ParityGame(tuple(order), owner, moves, prio)


TOP = None  # the distinguished top value of a progress measure


@dataclass
class SmallProgressMeasure:
    """Counters per odd priority, most significant = highest priority.

    ``values[v]`` is either ``TOP`` or a tuple aligned with ``odd_priorities``
    (listed from highest to lowest); ``bounds[k]`` is the number of
    positions with priority ``odd_priorities[k]``.
    """

    odd_priorities: tuple
    bounds: tuple
    values: dict = field(default_factory=dict)

    @classmethod
    def for_game(cls, game: ParityGame) -> "SmallProgressMeasure":
        odds = tuple(sorted({p for p in game.priority.values() if p % 2}, reverse=True))
        bounds = tuple(sum(1 for v in game.positions if game.priority[v] == q) for q in odds)
        zero = (0,) * len(odds)
        return cls(odds, bounds, {v: zero for v in game.positions})

    def truncate(self, m, p):
        """Keep counters of priorities >= ``p``, zero the rest."""
        if m is TOP:
            return TOP
        return tuple(c if q >= p else 0 for c, q in zip(m, self.odd_priorities))

    def less(self, a, b) -> bool:
        if a is TOP:
            return False
        if b is TOP:
            return True
        return a < b

    def prog(self, m, p):
        """Least measure ``n`` with ``n >=_p m``, strictly if ``p`` is odd."""
        if m is TOP:
            return TOP
        t = self.truncate(m, p)
        if p % 2 == 0:
            return t
        return self._increment(t, p)

    def _increment(self, t, p):
        # increment the lowest counter of priority >= p, carrying upwards
        digits = list(t)
        idx = [k for k, q in enumerate(self.odd_priorities) if q >= p]
        for k in reversed(idx):
            if digits[k] < self.bounds[k]:
                digits[k] += 1
                for k2 in idx:
                    if k2 > k:
                        digits[k2] = 0
                return tuple(digits)
        return TOP


@dataclass
class ParitySolution:
    winner: dict
    strategy: dict
    measure: SmallProgressMeasure
    lifts: int = 0

    @property
    def even_region(self) -> frozenset:
        return frozenset(v for v, w in self.winner.items() if w == EVEN)

    @property
    def odd_region(self) -> frozenset:
        return frozenset(v for v, w in self.winner.items() if w == ODD)


def _best_successor(game, pm, v):
    succ = game.successors(v)
    cands = [pm.prog(pm.values[w], game.priority[v]) for w in succ]
    if not cands:
        # a stuck Even loses, a stuck Odd loses
        return (TOP, None) if game.owner[v] == EVEN else ((0,) * len(pm.bounds), None)
    if game.owner[v] == EVEN:
        k = min(range(len(cands)), key=lambda k: (cands[k] is TOP, cands[k] or ()))
    else:
        k = max(range(len(cands)), key=lambda k: (cands[k] is TOP, cands[k] or ()))
    return cands[k], succ[k]


def solve_parity(game: ParityGame, on_lift=None) -> ParitySolution:
    """Jurdziński's small progress measure lifting algorithm (worklist form).

    ``on_lift(v, old, new)`` is called after each strict lift.
    """
    pm = SmallProgressMeasure.for_game(game)
    preds: dict = {v: [] for v in game.positions}
    for v in game.positions:
        for w in game.successors(v):
            preds[w].append(v)
    work = list(game.positions)
    queued = set(work)
    lifts = 0
    while work:
        v = work.pop()
        queued.discard(v)
        cur = pm.values[v]
        if cur is TOP:
            continue
        new, _ = _best_successor(game, pm, v)
        if pm.less(cur, new):
            lifts += 1
            pm.values[v] = new
            if on_lift is not None:
                on_lift(v, cur, new)
            for u in preds[v]:
                if u not in queued:
                    queued.add(u)
                    work.append(u)
    winner = {v: (ODD if pm.values[v] is TOP else EVEN) for v in game.positions}
    strategy = {}
    for v in game.positions:
        if game.owner[v] == EVEN and winner[v] == EVEN and game.successors(v):
            _, w = _best_successor(game, pm, v)
            strategy[v] = w
    return ParitySolution(winner, strategy, pm, lifts)


def validate_progress_measure(game: ParityGame, pm: SmallProgressMeasure) -> bool:
    """Local progress conditions at every non-top position.

    ``rho(v) >=_{p(v)} rho(w)`` (strictly when ``p(v)`` is odd) must hold
    for some successor of an Even position and all successors of an Odd one.
    """
    odds = tuple(sorted({p for p in game.priority.values() if p % 2}, reverse=True))
    if tuple(pm.odd_priorities) != odds:
        raise ValueError("measure odd priorities do not match the game")
    if set(pm.values) != set(game.positions):
        raise ValueError("measure is not defined on exactly the game positions")
    for v, m in pm.values.items():
        if m is TOP:
            continue
        if len(m) != len(odds):
            raise ValueError(f"measure at {v!r} has wrong dimension")
        if any(c < 0 or c > b for c, b in zip(m, pm.bounds)):
            return False

    def progresses(v, w):
        mw = pm.values[w]
        if mw is TOP:
            return False
        p = game.priority[v]
        a, b = pm.truncate(pm.values[v], p), pm.truncate(mw, p)
        return a > b if p % 2 else a >= b

    for v in game.positions:
        if pm.values[v] is TOP:
            continue
        succ = game.successors(v)
        if game.owner[v] == EVEN:
            if not any(progresses(v, w) for w in succ):
                return False
        else:
            if not all(progresses(v, w) for w in succ):
                return False
    return True


def even_wins_simulation(X: Nbta, Y: Nbta) -> bool:
    game = build_simulation_game(X, Y)
    return solve_parity(game).winner[(START,)] == EVEN


def nonemptiness_game(X: Nbta) -> tuple[ParityGame, dict]:
    """Büchi tree nonemptiness as a game; returns the game and, per state,
    whether the language from that state is nonempty.

    Even picks a transition at a state position (priority 2 if accepting,
    1 otherwise); Odd picks a child direction at a tuple position.
    """
    owner, moves, prio = {}, {}, {}
    positions = []
    for x in X.states:
        v = ("state", x)
        positions.append(v)
        owner[v] = EVEN
        prio[v] = 2 if x in X.accepting else 1
        moves[v] = tuple(("tr", x, t) for t in sorted(X.delta[x], key=repr))
        for t in sorted(X.delta[x], key=repr):
            tv = ("tr", x, t)
            positions.append(tv)
            owner[tv] = ODD
            prio[tv] = 0
            moves[tv] = tuple(dict.fromkeys(("state", c) for c in t[1]))
    game = ParityGame(tuple(positions), owner, moves, prio)
    sol = solve_parity(game)
    return game, {x: sol.winner[("state", x)] == EVEN for x in X.states}


def nonempty_states(X: Nbta) -> frozenset:
    _, flags = nonemptiness_game(X)
    return frozenset(x for x, ok in flags.items() if ok)


def brute_force_winners(game: ParityGame) -> dict:
    """Exponential oracle: enumerate Even's positional strategies.

    Even wins from ``v`` iff some strategy leaves Odd unable to reach either a
    stuck Even position or a cycle whose maximal priority is odd.
    """
    evens = [v for v in game.positions if game.owner[v] == EVEN and game.successors(v)]
    choices = [game.successors(v) for v in evens]
    won = set()
    for pick in itertools.product(*choices):
        strat = dict(zip(evens, pick))
        edges = {}
        for v in game.positions:
            if game.owner[v] == EVEN:
                edges[v] = (strat[v],) if v in strat else ()
            else:
                edges[v] = game.successors(v)
        bad = {v for v in game.positions if game.owner[v] == EVEN and not edges[v]}
        for p in {q for q in game.priority.values() if q % 2}:
            sub = {v for v in game.positions if game.priority[v] <= p}
            for v in sub:
                if game.priority[v] == p and _on_cycle_within(v, edges, sub):
                    bad.add(v)
        odd_wins = _backward_reach(bad, edges, game.positions)
        won |= set(game.positions) - odd_wins
        if len(won) == len(game.positions):
            break
    return {v: (EVEN if v in won else ODD) for v in game.positions}


def _on_cycle_within(v, edges, allowed) -> bool:
    stack = [w for w in edges[v] if w in allowed]
    seen = set()
    while stack:
        w = stack.pop()
        if w == v:
            return True
        if w in seen:
            continue
        seen.add(w)
        stack.extend(u for u in edges[w] if u in allowed)
    return False


def _backward_reach(targets, edges, positions) -> set:
    preds = {v: [] for v in positions}
    for v in positions:
        for w in edges[v]:
            preds[w].append(v)
    out = set(targets)
    stack = list(targets)
    while stack:
        w = stack.pop()
        for u in preds[w]:
            if u not in out:
                out.add(u)
                stack.append(u)
    return out


__all__ = [
    "EVEN",
    "ODD",
    "START",
    "TOP",
    "ParityGame",
    "SmallProgressMeasure",
    "ParitySolution",
    "build_simulation_game",
    "solve_parity",
    "validate_progress_measure",
    "even_wins_simulation",
    "nonemptiness_game",
    "nonempty_states",
    "brute_force_winners",
    "AutomatonError",
]
