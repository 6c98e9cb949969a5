"""Nondeterministic Büchi tree automata and fixed-point fair simulation.

A transition of state ``x`` is a pair ``(symbol, children)`` where
``children`` is a tuple of states of length ``arity(symbol)``.  A fair
simulation from ``X`` to ``Y`` is a relation below the solution of a
four-variable system (one variable per accepting/non-accepting block pair)
that also relates every initial state of ``X`` to some initial state of ``Y``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .lattice import MU, NU, Equation, EquationalSystem, PowersetLattice, solve

DEFAULT_MAX_ARITY = 3
ARITY_ENV = "FAIRSIM_MAX_ARITY"


class AutomatonError(ValueError):
    """A structurally invalid automaton or relation."""


def max_arity_setting() -> int:
    raw = os.environ.get(ARITY_ENV)
    if raw is None:
        return DEFAULT_MAX_ARITY
    try:
        value = int(raw)
    except ValueError:
        raise AutomatonError(f"{ARITY_ENV} must be an integer, got {raw!r}") from None
    if value < 0:
        raise AutomatonError(f"{ARITY_ENV} must be non-negative")
    return value


@dataclass(frozen=True)
class RankedAlphabet:
    arities: Mapping[str, int]

    def __post_init__(self):
        arities = dict(self.arities)
        if not arities:
            raise AutomatonError("alphabet must be nonempty")
        for sym, n in arities.items():
            if not isinstance(n, int) or n < 0:
                raise AutomatonError(f"arity of {sym!r} must be a natural number")
        object.__setattr__(self, "arities", dict(sorted(arities.items())))

    @property
    def symbols(self) -> tuple:
        return tuple(self.arities)

    def arity(self, sym) -> int:
        return self.arities[sym]

    @property
    def max_arity(self) -> int:
        return max(self.arities.values())

    def __hash__(self):
        return hash(tuple(self.arities.items()))


@dataclass(frozen=True)
class Nbta:
    states: tuple
    alphabet: RankedAlphabet
    delta: Mapping[Hashable, frozenset]
    initial: frozenset
    accepting: frozenset
    max_arity: int = field(default_factory=max_arity_setting, compare=False)

    def __post_init__(self):
        states = tuple(self.states)
        if len(set(states)) != len(states):
            raise AutomatonError("duplicate state names")
        object.__setattr__(self, "states", states)
        known = set(states)
        if self.alphabet.max_arity > self.max_arity:
            raise AutomatonError(
                f"arity {self.alphabet.max_arity} exceeds the configured cap {self.max_arity}"
            )
        delta = {}
        for x in states:
            ts = frozenset((sym, tuple(ch)) for sym, ch in self.delta.get(x, ()))
            for sym, ch in ts:
                if sym not in self.alphabet.arities:
                    raise AutomatonError(f"transition of {x!r} uses unknown symbol {sym!r}")
                if len(ch) != self.alphabet.arity(sym):
                    raise AutomatonError(
                        f"transition {x!r} --{sym}--> {ch!r} has {len(ch)} children, "
                        f"arity of {sym!r} is {self.alphabet.arity(sym)}"
                    )
                bad = [c for c in ch if c not in known]
                if bad:
                    raise AutomatonError(f"transition of {x!r} targets unknown states {bad!r}")
            delta[x] = ts
        extra = set(self.delta) - known
        if extra:
            raise AutomatonError(f"transitions given for unknown states {sorted(map(repr, extra))}")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        if not self.initial <= known:
            raise AutomatonError("initial states must be states")
        if not self.accepting <= known:
            raise AutomatonError("accepting states must be states")

    @classmethod
    def build(cls, states, alphabet, transitions, initial, accepting, **kw) -> "Nbta":
        """Construct from ``(state, symbol, children)`` triples."""
        if not isinstance(alphabet, RankedAlphabet):
            alphabet = RankedAlphabet(alphabet)
        delta: dict = {x: set() for x in states}
        for x, sym, ch in transitions:
            if x not in delta:
                raise AutomatonError(f"transition from unknown state {x!r}")
            delta[x].add((sym, tuple(ch)))
        return cls(tuple(states), alphabet, delta, frozenset(initial), frozenset(accepting), **kw)

    def __hash__(self):
        return hash((self.states, self.alphabet, self.initial, self.accepting))

    @property
    def non_accepting(self) -> tuple:
        return tuple(x for x in self.states if x not in self.accepting)

    @property
    def accepting_states(self) -> tuple:
        return tuple(x for x in self.states if x in self.accepting)

    def block(self, i: int) -> tuple:
        """Block 1 is the non-accepting part, block 2 the accepting part."""
        if i == 1:
            return self.non_accepting
        if i == 2:
            return self.accepting_states
        raise ValueError(f"block index must be 1 or 2, got {i}")

    def transitions(self) -> frozenset:
        return frozenset().union(*self.delta.values()) if self.delta else frozenset()

    def transition_triples(self):
        for x in self.states:
            for sym, ch in sorted(self.delta[x], key=repr):
                yield x, sym, ch

    def is_unary(self) -> bool:
        return all(n == 1 for n in self.alphabet.arities.values())


def tuple_space(aut: Nbta) -> frozenset:
    """All elements of the coproduct over symbols of ``states ** arity``."""
    out = set()
    for sym, n in aut.alphabet.arities.items():
        for ch in itertools.product(aut.states, repeat=n):
            out.add((sym, ch))
    return frozenset(out)


def _check_alphabets(X: Nbta, Y: Nbta):
    if X.alphabet != Y.alphabet:
        raise AutomatonError(
            f"alphabet mismatch: {dict(X.alphabet.arities)} vs {dict(Y.alphabet.arities)}"
        )


def box_op(X: Nbta, i: int, S, y_states: Iterable) -> frozenset:
    """Pairs ``(x, y)`` in block ``i`` of ``X`` times ``y_states`` such that
    every transition ``a`` of ``x`` has ``(a, y)`` in ``S``."""
    S = S if isinstance(S, (set, frozenset)) else frozenset(S)
    ys = tuple(y_states)
    return frozenset(
        (x, y)
        for x in X.block(i)
        for y in ys
        if all((a, y) in S for a in X.delta[x])
    )


def diamond_op(Y: Nbta, j: int, T) -> frozenset:
    """Pairs ``(a, y)`` with ``y`` in block ``j`` of ``Y`` such that some
    transition ``b`` of ``y`` has ``(a, b)`` in ``T``."""
    by_b: dict = {}
    for a, b in T:
        by_b.setdefault(b, set()).add(a)
    out = set()
    for y in Y.block(j):
        for b in Y.delta[y]:
            for a in by_b.get(b, ()):
                out.add((a, y))
    return frozenset(out)


def wedge_op(U, x_tuples: Iterable, y_tuples: Iterable) -> frozenset:
    """Equal-symbol tuple pairs whose children are pointwise related by ``U``."""
    U = U if isinstance(U, (set, frozenset)) else frozenset(U)
    ys_by_sym: dict = {}
    for b in y_tuples:
        ys_by_sym.setdefault(b[0], []).append(b)
    out = set()
    for a in x_tuples:
        sym, xs = a
        for b in ys_by_sym.get(sym, ()):
            if all((xc, yc) in U for xc, yc in zip(xs, b[1])):
                out.add((a, b))
    return frozenset(out)


def post_image(X: Nbta, P) -> frozenset:
    """``{(a, y) | (x, y) in P, a in delta(x)}``; the left adjoint of ``box_op``."""
    return frozenset((a, y) for x, y in P for a in X.delta[x])


BLOCKS = ((1, 1), (2, 1), (1, 2), (2, 2))
SIGNS = (NU, MU, NU, NU)


def block_universe(X: Nbta, Y: Nbta, i: int, j: int) -> frozenset:
    return frozenset(itertools.product(X.block(i), Y.block(j)))


def step_operator(X: Nbta, Y: Nbta, i: int, j: int):
    """The right-hand side ``box_i . diamond_j . wedge`` on one block."""
    tx, ty = X.transitions(), Y.transitions()
    yj = Y.block(j)

    def rhs(values):
        U = frozenset().union(*values)
        return box_op(X, i, diamond_op(Y, j, wedge_op(U, tx, ty)), yj)

    return rhs


def fair_sim_system(X: Nbta, Y: Nbta) -> EquationalSystem:
    """The fair-simulation system with signs (nu, mu, nu, nu) over the blocks
    X1xY1, X2xY1, X1xY2, X2xY2."""
    _check_alphabets(X, Y)
    eqs = []
    for (i, j), sign in zip(BLOCKS, SIGNS):
        eqs.append(
            Equation(
                sign=sign,
                lattice=PowersetLattice(block_universe(X, Y, i, j)),
                rhs=step_operator(X, Y, i, j),
                name=f"u{len(eqs) + 1}",
            )
        )
    return EquationalSystem(eqs)


def solution_relation(X: Nbta, Y: Nbta) -> frozenset:
    """Union of the four blocks of the system's solution."""
    return frozenset().union(*solve(fair_sim_system(X, Y)).values)


@dataclass(frozen=True)
class SimulationCheck:
    holds: bool
    condition: str | None = None
    witness: tuple | None = None
    detail: str = ""

    def __bool__(self):
        return self.holds


def _check_relation(X: Nbta, Y: Nbta, R) -> frozenset:
    R = frozenset(R)
    xs, ys = set(X.states), set(Y.states)
    for p in R:
        if not (isinstance(p, tuple) and len(p) == 2 and p[0] in xs and p[1] in ys):
            raise AutomatonError(f"relation pair {p!r} is not in X x Y")
    return R


def initial_condition(X: Nbta, Y: Nbta, R) -> SimulationCheck:
    for x in sorted(X.initial, key=repr):
        if not any((x, y) in R for y in Y.initial):
            return SimulationCheck(
                False, "initial", (x,), f"initial state {x!r} is related to no initial state"
            )
    return SimulationCheck(True)


def check_fair_simulation(X: Nbta, Y: Nbta, R, solution=None) -> SimulationCheck:
    """Decide whether ``R`` is a fair simulation from ``X`` to ``Y``."""
    _check_alphabets(X, Y)
    R = _check_relation(X, Y, R)
    verdict = initial_condition(X, Y, R)
    if not verdict:
        return verdict
    sol = solution_relation(X, Y) if solution is None else solution
    outside = sorted(R - sol, key=repr)
    if outside:
        return SimulationCheck(
            False, "below-solution", outside[0], f"pair {outside[0]!r} is not below the solution"
        )
    return SimulationCheck(True)


def largest_fair_simulation(X: Nbta, Y: Nbta) -> frozenset | None:
    """The solution relation if it is a fair simulation, else ``None``.

    Every fair simulation lies below the solution, so a fair simulation
    exists iff the solution itself meets the initial-state condition.
    """
    _check_alphabets(X, Y)
    sol = solution_relation(X, Y)
    return sol if initial_condition(X, Y, sol) else None
