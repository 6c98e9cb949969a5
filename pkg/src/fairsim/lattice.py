"""Finite lattices and equational systems of nested least/greatest fixed points.

An equational system is an ordered list ``u_i =_eta f_i(u_1, ..., u_m)``
with ``eta`` either ``MU`` (least) or ``NU`` (greatest).  It is solved by
eliminating variables left to right (each variable is replaced by its interim
solution, a function of the later variables) and then substituting closed
values back from right to left.  The order of the equations matters.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import reduce
from typing import Any, Callable, Hashable, Iterable, Sequence

MU = "mu"
NU = "nu"


class MonotonicityError(ValueError):
    """Raised when a Kleene iteration stops being a chain."""


class FiniteLattice:
    """Abstract finite lattice.

    Subclasses provide ``elements``, ``leq``, ``join``, ``meet``, ``bottom``
    and ``top``.  ``key`` gives a canonical hashable encoding used for
    equality; the default is the element itself.
    """

    bottom: Any
    top: Any

    def elements(self) -> Iterable[Any]:
        raise NotImplementedError

    def leq(self, a, b) -> bool:
        raise NotImplementedError

    def join(self, a, b):
        raise NotImplementedError

    def meet(self, a, b):
        raise NotImplementedError

    def key(self, a) -> Hashable:
        return a

    def eq(self, a, b) -> bool:
        return self.key(a) == self.key(b)

    def height(self) -> int:
        """Length of the longest chain (an upper bound on Kleene steps)."""
        raise NotImplementedError

    def sample(self, rng: random.Random):
        return rng.choice(list(self.elements()))


class PowersetLattice(FiniteLattice):
    """Subsets of a finite universe ordered by inclusion (as frozensets)."""

    def __init__(self, universe: Iterable[Hashable]):
        self.universe = frozenset(universe)
        self.bottom = frozenset()
        self.top = self.universe

    def elements(self):
        items = sorted(self.universe, key=repr)
        for mask in range(1 << len(items)):
            yield frozenset(x for i, x in enumerate(items) if mask >> i & 1)

    def leq(self, a, b):
        return a <= b

    def join(self, a, b):
        return a | b

    def meet(self, a, b):
        return a & b

    def height(self):
        return len(self.universe)

    def contains(self, a) -> bool:
        return a <= self.universe

    def sample(self, rng):
        return frozenset(x for x in sorted(self.universe, key=repr) if rng.random() < 0.5)

    def __repr__(self):
        return f"PowersetLattice({len(self.universe)} atoms)"


class ChainLattice(FiniteLattice):
    """The totally ordered lattice ``0 < 1 < ... < n``."""

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("chain length must be non-negative")
        self.n = n
        self.bottom = 0
        self.top = n

    def elements(self):
        return range(self.n + 1)

    def leq(self, a, b):
        return a <= b

    def join(self, a, b):
        return max(a, b)

    def meet(self, a, b):
        return min(a, b)

    def height(self):
        return self.n


TWO = ChainLattice(1)


def kleene_fixpoint(lattice: FiniteLattice, f: Callable[[Any], Any], mode: str):
    """Least (``MU``) or greatest (``NU``) fixed point of a monotone ``f``.

    Iterates from bottom (resp. top).  Each step must move up (resp. down);
    otherwise ``f`` is not monotone and :class:`MonotonicityError` is raised.
    """
    if mode == MU:
        x = lattice.bottom
        ordered = lambda old, new: lattice.leq(old, new)
    elif mode == NU:
        x = lattice.top
        ordered = lambda old, new: lattice.leq(new, old)
    else:
        raise ValueError(f"unknown fixpoint mode {mode!r}")
    for _ in range(lattice.height() + 1):
        y = f(x)
        if lattice.eq(x, y):
            return x
        if not ordered(x, y):
            raise MonotonicityError(
                f"{'ascending' if mode == MU else 'descending'} Kleene chain broken: "
                f"{x!r} -> {y!r}"
            )
        x = y
    # a strictly monotone chain cannot outlast the lattice height
    raise MonotonicityError("Kleene iteration exceeded the lattice height")


@dataclass(frozen=True)
class Equation:
    sign: str
    lattice: FiniteLattice
    rhs: Callable[[Sequence[Any]], Any]
    name: str = ""

    def __post_init__(self):
        if self.sign not in (MU, NU):
            raise ValueError(f"sign must be {MU!r} or {NU!r}, got {self.sign!r}")


class EquationalSystem:
    """Ordered equations; ``rhs`` receives the full tuple of variable values."""

    def __init__(self, equations: Iterable[Equation]):
        self.equations = tuple(equations)
        if not self.equations:
            raise ValueError("an equational system needs at least one equation")

    def __len__(self):
        return len(self.equations)

    @property
    def lattices(self):
        return [eq.lattice for eq in self.equations]

    def evaluate(self, values: Sequence[Any]) -> list:
        return [eq.rhs(tuple(values)) for eq in self.equations]

    def is_solution_fixed_point(self, values: Sequence[Any]) -> bool:
        return all(
            eq.lattice.eq(v, w)
            for eq, v, w in zip(self.equations, values, self.evaluate(values))
        )


@dataclass(frozen=True)
class Solution:
    values: tuple

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def solve(system: EquationalSystem) -> Solution:
    """Solve ``system`` by left-to-right elimination and back-propagation.

    ``interim(i, later)`` returns the interim solutions for variables
    ``0..i`` as functions of the fixed values ``later`` of ``i+1..m-1``.
    Calls are memoised on ``(i, keys of later)``.
    """
    eqs = system.equations
    memo: dict = {}

    def interim(i: int, later: tuple) -> tuple:
        if i < 0:
            return ()
        key = (i, tuple(eqs[i + 1 + k].lattice.key(v) for k, v in enumerate(later)))
        if key in memo:
            return memo[key]
        eq = eqs[i]

        def reduced(x):
            earlier = interim(i - 1, (x,) + later)
            return eq.rhs(earlier + (x,) + later)

        xi = kleene_fixpoint(eq.lattice, reduced, eq.sign)
        result = interim(i - 1, (xi,) + later) + (xi,)
        memo[key] = result
        return result

    return Solution(interim(len(eqs) - 1, ()))


def check_monotone(
    lattice_in: Sequence[FiniteLattice],
    lattice_out: FiniteLattice,
    f: Callable[[Sequence[Any]], Any],
    rng: random.Random,
    samples: int = 100,
) -> bool:
    """Sampled monotonicity test: ``x <= y`` pointwise implies ``f(x) <= f(y)``.

    Pairs are built by sampling ``x`` and joining it with another sample.
    """
    for _ in range(samples):
        x = tuple(L.sample(rng) for L in lattice_in)
        y = tuple(L.join(a, L.sample(rng)) for L, a in zip(lattice_in, x))
        if not lattice_out.leq(f(x), f(y)):
            return False
    return True


def join_all(lattice: FiniteLattice, items: Iterable[Any]):
    return reduce(lattice.join, items, lattice.bottom)
