"""Seeded random instances and the cross-validation / soundness property run."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .game import EVEN, ODD, ParityGame, even_wins_simulation
from .matrixsim import MatrixWitness, search_sequences, verify_matrix_fair_sim
from .nbta import Nbta, largest_fair_simulation
from .oracle import cylinder_inclusion, nbw_inclusion_bounded, tree_prefix_inclusion
from .pbwa import Pbwa


def random_nbta(rng: random.Random, max_states: int = 4, arities: dict | None = None) -> Nbta:
    """Random automaton; the alphabet is drawn too unless ``arities`` is given."""
    if arities is None:
        arities = random_arities(rng)
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    trans = []
    for x in states:
        for sym, k in arities.items():
            for _ in range(rng.choice((0, 1, 1, 2))):
                trans.append((x, sym, tuple(rng.choice(states) for _ in range(k))))
    initial = rng.sample(states, rng.randint(1, min(2, n)))
    accepting = [x for x in states if rng.random() < 0.5]
    return Nbta.build(states, arities, trans, initial, accepting)


def random_arities(rng: random.Random) -> dict:
    if rng.random() < 0.35:
        return {"a": 1, "b": 1}
    syms = ["a", "b"][: rng.randint(1, 2)]
    out = {s: rng.choice((1, 2)) for s in syms}
    if len(out) == 2 and rng.random() < 0.3:
        out["b"] = 0
    return out


def _perturb(rng, aut: Nbta, grow: bool) -> Nbta:
    """Add (``grow``) or drop transitions and accepting states of a copy."""
    trans = list(aut.transition_triples())
    acc = set(aut.accepting)
    if grow:
        for x in aut.states:
            for sym, k in aut.alphabet.arities.items():
                if rng.random() < 0.3:
                    trans.append((x, sym, tuple(rng.choice(aut.states) for _ in range(k))))
            if rng.random() < 0.3:
                acc.add(x)
    else:
        trans = [t for t in trans if rng.random() > 0.25]
        acc = {x for x in acc if rng.random() > 0.25}
    return Nbta.build(aut.states, aut.alphabet, trans, aut.initial, acc)


def random_nbta_pair(rng: random.Random, max_states: int = 4) -> tuple[Nbta, Nbta]:
    """Independent pairs, and pairs where one side is a perturbed copy of the other."""
    arities = random_arities(rng)
    kind = rng.randrange(3)
    X = random_nbta(rng, max_states, arities)
    if kind == 0:
        return X, random_nbta(rng, max_states, arities)
    if kind == 1:
        return X, _perturb(rng, X, grow=True)
    return _perturb(rng, X, grow=False), X


def random_parity_game(rng: random.Random, max_positions: int = 8, max_priority: int = 4) -> ParityGame:
    n = rng.randint(1, max_positions)
    vs = list(range(n))
    owner = {v: rng.choice((EVEN, ODD)) for v in vs}
    prio = {v: rng.randint(0, max_priority) for v in vs}
    moves = {}
    for v in vs:
        k = rng.choice((0, 1, 1, 2, 2, 3)) if rng.random() < 0.9 else 0
        moves[v] = tuple(sorted(set(rng.choice(vs) for _ in range(k))))
    return ParityGame(tuple(vs), owner, moves, prio)


_PROBS = (Fraction(1), Fraction(1), Fraction(3, 4), Fraction(1, 2))


def _random_row(rng, n_states: int, letters: list, mass: Fraction) -> dict:
    k = rng.randint(1, 3)
    picks = [(rng.choice(letters), rng.randrange(n_states)) for _ in range(k)]
    weights = [rng.randint(1, 3) for _ in picks]
    total = sum(weights)
    row: dict = {}
    for p, w in zip(picks, weights):
        row[p] = row.get(p, Fraction(0)) + mass * Fraction(w, total)
    return row


def random_pbwa(rng: random.Random, max_states: int = 4, letters=("a", "b")) -> Pbwa:
    letters = list(letters)[: rng.randint(1, len(letters))]
    n = rng.randint(1, max_states)
    states = [f"q{i}" for i in range(n)]
    trans = []
    for i, x in enumerate(states):
        for (a, j), p in _random_row(rng, n, letters, rng.choice(_PROBS)).items():
            trans.append((x, a, states[j], p))
    init_state = rng.randrange(n)
    initial = {states[init_state]: Fraction(1)}
    if n > 1 and rng.random() < 0.4:
        other = rng.choice([s for s in states if s != states[init_state]])
        initial = {states[init_state]: Fraction(1, 2), other: Fraction(1, 2)}
    accepting = [x for x in states if rng.random() < 0.5]
    return Pbwa.build(states, letters, trans, initial, accepting)


def split_instance(rng: random.Random, X: Pbwa) -> tuple[Pbwa, MatrixWitness]:
    """A simulating automaton built by splitting each state of ``X`` in two.

    Each split state inherits its original's outgoing mass, distributed over
    the copies of the targets, and may have its acceptance flipped.  The
    witness maps every copy back to its original with weight one.
    """
    ys = [f"{x}.{i}" for x in X.states for i in (0, 1)]
    trans = []
    for ix, x in enumerate(X.states):
        for i in (0, 1):
            for a in X.alphabet:
                for jx, x2 in enumerate(X.states):
                    p = X.matrices[a][ix][jx]
                    if not p:
                        continue
                    share = rng.choice((Fraction(0), Fraction(1, 2), Fraction(1)))
                    if share:
                        trans.append((f"{x}.{i}", a, f"{x2}.0", p * share))
                    if share != 1:
                        trans.append((f"{x}.{i}", a, f"{x2}.1", p * (1 - share)))
    initial = {}
    for ix, x in enumerate(X.states):
        p = X.initial[ix]
        if p:
            share = rng.choice((Fraction(0), Fraction(1, 2), Fraction(1)))
            initial[f"{x}.0"] = p * share
            initial[f"{x}.1"] = p * (1 - share)
    accepting = set()
    for x in X.states:
        for i in (0, 1):
            flip = rng.random() < 0.25
            if (x in X.accepting) != flip:
                accepting.add(f"{x}.{i}")
    Y = Pbwa.build(ys, X.alphabet, trans, initial, accepting)
    A = [[Fraction(int(y.rsplit(".", 1)[0] == x)) for x in X.states] for y in ys]
    return Y, MatrixWitness(A)


def scaled_instance(rng: random.Random, Y: Pbwa) -> tuple[Pbwa, MatrixWitness]:
    """A simulated automaton obtained by scaling down the rows of ``Y``; identity witness."""
    factor = rng.choice((Fraction(1), Fraction(1, 2), Fraction(3, 4)))
    trans = [
        (x, a, x2, Y.matrices[a][i][j] * factor)
        for a in Y.alphabet
        for i, x in enumerate(Y.states)
        for j, x2 in enumerate(Y.states)
        if Y.matrices[a][i][j]
    ]
    initial = {x: p for x, p in zip(Y.states, Y.initial) if p}
    accepting = set(Y.accepting)
    for x in Y.states:
        if rng.random() < 0.3:
            accepting.symmetric_difference_update({x})
    X = Pbwa.build(Y.states, Y.alphabet, trans, initial, accepting)
    n = Y.n
    return X, MatrixWitness([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])


def random_pbwa_instance(rng: random.Random, max_states: int = 4) -> tuple[Pbwa, Pbwa, MatrixWitness]:
    """``(X, Y, A)`` with ``A`` a forward simulation matrix; fairness is up to the search."""
    base = random_pbwa(rng, max_states)
    if rng.random() < 0.5 and base.n <= 2:
        Y, A = split_instance(rng, base)
        return base, Y, A
    X, A = scaled_instance(rng, base)
    return X, base, A


@dataclass
class SuiteSummary:
    seed: int
    count: int
    nbta_instances: int = 0
    agreements: int = 0
    simulations: int = 0
    prefix_checks: int = 0
    lasso_checks: int = 0
    pbwa_attempts: int = 0
    pbwa_accepted: int = 0
    pbwa_inconclusive: int = 0
    cylinder_checks: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list:
        return [
            f"seed {self.seed}, count {self.count}",
            f"nbta pairs: {self.nbta_instances}, game/fixpoint agreement {self.agreements}/{self.nbta_instances}",
            f"fair simulations found: {self.simulations} "
            f"(prefix checks {self.prefix_checks}, lasso checks {self.lasso_checks})",
            f"pbwa witnesses: {self.pbwa_accepted} accepted of {self.pbwa_attempts} tried "
            f"({self.pbwa_inconclusive} inconclusive), cylinder checks {self.cylinder_checks}",
            f"violations: {len(self.violations)}",
            *(f"  {v}" for v in self.violations),
        ]


def random_suite(
    seed: int,
    count: int,
    max_states: int = 4,
    prefix_depth: int = 4,
    lasso_bound: int = 4,
    cylinder_len: int = 6,
    max_attempts: int | None = None,
) -> SuiteSummary:
    """Run ``count`` NBTA pairs and collect ``count`` accepted PBWA witnesses."""
    rng = random.Random(seed)
    out = SuiteSummary(seed, count)
    for i in range(count):
        X, Y = random_nbta_pair(rng, max_states)
        out.nbta_instances += 1
        fix = largest_fair_simulation(X, Y) is not None
        game = even_wins_simulation(X, Y)
        if fix == game:
            out.agreements += 1
        else:
            out.violations.append(f"nbta #{i}: fixpoint says {fix}, game says {game}")
        if not fix:
            continue
        out.simulations += 1
        t = tree_prefix_inclusion(X, Y, prefix_depth)
        out.prefix_checks += 1
        if t is not None:
            out.violations.append(f"nbta #{i}: simulation found but prefix {t} separates")
        if X.is_unary():
            w = nbw_inclusion_bounded(X, Y, lasso_bound, lasso_bound)
            out.lasso_checks += 1
            if w is not None:
                out.violations.append(f"nbta #{i}: simulation found but lasso {w} separates")
    cap = max_attempts if max_attempts is not None else 20 * count
    while out.pbwa_accepted < count and out.pbwa_attempts < cap:
        X, Y, A = random_pbwa_instance(rng, max_states)
        out.pbwa_attempts += 1
        seqs = search_sequences(X, Y, A)
        if seqs is None:
            out.pbwa_inconclusive += 1
            continue
        if not verify_matrix_fair_sim(X, Y, A, seqs):
            out.violations.append(f"pbwa #{out.pbwa_attempts}: searched sequences rejected")
            continue
        out.pbwa_accepted += 1
        w = cylinder_inclusion(X, Y, cylinder_len)
        out.cylinder_checks += 1
        if w is not None:
            out.violations.append(f"pbwa #{out.pbwa_attempts}: witness accepted but cylinder {''.join(w)!r} separates")
    if out.pbwa_accepted < count:
        out.violations.append(f"only {out.pbwa_accepted} of {count} pbwa witnesses accepted in {cap} attempts")
    return out
