import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsim.fixtures import binary_b_infinitely, ring_pair, ring_simulator
from fairsim.game import even_wins_simulation
from fairsim.lattice import solve
from fairsim.nbta import (
    ARITY_ENV,
    AutomatonError,
    Nbta,
    RankedAlphabet,
    block_universe,
    box_op,
    check_fair_simulation,
    diamond_op,
    fair_sim_system,
    largest_fair_simulation,
    post_image,
    solution_relation,
    tuple_space,
    wedge_op,
)
from fairsim.suite import random_nbta, random_nbta_pair


def full(X, Y):
    return frozenset(itertools.product(X.states, Y.states))


def test_ranked_alphabet_validation():
    with pytest.raises(AutomatonError):
        RankedAlphabet({})
    with pytest.raises(AutomatonError):
        RankedAlphabet({"a": -1})


def test_wrong_child_count_rejected():
    with pytest.raises(AutomatonError, match="arity"):
        Nbta.build(["x"], {"a": 2}, [("x", "a", ("x",))], ["x"], [])


def test_unknown_child_rejected():
    with pytest.raises(AutomatonError):
        Nbta.build(["x"], {"a": 1}, [("x", "a", ("z",))], ["x"], [])


def test_arity_cap_from_environment(monkeypatch):
    monkeypatch.setenv(ARITY_ENV, "1")
    with pytest.raises(AutomatonError, match="cap"):
        Nbta.build(["x"], {"a": 2}, [], ["x"], [])
    monkeypatch.setenv(ARITY_ENV, "nope")
    with pytest.raises(AutomatonError):
        Nbta.build(["x"], {"a": 1}, [], ["x"], [])


def test_box_vacuous_for_stuck_state():
    X = Nbta.build(["x"], {"a": 1}, [], ["x"], [])
    assert box_op(X, 1, frozenset(), ["y1", "y2"]) == {("x", "y1"), ("x", "y2")}


def test_box_full_and_empty():
    X, Y = ring_pair()
    S = frozenset(itertools.product(tuple_space(X), Y.states))
    for i in (1, 2):
        assert box_op(X, i, S, Y.states) == frozenset(itertools.product(X.block(i), Y.states))
        assert box_op(X, i, frozenset(), Y.states) == frozenset()


def test_diamond_vacuous_and_full():
    X, Y = ring_pair()
    stuck = Nbta.build(["y"], X.alphabet, [], ["y"], [])
    T = frozenset(itertools.product(tuple_space(X), tuple_space(stuck)))
    assert diamond_op(stuck, 1, T) == frozenset()
    T = frozenset(itertools.product(tuple_space(X), Y.transitions()))
    for j in (1, 2):
        expect = frozenset(itertools.product(tuple_space(X), Y.block(j)))
        assert diamond_op(Y, j, T) == expect


def _diamond_ref(Y, j, T):
    return frozenset(
        (a, y)
        for a in {a for a, _ in T}
        for y in Y.block(j)
        if any((a, b) in T for b in Y.delta[y])
    )


def _wedge_ref(U, xt, yt):
    out = set()
    for (s, xs), (t, ys) in itertools.product(xt, yt):
        if s == t and all((xs[k], ys[k]) in U for k in range(len(xs))):
            out.add(((s, xs), (t, ys)))
    return frozenset(out)


def test_diamond_singleton_matches_enumeration():
    X, Y = ring_pair()
    a = ("a", ("x1", "x1"))
    for b in sorted(Y.transitions()):
        T = frozenset({(a, b)})
        assert diamond_op(Y, 1, T) == _diamond_ref(Y, 1, T)
        assert diamond_op(Y, 2, T) == _diamond_ref(Y, 2, T)
    T = frozenset({(a, ("a", ("y0", "y1")))})
    assert diamond_op(Y, 2, T) == {(a, "y0")}
    assert diamond_op(Y, 1, T) == frozenset()


def test_wedge_full_and_empty():
    X, Y = ring_pair()
    xt, yt = X.transitions(), Y.transitions()
    got = wedge_op(full(X, Y), xt, yt)
    assert got == frozenset((a, b) for a in xt for b in yt if a[0] == b[0])
    Z = Nbta.build(["z"], {"a": 1, "c": 0}, [("z", "a", ("z",)), ("z", "c", ())], ["z"], [])
    assert wedge_op(frozenset(), Z.transitions(), Z.transitions()) == {(("c", ()), ("c", ()))}


def test_wedge_singleton_matches_enumeration():
    X, Y = ring_pair()
    U = frozenset({("x1", "y0")})
    got = wedge_op(U, tuple_space(X), tuple_space(Y))
    assert got == _wedge_ref(U, tuple_space(X), tuple_space(Y))
    assert got == {(("a", ("x1", "x1")), ("a", ("y0", "y0"))), (("b", ("x1", "x1")), ("b", ("y0", "y0")))}


def test_ring_solution_is_all_blocks():
    X, Y = ring_pair()
    sol = solve(fair_sim_system(X, Y))
    blocks = [(1, 1), (2, 1), (1, 2), (2, 2)]
    assert tuple(sol) == tuple(block_universe(X, Y, i, j) for i, j in blocks)


def test_ring_full_relation_is_fair_simulation():
    X, Y = ring_pair()
    assert check_fair_simulation(X, Y, full(X, Y))
    assert largest_fair_simulation(X, Y) == full(X, Y)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_ring_sizes(n):
    X, Y = ring_pair(n)
    assert largest_fair_simulation(X, Y) == full(X, Y)
    assert even_wins_simulation(X, Y)


def test_no_transitions_gives_full_solution():
    X = Nbta.build(["p", "q"], {"a": 2}, [], ["p"], ["q"])
    Y = ring_simulator(2)
    Y = Nbta.build(Y.states, {"a": 2}, [t for t in Y.transition_triples() if t[1] == "a"], Y.initial, Y.accepting)
    assert solution_relation(X, Y) == full(X, Y)


def test_empty_relation_fails_initial_condition():
    X, Y = ring_pair()
    res = check_fair_simulation(X, Y, frozenset())
    assert not res and res.condition == "initial" and res.witness == ("x1",)


def test_relation_outside_solution_is_reported():
    X = binary_b_infinitely()
    Y = Nbta.build(["y"], X.alphabet, [("y", "a", ("y", "y"))], ["y"], [])
    res = check_fair_simulation(X, Y, {("x1", "y")})
    assert not res and res.condition == "below-solution"


def test_swapped_roles_agree_with_game():
    X, Y = ring_pair()
    fix = largest_fair_simulation(Y, X) is not None
    assert fix == even_wins_simulation(Y, X)
    # the ring accepts trees whose left spine is all a, the b-automaton does not
    assert not fix


def test_self_simulation_contains_diagonal():
    for aut in [binary_b_infinitely(), ring_simulator(3)]:
        R = largest_fair_simulation(aut, aut)
        diag = {(x, x) for x in aut.states}
        assert R is not None and diag <= R
        assert check_fair_simulation(aut, aut, diag)


def test_stuck_initial_simulator_gives_none():
    X = binary_b_infinitely()
    Y = Nbta.build(["y"], X.alphabet, [], ["y"], ["y"])
    assert largest_fair_simulation(X, Y) is None


def test_alphabet_mismatch():
    X = binary_b_infinitely()
    Y = Nbta.build(["y"], {"a": 2}, [], ["y"], [])
    with pytest.raises(AutomatonError, match="alphabet"):
        fair_sim_system(X, Y)


seeds = st.integers(0, 10**6)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_box_adjunction(seed):
    rng = random.Random(seed)
    X, Y = random_nbta_pair(rng, 3)
    pairs = sorted(itertools.product(tuple_space(X), Y.states), key=repr)
    S = frozenset(p for p in pairs if rng.random() < 0.6)
    for i in (1, 2):
        B = box_op(X, i, S, Y.states)
        assert post_image(X, B) <= S
        # largest: every block pair whose post-image lies in S is in B
        for x, y in itertools.product(X.block(i), Y.states):
            if post_image(X, {(x, y)}) <= S:
                assert (x, y) in B


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_operators_monotone(seed):
    rng = random.Random(seed)
    X, Y = random_nbta_pair(rng, 3)
    xy = sorted(full(X, Y), key=repr)
    U1 = frozenset(p for p in xy if rng.random() < 0.5)
    U2 = U1 | frozenset(p for p in xy if rng.random() < 0.5)
    xt, yt = tuple_space(X), tuple_space(Y)
    W1, W2 = wedge_op(U1, xt, yt), wedge_op(U2, xt, yt)
    assert W1 <= W2
    assert W1 == _wedge_ref(U1, xt, yt)
    for j in (1, 2):
        D1, D2 = diamond_op(Y, j, W1), diamond_op(Y, j, W2)
        assert D1 <= D2
        assert D1 == {p for p in _diamond_ref(Y, j, W1)}
        for i in (1, 2):
            assert box_op(X, i, D1, Y.states) <= box_op(X, i, D2, Y.states)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_solution_is_fixed_point(seed):
    X, Y = random_nbta_pair(random.Random(seed), 3)
    system = fair_sim_system(X, Y)
    sol = solve(system)
    assert system.is_solution_fixed_point(tuple(sol))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_downward_closure(seed):
    rng = random.Random(seed)
    X, Y = random_nbta_pair(rng, 3)
    R = largest_fair_simulation(X, Y)
    if R is None:
        return
    # keep one initial witness per initial state, drop the rest at random
    keep = {next((x, y) for y in sorted(Y.initial) if (x, y) in R) for x in X.initial}
    sub = keep | {p for p in R if rng.random() < 0.5}
    assert check_fair_simulation(X, Y, sub)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_largest_contains_every_fair_simulation(seed):
    rng = random.Random(seed)
    X = random_nbta(rng, 2, {"a": 1, "b": 1})
    Y = random_nbta(rng, 2, {"a": 1, "b": 1})
    R = largest_fair_simulation(X, Y)
    pairs = sorted(full(X, Y))
    for mask in range(1 << len(pairs)):
        cand = {p for k, p in enumerate(pairs) if mask >> k & 1}
        if check_fair_simulation(X, Y, cand):
            assert R is not None and cand <= R
