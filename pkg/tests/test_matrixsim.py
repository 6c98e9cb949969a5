import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsim.fixtures import (
    alternating_pair,
    alternating_sequences,
    alternating_witness,
    five_state_pbwa,
    split_pair,
    split_witness,
)
from fairsim.matrixsim import (
    ApproxSequences,
    MatrixWitness,
    SearchTrace,
    WitnessError,
    _Setup,
    accepting_closure,
    check_forward,
    search_sequences,
    verify_matrix_fair_sim,
)
from fairsim.oracle import cylinder_inclusion
from fairsim.pbwa import Pbwa, accepting_bscc_union, acceptance_vector, cylinder_prob, words
from fairsim.suite import random_pbwa, random_pbwa_instance

H = F(1, 2)


def loop_pair():
    """An accepting loop simulated step by step by a non-accepting loop."""
    X = Pbwa.build(["x"], ["a"], [("x", "a", "x", 1)], {"x": 1}, ["x"])
    Y = Pbwa.build(["y"], ["a"], [("y", "a", "y", 1)], {"y": 1}, [])
    return X, Y, MatrixWitness([[1]])


def test_alternating_closed_form_sequences_accepted():
    X, Y = alternating_pair()
    assert verify_matrix_fair_sim(X, Y, alternating_witness(), alternating_sequences())


@pytest.mark.parametrize("prefix", [1, 2, 5])
def test_alternating_any_prefix_length(prefix):
    X, Y = alternating_pair()
    assert verify_matrix_fair_sim(X, Y, alternating_witness(), alternating_sequences(prefix))


def test_zero_witness_fails_initial_condition():
    X, Y = alternating_pair()
    v = verify_matrix_fair_sim(X, Y, [[0, 0], [0, 0]], alternating_sequences())
    assert not v and v.condition == "2" and v.entry == ("x1",)


def test_non_substochastic_row():
    X, Y = alternating_pair()
    v = check_forward(X, Y, [[H, H], [1, H]])
    assert not v and v.condition == "1" and v.entry == ("y2",)


def test_forward_step_violation_names_letter_and_entry():
    X, Y = alternating_pair()
    # y2 cannot cover x1's move into x2 if it only relates to x2
    v = check_forward(X, Y, [[H, H], [0, H]])
    assert not v and v.condition == "2" and v.letter == "a"


def test_search_alternating():
    X, Y = alternating_pair()
    trace = SearchTrace()
    s = search_sequences(X, Y, alternating_witness(), trace=trace)
    assert s is not None and s.omega and trace.outcome == "omega"
    assert s.final == (((H,),), ((H,),))
    assert [s.element(n)[1][0][0] for n in range(3)] == [0, F(3, 8), F(15, 32)]
    assert verify_matrix_fair_sim(X, Y, alternating_witness(), s)


def test_search_split_pair_is_finite():
    X, Y = split_pair()
    A = split_witness()
    s = search_sequences(X, Y, A)
    assert s is not None and not s.omega and s.bound == 1
    assert verify_matrix_fair_sim(X, Y, A, s)
    assert cylinder_inclusion(X, Y, 6) is None


def test_no_accepting_lhs_states():
    X = Pbwa.build(["x"], ["a"], [("x", "a", "x", 1)], {"x": 1}, [])
    Y = Pbwa.build(["y"], ["a"], [("y", "a", "y", 1)], {"y": 1}, [])
    s = search_sequences(X, Y, [[1]])
    assert s is not None and s.seq12 == (((),),) * len(s.seq12)
    assert all(m == ((1,),) for m in s.seq11)


def test_search_gives_up_on_unfair_loop():
    X, Y, A = loop_pair()
    assert check_forward(X, Y, A)
    trace = SearchTrace()
    assert search_sequences(X, Y, A, trace=trace) is None
    assert trace.outcome.startswith("stalled")
    # the witness would be unsound: the cylinder of the empty word separates
    assert cylinder_inclusion(X, Y, 0) == ()


def test_unfair_loop_rejects_any_presentation():
    X, Y, A = loop_pair()
    one, zero = ((F(1),),), ((F(0),),)
    for r in (F(0), H, F(9, 10)):
        seqs = ApproxSequences((((),),), (zero,), True, ((),), one, r)
        v = verify_matrix_fair_sim(X, Y, A, seqs)
        assert not v and v.condition == "3e"


def test_search_needs_a_route_to_acceptance():
    # y1 reaches the accepting y2 almost surely, so the loop is matched fairly
    X = Pbwa.build(["x"], ["a"], [("x", "a", "x", 1)], {"x": 1}, ["x"])
    Y = Pbwa.build(
        ["y1", "y2"], ["a"], [("y1", "a", "y1", H), ("y1", "a", "y2", H), ("y2", "a", "y2", 1)], {"y1": 1}, ["y2"]
    )
    A = MatrixWitness([[1], [1]])
    assert check_forward(X, Y, A)
    assert search_sequences(X, Y, A) is not None
    # cut the route: the same forward witness no longer certifies anything
    Yd = Pbwa.build(["y1", "y2"], ["a"], [("y1", "a", "y1", 1), ("y2", "a", "y2", 1)], {"y1": 1}, ["y2"])
    assert check_forward(X, Yd, A)
    assert search_sequences(X, Yd, A) is None
    assert cylinder_inclusion(X, Yd, 0) == ()


def test_condition_diagnostics():
    X, Y = alternating_pair()
    A = alternating_witness()
    good = alternating_sequences()
    z = ((F(0),),)
    q = ((F(1, 4),),)
    wrong_final = ApproxSequences(good.seq11, good.seq12, True, q, good.limit12, H)
    assert verify_matrix_fair_sim(X, Y, A, wrong_final).condition == "3b"
    base = ApproxSequences((z, q), (q, q), True, good.limit11, good.limit12, H)
    assert verify_matrix_fair_sim(X, Y, A, base).condition == "3d"
    dec = ApproxSequences((q, z), (z, z), True, good.limit11, good.limit12, H)
    assert verify_matrix_fair_sim(X, Y, A, dec).condition == "3-increasing"
    bad_ratio = ApproxSequences(good.seq11, good.seq12, True, good.limit11, good.limit12, F(1))
    assert verify_matrix_fair_sim(X, Y, A, bad_ratio).condition == "3f"
    jump = ApproxSequences((z, good.limit11), (z, good.limit12))
    assert verify_matrix_fair_sim(X, Y, A, jump).condition == "3e"
    # A11 too large at the base for its own invariant
    big = ApproxSequences((good.limit11, good.limit11), (z, z), True, good.limit11, good.limit12, H)
    assert verify_matrix_fair_sim(X, Y, A, big).condition in ("3c", "3e")


def test_shape_errors():
    X, Y = alternating_pair()
    with pytest.raises(WitnessError):
        verify_matrix_fair_sim(X, Y, [[H, H]], alternating_sequences())
    with pytest.raises(WitnessError):
        verify_matrix_fair_sim(X, Y, alternating_witness(), ApproxSequences(((( H, H),),), (((H,),),)))
    Z = Pbwa.build(["z"], ["b"], [], {"z": 1}, [])
    with pytest.raises(WitnessError, match="alphabet"):
        verify_matrix_fair_sim(X, Z, [[H, H]], alternating_sequences())


def _tail_ok(X, Y, A, s, upto=25):
    """Check the invariant and step conditions on explicit tail elements."""
    st_ = _Setup.make(X, Y, A)
    for n in range(upto):
        a11, a12 = s.element(n)
        _, b12 = s.element(n + 1)
        if not st_.check_c(a11, a12, str(n)) or not st_.check_e(b12, a11, a12, str(n)):
            return False
    return True


def test_alternating_tail_explicitly():
    X, Y = alternating_pair()
    A = alternating_witness()
    assert _tail_ok(X, Y, A, alternating_sequences())
    assert _tail_ok(X, Y, A, search_sequences(X, Y, A))


instances = st.integers(0, 10**6).map(lambda s: random_pbwa_instance(random.Random(s), 4))


@settings(max_examples=60, deadline=None)
@given(instances)
def test_search_is_sound(inst):
    X, Y, A = inst
    trace = SearchTrace()
    s = search_sequences(X, Y, A, trace=trace)
    for a, b in zip(trace.a12, trace.a12[1:]):
        assert all(p <= q for ra, rb in zip(a, b) for p, q in zip(ra, rb))
    if s is None:
        return
    assert verify_matrix_fair_sim(X, Y, A, s)
    assert check_forward(X, Y, A)
    if s.omega:
        assert _tail_ok(X, Y, A, s, upto=8)
    assert cylinder_inclusion(X, Y, 4) is None


def test_closure_promotes_predecessors():
    _, Y = alternating_pair()
    assert accepting_closure(Y).accepting == {"y1", "y2"}
    P = five_state_pbwa()
    assert accepting_closure(P).accepting == {"x1", "x2", "x3", "x4", "x5"}


def test_closure_without_paths_is_identity():
    P = Pbwa.build(["p", "q"], ["a"], [("p", "a", "p", 1), ("q", "a", "q", 1)], {"p": 1}, ["q"])
    assert accepting_closure(P) == P


def _closure_invariants(P, maxlen):
    C = accepting_closure(P)
    assert accepting_closure(C) == C
    assert C.states == P.states and C.matrices == P.matrices and C.initial == P.initial
    assert P.accepting <= C.accepting
    for w in words(P.alphabet, maxlen):
        assert cylinder_prob(P, w) == cylinder_prob(C, w)
    # acceptance is decided by the same bottom components
    assert accepting_bscc_union(P) == accepting_bscc_union(C)
    assert acceptance_vector(P) == acceptance_vector(C)


def test_closure_preserves_fixture_cylinders():
    for P in [five_state_pbwa(), *alternating_pair(), *split_pair()]:
        _closure_invariants(P, 6)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_closure_preserves_random_cylinders(seed):
    _closure_invariants(random_pbwa(random.Random(seed), 4), 4)
