import random
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsim.fixtures import (
    alternating_pair,
    alternating_sequences,
    alternating_witness,
    binary_b_infinitely,
    five_state_pbwa,
    ring_pair,
    split_pair,
    split_witness,
)
from fairsim.formats import (
    FormatError,
    load_mat,
    load_relation,
    parse_automaton,
    parse_mat_text,
    parse_nbta,
    parse_pbwa,
    parse_relation,
    print_mat,
    print_nbta,
    print_pbwa,
    print_relation,
    resolve_mat,
)
from fairsim.matrixsim import verify_matrix_fair_sim
from fairsim.nbta import largest_fair_simulation
from fairsim.suite import random_nbta, random_pbwa, random_pbwa_instance

DATA = Path(__file__).parent / "data"


def test_b_infinitely_file():
    X = parse_automaton(DATA / "b_infinitely.nbta", "nbta")
    assert X.states == ("x1", "x2") and X.accepting == {"x2"} and X.initial == {"x1"}
    assert X.alphabet.arities == {"a": 2, "b": 2}
    assert X == binary_b_infinitely()


def test_five_state_file():
    P = parse_automaton(DATA / "five_state.pbwa", "pbwa")
    assert P == five_state_pbwa()
    assert P.initial == (1, 0, 0, 0, 0)


def test_relation_file():
    X, Y = ring_pair()
    R = load_relation(DATA / "ring3_full.rel", X, Y)
    assert R == largest_fair_simulation(X, Y)


def test_alternating_mat_files():
    X, Y = alternating_pair()
    A, seqs = load_mat(DATA / "alternating.mat", X, Y)
    assert A == alternating_witness() and seqs is None
    A, seqs = load_mat(DATA / "alternating_seq.mat", X, Y)
    assert seqs.omega and seqs.ratio == F(1, 2) and seqs.final == (((F(1, 2),),), ((F(1, 2),),))
    assert seqs.seq11 == alternating_sequences().seq11
    assert verify_matrix_fair_sim(X, Y, A, seqs)


def test_split_mat_file():
    X = parse_automaton(DATA / "split_x.pbwa", "pbwa")
    Y = parse_automaton(DATA / "split_y.pbwa", "pbwa")
    assert (X, Y) == split_pair()
    A, _ = load_mat(DATA / "split.mat", X, Y)
    assert A == split_witness()


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("nbta\nalphabet a:2\nstates x\ntrans x a x x x\n", 4, 9),
        ("nbta\nalphabet a\nstates x\n", 2, 10),
        ("nbta\nalphabet a:1\nstates x\ninitial z\n", 4, 9),
        ("nbta\nalphabet a:1\nstates x\nfoo x\n", 4, 1),
        ("nbta\nalphabet a:1\nstates x\nstates y\n", 4, 1),
        ("nbtx\n", 1, 1),
        ("pbwa\nalphabet a\nstates x\ninitial x 1/0\n", 4, 11),
        ("pbwa\nalphabet a\nstates x\ntrans x c x 1\n", 4, 9),
        ("pbwa\nalphabet a\nstates x\ntrans x a x\n", 4, 1),
    ],
)
def test_errors_carry_position(text, line, col):
    with pytest.raises(FormatError) as e:
        (parse_nbta if text.startswith("nbt") else parse_pbwa)(text, "f.txt")
    assert (e.value.line, e.value.col) == (line, col)
    assert str(e.value).startswith(f"f.txt:{line}:{col}: ")


def test_too_many_children_is_semantic_error():
    with pytest.raises(FormatError, match="arity 2 but 3 children"):
        parse_nbta("nbta\nalphabet a:2\nstates x\ntrans x a x x x\n")


def test_missing_sections_and_bad_mass():
    with pytest.raises(FormatError, match="missing 'states'"):
        parse_nbta("nbta\nalphabet a:1\n")
    with pytest.raises(FormatError, match="not in"):
        parse_pbwa("pbwa\nalphabet a\nstates x\ninitial x 1\ntrans x a x 3/2\n")
    with pytest.raises(FormatError, match="row mass"):
        parse_pbwa("pbwa\nalphabet a b\nstates x\ninitial x 1\ntrans x a x 2/3\ntrans x b x 2/3\n")


def test_comments_and_decimals():
    P = parse_pbwa("pbwa  # header\nalphabet a\nstates x\ninitial x 1.0\ntrans x a x 0.5 # leak\n")
    assert P.matrices["a"] == ((F(1, 2),),)


def test_relation_errors():
    X, Y = ring_pair()
    with pytest.raises(FormatError, match="unknown right state"):
        parse_relation("pair x1 zz\n", "r", X, Y)
    with pytest.raises(FormatError):
        parse_relation("pair x1\n")


def test_mat_errors():
    X, Y = alternating_pair()
    with pytest.raises(FormatError, match="outside the block"):
        resolve_mat(parse_mat_text("row y1 x1=1/2\nseq11 0\nrow y1 x2=1/2\nseq12 0\nrow y1\n"), X, Y)
    with pytest.raises(FormatError, match="ratio"):
        resolve_mat(parse_mat_text("row y1 x1=1/2\nseq11 0\nrow y1\nseq12 0\nrow y1\nlimit\nrow y1\n"), X, Y)
    with pytest.raises(FormatError, match="numbered"):
        resolve_mat(parse_mat_text("row y1\nseq11 1\nrow y1\nseq12 1\nrow y1\n"), X, Y)
    with pytest.raises(FormatError) as e:
        parse_mat_text("row y1 x1\n")
    assert (e.value.line, e.value.col) == (1, 8)
    with pytest.raises(FormatError):
        parse_mat_text("row y1 x1=1/2\nrow y1 x2=1/2\n")


def test_missing_file():
    with pytest.raises(FormatError, match="cannot read"):
        parse_automaton(DATA / "nope.pbwa", "pbwa")


def test_fixture_round_trips():
    for aut in [binary_b_infinitely(), *ring_pair()]:
        assert parse_nbta(print_nbta(aut)) == aut
    for aut in [five_state_pbwa(), *alternating_pair(), *split_pair()]:
        assert parse_pbwa(print_pbwa(aut)) == aut
    X, Y = alternating_pair()
    text = print_mat(X, Y, alternating_witness(), alternating_sequences())
    assert resolve_mat(parse_mat_text(text), X, Y) == (alternating_witness(), alternating_sequences())


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_random_round_trips(seed):
    rng = random.Random(seed)
    N = random_nbta(rng, 4)
    assert parse_nbta(print_nbta(N)) == N
    P = random_pbwa(rng, 4)
    assert parse_pbwa(print_pbwa(P)) == P
    R = frozenset((x, y) for x in N.states for y in N.states if rng.random() < 0.5)
    assert parse_relation(print_relation(R)) == R
    X, Y, A = random_pbwa_instance(rng, 3)
    assert resolve_mat(parse_mat_text(print_mat(X, Y, A)), X, Y) == (A, None)
