"""Hand-encoded reference automata used by tests, the CLI and the README."""

from __future__ import annotations

from fractions import Fraction

from .matrixsim import ApproxSequences, MatrixWitness
from .nbta import Nbta
from .pbwa import Pbwa

HALF = Fraction(1, 2)


def binary_b_infinitely() -> Nbta:
    """Binary trees over ``{a, b}`` with infinitely many ``b`` on every branch."""
    return Nbta.build(
        ["x1", "x2"],
        {"a": 2, "b": 2},
        [
            ("x1", "a", ("x1", "x1")),
            ("x1", "b", ("x2", "x2")),
            ("x2", "a", ("x1", "x1")),
            ("x2", "b", ("x2", "x2")),
        ],
        initial=["x1"],
        accepting=["x2"],
    )


def binary_without_b() -> Nbta:
    """The automaton above with every ``b`` transition removed."""
    X = binary_b_infinitely()
    return Nbta.build(
        X.states,
        X.alphabet,
        [t for t in X.transition_triples() if t[1] != "b"],
        X.initial,
        X.accepting,
    )


def ring_simulator(n: int = 3) -> Nbta:
    """A ring of ``n`` states; ``a`` keeps the left child in place and moves the
    right one along, ``b`` moves both.  Only ``y0`` accepts."""
    if n < 1:
        raise ValueError("ring needs at least one state")
    ys = [f"y{i}" for i in range(n)]
    trans = []
    for i in range(n):
        nxt = ys[(i + 1) % n]
        trans.append((ys[i], "a", (ys[i], nxt)))
        trans.append((ys[i], "b", (nxt, nxt)))
    return Nbta.build(ys, {"a": 2, "b": 2}, trans, initial=["y0"], accepting=["y0"])


def ring_pair(n: int = 3) -> tuple[Nbta, Nbta]:
    return binary_b_infinitely(), ring_simulator(n)


def unary_inf_b() -> Nbta:
    """Words over ``{a, b}`` with infinitely many ``b``."""
    return Nbta.build(
        ["p", "q"],
        {"a": 1, "b": 1},
        [
            ("p", "a", ("p",)),
            ("p", "b", ("q",)),
            ("q", "a", ("p",)),
            ("q", "b", ("q",)),
        ],
        initial=["p"],
        accepting=["q"],
    )


def unary_all_words() -> Nbta:
    return Nbta.build(
        ["u"],
        {"a": 1, "b": 1},
        [("u", "a", ("u",)), ("u", "b", ("u",))],
        initial=["u"],
        accepting=["u"],
    )


def five_state_pbwa() -> Pbwa:
    """Two letters; ``b`` leaks from ``x1`` into an accepting pair ``x4/x5``."""
    third, sixth = Fraction(1, 3), Fraction(1, 6)
    return Pbwa.build(
        ["x1", "x2", "x3", "x4", "x5"],
        ["a", "b"],
        [
            ("x1", "a", "x1", HALF),
            ("x1", "a", "x2", third),
            ("x2", "a", "x2", HALF),
            ("x2", "a", "x3", third),
            ("x3", "a", "x2", HALF),
            ("x3", "a", "x3", HALF),
            ("x4", "a", "x4", HALF),
            ("x4", "a", "x5", HALF),
            ("x5", "a", "x4", HALF),
            ("x5", "a", "x5", HALF),
            ("x1", "b", "x4", sixth),
        ],
        {"x1": 1},
        ["x3", "x5"],
    )


def alternating_pair() -> tuple[Pbwa, Pbwa]:
    """``X`` alternates between its two states; ``Y`` moves to an accepting
    sink with probability 1/2 per step."""
    X = Pbwa.build(
        ["x1", "x2"],
        ["a"],
        [("x1", "a", "x2", 1), ("x2", "a", "x1", 1)],
        {"x1": HALF, "x2": HALF},
        ["x2"],
    )
    Y = Pbwa.build(
        ["y1", "y2"],
        ["a"],
        [("y1", "a", "y1", HALF), ("y1", "a", "y2", HALF), ("y2", "a", "y2", 1)],
        {"y1": 1},
        ["y2"],
    )
    return X, Y


def alternating_witness() -> MatrixWitness:
    return MatrixWitness([[HALF, HALF], [HALF, HALF]])


def alternating_sequences(prefix: int = 4) -> ApproxSequences:
    """Both blocks run through ``1/2 - (1/2)**(i+1)``, a geometric sequence of ratio 1/2."""
    seq = tuple(((HALF - HALF ** (i + 1),),) for i in range(prefix))
    lim = ((HALF,),)
    return ApproxSequences(seq, seq, omega=True, limit11=lim, limit12=lim, ratio=HALF)


def split_pair() -> tuple[Pbwa, Pbwa]:
    """``X`` splits its initial mass over two chains, one of which turns
    accepting after one step; ``Y`` reaches its accepting loop in one step."""
    X = Pbwa.build(
        ["x1", "x21", "x22", "x23"],
        ["a"],
        [
            ("x1", "a", "x21", 1),
            ("x21", "a", "x21", 1),
            ("x22", "a", "x23", 1),
            ("x23", "a", "x23", 1),
        ],
        {"x1": HALF, "x22": HALF},
        ["x21", "x22", "x23"],
    )
    Y = Pbwa.build(
        ["y1", "y2"],
        ["a"],
        [("y1", "a", "y2", 1), ("y2", "a", "y2", 1)],
        {"y1": 1},
        ["y2"],
    )
    return X, Y


def split_witness() -> MatrixWitness:
    X, Y = split_pair()
    return MatrixWitness.from_entries(
        X, Y, {"y1": {"x1": HALF, "x22": HALF}, "y2": {"x21": HALF, "x23": HALF}}
    )
