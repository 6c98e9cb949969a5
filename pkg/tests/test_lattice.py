import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsim.lattice import (
    MU,
    NU,
    TWO,
    ChainLattice,
    Equation,
    EquationalSystem,
    MonotonicityError,
    PowersetLattice,
    check_monotone,
    kleene_fixpoint,
    solve,
)

P12 = PowersetLattice({1, 2})


def test_lfp_adds_element():
    assert kleene_fixpoint(P12, lambda S: S | {1}, MU) == frozenset({1})


def test_gfp_intersects():
    assert kleene_fixpoint(P12, lambda S: S & {1}, NU) == frozenset({1})


def test_lfp_identity_is_bottom():
    assert kleene_fixpoint(P12, lambda S: S, MU) == frozenset()


def test_gfp_identity_is_top():
    assert kleene_fixpoint(P12, lambda S: S, NU) == frozenset({1, 2})


def test_non_monotone_map_is_detected():
    # complement oscillates between bottom and top
    with pytest.raises(MonotonicityError):
        kleene_fixpoint(P12, lambda S: P12.top - S, MU)


def test_bad_mode():
    with pytest.raises(ValueError):
        kleene_fixpoint(P12, lambda S: S, "max")


def _pair(first_sign, second_sign):
    # two variables, each equal to the other
    return EquationalSystem(
        [
            Equation(first_sign, TWO, lambda v: v[1]),
            Equation(second_sign, TWO, lambda v: v[0]),
        ]
    )


def test_mu_then_nu_gives_top():
    sol = solve(_pair(MU, NU))
    assert tuple(sol) == (1, 1)


def test_nu_then_mu_gives_bottom():
    sol = solve(_pair(NU, MU))
    assert tuple(sol) == (0, 0)


def test_single_nu_identity():
    assert tuple(solve(EquationalSystem([Equation(NU, TWO, lambda v: v[0])]))) == (1,)


def test_empty_system_rejected():
    with pytest.raises(ValueError):
        EquationalSystem([])


def test_bad_sign_rejected():
    with pytest.raises(ValueError):
        Equation("lfp", TWO, lambda v: v[0])


def test_non_monotone_equation_propagates():
    sys_ = EquationalSystem([Equation(MU, TWO, lambda v: 1 - v[0])])
    with pytest.raises(MonotonicityError):
        solve(sys_)


def _brute_solution(system):
    """Reference solver: exhaustive nested fixed points by unfolding the definition.

    For variable ``i`` with later values fixed, the earlier variables'
    interim values are computed recursively; fixed points are picked by
    scanning every lattice element instead of iterating.
    """
    eqs = system.equations

    def interim(i, later):
        if i < 0:
            return ()
        eq = eqs[i]
        fixed = []
        for x in eq.lattice.elements():
            earlier = interim(i - 1, (x,) + later)
            if eq.lattice.eq(eq.rhs(earlier + (x,) + later), x):
                fixed.append(x)
        pick = min if eq.sign == MU else max
        # on a chain lattice the extreme fixed point is the min / max element
        xi = pick(fixed)
        return interim(i - 1, (xi,) + later) + (xi,)

    return interim(len(eqs) - 1, ())


_monotone_fns = st.sampled_from(
    [
        lambda a, b, c: a,
        lambda a, b, c: b,
        lambda a, b, c: c,
        lambda a, b, c: max(a, b),
        lambda a, b, c: min(b, c),
        lambda a, b, c: min(a, max(b, c)),
        lambda a, b, c: 1,
        lambda a, b, c: 0,
        lambda a, b, c: max(min(a, b), c),
    ]
)


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.sampled_from([MU, NU]), min_size=3, max_size=3),
    st.lists(_monotone_fns, min_size=3, max_size=3),
)
def test_solve_matches_exhaustive_reference(signs, fns):
    L = ChainLattice(1)
    system = EquationalSystem(
        [Equation(s, L, (lambda f: lambda v: f(*v))(f)) for s, f in zip(signs, fns)]
    )
    sol = solve(system)
    assert tuple(sol) == _brute_solution(system)
    assert system.is_solution_fixed_point(tuple(sol))


@settings(max_examples=100, deadline=None)
@given(st.frozensets(st.integers(0, 3)), st.frozensets(st.integers(0, 3)))
def test_lfp_below_gfp(a, b):
    L = PowersetLattice(range(4))

    def f(S):
        return (S & a) | b

    assert L.leq(kleene_fixpoint(L, f, MU), kleene_fixpoint(L, f, NU))
    assert kleene_fixpoint(L, f, MU) == b
    assert kleene_fixpoint(L, f, NU) == a | b


def test_sampled_monotonicity_check():
    rng = random.Random(0)
    L = PowersetLattice(range(3))
    assert check_monotone([L, L], L, lambda v: v[0] | v[1], rng, samples=100)
    assert not check_monotone([L], L, lambda v: L.top - v[0], rng, samples=100)


def test_chain_lattice_bounds():
    with pytest.raises(ValueError):
        ChainLattice(-1)
    assert list(ChainLattice(2).elements()) == [0, 1, 2]
