"""The big Witt ring on 1 + tZ[[t]]: ghost maps, L, lifts."""

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zetakit.errors import CoefficientMismatch, NonSquare, UnverifiedCandidate
from zetakit.series import SeriesTrunc
from zetakit.witt import (
    EndoClass,
    L_map,
    WittVector,
    char_series,
    companion_matrix,
    direct_sum,
    exponentiability_check,
    ghost,
    ghost_inverse,
    kron,
    lift_roundtrip,
    trace_identity_check,
    witt_add,
    witt_mul,
    zeta_lift,
)
from zetakit.zetas import rational_reconstruct

T = 8


def line(a, order=T):
    """The Witt vector 1/(1 - a t), i.e. the Teichmueller-style generator."""
    return WittVector(SeriesTrunc(order, [a**n for n in range(order + 1)]))


def test_ghost_of_geometric_is_constant_power_sums():
    g = ghost(line(3).series)
    assert list(g.components) == [3**m for m in range(1, T + 1)]


def test_ghost_roundtrip():
    u = SeriesTrunc(T, [1, 2, -1, 0, 3, 1, 0, -2, 5])
    assert ghost_inverse(ghost(u), T).series == u


def test_witt_sum_is_series_product():
    assert witt_add(line(2), line(3)).series == line(2).series * line(3).series


def test_witt_product_of_lines():
    # [a] * [b] = [ab]
    assert witt_mul(line(2), line(3)) == line(6)


def test_witt_ring_identities():
    one = WittVector.mul_unit(T)
    u = WittVector(SeriesTrunc(T, [1, 1, 2, 0, -1, 3, 0, 1, 1]))
    v = line(2)
    w = line(-1)
    assert witt_mul(u, one) == u
    assert witt_mul(u, v) == witt_mul(v, u)
    lhs = witt_mul(u, witt_add(v, w))
    rhs = witt_add(witt_mul(u, v), witt_mul(u, w))
    assert lhs == rhs


def test_char_series_of_companion_matrix():
    poly = [1, -5, 6]  # (1-2t)(1-3t)
    M = companion_matrix(poly)
    assert list(char_series(M).coeffs)[:3] == poly


def test_L_of_direct_sum_is_witt_sum():
    A = ((2, 1), (0, 1))
    B = ((3,),)
    assert L_map(direct_sum(A, B), T) == witt_add(L_map(A, T), L_map(B, T))


def test_L_of_kronecker_is_witt_product():
    A = ((2, 1), (0, 1))
    B = ((3,),)
    assert L_map(kron(A, B), T) == witt_mul(L_map(A, T), L_map(B, T))


def test_fibonacci_L_series():
    M = ((1, 1), (1, 0))
    s = L_map(M, 6).series
    assert list(s.coeffs) == [1, 1, 2, 3, 5, 8, 13]


def test_trace_identity_random_matrices():
    rng = random.Random(7)
    for _ in range(10):
        n = rng.randint(1, 4)
        M = tuple(tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(n))
        assert trace_identity_check(M, 10)["verdict"] == "pass"


def test_non_square_rejected():
    with pytest.raises(NonSquare):
        trace_identity_check(((1, 2),), 4)


def test_exponentiability(F3):
    from zetakit.varieties import affine_line, gm

    report = exponentiability_check(affine_line(), gm(), F3, 6)
    assert report["verdict"] == "pass"


def test_zeta_lift_roundtrip_p1(F5):
    from zetakit.varieties import projective_space
    from zetakit.zetas import hw_zeta

    z = hw_zeta(projective_space(1), F5, 12)
    cls = lift_roundtrip(z, 2)
    assert cls.plus_rank == 2 and cls.minus_rank == 0
    assert cls.value(12).series == z


def test_zeta_lift_rejects_underverified():
    s = SeriesTrunc(4, [1, 4, 16, 64, 256])
    rc = rational_reconstruct(s, 1)
    rc = type(rc)(rc.numerator, rc.denominator, 1)  # pretend t^1 only
    with pytest.raises(UnverifiedCandidate):
        zeta_lift(rc)


def test_endo_class_value_with_minus_part():
    # L(2) / L(1) = (1-t)/(1-2t)
    cls = EndoClass(1, ((2,),), 1, ((1,),))
    got = cls.value(5).series
    assert list(got.coeffs) == [1, 1, 2, 4, 8, 16]


small = st.integers(min_value=-4, max_value=4)


@st.composite
def witt_vec(draw, order=5):
    tail = draw(st.lists(small, min_size=order, max_size=order))
    return WittVector(SeriesTrunc(order, [1] + tail))


@given(witt_vec(), witt_vec(), witt_vec())
def test_witt_multiplication_distributes(a, b, c):
    lhs = witt_mul(a, witt_add(b, c))
    rhs = witt_add(witt_mul(a, b), witt_mul(a, c))
    assert lhs.series.coeffs == rhs.series.coeffs


@given(witt_vec())
def test_mul_unit_is_neutral(a):
    assert witt_mul(a, WittVector.mul_unit(5)) == a
