"""Point counting, exponent histograms, and closed-point tallies.

The fast counting paths (linearized monomials, quadratic diagonalization,
separable two-variable matching) are cross-checked here against a direct
scalar enumeration, which is its own independent implementation.
"""

import pytest

from zetakit import varieties
from zetakit.cyclofield import build_field, character
from zetakit.cyclotomic import Cyclotomic
from zetakit.errors import BudgetExceeded, NonHomogeneous
from zetakit.polynomials import Poly
from zetakit.varieties import (
    affine,
    affine_line,
    circle,
    closed_point_tally,
    count_points_ff,
    enumerate_points,
    exp_sum,
    exponent_histogram,
    gm,
    point_spec,
    product_spec,
    projective,
    projective_space,
    spec_from_json,
    sym_divisors,
    torus2,
)


def brute_histogram(X, chi, m):
    """Scalar-oracle histogram: enumerate and evaluate point by point."""
    h = [0] * chi.p
    for x in enumerate_points(X, chi.field, m):
        h[chi.exponent(X.f.eval_ff(x)) if X.f is not None else 0] += 1
    return h


# -- counts with known closed forms ------------------------------------------


@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)])
def test_standard_counts(p, k):
    F = build_field(p, k)
    q = F.q
    for m in (1, 2):
        Q = q**m
        assert count_points_ff(affine_line(), F, m) == Q
        assert count_points_ff(gm(), F, m) == Q - 1
        assert count_points_ff(torus2(), F, m) == (Q - 1) ** 2
        assert count_points_ff(projective_space(1), F, m) == Q + 1
        assert count_points_ff(projective_space(2), F, m) == Q**2 + Q + 1
        assert count_points_ff(point_spec(), F, m) == 1


def test_circle_counts():
    # x^2 + y^2 = 1: q - chi_4(q) points for odd q, 2 in characteristic 2
    assert count_points_ff(circle(), build_field(3, 1), 1) == 4
    assert count_points_ff(circle(), build_field(5, 1), 1) == 4
    assert count_points_ff(circle(), build_field(7, 1), 1) == 8
    assert count_points_ff(circle(), build_field(2, 1), 1) == 2


def test_product_count_is_multiplicative(F3):
    X, Y = gm(), circle()
    XY = product_spec(X, Y)
    for m in (1, 2):
        assert count_points_ff(XY, F3, m) == \
            count_points_ff(X, F3, m) * count_points_ff(Y, F3, m)


def test_enumeration_agrees_with_count(F5):
    X = affine(2, equations=["x0*x1 - 1"])  # a hyperbola, i.e. G_m
    pts = list(enumerate_points(X, F5, 1))
    assert len(pts) == count_points_ff(X, F5, 1) == 4
    assert len(set(tuple(c.index() for c in x) for x in pts)) == 4


def test_budget_enforced(F5):
    with pytest.raises(BudgetExceeded):
        count_points_ff(affine(6, ["x0^3 + x1*x2 + x3*x4*x5 - 1"]),
                        F5, 3, budget=10**4)


def test_projective_equations_must_be_homogeneous(F3):
    X = projective(2, equations=["x0^2 + x1"])
    with pytest.raises(NonHomogeneous):
        count_points_ff(X, F3, 1)


# -- histograms against the scalar oracle ------------------------------------


ORACLE_CASES = [
    (affine_line(Poly.parse("x0^2", 1)), 3, 1, 2),
    (affine_line(Poly.parse("x0^3 + x0", 1)), 5, 1, 1),
    (gm(Poly.parse("x0", 1)), 2, 2, 2),
    (circle(Poly.parse("x0*x1", 2)), 3, 1, 2),
    (circle(Poly.parse("x0*x1", 2)), 5, 1, 1),
    (torus2(Poly.parse("x0 + x1", 2)), 3, 1, 2),
    (affine(2, ["x1^2 - x0^3 - 1"], f="x0"), 5, 1, 1),
]


@pytest.mark.parametrize("X,p,k,m", ORACLE_CASES)
def test_histogram_matches_scalar_enumeration(X, p, k, m):
    F = build_field(p, k)
    chi = character(F)
    assert list(exponent_histogram(X, chi, m)) == brute_histogram(X, chi, m)


def test_twisted_histogram_matches_oracle(F5):
    X = affine_line(Poly.parse("x0^2", 1))
    for t in range(1, 5):
        chi = character(F5, F5.from_index(t))
        assert list(exponent_histogram(X, chi, 1)) == brute_histogram(X, chi, 1)


def test_gauss_sum(F3):
    g = exp_sum(affine_line(Poly.parse("x0^2", 1)), character(F3))
    assert g == 1 + 2 * Cyclotomic.zeta_power(3, 1)
    assert g * g == -3


def test_exp_sum_over_full_line_vanishes(F5):
    # sum over F_q of chi(x) = 0 for nontrivial chi
    assert exp_sum(affine_line(Poly.parse("x0", 1)), character(F5)).is_zero()


# -- closed points ------------------------------------------------------------


def test_closed_points_of_line_count_irreducibles(F2):
    # degree-r closed points of A^1/F_2 = monic irreducibles of degree r
    tally = closed_point_tally(affine_line(), character(F2, F2.zero()), 4)
    assert [tally.a_r(r) for r in (1, 2, 3, 4)] == [2, 1, 2, 3]


def test_tally_recovers_point_counts(F3):
    X = circle()
    tally = closed_point_tally(X, character(F3, F3.zero()), 4)
    for m in (1, 2, 3, 4):
        assert tally.recovered_count(m) == count_points_ff(X, F3, m)


def test_tally_recovers_character_sums(F3):
    X = gm(Poly.parse("x0", 1))
    chi = character(F3)
    tally = closed_point_tally(X, chi, 3)
    for m in (1, 2, 3):
        assert tally.n_chi_m(m) == exp_sum(X, chi, m)


def test_sym_counts_of_affine_line(F3):
    # Sym^n A^1 = A^n, so the count over F_q is q^n
    chi = character(F3, F3.zero())
    for n in (1, 2, 3, 4):
        count, _total = sym_divisors(affine_line(), chi, n)
        assert count == 3**n


# -- spec serialization --------------------------------------------------------


def test_spec_json_roundtrip():
    X = affine(2, ["x0^2 + x1^2 - 1"], ["x0"], f="x0*x1")
    Y = spec_from_json(X.to_json())
    assert Y.canonical_key() == X.canonical_key()


def test_projective_spec_roundtrip():
    X = projective(2, equations=["x0*x2 - x1^2"])
    Y = spec_from_json(X.to_json())
    assert Y.canonical_key() == X.canonical_key()
