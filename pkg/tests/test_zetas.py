"""Zeta series: Hasse-Weil closed forms, twisted L-series, reconstruction."""

import math

import pytest

from zetakit.cyclofield import build_field, character
from zetakit.errors import InsufficientOrder, NoCandidate
from zetakit.polynomials import Poly
from zetakit.series import SeriesTrunc
from zetakit.varieties import (
    affine_line,
    circle,
    closed_point_tally,
    gm,
    projective_space,
)
from zetakit.zetas import (
    exp_zeta,
    exp_zeta_from_tally,
    hw_zeta,
    kapranov_check,
    rational_reconstruct,
)


def expand(num, den, order):
    """Reference expansion of num/den as integer series."""
    s = SeriesTrunc(order, num + [0] * (order + 1 - len(num)))
    d = SeriesTrunc(order, den + [0] * (order + 1 - len(den)))
    return s * d.inverse()


def test_affine_line_zeta(F3):
    assert hw_zeta(affine_line(), F3, 8) == expand([1], [1, -3], 8)


def test_projective_line_zeta(F5):
    z = hw_zeta(projective_space(1), F5, 8)
    assert z == expand([1], [1, -6, 5], 8)  # 1/((1-t)(1-5t))


def test_gm_zeta(F4):
    z = hw_zeta(gm(), F4, 8)
    assert z == expand([1, -1], [1, -4], 8)  # (1-t)/(1-4t)


def test_circle_zeta_odd_characteristic(F3):
    # 4, 8, 28, 80, ... = 3^m - (-1)^m points
    z = hw_zeta(circle(), F3, 6)
    assert z == expand([1, 1], [1, -3], 6)  # (1+t)/(1-3t)


def test_twisted_line_zeta_is_a_polynomial(F2):
    # sum_{x in F_{2^m}^*} (-1)^{Tr x} = -1, so Z = exp(-sum t^m/m) = 1 - t
    z = exp_zeta(gm(Poly.parse("x0", 1)), character(F2), 8)
    assert list(z.coeffs) == [1, -1] + [0] * 7


def test_quadratic_twist_gives_gauss_euler_factor(F3):
    # N_{chi,m} for f = x^2 on A^1 is g or 3^{m/2} (Hasse-Davenport)
    z = exp_zeta(affine_line(Poly.parse("x0^2", 1)), character(F3), 6)
    g = z.coeffs[1]
    assert g * g == -3
    # degree-2 coefficient of exp(g t + (-g^2/2 + ...)): check via N_2 = 3
    assert 2 * z.coeffs[2] == g * g + 3


def test_exp_zeta_from_tally_matches(F5):
    X = circle(Poly.parse("x0*x1", 2))
    chi = character(F5)
    tally = closed_point_tally(X, chi, 5)
    assert exp_zeta_from_tally(tally, 5) == exp_zeta(X, chi, 5)


def test_kapranov_coefficients(F3):
    X = gm(Poly.parse("x0", 1))
    report = kapranov_check(X, character(F3), 4)
    assert report["verdict"] == "pass"
    assert [row["n"] for row in report["rows"]] == [0, 1, 2, 3, 4]


# -- rational reconstruction ---------------------------------------------------


def test_reconstruct_geometric():
    s = expand([1], [1, -3], 10)
    rc = rational_reconstruct(s, 2)
    assert list(rc.numerator) == [1]
    assert list(rc.denominator) == [1, -3]
    assert rc.expand(10) == s


def test_reconstruct_prefers_minimal_degrees(F5):
    z = hw_zeta(projective_space(2), F5, 10)
    rc = rational_reconstruct(z, 3)
    # (1-t)(1-5t)(1-25t), numerator 1
    assert list(rc.numerator) == [1]
    assert len(rc.denominator) == 4
    assert rc.expand(10) == z


def test_reconstruct_needs_enough_coefficients():
    s = expand([1], [1, -3], 3)
    with pytest.raises(InsufficientOrder):
        rational_reconstruct(s, 4)


def test_reconstruct_rejects_non_rational_series():
    # exp(t) has no degree <= 2 rational form; all candidates must fail
    from fractions import Fraction

    coeffs = [Fraction(1, math.factorial(n)) for n in range(11)]
    with pytest.raises(NoCandidate):
        rational_reconstruct(SeriesTrunc(10, coeffs), 2)
