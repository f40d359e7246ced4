"""End-to-end acceptance checks, one test per headline property.

Run with `pytest -v tests/test_acceptance.py`: the verbose listing is the
checklist, one pass/fail line per criterion.  Each test also prints a
short summary (visible with -s or -rP).
"""

import random
import time

import numpy as np
import pytest

from zetakit import heights, kexp, scissor, witt
from zetakit.cyclofield import build_field, character
from zetakit.polynomials import Poly
from zetakit.series import SeriesTrunc
from zetakit.varieties import (
    affine,
    affine_line,
    circle,
    count_points_ff,
    gm,
    point_spec,
    projective,
    projective_space,
    sym_divisors,
    torus2,
)
from zetakit.zetas import exp_zeta, hw_zeta, kapranov_check


def note(msg):
    print(f"[acceptance] {msg}")


def expand(num, den, order):
    s = SeriesTrunc(order, num + [0] * (order + 1 - len(num)))
    d = SeriesTrunc(order, den + [0] * (order + 1 - len(den)))
    return s * d.inverse()


# --------------------------------------------------------------------------
# 1. twisted zeta functions: exp of power sums == Euler product, exactly


CURVE_CORPUS = [
    ("A1,f=0", affine_line()),
    ("A1,f=x", affine_line(Poly.parse("x0", 1))),
    ("A1,f=x^2", affine_line(Poly.parse("x0^2", 1))),
    ("Gm,f=x", gm(Poly.parse("x0", 1))),
    ("circle,f=xy", circle(Poly.parse("x0*x1", 2))),
    ("torus,f=x+y", torus2(Poly.parse("x0 + x1", 2))),
]

FIELDS_1 = [(p, k) for p in (2, 3, 5) for k in (1, 2)]


def test_criterion_01_twisted_zeta_euler_product():
    start = time.perf_counter()
    cells = 0
    for name, X in CURVE_CORPUS:
        for p, k in FIELDS_1:
            order = 8
            if name.startswith("circle") and (p, k) == (5, 2):
                # q = 25 at t^8 means ~25^8 point evaluations; see the
                # companion xfail test for the full-depth cell
                order = 5
            chi = character(build_field(p, k))
            exp_zeta(X, chi, order)  # raises RouteMismatch on disagreement
            cells += 1
    elapsed = time.perf_counter() - start
    note(f"criterion 1: {cells} corpus cells verified exactly "
         f"(circle over F_25 to t^5), {elapsed:.1f}s")


@pytest.mark.xfail(strict=True, reason="the circle over F_25 at t^8 needs "
                   "~25^8 = 1.5e11 point evaluations; beyond the default "
                   "enumeration budget by three orders of magnitude")
def test_criterion_01_circle_f25_full_depth():
    chi = character(build_field(5, 2))
    exp_zeta(circle(Poly.parse("x0*x1", 2)), chi, 8)


# --------------------------------------------------------------------------
# 2. Hasse-Weil closed forms


@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)])
def test_criterion_02_hasse_weil_closed_forms(p, k):
    F = build_field(p, k)
    q = F.q
    assert hw_zeta(affine_line(), F, 12) == expand([1], [1, -q], 12)
    assert hw_zeta(projective_space(1), F, 12) == \
        expand([1], [1, -(q + 1), q], 12)
    assert hw_zeta(gm(), F, 12) == expand([1, -1], [1, -q], 12)
    note(f"criterion 2: closed forms match to t^12 over F_{q}")


# --------------------------------------------------------------------------
# 3. class relations: annihilators, additivity, multiplicativity


def A1(f=None, eqs=(), ineqs=()):
    return affine(1, eqs, ineqs, f=f)


def A2(f=None, eqs=(), ineqs=()):
    return affine(2, eqs, ineqs, f=f)


# ten disjoint cell decompositions, each carrying its twisting function
ADDITIVE_DECOMPS = [
    (A1("x0"), (A1("x0", eqs=["x0"]), A1("x0", ineqs=["x0"]))),
    (A1("x0^2"), (A1("x0^2", eqs=["x0"]), A1("x0^2", ineqs=["x0"]))),
    (A1("x0"), (A1("x0", eqs=["x0 - 1"]), A1("x0", ineqs=["x0 - 1"]))),
    (A1("x0^3", ineqs=["x0"]),
     (A1("x0^3", eqs=["x0 - 1"]), A1("x0^3", ineqs=["x0", "x0 - 1"]))),
    (A2("x0*x1"), (A2("x0*x1", eqs=["x0"]), A2("x0*x1", ineqs=["x0"]))),
    (A2("x0 + x1"),
     (A2("x0 + x1", eqs=["x0 - x1"]), A2("x0 + x1", ineqs=["x0 - x1"]))),
    (A2("x0*x1", eqs=["x0^2 + x1^2 - 1"]),
     (A2("x0*x1", eqs=["x0^2 + x1^2 - 1", "x1"]),
      A2("x0*x1", eqs=["x0^2 + x1^2 - 1"], ineqs=["x1"]))),
    (A2("x0 + x1"),
     (A2("x0 + x1", eqs=["x0*x1"]), A2("x0 + x1", ineqs=["x0*x1"]))),
    (A1("x0^3"),
     (A1("x0^3", eqs=["x0"]), A1("x0^3", eqs=["x0 - 1"]),
      A1("x0^3", ineqs=["x0", "x0 - 1"]))),
    (A2("x0*x1^2"),
     (A2("x0*x1^2", eqs=["x0"]), A2("x0*x1^2", eqs=["x1"], ineqs=["x0"]),
      A2("x0*x1^2", ineqs=["x0", "x1"]))),
]


def test_criterion_03_annihilators_vanish_for_all_twists():
    fields = [build_field(2, 1), build_field(3, 1), build_field(2, 2),
              build_field(5, 1), build_field(7, 1)]  # all q <= 7
    annihilators = [
        kexp.KExpClass.generator(A1("x0")),
        kexp.phi(affine_line()),
        kexp.phi(gm()),
        kexp.phi(point_spec()),
    ]
    for cls in annihilators:
        assert kexp.annihilator_check(cls, fields)["verdict"] == "pass"
    note(f"criterion 3a: {len(annihilators)} annihilator classes vanish "
         f"for every nontrivial character, q <= 7")


def test_criterion_03_additivity_on_ten_decompositions():
    for target, pieces in ADDITIVE_DECOMPS:
        for p, k in [(3, 1), (5, 1), (2, 2)]:
            chi = character(build_field(p, k))
            lhs = kexp.realize(kexp.KExpClass.generator(target), chi)
            rhs = kexp.realize(
                sum((kexp.KExpClass.generator(s) for s in pieces),
                    kexp.KExpClass.zero()), chi)
            assert lhs == rhs, (target, p, k)
    note(f"criterion 3b: additivity exact on {len(ADDITIVE_DECOMPS)} "
         f"decompositions x 3 characters")


def test_criterion_03_multiplicativity_on_ten_pairs(F3, F5):
    g = kexp.KExpClass.generator
    square = g(A1("x0^2"))
    pairs = [
        (square, square),                       # the Gauss-sum square
        (square, g(A1("x0"))),
        (square, g(A1("x0^3"))),
        (g(A1("x0")), g(A1("x0"))),
        (square, g(gm("x0"))),
        (g(gm("x0")), g(gm("x0"))),
        (square, g(point_spec(1))),
        (g(A1("x0^3")), g(gm("x0"))),
        (square + g(A1("x0")), g(gm("x0"))),
        (2 * square, square - g(point_spec(1))),
    ]
    for chi in (character(F3), character(F5)):
        for a, b in pairs:
            lhs = kexp.realize(kexp.kexp_mul(a, b), chi)
            assert lhs == kexp.realize(a, chi) * kexp.realize(b, chi)
    # the headline special value
    assert kexp.realize(kexp.kexp_mul(square, square), character(F3)) == -3
    note(f"criterion 3c: multiplicativity exact on {len(pairs)} pairs, "
         f"including (1+2*zeta_3)^2 = -3")


# --------------------------------------------------------------------------
# 4. Fourier inversion and finite Poisson summation


def test_criterion_04_fourier_inversion():
    g = kexp.KExpClass.generator
    corpus_d1 = [
        kexp.delta_class((1,)),
        g(affine(1, f="x0^2", base_map=["x0"])),
        g(affine(1, (), ("x0",), f="x0", base_map=["x0"])),
        g(affine(1, f="0", base_map=["x0^2"])),
        g(affine(1, f="x0^2", base_map=["x0"])) - 2 * kexp.delta_class((0,)),
    ]
    corpus_d2 = [
        kexp.delta_class((1, 0)),
        g(affine(2, f="x0*x1", base_map=["x0", "x1"])),
        g(affine(2, f="x0 + x1", base_map=["x0", "x1"])),
    ]
    checks = 0
    for q in (3, 5, 7):
        chi = character(build_field(q, 1))
        for cls in corpus_d1 + corpus_d2:
            assert kexp.inversion_check(cls, chi)["verdict"] == "pass"
            checks += 1
    note(f"criterion 4a: double Fourier transform == q^d * reflection on "
         f"{checks} (class, q) cells")


def test_criterion_04_poisson_on_ten_pairs():
    g = kexp.KExpClass.generator
    pairs = []
    for q in (3, 5):
        chi = character(build_field(q, 1))
        psi_a = kexp.realize_relative(
            g(affine(2, f="x0^2 + x1", base_map=["x0", "x1"])), chi)
        psi_b = kexp.realize_relative(
            g(affine(2, f="x0*x1", base_map=["x0", "x1"])), chi)
        pairs += [(psi_a, []), (psi_a, ["x0"]), (psi_a, ["x0 - x1"]),
                  (psi_a, ["x0", "x1"]), (psi_b, ["x1"])]
    assert len(pairs) == 10
    for psi, h in pairs:
        assert kexp.poisson_finite_check(psi, h)["verdict"] == "pass"
    note("criterion 4b: finite Poisson identity exact on 10 (Psi, H) pairs")


# --------------------------------------------------------------------------
# 5. Witt ring laws


def test_criterion_05_zeta_exponentiability():
    shapes = [affine_line(), gm(), circle()]
    for p in (2, 3, 5):
        F = build_field(p, 1)
        for X in shapes:
            for Y in shapes:
                report = witt.exponentiability_check(X, Y, F, 6)
                assert report["verdict"] == "pass"
    note("criterion 5a: zeta(X x Y) == zeta(X) * zeta(Y) in the Witt ring, "
         "9 pairs x q in {2,3,5}, exact to t^6")


def test_criterion_05_trace_identity_random_matrices():
    rng = random.Random(2024)
    for i in range(20):
        n = rng.randint(1, 4)
        M = tuple(tuple(rng.randint(-3, 3) for _ in range(n))
                  for _ in range(n))
        assert witt.trace_identity_check(M, 10)["verdict"] == "pass"
    note("criterion 5b: trace identity exact to t^10 on 20 random matrices")


def test_criterion_05_lift_roundtrip():
    cases = [
        (affine_line(), build_field(2, 1), 1),
        (projective_space(1), build_field(3, 1), 2),
        (gm(), build_field(2, 2), 2),
        (projective_space(2), build_field(5, 1), 3),
        (circle(), build_field(3, 1), 2),
    ]
    for X, F, max_deg in cases:
        z = hw_zeta(X, F, 12)
        cls = witt.lift_roundtrip(z, max_deg)
        assert cls.value(12).series == z
    note(f"criterion 5c: reconstruct -> lift -> L reproduces {len(cases)} "
         f"zetas to t^12")


# --------------------------------------------------------------------------
# 6. leading-constant counts on projective space


def test_criterion_06_schanuel_constants():
    start = time.perf_counter()
    r1 = heights.schanuel_check(1, 500, tolerance=0.05)
    t1 = time.perf_counter() - start
    assert r1["verdict"] == "pass"
    assert t1 < 30

    start = time.perf_counter()
    r2 = heights.schanuel_check(2, 60, tolerance=0.10)
    t2 = time.perf_counter() - start
    assert r2["verdict"] == "pass"
    assert t2 < 120
    note(f"criterion 6: P^1 within {r1['relative_error']:.3f} of 12/pi^2 "
         f"({t1:.1f}s); P^2 within {r2['relative_error']:.3f} of 4/zeta(3) "
         f"({t2:.1f}s)")


# --------------------------------------------------------------------------
# 7. convergence boundaries sigma(P^n, O(m)) = (n+1)/m


@pytest.mark.parametrize("n,m,top", [(1, 1, 300), (1, 2, 300), (2, 1, 40)])
def test_criterion_07_convergence_boundary(n, m, top):
    tbl = heights.height_count_table(projective_space(n), m,
                                     heights.dyadic_bounds(top))
    sigma = heights.abscissa_estimate(tbl)
    assert abs(sigma - (n + 1) / m) < 0.25
    note(f"criterion 7: sigma(P^{n}, O({m})) estimated {sigma:.3f} "
         f"vs {(n + 1) / m}")


# --------------------------------------------------------------------------
# 8. accumulating subvarieties


GRID = (4, 8, 16, 32, 64)


def test_criterion_08_accumulation_verdicts():
    line = projective(2, equations=["x2"])
    conic = projective(2, equations=["x0*x2 - x1^2"])
    union = projective(2, equations=["x2*(x0*x2 - x1^2)"])
    assert heights.accumulation_test(line, union, 1, GRID)["verdict"] == "strong"
    assert heights.accumulation_test(conic, union, 1, GRID)["verdict"] == "none"

    two_lines = projective(2, equations=["x1*x2"])
    other = projective(2, equations=["x1"])
    report = heights.accumulation_test(other, two_lines, 1, GRID)
    assert report["verdict"] == "weak"
    assert 0.4 <= report["ratios"][-1] <= 0.6

    # nested triple: line < line u conic < line u conic u cubic
    big = projective(2, equations=["x2*(x0*x2 - x1^2)*(x0^2*x2 - x1^3)"])
    rep = scissor.accumulation_assembler_check(
        big, line, "strong", 1, GRID, middle=union)
    assert rep.verdict == "pass"
    assert rep.details["composition"] == "strong"
    note(f"criterion 8: line strong, conic none, two-lines weak at ratio "
         f"{report['ratios'][-1]:.3f}, nested triple composes strong")


# --------------------------------------------------------------------------
# 9. merged height counts against B log B


def test_criterion_09_divisor_sum_asymptotic():
    B = 10**6
    start = time.perf_counter()
    lam = np.arange(1, B + 1)
    count, report = heights.merge_product_counts(lam, lam, B)
    elapsed = time.perf_counter() - start
    assert abs(report["ratio"] - 1) < 0.15
    assert elapsed < 10
    note(f"criterion 9: N(B)/(B log B) = {report['ratio']:.4f} at B=10^6 "
         f"({elapsed:.1f}s)")


# --------------------------------------------------------------------------
# 10. symmetric-power coefficients by direct divisor enumeration


def test_criterion_10_sym_coefficients_match():
    small_curves = [
        (affine_line(Poly.parse("x0", 1)), 2, 1),
        (affine_line(Poly.parse("x0^2", 1)), 3, 1),
        (gm(Poly.parse("x0", 1)), 3, 1),
        (gm(Poly.parse("x0", 1)), 2, 2),
        (circle(Poly.parse("x0*x1", 2)), 3, 1),
        (circle(Poly.parse("x0*x1", 2)), 5, 1),
        (point_spec(1, Poly.parse("x0", 1)), 7, 1),
    ]
    for X, p, k in small_curves:
        F = build_field(p, k)
        assert count_points_ff(X, F, 1) <= 20
        assert kapranov_check(X, character(F), 4)["verdict"] == "pass"
    note(f"criterion 10a: Euler-product coefficients equal divisor sums "
         f"for n <= 4 on {len(small_curves)} curves")


def test_criterion_10_sym_identity_for_the_split_line(F3, F5):
    # [Sym^n A^1] = sum_r [Sym^r {0}] [Sym^(n-r) Gm] at count level
    for F in (F3, F5):
        chi = character(F, F.zero())
        for n in range(1, 5):
            lhs, _ = sym_divisors(affine_line(), chi, n)
            rhs = 0
            for r in range(n + 1):
                pt = 1  # Sym^r of a point is a point
                gm_count = (sym_divisors(gm(), chi, n - r)[0]
                            if n - r > 0 else 1)
                rhs += pt * gm_count
            assert lhs == rhs == F.q**n
    note("criterion 10b: Sym^n additivity exact for A^1 = {0} u Gm, n <= 4")


# --------------------------------------------------------------------------
# 11. the decomposition ledger


CELL_DECOMPS = [
    scissor.Decomposition(affine_line(), (point_spec(), gm())),
    scissor.Decomposition(affine(1), (affine(1, ["x0 - 1"]),
                                      affine(1, inequations=["x0 - 1"]))),
    scissor.Decomposition(affine(2), (affine(2, ["x0"]),
                                      affine(2, inequations=["x0"]))),
    scissor.Decomposition(affine(2), (affine(2, ["x0 - x1"]),
                                      affine(2, inequations=["x0 - x1"]))),
    scissor.Decomposition(affine(2), (affine(2, ["x0*x1"]), torus2())),
    scissor.Decomposition(
        affine(2, ["x0^2 + x1^2 - 1"]),
        (affine(2, ["x0^2 + x1^2 - 1", "x1"]),
         affine(2, ["x0^2 + x1^2 - 1"], ["x1"]))),
    scissor.Decomposition(gm(), (point_spec(1), affine(1, (), ("x0", "x0 - 1")))),
    scissor.Decomposition(
        projective_space(1),
        (projective(1, inequations=["x1"]), projective(1, equations=["x1"]))),
    scissor.Decomposition(
        projective_space(2),
        (projective(2, inequations=["x2"]), projective(2, equations=["x2"]))),
    scissor.Decomposition(
        projective_space(2),
        (projective(2, inequations=["x2"]),
         projective(2, equations=["x2"], inequations=["x1"]),
         projective(2, equations=["x1", "x2"]))),
]


def test_criterion_11_ledger_decompositions():
    assert len(CELL_DECOMPS) == 10
    realizations = [
        scissor.PointCountRealization(build_field(3, 1), 1),
        scissor.PointCountRealization(build_field(2, 2), 2),
        scissor.ExpSumRealization(character(build_field(5, 1)), 1),
    ]
    for d in CELL_DECOMPS:
        reports = scissor.verify_disjoint_cover(d, realizations)
        assert all(r.verdict == "pass" for r in reports)
    note("criterion 11a: 10 cell decompositions pass 3 realizations each")


def test_criterion_11_broken_decomposition_has_a_witness():
    broken = scissor.Decomposition(affine_line(), (affine_line(), point_spec()))
    realizations = [scissor.PointCountRealization(build_field(3, 1), 1)]
    reports = scissor.verify_disjoint_cover(broken, realizations, strict=False)
    assert reports[0].verdict == "fail"
    assert reports[0].witness == [0]  # the double-covered origin
    note(f"criterion 11b: broken decomposition rejected with witness point "
         f"{reports[0].witness}")
