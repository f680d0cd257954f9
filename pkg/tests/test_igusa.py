from fractions import Fraction

import pytest

from localzeta.groups import TooLarge
from localzeta.igusa import (
    IgusaError,
    igusa_truncation,
    level_set_measures,
    parse_poly,
    zero_count,
)
from localzeta.rings import make_ring
from localzeta.zeta import expand, igusa_coordinate_form, igusa_two_by_two_form

DET = "a*b - c*d"


def test_parse_poly_basics():
    p = parse_poly(DET)
    assert p.vars == ("a", "b", "c", "d")
    assert p.ast == (
        "sub", ("mul", ("var", "a"), ("var", "b")),
        ("mul", ("var", "c"), ("var", "d")),
    )
    assert parse_poly("x_1 + 12").vars == ("x_1",)
    # unary minus binds looser than ^
    assert parse_poly("-x^2").ast == ("neg", ("pow", ("var", "x"), 2))


def test_parse_poly_errors():
    for bad in ("a /", "(a", "a + ", "x ^ y", "3 % 4", ""):
        with pytest.raises(IgusaError):
            parse_poly(bad)


def test_zero_count_determinant_f2():
    # over F_2: ab = cd has 3*3 + 1*1 solutions
    r = make_ring("zq", p=2, f=1, m=1)
    assert zero_count(DET, r, 4) == 10
    q = 2
    assert 10 == q**3 + q**2 - q


def test_zero_count_single_variable():
    assert zero_count("x", make_ring("zq", p=3, f=1, m=2), 1) == 1
    assert zero_count("x", make_ring("fqt", p=3, f=1, m=2), 1) == 1


def test_zero_count_constants():
    r = make_ring("zq", p=2, f=1, m=2)
    assert zero_count("1", r, 3) == 0
    assert zero_count("0", r, 3) == r.size**3
    assert zero_count("4", r, 1) == r.size  # 4 = 0 in Z/4


def test_zero_count_ambient_axes_scale():
    r = make_ring("zq", p=3, f=1, m=1)
    base = zero_count("x", r, 1)
    assert zero_count("x", r, 3) == base * r.size**2


def test_zero_count_power_and_identities():
    r9 = make_ring("zq", p=3, f=1, m=2)
    assert zero_count("x^2", r9, 1) == 3  # x in {0, 3, 6}
    # binomial identity vanishes everywhere
    r8 = make_ring("zq", p=2, f=1, m=3)
    n = zero_count("(a+b)^2 - a^2 - 2*a*b - b^2", r8, 2)
    assert n == r8.size**2
    assert zero_count("- - x - x", r8, 1) == r8.size


def test_zero_count_arity_checks():
    r = make_ring("zq", p=2, f=1, m=1)
    with pytest.raises(IgusaError):
        zero_count(DET, r, 3)
    with pytest.raises(TooLarge):
        zero_count("x + y + z", make_ring("zq", p=2, f=1, m=12), 3)


def test_level_set_measures_determinant():
    top = make_ring("zq", p=2, f=1, m=4)
    rep = level_set_measures(DET, top, 4)
    assert rep["zero_counts"][0] == 10
    # mu(v >= 1) = 10/16, so mu(v = 0) = 3/8
    assert rep["measures"][0] == Fraction(3, 8)
    assert all(mu >= 0 for mu in rep["measures"])
    assert sum(rep["measures"]) + rep["tail"] == 1
    assert rep["tail"] == Fraction(rep["zero_counts"][-1], 16**4)


def test_level_set_measures_coordinate():
    for q, kind in ((2, "zq"), (3, "zq"), (2, "fqt")):
        top = make_ring(kind, p=q, f=1, m=4)
        rep = level_set_measures("x", top, 1)
        for n, mu in enumerate(rep["measures"]):
            assert mu == Fraction(1, q**n) * (1 - Fraction(1, q))


def test_level_set_measures_needs_valuation():
    with pytest.raises(IgusaError):
        level_set_measures("x", make_ring("zn", n=6), 1)


def test_zero_counts_monotone_under_reduction():
    # each level-(m+1) zero reduces to a level-m zero; fibers have q^d points
    top = make_ring("zq", p=2, f=1, m=4)
    N = [1] + level_set_measures(DET, top, 4)["zero_counts"]
    for i in range(len(N) - 1):
        assert 0 <= N[i + 1] <= 2**4 * N[i]


def test_igusa_truncation_matches_closed_form():
    top = make_ring("zq", p=2, f=1, m=4)
    series, tail = igusa_truncation(DET, top, 4)
    assert series == expand(igusa_two_by_two_form(), 2, 4)
    assert series.provenance == ["enumerated"] * 4
    assert sum(series.coeffs) + tail == 1

    top3 = make_ring("zq", p=3, f=1, m=3)
    series3, _ = igusa_truncation(DET, top3, 4)
    assert series3 == expand(igusa_two_by_two_form(), 3, 3)


def test_igusa_truncation_transfer():
    for kind in ("zq", "fqt"):
        s, _ = igusa_truncation(DET, make_ring(kind, p=2, f=1, m=3), 4)
        assert s == expand(igusa_two_by_two_form(), 2, 3)


def test_igusa_truncation_univariate():
    s, tail = igusa_truncation("x", make_ring("zq", p=2, f=1, m=5), 1)
    assert s == expand(igusa_coordinate_form(), 2, 5)
    assert tail == Fraction(1, 32)
