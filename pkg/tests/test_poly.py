import pytest
from hypothesis import given, strategies as st

from btquot.field import field_of_order
from btquot.poly import (Poly, PolyError, format_poly, is_squarefree, monic_polys, parse_poly, poly_divrem,
                         poly_factor, poly_gcd, poly_xgcd)

F2, F3, F4 = field_of_order(2), field_of_order(3), field_of_order(4)


def P(text, f=F2):
    return parse_poly(text, f)


def polys(f, max_deg=6):
    return st.lists(st.integers(0, f.q - 1), max_size=max_deg + 1).map(lambda c: Poly(f, c))


def test_small_identities():
    assert poly_gcd(P("t^2"), P("t^3")) == P("t^2")
    assert poly_xgcd(P("t"), P("t+1")) == (P("1"), P("1"), P("1"))
    assert P("t+1") ** 2 == P("t^2+1")
    assert Poly.zero(F2).deg == float("-inf")


def test_factor_examples():
    f = poly_factor(P("t^2+1"))
    assert f.factors == ((P("t+1"), 2),)
    assert poly_factor(P("t^2+t+1")).factors == ((P("t^2+t+1"), 1),)
    assert poly_factor(P("t^2")).factors == ((P("t"), 2),)
    with pytest.raises(PolyError):
        poly_factor(Poly.zero(F2))


def test_squarefree_examples():
    assert not is_squarefree(P("t^2"))
    assert is_squarefree(P("t^2+t"))
    assert not is_squarefree(P("t^2+1"))
    with pytest.raises(PolyError):
        is_squarefree(Poly.zero(F2))


@pytest.mark.parametrize("f,max_deg", [(F2, 8), (F3, 8), (F4, 8)])
def test_factor_exhaustive(f, max_deg):
    for d in range(1, max_deg + 1):
        for g in monic_polys(f, d):
            fac = poly_factor(g)
            assert fac.expand(f) == g
            assert sum(e * h.deg for h, e in fac.factors) == d
            hs = [h for h, _ in fac.factors]
            assert len(set(hs)) == len(hs)
            assert all(h.is_monic() and poly_factor(h).factors == ((h, 1),) for h in hs)
            assert list(fac.factors) == sorted(fac.factors, key=lambda he: (he[0].deg, he[0].code))


@pytest.mark.parametrize("f", [F2, F3])
def test_squarefree_agrees_with_factorization(f):
    for d in range(1, 7):
        for g in monic_polys(f, d):
            assert is_squarefree(g) == poly_factor(g).is_squarefree()


@pytest.mark.parametrize("f", [F2, F3, F4])
@given(data=st.data())
def test_divrem_and_xgcd(f, data):
    a = data.draw(polys(f))
    b = data.draw(polys(f))
    if b.is_zero():
        with pytest.raises(ZeroDivisionError):
            poly_divrem(a, b)
        return
    qt, r = poly_divrem(a, b)
    assert qt * b + r == a and r.deg < b.deg
    d, u, v = poly_xgcd(a, b)
    assert u * a + v * b == d and d.is_monic()
    assert (a % d).is_zero() and (b % d).is_zero()
    assert poly_gcd(a, b) == d


@pytest.mark.parametrize("f", [F2, F3, F4, field_of_order(8)])
@given(data=st.data())
def test_text_round_trip(f, data):
    a = data.draw(polys(f, 9))
    assert parse_poly(format_poly(a), f) == a
    assert format_poly(parse_poly(format_poly(a), f)) == format_poly(a)


def test_text_syntax():
    assert format_poly(parse_poly("2*t^2 + 3*t + 1", F4)) == "2*t^2+3*t+1"
    assert parse_poly(" t ^ 2 ", F2) == P("t^2")
    for bad in ["", "t^^2", "3*t", "t**2", "2*"]:
        with pytest.raises(PolyError):
            parse_poly(bad, F2)


@given(data=st.data())
def test_ring_axioms_f3(data):
    a, b, c = (data.draw(polys(F3, 4)) for _ in range(3))
    assert (a + b) * c == a * c + b * c
    assert a - a == Poly.zero(F3)
    assert (a * b).deg == (a.deg + b.deg if not (a.is_zero() or b.is_zero()) else float("-inf"))
