import pytest
from hypothesis import given, strategies as st

from btquot.field import field_of_order
from btquot.poly import Poly, parse_poly
from btquot.snf import PolyMat2, snf_2x2


def check_snf(A):
    U, D, V = snf_2x2(A)
    one = Poly.one(A.ctx)
    assert U @ A @ V == D
    assert U.det() == one and V.det() == one
    assert D.b.is_zero() and D.c.is_zero()
    if D.a.is_zero():
        assert D.d.is_zero()
    else:
        assert D.a.is_monic() and (D.d % D.a).is_zero()
    return D


def test_examples():
    f = field_of_order(2)
    t = parse_poly("t", f)
    I = PolyMat2.identity(f)
    assert snf_2x2(I) == (I, I, I)
    D = check_snf(PolyMat2.of(f, [[t, 0], [0, 1]]))
    assert (D.a, D.d) == (Poly.one(f), t)
    D = check_snf(PolyMat2.of(f, [[t, t], [t, 0]]))
    assert (D.a, D.d) == (t, t)  # d1 d2 = det = -t^2 = t^2
    f3 = field_of_order(3)
    t3 = parse_poly("t", f3)
    D = check_snf(PolyMat2.of(f3, [[t3, t3], [t3, 0]]))
    assert D.a == t3 and D.a * D.d == -(t3 * t3)


def mats(q, max_deg=4):
    f = field_of_order(q)
    poly = st.lists(st.integers(0, q - 1), max_size=max_deg + 1).map(lambda c: Poly(f, c))
    return st.tuples(poly, poly, poly, poly).map(lambda e: PolyMat2(*e))


@pytest.mark.parametrize("q", [2, 3, 4, 5])
@given(data=st.data())
def test_random_snf(q, data):
    A = data.draw(mats(q))
    D = check_snf(A)
    assert D.a * D.d == A.det()  # det preserved by determinant-1 transforms
