"""The finite quotient ring R_g = F_q[t]/(g).

Elements are the reduced representatives (degree < n) coded as
sum(c_i q^i), c_i the field codes of the coefficients. Constants keep their
field code, so F_q sits inside R_g as the codes 0..q-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import prod

import numpy as np

from .field import FieldCtx, field_of_order
from .poly import Factorization, Poly, format_poly, parse_poly, poly_factor, poly_gcd, poly_xgcd

MAX_TABLE_RING = 1 << 12  # largest ring for which dense r x r tables are built
MAX_BRUTE_UNITS = 1 << 20


class RingError(ValueError):
    pass


def digit_add(a: int, b: int, p: int) -> int:
    if p == 2:
        return a ^ b
    out, mult = 0, 1
    while a or b:
        out += ((a % p + b % p) % p) * mult
        a //= p
        b //= p
        mult *= p
    return out


def digit_neg(a: int, p: int) -> int:
    if p == 2:
        return a
    out, mult = 0, 1
    while a:
        out += (-(a % p) % p) * mult
        a //= p
        mult *= p
    return out


@dataclass(frozen=True, eq=False)
class RgCtx:
    field: FieldCtx
    g: Poly
    factorization: Factorization = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.g.deg)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def size(self) -> int:
        return self.q ** self.n

    @property
    def digits(self) -> int:
        """Number of base-p digits in an element code."""
        return self.field.k * self.n

    def __eq__(self, other):
        return isinstance(other, RgCtx) and self.field == other.field and self.g == other.g

    def __hash__(self):
        return hash((self.field, self.g))

    def __repr__(self):
        return f"R(q={self.q}, g={format_poly(self.g)})"

    @property
    def label(self) -> str:
        return f"q={self.q} g={format_poly(self.g)}"

    # conversions
    def poly(self, code: int) -> Poly:
        return Poly.from_code(self.field, code)

    def reduce(self, f: Poly) -> int:
        return (f % self.g).code

    def elem(self, x) -> "RgElem":
        if isinstance(x, Poly):
            return RgElem(self, self.reduce(x))
        if isinstance(x, str):
            return RgElem(self, self.reduce(parse_poly(x, self.field)))
        return RgElem(self, int(x))

    def parse(self, text: str) -> int:
        return self.reduce(parse_poly(text, self.field))

    def format(self, code: int) -> str:
        return format_poly(self.poly(code))

    # arithmetic on codes
    def add(self, a: int, b: int) -> int:
        return digit_add(a, b, self.p)

    def neg(self, a: int) -> int:
        return digit_neg(a, self.p)

    def sub(self, a: int, b: int) -> int:
        return digit_add(a, digit_neg(b, self.p), self.p)

    def mul(self, a: int, b: int) -> int:
        tab = self.__dict__.get("_tables")
        if tab is not None:
            return int(tab.mul[a, b])
        return ((self.poly(a) * self.poly(b)) % self.g).code

    def is_unit(self, a: int) -> bool:
        return poly_gcd(self.poly(a), self.g).deg == 0

    def inv(self, a: int) -> int:
        d, u, _ = poly_xgcd(self.poly(a), self.g)
        if d.deg != 0:
            raise ZeroDivisionError(f"{self.format(a)} is not a unit in {self!r}")
        return (u % self.g).code

    def pow(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out

    def elements(self) -> range:
        return range(self.size)

    @cached_property
    def unit_codes(self) -> tuple[int, ...]:
        tab = self.__dict__.get("_tables")
        if tab is not None:
            return tuple(int(x) for x in np.flatnonzero(tab.inv >= 0))
        return tuple(a for a in self.elements() if self.is_unit(a))

    def units(self) -> list["RgElem"]:
        return [RgElem(self, a) for a in self.unit_codes]

    def field_units(self) -> range:
        return range(1, self.q)

    @cached_property
    def _tables(self):
        if self.size > MAX_TABLE_RING:
            return None
        return build_tables(self)

    @property
    def tables(self) -> "RingTables":
        if self._tables is None:
            raise RingError(f"{self!r} is too large for dense tables")
        return self._tables


@dataclass(frozen=True)
class RgElem:
    ctx: RgCtx
    code: int

    def _c(self, other) -> int:
        if isinstance(other, RgElem):
            return other.code
        if isinstance(other, int):
            return self.ctx.field.embed_int(other)
        return NotImplemented

    def __add__(self, o):
        return RgElem(self.ctx, self.ctx.add(self.code, self._c(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return RgElem(self.ctx, self.ctx.sub(self.code, self._c(o)))

    def __neg__(self):
        return RgElem(self.ctx, self.ctx.neg(self.code))

    def __mul__(self, o):
        return RgElem(self.ctx, self.ctx.mul(self.code, self._c(o)))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return RgElem(self.ctx, self.ctx.pow(self.code, e))

    def inverse(self) -> "RgElem":
        return RgElem(self.ctx, self.ctx.inv(self.code))

    def is_unit(self) -> bool:
        return self.ctx.is_unit(self.code)

    @property
    def poly(self) -> Poly:
        return self.ctx.poly(self.code)

    def __lt__(self, other):
        return self.code < other.code

    def __str__(self):
        return self.ctx.format(self.code)

    def __repr__(self):
        return f"RgElem({self}, {self.ctx!r})"


@dataclass(frozen=True)
class RingTables:
    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray  # -1 for non-units


def _digit_matrix(r: int, m: int, p: int) -> np.ndarray:
    codes = np.arange(r, dtype=np.int64)
    out = np.empty((r, m), dtype=np.int64)
    for j in range(m):
        out[:, j] = codes % p
        codes //= p
    return out


def build_tables(ctx: RgCtx) -> RingTables:
    """Dense add/mul/neg/inv tables, built from F_p-bilinearity of the product."""
    r, m, p = ctx.size, ctx.digits, ctx.p
    D = _digit_matrix(r, m, p)
    powers = p ** np.arange(m, dtype=np.int64)
    if p == 2:
        ar = np.arange(r, dtype=np.int64)
        add = np.bitwise_xor.outer(ar, ar).astype(np.int32)
    else:
        add = np.empty((r, r), dtype=np.int32)
        step = max(1, (1 << 22) // (r * m))
        for s in range(0, r, step):
            blk = (D[s:s + step, None, :] + D[None, :, :]) % p
            add[s:s + step] = blk @ powers
    neg = ((-D) % p) @ powers

    basis = [ctx.poly(int(p ** j)) for j in range(m)]
    E = np.zeros((m, m, m), dtype=np.int64)
    for i in range(m):
        for j in range(i, m):
            prod_code = ((basis[i] * basis[j]) % ctx.g).code
            dig = _digit_matrix(prod_code + 1, m, p)[prod_code]
            E[i, j] = dig
            E[j, i] = dig
    # rows for the basis codes p^j, then mul[b] = mul[b - top] + mul[top] with top the
    # largest power of p not above b (removing one unit of the leading digit)
    mul = np.zeros((r, r), dtype=np.int32)
    for j in range(m):
        mul[p ** j] = ((D @ E[:, j, :]) % p) @ powers
    top = 1
    for b in range(2, r):
        if b == top * p:
            top = b
            continue
        mul[b] = add[mul[b - top], mul[top]]
    inv = np.full(r, -1, dtype=np.int32)
    rows, cols = np.nonzero(mul == 1)
    inv[rows] = cols
    return RingTables(add, mul, neg.astype(np.int32), inv)


@lru_cache(maxsize=None)
def rg_create(fld: FieldCtx, g: Poly) -> RgCtx:
    if g.ctx != fld:
        raise RingError("modulus polynomial is over a different field")
    if g.is_zero() or g.deg < 1:
        raise RingError("modulus must have degree >= 1")
    if not g.is_monic():
        raise RingError(f"modulus {format_poly(g)} is not monic")
    return RgCtx(fld, g, poly_factor(g))


def ring_from_text(q: int, g_text: str) -> RgCtx:
    fld = field_of_order(q)
    return rg_create(fld, parse_poly(g_text, fld))


def ring_t_power(q: int, n: int) -> RgCtx:
    fld = field_of_order(q)
    return rg_create(fld, Poly.t(fld, n))


# -- unit group and square classes --

def unit_group_order(ctx: RgCtx) -> int:
    q, n = ctx.q, ctx.n
    val = Fraction(q ** n) * prod((1 - Fraction(1, q ** d) for d, _ in ctx.factorization.degrees), start=Fraction(1))
    assert val.denominator == 1
    return int(val)


def square_class_index_formula(ctx: RgCtx) -> int:
    """Closed form for |R^x : F_q^x R^x2| via the CRT splitting of R_g.

    q even: each factor F_{q^d}[u]/(u^e) contributes q^(d*floor(e/2)) and F_q^x
    consists of squares. q odd: R^x / R^x2 is (Z/2)^s for s distinct factors,
    and a non-square constant stays a non-square exactly in the odd-degree factors,
    so F_q^x cuts the index by 2 unless every factor has even degree.
    """
    degs = ctx.factorization.degrees
    if ctx.q % 2 == 0:
        return prod(ctx.q ** (d * (e // 2)) for d, e in degs)
    s = len(degs)
    return 2 ** s if all(d % 2 == 0 for d, _ in degs) else 2 ** (s - 1)


def square_class_index_odd_q_stated(ctx: RgCtx) -> int:
    """The commonly quoted odd-q value 1, which only holds when g is a power of
    a single irreducible of odd degree. Reported for comparison, never used."""
    if ctx.q % 2 == 0:
        return square_class_index_formula(ctx)
    return 1


def square_class_index_brute(ctx: RgCtx) -> int:
    """|R^x : F_q^x R^x2| by listing units, their squares and the F_q^x multiples."""
    if ctx.size > MAX_BRUTE_UNITS:
        raise RingError("ring too large for brute-force square classes")
    from .kernels import square_class_counts
    fadd, fmul, fneg, finv = ctx.field.dense_tables()
    g = np.array(ctx.g.coeffs, dtype=np.int64)
    units, sub = square_class_counts(g, ctx.q, fadd, fmul, fneg, finv)
    if units % sub:
        raise AssertionError("F_q^x R^x2 is not a subgroup")
    return units // sub


@dataclass(frozen=True)
class SquareClassIndex:
    value: int
    closed_form: int
    brute_force: int | None  # None when the unit group exceeds the brute-force cap

    @property
    def closed_form_only(self) -> bool:
        return self.brute_force is None


def square_class_report(ctx: RgCtx) -> SquareClassIndex:
    closed = square_class_index_formula(ctx)
    brute = None
    if ctx.size <= MAX_BRUTE_UNITS:
        brute = square_class_index_brute(ctx)
        if brute != closed:
            raise AssertionError(f"square class index mismatch for {ctx!r}: {brute} vs {closed}")
    return SquareClassIndex(closed, closed, brute)


def square_class_index(ctx: RgCtx) -> int:
    return square_class_report(ctx).value


def s_subgroup_codes(ctx: RgCtx) -> list[int]:
    """Units whose square is a nonzero constant, in code order."""
    return [a for a in ctx.unit_codes if 0 < ctx.mul(a, a) < ctx.q]


def s_subgroup(ctx: RgCtx) -> list[RgElem]:
    return [RgElem(ctx, a) for a in s_subgroup_codes(ctx)]
