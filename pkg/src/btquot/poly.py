"""Dense univariate polynomials over F_q, plus trial-division factoring.

Text syntax is ``c*t^e + ...`` with coefficients written as field codes,
e.g. ``2*t^2+3*t+1`` over F_4. ``format_poly`` and ``parse_poly`` round-trip.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .field import FieldCtx

DEG_ZERO = -math.inf  # degree of the zero polynomial


class PolyError(ValueError):
    pass


def _trim(c) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class Poly:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs=()):
        self.ctx = ctx
        self.coeffs = _trim(coeffs)

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, ())

    @classmethod
    def one(cls, ctx):
        return cls(ctx, (1,))

    @classmethod
    def const(cls, ctx, c: int):
        return cls(ctx, (c,))

    @classmethod
    def t(cls, ctx, e: int = 1):
        return cls(ctx, (0,) * e + (1,))

    @classmethod
    def from_code(cls, ctx, code: int) -> "Poly":
        q, out = ctx.q, []
        while code:
            code, c = divmod(code, q)
            out.append(c)
        return cls(ctx, out)

    @property
    def code(self) -> int:
        out = 0
        for c in reversed(self.coeffs):
            out = out * self.ctx.q + c
        return out

    @property
    def deg(self):
        return len(self.coeffs) - 1 if self.coeffs else DEG_ZERO

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.lc == 1

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.ctx, self.ctx.embed_int(other))
        return isinstance(other, Poly) and self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx.q, self.coeffs))

    def __repr__(self):
        return f"Poly({format_poly(self)!r} over {self.ctx!r})"

    def __str__(self):
        return format_poly(self)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ctx != self.ctx:
                raise PolyError("polynomials over different fields")
            return other
        if isinstance(other, int):
            return Poly.const(self.ctx, self.ctx.embed_int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        f = self.ctx
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly(f, [f.add(x, b[i]) if i < len(b) else x for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self):
        f = self.ctx
        return Poly(f, [f.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        f = self.ctx
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(f)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = f.add(out[i + j], f.mul(x, y))
        return Poly(f, out)

    __rmul__ = __mul__

    def scale(self, c: int) -> "Poly":
        f = self.ctx
        return Poly(f, [f.mul(c, x) for x in self.coeffs])

    def __pow__(self, e: int):
        if e < 0:
            raise PolyError("negative power")
        result, base = Poly.one(self.ctx), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        return poly_divrem(self, self._coerce(other))

    def __floordiv__(self, other):
        return poly_divrem(self, self._coerce(other))[0]

    def __mod__(self, other):
        return poly_divrem(self, self._coerce(other))[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.ctx.inv(self.lc))

    def __call__(self, x: int) -> int:
        f = self.ctx
        acc = 0
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def derivative(self) -> "Poly":
        f = self.ctx
        return Poly(f, [f.mul(f.embed_int(i), c) for i, c in enumerate(self.coeffs)][1:])

    def compose(self, inner: "Poly") -> "Poly":
        acc = Poly(self.ctx)
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def shift(self, c: int) -> "Poly":
        """f(t + c)."""
        return self.compose(Poly(self.ctx, (c, 1)))


def poly_divrem(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    f = a.ctx
    rem = list(a.coeffs)
    db = len(b.coeffs) - 1
    if len(rem) - 1 < db:
        return Poly(f), a
    inv_lc = f.inv(b.lc)
    quo = [0] * (len(rem) - db)
    tabs = f.list_tables()
    if tabs is not None:
        _, sub, mul = tabs
        bc = b.coeffs
        for s in range(len(rem) - 1 - db, -1, -1):
            c = mul[rem[s + db]][inv_lc]
            if c:
                quo[s] = c
                mc = mul[c]
                for j in range(db + 1):
                    rem[s + j] = sub[rem[s + j]][mc[bc[j]]]
        return Poly(f, quo), Poly(f, rem[:db])
    for s in range(len(rem) - 1 - db, -1, -1):
        c = f.mul(rem[s + db], inv_lc)
        if c:
            quo[s] = c
            for j, bj in enumerate(b.coeffs):
                rem[s + j] = f.sub(rem[s + j], f.mul(c, bj))
    return Poly(f, quo), Poly(f, rem[:db])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (d, u, v) with u*a + v*b = d = gcd(a, b), d monic (or zero)."""
    f = a.ctx
    r0, r1 = a, b
    s0, s1 = Poly.one(f), Poly(f)
    t0, t1 = Poly(f), Poly.one(f)
    while not r1.is_zero():
        qt, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - qt * s1
        t0, t1 = t1, t0 - qt * t1
    if r0.is_zero():
        return r0, s0, t0
    c = f.inv(r0.lc)
    return r0.scale(c), s0.scale(c), t0.scale(c)


def monic_polys(ctx: FieldCtx, d: int):
    """All monic polynomials of degree d, in code order."""
    for low in product(range(ctx.q), repeat=d):
        yield Poly(ctx, tuple(reversed(low)) + (1,))


@dataclass(frozen=True)
class Factorization:
    unit: int
    factors: tuple[tuple[Poly, int], ...]

    def expand(self, ctx: FieldCtx) -> Poly:
        out = Poly.const(ctx, self.unit)
        for g, e in self.factors:
            out = out * g ** e
        return out

    @property
    def degrees(self) -> list[tuple[int, int]]:
        """(d_i, n_i) pairs: degree and multiplicity of each irreducible factor."""
        return [(int(g.deg), e) for g, e in self.factors]

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


@lru_cache(maxsize=None)
def monic_irreducibles(ctx: FieldCtx, d: int) -> tuple[Poly, ...]:
    """Monic irreducibles of degree d in code order: no irreducible factor of degree <= d/2."""
    smaller = [h for e in range(1, d // 2 + 1) for h in monic_irreducibles(ctx, e)]
    return tuple(f for f in monic_polys(ctx, d) if all(not (f % h).is_zero() for h in smaller))


def poly_factor(f: Poly) -> Factorization:
    """Factor f by trial division with monic irreducibles of increasing degree."""
    if f.is_zero():
        raise PolyError("cannot factor the zero polynomial")
    ctx = f.ctx
    unit = f.lc
    rest = f.monic()
    found: list[tuple[Poly, int]] = []
    d = 1
    while 2 * d <= rest.deg:
        for cand in monic_irreducibles(ctx, d):
            e = 0
            while True:
                quo, rem = divmod(rest, cand)
                if not rem.is_zero():
                    break
                rest, e = quo, e + 1
            if e:
                found.append((cand, e))
            if 2 * d > rest.deg:
                break
        d += 1
    if rest.deg >= 1:
        found.append((rest, 1))
    found.sort(key=lambda ge: (ge[0].deg, ge[0].code))
    # a large leftover factor may coincide with an earlier candidate
    merged: list[tuple[Poly, int]] = []
    for g, e in found:
        if merged and merged[-1][0] == g:
            merged[-1] = (g, merged[-1][1] + e)
        else:
            merged.append((g, e))
    return Factorization(unit, tuple(merged))


def is_squarefree(f: Poly) -> bool:
    if f.is_zero():
        raise PolyError("squarefreeness of zero is undefined")
    if f.is_const():
        return True
    df = f.derivative()
    if df.is_zero():
        return False
    return poly_gcd(f, df).deg == 0


# -- text syntax --

def format_poly(f: Poly) -> str:
    if f.is_zero():
        return "0"
    terms = []
    for e in range(len(f.coeffs) - 1, -1, -1):
        c = f.coeffs[e]
        if not c:
            continue
        if e == 0:
            terms.append(str(c))
            continue
        mono = "t" if e == 1 else f"t^{e}"
        terms.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(terms)


_TERM = re.compile(r"^(?:(\d+)\*?)?(?:(t)(?:\^(\d+))?)?$")


def parse_poly(text: str, ctx: FieldCtx) -> Poly:
    s = re.sub(r"\s+", "", text)
    if not s:
        raise PolyError("empty polynomial text")
    if s[0] not in "+-":
        s = "+" + s
    pieces = re.findall(r"([+-])([^+-]*)", s)
    if "".join(sign + body for sign, body in pieces) != s:
        raise PolyError(f"cannot parse polynomial {text!r}")
    total = Poly(ctx)
    for sign, body in pieces:
        m = _TERM.match(body)
        if not body or body.endswith("*") or not m or (m.group(1) is None and m.group(2) is None):
            raise PolyError(f"bad term {body!r} in {text!r}")
        coef = int(m.group(1)) if m.group(1) is not None else 1
        if coef >= ctx.q:
            raise PolyError(f"coefficient code {coef} out of range for {ctx!r}")
        e = 0 if m.group(2) is None else int(m.group(3) or 1)
        term = Poly(ctx, (0,) * e + (coef,))
        total = total - term if sign == "-" else total + term
    return total
