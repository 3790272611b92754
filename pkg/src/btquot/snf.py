"""2x2 matrices over F_q[t] and their Smith normal form via det-1 operations."""

from __future__ import annotations

from dataclasses import dataclass

from .field import FieldCtx
from .poly import Poly, format_poly


@dataclass(frozen=True)
class PolyMat2:
    """Row-major 2x2 matrix [[a, b], [c, d]] over F_q[t]."""

    a: Poly
    b: Poly
    c: Poly
    d: Poly

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "PolyMat2":
        return cls(Poly.one(ctx), Poly(ctx), Poly(ctx), Poly.one(ctx))

    @classmethod
    def of(cls, ctx: FieldCtx, rows) -> "PolyMat2":
        def conv(x):
            return x if isinstance(x, Poly) else Poly.const(ctx, ctx.embed_int(x))
        (a, b), (c, d) = rows
        return cls(conv(a), conv(b), conv(c), conv(d))

    @property
    def ctx(self) -> FieldCtx:
        return self.a.ctx

    def entries(self) -> tuple[Poly, Poly, Poly, Poly]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, o: "PolyMat2") -> "PolyMat2":
        return PolyMat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def det(self) -> Poly:
        return self.a * self.d - self.b * self.c

    def adjugate(self) -> "PolyMat2":
        return PolyMat2(self.d, -self.b, -self.c, self.a)

    def inverse_sl2(self) -> "PolyMat2":
        if self.det() != Poly.one(self.ctx):
            raise ValueError("matrix is not in SL2(F_q[t])")
        return self.adjugate()

    def reduce(self, g: Poly) -> "PolyMat2":
        return PolyMat2(*(x % g for x in self.entries()))

    def is_diagonal(self) -> bool:
        return self.b.is_zero() and self.c.is_zero()

    def __str__(self):
        a, b, c, d = (format_poly(x) for x in self.entries())
        return f"[[{a},{b}],[{c},{d}]]"


def _elem_upper(ctx, x: Poly) -> PolyMat2:
    return PolyMat2(Poly.one(ctx), x, Poly(ctx), Poly.one(ctx))


def _elem_lower(ctx, x: Poly) -> PolyMat2:
    return PolyMat2(Poly.one(ctx), Poly(ctx), x, Poly.one(ctx))


def _swap(ctx) -> PolyMat2:
    # det 1 "swap": [[0, 1], [-1, 0]]
    return PolyMat2(Poly(ctx), Poly.one(ctx), -Poly.one(ctx), Poly(ctx))


def snf_2x2(A: PolyMat2) -> tuple[PolyMat2, PolyMat2, PolyMat2]:
    """Return (U, D, V) with U @ A @ V == D = diag(d1, d2), det U = det V = 1.

    d1 divides d2 and d1 is monic (or zero). Pivots are the lowest-degree
    nonzero entry, first in row-major order.
    """
    ctx = A.ctx
    U = PolyMat2.identity(ctx)
    V = PolyMat2.identity(ctx)
    M = A
    S = _swap(ctx)
    S_inv = S.adjugate()
    while True:
        ents = M.entries()
        nonzero = [i for i, x in enumerate(ents) if not x.is_zero()]
        if not nonzero:
            return U, M, V
        if M.is_diagonal() and not M.a.is_zero() and (M.d % M.a).is_zero():
            break
        if M.is_diagonal() and not M.a.is_zero():
            # d1 does not divide d2: fold row 2 into row 1 and keep reducing
            E = _elem_upper(ctx, Poly.one(ctx))
            M, U = E @ M, E @ U
            continue
        piv = min(nonzero, key=lambda i: (ents[i].deg, i))
        row, col = divmod(piv, 2)
        if row == 1:
            M, U = S @ M, S @ U
        if col == 1:
            M, V = M @ S_inv, V @ S_inv
        # pivot now at (0, 0); clear the rest of column 0 and row 0
        qc = M.c // M.a
        if not qc.is_zero():
            E = _elem_lower(ctx, -qc)
            M, U = E @ M, E @ U
        qb = M.b // M.a
        if not qb.is_zero():
            E = _elem_upper(ctx, -qb)
            M, V = M @ E, V @ E
    if M.a.is_zero():
        return U, M, V
    lc = M.a.lc
    if lc != 1:
        s = PolyMat2(Poly.const(ctx, ctx.inv(lc)), Poly(ctx), Poly(ctx), Poly.const(ctx, lc))
        M, U = s @ M, s @ U
    return U, M, V
