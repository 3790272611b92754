"""2x2 matrix groups over R_g: SL2, the PGL quotient (SL2 x| F)/Z and PGL2(R_g).

Projective variants identify a matrix with its scalar multiples (by F_q^x
for ``pgl-bar`` and by all of R_g^x for ``pgl-m``); every stored matrix is
the representative whose encoding is least in its scalar class.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple

import numpy as np

from . import kernels
from .formulas import group_orders
from .poly import Poly, format_poly, parse_poly
from .ring import RgCtx, s_subgroup_codes
from .snf import PolyMat2, snf_2x2

DEFAULT_CLOSURE_CAP = 1 << 24


class GroupError(ValueError):
    pass


class ClosureOverflow(RuntimeError):
    """A subgroup closure grew past its element cap."""

    def __init__(self, cap: int, reached: int):
        super().__init__(f"closure exceeded cap {cap} (reached {reached} elements)")
        self.cap = cap
        self.reached = reached


class Variant(str, enum.Enum):
    SL2 = "sl2"
    PGL_BAR = "pgl-bar"
    PGL_M = "pgl-m"

    @classmethod
    def parse(cls, text) -> "Variant":
        if isinstance(text, Variant):
            return text
        try:
            return cls(str(text).lower().replace("_", "-"))
        except ValueError:
            raise GroupError(f"unknown group variant {text!r}") from None


class Mat2(NamedTuple):
    """Row-major [[a, b], [c, d]] with entries as R_g codes."""

    a: int
    b: int
    c: int
    d: int


@dataclass(frozen=True, order=True)
class CosetKey:
    level: int
    value: int
    nbytes: int

    @property
    def bytes(self) -> bytes:
        return self.value.to_bytes(self.nbytes, "big")

    @property
    def hex(self) -> str:
        return self.bytes.hex()


class MatrixGroup:
    """One group variant over one ring, with its level subgroups cached."""

    def __init__(self, ring: RgCtx, variant: Variant | str = Variant.SL2):
        self.ring = ring
        self.variant = Variant.parse(variant)
        self.r = ring.size
        tabs = ring.tables
        self.add_t = tabs.add
        self.mul_t = tabs.mul
        self.neg_t = tabs.neg
        self.inv_t = tabs.inv
        if self.variant is Variant.SL2:
            scalars = np.array([1], dtype=np.int64)
        elif self.variant is Variant.PGL_BAR:
            scalars = np.arange(1, ring.q, dtype=np.int64)
        else:
            scalars = np.array(ring.unit_codes, dtype=np.int64)
        self.scalars = scalars
        self.scaled = len(scalars) > 1
        self._build_scaling()
        self.key_bytes = max(1, ((self.r ** 4 - 1).bit_length() + 7) // 8)

    def __repr__(self):
        return f"MatrixGroup({self.variant.value}, {self.ring!r})"

    def _build_scaling(self):
        r = self.r
        vals = self.mul_t[np.ix_(self.scalars, np.arange(r))]  # (|S|, r)
        arg = np.argmin(vals, axis=0)
        self.orbmin = vals[arg, np.arange(r)].astype(np.int64)
        self.lam0 = self.scalars[arg].astype(np.int64)
        fixed = vals == np.arange(r)[None, :]
        cols, rows = np.nonzero(fixed.T)  # sorted by element
        self.sidx = self.scalars[rows].astype(np.int64)
        self.sptr = np.zeros(r + 1, dtype=np.int64)
        np.add.at(self.sptr, cols + 1, 1)
        self.sptr = np.cumsum(self.sptr)

    # -- arithmetic --
    def _kargs(self):
        return (self.mul_t, self.lam0, self.sptr, self.sidx, self.r, self.scaled)

    def mul(self, x: Mat2, y: Mat2) -> Mat2:
        A, M = self.add_t, self.mul_t
        return Mat2(
            int(A[M[x.a, y.a], M[x.b, y.c]]), int(A[M[x.a, y.b], M[x.b, y.d]]),
            int(A[M[x.c, y.a], M[x.d, y.c]]), int(A[M[x.c, y.b], M[x.d, y.d]]),
        )

    def det(self, x: Mat2) -> int:
        return int(self.add_t[self.mul_t[x.a, x.d], self.neg_t[self.mul_t[x.b, x.c]]])

    def is_member(self, x: Mat2) -> bool:
        d = self.det(x)
        if self.variant is Variant.SL2:
            return d == 1
        if self.variant is Variant.PGL_BAR:
            return 0 < d < self.ring.q
        return self.inv_t[d] >= 0

    def check(self, x: Mat2) -> Mat2:
        if not self.is_member(x):
            raise GroupError(f"{self.format(x)} has determinant {self.ring.format(self.det(x))}, "
                             f"not allowed in {self.variant.value}")
        return x

    def inv(self, x: Mat2) -> Mat2:
        self.check(x)
        di = int(self.inv_t[self.det(x)])
        M, N = self.mul_t, self.neg_t
        return self.canonical_scale(Mat2(int(M[di, x.d]), int(M[di, N[x.b]]),
                                         int(M[di, N[x.c]]), int(M[di, x.a])))

    def scale(self, lam: int, x: Mat2) -> Mat2:
        M = self.mul_t
        return Mat2(*(int(M[lam, e]) for e in x))

    def encode(self, x: Mat2) -> int:
        r = self.r
        return ((x.a * r + x.b) * r + x.c) * r + x.d

    def decode(self, enc: int) -> Mat2:
        r = self.r
        enc, d = divmod(int(enc), r)
        enc, c = divmod(enc, r)
        a, b = divmod(enc, r)
        return Mat2(a, b, c, d)

    def encode_bytes(self, x: Mat2) -> bytes:
        return self.encode(x).to_bytes(self.key_bytes, "big")

    def canonical_scale(self, x: Mat2) -> Mat2:
        """Least-encoding member of the scalar class of x (brute force over scalars)."""
        best = min(self.encode(self.scale(int(lam), x)) for lam in self.scalars)
        return self.decode(best)

    def canon_enc_array(self, mats: np.ndarray) -> np.ndarray:
        return kernels.batch_canon(np.asarray(mats, dtype=np.int64).reshape(-1, 4), *self._kargs())

    @property
    def identity(self) -> Mat2:
        return self.canonical_scale(Mat2(1, 0, 0, 1))

    # -- text --
    def format(self, x: Mat2) -> str:
        f = self.ring.format
        return f"[[{f(x.a)},{f(x.b)}],[{f(x.c)},{f(x.d)}]]"

    def parse(self, text: str) -> Mat2:
        return parse_matrix(text, self.ring)

    # -- order --
    @property
    def order(self) -> int:
        """|H|; equal for all three variants."""
        return group_orders(self.ring).sl2

    # -- level subgroups --
    @lru_cache(maxsize=None)
    def subgroup(self, i: int) -> np.ndarray:
        """Level-i subgroup as a sorted (M, 4) array of canonical matrices.

        Level n is the cusp stabilizer image (all upper unitriangular parts).
        """
        n = self.ring.n
        if not 0 <= i <= n:
            raise GroupError(f"level {i} out of range 0..{n}")
        q = self.ring.q
        fld = self.ring.field
        mats = []
        if i == 0:
            for a in range(q):
                for b in range(q):
                    for c in range(q):
                        for d in range(q):
                            if fld.sub(fld.mul(a, d), fld.mul(b, c)) == 1:
                                mats.append((a, b, c, d))
        else:
            nb = q ** min(i + 1, n)
            for a in range(1, q):
                ai = fld.inv(a)
                mats.extend((a, b, 0, ai) for b in range(nb))
        base = np.array(mats, dtype=np.int64)
        if self.variant is not Variant.SL2:
            lifted = [base]
            for c in range(2, q):
                f = base.copy()
                f[:, 0] = self.mul_t[base[:, 0], c]
                f[:, 2] = self.mul_t[base[:, 2], c]
                lifted.append(f)
            base = np.concatenate(lifted)
        encs = np.unique(self.canon_enc_array(base))
        return kernels.decode(encs, self.r)

    @lru_cache(maxsize=None)
    def grouped_subgroup(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Level-i subgroup ordered by first column, with group boundaries."""
        s = self.subgroup(i)
        order = np.lexsort((s[:, 3], s[:, 1], s[:, 2], s[:, 0]))
        s = np.ascontiguousarray(s[order])
        col = s[:, 0] * self.r + s[:, 2]
        starts = np.flatnonzero(np.r_[True, col[1:] != col[:-1]])
        return s, np.r_[starts, len(s)].astype(np.int64)

    def subgroup_encodings(self, i: int) -> np.ndarray:
        s = self.subgroup(i)
        return ((s[:, 0] * self.r + s[:, 1]) * self.r + s[:, 2]) * self.r + s[:, 3]

    def subgroup_elements(self, i: int) -> list[Mat2]:
        if not 0 <= i <= self.ring.n - 1:
            raise GroupError(f"level {i} out of range 0..{self.ring.n - 1}")
        return [Mat2(*map(int, row)) for row in self.subgroup(i)]

    @lru_cache(maxsize=None)
    def transversal(self, i: int, j: int) -> np.ndarray:
        """Left coset representatives of H_i / (H_i n H_j), as an (T, 4) array."""
        Hi = self.subgroup_encodings(i)
        inter = np.intersect1d(Hi, self.subgroup_encodings(j))
        inter_m = kernels.decode(inter, self.r)
        covered: set[int] = set()
        reps = []
        for enc in Hi:
            enc = int(enc)
            if enc in covered:
                continue
            reps.append(enc)
            x = np.broadcast_to(kernels.decode(np.array([enc]), self.r), (len(inter_m), 4))
            prods = self._products_right(x, inter_m)
            covered.update(int(v) for v in prods)
        return kernels.decode(np.array(reps, dtype=np.int64), self.r)

    def _products_right(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        A, M = self.add_t, self.mul_t
        prod = np.stack([
            A[M[xs[:, 0], ys[:, 0]], M[xs[:, 1], ys[:, 2]]],
            A[M[xs[:, 0], ys[:, 1]], M[xs[:, 1], ys[:, 3]]],
            A[M[xs[:, 2], ys[:, 0]], M[xs[:, 3], ys[:, 2]]],
            A[M[xs[:, 2], ys[:, 1]], M[xs[:, 3], ys[:, 3]]],
        ], axis=1)
        return self.canon_enc_array(prod)

    # -- coset keys --
    def coset_key_values(self, reps: np.ndarray, level: int, left=None, right=None) -> np.ndarray:
        """Key integers of left[l] @ reps[i] @ right[k] modulo H_level; shape (N, L, K)."""
        reps = np.asarray(reps, dtype=np.int64).reshape(-1, 4)
        eye = np.array([[1, 0, 0, 1]], dtype=np.int64)
        left = eye if left is None else np.asarray(left, dtype=np.int64).reshape(-1, 4)
        right = eye if right is None else np.asarray(right, dtype=np.int64).reshape(-1, 4)
        sub, gptr = self.grouped_subgroup(level)
        return kernels.batch_coset_keys(reps, left, right, sub, gptr, self.add_t, self.mul_t,
                                        self.orbmin, self.lam0, self.sptr, self.sidx, self.r, self.scaled)

    def canonical_coset_key(self, h: Mat2, i: int) -> CosetKey:
        self.check(h)
        if not 0 <= i <= self.ring.n:
            raise GroupError(f"level {i} out of range")
        val = int(self.coset_key_values(np.array([h]), i)[0, 0, 0])
        return CosetKey(i, val, self.key_bytes)

    # -- generation --
    def elementary_generators(self) -> list[Mat2]:
        basis = [self.ring.p ** s for s in range(self.ring.digits)]
        gens = [Mat2(1, e, 0, 1) for e in basis] + [Mat2(1, 0, e, 1) for e in basis]
        return gens

    @cached_property
    def unit_class_reps(self) -> list[int]:
        """Representatives of R^x / F_q^x R^x2, smallest code first."""
        ring = self.ring
        units = ring.unit_codes
        sq = {ring.mul(u, u) for u in units}
        sub = sorted({ring.mul(c, s) for c in ring.field_units() for s in sq})
        covered: set[int] = set()
        reps = []
        for u in units:
            if u in covered:
                continue
            reps.append(u)
            covered.update(ring.mul(u, s) for s in sub)
        return reps

    def full_generators(self) -> list[Mat2]:
        """Generators of the whole group, used for left-multiplication orbits."""
        gens = self.elementary_generators()
        if self.variant is Variant.PGL_BAR and self.ring.q > 2:
            fld = self.ring.field
            prim = next(c for c in fld.units() if _mult_order(fld, c) == fld.q - 1)
            gens.append(Mat2(prim, 0, 0, 1))
        elif self.variant is Variant.PGL_M:
            gens.extend(Mat2(u, 0, 0, 1) for u in self.unit_class_reps if u != 1)
        return [self.canonical_scale(g) for g in gens]

    def small_generating_set(self, level: int) -> list[Mat2]:
        """A few elements generating the level subgroup (checked by closure)."""
        elems = [Mat2(*map(int, row)) for row in self.subgroup(level)]
        target = len(elems)
        chosen: list[Mat2] = []
        have = np.array([self.encode(self.identity)])
        for x in elems:
            if np.isin(self.encode(x), have):
                continue
            chosen.append(x)
            have = group_closure(self, chosen, cap=target).encodings
            if len(have) == target:
                break
        return chosen

    def closure(self, generators: Iterable[Mat2], cap: int = DEFAULT_CLOSURE_CAP) -> "Closure":
        return group_closure(self, generators, cap)

    def diag(self, a: int, d: int) -> Mat2:
        return self.canonical_scale(Mat2(a, 0, 0, d))


def _mult_order(fld, c: int) -> int:
    k, x = 1, c
    while x != 1:
        x = fld.mul(x, c)
        k += 1
    return k


@lru_cache(maxsize=None)
def matrix_group(ring: RgCtx, variant: Variant | str = Variant.SL2) -> MatrixGroup:
    return MatrixGroup(ring, Variant.parse(variant))


@dataclass(frozen=True)
class Closure:
    group: MatrixGroup
    encodings: np.ndarray  # sorted canonical encodings

    def __len__(self):
        return len(self.encodings)

    def __contains__(self, x: Mat2) -> bool:
        enc = self.group.encode(self.group.canonical_scale(x))
        i = np.searchsorted(self.encodings, enc)
        return bool(i < len(self.encodings) and self.encodings[i] == enc)

    def elements(self) -> list[Mat2]:
        return [Mat2(*map(int, row)) for row in kernels.decode(self.encodings, self.group.r)]


def group_closure(group: MatrixGroup, generators: Iterable[Mat2], cap: int = DEFAULT_CLOSURE_CAP,
                  chunk: int = 1 << 16) -> Closure:
    """Subgroup generated by ``generators``: breadth-first products on both sides.

    Raises ClosureOverflow once more than ``cap`` elements are found.
    """
    gens = [group.canonical_scale(group.check(Mat2(*g))) for g in generators]
    gens_arr = np.array(gens or [group.identity], dtype=np.int64).reshape(-1, 4)
    start = np.unique(np.concatenate([[group.encode(group.identity)], group.canon_enc_array(gens_arr)]))
    known = start
    frontier = start
    kargs = (group.add_t, group.mul_t, group.lam0, group.sptr, group.sidx, group.r, group.scaled)
    while frontier.size:
        fresh = []
        for s in range(0, frontier.size, chunk):
            elems = kernels.decode(frontier[s:s + chunk], group.r)
            prods = np.unique(kernels.batch_products(elems, gens_arr, *kargs))
            pos = np.searchsorted(known, prods)
            pos[pos == known.size] = 0
            fresh.append(prods[known[pos] != prods])
        new = np.unique(np.concatenate(fresh)) if fresh else np.empty(0, np.int64)
        if known.size + new.size > cap:
            raise ClosureOverflow(cap, int(known.size + new.size))
        known = np.union1d(known, new)
        frontier = new
    return Closure(group, known)


def t_subgroup(ring: RgCtx, closure: Closure) -> list[int]:
    """Codes a in S with diag(a^-1, a) inside the given SL2 closure."""
    if closure.group.variant is not Variant.SL2:
        raise GroupError("T is defined from the SL2 closure")
    return [a for a in s_subgroup_codes(ring) if Mat2(ring.inv(a), 0, 0, a) in closure]


# -- lifting to SL2(F_q[t]) --

def lift_entries(ring: RgCtx, x: Mat2) -> PolyMat2:
    return PolyMat2(*(ring.poly(e) for e in x))


def sl2_lift(ring: RgCtx, A_bar: Mat2) -> PolyMat2:
    """A matrix of SL2(F_q[t]) reducing to A_bar modulo g."""
    ctx = ring.field
    det = ring.sub(ring.mul(A_bar.a, A_bar.d), ring.mul(A_bar.b, A_bar.c))
    if det != 1:
        raise GroupError(f"determinant {ring.format(det)} is not 1")
    A = lift_entries(ring, A_bar)
    U, D, V = snf_2x2(A)
    a, d = D.a, D.d
    ad = a * d
    B = PolyMat2(a, ad - 1, 1 - ad, d * 2 - ad * d)
    out = U.adjugate() @ B @ V.adjugate()
    if out.det() != Poly.one(ctx):
        raise AssertionError("lift lost determinant 1")
    if tuple(ring.reduce(e) for e in out.entries()) != tuple(A_bar):
        raise AssertionError("lift does not reduce to its input")
    return out


def random_sl2(ring: RgCtx, rng) -> Mat2:
    """Uniform element of SL2(R_g): a random matrix with unit determinant, top row rescaled."""
    r = ring.size
    while True:
        a, b, c, d = (rng.randrange(r) for _ in range(4))
        det = ring.sub(ring.mul(a, d), ring.mul(b, c))
        if ring.is_unit(det):
            u = ring.inv(det)
            return Mat2(ring.mul(u, a), ring.mul(u, b), c, d)


def parse_matrix(text: str, ring: RgCtx) -> Mat2:
    """Parse ``[[a,b],[c,d]]`` with entries in polynomial text syntax."""
    s = "".join(text.split())
    if not (s.startswith("[[") and s.endswith("]]")) or s.count("],[") != 1:
        raise GroupError(f"cannot parse matrix {text!r}")
    top, bottom = s[2:-2].split("],[")
    rows = [top.split(","), bottom.split(",")]
    if any(len(row) != 2 for row in rows):
        raise GroupError(f"cannot parse matrix {text!r}")
    return Mat2(*(ring.reduce(parse_poly(e, ring.field)) for row in rows for e in row))


def format_polymat(m: PolyMat2) -> str:
    return "[[{},{}],[{},{}]]".format(*(format_poly(e) for e in m.entries()))
