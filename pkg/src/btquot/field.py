"""Finite fields F_{p^k} with integer-coded elements.

An element sum(c_i x^i) of F_p[x]/(m) is stored as the integer sum(c_i p^i),
so 0 and 1 keep their usual codes and prime fields are plain residues.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

MAX_FIELD_SIZE = 1 << 16


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split q = p^k, raising FieldError when q is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = 2
    while q % p:
        p += 1
    k, m = 0, q
    while m % p == 0:
        m //= p
        k += 1
    if m != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, k


# -- small helpers on dense F_p coefficient lists (low degree first) --

def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _fp_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    inv_lc = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    while len(_trim(a)) - 1 >= dm:
        c = a[-1] * inv_lc % p
        shift = len(a) - 1 - dm
        for j, mj in enumerate(m):
            a[shift + j] = (a[shift + j] - c * mj) % p
    return a


def _fp_irreducible(m: list[int], p: int) -> bool:
    d = len(m) - 1
    for e in range(1, d // 2 + 1):
        for low in product(range(p), repeat=e):
            if not _trim(_fp_mod(m, list(low) + [1], p)):
                return False
    return True


def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree k over F_p.

    Candidates are compared as coefficient tuples (c_0, c_1, ..., c_{k-1}).
    """
    for low in product(range(p), repeat=k):
        m = list(low) + [1]
        if m[0] != 0 and _fp_irreducible(m, p):
            return tuple(m)
    raise FieldError(f"no irreducible of degree {k} over F_{p}")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """The field F_q, q = p^k, with element codes in [0, q)."""

    p: int
    k: int
    modulus: tuple[int, ...] | None = None
    _exp: tuple[int, ...] = field(default=(), repr=False)
    _log: tuple[int, ...] = field(default=(), repr=False)

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def char_two(self) -> bool:
        return self.p == 2

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self):
        return hash((self.p, self.k))

    def __repr__(self):
        return f"GF({self.q})"

    # digits
    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            a, d = divmod(a, self.p)
            out.append(d)
        return out

    def from_digits(self, ds) -> int:
        code = 0
        for d in reversed(ds):
            code = code * self.p + d
        return code

    # arithmetic on codes
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.k == 1:
            return (a + b) % self.p
        p = self.p
        out, mult = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.k == 1:
            return -a % self.p
        return self.from_digits([-d % self.p for d in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.k == 1:
            return a * b % self.p
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if a == 0:
            return 1 if e == 0 else 0
        if self.k == 1:
            return pow(a, e, self.p)
        return self._exp[self._log[a] * e % (self.q - 1)]

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    def embed_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_q."""
        return n % self.p

    def elem(self, code: int) -> "FieldElem":
        return FieldElem(self, code)

    def dense_tables(self):
        """(add, mul, neg, inv) as int64 arrays; inv[0] is -1."""
        cached = _DENSE.get((self.p, self.k))
        if cached is None:
            q = self.q
            els = range(q)
            add = np.array([[self.add(a, b) for b in els] for a in els], dtype=np.int64)
            mul = np.array([[self.mul(a, b) for b in els] for a in els], dtype=np.int64)
            neg = np.array([self.neg(a) for a in els], dtype=np.int64)
            inv = np.array([-1] + [self.inv(a) for a in range(1, q)], dtype=np.int64)
            cached = _DENSE[(self.p, self.k)] = (add, mul, neg, inv)
        return cached


    def list_tables(self):
        """(add, sub, mul) as nested Python lists for fast scalar loops; None for large fields."""
        if self.q > LIST_TABLE_LIMIT:
            return None
        cached = _LISTS.get((self.p, self.k))
        if cached is None:
            els = range(self.q)
            cached = _LISTS[(self.p, self.k)] = (
                [[self.add(a, b) for b in els] for a in els],
                [[self.sub(a, b) for b in els] for a in els],
                [[self.mul(a, b) for b in els] for a in els])
        return cached


LIST_TABLE_LIMIT = 256
_DENSE: dict = {}
_LISTS: dict = {}


def _build_log_tables(p: int, k: int, modulus: tuple[int, ...]):
    q = p ** k
    mod = list(modulus)

    def mulx(a_digits, b_digits):
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a_digits):
            if ai:
                for j, bj in enumerate(b_digits):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
        r = _fp_mod(prod, mod, p)
        return (r + [0] * k)[:k]

    def to_code(ds):
        c = 0
        for d in reversed(ds):
            c = c * p + d
        return c

    def to_digits(c):
        out = []
        for _ in range(k):
            c, d = divmod(c, p)
            out.append(d)
        return out

    for g in range(2, q):
        gd = to_digits(g)
        exp = [1]
        cur = to_digits(1)
        for _ in range(q - 2):
            cur = mulx(cur, gd)
            c = to_code(cur)
            if c == 1:
                break
            exp.append(c)
        if len(exp) == q - 1:
            log = [0] * q
            for i, c in enumerate(exp):
                log[c] = i
            return tuple(exp), tuple(log)
    raise FieldError("no primitive element found")  # pragma: no cover


@lru_cache(maxsize=None)
def field_create(p: int, k: int = 1) -> FieldCtx:
    """Return the context for F_{p^k}.

    Contexts are cached, so equal arguments give the same object.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if not isinstance(k, int) or k < 1:
        raise FieldError(f"extension degree must be >= 1, got {k}")
    if p ** k > MAX_FIELD_SIZE:
        raise FieldError(f"field size {p}^{k} exceeds bound {MAX_FIELD_SIZE}")
    if k == 1:
        return FieldCtx(p, 1)
    modulus = least_irreducible(p, k)
    exp, log = _build_log_tables(p, k, modulus)
    return FieldCtx(p, k, modulus, exp, log)


def field_of_order(q: int) -> FieldCtx:
    return field_create(*prime_power(q))


@dataclass(frozen=True)
class FieldElem:
    """Convenience wrapper pairing a code with its field."""

    ctx: FieldCtx
    code: int

    def __post_init__(self):
        if not 0 <= self.code < self.ctx.q:
            raise FieldError(f"code {self.code} out of range for {self.ctx!r}")

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.ctx != self.ctx:
                raise FieldError("mixed fields")
            return other.code
        if isinstance(other, int):
            return self.ctx.embed_int(other)
        return NotImplemented

    def __add__(self, other):
        return FieldElem(self.ctx, self.ctx.add(self.code, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem(self.ctx, self.ctx.sub(self.code, self._other(other)))

    def __neg__(self):
        return FieldElem(self.ctx, self.ctx.neg(self.code))

    def __mul__(self, other):
        return FieldElem(self.ctx, self.ctx.mul(self.code, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElem(self.ctx, self.ctx.div(self.code, self._other(other)))

    def __pow__(self, e: int):
        return FieldElem(self.ctx, self.ctx.pow(self.code, e))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.ctx, self.ctx.inv(self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return f"{self.code}@{self.ctx!r}"
