"""Closed-form orders and level sizes, all in exact rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .ring import RgCtx, unit_group_order


def pi_q(ring: RgCtx) -> Fraction:
    """prod over distinct irreducible factors of g of (1 - q^(-2 d_i))."""
    q = ring.q
    return prod((1 - Fraction(1, q ** (2 * d)) for d, _ in ring.factorization.degrees), start=Fraction(1))


def _as_int(x: Fraction) -> int:
    if x.denominator != 1:
        raise AssertionError(f"expected an integer, got {x}")
    return int(x)


@dataclass(frozen=True)
class GroupOrders:
    gl2: int
    sl2: int
    units: int


def group_orders(ring: RgCtx) -> GroupOrders:
    q, n = ring.q, ring.n
    degs = [d for d, _ in ring.factorization.degrees]
    gl2 = Fraction(q ** (4 * n)) * prod(((1 - Fraction(1, q ** (2 * d))) * (1 - Fraction(1, q ** d))
                                         for d in degs), start=Fraction(1))
    sl2 = Fraction(q ** (3 * n)) * pi_q(ring)
    units = unit_group_order(ring)
    if gl2 != sl2 * units:
        raise AssertionError("order formulas disagree: |GL2| != |SL2| |R^x|")
    return GroupOrders(_as_int(gl2), _as_int(sl2), units)


def level_size(ring: RgCtx, i: int) -> int:
    """|H : H_i|; for i >= n this is the number of rays, |H| / ((q-1) q^n)."""
    if i < 0:
        raise ValueError("negative level")
    q, n = ring.q, ring.n
    h = group_orders(ring).sl2
    if i == 0:
        return _as_int(Fraction(h, q * (q * q - 1)))
    return _as_int(Fraction(h, (q - 1) * q ** min(i + 1, n)))


def level_size_printed(ring: RgCtx, i: int) -> Fraction:
    """The i >= n level size with the exponent 2n - 2 (the uncorrected variant).

    Kept only to be reported next to ``level_size``; it is off by a factor of q.
    """
    q, n = ring.q, ring.n
    if i < n:
        return Fraction(level_size(ring, i))
    return Fraction(q ** (2 * n - 2)) * pi_q(ring) / (1 - Fraction(1, q))


def cusp_count(ring: RgCtx) -> int:
    """Number of rays: cosets of the cusp-level subgroup."""
    return level_size(ring, ring.n)


def subgroup_order(ring: RgCtx, i: int) -> int:
    q, n = ring.q, ring.n
    if i == 0:
        return q * (q * q - 1)
    return (q - 1) * q ** min(i + 1, n)
