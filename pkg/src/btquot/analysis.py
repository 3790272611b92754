"""Exact formulas, component indices C and C~, and the checks built on them.

C = |H : <H_0, H_1>| counts components of the level 0-1 subgraph of the SL2
graph; C~ is the same index in PGL2(R_g) for the Morgenstern subgroups.
Everything here is integer or Fraction arithmetic.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .field import prime_power
from .formulas import (GroupOrders, cusp_count, group_orders, level_size, level_size_printed, pi_q,
                       subgroup_order)
from .graph import (BudgetExceeded, LevelledGraph, build_graph, component_count, component_vertices,
                    neighborhood_N0, subgraph_01)
from .groups import ClosureOverflow, Variant, group_closure, matrix_group, t_subgroup
from .poly import format_poly, is_squarefree
from .ring import (RgCtx, build_tables, ring_t_power, s_subgroup_codes, square_class_index,
                   square_class_index_odd_q_stated)

TABLE1_CLOSURE_CAP = 1 << 22
TABLE1_VERTEX_BUDGET = 1 << 22

# Published component counts for g = t^n, as exponents of 2: {q: {n: (C, C~)}}
REFERENCE_EXPONENTS: dict[int, dict[int, tuple[int, int]]] = {
    2: dict(zip(range(2, 27), zip(
        [0, 2, 3, 5, 6, 8, 9, 11, 12, 14, 15, 17, 18, 20, 21, 23, 24, 26, 27, 29, 30, 32, 33, 35, 36],
        [1, 3, 4, 6, 7, 10, 11, 13, 14, 17, 18, 20, 21, 24, 25, 27, 28, 31, 32, 34, 35, 38, 39, 41, 42]))),
    4: dict(zip(range(2, 14), zip([0] * 12, [2, 2, 4, 4, 6, 6, 8, 8, 10, 10, 12, 12]))),
    8: dict(zip(range(2, 8), zip([0] * 6, [3, 3, 6, 6, 9, 9]))),
    16: dict(zip(range(2, 5), zip([0] * 3, [4, 4, 8]))),
    32: {2: (0, 5), 3: (0, 5)},
    64: {2: (0, 6)},
}


def reference_counts(q: int, n: int) -> tuple[int, int] | None:
    e = REFERENCE_EXPONENTS.get(q, {}).get(n)
    return None if e is None else (2 ** e[0], 2 ** e[1])


# -- formula report --

@dataclass(frozen=True)
class FormulaReport:
    q: int
    g: str
    n: int
    Pi_q: Fraction
    orders: GroupOrders
    level_sizes: list[int]  # levels 0..n (index n = every level >= n)
    level_size_printed_form: Fraction  # exponent 2n-2 variant for i >= n, for comparison
    cusp_count: int


def formula_report(ring: RgCtx) -> FormulaReport:
    n = ring.n
    return FormulaReport(ring.q, format_poly(ring.g), n, pi_q(ring), group_orders(ring),
                         [level_size(ring, i) for i in range(n + 1)], level_size_printed(ring, n),
                         cusp_count(ring))


def brute_force_orders(ring: RgCtx) -> GroupOrders:
    """|GL2|, |SL2|, |R^x| by counting over the ring tables.

    P[x] = #{(a, d) : a d = x}; a matrix (a b; c d) has determinant x - y with
    x = ad, y = bc, so |GL2| = sum over x - y a unit of P[x] P[y].
    Tables are built locally unless already cached, so sweeping many rings stays small.
    """
    tabs = ring.__dict__.get("_tables") or build_tables(ring)
    r = ring.size
    P = np.bincount(tabs.mul.ravel(), minlength=r).astype(np.int64)  # each entry <= r^2
    units = np.flatnonzero(tabs.inv >= 0)
    # S[y] = sum over units u of P[u + y], at most r^3, so int64 is exact
    S = np.zeros(r, dtype=np.int64)
    step = max(1, (1 << 22) // r)
    for s in range(0, len(units), step):
        S += P[tabs.add[units[s:s + step]]].sum(axis=0)
    Pl = P.tolist()
    gl2 = sum(a * b for a, b in zip(Pl, S.tolist()))
    sl2 = sum(a * Pl[x] for a, x in zip(Pl, tabs.add[1].tolist()))
    return GroupOrders(gl2, sl2, int(len(units)))


def enumerate_orders(ring: RgCtx) -> GroupOrders:
    """Direct count over all r^4 matrices (tiny rings only)."""
    tabs = ring.tables
    r = ring.size
    if r ** 4 > 1 << 22:
        raise ValueError("ring too large for direct enumeration")
    ar = np.arange(r)
    a, b, c, d = np.meshgrid(ar, ar, ar, ar, indexing="ij")
    det = tabs.add[tabs.mul[a, d], tabs.neg[tabs.mul[b, c]]]
    gl2 = int(np.count_nonzero(tabs.inv[det] >= 0))
    sl2 = int(np.count_nonzero(det == 1))
    return GroupOrders(gl2, sl2, int(np.count_nonzero(tabs.inv >= 0)))


# -- component indices --

@dataclass
class IndexResult:
    value: int | None
    closure: int | None = None  # via |H| / |closure|
    graph: int | None = None  # via identity-component count of the 0-1 subgraph
    notes: list[str] = field(default_factory=list)

    @property
    def method(self) -> str:
        if self.closure is not None and self.graph is not None:
            return "both"
        if self.closure is not None:
            return "closure"
        if self.graph is not None:
            return "graph"
        return "incomplete"


def closure_of_h0_h1(ring: RgCtx, variant: Variant | str, cap: int):
    group = matrix_group(ring, variant)
    gens = group.small_generating_set(0) + group.small_generating_set(1)
    return group_closure(group, gens, cap=cap)


def component_index(ring: RgCtx, variant: Variant | str, closure_cap: int = TABLE1_CLOSURE_CAP,
                    vertex_budget: int = TABLE1_VERTEX_BUDGET, paths=("closure", "graph")) -> IndexResult:
    """|H : <H_0, H_1>| in the given variant, by every feasible path (they must agree)."""
    if ring.n < 2:
        raise ValueError("C needs deg g >= 2 (levels 0 and 1)")
    res = IndexResult(None)
    order = group_orders(ring).sl2
    if "closure" in paths:
        try:
            cl = closure_of_h0_h1(ring, variant, closure_cap)
            if order % len(cl):
                raise AssertionError("closure size does not divide |H|")
            res.closure = order // len(cl)
        except ClosureOverflow as exc:
            res.notes.append(f"closure: {exc}")
    if "graph" in paths:
        try:
            g01 = build_graph(ring, variant, mode="identity", levels=2, budget=vertex_budget)
            res.graph = component_count(g01)
        except BudgetExceeded as exc:
            res.notes.append(f"graph: {exc}")
    if res.closure is not None and res.graph is not None and res.closure != res.graph:
        raise AssertionError(f"closure index {res.closure} != graph component count {res.graph}")
    res.value = res.closure if res.closure is not None else res.graph
    return res


# -- conjectured formulas --

def conjectured_C(q: int, n: int) -> int | None:
    if q == 2:
        return q ** ((3 * n - 5) // 2) if n > 2 else None
    return 1


def conjectured_C_tilde(q: int, n: int) -> int | None:
    if q == 2:
        return q ** ((3 * n - 5) // 2 + (n + 1) // 4) if n > 2 else None
    if q % 2 == 0:
        return q ** (n // 2) if n > 1 else None
    return 1


@dataclass
class Table1Row:
    q: int
    n: int
    C: int | None
    C_tilde: int | None
    method: str
    methods: dict
    conjecture_C: int | None
    conjecture_C_tilde: int | None
    match_C: bool | None
    match_C_tilde: bool | None
    reference: tuple[int, int] | None
    seconds: float
    notes: list[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.C is not None and self.C_tilde is not None

    @property
    def matches_reference(self) -> bool | None:
        if self.reference is None or not self.complete:
            return None
        return (self.C, self.C_tilde) == self.reference

    def to_dict(self) -> dict:
        d = asdict(self)
        d["reference"] = list(self.reference) if self.reference else None
        d["complete"] = self.complete
        d["matches_reference"] = self.matches_reference
        d["conjecture_status"] = conjecture_check(self)["status"]
        return d


def _match(pred, val):
    if pred is None or val is None:
        return None
    return pred == val


def table1_row(q: int, n: int, closure_cap: int = TABLE1_CLOSURE_CAP,
               vertex_budget: int = TABLE1_VERTEX_BUDGET) -> Table1Row:
    """C and C~ for g = t^n; rows beyond the budgets come back incomplete."""
    t0 = time.perf_counter()
    ring = ring_t_power(q, n)
    c = component_index(ring, Variant.SL2, closure_cap, vertex_budget)
    ct = component_index(ring, Variant.PGL_M, closure_cap, vertex_budget)
    methods = {"C": c.method, "C_tilde": ct.method}
    method = c.method if c.method == ct.method else f"{c.method}/{ct.method}"
    pc, pct = conjectured_C(q, n), conjectured_C_tilde(q, n)
    return Table1Row(q, n, c.value, ct.value, method, methods, pc, pct, _match(pc, c.value),
                     _match(pct, ct.value), reference_counts(q, n), time.perf_counter() - t0,
                     c.notes + ct.notes)


def conjecture_check(row: Table1Row) -> dict:
    """Compare a computed row with the conjectured formulas. Never a proof."""
    flags = [f for f in (row.match_C, row.match_C_tilde) if f is not None]
    if not row.complete:
        status = "CONJECTURE-UNCHECKED (row incomplete)"
    elif not flags:
        status = "CONJECTURE-NOT-APPLICABLE"
    elif all(flags):
        status = "CONJECTURE-CONSISTENT"
    else:
        status = "CONJECTURE-INCONSISTENT"
    return {"q": row.q, "n": row.n, "C": row.C, "C_tilde": row.C_tilde,
            "conjecture_C": row.conjecture_C, "conjecture_C_tilde": row.conjecture_C_tilde,
            "status": status}


def format_power(value: int | None, p: int) -> str:
    """1, p^e, or the plain integer when value is not a power of p."""
    if value is None:
        return "-"
    if value == 1:
        return "1"
    e, v = 0, value
    while v % p == 0:
        v //= p
        e += 1
    if v != 1:
        return str(value)
    return f"{p}^{e}" if e > 1 else str(p)


def format_table1(rows: list[Table1Row], timings: bool = False) -> str:
    header = ["q", "n", "C", "C~", "method", "conj C", "conj C~", "status", "reference"]
    if timings:
        header.append("sec")
    body = []
    for r in rows:
        p = prime_power(r.q)[0]
        ref = "-" if r.reference is None else f"({format_power(r.reference[0], p)},{format_power(r.reference[1], p)})"
        body.append([str(r.q), str(r.n), format_power(r.C, p), format_power(r.C_tilde, p), r.method,
                     format_power(r.conjecture_C, p), format_power(r.conjecture_C_tilde, p),
                     conjecture_check(r)["status"], ref] + ([f"{r.seconds:.1f}"] if timings else []))
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(x.rjust(w) for x, w in zip(row, widths)) for row in body)
    return "\n".join(lines) + "\n"


# -- the S/T identity --

@dataclass
class STReport:
    q: int
    g: str
    C: int | None
    C_tilde: int | None
    index: int
    S: list[int]
    T: list[int] | None
    holds: bool | None
    notes: list[str] = field(default_factory=list)

    @property
    def S_over_T(self) -> Fraction | None:
        return None if self.T is None else Fraction(len(self.S), len(self.T))


def st_identity_check(ring: RgCtx, cap: int = 1 << 24) -> STReport:
    """C * |R^x : F_q^x R^x2| == C~ * |S : T|, each side computed independently."""
    notes = []
    order = group_orders(ring).sl2
    C = Ct = None
    T = None
    try:
        cl = closure_of_h0_h1(ring, Variant.SL2, cap)
        C = order // len(cl)
        T = t_subgroup(ring, cl)
    except ClosureOverflow as exc:
        notes.append(f"SL2 closure: {exc}")
    try:
        Ct = order // len(closure_of_h0_h1(ring, Variant.PGL_M, cap))
    except ClosureOverflow as exc:
        notes.append(f"PGL closure: {exc}")
    S = s_subgroup_codes(ring)
    idx = square_class_index(ring)
    holds = None
    if C is not None and Ct is not None and T is not None:
        holds = C * idx * len(T) == Ct * len(S)
    return STReport(ring.q, format_poly(ring.g), C, Ct, idx, S, T, holds, notes)


# -- parity propositions and the connectivity criterion --

@dataclass
class ParityRow:
    q: int
    g: str
    squarefree: bool
    C: int | None
    C_tilde: int | None
    index: int
    index_odd_q_stated: int
    tilde_components: int | None  # components of the full PGL_M graph
    claims: dict  # name -> True/False/None (None = not applicable)


def parity_row(ring: RgCtx, closure_cap: int = TABLE1_CLOSURE_CAP,
               vertex_budget: int = TABLE1_VERTEX_BUDGET) -> ParityRow:
    q = ring.q
    sqf = is_squarefree(ring.g)
    C = Ct = None
    if ring.n >= 2:
        C = component_index(ring, Variant.SL2, closure_cap, vertex_budget).value
        Ct = component_index(ring, Variant.PGL_M, closure_cap, vertex_budget).value
    try:
        comps = build_graph(ring, Variant.PGL_M, mode="full", budget=vertex_budget).num_components
    except BudgetExceeded:
        comps = None
    idx = square_class_index(ring)
    g = ring.g
    is_tn = g.coeffs[:-1] == (0,) * ring.n
    claims = {
        "C equals C~ (q odd, g = t^n)": (C == Ct) if (q % 2 and is_tn and C is not None) else None,
        "C~ exceeds C (q even, g not squarefree)": (Ct > C) if (q % 2 == 0 and not sqf and C is not None) else None,
        "X~ components equal square-class index": (comps == idx) if comps is not None else None,
        "X~ connected iff q odd or g squarefree": ((comps == 1) == (q % 2 == 1 or sqf)) if comps is not None else None,
    }
    return ParityRow(q, format_poly(g), sqf, C, Ct, idx, square_class_index_odd_q_stated(ring), comps, claims)


def parity_props_check(rings) -> list[ParityRow]:
    return [parity_row(r) for r in rings]


def odd_q_connectivity_note(C: int | None) -> str:
    """Status line for D_g(0-1) in odd characteristic: evidence only."""
    if C is None:
        return "UNRESOLVED (not computed)"
    if C == 1:
        return "UNRESOLVED in general; computed-connected-only for this example"
    return f"computed {C} components (counterexample to connectedness)"


# -- the neighbourhood bound --

@dataclass(frozen=True)
class BoundReport:
    size_S: int
    size_N0: int
    size_L1: int
    q: int
    lhs: Fraction | None
    rhs: Fraction | None
    status: str  # HOLDS, EQUALITY, VIOLATED or VACUOUS

    @property
    def holds(self) -> bool | None:
        if self.status == "VACUOUS":
            return None
        return self.status != "VIOLATED"

    def describe(self) -> str:
        if self.status == "VACUOUS":
            return "S is empty: bound vacuous"
        rel = {"HOLDS": ">", "EQUALITY": "=", "VIOLATED": "<"}[self.status]
        return f"|N0(S)|/|S| = {self.lhs} {rel} {self.rhs} : {self.status}"


def morgenstern_bound_check(graph01: LevelledGraph, S) -> BoundReport:
    """|N_0(S)|/|S| >= q|L_1| / ((q-3)|S| + 4|L_1|), both sides exact."""
    S = sorted({int(v) for v in S})
    q = graph01.q
    L1 = len(graph01.level(1))
    if not S:
        return BoundReport(0, 0, L1, q, None, None, "VACUOUS")
    N0 = neighborhood_N0(graph01, S)
    lhs = Fraction(len(N0), len(S))
    rhs = Fraction(q * L1, (q - 3) * len(S) + 4 * L1)
    status = "EQUALITY" if lhs == rhs else ("HOLDS" if lhs > rhs else "VIOLATED")
    return BoundReport(len(S), len(N0), L1, q, lhs, rhs, status)


def expected_component_status(q: int) -> str:
    """Status of the bound when S is one component's level 1 in a disconnected graph.

    Components all have the same size, so lhs = q/(q+1) while |S| = |L_1|/m for
    m > 1 components; rhs exceeds lhs exactly when (q-3)(1 - 1/m) > 0.
    """
    return "VIOLATED" if q > 3 else ("EQUALITY" if q == 3 else "HOLDS")


def bound_refutation(ring: RgCtx, variant: Variant | str = Variant.PGL_M,
                     budget: int = TABLE1_VERTEX_BUDGET) -> tuple[BoundReport, BoundReport, int]:
    """(component report, whole-level report, number of components) for the 0-1 subgraph."""
    full = build_graph(ring, variant, mode="full", levels=2, budget=budget)
    g01 = subgraph_01(full)
    comp_S = component_vertices(g01, int(g01.components[0]), level=1)
    return (morgenstern_bound_check(g01, comp_S), morgenstern_bound_check(g01, list(g01.level(1))),
            g01.num_components)


__all__ = [
    "FormulaReport", "formula_report", "brute_force_orders", "enumerate_orders", "IndexResult",
    "component_index", "conjectured_C", "conjectured_C_tilde", "Table1Row", "table1_row",
    "conjecture_check", "format_table1", "format_power", "STReport", "st_identity_check",
    "ParityRow", "parity_row", "parity_props_check", "odd_q_connectivity_note", "BoundReport",
    "morgenstern_bound_check", "bound_refutation", "expected_component_status", "reference_counts", "subgroup_order",
]
