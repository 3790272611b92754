"""Levelled coset graphs: vertices hH_i on levels 0..top, edges between cosets that meet.

Vertices are left cosets keyed by their least canonical element. Neighbours
of hH_i at level j are the cosets h t H_j with t running through a transversal
of H_i / (H_i n H_j), so every vertex has exactly |H_i : H_i n H_j| distinct
neighbours at level j.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .formulas import cusp_count as cusp_count_formula
from .formulas import level_size
from .groups import Mat2, MatrixGroup, Variant, matrix_group, sl2_lift
from .ring import RgCtx
from .snf import PolyMat2

DEFAULT_VERTEX_BUDGET = 1 << 22
MODES = ("identity", "full")


class GraphError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Construction stopped because the vertex budget ran out."""

    def __init__(self, budget: int, stats: dict):
        super().__init__(f"vertex budget {budget} exceeded ({stats})")
        self.budget = budget
        self.stats = stats


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def labels(self) -> np.ndarray:
        """Component labels numbered by first appearance."""
        out = np.empty(len(self.parent), dtype=np.int64)
        seen: dict[int, int] = {}
        for v in range(len(self.parent)):
            out[v] = seen.setdefault(self.find(v), len(seen))
        return out


def component_labels(nvert: int, edges: np.ndarray) -> np.ndarray:
    uf = UnionFind(nvert)
    for a, b in edges.tolist():
        uf.union(a, b)
    return uf.labels()


@dataclass(eq=False)
class LevelledGraph:
    variant: Variant
    ring: RgCtx
    mode: str
    offsets: np.ndarray  # vertices of level i are offsets[i]:offsets[i+1]
    keys: np.ndarray  # coset key value per vertex
    edges: np.ndarray  # (E, 2), lower level endpoint first, sorted
    components: np.ndarray
    cusp_count: int
    meta: dict = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.ring.q

    @property
    def n(self) -> int:
        return self.ring.n

    @property
    def num_levels(self) -> int:
        return len(self.offsets) - 1

    @property
    def num_vertices(self) -> int:
        return int(self.offsets[-1])

    @property
    def level_sizes(self) -> list[int]:
        return [int(x) for x in np.diff(self.offsets)]

    def level(self, i: int) -> range:
        return range(int(self.offsets[i]), int(self.offsets[i + 1]))

    @cached_property
    def vertex_level(self) -> np.ndarray:
        return np.repeat(np.arange(self.num_levels), np.diff(self.offsets))

    @property
    def num_components(self) -> int:
        return int(self.components.max()) + 1 if len(self.components) else 0

    @property
    def group(self) -> MatrixGroup:
        return matrix_group(self.ring, self.variant)

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR (indptr, indices) with neighbours in increasing id order."""
        nv = self.num_vertices
        both = np.concatenate([self.edges, self.edges[:, ::-1]]) if len(self.edges) else np.empty((0, 2), np.int64)
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        indptr = np.zeros(nv + 1, dtype=np.int64)
        np.add.at(indptr, both[:, 0] + 1, 1)
        return np.cumsum(indptr), both[:, 1].copy()

    def neighbours(self, v: int) -> np.ndarray:
        indptr, idx = self.adjacency
        return idx[indptr[v]:indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        indptr, _ = self.adjacency
        return np.diff(indptr)

    def key_hex(self, v: int) -> str:
        return int(self.keys[v]).to_bytes(self.group.key_bytes, "big").hex()

    def representative(self, v: int) -> Mat2:
        return self.group.decode(int(self.keys[v]))

    def vertex_id(self, level: int, key: int) -> int | None:
        rng = self.level(level)
        block = self.keys[rng.start:rng.stop]
        order = self._level_orders[level]
        pos = np.searchsorted(block[order], key)
        if pos < len(order) and block[order[pos]] == key:
            return rng.start + int(order[pos])
        return None

    @cached_property
    def _level_orders(self) -> list[np.ndarray]:
        return [np.argsort(self.keys[r.start:r.stop], kind="stable") for r in map(self.level, range(self.num_levels))]

    def summary(self) -> dict:
        return {
            "q": self.q,
            "g": _gtext(self.ring),
            "variant": self.variant.value,
            "mode": self.mode,
            "level_sizes": self.level_sizes,
            "edges": int(len(self.edges)),
            "components": self.num_components,
            "cusp_count": self.cusp_count,
        }


def _gtext(ring: RgCtx) -> str:
    from .poly import format_poly
    return format_poly(ring.g)


# -- construction --

def _lookup(sorted_keys: np.ndarray, perm: np.ndarray, keys: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(sorted_keys, keys)
    pos = np.minimum(pos, len(sorted_keys) - 1)
    if not np.array_equal(sorted_keys[pos], keys):
        raise AssertionError("neighbour coset missing from its level")
    return perm[pos]


def _check_distinct(nbr: np.ndarray, what: str):
    """Each row must list distinct cosets: the coset graph is simple."""
    if nbr.shape[1] > 1:
        srt = np.sort(nbr, axis=1)
        if np.any(srt[:, 1:] == srt[:, :-1]):
            raise AssertionError(f"repeated {what} neighbour: graph would not be simple")


def _neighbour_keys(group: MatrixGroup, keys: np.ndarray, i: int, j: int) -> np.ndarray:
    """Keys at level j of the neighbours of the level-i cosets with the given keys; (N, T)."""
    reps = group_decode(group, keys)
    T = group.transversal(i, j)
    return group.coset_key_values(reps, j, right=T)[:, 0, :]


def group_decode(group: MatrixGroup, keys: np.ndarray) -> np.ndarray:
    from .kernels import decode
    return decode(np.asarray(keys, dtype=np.int64), group.r)


def _orbit(group: MatrixGroup, level: int, gens: np.ndarray, limit: int, chunk: int = 1 << 14) -> np.ndarray:
    """Keys of the whole coset space H / H_level in discovery order."""
    start = group.coset_key_values(np.array([group.identity], dtype=np.int64), level)[0, 0, 0]
    found = [np.array([start], dtype=np.int64)]
    known = found[0].copy()
    frontier = found[0]
    while frontier.size:
        fresh = []
        for s in range(0, frontier.size, chunk):
            reps = group_decode(group, frontier[s:s + chunk])
            vals = group.coset_key_values(reps, level, left=gens)[:, :, 0].ravel()
            fresh.append(vals)
        new = np.unique(np.concatenate(fresh))
        new = new[~np.isin(new, known, assume_unique=True)]
        known = np.union1d(known, new)
        if known.size > limit:
            raise BudgetExceeded(limit, {"level": level, "found": int(known.size)})
        found.append(new)
        frontier = new
    return np.concatenate(found)


def build_graph(ring: RgCtx, variant: Variant | str = Variant.SL2, mode: str = "full",
                levels: int | None = None, budget: int = DEFAULT_VERTEX_BUDGET) -> LevelledGraph:
    """Build the levelled coset graph on levels 0..top, top = min(levels, n) - 1.

    ``full`` enumerates every level as an orbit under left multiplication by
    generators of the whole group; ``identity`` explores only the component of
    the identity coset at level 0.
    """
    if mode not in MODES:
        raise GraphError(f"unknown mode {mode!r}; expected one of {MODES}")
    group = matrix_group(ring, variant)
    n = ring.n
    top = n - 1 if levels is None else min(levels, n) - 1
    if top < 0:
        raise GraphError("need at least one level")
    if budget <= 0:
        raise GraphError("budget must be positive")
    nlev = top + 1
    if mode == "full":
        expected = sum(level_size(ring, i) for i in range(nlev))
        if expected > budget:
            raise BudgetExceeded(budget, {"expected_vertices": expected})
        gens = np.array(group.full_generators(), dtype=np.int64)
        level_keys = [_orbit(group, i, gens, budget) for i in range(nlev)]
        up_keys = [None] * nlev
    else:
        level_keys, up_keys = _identity_component(group, nlev, budget)

    offsets = np.zeros(nlev + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(k) for k in level_keys])
    keys = np.concatenate(level_keys)
    sorted_levels = []
    for i, k in enumerate(level_keys):
        perm = np.argsort(k, kind="stable")
        sorted_levels.append((k[perm], perm + offsets[i]))

    edge_blocks = []
    for i in range(top):
        nbr = up_keys[i] if up_keys[i] is not None else _neighbour_keys(group, level_keys[i], i, i + 1)
        _check_distinct(nbr, "upward")
        lower = np.repeat(np.arange(offsets[i], offsets[i + 1]), nbr.shape[1])
        upper = _lookup(*sorted_levels[i + 1], nbr.ravel())
        edge_blocks.append(np.stack([lower, upper], axis=1))
    edges = np.concatenate(edge_blocks) if edge_blocks else np.empty((0, 2), dtype=np.int64)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    components = component_labels(int(offsets[-1]), edges)

    cusps = 0
    if top == n - 1:
        cusps = _cusp_keys(group, level_keys[top], top).size
    graph = LevelledGraph(group.variant, ring, mode, offsets, keys, edges, components, cusps,
                          meta={"top_level": top})
    check_structure(graph)
    return graph


def _identity_component(group: MatrixGroup, nlev: int, budget: int):
    """Breadth-first search from the identity coset at level 0, levels 0..nlev-1.

    Returns the keys per level in discovery order and, per level, the upward
    neighbour keys of those vertices (row-aligned), reused for the edges.
    """
    start = group.coset_key_values(np.array([group.identity], dtype=np.int64), 0)[0, 0, 0]
    found: list[list[np.ndarray]] = [[] for _ in range(nlev)]
    ups: list[list[np.ndarray]] = [[] for _ in range(nlev)]
    known = [np.empty(0, dtype=np.int64) for _ in range(nlev)]
    frontier: list[np.ndarray] = [np.empty(0, dtype=np.int64) for _ in range(nlev)]
    frontier[0] = np.array([start], dtype=np.int64)
    total = 0
    while any(f.size for f in frontier):
        discovered: list[list[np.ndarray]] = [[] for _ in range(nlev)]
        for i, fr in enumerate(frontier):
            if not fr.size:
                continue
            found[i].append(fr)
            known[i] = np.union1d(known[i], fr)
            total += fr.size
            if total > budget:
                raise BudgetExceeded(budget, {"found": total, "per_level": [int(k.size) for k in known]})
            if i > 0:
                discovered[i - 1].append(_neighbour_keys(group, fr, i, i - 1).ravel())
            if i + 1 < nlev:
                up = _neighbour_keys(group, fr, i, i + 1)
                ups[i].append(up)
                discovered[i + 1].append(up.ravel())
        # every frontier of this round is already merged into known
        frontier = []
        for j in range(nlev):
            if discovered[j]:
                cand = np.unique(np.concatenate(discovered[j]))
                frontier.append(cand[~np.isin(cand, known[j], assume_unique=True)])
            else:
                frontier.append(np.empty(0, dtype=np.int64))
    level_keys = [np.concatenate(f) if f else np.empty(0, dtype=np.int64) for f in found]
    up_keys = [np.concatenate(u) if u else None for u in ups]
    return level_keys, up_keys


def _cusp_keys(group: MatrixGroup, top_keys: np.ndarray, top: int) -> np.ndarray:
    """Distinct cusp-level cosets hanging off the top core level."""
    n = group.ring.n
    return np.unique(_neighbour_keys(group, top_keys, top, n))


# -- structural checks --

def check_structure(graph: LevelledGraph):
    """Edges join consecutive levels only, and degrees follow the level profile."""
    lev = graph.vertex_level
    e = graph.edges
    if len(e):
        if not np.all(lev[e[:, 1]] == lev[e[:, 0]] + 1):
            raise AssertionError("edge outside consecutive levels")
        if np.any((lev[e[:, 0]] + lev[e[:, 1]]) % 2 == 0):
            raise AssertionError("edge inside a parity class")
        if len(np.unique(e, axis=0)) != len(e):
            raise AssertionError("multi-edge")
    if graph.mode == "full":
        for row in degree_profile_violations(graph):
            raise AssertionError(f"degree profile violated: {row}")


def expected_degrees(q: int, n: int, i: int, top: int) -> tuple[int, int]:
    """(down, up) degree of a level-i vertex in a graph truncated at level top."""
    down = 0 if i == 0 else q
    if i == top:
        up = 0
    else:
        up = q + 1 if i == 0 else 1
    return down, up


def degree_profile_violations(graph: LevelledGraph) -> list[tuple[int, int, int, int]]:
    """List (vertex, level, down, up) for vertices off the expected profile."""
    up = np.bincount(graph.edges[:, 0], minlength=graph.num_vertices) if len(graph.edges) else np.zeros(graph.num_vertices, int)
    down = np.bincount(graph.edges[:, 1], minlength=graph.num_vertices) if len(graph.edges) else np.zeros(graph.num_vertices, int)
    top = graph.num_levels - 1
    bad = []
    for i in range(graph.num_levels):
        ed, eu = expected_degrees(graph.q, graph.n, i, top)
        rng = graph.level(i)
        sel = np.flatnonzero((down[rng.start:rng.stop] != ed) | (up[rng.start:rng.stop] != eu)) + rng.start
        bad.extend((int(v), i, int(down[v]), int(up[v])) for v in sel[:10])
    return bad


# -- derived graphs and counts --

def induced_levels(graph: LevelledGraph, lo: int, hi: int) -> LevelledGraph:
    """Subgraph induced by levels lo..hi, renumbered from zero."""
    if not 0 <= lo <= hi < graph.num_levels:
        raise GraphError(f"levels {lo}..{hi} not in graph with {graph.num_levels} levels")
    start, stop = int(graph.offsets[lo]), int(graph.offsets[hi + 1])
    offsets = graph.offsets[lo:hi + 2] - start
    e = graph.edges
    mask = (e[:, 0] >= start) & (e[:, 1] < stop) & (e[:, 0] < stop) & (e[:, 1] >= start)
    edges = e[mask] - start
    comps = component_labels(stop - start, edges)
    cusps = graph.cusp_count if hi == graph.n - 1 else 0
    return LevelledGraph(graph.variant, graph.ring, graph.mode, offsets, graph.keys[start:stop].copy(),
                         edges, comps, cusps, meta={**graph.meta, "induced": (lo, hi)})


def component_subgraph(graph: LevelledGraph, label: int) -> LevelledGraph:
    """The component with the given label as a graph of its own (ids kept in order)."""
    sel = np.flatnonzero(graph.components == label)
    if not len(sel):
        raise GraphError(f"no component labelled {label}")
    new_id = np.full(graph.num_vertices, -1, dtype=np.int64)
    new_id[sel] = np.arange(len(sel))
    counts = np.bincount(graph.vertex_level[sel], minlength=graph.num_levels)
    offsets = np.zeros(graph.num_levels + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(counts)
    e = graph.edges
    edges = new_id[e[np.isin(e[:, 0], sel)]]
    comps = np.zeros(len(sel), dtype=np.int64)
    return LevelledGraph(graph.variant, graph.ring, graph.mode, offsets, graph.keys[sel].copy(), edges,
                         comps, 0, meta={**graph.meta, "component": int(label)})


def subgraph_01(graph: LevelledGraph) -> LevelledGraph:
    if graph.n < 2:
        raise GraphError("the level 0-1 subgraph needs deg g >= 2")
    if graph.num_levels < 2:
        raise GraphError("graph has no level 1")
    return induced_levels(graph, 0, 1)


def component_count(graph: LevelledGraph) -> int:
    """Connected components of the whole coset graph on the graph's levels.

    Full mode: union-find on the built graph. Identity mode: the components
    are translates of each other, so the count is |L_0| / (level-0 vertices found).
    """
    if graph.mode == "full":
        return graph.num_components
    if graph.num_components != 1:
        raise AssertionError("identity-mode graph is not connected")
    total = level_size(graph.ring, 0)
    found = len(graph.level(0))
    if total % found:
        raise AssertionError(f"|L_0| = {total} is not a multiple of the component share {found}")
    return total // found


def component_count_both(graph: LevelledGraph) -> tuple[int, int | None]:
    """(union-find count, identity quotient count) for a full-mode graph."""
    uf = graph.num_components
    if graph.mode != "full":
        return component_count(graph), None
    comp0 = graph.components[0]
    share = int(np.count_nonzero(graph.components[graph.level(0).start:graph.level(0).stop] == comp0))
    quotient = level_size(graph.ring, 0) // share
    if quotient != uf:
        raise AssertionError(f"component count paths disagree: {uf} vs {quotient}")
    return uf, quotient


def neighborhood_N0(graph01: LevelledGraph, S) -> set[int]:
    """Level-0 vertices adjacent to some vertex of S (a set of level-1 ids)."""
    lvl1 = graph01.level(1)
    out: set[int] = set()
    for v in S:
        v = int(v)
        if v not in lvl1:
            raise GraphError(f"vertex {v} is not on level 1")
        out.update(int(u) for u in graph01.neighbours(v) if u < lvl1.start)
    return out


def component_vertices(graph: LevelledGraph, label: int, level: int | None = None) -> list[int]:
    sel = np.flatnonzero(graph.components == label)
    if level is not None:
        rng = graph.level(level)
        sel = sel[(sel >= rng.start) & (sel < rng.stop)]
    return [int(v) for v in sel]


# -- cusps --

@dataclass(frozen=True)
class CuspAnnotation:
    vertex: int  # level n-1 vertex the ray is attached to
    cusp_key: int
    witness: PolyMat2 | None  # s_j in SL2(F_q[t]) reducing into the cusp coset
    witness_flagged: bool  # True for projective variants (witness comes from the SL2 core)
    g_text: str

    def stabilizer_size(self, i: int, q: int, n: int) -> int:
        """|U_i| = q^(i-n+1) at ray position i >= n."""
        if i < n:
            return 1
        return q ** (i - n + 1)

    def describe(self) -> str:
        w = "none" if self.witness is None else str(self.witness)
        return f"vertex {self.vertex}: s U_i s^-1 with U_i = [[1,({self.g_text})*f],[0,1]], deg f <= i-n; s = {w}"


def _det_one_rep(group: MatrixGroup, h: Mat2, level: int) -> Mat2 | None:
    """A determinant-1 matrix in the same coset as h (modulo scalars and H_level)."""
    ring = group.ring
    if group.variant is Variant.SL2:
        return h
    for c in ring.field_units():
        hc = group.mul(h, Mat2(c, 0, 0, 1))
        dc = group.det(hc)
        for lam in ring.unit_codes:
            if ring.mul(ring.mul(lam, lam), dc) == 1:
                cand = group.scale(lam, hc)
                if group.canonical_coset_key(cand, level) == group.canonical_coset_key(h, level):
                    return cand
    return None


def cusp_annotations(graph: LevelledGraph, limit: int | None = None) -> list[CuspAnnotation]:
    """One annotation per ray, with an SL2(F_q[t]) conjugator witness."""
    top = graph.num_levels - 1
    if top != graph.n - 1:
        raise GraphError("cusps hang off level n-1, which this graph does not contain")
    if graph.mode == "identity" and graph.num_components != 1:
        raise GraphError("identity-mode graph with several components")
    group = graph.group
    n = graph.n
    rng = graph.level(top)
    keys = graph.keys[rng.start:rng.stop]
    nbr = _neighbour_keys(group, keys, top, n)
    out = []
    g_text = _gtext(graph.ring)
    for row, v in enumerate(rng):
        for ck in nbr[row]:
            if limit is not None and len(out) >= limit:
                return out
            h = group.decode(int(ck))
            rep = _det_one_rep(group, h, n)
            witness = None if rep is None else sl2_lift(graph.ring, rep)
            out.append(CuspAnnotation(v, int(ck), witness, group.variant is not Variant.SL2, g_text))
    return out


def expected_cusp_count(ring: RgCtx) -> int:
    return cusp_count_formula(ring)
