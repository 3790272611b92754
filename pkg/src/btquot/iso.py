"""Level-respecting graph isomorphism by colour refinement with individualisation.

Both graphs are refined together as one disjoint union, so a colour means
the same thing on either side. Colours are derived only from isomorphism
invariant data (level, degree, common-neighbour profile, neighbour colours),
so differing colour-class counts prove non-isomorphism. A mapping is only
reported after every edge has been checked.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

DEFAULT_ISO_BUDGET = 1 << 16  # combined vertices
DEFAULT_NODE_BUDGET = 20000  # search-tree nodes
BRUTE_FORCE_LEVEL_CAP = 10

_M64 = np.uint64(0xFFFFFFFFFFFFFFFF)


class IsoBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Shape:
    """Bare levelled graph: level offsets and an undirected edge list."""

    offsets: np.ndarray
    edges: np.ndarray

    @property
    def num_vertices(self) -> int:
        return int(self.offsets[-1])

    @property
    def levels(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.offsets) - 1), np.diff(self.offsets))


def as_shape(g) -> Shape:
    offsets = np.asarray(g.offsets, dtype=np.int64)
    edges = np.asarray(g.edges, dtype=np.int64).reshape(-1, 2)
    return Shape(offsets, edges)


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    mapping: np.ndarray | None  # mapping[v] = image in the second graph
    nodes: int  # search-tree nodes visited
    reason: str

    def __bool__(self):
        return self.isomorphic


def _splitmix(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (x.astype(np.uint64) + np.uint64(0x9E3779B97F4A7C15)) & _M64
        z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _M64
        z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _M64
        return z ^ (z >> np.uint64(31))


def _csr(nv: int, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    both = np.concatenate([edges, edges[:, ::-1]]) if len(edges) else np.empty((0, 2), np.int64)
    both = both[np.lexsort((both[:, 1], both[:, 0]))]
    indptr = np.zeros(nv + 1, dtype=np.int64)
    np.add.at(indptr, both[:, 0] + 1, 1)
    return np.cumsum(indptr), both[:, 1].copy()


def _relabel(rows: np.ndarray) -> np.ndarray:
    """Colour ids from signature rows; ids depend only on the signatures."""
    _, inv = np.unique(rows, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


def common_neighbour_profile(nv: int, indptr: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Per vertex, a hash of the multiset {|N(v) n N(u)| : u != v at distance 2}."""
    # ordered pairs (u, w) of neighbours of the same middle vertex
    deg = np.diff(indptr)
    pair_u, pair_w = [], []
    for d in np.unique(deg):
        if d < 2:
            continue
        centres = np.flatnonzero(deg == d)
        nb = idx[indptr[centres][:, None] + np.arange(d)[None, :]]  # (C, d)
        a = np.repeat(nb, d, axis=1).ravel()
        b = np.tile(nb, (1, d)).ravel()
        keep = a != b
        pair_u.append(a[keep])
        pair_w.append(b[keep])
    if not pair_u:
        return np.zeros(nv, dtype=np.uint64)
    u = np.concatenate(pair_u)
    w = np.concatenate(pair_w)
    key = u * nv + w
    uniq, counts = np.unique(key, return_counts=True)
    owner = uniq // nv
    prof = np.zeros(nv, dtype=np.uint64)
    with np.errstate(over="ignore"):
        np.add.at(prof, owner, _splitmix(counts.astype(np.uint64)))
    return prof


class _Joint:
    """Disjoint union of two graphs with refinement helpers."""

    def __init__(self, a: Shape, b: Shape):
        self.n1 = a.num_vertices
        self.nv = self.n1 + b.num_vertices
        edges = np.concatenate([a.edges, b.edges + self.n1])
        self.indptr, self.idx = _csr(self.nv, edges)
        self.src = np.repeat(np.arange(self.nv), np.diff(self.indptr))
        levels = np.concatenate([a.levels, b.levels])
        deg = np.diff(self.indptr)
        prof = common_neighbour_profile(self.nv, self.indptr, self.idx)
        self.initial = _relabel(np.stack([levels.astype(np.uint64), deg.astype(np.uint64), prof], axis=1))

    def refine(self, colors: np.ndarray) -> np.ndarray:
        ncol = len(np.unique(colors))
        while True:
            h1 = _splitmix(colors.astype(np.uint64))
            h2 = _splitmix(colors.astype(np.uint64) ^ np.uint64(0x5DEECE66D))
            s1 = np.zeros(self.nv, dtype=np.uint64)
            s2 = np.zeros(self.nv, dtype=np.uint64)
            with np.errstate(over="ignore"):
                np.add.at(s1, self.src, h1[self.idx])
                np.add.at(s2, self.src, h2[self.idx])
            new = _relabel(np.stack([colors.astype(np.uint64), s1, s2], axis=1))
            nnew = int(new.max()) + 1 if len(new) else 0
            if nnew == ncol:
                return new
            colors, ncol = new, nnew

    def balanced(self, colors: np.ndarray) -> bool:
        m = int(colors.max()) + 1 if len(colors) else 0
        return np.array_equal(np.bincount(colors[:self.n1], minlength=m),
                              np.bincount(colors[self.n1:], minlength=m))


def _verify(a: Shape, b: Shape, mapping: np.ndarray) -> bool:
    if sorted(mapping.tolist()) != list(range(b.num_vertices)):
        return False
    if not np.array_equal(a.levels, b.levels[mapping]):
        return False
    img = mapping[a.edges] if len(a.edges) else a.edges
    img = np.sort(img, axis=1)
    ref = np.sort(b.edges, axis=1)
    return np.array_equal(np.unique(img, axis=0), np.unique(ref, axis=0)) and len(a.edges) == len(b.edges)


def iso_check(g1, g2, budget: int = DEFAULT_ISO_BUDGET, node_budget: int = DEFAULT_NODE_BUDGET) -> IsoResult:
    """Decide level-respecting isomorphism; the mapping is edge-verified."""
    a, b = as_shape(g1), as_shape(g2)
    if a.num_vertices + b.num_vertices > budget:
        raise IsoBudgetExceeded(f"{a.num_vertices + b.num_vertices} vertices exceed iso budget {budget}")
    if not np.array_equal(np.diff(a.offsets), np.diff(b.offsets)):
        return IsoResult(False, None, 0, "level sizes differ")
    if len(a.edges) != len(b.edges):
        return IsoResult(False, None, 0, "edge counts differ")
    if a.num_vertices == 0:
        return IsoResult(True, np.empty(0, dtype=np.int64), 0, "empty graphs")
    joint = _Joint(a, b)
    colors = joint.refine(joint.initial)
    if not joint.balanced(colors):
        return IsoResult(False, None, 1, "colour refinement separates the graphs")

    nodes = 0
    n1 = joint.n1

    def search(colors: np.ndarray):
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise IsoBudgetExceeded(f"search exceeded {node_budget} nodes")
        if not joint.balanced(colors):
            return None
        counts = np.bincount(colors[:n1])
        if np.all(counts <= 1):
            mapping = np.empty(n1, dtype=np.int64)
            where2 = np.empty(len(counts), dtype=np.int64)
            where2[colors[n1:]] = np.arange(joint.nv - n1)
            mapping[:] = where2[colors[:n1]]
            return mapping if _verify(a, b, mapping) else None
        sizes = np.where(counts > 1, counts, np.iinfo(np.int64).max)
        target = int(np.argmin(sizes))
        v = int(np.flatnonzero(colors[:n1] == target)[0])
        fresh = int(colors.max()) + 1
        for w in np.flatnonzero(colors[n1:] == target):
            trial = colors.copy()
            trial[v] = fresh
            trial[n1 + int(w)] = fresh
            found = search(joint.refine(trial))
            if found is not None:
                return found
        return None

    mapping = search(colors)
    if mapping is None:
        return IsoResult(False, None, nodes, "exhaustive individualisation found no isomorphism")
    return IsoResult(True, mapping, nodes, "verified mapping")


def brute_force_iso(g1, g2) -> np.ndarray | None:
    """Level-respecting isomorphism by plain backtracking over vertex images.

    Vertices of the first graph are assigned in id order to unused vertices
    of the same level, rejecting any partial map that breaks an edge or a
    non-edge. Only for small graphs.
    """
    a, b = as_shape(g1), as_shape(g2)
    if not np.array_equal(np.diff(a.offsets), np.diff(b.offsets)) or len(a.edges) != len(b.edges):
        return None
    sizes = np.diff(a.offsets)
    if len(sizes) and sizes.max() > BRUTE_FORCE_LEVEL_CAP:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LEVEL_CAP} vertices per level")
    nv = a.num_vertices
    adj_a = [set() for _ in range(nv)]
    adj_b = [set() for _ in range(nv)]
    for u, v in a.edges.tolist():
        adj_a[u].add(v)
        adj_a[v].add(u)
    for u, v in b.edges.tolist():
        adj_b[u].add(v)
        adj_b[v].add(u)
    lev = a.levels.tolist()
    image = [-1] * nv
    used = [False] * nv

    def go(v: int) -> bool:
        if v == nv:
            return True
        lo, hi = int(b.offsets[lev[v]]), int(b.offsets[lev[v] + 1])
        for w in range(lo, hi):
            if used[w] or len(adj_a[v]) != len(adj_b[w]):
                continue
            if all((u in adj_a[v]) == (image[u] in adj_b[w]) for u in range(v)):
                image[v], used[w] = w, True
                if go(v + 1):
                    return True
                image[v], used[w] = -1, False
        return False

    if not go(0):
        return None
    out = np.array(image, dtype=np.int64)
    return out if _verify(a, b, out) else None
