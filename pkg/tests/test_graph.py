import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from btquot.analysis import component_index
from btquot.formulas import cusp_count, group_orders, level_size, level_size_printed, subgroup_order
from btquot.graph import (BudgetExceeded, GraphError, UnionFind, build_graph, component_count,
                          component_count_both, component_subgraph, component_vertices, cusp_annotations,
                          degree_profile_violations, neighborhood_N0, subgraph_01)
from btquot.groups import Mat2, Variant
from btquot.iso import iso_check
from btquot.ring import ring_from_text, square_class_index

GRID = [(q, g) for q in (2, 3, 4) for g in ("t", "t^2", "t^3", "t^2+t", "t^2+t+1")]


def graph(q, g, variant=Variant.SL2, **kw):
    return build_graph(ring_from_text(q, g), variant, **kw)


def test_union_find():
    uf = UnionFind(6)
    uf.union(0, 3)
    uf.union(4, 5)
    uf.union(3, 5)
    assert uf.find(0) == uf.find(4)
    assert uf.labels().tolist() == [0, 1, 2, 0, 0, 0]


def test_examples():
    g1 = graph(2, "t")
    assert g1.level_sizes == [1] and g1.cusp_count == 3 and len(g1.edges) == 0
    g2 = graph(2, "t^2")
    assert g2.level_sizes == [8, 12] and g2.num_components == 1 and len(g2.edges) == 24
    g3 = graph(2, "t^3")
    assert g3.level_sizes == [64, 96, 48] and g3.num_components == 1
    assert graph(3, "t^2").level_sizes == [27, 36]


@pytest.mark.parametrize("q,g", GRID)
@pytest.mark.parametrize("variant", list(Variant))
def test_grid_structure(q, g, variant):
    gr = graph(q, g, variant)
    R = gr.ring
    assert degree_profile_violations(gr) == []
    lev = gr.vertex_level
    assert np.all(lev[gr.edges[:, 1]] == lev[gr.edges[:, 0]] + 1)
    H = group_orders(R).sl2
    assert gr.level_sizes == [H // subgroup_order(R, i) for i in range(R.n)]
    assert gr.level_sizes == [level_size(R, i) for i in range(R.n)]
    assert gr.cusp_count == cusp_count(R) == H // ((q - 1) * q ** R.n)
    if R.n >= 2:
        assert gr.cusp_count == gr.level_sizes[-1]
    if variant is Variant.SL2:
        assert gr.num_components == 1
    elif variant is Variant.PGL_M:
        assert gr.num_components == square_class_index(R)
    uf, quotient = component_count_both(gr)
    assert uf == quotient == gr.num_components


def test_level_size_printed_variant_differs_for_t_powers():
    for q, n in [(2, 1), (2, 2), (3, 2), (2, 3)]:
        R = ring_from_text(q, f"t^{n}")
        assert level_size(R, n) == (q + 1) * q ** (2 * (n - 1))
        assert level_size_printed(R, n) * q == level_size(R, n)


@pytest.mark.parametrize("q,g", [(2, "t^2"), (2, "t^3"), (3, "t^2+t"), (4, "t^2"), (2, "t^3+t^2")])
@pytest.mark.parametrize("variant", [Variant.SL2, Variant.PGL_M])
def test_identity_mode_agrees_with_full(q, g, variant):
    full = graph(q, g, variant)
    ident = graph(q, g, variant, mode="identity")
    assert component_count(ident) == full.num_components
    comp = component_vertices(full, int(full.components[0]))
    assert sorted(full.keys[comp].tolist()) == sorted(ident.keys.tolist())


@pytest.mark.parametrize("q,g", [(2, "t^2"), (2, "t^3"), (2, "t^4"), (3, "t^2"), (4, "t^2"), (2, "t^3+t^2")])
@pytest.mark.parametrize("variant", [Variant.SL2, Variant.PGL_M])
def test_subgraph01_components_equal_closure_index(q, g, variant):
    R = ring_from_text(q, g)
    g01 = subgraph_01(build_graph(R, variant, levels=2))
    res = component_index(R, variant, paths=("closure",))
    assert g01.num_components == res.closure


def test_subgraph01_examples():
    assert subgraph_01(graph(2, "t^3")).num_components == 4
    assert subgraph_01(graph(2, "t^3", Variant.PGL_M)).num_components == 8
    assert subgraph_01(graph(4, "t^2", Variant.PGL_M)).num_components == 4
    with pytest.raises(GraphError):
        subgraph_01(graph(2, "t"))


def test_neighbourhoods():
    g01 = subgraph_01(graph(4, "t^2", Variant.PGL_M))
    assert neighborhood_N0(g01, []) == set()
    assert neighborhood_N0(g01, list(g01.level(1))) == set(g01.level(0))
    label = int(g01.components[0])
    S = component_vertices(g01, label, level=1)
    N = neighborhood_N0(g01, S)
    assert N == set(component_vertices(g01, label, level=0))
    assert len(N) * 5 == len(S) * 4
    with pytest.raises(GraphError):
        neighborhood_N0(g01, [0])


@pytest.mark.parametrize("q,g", [(2, "t^2"), (2, "t^3"), (4, "t^2"), (4, "t^3")])
def test_components_pairwise_isomorphic(q, g):
    gr = graph(q, g, Variant.PGL_M)
    assert gr.num_components > 1
    first = component_subgraph(gr, 0)
    for label in range(1, gr.num_components):
        assert iso_check(first, component_subgraph(gr, label)).isomorphic


@pytest.mark.parametrize("q,g,variant", [(2, "t", Variant.SL2), (2, "t^2", Variant.SL2), (3, "t^2", Variant.SL2),
                                         (2, "t^2", Variant.PGL_M), (3, "t^2+t", Variant.PGL_BAR)])
def test_cusp_annotations(q, g, variant):
    gr = graph(q, g, variant)
    R = gr.ring
    ann = cusp_annotations(gr)
    assert len(ann) == gr.cusp_count == cusp_count(R)
    top = gr.level(gr.num_levels - 1)
    G = gr.group
    for a in ann:
        assert a.vertex in top
        assert a.witness_flagged == (variant is not Variant.SL2)
        if a.witness is None:
            continue
        red = Mat2(*(R.reduce(e) for e in a.witness.entries()))
        assert G.canonical_coset_key(G.canonical_scale(red), R.n).value == a.cusp_key
        assert [a.stabilizer_size(i, q, R.n) for i in range(R.n, R.n + 3)] == [q, q * q, q ** 3]
    # a coset holds a determinant-1 matrix iff its determinant class is trivial
    with_witness = sum(a.witness is not None for a in ann)
    classes = square_class_index(R) if variant is Variant.PGL_M else 1
    assert with_witness * classes == len(ann)
    per_vertex = np.bincount([a.vertex - top.start for a in ann], minlength=len(top))
    assert set(per_vertex.tolist()) == ({q + 1} if R.n == 1 else {1})


def test_errors():
    R = ring_from_text(2, "t^3")
    with pytest.raises(BudgetExceeded):
        build_graph(R, budget=100)
    with pytest.raises(GraphError):
        build_graph(R, mode="sideways")
    with pytest.raises(GraphError):
        build_graph(R, budget=0)


def brute_up_keys(G, key, i):
    """Keys of the level-(i+1) cosets meeting the level-i coset with this key."""
    h = G.decode(key)
    return sorted({G.canonical_coset_key(G.mul(h, Mat2(*map(int, x))), i + 1).value for x in G.subgroup(i)})


@settings(max_examples=40)
@given(data=st.data())
def test_edges_match_brute_force(data):
    q, g = data.draw(st.sampled_from([(2, "t^2"), (2, "t^3"), (3, "t^2"), (3, "t^2+t"), (4, "t^2")]))
    variant = data.draw(st.sampled_from(list(Variant)))
    gr = graph(q, g, variant)
    i = data.draw(st.integers(0, gr.num_levels - 2))
    v = data.draw(st.sampled_from(list(gr.level(i))))
    up = sorted(int(gr.keys[w]) for w in gr.neighbours(v) if w > v)
    assert up == brute_up_keys(gr.group, int(gr.keys[v]), i)


def test_build_is_deterministic():
    a = graph(3, "t^2+t", Variant.PGL_M)
    b = build_graph(ring_from_text(3, "t^2+t"), "pgl-m")
    assert np.array_equal(a.keys, b.keys) and np.array_equal(a.edges, b.edges)
