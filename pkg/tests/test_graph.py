import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphhodge.errors import DanglingEndpointError, DuplicateIdError
from graphhodge.graph import HalfEdge, build_graph, integer_rank


def test_single_edge_half_edges():
    g = build_graph(["a", "b"], [("e", "a", "b")])
    assert g.half_edges() == (HalfEdge("a", "e", +1), HalfEdge("b", "e", -1))


def test_no_edges_no_half_edges():
    g = build_graph(["a"], [])
    assert g.half_edges() == ()


def test_self_loop_two_half_edges_opposite_signs():
    g = build_graph(["a"], [("e", "a", "a")])
    hs = g.half_edges()
    assert len(hs) == 2
    assert sorted(h.sign for h in hs) == [-1, 1]
    assert all(h.vertex == "a" and h.edge == "e" for h in hs)
    # forced by the orientation convention: the loop column of the
    # boundary map vanishes, so b0 = b1 = 1
    assert g.betti_numbers() == (1, 1)


def test_single_edge_boundary_column():
    g = build_graph(["a", "b"], [("e", "a", "b")])
    d = g.boundary_matrix()
    assert d.tolist() == [[-1], [1]]


def test_theta_graph_betti():
    g = build_graph(["a", "b"], [("e1", "a", "b"), ("e2", "a", "b"), ("e3", "a", "b")])
    d = g.boundary_matrix()
    assert integer_rank(d) == 1
    assert g.betti_numbers() == (1, 2)


def test_duplicate_ids_rejected():
    with pytest.raises(DuplicateIdError):
        build_graph(["a", "a"], [])
    with pytest.raises(DuplicateIdError):
        build_graph(["a", "b"], [("e", "a", "b"), ("e", "b", "a")])


def test_dangling_endpoint_rejected():
    with pytest.raises(DanglingEndpointError):
        build_graph(["a"], [("e", "a", "b")])


def test_rank_nullity_exact():
    g = build_graph(["a", "b", "c"], [("e1", "a", "b"), ("e2", "b", "c"), ("e3", "c", "a")])
    d = g.boundary_matrix()
    r = integer_rank(d)
    b0, b1 = g.betti_numbers()
    assert r + b1 == len(g.edges)
    assert b0 == len(g.connected_components())


@given(st.permutations(list(range(4))), st.permutations(list(range(5))))
def test_reordering_inputs_is_permutation_equivalent(vperm, eperm):
    verts = ["v0", "v1", "v2", "v3"]
    edges = [("e0", "v0", "v1"), ("e1", "v1", "v2"), ("e2", "v2", "v3"),
             ("e3", "v3", "v0"), ("e4", "v1", "v1")]
    g1 = build_graph(verts, edges)
    g2 = build_graph([verts[i] for i in vperm], [edges[i] for i in eperm])
    assert g1.betti_numbers() == g2.betti_numbers()
    assert integer_rank(g1.boundary_matrix()) == integer_rank(g2.boundary_matrix())
    # canonical ordering makes the matrices literally equal
    assert np.array_equal(g1.boundary_matrix(), g2.boundary_matrix())


def test_disconnected_components_counted():
    g = build_graph(["a", "b", "c"], [("e", "a", "b")])
    assert not g.is_connected()
    assert g.betti_numbers()[0] == 2
