"""Finite oriented graphs with half-edges and simplicial boundary maps.

A graph here is the combinatorial skeleton of a surface decomposed along
disjoint cross-section circles: vertices name the thick pieces, edges name
the circles, and each edge carries an orientation (tail -> head).  Every
edge endpoint contributes a half-edge with a sign: +1 at the tail, -1 at
the head.  Self-loops are allowed and contribute two half-edges of
opposite sign at the same vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DanglingEndpointError, DuplicateIdError


@dataclass(frozen=True)
class EdgeSpec:
    id: str
    tail: str
    head: str
    cross_section: str = ""


@dataclass(frozen=True)
class HalfEdge:
    """A pair (vertex, edge) with sign +1 at the tail, -1 at the head."""

    vertex: str
    edge: str
    sign: int


class Graph:
    """Immutable oriented graph with canonical id-sorted orderings.

    Vertex and edge orderings are fixed lexicographically at construction
    so every matrix derived from the graph is reproducible across runs.
    """

    def __init__(self, vertices, edges):
        self.vertices = tuple(sorted(vertices))
        self.edges = tuple(sorted(edges, key=lambda e: e.id))
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        self._eindex = {e.id: i for i, e in enumerate(self.edges)}

    # -- lookups -------------------------------------------------------
    def vertex_index(self, v: str) -> int:
        return self._vindex[v]

    def edge_index(self, eid: str) -> int:
        return self._eindex[eid]

    def edge(self, eid: str) -> EdgeSpec:
        return self.edges[self._eindex[eid]]

    def half_edges(self) -> tuple[HalfEdge, ...]:
        """All half-edges, edge-major, tail before head."""
        out = []
        for e in self.edges:
            out.append(HalfEdge(e.tail, e.id, +1))
            out.append(HalfEdge(e.head, e.id, -1))
        return tuple(out)

    def half_edges_at(self, v: str) -> tuple[HalfEdge, ...]:
        return tuple(h for h in self.half_edges() if h.vertex == v)

    def degree(self, v: str) -> int:
        return len(self.half_edges_at(v))

    # -- topology ------------------------------------------------------
    def boundary_matrix(self) -> np.ndarray:
        """Simplicial boundary C_1 -> C_0 as an integer matrix.

        The column of edge (v, v') is (unit at v') - (unit at v); a
        self-loop column is identically zero.
        """
        m = np.zeros((len(self.vertices), len(self.edges)), dtype=np.int64)
        for j, e in enumerate(self.edges):
            m[self._vindex[e.head], j] += 1
            m[self._vindex[e.tail], j] -= 1
        return m

    def betti_numbers(self) -> tuple[int, int]:
        """(b0, b1) of the graph, exact integers."""
        d = self.boundary_matrix()
        r = integer_rank(d)
        b0 = len(self.vertices) - r
        b1 = len(self.edges) - r
        return b0, b1

    def connected_components(self) -> list[set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for e in self.edges:
            adj[e.tail].add(e.head)
            adj[e.head].add(e.tail)
        seen: set[str] = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return len(self.connected_components()) <= 1


def build_graph(vertices, edges) -> Graph:
    """Validate ids and endpoints and return a canonical Graph.

    ``edges`` entries may be EdgeSpec instances or (id, tail, head[,
    cross_section]) tuples.
    """
    vlist = list(vertices)
    if len(set(vlist)) != len(vlist):
        raise DuplicateIdError("duplicate vertex id")
    especs = []
    for e in edges:
        if not isinstance(e, EdgeSpec):
            e = EdgeSpec(*e)
        especs.append(e)
    eids = [e.id for e in especs]
    if len(set(eids)) != len(eids):
        raise DuplicateIdError("duplicate edge id")
    vset = set(vlist)
    for e in especs:
        if e.tail not in vset or e.head not in vset:
            raise DanglingEndpointError(f"edge {e.id} has undeclared endpoint")
    return Graph(vlist, especs)


def integer_rank(m: np.ndarray) -> int:
    """Exact rank of an integer matrix via Gaussian elimination over Q."""
    rows = [[Fraction(int(x)) for x in row] for row in m]
    rank = 0
    ncols = m.shape[1] if m.ndim == 2 else 0
    for col in range(ncols):
        pivot = None
        for i in range(rank, len(rows)):
            if rows[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        inv = 1 / pr[col]
        rows[rank] = [x * inv for x in pr]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank
