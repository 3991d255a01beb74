"""Discrete cell complexes modeling the stretched surface and its stars.

Pieces (cap / tube / pants) are flat quad/triangle meshes with tagged
boundary circles; assembling a scene inserts a product cylinder of length
2r over every edge of the graph and identifies boundary circles node by
node.  All masses are accumulated from per-face geometry (area shares and
dual-length shares), so boundary cells of an open piece carry exactly the
one-sided weights and gluing two pieces adds the two halves back together
without special cases.

Orientation is carried by the face loops.  Every generator produces loops
that are internally consistent (each interior edge is used twice with
opposite signs); a per-scene sign solve flips whole pieces and cylinders
so the assembled surface is consistently oriented.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (
    BadTopologyError,
    GluingMismatchError,
    OpenBoundaryLeftError,
    ResolutionMismatchError,
    SOutOfRangeError,
)
from .cech import half_edge_slots
from .graph import Graph

# ---------------------------------------------------------------------------
# mesh container
# ---------------------------------------------------------------------------


def _face_id(loop):
    """Canonical content-addressed id: minimal rotation of the loop or its
    reverse, so the id is independent of starting point and orientation."""
    best = None
    for seq in (list(loop), list(reversed(loop))):
        for s in range(len(seq)):
            rot = tuple(seq[s:] + seq[:s])
            if best is None or repr(rot) < repr(best):
                best = rot
    return ("f",) + best


@dataclass
class CircleTag:
    """An open boundary circle ready for gluing.

    ``nodes`` are ordered along the circle direction; ``face_sign`` is the
    sign with which the piece's own faces traverse the circle edges in
    that direction (needed by the orientation solve).
    """

    name: str
    cross_section: str
    nodes: list
    face_sign: int


class MeshData:
    """Mutable mesh under construction: faces as node loops with local
    chart coordinates; everything else (edges, masses) is derived."""

    def __init__(self):
        self.faces: dict = {}          # fid -> (loop nodes tuple, loop coords array)
        self.tags: dict[str, CircleTag] = {}
        self.fibers: dict = {}         # node/face/edge fiber labels, filled at finalize

    def add_face(self, loop, coords):
        fid = _face_id(loop)
        if fid in self.faces:
            raise BadTopologyError(f"duplicate face {fid}")
        self.faces[fid] = (tuple(loop), np.asarray(coords, dtype=float))
        return fid

    def flip_all(self):
        """Reverse the orientation of every face (loops reversed in place)."""
        self.faces = {
            fid: (tuple(reversed(loop)), coords[::-1].copy())
            for fid, (loop, coords) in self.faces.items()
        }
        for tag in self.tags.values():
            tag.face_sign = -tag.face_sign

    def merge(self, other: "MeshData"):
        for fid, val in other.faces.items():
            if fid in self.faces:
                raise GluingMismatchError(f"face collision {fid}")
            self.faces[fid] = val
        self.tags.update(other.tags)


def _polygon_area_center(coords: np.ndarray):
    x, y = coords[:, 0], coords[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    area = 0.5 * abs(np.sum(x * ys - xs * y))
    return area, coords.mean(axis=0)


@dataclass
class CellComplex:
    """Finalized complex: canonical cell orderings, incidence and masses."""

    nodes: list
    edges: list                       # (a, b) node-id pairs, canonical direction
    faces: list
    d0: sp.csr_matrix                 # E x V integer incidence
    d1: sp.csr_matrix                 # F x E integer incidence
    m0: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    node_index: dict = field(repr=False)
    edge_index: dict = field(repr=False)  # keyed by frozen (a, b) pair
    face_index: dict = field(repr=False)
    tags: dict = field(default_factory=dict)
    cylinders: dict = field(default_factory=dict)   # edge id -> CylinderBlock
    vertex_cells: dict = field(default_factory=dict)  # vid -> {dim: [indices]}
    meta: dict = field(default_factory=dict)

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def total_dim(self):
        return self.n_nodes + self.n_edges + self.n_faces

    def euler_characteristic(self) -> int:
        return self.n_nodes - self.n_edges + self.n_faces

    def is_closed(self) -> bool:
        counts = np.asarray(np.abs(self.d1).sum(axis=0)).ravel()
        return bool(np.all(counts == 2))

    def edge_id_for(self, a, b):
        """Edge index and direction sign for the ordered node pair (a, b)."""
        key = (a, b) if repr(a) < repr(b) else (b, a)
        idx = self.edge_index[key]
        return idx, 1 if key == (a, b) else -1

    def blocks(self):
        """(offset per degree) for vectors on the total cochain space."""
        return 0, self.n_nodes, self.n_nodes + self.n_edges

    def split(self, u):
        nv, ne = self.n_nodes, self.n_edges
        return u[:nv], u[nv:nv + ne], u[nv + ne:]

    def mass_vector(self) -> np.ndarray:
        return np.concatenate([self.m0, self.m1, self.m2])


def finalize(mesh: MeshData, meta=None) -> CellComplex:
    """Derive cells, incidence matrices and lumped masses from face loops."""
    node_set = {}
    edge_dirs: dict = {}
    for loop, _ in mesh.faces.values():
        for n in loop:
            node_set[n] = True
    nodes = sorted(node_set, key=repr)
    node_index = {n: i for i, n in enumerate(nodes)}

    # edges from consecutive loop pairs, canonical direction by repr
    for loop, _ in mesh.faces.values():
        k = len(loop)
        for i in range(k):
            a, b = loop[i], loop[(i + 1) % k]
            key = (a, b) if repr(a) < repr(b) else (b, a)
            edge_dirs[key] = True
    edges = sorted(edge_dirs, key=repr)
    edge_index = {e: i for i, e in enumerate(edges)}
    faces = sorted(mesh.faces, key=repr)
    face_index = {f: i for i, f in enumerate(faces)}

    nv, ne, nf = len(nodes), len(edges), len(faces)
    m0 = np.zeros(nv)
    m1_num = np.zeros(ne)
    edge_len = np.full(ne, -1.0)
    m2 = np.zeros(nf)

    rows0, cols0, vals0 = [], [], []
    for (a, b), j in edge_index.items():
        rows0 += [j, j]
        cols0 += [node_index[a], node_index[b]]
        vals0 += [-1, 1]
    d0 = sp.csr_matrix((vals0, (rows0, cols0)), shape=(ne, nv), dtype=np.int64)

    rows1, cols1, vals1 = [], [], []
    for fid in faces:
        loop, coords = mesh.faces[fid]
        fi = face_index[fid]
        area, center = _polygon_area_center(coords)
        if area <= 0:
            raise BadTopologyError(f"degenerate face {fid}")
        m2[fi] = 1.0 / area
        k = len(loop)
        share = area / k
        for i in range(k):
            a, b = loop[i], loop[(i + 1) % k]
            pa, pb = coords[i], coords[(i + 1) % k]
            m0[node_index[a]] += share
            key = (a, b) if repr(a) < repr(b) else (b, a)
            j = edge_index[key]
            length = float(np.linalg.norm(pb - pa))
            if edge_len[j] < 0:
                edge_len[j] = length
            elif abs(edge_len[j] - length) > 1e-9 * max(1.0, length):
                raise GluingMismatchError(
                    f"edge {key} has inconsistent length across faces")
            mid = 0.5 * (pa + pb)
            m1_num[j] += float(np.linalg.norm(center - mid))
            sign = 1 if key == (a, b) else -1
            rows1.append(fi)
            cols1.append(j)
            vals1.append(sign)
    d1 = sp.csr_matrix((vals1, (rows1, cols1)), shape=(nf, ne), dtype=np.int64)

    if np.any(edge_len <= 0):
        raise BadTopologyError("edge with nonpositive length")
    m1 = m1_num / edge_len

    cx = CellComplex(
        nodes=nodes, edges=edges, faces=faces,
        d0=d0, d1=d1, m0=m0, m1=m1, m2=m2,
        node_index=node_index, edge_index=edge_index, face_index=face_index,
        tags=dict(mesh.tags), meta=dict(meta or {}),
    )
    cx.meta["edge_lengths"] = edge_len
    return cx


# ---------------------------------------------------------------------------
# piece generators
# ---------------------------------------------------------------------------


def _circle_tag_from_nodes(mesh, name, cs_id, ring_nodes, face_sign):
    mesh.tags[name] = CircleTag(name, cs_id, list(ring_nodes), face_sign)


def cap_piece(vid, cs_id, length, n_theta, h) -> MeshData:
    """Disk: concentric rings of quads closed by a fan of triangles.

    Faces are charted in unrolled arc-length coordinates (trapezoids with
    parallel sides equal to the ring arcs), so the boundary circle spacing
    is exactly the cross-section spacing and gluing to a product cylinder
    is metrically consistent.  The interior carries small cone deficits,
    which a piecewise-flat metric tolerates.
    """
    n = n_theta
    radius = length / (2 * np.pi)
    # innermost ring radius keeps arc lengths above h/2 and fan edges below 2h
    r_in = max(h, h * n / (4 * np.pi))
    r_in = min(r_in, 0.75 * radius)
    n_rings = max(2, int(round((radius - r_in) / h)) + 1)
    radii = np.linspace(radius, r_in, n_rings)
    arcs = 2 * np.pi * radii / n

    def nid(i, q):
        return ("v", vid, "r", i % n, q)

    mesh = MeshData()
    for q in range(n_rings - 1):
        a, b = arcs[q], arcs[q + 1]
        dr = radii[q] - radii[q + 1]
        coords = [(0.0, 0.0), (a, 0.0), ((a + b) / 2, dr), ((a - b) / 2, dr)]
        for i in range(n):
            loop = [nid(i, q), nid(i + 1, q), nid(i + 1, q + 1), nid(i, q + 1)]
            mesh.add_face(loop, coords)
    center = ("v", vid, "c")
    qin = n_rings - 1
    a = arcs[qin]
    height = float(np.sqrt(radii[qin] ** 2 - (a / 2) ** 2))
    coords = [(0.0, 0.0), (a, 0.0), (a / 2, height)]
    for i in range(n):
        loop = [nid(i, qin), nid(i + 1, qin), center]
        mesh.add_face(loop, coords)
    _circle_tag_from_nodes(mesh, "c0", cs_id, [nid(i, 0) for i in range(n)], +1)
    return mesh


def tube_piece(vid, cs_ids, length, n_theta, h, tube_length=1.0) -> MeshData:
    """Annulus: a product strip with two tagged circles."""
    n = n_theta
    h_theta = length / n
    k = max(1, int(round(tube_length / h)))
    h_t = tube_length / k

    def nid(i, q):
        return ("v", vid, "n", i % n, q)

    mesh = MeshData()
    for q in range(k):
        for i in range(n):
            loop = [nid(i, q), nid(i + 1, q), nid(i + 1, q + 1), nid(i, q + 1)]
            coords = [(0, 0), (h_theta, 0), (h_theta, h_t), (0, h_t)]
            mesh.add_face(loop, coords)
    _circle_tag_from_nodes(mesh, "c0", cs_ids[0], [nid(i, 0) for i in range(n)], +1)
    _circle_tag_from_nodes(mesh, "c1", cs_ids[1], [nid(i, k) for i in range(n)], -1)
    return mesh


_HEX_CORNERS = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]


def _hex_side_nodes(s, k):
    """Axial coordinates of the s+1 lattice nodes on hexagon side k."""
    (i0, j0), (i1, j1) = _HEX_CORNERS[k], _HEX_CORNERS[(k + 1) % 6]
    di, dj = (i1 - i0), (j1 - j0)
    return [(s * i0 + t * di, s * j0 + t * dj) for t in range(s + 1)]


def pants_piece(vid, cs_ids, length, n_theta, h) -> MeshData:
    """Pair of pants: two triangulated lattice hexagons glued along three
    alternating sides, with a short product collar on each cuff.

    Both hexagons are regular with side length/2, subdivided at the cuff
    spacing, so every lattice edge has length h_theta.  Cuff circles have
    exactly n_theta nodes: half from the front hexagon, half from the back.
    """
    if n_theta % 2:
        raise BadTopologyError("pants cuffs need even n_theta")
    n = n_theta
    s = n // 2
    a = length / n  # lattice spacing = h_theta

    def axial_pos(i, j):
        return np.array([a * (i + 0.5 * j), a * (np.sqrt(3) / 2) * j])

    seam_nodes = set()
    for k in (1, 3, 5):
        seam_nodes.update(_hex_side_nodes(s, k))

    def fid_node(i, j):
        return ("v", vid, "f", i, j)

    def bid_node(i, j):
        # back nodes on the seams alias the front nodes
        if (i, j) in seam_nodes:
            return fid_node(i, j)
        return ("v", vid, "b", i, j)

    def in_hex(i, j):
        return abs(i) <= s and abs(j) <= s and abs(i + j) <= s

    mesh = MeshData()
    for i in range(-s, s + 1):
        for j in range(-s, s + 1):
            # up triangle (i,j),(i+1,j),(i,j+1)
            if in_hex(i, j) and in_hex(i + 1, j) and in_hex(i, j + 1):
                pts = [axial_pos(i, j), axial_pos(i + 1, j), axial_pos(i, j + 1)]
                mesh.add_face([fid_node(i, j), fid_node(i + 1, j), fid_node(i, j + 1)], pts)
                mesh.add_face([bid_node(i, j), bid_node(i, j + 1), bid_node(i + 1, j)],
                              [pts[0], pts[2], pts[1]])
            # down triangle (i+1,j),(i+1,j+1),(i,j+1)
            if in_hex(i + 1, j) and in_hex(i + 1, j + 1) and in_hex(i, j + 1):
                pts = [axial_pos(i + 1, j), axial_pos(i + 1, j + 1), axial_pos(i, j + 1)]
                mesh.add_face([fid_node(i + 1, j), fid_node(i + 1, j + 1), fid_node(i, j + 1)], pts)
                mesh.add_face([bid_node(i + 1, j), bid_node(i, j + 1), bid_node(i + 1, j + 1)],
                              [pts[0], pts[2], pts[1]])

    # cuffs: front side walked forward (s+1 nodes, both corners), then the
    # back side walked backward through its s-1 interior nodes
    k_collar = 2
    for cuff in range(3):
        side = _hex_side_nodes(s, 2 * cuff)
        back_interior = [bid_node(i, j) for (i, j) in reversed(side[1:-1])]
        cycle = [fid_node(i, j) for (i, j) in side] + back_interior
        if len(cycle) != n or len(set(cycle)) != n:
            raise BadTopologyError("cuff cycle malformed")

        def kid(i, q, cuff=cuff):
            return ("v", vid, "k", cuff, i % n, q)

        def ring(q, cuff=cuff, cycle=cycle):
            return cycle if q == 0 else [kid(i, q) for i in range(n)]

        h_c = h
        for q in range(k_collar):
            inner, outer = ring(q), ring(q + 1)
            for i in range(n):
                # inner edge traversed against the walk so it opposes the
                # hexagon (or previous collar) face on the shared edge
                loop = [inner[i], inner[(i + 1) % n], outer[(i + 1) % n], outer[i]]
                loop = [loop[0], loop[3], loop[2], loop[1]]
                coords = [(i * a, q * h_c), (i * a, (q + 1) * h_c),
                          ((i + 1) * a, (q + 1) * h_c), ((i + 1) * a, q * h_c)]
                mesh.add_face(loop, coords)
        _circle_tag_from_nodes(mesh, f"c{cuff}", cs_ids[cuff], ring(k_collar), +1)
    return mesh


def make_piece(kind, vid, cs_descriptors, h, tube_length=1.0) -> MeshData:
    """Oriented open mesh of the named topology with tagged circles.

    ``cs_descriptors`` is a list of (cross_section_id, circumference,
    n_theta), one per boundary circle slot.
    """
    expected = {"cap": 1, "tube": 2, "pants": 3}
    if kind not in expected:
        raise BadTopologyError(f"unknown piece kind {kind!r}")
    if len(cs_descriptors) != expected[kind]:
        raise ResolutionMismatchError(
            f"{kind} needs {expected[kind]} boundary circles, got {len(cs_descriptors)}")
    lengths = {d[1] for d in cs_descriptors}
    nthetas = {d[2] for d in cs_descriptors}
    if kind in ("tube", "pants") and (len(nthetas) != 1):
        raise ResolutionMismatchError(f"{kind} boundary n_theta values differ")
    if kind == "pants" and len(lengths) != 1:
        raise ResolutionMismatchError("pants preset requires equal cuff circumferences")
    length = cs_descriptors[0][1]
    n_theta = cs_descriptors[0][2]
    if kind == "cap":
        return cap_piece(vid, cs_descriptors[0][0], length, n_theta, h)
    if kind == "tube":
        return tube_piece(vid, [d[0] for d in cs_descriptors], length, n_theta, h,
                          tube_length=tube_length)
    return pants_piece(vid, [d[0] for d in cs_descriptors], length, n_theta, h)


# ---------------------------------------------------------------------------
# orientation solve and assembly
# ---------------------------------------------------------------------------


def solve_orientation(graph: Graph, pieces: dict[str, MeshData]):
    """Signs (flip per piece, flip per cylinder) making the glued surface
    consistently oriented; raises GluingMismatchError if impossible.

    Constraints per edge e with tail u and head v (slot tags t_u, t_v):
        s_u * fs(t_u) = -sigma_e      s_v * fs(t_v) = +sigma_e
    """
    slots = half_edge_slots(graph)
    s_v: dict[str, int] = {}
    sigma_e: dict[str, int] = {}

    def fs(vertex, edge, sign):
        slot = slots[(vertex, edge, sign)]
        return pieces[vertex].tags[f"c{slot}"].face_sign

    pending = set(v for v in graph.vertices)
    while pending:
        root = sorted(pending)[0]
        s_v[root] = 1
        stack = [root]
        pending.discard(root)
        while stack:
            u = stack.pop()
            for e in graph.edges:
                for my_sign, other, other_sign in (((+1), e.head, -1), ((-1), e.tail, +1)):
                    mine = e.tail if my_sign == +1 else e.head
                    if mine != u:
                        continue
                    want_sigma = -s_v[u] * fs(u, e.id, my_sign) if my_sign == +1 \
                        else s_v[u] * fs(u, e.id, my_sign)
                    if e.id in sigma_e:
                        if sigma_e[e.id] != want_sigma:
                            raise GluingMismatchError(
                                f"orientation conflict on edge {e.id}")
                    else:
                        sigma_e[e.id] = want_sigma
                    need = sigma_e[e.id] * fs(other, e.id, other_sign) if other_sign == -1 \
                        else -sigma_e[e.id] * fs(other, e.id, other_sign)
                    if other in s_v:
                        if s_v[other] != need:
                            raise GluingMismatchError(
                                f"orientation conflict at vertex {other}")
                    else:
                        s_v[other] = need
                        pending.discard(other)
                        stack.append(other)
    return s_v, sigma_e


@dataclass
class CylinderBlock:
    """Index bookkeeping for one product cylinder inside a complex.

    Slab lines run 0..n_slabs; ``node[i, line]`` holds node ids in the
    canonical chart (theta increasing with i, longitudinal coordinate
    increasing with the line index).  ``outward`` is +1 when the line
    index increases along the edge coordinate t (full cylinders and
    tail-side stars) and -1 on head-side stars.  Incidence directions and
    face orientation signs relative to this chart are resolved against the
    owning complex at use time.
    """

    edge: str
    n_theta: int
    n_slabs: int
    h_t: float
    t_of_line: np.ndarray
    node: np.ndarray          # object array (n, n_slabs+1)
    outward: int = +1
    offset: int = 0

    def theta_edge(self, cx: CellComplex, i, q):
        """(edge index, chart sign) of the theta edge at (i, line q)."""
        a, b = self.node[i % self.n_theta, q], self.node[(i + 1) % self.n_theta, q]
        return cx.edge_id_for(a, b)

    def long_edge(self, cx: CellComplex, i, q):
        """(edge index, chart sign) of the longitudinal edge in interval q."""
        a, b = self.node[i % self.n_theta, q], self.node[i % self.n_theta, q + 1]
        return cx.edge_id_for(a, b)

    def quad(self, cx: CellComplex, i, q):
        """(face index, chart orientation sign) of the quad in interval q."""
        n = self.n_theta
        loop = [self.node[i % n, q], self.node[(i + 1) % n, q],
                self.node[(i + 1) % n, q + 1], self.node[i % n, q + 1]]
        fi = cx.face_index[_face_id(loop)]
        eidx, edir = self.theta_edge(cx, i, q)
        actual = cx.d1[fi, eidx]
        return fi, int(actual * edir)


def _emit_cylinder(mesh: MeshData, node_of, n, n_slabs, h_theta, h_t, flip):
    """Add product quads; node_of(i, line) supplies node ids."""
    for q in range(n_slabs):
        for i in range(n):
            loop = [node_of(i, q), node_of(i + 1, q), node_of(i + 1, q + 1), node_of(i, q + 1)]
            coords = [(0.0, 0.0), (h_theta, 0.0), (h_theta, h_t), (0.0, h_t)]
            if flip < 0:
                loop = list(reversed(loop))
                coords = list(reversed(coords))
            mesh.add_face(loop, coords)


def _block_from(edge, node_of, n, n_slabs, h_t, t0, outward, offset=0):
    node = np.empty((n, n_slabs + 1), dtype=object)
    for i in range(n):
        for q in range(n_slabs + 1):
            node[i, q] = node_of(i, q)
    t_lines = t0 + h_t * np.arange(n_slabs + 1)
    return CylinderBlock(edge=edge, n_theta=n, n_slabs=n_slabs, h_t=h_t,
                         t_of_line=t_lines, node=node, outward=outward, offset=offset)


def assemble(graph: Graph, pieces: dict[str, MeshData], spectra: dict, r: float,
             h: float, offsets: dict | None = None) -> CellComplex:
    """Glue pieces through length-2r cylinders into a closed complex.

    The slab length is held at exactly h; the number of slabs is
    round(2r/h) and the effective half-length r_used = slabs*h/2 is stored
    in ``meta`` (and used by every downstream bound).
    """
    if r < 1.0:
        raise GluingMismatchError("stretch parameter r must be >= 1")
    offsets = offsets or {}
    slots = half_edge_slots(graph)
    s_v, sigma_e = solve_orientation(graph, pieces)

    mesh = MeshData()
    oriented: dict[str, MeshData] = {}
    for vid in graph.vertices:
        p = pieces[vid]
        if s_v[vid] < 0:
            q = MeshData()
            q.faces = dict(p.faces)
            q.tags = {k: CircleTag(t.name, t.cross_section, list(t.nodes), t.face_sign)
                      for k, t in p.tags.items()}
            q.flip_all()
            oriented[vid] = q
        else:
            oriented[vid] = p
        mesh.merge(oriented[vid])

    blocks = {}
    for e in graph.edges:
        spec = spectra[e.cross_section]
        n = spec.n_theta
        h_theta = spec.circumference / n
        tail_tag = oriented[e.tail].tags[f"c{slots[(e.tail, e.id, +1)]}"]
        head_tag = oriented[e.head].tags[f"c{slots[(e.head, e.id, -1)]}"]
        for tag, who in ((tail_tag, "tail"), (head_tag, "head")):
            if len(tag.nodes) != n:
                raise ResolutionMismatchError(
                    f"{who} circle of edge {e.id} has {len(tag.nodes)} nodes, expected {n}")
        off = int(offsets.get(e.id, 0)) % n
        n_slabs = max(2, int(round(2 * r / h)))
        h_t = h

        def node_of(i, q, e=e, tail=tail_tag, head=head_tag, off=off, n=n, n_slabs=n_slabs):
            i = i % n
            if q == 0:
                return tail.nodes[i]
            if q == n_slabs:
                return head.nodes[(i + off) % n]
            return ("e", e.id, "n", i, q)

        _emit_cylinder(mesh, node_of, n, n_slabs, h_theta, h_t, sigma_e[e.id])
        r_used = n_slabs * h_t / 2.0
        blocks[e.id] = _block_from(e.id, node_of, n, n_slabs, h_t,
                                   t0=-r_used, outward=+1, offset=off)

    cx = finalize(mesh, meta={"kind": "closed", "r": r, "h": h,
                              "s_v": s_v, "sigma_e": sigma_e})
    if not cx.is_closed():
        raise OpenBoundaryLeftError("assembled complex has boundary edges")
    cx.cylinders = blocks
    cx.meta["r_used"] = {e.id: blocks[e.id].n_slabs * blocks[e.id].h_t / 2.0
                         for e in graph.edges}
    _index_vertex_cells(cx, graph)
    return cx


def build_star(graph: Graph, vertex: str, pieces: dict[str, MeshData],
               spectra: dict, t_len: float, h: float) -> CellComplex:
    """Truncated star: the vertex piece plus a half-cylinder of length
    ~t_len on each adjacent half-edge, boundary circles left open.

    Orientation flips match :func:`assemble` exactly, so star cells carry
    the same values and masses as their images in any assembled X(r).
    """
    slots = half_edge_slots(graph)
    s_v, sigma_e = solve_orientation(graph, pieces)
    p = pieces[vertex]
    mesh = MeshData()
    base = MeshData()
    base.faces = dict(p.faces)
    base.tags = {k: CircleTag(t.name, t.cross_section, list(t.nodes), t.face_sign)
                 for k, t in p.tags.items()}
    if s_v[vertex] < 0:
        base.flip_all()
    mesh.merge(base)

    blocks = {}
    for he in graph.half_edges_at(vertex):
        e = graph.edge(he.edge)
        spec = spectra[e.cross_section]
        n = spec.n_theta
        h_theta = spec.circumference / n
        tag = base.tags[f"c{slots[(vertex, he.edge, he.sign)]}"]
        n_slabs = max(3, int(round(t_len / h)))
        h_t = h
        # full-cylinder quads use the tail tag at +sigma and the head tag
        # at -sigma in the canonical chart; a half cylinder must reproduce
        # the same face signs on its vertex line
        flip = sigma_e[he.edge] if he.sign == +1 else -sigma_e[he.edge]

        def node_of(i, q, he=he, tag=tag, n=n):
            i = i % n
            if q == 0:
                return tag.nodes[i]
            return ("s", he.edge, he.sign, "n", i, q)

        _emit_cylinder(mesh, node_of, n, n_slabs, h_theta, h_t, flip)
        blocks[(he.edge, he.sign)] = _block_from(
            he.edge, node_of, n, n_slabs, h_t, t0=0.0, outward=he.sign)

    cx = finalize(mesh, meta={"kind": "star", "vertex": vertex, "h": h,
                              "t_len": t_len, "s_v": s_v, "sigma_e": sigma_e})
    cx.cylinders = blocks
    _index_vertex_cells(cx, graph)
    return cx


def _index_vertex_cells(cx: CellComplex, graph: Graph):
    """Group cell indices by fiber: vertex piece cells per vertex."""
    def owner(cell):
        # node ids are tuples; edges/faces inherit the vertex if all their
        # nodes belong to it (gluing lines count as vertex cells)
        return cell[1] if cell[0] == "v" else None

    def nodes_of(cell, dim):
        if dim == 0:
            return (cell,)
        if dim == 1:
            return cell
        return cell[1:]

    cx.vertex_cells = {v: {0: [], 1: [], 2: []} for v in graph.vertices}
    for dim, cells in ((0, cx.nodes), (1, cx.edges), (2, cx.faces)):
        for idx, cell in enumerate(cells):
            ns = nodes_of(cell, dim)
            owners = {owner(nd) for nd in ns}
            if len(owners) == 1 and None not in owners:
                v = owners.pop()
                if v in cx.vertex_cells:
                    cx.vertex_cells[v][dim].append(idx)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


@dataclass
class GaussBonnetOperator:
    """Mass-symmetrized first-order operator and its square.

    Vectors live on the total cochain space C0+C1+C2 in symmetrized
    coordinates x = sqrt(M) u; ``to_natural``/``to_sym`` convert, and the
    Euclidean inner product of symmetrized vectors equals the M-inner
    product of natural ones.
    """

    complex: CellComplex
    d_sym: sp.csr_matrix
    delta_sym: sp.csr_matrix
    weights: np.ndarray

    def to_natural(self, x):
        return x / self.weights

    def to_sym(self, u):
        return u * self.weights

    def inner(self, u, v):
        return float(np.dot(u * self.weights, v * self.weights))

    def norm(self, u):
        return float(np.linalg.norm(u * self.weights))


def operators(cx: CellComplex) -> GaussBonnetOperator:
    w0, w1, w2 = np.sqrt(cx.m0), np.sqrt(cx.m1), np.sqrt(cx.m2)
    s0 = sp.diags(w1) @ cx.d0.astype(float) @ sp.diags(1.0 / w0)
    s1 = sp.diags(w2) @ cx.d1.astype(float) @ sp.diags(1.0 / w1)
    nv, ne, nf = cx.n_nodes, cx.n_edges, cx.n_faces
    zvv = sp.csr_matrix((nv, nv))
    zee = sp.csr_matrix((ne, ne))
    zff = sp.csr_matrix((nf, nf))
    zvf = sp.csr_matrix((nv, nf))
    d = sp.bmat([[zvv, s0.T, zvf],
                 [s0, zee, s1.T],
                 [zvf.T, s1, zff]], format="csr")
    delta = (d @ d).tocsr()
    weights = np.concatenate([w0, w1, w2])
    return GaussBonnetOperator(cx, d, delta, weights)


# ---------------------------------------------------------------------------
# restriction and Hodge star
# ---------------------------------------------------------------------------


@dataclass
class Restriction:
    """Restriction of cochains to the union of truncated vertex regions."""

    s: float
    per_vertex: dict            # vid -> concatenated global indices (natural order)
    mass: np.ndarray            # masses of the kept cells, concatenated
    indices: np.ndarray         # all kept global indices
    ambient: str

    def apply(self, u: np.ndarray) -> np.ndarray:
        return u[self.indices]

    def inner(self, ru, rv):
        return float(np.dot(ru * self.mass, rv))

    def norm(self, ru):
        return float(np.sqrt(max(self.inner(ru, ru), 0.0)))


def restrict(cx: CellComplex, graph: Graph, s: float) -> Restriction:
    """Keep vertex cells and cylinder cells within distance s of each end.

    Cells at the exact midline are kept in both components, so the union
    of closures always covers the complex at s = r.
    """
    if s < 0:
        raise SOutOfRangeError("s must be nonnegative")
    blocks = cx.cylinders
    for b in blocks.values():
        if s > b.n_slabs * b.h_t + 1e-9:
            raise SOutOfRangeError("s exceeds cylinder half-length")
    nv, ne = cx.n_nodes, cx.n_edges
    mass = cx.mass_vector()

    def cyl_cells_near(block: CylinderBlock, end: str, s: float):
        """Global cochain indices of block cells with theta-distance <= s
        of the given end ('tail' = line 0 side for full blocks)."""
        total = block.n_slabs * block.h_t
        keep = []
        n, j_lines = block.n_theta, block.n_slabs + 1
        for q in range(j_lines):
            dist = q * block.h_t if end == "tail" else total - q * block.h_t
            if dist <= s + 1e-9:
                for i in range(n):
                    a = block.node[i, q]
                    b = block.node[(i + 1) % n, q]
                    keep.append(cx.node_index[a])
                    eidx, _ = cx.edge_id_for(a, b)
                    keep.append(nv + eidx)
        for q in range(block.n_slabs):
            mid = (q + 0.5) * block.h_t
            dist = mid if end == "tail" else total - mid
            if dist <= s + 1e-9:
                for i in range(n):
                    a, b = block.node[i, q], block.node[i, q + 1]
                    eidx, _ = cx.edge_id_for(a, b)
                    keep.append(nv + eidx)
                    loop = [block.node[i, q], block.node[(i + 1) % n, q],
                            block.node[(i + 1) % n, q + 1], block.node[i, q + 1]]
                    keep.append(nv + ne + cx.face_index[_face_id(loop)])
        return keep

    per_vertex = {}
    for vid, cells in cx.vertex_cells.items():
        idx = [i for i in cells[0]] + [nv + i for i in cells[1]] + \
              [nv + ne + i for i in cells[2]]
        if cx.meta.get("kind") == "closed":
            for e, block in blocks.items():
                from_graph = graph.edge(e)
                if from_graph.tail == vid:
                    idx += cyl_cells_near(block, "tail", s)
                if from_graph.head == vid:
                    idx += cyl_cells_near(block, "head", s)
        else:
            for (e, sign), block in blocks.items():
                if cx.meta.get("vertex") == vid:
                    idx += cyl_cells_near(block, "tail", s)
        idx = sorted(set(idx))
        per_vertex[vid] = np.array(idx, dtype=np.int64)
    all_idx = np.concatenate([per_vertex[v] for v in sorted(per_vertex)]) \
        if per_vertex else np.zeros(0, dtype=np.int64)
    return Restriction(s=s, per_vertex=per_vertex, mass=mass[all_idx],
                       indices=all_idx, ambient=f"{id(cx)}|s={s}")


def hodge_star(cx: CellComplex, k: int):
    """Diagonal star sending primal k-cochains to dual (2-k)-cochains.

    The dual cochain is indexed by the primal cells (node <-> dual 2-cell,
    edge <-> rotated dual edge, face <-> dual node) and weighted by the
    mass diagonal, which makes the map an exact isometry between the
    primal M-inner product and the dual 1/M-inner product.  The parity
    sign of a double application is carried by the dual orientation
    convention, so star(2-k) . star(k) is the identity on these arrays.
    """
    m = (cx.m0, cx.m1, cx.m2)[k]

    def apply(u):
        return m * u

    return apply, m
