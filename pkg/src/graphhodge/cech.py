"""Vector-valued graph cohomology over exact rationals.

A cochain system attaches a graded vector space to every vertex (the
cohomology of its thick piece) and to every edge (the cohomology of the
cross-section), together with one restriction matrix per half-edge and
grade.  The difference map

    (rho f)(e) = l_{head,e} f(head) - l_{tail,e} f(tail)

is a two-term complex whose kernel and cokernel predict the Betti numbers
of the assembled stretched surface through a short exact sequence: in
degree k the prediction is h0(k) + h1(k-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import exact
from .errors import DegreeOutOfRangeError, GradeMissingError
from .graph import Graph, HalfEdge


@dataclass
class CochainSystem:
    """Graded vertex/edge spaces with per-half-edge restriction matrices.

    ``a_dims[v]`` and ``b_dims[e]`` list dimensions per grade q = 0..n.
    ``maps[(vertex, edge, sign)][q]`` is the restriction matrix for that
    half-edge in grade q, shape (b_dims[e][q], a_dims[v][q]); a self-loop
    carries two distinct keys (sign +1 and -1).
    """

    graph: Graph
    grades: tuple[int, ...]
    a_dims: dict[str, list[int]]
    b_dims: dict[str, list[int]]
    maps: dict[tuple[str, str, int], dict[int, exact.FMatrix]]

    def __post_init__(self):
        for h in self.graph.half_edges():
            key = (h.vertex, h.edge, h.sign)
            if key not in self.maps:
                raise GradeMissingError(f"no restriction matrices for half-edge {key}")
            for q in self.grades:
                m = self.maps[key].get(q)
                if m is None:
                    raise GradeMissingError(f"half-edge {key} missing grade {q}")
                nb, na = self.b_dims[h.edge][q], self.a_dims[h.vertex][q]
                rows = len(m)
                cols = len(m[0]) if m else 0
                if na == 0 or nb == 0:
                    if rows not in (0, nb):
                        raise GradeMissingError(f"bad shape for {key} grade {q}")
                elif (rows, cols) != (nb, na):
                    raise GradeMissingError(
                        f"half-edge {key} grade {q}: shape {(rows, cols)} != {(nb, na)}")

    # grading bookkeeping -------------------------------------------------
    def c0_dim(self, q: int) -> int:
        return sum(self.a_dims[v][q] for v in self.graph.vertices)

    def c1_dim(self, q: int) -> int:
        return sum(self.b_dims[e.id][q] for e in self.graph.edges)

    def vertex_offsets(self, q: int) -> dict[str, int]:
        off, pos = {}, 0
        for v in self.graph.vertices:
            off[v] = pos
            pos += self.a_dims[v][q]
        return off

    def edge_offsets(self, q: int) -> dict[str, int]:
        off, pos = {}, 0
        for e in self.graph.edges:
            off[e.id] = pos
            pos += self.b_dims[e.id][q]
        return off


@dataclass
class GradedCohomology:
    grades: tuple[int, ...]
    h0: dict[int, int]
    h1: dict[int, int]
    h0_basis: dict[int, exact.FMatrix] = field(default_factory=dict)
    h1_basis: dict[int, exact.FMatrix] = field(default_factory=dict)

    def h0_total(self) -> int:
        return sum(self.h0.values())

    def h1_total(self) -> int:
        return sum(self.h1.values())


def rho_matrix(sys: CochainSystem, grade: int) -> exact.FMatrix:
    """The block difference matrix of the two-term complex in one grade.

    Edge-row blocks carry +l at the head column block and -l at the tail
    block; for a self-loop both land in the same block and add.
    """
    if grade not in sys.grades:
        raise GradeMissingError(f"grade {grade} not declared")
    q = grade
    nrows, ncols = sys.c1_dim(q), sys.c0_dim(q)
    voff, eoff = sys.vertex_offsets(q), sys.edge_offsets(q)
    rho = exact.zeros(nrows, ncols)
    for e in sys.graph.edges:
        for vertex, sign in ((e.head, -1), (e.tail, +1)):
            m = sys.maps[(vertex, e.id, sign)][q]
            # head contributes +l, tail contributes -l
            coeff = Fraction(1) if sign == -1 else Fraction(-1)
            r0, c0 = eoff[e.id], voff[vertex]
            for i, row in enumerate(m):
                for j, x in enumerate(row):
                    rho[r0 + i][c0 + j] += coeff * x
    return rho


def cohomology(sys: CochainSystem) -> GradedCohomology:
    """Exact kernel/cokernel dimensions and bases per grade.

    h0 bases are reduced-echelon kernel vectors of rho; h1 representatives
    span the orthogonal complement of the image under the standard dot
    product on the chosen edge bases (the kernel of rho transposed).
    """
    h0: dict[int, int] = {}
    h1: dict[int, int] = {}
    h0b: dict[int, exact.FMatrix] = {}
    h1b: dict[int, exact.FMatrix] = {}
    for q in sys.grades:
        rho = rho_matrix(sys, q)
        n0, n1 = sys.c0_dim(q), sys.c1_dim(q)
        r = exact.rank(rho) if rho else 0
        h0[q] = n0 - r
        h1[q] = n1 - r
        h0b[q] = exact.nullspace(rho, n0) if n0 else []
        h1b[q] = exact.nullspace(exact.transpose(rho), n1) if n1 else []
    return GradedCohomology(sys.grades, h0, h1, h0b, h1b)


def predicted_betti(coh: GradedCohomology, k: int) -> int:
    """Predicted dim H^k of the assembled surface: h0(k) + h1(k-1)."""
    if k < 0 or k > max(coh.grades):
        raise DegreeOutOfRangeError(f"degree {k} outside 0..{max(coh.grades)}")
    h0 = coh.h0.get(k, 0)
    h1 = coh.h1.get(k - 1, 0) if k >= 1 else 0
    return h0 + h1


def predicted_betti_all(coh: GradedCohomology) -> list[int]:
    return [predicted_betti(coh, k) for k in range(max(coh.grades) + 1)]


def spectral_sequence_terms(sys: CochainSystem):
    """First and second page of the two-column spectral sequence.

    Returns (e1, e2, checks) where e1[p][q] and e2[p][q] are dimension
    tables for p in {0,1}, and checks[k] compares the anti-diagonal sum of
    the second page (with the degree shift) against the predicted Betti
    number in degree k.
    """
    coh = cohomology(sys)
    qs = list(sys.grades)
    e1 = {0: {q: sys.c0_dim(q) for q in qs}, 1: {q: sys.c1_dim(q) for q in qs}}
    e2 = {0: {q: coh.h0[q] for q in qs}, 1: {q: coh.h1[q] for q in qs}}
    checks = {}
    for k in range(max(qs) + 1):
        total = e2[0].get(k, 0) + e2[1].get(k - 1, 0)
        checks[k] = (total, predicted_betti(coh, k))
    return e1, e2, checks


# ---------------------------------------------------------------------------
# Shipped presets: cohomology data of the three vertex-piece kinds with
# circle cross-sections.  Restriction matrices are written in the circle
# orientation shared by both endpoints of an edge, so a pair-of-pants row
# pattern (1,0), (0,1), (-1,-1) expresses that its three cuffs sum to a
# boundary.
# ---------------------------------------------------------------------------

_PRESET_A_DIMS = {
    "cap": [1, 0, 0],
    "tube": [1, 1, 0],
    "pants": [1, 2, 0],
}

_CIRCLE_B_DIMS = [1, 1, 0]


def _preset_maps(kind: str, slot: int) -> dict[int, exact.FMatrix]:
    """Restriction matrices for boundary-circle ``slot`` of a piece kind."""
    one = exact.fmatrix([[1]])
    if kind == "cap":
        return {0: one, 1: [], 2: []}
    if kind == "tube":
        return {0: one, 1: exact.fmatrix([[1]]), 2: []}
    if kind == "pants":
        rows = {0: [[1, 0]], 1: [[0, 1]], 2: [[-1, -1]]}
        return {0: one, 1: exact.fmatrix(rows[slot]), 2: []}
    raise GradeMissingError(f"no cohomology preset for piece kind {kind!r}")


def preset_system(graph: Graph, piece_kinds: dict[str, str]) -> CochainSystem:
    """Cochain system for a scene whose pieces are caps/tubes/pants.

    Each vertex's half-edges are matched to piece boundary slots in the
    canonical half-edge order (edge id, then tail before head).
    """
    a_dims = {v: list(_PRESET_A_DIMS[piece_kinds[v]]) for v in graph.vertices}
    b_dims = {e.id: list(_CIRCLE_B_DIMS) for e in graph.edges}
    maps: dict[tuple[str, str, int], dict[int, exact.FMatrix]] = {}
    slots: dict[str, int] = {v: 0 for v in graph.vertices}
    for h in sorted(graph.half_edges(), key=lambda h: (h.edge, -h.sign)):
        key = (h.vertex, h.edge, h.sign)
        maps[key] = _preset_maps(piece_kinds[h.vertex], slots[h.vertex])
        slots[h.vertex] += 1
    return CochainSystem(graph, (0, 1, 2), a_dims, b_dims, maps)


def half_edge_slots(graph: Graph) -> dict[tuple[str, str, int], int]:
    """Boundary-circle slot assigned to each half-edge, per vertex.

    The same canonical order used by :func:`preset_system`, so mesh
    generation and the exact backend agree on which circle is which.
    """
    slots: dict[str, int] = {v: 0 for v in graph.vertices}
    out: dict[tuple[str, str, int], int] = {}
    for h in sorted(graph.half_edges(), key=lambda h: (h.edge, -h.sign)):
        out[(h.vertex, h.edge, h.sign)] = slots[h.vertex]
        slots[h.vertex] += 1
    return out


def system_from_dict(graph: Graph, block: dict) -> CochainSystem:
    """Build a CochainSystem from the scene-file ``cochain_system`` block.

    Matrix entries are [numerator, denominator] integer pairs.
    """
    grades = tuple(block["grades"])
    a_dims = {v: list(block["vertices"][v]["dims"]) for v in graph.vertices}
    b_dims = {e.id: list(block["edges"][e.id]["dims"]) for e in graph.edges}
    maps: dict[tuple[str, str, int], dict[int, exact.FMatrix]] = {}
    for rec in block["maps"]:
        key = (rec["vertex"], rec["edge"], int(rec["sign"]))
        per_grade = {}
        for q in grades:
            raw = rec["matrices"].get(str(q), rec["matrices"].get(q, []))
            per_grade[q] = [[Fraction(int(p[0]), int(p[1])) for p in row] for row in raw]
        maps[key] = per_grade
    return CochainSystem(graph, grades, a_dims, b_dims, maps)
