"""Standard triangulated models with their named curves.

The closed model of genus g is a cyclic plumbing: one crossing square per
consecutive pair of the 2g+2 chain curves, two connecting bands per curve,
and cones over the four complementary boundary circles.  The punctured
model replaces one plumbing site by a fan of n+1 parallel curves closing
the chain, with one puncture coned into each gap between consecutive fan
curves on one side.

Every cell (square or band) is the same quadrilateral gadget, four
triangles around a centre vertex, so the chain curves have pinned crossing
paths through each cell and their coordinates are derived rather than
transcribed.  Model automorphisms (the hyperelliptic involution, the local
pillow rotations used by half-twists) are found by propagating a single
seed slot correspondence and verifying consistency, which makes them
impossible to get silently wrong.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import ComplexityTooLow, CurvexError
from .position import Position
from .surface import INTERNAL, PUNCTURE, SurfaceSig, Triangulation, _next_slot, _prev_slot


class _Build:
    """Incremental oriented 2-complex: vertices, edges, triangles, caps."""

    def __init__(self):
        self.vertex_tags = []
        self.edges = []  # (va, vb)
        self.edge_uses = {}  # eid -> list of (tri, side, dir)
        self.tris = []  # list of ((eid, dir), (eid, dir), (eid, dir))

    def vertex(self, tag=INTERNAL) -> int:
        self.vertex_tags.append(tag)
        return len(self.vertex_tags) - 1

    def edge(self, va: int, vb: int) -> int:
        self.edges.append((va, vb))
        self.edge_uses[len(self.edges) - 1] = []
        return len(self.edges) - 1

    def _tail(self, eid, d):
        va, vb = self.edges[eid]
        return va if d > 0 else vb

    def _head(self, eid, d):
        va, vb = self.edges[eid]
        return vb if d > 0 else va

    def tri(self, sides) -> int:
        assert len(sides) == 3
        for k in range(3):
            e, d = sides[k]
            e2, d2 = sides[(k + 1) % 3]
            if self._head(e, d) != self._tail(e2, d2):
                raise AssertionError("triangle sides do not chain")
        t = len(self.tris)
        self.tris.append(tuple(sides))
        for k, (e, d) in enumerate(sides):
            uses = self.edge_uses[e]
            if any(dd == d for (_, _, dd) in uses):
                raise AssertionError("edge %d used twice in the same direction" % e)
            if len(uses) >= 2:
                raise AssertionError("edge %d used more than twice" % e)
            uses.append((t, k, d))
        return t

    # -- boundary ----------------------------------------------------------

    def free_sides(self):
        out = []
        for e, uses in self.edge_uses.items():
            if len(uses) == 1:
                out.append((e, -uses[0][2]))
        return out

    def _next_free(self, eid, fdir):
        v = self._head(eid, fdir)
        cur_e, cur_d = eid, -fdir  # the used side starting at v
        while True:
            uses = [u for u in self.edge_uses[cur_e] if u[2] == cur_d]
            assert len(uses) == 1
            t, k, _ = uses[0]
            e_a, d_a = self.tris[t][(k - 1) % 3]  # side ending at v
            if len(self.edge_uses[e_a]) == 1:
                return (e_a, -d_a)
            cur_e, cur_d = e_a, -d_a

    def boundary_circuits(self):
        free = set(self.free_sides())
        circuits = []
        while free:
            start = min(free)
            walk = []
            cur = start
            while True:
                walk.append(cur)
                free.discard(cur)
                cur = self._next_free(*cur)
                if cur == start:
                    break
            circuits.append(walk)
        return circuits

    def cap(self, circuit, tag=INTERNAL) -> int:
        """Cone a boundary circuit with a new apex vertex; returns the apex."""
        apex = self.vertex(tag)
        cone = [self.edge(self._head(e, d), apex) for e, d in circuit]
        m = len(circuit)
        for i, (e, d) in enumerate(circuit):
            self.tri([(e, d), (cone[i], 1), (cone[(i - 1) % m], -1)])
        return apex

    # -- final assembly ----------------------------------------------------

    def finish(self, sig: SurfaceSig):
        nslots = 3 * len(self.tris)
        glue = [-1] * nslots
        for e, uses in self.edge_uses.items():
            if len(uses) != 2:
                raise AssertionError("edge %d not fully glued" % e)
            (t1, k1, d1), (t2, k2, d2) = uses
            if d1 == d2:
                raise AssertionError("edge %d glued without reversing direction" % e)
            glue[3 * t1 + k1] = 3 * t2 + k2
            glue[3 * t2 + k2] = 3 * t1 + k1

        # Tags per vertex orbit, ordered by smallest slot as Triangulation does.
        def slot_tail(s):
            e, d = self.tris[s // 3][s % 3]
            return self._tail(e, d)

        seen = [False] * nslots
        tags = []
        for s in range(nslots):
            if seen[s]:
                continue
            cur = s
            members = []
            while not seen[cur]:
                seen[cur] = True
                members.append(cur)
                cur = glue[_prev_slot(cur)]
            owners = {slot_tail(m) for m in members}
            if len(owners) != 1:
                raise AssertionError("vertex star is not a disk: %s" % owners)
            tags.append(self.vertex_tags[owners.pop()])

        tri = Triangulation(sig, glue, tags)

        slot_of = {}
        for t in range(len(self.tris)):
            for k in range(3):
                slot_of[(t, k)] = 3 * t + k
        return tri, slot_of


class _Cell:
    """Quadrilateral cell: four triangles around a centre vertex.

    Corners BL, BR, TR, TL; boundary edges bottom (BL->BR, in the bottom
    triangle), right (BR->TR), top (TR->TL), left (TL->BL); spokes X->M.
    ``bottom``/``top`` may be pre-existing edges (band case), entered in
    their free direction.
    """

    def __init__(self, b: _Build, bottom=None, top=None):
        if bottom is None:
            self.BL, self.BR = b.vertex(), b.vertex()
            self.bottom = b.edge(self.BL, self.BR)
            self._bottom_dir = 1
        else:
            eid, fdir = bottom
            self.BL, self.BR = b._tail(eid, fdir), b._head(eid, fdir)
            self.bottom = eid
            self._bottom_dir = fdir
        if top is None:
            self.TR, self.TL = b.vertex(), b.vertex()
            self.top = b.edge(self.TR, self.TL)
            self._top_dir = 1
        else:
            eid, fdir = top
            self.TR, self.TL = b._tail(eid, fdir), b._head(eid, fdir)
            self.top = eid
            self._top_dir = fdir
        self.M = b.vertex()
        self.right = b.edge(self.BR, self.TR)
        self.left = b.edge(self.TL, self.BL)
        self.sBL = b.edge(self.BL, self.M)
        self.sBR = b.edge(self.BR, self.M)
        self.sTR = b.edge(self.TR, self.M)
        self.sTL = b.edge(self.TL, self.M)
        self.tB = b.tri([(self.bottom, self._bottom_dir), (self.sBR, 1), (self.sBL, -1)])
        self.tR = b.tri([(self.right, 1), (self.sTR, 1), (self.sBR, -1)])
        self.tT = b.tri([(self.top, self._top_dir), (self.sTL, 1), (self.sTR, -1)])
        self.tL = b.tri([(self.left, 1), (self.sBL, 1), (self.sTL, -1)])

    # Path tables.  Entries are (triangle, edge, param measured from the
    # local tail of the crossing in the path's travel direction); the final
    # pair is the exit edge and its param, consumed by the next cell.

    def horiz(self):
        inner = [
            (self.tL, self.left, Fraction(3, 5), self.TL),
            (self.tB, self.sBL, Fraction(4, 5), self.BL),
            (self.tR, self.sBR, Fraction(4, 5), self.BR),
        ]
        return inner, (self.right, Fraction(2, 5), self.BR)

    def vert(self):
        inner = [
            (self.tB, self.bottom, Fraction(9, 20), self.BL),
            (self.tL, self.sBL, Fraction(9, 10), self.BL),
            (self.tT, self.sTL, Fraction(9, 10), self.TL),
        ]
        return inner, (self.top, Fraction(11, 20), self.TR)

    def entry_tri(self, kind):
        return self.tL if kind == "h" else self.tB

    def entry_edge(self, kind):
        return self.left if kind == "h" else self.bottom

    def free_side(self, b: _Build, eid):
        uses = b.edge_uses[eid]
        assert len(uses) == 1
        return (eid, -uses[0][2])


def _emit_circuit(b: _Build, cells_with_kind):
    """Crossing circuit of a curve traversing the listed cells in order.

    Each item is (cell, kind); the exit point of one cell is the entry
    point of the next.  Returns [(tri, side_k?, edge, param_stored)] as
    (entry_triangle, edge, param) triples in travel order.
    """
    out = []
    m = len(cells_with_kind)
    for idx, (cell, kind) in enumerate(cells_with_kind):
        prev_cell, prev_kind = cells_with_kind[(idx - 1) % m]
        _, (exit_e, exit_p, exit_tail) = (
            prev_cell.horiz() if prev_kind == "h" else prev_cell.vert()
        )
        assert exit_e == cell.entry_edge(kind), "cells do not chain"
        va, _ = b.edges[exit_e]
        p_stored = exit_p if va == exit_tail else 1 - exit_p
        out.append((cell.entry_tri(kind), exit_e, p_stored))
        inner, _ = cell.horiz() if kind == "h" else cell.vert()
        for t, e, p, tail in inner[1:]:
            va, _ = b.edges[e]
            out.append((t, e, p if va == tail else 1 - p))
    return out


def _to_position(tri: Triangulation, b: _Build, slot_of, raw) -> Position:
    crossings = []
    for t, eid, p_stored in raw:
        uses = b.edge_uses[eid]
        (t1, k1, d1), (t2, k2, d2) = uses
        slot_here = slot_of[(t1, k1)] if t1 == t else slot_of[(t2, k2)]
        assert (t1 == t) or (t2 == t)
        lo = min(slot_of[(t1, k1)], slot_of[(t2, k2)])
        lo_dir = d1 if slot_of[(t1, k1)] == lo else d2
        q = p_stored if lo_dir > 0 else 1 - p_stored
        crossings.append((slot_here, q))
    return Position(tri, crossings)


def propagate_automorphism(tri: Triangulation, seed_from: int, seed_to: int,
                           domain=None) -> dict[int, int]:
    """Orientation-preserving simplicial map from one seed slot pair.

    Propagates seed_from -> seed_to through next() and glue(); returns the
    full slot map, raising on any inconsistency.  If ``domain`` (a set of
    triangles) is given, propagation across glue stays inside it and the
    map is only required to be a bijection of that subcomplex.
    """
    pi = {seed_from: seed_to}
    stack = [seed_from]
    while stack:
        s = stack.pop()
        t = pi[s]
        pairs = [(_next_slot(s), _next_slot(t))]
        if domain is None or (
            tri.triangle_of_slot(tri.glue(s)) in domain
            and tri.triangle_of_slot(tri.glue(t)) in domain
        ):
            pairs.append((tri.glue(s), tri.glue(t)))
        for s2, t2 in pairs:
            if s2 in pi:
                if pi[s2] != t2:
                    raise CurvexError("seed does not extend to an automorphism")
            else:
                pi[s2] = t2
                stack.append(s2)
    if domain is None and len(pi) != 3 * tri.num_triangles:
        raise CurvexError("automorphism propagation did not cover the surface")
    if sorted(pi.values()) != sorted(pi.keys()):
        raise CurvexError("propagated map is not a bijection of its domain")
    return pi


class Model:
    """A standard triangulation with its named curves and symmetries."""

    def __init__(self, sig, tri, positions, caps, extras):
        self.sig = sig
        self.tri = tri
        self.positions = positions  # label -> Position
        self.caps = caps  # list of cap apex vertex ids
        self.extras = extras

    def weights(self, label) -> tuple[int, ...]:
        return self.positions[label].weights()

    @property
    def chain_length(self) -> int:
        return 2 * self.sig.genus + 2


def _closed_model(g: int) -> Model:
    m = 2 * g + 2
    b = _Build()
    squares = [_Cell(b) for _ in range(m)]

    def fs(eid):
        uses = b.edge_uses[eid]
        assert len(uses) == 1
        return (eid, -uses[0][2])

    bands_p = {}
    bands_q = {}
    for i in range(m):
        # alpha_i leaves square i-1 upward through N, enters square i at W.
        bands_p[i] = _Cell(b, bottom=fs(squares[(i - 1) % m].top), top=fs(squares[i].left))
        # ...and returns from E of square i to S of square i-1.
        bands_q[i] = _Cell(b, bottom=fs(squares[i].right), top=fs(squares[(i - 1) % m].bottom))

    circuits = b.boundary_circuits()
    caps = [b.cap(c, INTERNAL) for c in circuits]

    sig = SurfaceSig(g, 0)
    tri, slot_of = b.finish(sig)

    positions = {}
    for i in range(m):
        raw = _emit_circuit(
            b,
            [
                (squares[i], "h"),
                (bands_q[i], "v"),
                (squares[(i - 1) % m], "v"),
                (bands_p[i], "v"),
            ],
        )
        positions["alpha_%d" % i] = _to_position(tri, b, slot_of, raw)

    # Hyperelliptic involution: half-turn of every cell, swapping the P and
    # Q band of each curve.  Seed: square 0's bottom side maps to its top side.
    iota = propagate_automorphism(
        tri, slot_of[(squares[0].tB, 0)], slot_of[(squares[0].tT, 0)]
    )

    extras = {
        "iota": iota,
        "boundary_count": len(circuits),
        "square_tris": [(s.tB, s.tR, s.tT, s.tL) for s in squares],
    }
    return Model(sig, tri, positions, caps, extras)


def _punctured_model(g: int, n: int) -> Model:
    """Closed plumbing with the alpha_0 site widened into n+1 parallel fans.

    Square sq[i] plumbs alpha_i (horizontal) with alpha_{i+1} (vertical) as
    in the closed model; square F_j plumbs alpha_0^j (horizontal) with
    alpha_1 (vertical), G_j plumbs alpha_{2g+1} (horizontal) with alpha_0^j
    (vertical).  Punctures are coned into the gaps between consecutive fan
    copies on the alpha_1 side.
    """
    b = _Build()
    sq = {i: _Cell(b) for i in range(1, 2 * g + 1)}
    F = {j: _Cell(b) for j in range(n + 1)}
    G = {j: _Cell(b) for j in range(n + 1)}

    def fs(eid):
        uses = b.edge_uses[eid]
        assert len(uses) == 1
        return (eid, -uses[0][2])

    bands_p = {}
    bands_q = {}
    for i in range(2, 2 * g + 1):
        bands_p[i] = _Cell(b, bottom=fs(sq[i - 1].top), top=fs(sq[i].left))
        bands_q[i] = _Cell(b, bottom=fs(sq[i].right), top=fs(sq[i - 1].bottom))

    # alpha_1: horizontal in sq[1], vertical up the F stack.
    a1_q = _Cell(b, bottom=fs(sq[1].right), top=fs(F[0].bottom))
    a1_mini = {j: _Cell(b, bottom=fs(F[j].top), top=fs(F[j + 1].bottom)) for j in range(n)}
    a1_p = _Cell(b, bottom=fs(F[n].top), top=fs(sq[1].left))

    # alpha_{2g+1}: vertical in sq[2g], horizontal along the G row.  The row
    # is traversed in reverse fan order: parallel pushoffs of one core are
    # met in opposite orders by the two transversal curves.
    a3_p = _Cell(b, bottom=fs(sq[2 * g].top), top=fs(G[n].left))
    a3_mini = {j: _Cell(b, bottom=fs(G[j + 1].right), top=fs(G[j].left)) for j in range(n)}
    a3_q = _Cell(b, bottom=fs(G[0].right), top=fs(sq[2 * g].bottom))

    # Fan copy j: horizontal in F_j, vertical in G_j.
    fan_q = {j: _Cell(b, bottom=fs(F[j].right), top=fs(G[j].bottom)) for j in range(n + 1)}
    fan_p = {j: _Cell(b, bottom=fs(G[j].top), top=fs(F[j].left)) for j in range(n + 1)}

    circuits = b.boundary_circuits()

    def circuit_edges(c):
        return {e for e, _ in c}

    def band_sides(cell):
        return {cell.left, cell.right}

    # Consecutive fan copies cobound two gap disks, one on each band side;
    # puncture P_k is coned into the fan_q-side gap between copies k-1 and k.
    puncture_circuit = {}
    for k in range(1, n + 1):
        match = [
            idx
            for idx, c in enumerate(circuits)
            if circuit_edges(c) & band_sides(fan_q[k - 1])
            and circuit_edges(c) & band_sides(fan_q[k])
        ]
        if len(match) != 1:
            raise AssertionError(
                "expected one gap circuit between fan %d and %d, found %d"
                % (k - 1, k, len(match))
            )
        puncture_circuit[k] = match[0]

    caps = []
    puncture_vertex = {}
    cap_tris = {}
    first_cap_tri = len(b.tris)
    for idx, c in enumerate(circuits):
        ks = [k for k, ci in puncture_circuit.items() if ci == idx]
        t0 = len(b.tris)
        apex = b.cap(c, PUNCTURE if ks else INTERNAL)
        cap_tris[idx] = list(range(t0, len(b.tris)))
        caps.append(apex)
        for k in ks:
            puncture_vertex[k] = apex

    sig = SurfaceSig(g, n)
    tri, slot_of = b.finish(sig)

    positions = {}
    for i in range(2, 2 * g + 1):
        raw = _emit_circuit(
            b,
            [(sq[i], "h"), (bands_q[i], "v"), (sq[i - 1], "v"), (bands_p[i], "v")],
        )
        positions["alpha_%d" % i] = _to_position(tri, b, slot_of, raw)

    a1_seq = [(sq[1], "h"), (a1_q, "v")]
    for j in range(n + 1):
        a1_seq.append((F[j], "v"))
        a1_seq.append((a1_mini[j], "v") if j < n else (a1_p, "v"))
    positions["alpha_1"] = _to_position(tri, b, slot_of, _emit_circuit(b, a1_seq))

    a3_seq = [(sq[2 * g], "v"), (a3_p, "v")]
    for j in range(n, -1, -1):
        a3_seq.append((G[j], "h"))
        a3_seq.append((a3_mini[j - 1], "v") if j > 0 else (a3_q, "v"))
    positions["alpha_%d" % (2 * g + 1)] = _to_position(
        tri, b, slot_of, _emit_circuit(b, a3_seq)
    )

    for j in range(n + 1):
        raw = _emit_circuit(
            b, [(F[j], "h"), (fan_q[j], "v"), (G[j], "v"), (fan_p[j], "v")]
        )
        positions["alpha_0^%d" % j] = _to_position(tri, b, slot_of, raw)

    # Pillow patches for consecutive punctures (P_j, P_{j+1}): the two gap
    # cones plus whichever band of fan copy j separates them, carrying the
    # half-turn found by propagation.
    patches = {}
    for j in range(1, n):
        gap_a = puncture_circuit[j]
        gap_b = puncture_circuit[j + 1]
        band = None
        for cand in (fan_q[j], fan_p[j]):
            sides = band_sides(cand)
            if circuit_edges(circuits[gap_a]) & sides and circuit_edges(
                circuits[gap_b]
            ) & sides:
                band = cand
                break
        if band is None:
            raise AssertionError("no fan band separates gaps %d and %d" % (j, j + 1))
        dom = set(cap_tris[gap_a]) | set(cap_tris[gap_b])
        dom |= {band.tB, band.tR, band.tT, band.tL}
        rho = propagate_automorphism(
            tri,
            slot_of[(band.tB, 0)],
            slot_of[(band.tT, 0)],
            domain=dom,
        )
        patches[j] = {
            "tris": frozenset(dom),
            "rho": rho,
            "punctures": (puncture_vertex[j], puncture_vertex[j + 1]),
        }

    extras = {
        "puncture_vertex": puncture_vertex,
        "boundary_count": len(circuits),
        "patches": patches,
    }
    return Model(sig, tri, positions, caps, extras)


@lru_cache(maxsize=None)
def standard_model(genus: int, punctures: int) -> Model:
    if genus < 3:
        raise ComplexityTooLow("standard models require genus >= 3")
    if punctures == 0:
        model = _closed_model(genus)
    else:
        model = _punctured_model(genus, punctures)
    register_model(model)
    return model


def standard_triangulation(sig: SurfaceSig) -> Triangulation:
    """Deterministic standard triangulation of the signature."""
    return standard_model(sig.genus, sig.punctures).tri


_REGISTRY: dict[str, Model] = {}


def register_model(model: Model):
    _REGISTRY[model.tri.id] = model


def model_by_id(tri_id: str) -> Model:
    if tri_id not in _REGISTRY:
        raise CurvexError("unknown triangulation id %s" % tri_id[:12])
    return _REGISTRY[tri_id]


_TRI_REGISTRY: dict[str, Triangulation] = {}


def register_triangulation(tri: Triangulation):
    _TRI_REGISTRY[tri.id] = tri


def triangulation_by_id(tri_id: str) -> Triangulation:
    if tri_id in _TRI_REGISTRY:
        return _TRI_REGISTRY[tri_id]
    if tri_id in _REGISTRY:
        return _REGISTRY[tri_id].tri
    raise CurvexError("unknown triangulation id %s" % tri_id[:12])
