"""Explicit embedded positions of curves on a triangulated surface.

A position is a cyclic list of edge crossings.  Crossing ``i`` records the
slot through which the curve enters the triangle containing the chord from
point ``i`` to point ``i+1``, together with an exact rational parameter
along the crossed edge (measured in the edge's canonical direction, the
direction of its smallest slot).  Chords are abstract: two positions on the
same triangulation interleave purely through their edge parameters, which
is what the overlay engine exploits.

Weight vectors (normal coordinates) are derived data: the number of
crossings per edge.  Conversely ``trace`` reconstructs the canonical
embedded position of a normal weight vector; a normal curve is determined
by its weights up to normal isotopy, so the reconstruction is exact.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import CurvexError, UnflippableEdge
from .surface import Triangulation, _next_slot


class Position:
    """One embedded closed curve, as a cyclic crossing sequence."""

    __slots__ = ("tri", "crossings")

    def __init__(self, tri: Triangulation, crossings, check: bool = True):
        self.tri = tri
        self.crossings = tuple((int(s), Fraction(q)) for s, q in crossings)
        if check:
            self._validate()

    def _validate(self):
        tri = self.tri
        n = len(self.crossings)
        for i, (s, q) in enumerate(self.crossings):
            if not (0 < q < 1):
                raise CurvexError("crossing parameter must lie strictly inside the edge")
            s2, _ = self.crossings[(i + 1) % n]
            o = tri.glue(s2)
            if tri.triangle_of_slot(o) != tri.triangle_of_slot(s):
                raise CurvexError(
                    "chord %d does not stay inside one triangle (slots %d -> %d)" % (i, s, s2)
                )

    def __len__(self):
        return len(self.crossings)

    def is_empty(self) -> bool:
        return len(self.crossings) == 0

    def exit_slot(self, i: int) -> int:
        """Slot of chord i's triangle through whose edge the chord leaves."""
        s2, _ = self.crossings[(i + 1) % len(self.crossings)]
        return self.tri.glue(s2)

    def weights(self) -> tuple[int, ...]:
        w = [0] * self.tri.num_edges
        for s, _ in self.crossings:
            w[self.tri.edge_of_slot(s)] += 1
        return tuple(w)

    def normalized(self) -> "Position":
        """Remove same-side returns until every chord joins distinct sides.

        Each removal is an isotopy across a disk inside a single triangle,
        so the curve class is unchanged.  The result is a normal position
        (triangle inequalities and parity hold for its weights).
        """
        cr = list(self.crossings)
        tri = self.tri
        changed = True
        while changed and cr:
            changed = False
            n = len(cr)
            for i in range(n):
                s_in = cr[i][0]
                s_next = cr[(i + 1) % n][0]
                if tri.glue(s_next) == s_in:
                    j = (i + 1) % n
                    for k in sorted((i, j), reverse=True):
                        del cr[k]
                    changed = True
                    break
        return Position(self.tri, cr, check=False)

    def reversed(self) -> "Position":
        """Same point set traversed backwards."""
        n = len(self.crossings)
        if n == 0:
            return self
        tri = self.tri
        out = []
        for i in range(n - 1, -1, -1):
            s, q = self.crossings[i]
            out.append((tri.glue(s), q))
        return Position(self.tri, out)

    def __repr__(self):
        return "Position(%d crossings on %s)" % (len(self.crossings), self.tri.id[:8])


def trace(tri: Triangulation, weights) -> list[Position]:
    """Reconstruct the embedded components of a normal weight vector.

    Raises if the weights violate parity or a triangle inequality.  Returns
    one Position per connected component; an all-zero vector gives [].
    """
    weights = list(weights)
    if len(weights) != tri.num_edges:
        raise CurvexError("expected %d weights, got %d" % (tri.num_edges, len(weights)))
    if any(w < 0 for w in weights):
        raise CurvexError("negative weight")
    corner = {}
    for t in range(tri.num_triangles):
        s0, s1, s2 = tri.slots_of_triangle(t)
        w = [weights[tri.edge_of_slot(s)] for s in (s0, s1, s2)]
        if (w[0] + w[1] + w[2]) % 2 != 0:
            raise CurvexError("odd weight sum in triangle %d" % t)
        for k in range(3):
            # Corner at tail of slot k, between sides k-1 and k.
            x = (w[(k - 1) % 3] + w[k] - w[(k + 1) % 3]) // 2
            if x < 0:
                raise CurvexError("triangle inequality fails in triangle %d" % t)
            corner[(t, k)] = x

    # Corner pairing: j-th point from the corner on each of its two sides.
    # link[(slot, rank along slot direction)] = (exit slot, rank).
    link = {}
    for t in range(tri.num_triangles):
        slots = tri.slots_of_triangle(t)
        for k in range(3):
            x = corner[(t, k)]
            s_in = slots[(k - 1) % 3]  # head at the corner
            s_out = slots[k]  # tail at the corner
            w_in = weights[tri.edge_of_slot(s_in)]
            for j in range(x):
                a = (s_in, w_in - 1 - j)
                b = (s_out, j)
                link[a] = b
                link[b] = a

    for e in range(tri.num_edges):
        for s in tri.slots_of_edge(e):
            for r in range(weights[e]):
                if (s, r) not in link:
                    raise CurvexError("unmatched normal arc endpoint")

    def canonical_rank(s, r):
        e = tri.edge_of_slot(s)
        lo = tri.slots_of_edge(e)[0]
        return r if s == lo else weights[e] - 1 - r

    def param(s, r):
        e = tri.edge_of_slot(s)
        return Fraction(canonical_rank(s, r) + 1, weights[e] + 1)

    seen = set()
    components = []
    for e0 in range(tri.num_edges):
        lo = tri.slots_of_edge(e0)[0]
        for r0 in range(weights[e0]):
            if (e0, r0) in seen:
                continue
            crossings = []
            s, r = lo, r0
            while True:
                ce = tri.edge_of_slot(s)
                key = (ce, canonical_rank(s, r))
                if key in seen:
                    break
                seen.add(key)
                crossings.append((s, param(s, r)))
                s2, r2 = link[(s, r)]
                s = tri.glue(s2)
                r = weights[tri.edge_of_slot(s2)] - 1 - r2
            components.append(Position(tri, crossings))
    return components


def transport(pos: Position, e: int, flipped: Triangulation) -> Position:
    """Carry an embedded position through the flip of edge ``e``.

    ``flipped`` must be ``pos.tri.flip(e)``.  Crossings of ``e`` are
    dropped and each passage through the quad is rerouted straight, meeting
    the new diagonal at most once; this is an isotopy inside the quad disk
    relative to its boundary, so the curve class is preserved.  All other
    crossings keep their edge and parameter.
    """
    tri = pos.tri
    if not tri.is_flippable(e):
        raise UnflippableEdge("edge %d is not flippable" % e)
    pos = pos.normalized()
    if pos.is_empty():
        return Position(flipped, [])

    a, b = tri.slots_of_edge(e)
    a1, a2 = _next_slot(a), _next_slot(_next_slot(a))
    b1, b2 = _next_slot(b), _next_slot(_next_slot(b))
    quad_tris = {tri.triangle_of_slot(a), tri.triangle_of_slot(b)}
    # Slot relocation of the quad boundary edges under the flip in surface.py.
    move = {a2: a1, b1: a2, b2: b1, a1: b2}

    # Quad boundary circle: v1 -(a1)- u -(a2)- v0 -(b1)- w -(b2)- v1, with
    # side base coordinates a1:0, a2:1, b1:2, b2:3.  The new diagonal joins
    # u (coordinate 1) and w (coordinate 3); the arc 1<c<3 borders the new
    # triangle on slots (a,a1,a2), the complementary arc the one on (b,b1,b2).
    side_base = {a1: 0, a2: 1, b1: 2, b2: 3}

    def slot_dir_param(slot, q):
        ee = tri.edge_of_slot(slot)
        lo = tri.slots_of_edge(ee)[0]
        return q if slot == lo else 1 - q

    def boundary_coord(slot, q):
        return side_base[slot] + slot_dir_param(slot, q)

    def on_arc_uw(c):
        return 1 < c < 3

    items = list(pos.crossings)
    n = len(items)

    def chord_in_quad(i):
        return tri.triangle_of_slot(items[i][0]) in quad_tris

    def on_e(i):
        return tri.edge_of_slot(items[i][0]) == e

    anchors = [i for i in range(n) if not on_e(i)]
    if not anchors:
        raise CurvexError("curve crosses only the flipped edge; normalize first")
    items = items[anchors[0]:] + items[: anchors[0]]

    # Kept points with, between consecutive ones, the quad passage data.
    kept = []  # (slot, q, coord or None) coord set when its next chord is in the quad
    gaps = []  # for kept index i: None or exit boundary coordinate of the passage
    i = 0
    while i < len(items):
        s, q = items[i]
        assert tri.edge_of_slot(s) != e
        if not chord_in_quad(i):
            kept.append((s, q))
            gaps.append(None)
            i += 1
            continue
        # Passage: from this point, through chords in the quad (crossing e
        # zero or more times), to the next point not on e.
        entry_coord = boundary_coord(s, q)
        j = i + 1
        while j < len(items) and tri.edge_of_slot(items[j][0]) == e:
            j += 1
        jj = j % len(items)
        # Exit point: items[jj]; the chord arriving at it came through the
        # quad side slot glue(items[jj].slot).
        exit_quad_slot = tri.glue(items[jj][0])
        assert tri.triangle_of_slot(exit_quad_slot) in quad_tris
        exit_coord = side_base[exit_quad_slot] + slot_dir_param(
            exit_quad_slot, items[jj][1]
        )
        kept.append((s, q))
        gaps.append((entry_coord, exit_coord))
        i = j

    # Rank diagonal crossings by their endpoint on the u-w arc.
    crossers = []
    for idx, g in enumerate(gaps):
        if g is None:
            continue
        u_c, v_c = g
        if on_arc_uw(u_c) != on_arc_uw(v_c):
            c0 = u_c if on_arc_uw(u_c) else v_c
            crossers.append((c0, idx))
    crossers.sort()
    rank_of = {idx: k for k, (c0, idx) in enumerate(crossers)}
    m = len(crossers)

    new_lo = min(a, b)
    result = []
    for idx, ((s, q), g) in enumerate(zip(kept, gaps)):
        result.append((move.get(s, s), q))
        if g is None or idx not in rank_of:
            continue
        _, exit_c = g
        slot_in = a if on_arc_uw(exit_c) else b
        # Ranks measure from corner u; slot b runs u->w in the flipped
        # triangulation, slot a runs w->u.
        qq = Fraction(rank_of[idx] + 1, m + 1)
        if new_lo == a:
            qq = 1 - qq
        result.append((slot_in, qq))
    return Position(flipped, result)
