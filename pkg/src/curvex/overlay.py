"""Exact overlay of embedded curve systems on a triangulated surface.

Curves enter as explicit positions; the overlay realizes them simultaneously,
computes all pairwise crossings (exact rational geometry inside each
triangle), and assembles the curve strands together with the triangulation
edge fragments into one combinatorial map (rotation system).  Complement
regions, their topology, pairwise minimal position via bigon removal, and
region-boundary pushoffs are all derived from this map.

Correctness rests on classical facts only: two transverse simple closed
curves are in minimal position iff they bound no bigon (here: a disk region
with exactly two corners and no punctures), and region topology is exact
Euler characteristic bookkeeping on the cut complex.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import CurvexError
from .position import Position
from .surface import Triangulation

_TRIANGLE_CORNERS = ((0, 0), (1, 0), (0, 1))


class _Degenerate(Exception):
    pass


def _orient(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _seg_cross(p1, p2, p3, p4):
    """Proper crossing of open segments, as (t along p1p2, t along p3p4).

    Endpoint touches and collinear overlaps are degeneracies: the overlay
    must be generic, callers retry with jittered coordinates.
    """
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    if d1 == 0 and d2 == 0:
        raise _Degenerate()  # collinear supports
    if (d1 > 0) == (d2 > 0) or (d3 > 0) == (d4 > 0):
        if d1 == 0 or d2 == 0 or d3 == 0 or d4 == 0:
            # One endpoint exactly on the other segment's line but outside:
            # fine; exactly on the open segment would have mixed signs.
            pass
        return None
    if d1 == 0 or d2 == 0 or d3 == 0 or d4 == 0:
        raise _Degenerate()  # endpoint on the other open segment
    return (Fraction(d1, d1 - d2), Fraction(d3, d3 - d4))


class Overlay:
    """Combinatorial map of a curve system overlaid on its triangulation."""

    def __init__(self, tri: Triangulation, positions, jitter: int = 0):
        self.tri = tri
        self.raw_positions = list(positions)
        for p in self.raw_positions:
            if p.tri.id != tri.id:
                raise CurvexError("positions live on different triangulations")
        last = None
        for attempt in range(10):
            try:
                self._build(jitter + attempt)
                return
            except _Degenerate as exc:
                last = exc
        raise CurvexError("could not find a generic overlay position") from last

    # -- construction ------------------------------------------------------

    def _build(self, jitter: int):
        tri = self.tri
        curves = self.raw_positions

        # 1. Merge crossing points per edge and re-space parameters; ties
        # between curves break by curve index (bigon removal cleans up).
        per_edge = {e: [] for e in range(tri.num_edges)}
        for ci, pos in enumerate(curves):
            for pi, (s, q) in enumerate(pos.crossings):
                per_edge[tri.edge_of_slot(s)].append((q, ci, pi))
        point_id = {}
        self.points = []  # (curve, crossing index, edge, respaced param)
        self.edge_points = {}
        for e, lst in per_edge.items():
            lst.sort()
            ids = []
            m = len(lst)
            for r, (q, ci, pi) in enumerate(lst):
                pid = len(self.points)
                self.points.append((ci, pi, e, Fraction(r + 1, m + 1)))
                point_id[(ci, pi)] = pid
                ids.append(pid)
            self.edge_points[e] = ids
        self.positions = [
            Position(
                tri,
                [
                    (s, self.points[point_id[(ci, pi)]][3])
                    for pi, (s, _) in enumerate(pos.crossings)
                ],
                check=False,
            )
            for ci, pos in enumerate(curves)
        ]

        def coord(slot, q):
            e = tri.edge_of_slot(slot)
            lo = tri.slots_of_edge(e)[0]
            tau = q if slot == lo else 1 - q
            if jitter:
                wob = hash((e, q.numerator, q.denominator, jitter)) % 1009 + 1
                tau = tau + Fraction(wob, 1009 * 1013 * (len(self.points) + 7))
            k = slot % 3
            a = _TRIANGLE_CORNERS[k]
            b = _TRIANGLE_CORNERS[(k + 1) % 3]
            return (a[0] + tau * (b[0] - a[0]), a[1] + tau * (b[1] - a[1]))

        # 2. Chords grouped by triangle.  chord = one crossing-to-crossing
        # passage of a curve through a triangle.
        chords_by_tri = {}
        self.chords = []  # (curve, pid_a, pid_b, triangle, slot_a, slot_b)
        for ci, pos in enumerate(self.positions):
            n = len(pos.crossings)
            for i in range(n):
                s_in, _ = pos.crossings[i]
                s_next, _ = pos.crossings[(i + 1) % n]
                s_out = tri.glue(s_next)
                t = tri.triangle_of_slot(s_in)
                if tri.triangle_of_slot(s_out) != t:
                    raise CurvexError("invalid position: chord leaves its triangle")
                cid = len(self.chords)
                self.chords.append(
                    (ci, point_id[(ci, i)], point_id[(ci, (i + 1) % n)], t, s_in, s_out)
                )
                chords_by_tri.setdefault(t, []).append(cid)

        self._chord_geo = {}
        for cid, (ci, pa, pb, t, sa, sb) in enumerate(self.chords):
            self._chord_geo[cid] = (
                coord(sa, self.points[pa][3]),
                coord(sb, self.points[pb][3]),
            )

        # 3. Crossings, chord pair by chord pair, exactly.
        self.crossings = []  # (chord1, chord2)
        chord_sub = {cid: [] for cid in range(len(self.chords))}
        for t, cids in chords_by_tri.items():
            for ii in range(len(cids)):
                g1 = self._chord_geo[cids[ii]]
                for jj in range(ii + 1, len(cids)):
                    g2 = self._chord_geo[cids[jj]]
                    hit = _seg_cross(g1[0], g1[1], g2[0], g2[1])
                    if hit is None:
                        continue
                    c1, c2 = cids[ii], cids[jj]
                    if self.chords[c1][0] == self.chords[c2][0]:
                        raise CurvexError("self-crossing curve in overlay")
                    t1, t2 = hit
                    xid = len(self.crossings)
                    self.crossings.append((c1, c2))
                    chord_sub[c1].append((t1, xid))
                    chord_sub[c2].append((t2, xid))
        for subs in chord_sub.values():
            subs.sort()
            for k in range(1, len(subs)):
                if subs[k][0] == subs[k - 1][0]:
                    raise _Degenerate()
        self.chord_sub = chord_sub

        # 4. Darts.  Nodes: ('p', point), ('c', vertex), ('x', crossing).
        self.dart_head = []
        self.dart_twin = []
        self.dart_kind = []  # 'f' fragment / 's' segment
        self.dart_owner = []  # edge id / curve index
        self.dart_slot = []  # fragments: slot whose direction the dart follows
        self.frag_interval = []  # fragments: (param at tail, param at head)

        def new_pair(n_a, n_b, kind, owner, slots=(None, None), ival=(None, None)):
            d = len(self.dart_head)
            self.dart_head.extend([n_b, n_a])
            self.dart_twin.extend([d + 1, d])
            self.dart_kind.extend([kind, kind])
            self.dart_owner.extend([owner, owner])
            self.dart_slot.extend([slots[0], slots[1]])
            self.frag_interval.extend([ival, (ival[1], ival[0])])
            return d, d + 1

        frag_up = {}
        frag_down = {}
        first_frag = {}
        for e in range(tri.num_edges):
            lo, hi = tri.slots_of_edge(e)
            vt = tri.vertex_of_slot(lo)
            vh = tri.head_vertex_of_slot(lo)
            seq = [("c", vt)] + [("p", p) for p in self.edge_points[e]] + [("c", vh)]
            params = (
                [Fraction(0)]
                + [self.points[p][3] for p in self.edge_points[e]]
                + [Fraction(1)]
            )
            for k in range(len(seq) - 1):
                d_fwd, d_bwd = new_pair(
                    seq[k], seq[k + 1], "f", e, (lo, hi), (params[k], params[k + 1])
                )
                if k == 0:
                    first_frag[(e, "tail")] = d_fwd
                if k == len(seq) - 2:
                    first_frag[(e, "head")] = d_bwd
                if seq[k][0] == "p":
                    frag_up[seq[k][1]] = d_fwd
                if seq[k + 1][0] == "p":
                    frag_down[seq[k + 1][1]] = d_bwd

        chord_end_dart = {}
        xdarts = {}
        self.dart_chord = {}
        for cid in range(len(self.chords)):
            subs = [xid for _, xid in sorted(chord_sub[cid])]
            ci, pa, pb, t, sa, sb = self.chords[cid]
            seq = [("p", pa)] + [("x", x) for x in subs] + [("p", pb)]
            for k in range(len(seq) - 1):
                d_fwd, d_bwd = new_pair(seq[k], seq[k + 1], "s", ci)
                self.dart_chord[d_fwd] = cid
                self.dart_chord[d_bwd] = cid
                if k == 0:
                    chord_end_dart[(cid, "a")] = d_fwd
                if k == len(seq) - 2:
                    chord_end_dart[(cid, "b")] = d_bwd
                if seq[k][0] == "x":
                    xdarts.setdefault(seq[k][1], []).append((d_fwd, cid, +1))
                if seq[k + 1][0] == "x":
                    xdarts.setdefault(seq[k + 1][1], []).append((d_bwd, cid, -1))

        # 5. Rotations: counterclockwise outgoing darts at every node.
        rot = {}
        for v in range(tri.num_vertices):
            out = []
            for s in tri.vertex_slots(v):
                e = tri.edge_of_slot(s)
                lo, hi = tri.slots_of_edge(e)
                out.append(first_frag[(e, "tail" if s == lo else "head")])
            rot[("c", v)] = out

        point_chord_end = {}
        for cid, (ci, pa, pb, t, sa, sb) in enumerate(self.chords):
            point_chord_end[(pa, sa)] = chord_end_dart[(cid, "a")]
            point_chord_end[(pb, sb)] = chord_end_dart[(cid, "b")]
        for pid, (ci, pi, e, q) in enumerate(self.points):
            lo, hi = tri.slots_of_edge(e)
            rot[("p", pid)] = [
                frag_up[pid],
                point_chord_end[(pid, lo)],
                frag_down[pid],
                point_chord_end[(pid, hi)],
            ]

        for xid, darts4 in xdarts.items():
            def direction(item):
                dart, cid, sign = item
                A, B = self._chord_geo[cid]
                v = (B[0] - A[0], B[1] - A[1])
                return v if sign > 0 else (-v[0], -v[1])

            def less(u, v):
                hu = 0 if (u[1] > 0 or (u[1] == 0 and u[0] > 0)) else 1
                hv = 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1
                if hu != hv:
                    return hu < hv
                return u[0] * v[1] - u[1] * v[0] > 0

            arr = list(darts4)
            for i in range(1, len(arr)):
                j = i
                while j > 0 and less(direction(arr[j]), direction(arr[j - 1])):
                    arr[j], arr[j - 1] = arr[j - 1], arr[j]
                    j -= 1
            rot[("x", xid)] = [d for d, _, _ in arr]

        self.dart_tail = [self.dart_head[self.dart_twin[d]] for d in range(len(self.dart_head))]

        # 6. Faces on the left: next(d) = rotation predecessor of twin(d).
        rot_prev = {}
        for node, darts in rot.items():
            m = len(darts)
            for k, d in enumerate(darts):
                rot_prev[darts[k]] = darts[(k - 1) % m]
        self.next_face = [rot_prev[self.dart_twin[d]] for d in range(len(self.dart_head))]
        self.rot = rot

        self.face_of = [-1] * len(self.dart_head)
        nfaces = 0
        for d in range(len(self.dart_head)):
            if self.face_of[d] >= 0:
                continue
            cur = d
            while self.face_of[cur] < 0:
                self.face_of[cur] = nfaces
                cur = self.next_face[cur]
            nfaces += 1
        self.num_faces = nfaces

        v_count = len(set(self.dart_head))
        e_count = len(self.dart_head) // 2
        chi = v_count - e_count + nfaces
        expected = tri.euler_characteristic + tri.num_punctures
        if chi != expected:
            raise AssertionError("overlay map chi=%d, expected %d" % (chi, expected))

    # -- regions -----------------------------------------------------------

    def regions(self, keep_curves=None) -> list["Region"]:
        """Complement regions; with ``keep_curves`` all other curves erased."""
        if keep_curves is None:
            erased = frozenset()
        else:
            keep = set(keep_curves)
            erased = frozenset(
                ci for ci in range(len(self.positions)) if ci not in keep
            )

        def skippable(d):
            return self.dart_kind[d] == "f" or self.dart_owner[d] in erased

        parent = list(range(self.num_faces))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for d in range(0, len(self.dart_head), 2):
            if skippable(d):
                ra, rb = find(self.face_of[d]), find(self.face_of[d + 1])
                if ra != rb:
                    parent[ra] = rb

        groups = {}
        for f in range(self.num_faces):
            groups.setdefault(find(f), []).append(f)
        rec = {
            root: {"faces": fs, "v_int": 0, "e_int": 0, "punctures": 0,
                   "vertices": [], "circuits": []}
            for root, fs in groups.items()
        }

        node_darts = {}
        for d in range(len(self.dart_head)):
            node_darts.setdefault(self.dart_head[d], []).append(d)
        for node, darts in node_darts.items():
            if all(skippable(d) for d in darts):
                r = rec[find(self.face_of[darts[0]])]
                r["v_int"] += 1
                if node[0] == "c":
                    r["vertices"].append(node[1])
                    if self.tri.is_puncture(node[1]):
                        r["punctures"] += 1
        for d in range(0, len(self.dart_head), 2):
            if skippable(d):
                rec[find(self.face_of[d])]["e_int"] += 1

        visited = set()
        for d in range(len(self.dart_head)):
            if skippable(d) or d in visited:
                continue
            walk = []
            cur = d
            while cur not in visited:
                visited.add(cur)
                walk.append(cur)
                nxt = self.next_face[cur]
                while skippable(nxt):
                    nxt = self.next_face[self.dart_twin[nxt]]
                cur = nxt
            rec[find(self.face_of[d])]["circuits"].append(walk)

        out = []
        for root, r in rec.items():
            chi_bar = r["v_int"] - r["e_int"] + len(r["faces"])
            b = len(r["circuits"])
            genus2 = 2 - b - chi_bar
            if genus2 < 0 or genus2 % 2 != 0:
                raise AssertionError("inconsistent region topology")
            out.append(
                Region(
                    self,
                    faces=r["faces"],
                    circuits=r["circuits"],
                    chi_bar=chi_bar,
                    genus=genus2 // 2,
                    punctures=r["punctures"],
                    interior_vertices=sorted(r["vertices"]),
                    erased=erased,
                )
            )
        out.sort(key=lambda reg: min(reg.faces))
        return out

    # -- queries -----------------------------------------------------------

    def crossing_pairs(self) -> dict:
        counts = {}
        for c1, c2 in self.crossings:
            a = self.chords[c1][0]
            b = self.chords[c2][0]
            key = (min(a, b), max(a, b))
            counts[key] = counts.get(key, 0) + 1
        return counts

    def total_crossings(self) -> int:
        return len(self.crossings)

    def region_containing_curve(self, regions, curve_idx):
        """Region (computed with this curve erased) holding the curve."""
        for d in range(len(self.dart_head)):
            if self.dart_kind[d] == "s" and self.dart_owner[d] == curve_idx:
                f = self.face_of[d]
                for reg in regions:
                    if f in reg.face_set:
                        return reg
                raise CurvexError("face not covered by the given regions")
        raise CurvexError("curve has no chords")


class Region:
    """One complement region of a (sub)arrangement."""

    def __init__(self, overlay, faces, circuits, chi_bar, genus, punctures,
                 interior_vertices, erased):
        self.overlay = overlay
        self.faces = faces
        self.face_set = set(faces)
        self.circuits = circuits
        self.chi_bar = chi_bar
        self.genus = genus
        self.punctures = punctures
        self.interior_vertices = interior_vertices
        self.erased = erased

    @property
    def boundary_count(self) -> int:
        return len(self.circuits)

    @property
    def euler_char_open(self) -> int:
        return self.chi_bar - self.punctures

    def is_disk(self):
        return self.chi_bar == 1 and self.punctures == 0

    def is_once_punctured_disk(self):
        return self.chi_bar == 1 and self.punctures == 1

    def is_annulus(self):
        return self.chi_bar == 0 and self.punctures == 0 and self.boundary_count == 2

    def is_pants_like(self):
        """Genus 0, at most three ends: carries only peripheral classes."""
        return self.genus == 0 and self.boundary_count + self.punctures <= 3

    def circuit_curves(self, walk):
        ov = self.overlay
        return {ov.dart_owner[d] for d in walk if ov.dart_kind[d] == "s"}

    def circuit_corners(self, walk):
        """Crossing nodes where the walk turns from one curve to another."""
        ov = self.overlay
        corners = []
        n = len(walk)
        for k in range(n):
            node = ov.dart_head[walk[k]]
            if node[0] == "x" and ov.dart_owner[walk[k]] != ov.dart_owner[walk[(k + 1) % n]]:
                corners.append((k, node))
        return corners

    def third_crossings(self, walk):
        """Crossing nodes the walk passes straight through (erased curves)."""
        ov = self.overlay
        count = 0
        n = len(walk)
        for k in range(n):
            node = ov.dart_head[walk[k]]
            if node[0] == "x" and ov.dart_owner[walk[k]] == ov.dart_owner[walk[(k + 1) % n]]:
                count += 1
        return count

    def _skippable(self, d):
        ov = self.overlay
        return ov.dart_kind[d] == "f" or ov.dart_owner[d] in self.erased

    def pushoff(self) -> list[Position]:
        """Embedded parallel copy of each boundary circuit, inside the region."""
        return [self.pushoff_circuit(w) for w in self.circuits]

    def pushoff_circuit(self, walk) -> Position:
        ov = self.overlay
        crossings = []
        for cur in walk:
            nxt = ov.next_face[cur]
            while self._skippable(nxt):
                if ov.dart_kind[nxt] == "f":
                    crossings.append(self._fragment_crossing(nxt))
                nxt = ov.next_face[ov.dart_twin[nxt]]
        if not crossings:
            raise CurvexError("pushoff of a circuit crossing no edges")
        return Position(ov.tri, crossings).normalized()

    def _fragment_crossing(self, frag_dart):
        """Pushoff crossing record for a skipped fragment dart.

        The pushoff hugs the boundary, crossing near the tail of the
        skipped dart; each fragment dart is skipped by at most one walk
        step globally, so quarter-point offsets from either end collide
        with nothing.
        """
        ov = self.overlay
        twin = ov.dart_twin[frag_dart]
        slot_in = ov.dart_slot[twin]
        p_tail, p_head = ov.frag_interval[frag_dart]
        q = p_tail + (p_head - p_tail) / 4
        return (slot_in, q)


# -- pairwise minimal position ----------------------------------------------


def _find_pair_bigon(ov: Overlay, i: int, j: int):
    """First bigon of the (i, j) subarrangement, or None.

    A bigon is a disk region with no punctures whose boundary is a single
    circuit with exactly two corners at distinct crossings of the pair.
    """
    for reg in ov.regions(keep_curves={i, j}):
        if reg.chi_bar != 1 or reg.punctures != 0 or reg.boundary_count != 1:
            continue
        walk = reg.circuits[0]
        corners = reg.circuit_corners(walk)
        if len(corners) == 2 and corners[0][1] != corners[1][1]:
            return (i, j, reg, walk, corners)
    return None


def _side_data(ov: Overlay, walk, k_from, k_to):
    """One bigon side: darts from the corner at k_from to the one at k_to."""
    n = len(walk)
    idx = (k_from + 1) % n
    darts = []
    while True:
        darts.append(walk[idx])
        if idx == k_to:
            break
        idx = (idx + 1) % n
    curve = ov.dart_owner[darts[0]]
    assert all(ov.dart_owner[d] == curve for d in darts)
    parity = darts[0] % 2
    assert all(d % 2 == parity for d in darts)
    pts = []
    third = 0
    for d in darts[:-1]:
        node = ov.dart_head[d]
        if node[0] == "p":
            pts.append(node[1])
        elif node[0] == "x":
            third += 1
    return {
        "darts": darts,
        "curve": curve,
        "points": pts,
        "third": third,
        # Even darts run along their chord, i.e. in the curve's own
        # traversal direction.
        "walk_agrees": parity == 0,
    }


def _emissions_for_side(ov: Overlay, reg: Region, darts):
    """Pushoff crossing records along one bigon side, in side (walk) order."""
    out = []
    for cur in darts:
        nxt = ov.next_face[cur]
        while reg._skippable(nxt):
            if ov.dart_kind[nxt] == "f":
                out.append(reg._fragment_crossing(nxt))
            nxt = ov.next_face[ov.dart_twin[nxt]]
    return out


def _remove_bigon(ov: Overlay, i, j, reg, walk, corners):
    """Reroute one curve across the bigon; returns (new positions, mover).

    The curve whose side carries at least as many third-curve crossings is
    rerouted parallel to the other side, so the total crossing count drops
    by at least two, which makes the reduction loop terminate.
    """
    (kA, nodeA), (kB, nodeB) = corners
    side1 = _side_data(ov, walk, kA, kB)
    side2 = _side_data(ov, walk, kB, kA)
    if side1["third"] > side2["third"]:
        mover_side, keep_side = side1, side2
    elif side2["third"] > side1["third"]:
        mover_side, keep_side = side2, side1
    elif side1["curve"] >= side2["curve"]:
        mover_side, keep_side = side1, side2
    else:
        mover_side, keep_side = side2, side1
    mover = mover_side["curve"]
    emissions = _emissions_for_side(ov, reg, keep_side["darts"])

    # The two sides run between the corners in opposite walk directions, so
    # a mover traversing its own side along the walk must take the keep
    # side's pushoff records reversed, and vice versa.
    def reversed_records(records):
        return [(ov.tri.glue(s), q) for s, q in reversed(records)]

    insert = reversed_records(emissions) if mover_side["walk_agrees"] else list(emissions)
    if not mover_side["walk_agrees"]:
        pass

    mover_pos = ov.positions[mover]
    crossings = list(mover_pos.crossings)
    nm = len(crossings)
    removed = mover_side["points"]
    if removed:
        idxs = [ov.points[p][1] for p in removed]
        if not mover_side["walk_agrees"]:
            idxs = list(reversed(idxs))
        for k in range(len(idxs) - 1):
            assert idxs[k + 1] == (idxs[k] + 1) % nm, "bigon side not contiguous"
        start = idxs[0]
        count = len(idxs)
        survivors = [crossings[(start + count + k) % nm] for k in range(nm - count)]
        new_seq = list(insert) + survivors
    else:
        # Single chord between the two corners: splice after its entry point.
        cid = ov.dart_chord[mover_side["darts"][0]]
        ci, pa, pb, t, sa, sb = ov.chords[cid]
        assert ci == mover
        after = ov.points[pa][1]
        new_seq = []
        for k in range(nm):
            new_seq.append(crossings[k])
            if k == after:
                new_seq.extend(insert)
    new_positions = list(ov.positions)
    new_positions[mover] = Position(ov.tri, new_seq, check=False)
    return new_positions, mover


def reduce_system(tri: Triangulation, positions) -> Overlay:
    """Overlay of the curve system in pairwise minimal position."""
    positions = list(positions)
    clean = set()
    while True:
        ov = Overlay(tri, positions)
        counts = ov.crossing_pairs()
        found = None
        n = len(positions)
        for i in range(n):
            for j in range(i + 1, n):
                if (i, j) in clean:
                    continue
                if counts.get((i, j), 0) < 2:
                    clean.add((i, j))
                    continue
                found = _find_pair_bigon(ov, i, j)
                if found is not None:
                    break
                clean.add((i, j))
            if found is not None:
                break
        if found is None:
            return ov
        positions, mover = _remove_bigon(ov, *found)
        clean = {p for p in clean if mover not in p}
