"""Oriented combinatorial surfaces as triangulations with glued edge slots.

A triangulation of an oriented surface is stored as a list of triangles,
each owning three directed edge slots (slot ``3*t + k`` is the k-th side of
triangle ``t``, sides listed counterclockwise), together with a fixed-point
free involution ``glue`` pairing each slot with the oppositely directed slot
of the neighbouring triangle.  Edges are slot orbits of size two, vertices
are the orbits of the corner rotation.  The encoding can only represent
oriented surfaces, which is what makes orientation conventions exact.

Vertices carry a tag, ``"internal"`` or ``"puncture"``; punctures are the
removed points of the surface, internal vertices are ordinary points that
isotopies may sweep across.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import ComplexityTooLow, UnflippableEdge

PUNCTURE = "puncture"
INTERNAL = "internal"


@dataclass(frozen=True)
class SurfaceSig:
    genus: int
    punctures: int

    def __post_init__(self):
        if self.genus < 0 or self.punctures < 0:
            raise ComplexityTooLow("genus and punctures must be non-negative")
        if self.complexity < 2:
            raise ComplexityTooLow(
                "complexity 3g-3+n = %d < 2 for (g,n)=(%d,%d)"
                % (self.complexity, self.genus, self.punctures)
            )

    @property
    def complexity(self) -> int:
        return 3 * self.genus - 3 + self.punctures

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.punctures


def _next_slot(s: int) -> int:
    return s - s % 3 + (s + 1) % 3


def _prev_slot(s: int) -> int:
    return s - s % 3 + (s + 2) % 3


class Triangulation:
    """Immutable triangulated oriented surface.

    ``glue`` is the side pairing; ``vertex_tags`` assigns each vertex orbit
    its tag.  Vertex orbits are numbered in order of their smallest slot.
    """

    def __init__(self, sig: SurfaceSig, glue: list[int], vertex_tags: list[str]):
        n = len(glue)
        if n == 0 or n % 3 != 0:
            raise ValueError("slot count must be a positive multiple of 3")
        for s, t in enumerate(glue):
            if t == s or glue[t] != s:
                raise ValueError("glue must be a fixed-point-free involution")
        self.sig = sig
        self._glue = tuple(glue)
        self._num_slots = n

        # Vertex orbits of s -> glue[prev(s)] (rotation of outgoing slots).
        vertex_of = [-1] * n
        orbits = []
        for s in range(n):
            if vertex_of[s] >= 0:
                continue
            orbit = []
            cur = s
            while vertex_of[cur] < 0:
                vertex_of[cur] = len(orbits)
                orbit.append(cur)
                cur = self._glue[_prev_slot(cur)]
            orbits.append(tuple(orbit))
        self._vertex_orbits = tuple(orbits)
        self._vertex_of_slot = tuple(vertex_of)

        if len(vertex_tags) != len(orbits):
            raise ValueError(
                "expected %d vertex tags, got %d" % (len(orbits), len(vertex_tags))
            )
        for tag in vertex_tags:
            if tag not in (PUNCTURE, INTERNAL):
                raise ValueError("unknown vertex tag %r" % (tag,))
        self._vertex_tags = tuple(vertex_tags)

        # Edge orbits {s, glue[s]}, numbered by smallest slot.
        edge_of = [-1] * n
        edges = []
        for s in range(n):
            if edge_of[s] < 0:
                edge_of[s] = len(edges)
                edge_of[self._glue[s]] = len(edges)
                edges.append((s, self._glue[s]))
        self._edges = tuple(edges)
        self._edge_of_slot = tuple(edge_of)

        self._check_surface()
        self._id = None

    # -- basic counts ------------------------------------------------------

    @property
    def num_triangles(self) -> int:
        return self._num_slots // 3

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def num_vertices(self) -> int:
        return len(self._vertex_orbits)

    @property
    def euler_characteristic(self) -> int:
        """Euler characteristic of the punctured surface (punctures removed)."""
        return (
            self.num_vertices
            - self.num_punctures
            - self.num_edges
            + self.num_triangles
        )

    @property
    def vertex_tags(self) -> tuple[str, ...]:
        return self._vertex_tags

    # -- incidence ---------------------------------------------------------

    def glue(self, slot: int) -> int:
        return self._glue[slot]

    def triangle_of_slot(self, slot: int) -> int:
        return slot // 3

    def slots_of_triangle(self, t: int) -> tuple[int, int, int]:
        return (3 * t, 3 * t + 1, 3 * t + 2)

    def edge_of_slot(self, slot: int) -> int:
        return self._edge_of_slot[slot]

    def slots_of_edge(self, e: int) -> tuple[int, int]:
        return self._edges[e]

    def vertex_of_slot(self, slot: int) -> int:
        """Vertex at the tail of the directed slot."""
        return self._vertex_of_slot[slot]

    def head_vertex_of_slot(self, slot: int) -> int:
        return self._vertex_of_slot[_next_slot(slot)]

    def vertex_slots(self, v: int) -> tuple[int, ...]:
        return self._vertex_orbits[v]

    def vertex_degree(self, v: int) -> int:
        return len(self._vertex_orbits[v])

    def is_puncture(self, v: int) -> bool:
        return self._vertex_tags[v] == PUNCTURE

    @property
    def num_punctures(self) -> int:
        return sum(1 for t in self._vertex_tags if t == PUNCTURE)

    # -- invariants --------------------------------------------------------

    def _check_surface(self):
        if self.euler_characteristic != self.sig.euler_characteristic:
            raise ValueError(
                "Euler characteristic %d does not match sig (g=%d, n=%d)"
                % (self.euler_characteristic, self.sig.genus, self.sig.punctures)
            )
        if self.num_punctures != self.sig.punctures:
            raise ValueError(
                "%d puncture vertices, sig declares %d"
                % (self.num_punctures, self.sig.punctures)
            )
        if not self._connected():
            raise ValueError("triangulation is not connected")

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            t = stack.pop()
            for s in self.slots_of_triangle(t):
                u = self.triangle_of_slot(self._glue[s])
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == self.num_triangles

    # -- flips -------------------------------------------------------------

    def is_flippable(self, e: int) -> bool:
        a, b = self._edges[e]
        return self.triangle_of_slot(a) != self.triangle_of_slot(b)

    def flip(self, e: int) -> "Triangulation":
        """Retriangulation replacing edge ``e`` by the other quad diagonal.

        Slot reuse: both quad triangles keep their slot triples, with the new
        diagonal stored in the slots previously holding ``e``.
        """
        if not self.is_flippable(e):
            raise UnflippableEdge("edge %d has both sides on one triangle" % e)
        a, b = self._edges[e]
        a1, a2 = _next_slot(a), _next_slot(_next_slot(a))
        b1, b2 = _next_slot(b), _next_slot(_next_slot(b))

        # Quad corners as old vertex ids: a is v0->v1, apexes u (T1), w (T2).
        v0 = self._vertex_of_slot[a]
        v1 = self._vertex_of_slot[b]
        u = self._vertex_of_slot[a2]
        w = self._vertex_of_slot[b2]

        # New triangles: (w->u, u->v0, v0->w) on T1 slots, (u->w, w->v1, v1->u) on T2.
        move = {a2: a1, b1: a2, b2: b1, a1: b2}
        glue = list(self._glue)
        old_glue = self._glue
        for old_s, new_s in move.items():
            partner = old_glue[old_s]
            partner_new = move.get(partner, partner)
            glue[new_s] = partner_new
            glue[partner_new] = new_s
        glue[a] = b
        glue[b] = a

        tails = {a: w, a1: u, a2: v0, b: u, b1: w, b2: v1}

        # Recompute vertex orbits and carry tags through old vertex identity.
        def old_tail(slot: int) -> int:
            return tails.get(slot, self._vertex_of_slot[slot])

        n = self._num_slots
        seen = [False] * n
        new_tags = []
        order = []
        for s in range(n):
            if seen[s]:
                continue
            cur = s
            members = []
            while not seen[cur]:
                seen[cur] = True
                members.append(cur)
                cur = glue[_prev_slot(cur)]
            olds = {old_tail(m) for m in members}
            if len(olds) != 1:
                raise AssertionError("flip merged distinct vertices: %s" % olds)
            order.append(olds.pop())
        for ov in order:
            new_tags.append(self._vertex_tags[ov])
        return Triangulation(self.sig, glue, new_tags)

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        body = {
            "sig": {"genus": self.sig.genus, "punctures": self.sig.punctures},
            "triangles": [list(self.slots_of_triangle(t)) for t in range(self.num_triangles)],
            "gluing": list(self._glue),
            "vertex_tags": list(self._vertex_tags),
        }
        body["id"] = self.id
        return body

    @classmethod
    def from_json_dict(cls, data: dict) -> "Triangulation":
        sig = SurfaceSig(data["sig"]["genus"], data["sig"]["punctures"])
        tri = cls(sig, list(data["gluing"]), list(data["vertex_tags"]))
        if "id" in data and data["id"] != tri.id:
            raise ValueError("triangulation id mismatch")
        return tri

    @property
    def id(self) -> str:
        if self._id is None:
            body = {
                "sig": {"genus": self.sig.genus, "punctures": self.sig.punctures},
                "gluing": list(self._glue),
                "vertex_tags": list(self._vertex_tags),
            }
            blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
            self._id = hashlib.sha256(blob.encode()).hexdigest()
        return self._id

    def __eq__(self, other):
        return isinstance(other, Triangulation) and self.id == other.id

    def __hash__(self):
        return hash(self.id)

    def __repr__(self):
        return "Triangulation(g=%d, n=%d, triangles=%d, id=%s)" % (
            self.sig.genus,
            self.sig.punctures,
            self.num_triangles,
            self.id[:12],
        )
