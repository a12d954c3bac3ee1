"""Webs as boundary-rooted planar combinatorial maps.

A web is a graph properly embedded in a disk, considered up to isotopy rel
boundary.  We represent the embedding combinatorially: every edge is a pair
of darts (half-edges) exchanged by the involution ``alpha``; every internal
vertex carries the counterclockwise cyclic order of its incident darts; the
boundary is a linear sequence of univalent attachment points read
counterclockwise from a basepoint.  Isotopy classes in the disk are exactly
isomorphism classes of such boundary-rooted maps (once every component
touches the boundary), so a deterministic traversal code is a complete
isotopy invariant.

Faces are the orbits of ``d -> rotation-successor(alpha(d))``; the disk
boundary is capped by a virtual circle so that Euler's formula
V - E + F = 2 certifies genus 0.  Each vertex kind assigns formal corner
angles to the gaps between consecutive ports, which is what the reduction
engine uses to decide whether an internal face is elliptic.

Closed loops (circles with no vertices) have no darts; they are carried as
a per-label multiplicity, since their value is always a scalar.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

__all__ = [
    "VertexKind",
    "WebGraph",
    "FaceWalk",
    "ValidationError",
    "KINDS",
    "kind_of",
    "dual_word",
    "word_weight_counts",
    "web_from_json",
    "web_to_json",
]


class ValidationError(ValueError):
    """A WebGraph violates a structural invariant."""


@dataclass(frozen=True)
class VertexKind:
    """A vertex type: port labels in ccw order plus formal corner angles.

    ``ports[i]`` is the strand label required at rotation position i;
    ``gaps[i]`` is the formal angle in degrees between ports i and i+1
    (indices mod the degree).  ``out_ports`` fixes strand orientation per
    port for oriented spiders (True = edge directed away from the vertex);
    None means the kind imposes no orientation constraint.  ``mirror_perm``
    maps the reflected vertex back onto a kind: reflected rotation position
    i holds the old dart at index ``mirror_perm[i]``; ``mirror_kind`` names
    the kind of the reflected vertex.  ``crossing`` marks 4-valent crossing
    markers (strand through ports 1,3 passes over the strand through 0,2).
    """

    name: str
    ports: tuple[str, ...]
    gaps: tuple[int, ...]
    out_ports: Optional[tuple[bool, ...]] = None
    mirror_perm: tuple[int, ...] = ()
    mirror_kind: str = ""
    crossing: bool = False

    @property
    def degree(self) -> int:
        return len(self.ports)

    @property
    def rotation_step(self) -> int:
        """Smallest cyclic shift of the port list that is an automorphism.

        Crossings only admit even shifts (an odd shift would swap the over
        and under strands); other kinds admit any shift preserving port
        labels and orientations.  Equals ``degree`` when only the identity
        qualifies.
        """
        n = self.degree
        for r in range(1, n):
            if self.crossing and r % 2:
                continue
            if any(self.ports[(i + r) % n] != self.ports[i] for i in range(n)):
                continue
            if self.out_ports is not None and any(
                self.out_ports[(i + r) % n] != self.out_ports[i] for i in range(n)
            ):
                continue
            return r
        return n


def _kinds() -> dict[tuple[str, str], VertexKind]:
    table: dict[tuple[str, str], VertexKind] = {}

    def add(spider: str, k: VertexKind):
        table[(spider, k.name)] = k

    rev3 = (1, 0, 2)
    rev4 = (3, 2, 1, 0)
    # A2: oriented trivalent source (all edges outgoing) and sink (all incoming)
    add("A2", VertexKind("src", ("1",) * 3, (120,) * 3, (True,) * 3, rev3, "src"))
    add("A2", VertexKind("snk", ("1",) * 3, (120,) * 3, (False,) * 3, rev3, "snk"))
    # B2: trivalent (1,1,2) with 90 degrees between the single edges, and the
    # symmetric tetravalent vertex
    add("B2", VertexKind("v", ("1", "1", "2"), (90, 135, 135), None, rev3, "v"))
    add("B2", VertexKind("x4", ("1",) * 4, (90,) * 4, None, rev4, "x4"))
    # G2: trivalent (1,1,1) all 120, and (1,1,2) with 60 between the singles
    add("G2", VertexKind("v", ("1",) * 3, (120,) * 3, None, rev3, "v"))
    add("G2", VertexKind("v2", ("1", "1", "2"), (60, 120, 120), None, rev3, "v2"))
    # Crossing markers: 4-valent, strand through ports (1,3) crosses OVER the
    # strand through ports (0,2).  Reflection of the disk keeps the over
    # strand on top (and so flips the crossing sign); the order reversal
    # anchored at port 0 keeps the under strand on ports (0,2).
    refl4 = (0, 3, 2, 1)
    add("A2", VertexKind("xp", ("1",) * 4, (90,) * 4, (True, False, False, True), refl4, "xn", crossing=True))
    add("A2", VertexKind("xn", ("1",) * 4, (90,) * 4, (True, True, False, False), refl4, "xp", crossing=True))
    for spider, pairs in (
        ("A1", [("1", "1")]),
        ("B2", [("1", "1"), ("1", "2"), ("2", "1"), ("2", "2")]),
        ("G2", [("1", "1"), ("1", "2"), ("2", "1"), ("2", "2")]),
    ):
        for under, over in pairs:
            name = f"x{under}{over}"
            add(
                spider,
                VertexKind(
                    name,
                    (under, over, under, over),
                    (90,) * 4,
                    None,
                    refl4,
                    name,
                    crossing=True,
                ),
            )
    return table


KINDS = _kinds()


def kind_of(spider: str, name: str) -> VertexKind:
    try:
        return KINDS[(spider, name)]
    except KeyError:
        raise ValidationError(f"unknown vertex kind {name!r} for spider {spider}") from None


def dual_word(word: str, spider: str) -> str:
    """Reverse the word; for A2 also flip the signs."""
    if spider == "A2":
        flip = {"+": "-", "-": "+"}
        return "".join(flip[c] for c in reversed(word))
    return word[::-1]


def word_weight_counts(word: str, spider: str) -> tuple[int, int]:
    """Counts (n1, n2) of the two fundamental strand symbols in a word."""
    if spider == "A1":
        return len(word), 0
    if spider == "A2":
        return word.count("+"), word.count("-")
    return word.count("1"), word.count("2")


@dataclass
class FaceWalk:
    """An internal face: one dart per side, with corner data.

    ``darts[i]`` is traversed from its owner toward its partner; the corner
    following it sits at ``corner_vertices[i]`` with the stated interior
    angle.  The face is elliptic when the total exterior angle
    (sum of 180 - interior) is less than 360 degrees.
    """

    darts: tuple
    corner_vertices: tuple
    interior_angles: tuple[int, ...]

    @property
    def side_count(self) -> int:
        return len(self.darts)

    @property
    def exterior_total(self) -> int:
        return sum(180 - a for a in self.interior_angles)


class WebGraph:
    """A mutable boundary-rooted planar map; treated as immutable once built."""

    def __init__(self, spider: str):
        self.spider = spider
        self.alpha: dict[int, int] = {}
        self.vertex_kind: dict[int, str] = {}
        self.vertex_darts: dict[int, list[int]] = {}
        self.dart_vertex: dict[int, int] = {}  # only darts at internal vertices
        self.boundary: list[int] = []
        self.label: dict[int, str] = {}
        self.toward: dict[int, Optional[bool]] = {}  # True: edge points at this dart's end
        self.loops: dict[str, int] = {}
        self.outer_dart: Optional[int] = None  # designated outer face for closed webs
        self._next_dart = 0
        self._next_vertex = 0
        self._code = None

    # -- construction --------------------------------------------------------

    def new_dart(self) -> int:
        d = self._next_dart
        self._next_dart += 1
        return d

    def add_vertex(self, kind_name: str) -> tuple[int, list[int]]:
        """Create an internal vertex with one dangling dart per port."""
        kind = kind_of(self.spider, kind_name)
        v = self._next_vertex
        self._next_vertex += 1
        darts = [self.new_dart() for _ in kind.ports]
        self.vertex_kind[v] = kind_name
        self.vertex_darts[v] = darts
        for d in darts:
            self.dart_vertex[d] = v
        self._code = None
        return v, darts

    def add_boundary(self, count: int = 1) -> list[int]:
        """Append boundary attachment points; returns their dangling darts."""
        darts = [self.new_dart() for _ in range(count)]
        self.boundary.extend(darts)
        self._code = None
        return darts

    def connect(self, d1: int, d2: int, label: str, head: Optional[int] = None):
        """Pair two dangling darts into an edge.

        ``head`` (one of d1, d2, or None) is the dart at the endpoint the
        edge points toward; required exactly for oriented (A2) strands.
        """
        if d1 in self.alpha or d2 in self.alpha:
            raise ValidationError("dart already connected")
        if d1 == d2:
            raise ValidationError("cannot connect a dart to itself")
        self.alpha[d1] = d2
        self.alpha[d2] = d1
        self.label[d1] = self.label[d2] = label
        if head is None:
            self.toward[d1] = self.toward[d2] = None
        else:
            if head not in (d1, d2):
                raise ValidationError("head must be one of the connected darts")
            self.toward[d1] = d1 == head
            self.toward[d2] = d2 == head
        self._code = None

    def add_loop(self, label: str, count: int = 1):
        self.loops[label] = self.loops.get(label, 0) + count
        if not self.loops[label]:
            del self.loops[label]
        self._code = None

    def copy(self) -> "WebGraph":
        w = WebGraph.__new__(WebGraph)
        w.spider = self.spider
        w.alpha = dict(self.alpha)
        w.vertex_kind = dict(self.vertex_kind)
        w.vertex_darts = {v: list(ds) for v, ds in self.vertex_darts.items()}
        w.dart_vertex = dict(self.dart_vertex)
        w.boundary = list(self.boundary)
        w.label = dict(self.label)
        w.toward = dict(self.toward)
        w.loops = dict(self.loops)
        w.outer_dart = self.outer_dart
        w._next_dart = self._next_dart
        w._next_vertex = self._next_vertex
        w._code = self._code
        return w

    # -- basic queries --------------------------------------------------------

    def kind(self, v: int) -> VertexKind:
        return kind_of(self.spider, self.vertex_kind[v])

    def boundary_word(self) -> str:
        out = []
        for d in self.boundary:
            lab = self.label.get(d)
            if lab is None:
                raise ValidationError("boundary dart not connected")
            if self.spider == "A2":
                out.append("+" if self.toward[d] else "-")
            else:
                out.append(lab)
        return "".join(out)

    def is_boundary_dart(self, d: int) -> bool:
        return d not in self.dart_vertex

    def rotation_next(self, d: int) -> int:
        """The next dart counterclockwise around d's internal vertex."""
        v = self.dart_vertex[d]
        ds = self.vertex_darts[v]
        return ds[(ds.index(d) + 1) % len(ds)]

    def edge_darts(self) -> Iterable[tuple[int, int]]:
        for d, e in self.alpha.items():
            if d < e:
                yield d, e

    def vertex_count(self) -> int:
        return len(self.vertex_kind)

    # -- surgery (used by the reduction engine) -------------------------------

    def delete_edge(self, d: int):
        """Remove the edge containing dart d from the map."""
        e = self.alpha.pop(d)
        del self.alpha[e]
        for x in (d, e):
            self.label.pop(x, None)
            self.toward.pop(x, None)
            v = self.dart_vertex.pop(x, None)
            if v is not None:
                self.vertex_darts[v].remove(x)
            else:
                self.boundary.remove(x)
        self._code = None

    def unpair(self, d: int) -> int:
        """Break the edge containing dart d, leaving both darts in place.

        Returns the partner dart.  Used by splicing surgery, where the freed
        darts are immediately reconnected.
        """
        e = self.alpha.pop(d)
        del self.alpha[e]
        for x in (d, e):
            self.label.pop(x, None)
            self.toward.pop(x, None)
        self._code = None
        return e

    def discard_dart(self, d: int):
        """Remove an unpaired dart from its owner."""
        if d in self.alpha:
            raise ValidationError("discarding a paired dart")
        v = self.dart_vertex.pop(d, None)
        if v is not None:
            self.vertex_darts[v].remove(d)
        elif d in self.boundary:
            self.boundary.remove(d)
        self._code = None

    def delete_isolated_vertex(self, v: int):
        if self.vertex_darts[v]:
            raise ValidationError("vertex still has darts")
        del self.vertex_darts[v]
        del self.vertex_kind[v]
        self._code = None

    def demote_vertex(self, v: int):
        """Forget v's kind, leaving a nameless pass-through vertex.

        Used mid-surgery: a face vertex whose ring edges were deleted keeps
        its remaining darts and is then smoothed away.
        """
        self.vertex_kind[v] = None  # type: ignore[assignment]
        self._code = None

    def smooth_vertex(self, v: int):
        """Splice out a degree-2 vertex, merging its edges (or closing a loop)."""
        ds = self.vertex_darts[v]
        if len(ds) != 2:
            raise ValidationError(f"cannot smooth vertex of degree {len(ds)}")
        d1, d2 = ds
        e1, e2 = self.alpha[d1], self.alpha[d2]
        lab = self.label[d1]
        if self.label[d2] != lab:
            raise ValidationError("smoothing would merge edges of different labels")
        t1, t2 = self.toward[d1], self.toward[d2]
        if t1 is not None and t1 == t2:
            raise ValidationError("smoothing would merge inconsistently oriented edges")
        if e1 == d2:
            # the two darts close a circle at v
            self.unpair(d1)
            self.discard_dart(d1)
            self.discard_dart(d2)
            self.delete_isolated_vertex(v)
            self.add_loop(lab)
            return
        # merge edge (e1,d1) with (d2,e2) into (e1,e2)
        head = e2 if t1 else (e1 if t1 is not None else None)
        self.unpair(d1)
        self.unpair(d2)
        self.discard_dart(d1)
        self.discard_dart(d2)
        self.delete_isolated_vertex(v)
        self.connect(e1, e2, lab, head)

    # -- codes and equality ----------------------------------------------------

    def canonical_code(self) -> bytes:
        """A complete invariant of the boundary-rooted labeled planar map.

        Deterministic depth-first traversal from the boundary basepoint,
        exploring each vertex's ports counterclockwise from the entry dart.
        Requires every component to touch the boundary and all closed loops
        to have been reduced away.
        """
        if self._code is not None:
            return self._code
        if self.loops:
            raise ValidationError("canonical_code on a web with un-reduced closed loops")
        tokens: list = [self.spider, self.boundary_word()]
        visited_vertices: dict[int, tuple[int, int]] = {}  # vid -> (order, entry index)
        visited_edges: set[int] = set()

        def explore(d: int):
            # traverse the edge from dart d to its partner
            stack = [d]
            while stack:
                d = stack.pop()
                if d in visited_edges:
                    continue
                e = self.alpha[d]
                visited_edges.add(d)
                visited_edges.add(e)
                t = self.toward[d]
                orient = "." if t is None else ("<" if t else ">")
                v = self.dart_vertex.get(e)
                if v is None:
                    tokens.append(("b", self.boundary.index(e), self.label[d], orient))
                    continue
                ds = self.vertex_darts[v]
                idx = ds.index(e)
                if v in visited_vertices:
                    order, entry = visited_vertices[v]
                    tokens.append(
                        ("r", order, (idx - entry) % len(ds), self.label[d], orient)
                    )
                    continue
                visited_vertices[v] = (len(visited_vertices), idx)
                kind = self.kind(v)
                tokens.append(
                    ("v", kind.name, idx % kind.rotation_step, self.label[d], orient)
                )
                # push ccw successors so they pop in ccw order
                succs = [ds[(idx + i) % len(ds)] for i in range(1, len(ds))]
                for s in reversed(succs):
                    stack.append(s)

        for i, bd in enumerate(self.boundary):
            if bd not in visited_edges:
                tokens.append(("s", i))
                explore(bd)
        if len(visited_edges) != len(self.alpha):
            raise ValidationError("web has components not attached to the boundary")
        self._code = repr(tokens).encode()
        return self._code

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WebGraph)
            and self.spider == other.spider
            and self.canonical_code() == other.canonical_code()
        )

    def __hash__(self) -> int:
        return hash(self.canonical_code())

    def __repr__(self) -> str:
        return (
            f"<WebGraph {self.spider} boundary={self.boundary_word()!r} "
            f"V={self.vertex_count()} E={len(self.alpha) // 2} loops={self.loops}>"
        )

    # -- faces ------------------------------------------------------------------

    def _face_orbits(self):
        """All face orbits of the map capped with a virtual boundary circle.

        Yields lists of items; web darts appear as ints, virtual circle darts
        as tuples.  Traversal: next(d) = rotation-successor of alpha(d).
        """
        n = len(self.boundary)
        # rotation successor including boundary points: at boundary point i the
        # ccw order is [arc-to-next, web dart, arc-to-prev]
        def succ(item):
            if isinstance(item, tuple):
                which, i = item
                # alpha of virtual darts: ('n', i) pairs with ('p', (i+1) % n)
                partner = ("p", (i + 1) % n) if which == "n" else ("n", (i - 1) % n)
                # rotation at partner's endpoint
                j = partner[1]
                if partner[0] == "n":
                    # order [n, w, p]: after 'n' comes the web dart
                    return self.boundary[j]
                return ("n", j)  # after 'p' comes 'n'
            e = self.alpha[item]
            v = self.dart_vertex.get(e)
            if v is None:
                # boundary point: after the web dart comes the arc to prev
                return ("p", self.boundary.index(e))
            return self.rotation_next(e)

        seen = set()
        items: list = list(self.alpha.keys())
        if n:
            items += [("n", i) for i in range(n)] + [("p", i) for i in range(n)]
        for start in items:
            if start in seen:
                continue
            orbit = []
            x = start
            while True:
                orbit.append(x)
                seen.add(x)
                x = succ(x)
                if x == start:
                    break
            yield orbit

    def faces(self) -> list[FaceWalk]:
        """Internal faces only (no virtual circle darts; outer face excluded)."""
        out = []
        outer_orbit_key = None
        if not self.boundary and self.alpha:
            if self.outer_dart is None:
                outer_orbit_key = min(self.alpha)
            else:
                outer_orbit_key = self.outer_dart
        for orbit in self._face_orbits():
            if any(isinstance(x, tuple) for x in orbit):
                continue
            if outer_orbit_key is not None and outer_orbit_key in orbit:
                continue
            corners = []
            angles = []
            for d in orbit:
                e = self.alpha[d]
                v = self.dart_vertex[e]
                kind = self.kind(v)
                idx = self.vertex_darts[v].index(e)
                corners.append(v)
                angles.append(kind.gaps[idx])
            out.append(FaceWalk(tuple(orbit), tuple(corners), tuple(angles)))
        return out

    def euler_check(self) -> bool:
        """V - E + F = 2 on the capped map certifies genus 0."""
        n = len(self.boundary)
        V = len(self.vertex_kind) + n
        E = len(self.alpha) // 2 + n
        F = sum(1 for _ in self._face_orbits())
        if not self.alpha and not n:
            return True
        if not n:
            # closed map: no virtual circle, plain Euler formula
            return V - E + F == 2
        return V - E + F == 2

    # -- whole-map transformations -----------------------------------------------

    def rotate_basepoint(self, k: int) -> "WebGraph":
        w = self.copy()
        n = len(w.boundary)
        if n:
            k %= n
            w.boundary = w.boundary[k:] + w.boundary[:k]
        w._code = None
        return w

    def mirror(self) -> "WebGraph":
        """Reflect the disk (reverses boundary order and all rotations)."""
        w = self.copy()
        w.boundary = list(reversed(w.boundary))
        for v in list(w.vertex_kind):
            kind = self.kind(v)
            ds = self.vertex_darts[v]
            w.vertex_darts[v] = [ds[i] for i in kind.mirror_perm]
            w.vertex_kind[v] = kind.mirror_kind
        w._code = None
        return w

    def dualize(self) -> "WebGraph":
        """Reverse all strand orientations (A2: swaps sources and sinks)."""
        w = self.copy()
        if self.spider == "A2":
            swap = {"src": "snk", "snk": "src"}
            for v, k in list(w.vertex_kind.items()):
                w.vertex_kind[v] = swap.get(k, k)
            for d, t in list(w.toward.items()):
                if t is not None:
                    w.toward[d] = not t
        w._code = None
        return w

    # -- validation ----------------------------------------------------------------

    def validate(self) -> list[str]:
        """Return a list of violation descriptions (empty = valid)."""
        problems = []
        for d, e in self.alpha.items():
            if self.alpha.get(e) != d:
                problems.append(f"dart pairing is not an involution at {d}")
            if self.label.get(d) != self.label.get(e):
                problems.append(f"edge {d}-{e} has mismatched labels")
        for d in list(self.dart_vertex) + list(self.boundary):
            if d not in self.alpha:
                problems.append(f"dangling dart {d}")
        for v, ds in self.vertex_darts.items():
            kind = self.kind(v)
            if len(ds) != kind.degree:
                problems.append(f"vertex {v} has degree {len(ds)}, kind wants {kind.degree}")
                continue
            for i, d in enumerate(ds):
                if self.dart_vertex.get(d) != v:
                    problems.append(f"dart {d} not owned by vertex {v}")
                lab = self.label.get(d)
                if lab is not None and lab != kind.ports[i]:
                    problems.append(
                        f"vertex {v} port {i} wants label {kind.ports[i]}, has {lab}"
                    )
                if kind.out_ports is not None and d in self.toward:
                    t = self.toward[d]
                    # out_ports[i] True: edge directed away, i.e. toward the far end
                    if t is None or t == kind.out_ports[i]:
                        problems.append(f"vertex {v} port {i} has wrong orientation")
        if self.spider == "A2":
            for d, t in self.toward.items():
                if t is None and d in self.alpha:
                    problems.append(f"A2 edge at dart {d} lacks orientation")
        if problems:
            return problems
        if not self.euler_check():
            problems.append("rotation system is not planar (Euler check failed)")
        return problems

    def require_valid(self):
        problems = self.validate()
        if problems:
            raise ValidationError("; ".join(problems))


# -- JSON round trip ----------------------------------------------------------------


def web_to_json(w: WebGraph) -> str:
    edges = []
    for d, e in sorted(w.edge_darts()):
        entry: dict = {"darts": [d, e], "label": w.label[d]}
        t = w.toward[d]
        entry["oriented"] = t is not None
        if t is not None:
            entry["head"] = d if t else e
        edges.append(entry)
    doc = {
        "spider": w.spider,
        "boundary": [[d, c] for d, c in zip(w.boundary, w.boundary_word())],
        "vertices": [
            {"kind": w.vertex_kind[v], "darts": w.vertex_darts[v]}
            for v in sorted(w.vertex_kind)
        ],
        "edges": edges,
        "loops": dict(sorted(w.loops.items())),
    }
    if w.outer_dart is not None:
        doc["outer_dart"] = w.outer_dart
    return json.dumps(doc)


def web_from_json(text: str) -> WebGraph:
    doc = json.loads(text)
    w = WebGraph(doc["spider"])
    used = set()
    for entry in doc["boundary"]:
        d = entry[0] if isinstance(entry, list) else entry
        w.boundary.append(d)
        used.add(d)
    for i, vdoc in enumerate(doc["vertices"]):
        w.vertex_kind[i] = vdoc["kind"]
        w.vertex_darts[i] = list(vdoc["darts"])
        for d in vdoc["darts"]:
            w.dart_vertex[d] = i
            used.add(d)
    w._next_vertex = len(doc["vertices"])
    for edoc in doc["edges"]:
        d, e = edoc["darts"]
        w.alpha[d] = e
        w.alpha[e] = d
        w.label[d] = w.label[e] = edoc["label"]
        if edoc.get("oriented"):
            head = edoc["head"]
            w.toward[d] = d == head
            w.toward[e] = e == head
        else:
            w.toward[d] = w.toward[e] = None
    w.loops = {k: int(v) for k, v in doc.get("loops", {}).items()}
    w.outer_dart = doc.get("outer_dart")
    w._next_dart = max(used, default=-1) + 1
    w.require_valid()
    return w
