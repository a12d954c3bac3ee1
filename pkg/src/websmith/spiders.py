"""Built-in spider signatures: rule data for A1, A2, B2 and G2 webs.

A spider signature packages everything the reduction engine needs to know
about one strand algebra: the strand alphabet, the admissible vertex kinds
with their formal corner angles (kept in :mod:`websmith.webmap`), the scalar
value of each closed loop, the local rewriting rules for elliptic faces and
internal double edges, and the expansion of each crossing kind into planar
webs.

Local rules are stored as data.  A rule's left side is a face shape (cyclic
sequence of side labels and corner kinds) or a distinguished edge; its right
side is a formal linear combination of *local terms*.  A local term lists
the internal vertices it creates and how everything is wired to the legs of
the removed configuration; legs are numbered counterclockwise.  Two machine
checks run at import time: every term must use each leg exactly once with a
consistent strand label (interface preservation), and every term must have
strictly smaller weighted vertex count than the left side, where a vertex's
weight is the number of double-strand endpoints it absorbs plus one
whenever trivalent (concretely: weight 1 for all trivalent kinds except the
(1,1,2) kind of G2 which weighs 2, and weight 1 for the B2 tetravalent
vertex).  The weighted count is the termination measure of the engine.

Two special rule slots fall outside the decreasing-measure discipline and
are used only by the engine's closed-web strategy for B2, with a separate
termination argument (they strictly shrink the smallest elliptic face):
``x_expand`` rewrites the tetravalent vertex back into a double edge, and
``h_rotate`` is the 90-degree rotation identity for a double edge flanked
by two trivalent vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional

from .qcoeff import QRational, parse_rational, qint
from .webmap import KINDS, FaceWalk, WebGraph, kind_of

__all__ = [
    "LocalTerm",
    "FaceRule",
    "EdgeRule",
    "VertexRule",
    "SpiderSig",
    "builtin_sig",
    "is_elliptic",
    "match_rule",
]


def R(text: str) -> QRational:
    return parse_rational(text)


# A wiring endpoint: ("leg", i) refers to leg i of the removed configuration,
# ("v", j, p) to port p of the j-th vertex created by the term.
End = tuple


@dataclass(frozen=True)
class LocalTerm:
    coeff: QRational
    vertices: tuple[str, ...] = ()
    wires: tuple[tuple[End, End], ...] = ()


@dataclass(frozen=True)
class FaceRule:
    """Rewrites an internal face: ``sides[i]`` is the label of the i-th side,
    ``corners[i]`` the vertex kind between sides i and i+1.  Matching is up
    to cyclic rotation.  Leg i is the unique non-face port at corner i."""

    name: str
    sides: tuple[str, ...]
    corners: tuple[str, ...]
    terms: tuple[LocalTerm, ...]


@dataclass(frozen=True)
class EdgeRule:
    """Rewrites an internal edge of the stated label whose two trivalent
    endpoints carry legs (a, b) and (c, d); legs are numbered (a, b, c, d)
    counterclockwise around the pair."""

    name: str
    label: str
    endpoint_kind: str
    leg_labels: tuple[str, ...]
    terms: tuple[LocalTerm, ...]


@dataclass(frozen=True)
class VertexRule:
    """Expands a single vertex (a crossing, or B2's tetravalent vertex in
    the closed-web strategy); leg i is the edge at port i."""

    name: str
    kind: str
    terms: tuple[LocalTerm, ...]


@dataclass(frozen=True)
class SpiderSig:
    kind: str
    strand_labels: tuple[str, ...]
    loop_values: Mapping[str, QRational]
    face_rules: tuple[FaceRule, ...]
    double_edge: Optional[EdgeRule]
    crossings: Mapping[str, VertexRule]
    vertex_weight: Mapping[str, int]
    x_expand: Optional[VertexRule] = None
    h_rotate: Optional[EdgeRule] = None

    def weight(self, kind_name: str) -> int:
        return self.vertex_weight[kind_name]


def is_elliptic(face: FaceWalk, sig: Optional[SpiderSig] = None) -> bool:
    """A face is elliptic when its total exterior angle is under 360 degrees.

    With every trivalent A2 corner at 120 degrees this is the familiar
    "fewer than six sides" criterion.
    """
    return face.exterior_total < 360


# ---------------------------------------------------------------------------
# rule construction helpers


def _arcs(coeff: QRational, *pairs: tuple[int, int]) -> LocalTerm:
    return LocalTerm(coeff, (), tuple((("leg", i), ("leg", j)) for i, j in pairs))


def _term(coeff: QRational, vertices: tuple[str, ...], wires) -> LocalTerm:
    return LocalTerm(coeff, vertices, tuple(wires))


def _rule_leg_labels(spider: str, rule: FaceRule) -> tuple[str, ...]:
    """Leg label at each corner: the corner kind's ports minus the two face
    ports (well-defined for the trivalent corners used by built-in rules)."""
    labs = []
    k = len(rule.sides)
    for i, kname in enumerate(rule.corners):
        ports = list(kind_of(spider, kname).ports)
        ports.remove(rule.sides[i])
        ports.remove(rule.sides[(i + 1) % k])
        if len(ports) != 1:
            raise AssertionError(f"rule {rule.name}: corner {i} is not trivalent")
        labs.append(ports[0])
    return tuple(labs)


def _check_terms(
    spider: str,
    name: str,
    leg_labels: tuple[str, ...],
    lhs_weight: int,
    terms: tuple[LocalTerm, ...],
    weights: Mapping[str, int],
    strict: bool = True,
):
    """Interface preservation and the decreasing weighted-vertex measure."""
    for t in terms:
        used: dict[int, str] = {}

        def end_label(end: End) -> str:
            if end[0] == "leg":
                used[end[1]] = used.get(end[1], "") or "x"
                return leg_labels[end[1]]
            _, vi, pi = end
            return kind_of(spider, t.vertices[vi]).ports[pi]

        seen_legs: list[int] = []
        port_use: dict[tuple[int, int], int] = {}
        for e1, e2 in t.wires:
            if end_label(e1) != end_label(e2):
                raise AssertionError(f"rule {name}: wire {e1}-{e2} label mismatch")
            for e in (e1, e2):
                if e[0] == "leg":
                    seen_legs.append(e[1])
                else:
                    port_use[(e[1], e[2])] = port_use.get((e[1], e[2]), 0) + 1
        if sorted(seen_legs) != list(range(len(leg_labels))):
            raise AssertionError(f"rule {name}: legs used {sorted(seen_legs)}")
        for vi, kname in enumerate(t.vertices):
            for pi in range(kind_of(spider, kname).degree):
                if port_use.get((vi, pi), 0) != 1:
                    raise AssertionError(f"rule {name}: vertex {vi} port {pi} misused")
        if strict:
            rhs_weight = sum(weights[k] for k in t.vertices)
            if rhs_weight >= lhs_weight:
                raise AssertionError(
                    f"rule {name}: weighted vertex count {rhs_weight} >= {lhs_weight}"
                )


# ---------------------------------------------------------------------------
# the four signatures


def _a1_sig() -> SpiderSig:
    weights = {"x11": 1}
    crossings = {
        "x11": VertexRule(
            "a1 crossing",
            "x11",
            (
                _arcs(R("-1*q^1/4"), (0, 1), (2, 3)),
                _arcs(R("-1*q^-1/4"), (1, 2), (3, 0)),
            ),
        )
    }
    return SpiderSig(
        kind="A1",
        strand_labels=("1",),
        loop_values={"1": R("-1*q^1/2 - 1*q^-1/2")},
        face_rules=(),
        double_edge=None,
        crossings=crossings,
        vertex_weight=weights,
    )


def _a2_sig() -> SpiderSig:
    weights = {"src": 1, "snk": 1, "xp": 1, "xn": 1}
    bigon = FaceRule(
        "bigon",
        ("1", "1"),
        ("src", "snk"),
        (_arcs(R("-1*q^1/2 - 1*q^-1/2"), (0, 1)),),
    )
    square = FaceRule(
        "square",
        ("1", "1", "1", "1"),
        ("src", "snk", "src", "snk"),
        (
            _arcs(QRational(qint(1)), (0, 1), (2, 3)),
            _arcs(QRational(qint(1)), (1, 2), (3, 0)),
        ),
    )
    # Crossing expansions.  Ports are numbered ccw with port 0 on the under
    # strand; "xp" has strand orientations (out, in, in, out), "xn" has
    # (out, out, in, in).  Each expands into the trivalent cut-through (a
    # source over a sink) and the orientation-respecting pair of arcs.
    def _h(src_legs, snk_legs):
        return (
            ("src", "snk"),
            (
                (("v", 0, 0), ("v", 1, 0)),
                (("v", 0, 1), ("leg", src_legs[0])),
                (("v", 0, 2), ("leg", src_legs[1])),
                (("v", 1, 1), ("leg", snk_legs[0])),
                (("v", 1, 2), ("leg", snk_legs[1])),
            ),
        )

    crossings = {
        "xp": VertexRule(
            "a2 crossing (over strand exits ccw of the under strand)",
            "xp",
            (
                _term(R("q^1/6"), *_h((3, 0), (1, 2))),
                _arcs(R("q^-1/3"), (0, 1), (2, 3)),
            ),
        ),
        "xn": VertexRule(
            "a2 crossing (over strand exits cw of the under strand)",
            "xn",
            (
                _term(R("q^-1/6"), *_h((0, 1), (2, 3))),
                _arcs(R("q^1/3"), (1, 2), (3, 0)),
            ),
        ),
    }
    return SpiderSig(
        kind="A2",
        strand_labels=("1",),
        loop_values={"1": QRational(qint(3))},
        face_rules=(bigon, square),
        double_edge=None,
        crossings=crossings,
        vertex_weight=weights,
    )


def _b2_sig() -> SpiderSig:
    weights = {"v": 1, "x4": 1, "x11": 2, "x12": 2, "x21": 2, "x22": 2}
    one = QRational(qint(1))
    tadpole = FaceRule("tadpole", ("1",), ("v",), ())
    bigon11 = FaceRule(
        "bigon",
        ("1", "1"),
        ("v", "v"),
        (_arcs(R("-1*q - 2 - 1*q^-1"), (0, 1)),),
    )
    # A single/double bigon is worth (1 - [single loop]) arcs; this follows
    # from rotating its double side and collapsing the tadpole that appears.
    bigon12 = FaceRule(
        "bigon-mixed",
        ("1", "2"),
        ("v", "v"),
        (_arcs(R("1*q^2 + 1*q + 1 + 1*q^-1 + 1*q^-2"), (0, 1)),),
    )
    triangle111 = FaceRule("triangle", ("1", "1", "1"), ("v", "v", "v"), ())
    # Likewise derived by one rotation of the double side: the all-but-one
    # single triangle collapses onto a single trivalent vertex.
    triangle112 = FaceRule(
        "triangle-mixed",
        ("1", "1", "2"),
        ("v", "v", "v"),
        (
            _term(
                R("-1*q - 1 - 1*q^-1"),
                ("v",),
                (
                    (("v", 0, 0), ("leg", 1)),
                    (("v", 0, 1), ("leg", 2)),
                    (("v", 0, 2), ("leg", 0)),
                ),
            ),
        ),
    )
    # Internal double edge with legs (a, b) on one endpoint and (c, d) on the
    # other, ccw: equals the tetravalent vertex plus the two-arc smoothing.
    double_edge = EdgeRule(
        "double-edge",
        "2",
        "v",
        ("1",) * 4,
        (
            _term(
                one,
                ("x4",),
                tuple((("v", 0, i), ("leg", i)) for i in range(4)),
            ),
            _arcs(one, (0, 1), (2, 3)),
        ),
    )
    # Closed-web strategy: the tetravalent vertex written back as a double
    # edge minus the smoothing, and the rotation identity for a double edge.
    x_expand = VertexRule(
        "x-expand",
        "x4",
        (
            _term(
                one,
                ("v", "v"),
                (
                    (("v", 0, 0), ("leg", 0)),
                    (("v", 0, 1), ("leg", 1)),
                    (("v", 0, 2), ("v", 1, 2)),
                    (("v", 1, 0), ("leg", 2)),
                    (("v", 1, 1), ("leg", 3)),
                ),
            ),
            _arcs(R("-1"), (0, 1), (2, 3)),
        ),
    )
    h_rotate = EdgeRule(
        "h-rotate",
        "2",
        "v",
        ("1",) * 4,
        (
            _term(
                one,
                ("v", "v"),
                (
                    (("v", 0, 0), ("leg", 3)),
                    (("v", 0, 1), ("leg", 0)),
                    (("v", 0, 2), ("v", 1, 2)),
                    (("v", 1, 0), ("leg", 1)),
                    (("v", 1, 1), ("leg", 2)),
                ),
            ),
            _arcs(R("-1"), (0, 3), (1, 2)),
            _arcs(one, (0, 1), (2, 3)),
        ),
    )
    half = "1*q^1/2 + 1*q^-1/2"
    crossings = {
        "x11": VertexRule(
            "b2 single-single crossing",
            "x11",
            (
                _arcs(R("-1*q^1/2"), (0, 1), (2, 3)),
                _arcs(R("-1*q^-1/2"), (1, 2), (3, 0)),
                _term(
                    R(f"1 / {half}"),
                    ("x4",),
                    tuple((("v", 0, i), ("leg", i)) for i in range(4)),
                ),
            ),
        ),
        "x12": VertexRule(
            "b2 single-under-double crossing",
            "x12",
            (
                # vertical single crossbar: top holds legs (0, 3), bottom (1, 2)
                _term(
                    R(f"1*q^-1/2 / {half}"),
                    ("v", "v"),
                    (
                        (("v", 0, 0), ("leg", 0)),
                        (("v", 0, 1), ("v", 1, 1)),
                        (("v", 0, 2), ("leg", 3)),
                        (("v", 1, 0), ("leg", 2)),
                        (("v", 1, 2), ("leg", 1)),
                    ),
                ),
                # horizontal single crossbar: left holds legs (0, 1), right (2, 3)
                _term(
                    R(f"1*q^1/2 / {half}"),
                    ("v", "v"),
                    (
                        (("v", 0, 0), ("v", 1, 0)),
                        (("v", 0, 1), ("leg", 0)),
                        (("v", 0, 2), ("leg", 1)),
                        (("v", 1, 1), ("leg", 2)),
                        (("v", 1, 2), ("leg", 3)),
                    ),
                ),
            ),
        ),
        "x21": VertexRule(
            "b2 double-under-single crossing",
            "x21",
            (
                _term(
                    R(f"1*q^1/2 / {half}"),
                    ("v", "v"),
                    (
                        (("v", 0, 0), ("leg", 1)),
                        (("v", 0, 1), ("v", 1, 1)),
                        (("v", 0, 2), ("leg", 0)),
                        (("v", 1, 0), ("leg", 3)),
                        (("v", 1, 2), ("leg", 2)),
                    ),
                ),
                _term(
                    R(f"1*q^-1/2 / {half}"),
                    ("v", "v"),
                    (
                        (("v", 0, 0), ("v", 1, 0)),
                        (("v", 0, 1), ("leg", 1)),
                        (("v", 0, 2), ("leg", 2)),
                        (("v", 1, 1), ("leg", 3)),
                        (("v", 1, 2), ("leg", 0)),
                    ),
                ),
            ),
        ),
        "x22": VertexRule(
            "b2 double-double crossing",
            "x22",
            (
                _arcs(R("q"), (0, 1), (2, 3)),
                _arcs(R("q^-1"), (1, 2), (3, 0)),
                _term(
                    R("1 / 1*q + 2 + 1*q^-1"),
                    ("v",) * 4,
                    tuple(
                        w
                        for i in range(4)
                        for w in (
                            (("v", i, 0), ("v", (i + 1) % 4, 1)),
                            (("v", i, 2), ("leg", i)),
                        )
                    ),
                ),
            ),
        ),
    }
    return SpiderSig(
        kind="B2",
        strand_labels=("1", "2"),
        loop_values={
            "1": R("-1*q^2 - 1*q - 1*q^-1 - 1*q^-2"),
            "2": R("1*q^3 + 1*q + 1 + 1*q^-1 + 1*q^-3"),
        },
        face_rules=(tadpole, bigon11, bigon12, triangle111, triangle112),
        double_edge=double_edge,
        crossings=crossings,
        vertex_weight=weights,
        x_expand=x_expand,
        h_rotate=h_rotate,
    )


def _g2_sig() -> SpiderSig:
    weights = {"v": 1, "v2": 2, "x11": 2, "x12": 3, "x21": 3, "x22": 4}
    one = QRational(qint(1))
    monogon = FaceRule("monogon", ("1",), ("v",), ())
    bigon = FaceRule(
        "bigon",
        ("1", "1"),
        ("v", "v"),
        (_arcs(R("-1*q^3 - 1*q^2 - 1*q - 1*q^-1 - 1*q^-2 - 1*q^-3"), (0, 1)),),
    )
    triangle = FaceRule(
        "triangle",
        ("1", "1", "1"),
        ("v", "v", "v"),
        (
            _term(
                R("1*q^2 + 1 + 1*q^-2"),
                ("v",),
                tuple((("v", 0, i), ("leg", i)) for i in range(3)),
            ),
        ),
    )

    def _single_h(top: tuple[int, int], bottom: tuple[int, int], c: QRational):
        # single crossbar between two trivalent vertices; ``top`` holds the
        # stated legs ccw after the crossbar, likewise ``bottom``
        return _term(
            c,
            ("v", "v"),
            (
                (("v", 0, 0), ("v", 1, 0)),
                (("v", 0, 1), ("leg", top[0])),
                (("v", 0, 2), ("leg", top[1])),
                (("v", 1, 1), ("leg", bottom[0])),
                (("v", 1, 2), ("leg", bottom[1])),
            ),
        )

    square = FaceRule(
        "square",
        ("1",) * 4,
        ("v",) * 4,
        (
            _single_h((3, 0), (1, 2), R("-1*q - 1*q^-1")),
            _single_h((0, 1), (2, 3), R("-1*q - 1*q^-1")),
            _arcs(R("1*q + 1 + 1*q^-1"), (3, 0), (1, 2)),
            _arcs(R("1*q + 1 + 1*q^-1"), (0, 1), (2, 3)),
        ),
    )

    def _caterpillar(i: int) -> LocalTerm:
        # middle vertex on leg i, end vertices on legs (i+1, i+2) and (i-1, i-2)
        l = lambda j: ("leg", (i + j) % 5)
        return _term(
            R("-1"),
            ("v", "v", "v"),
            (
                (("v", 0, 0), l(0)),
                (("v", 0, 1), ("v", 1, 0)),
                (("v", 0, 2), ("v", 2, 0)),
                (("v", 1, 1), l(1)),
                (("v", 1, 2), l(2)),
                (("v", 2, 1), l(-2)),
                (("v", 2, 2), l(-1)),
            ),
        )

    def _tripod(i: int) -> LocalTerm:
        l = lambda j: ("leg", (i + j) % 5)
        return _term(
            one,
            ("v",),
            (
                (("v", 0, 0), l(-1)),
                (("v", 0, 1), l(0)),
                (("v", 0, 2), l(1)),
                (l(2), l(3)),
            ),
        )

    pentagon = FaceRule(
        "pentagon",
        ("1",) * 5,
        ("v",) * 5,
        tuple(_caterpillar(i) for i in range(5)) + tuple(_tripod(i) for i in range(5)),
    )

    double_edge = EdgeRule(
        "double-edge",
        "2",
        "v2",
        ("1",) * 4,
        (
            _arcs(one, (0, 3), (1, 2)),
            _single_h((3, 0), (1, 2), R("-1")),
            _arcs(R("-1 / 1*q^2 - 1 + 1*q^-2"), (0, 1), (2, 3)),
            _single_h((0, 1), (2, 3), R("1 / 1*q + 1 + 1*q^-1")),
        ),
    )

    half = "1*q^1/2 + 1*q^-1/2"

    def _mixed_h(vkind: str, top, bottom, c: QRational) -> LocalTerm:
        # single crossbar between two (1,1,2) vertices, crossbar between the
        # legs in the rotation; ``top`` is the (single, double) leg pair of
        # the top vertex, likewise ``bottom``
        return _term(
            c,
            (vkind, vkind),
            (
                (("v", 0, 0), ("leg", top[0])),
                (("v", 0, 1), ("v", 1, 1)),
                (("v", 0, 2), ("leg", top[1])),
                (("v", 1, 0), ("leg", bottom[0])),
                (("v", 1, 2), ("leg", bottom[1])),
            ),
        )

    def _mixed_h_side(vkind: str, left, right, c: QRational) -> LocalTerm:
        # single crossbar between two (1,1,2) vertices, crossbar first in the
        # rotation; ``left``/``right`` are (single, double) leg pairs
        return _term(
            c,
            (vkind, vkind),
            (
                (("v", 0, 0), ("v", 1, 0)),
                (("v", 0, 1), ("leg", left[0])),
                (("v", 0, 2), ("leg", left[1])),
                (("v", 1, 1), ("leg", right[0])),
                (("v", 1, 2), ("leg", right[1])),
            ),
        )

    def _leg_square(kinds: tuple[str, ...], c: QRational) -> LocalTerm:
        return _term(
            c,
            kinds,
            tuple(
                w
                for i in range(4)
                for w in (
                    (("v", i, 0), ("v", (i + 1) % 4, 1)),
                    (("v", i, 2), ("leg", i)),
                )
            ),
        )

    crossings = {
        "x11": VertexRule(
            "g2 single-single crossing",
            "x11",
            (
                _single_h((3, 0), (1, 2), R(f"1*q^-1/2 / {half}")),
                _single_h((0, 1), (2, 3), R(f"1*q^1/2 / {half}")),
                _arcs(R(f"1*q^-3/2 / {half}"), (3, 0), (1, 2)),
                _arcs(R(f"1*q^3/2 / {half}"), (0, 1), (2, 3)),
            ),
        ),
        "x12": VertexRule(
            "g2 single-under-double crossing",
            "x12",
            (
                _mixed_h("v2", (0, 3), (2, 1), R(f"-1*q^-3/2 / {half}")),
                _mixed_h_side("v2", (0, 1), (2, 3), R(f"-1*q^3/2 / {half}")),
                _leg_square(("v", "v2", "v", "v2"), R("-1 / 1*q + 2 + 1*q^-1")),
            ),
        ),
        "x21": VertexRule(
            "g2 double-under-single crossing",
            "x21",
            (
                _mixed_h("v2", (1, 0), (3, 2), R(f"-1*q^3/2 / {half}")),
                _mixed_h_side("v2", (1, 2), (3, 0), R(f"-1*q^-3/2 / {half}")),
                _leg_square(("v2", "v", "v2", "v"), R("-1 / 1*q + 2 + 1*q^-1")),
            ),
        ),
        "x22": VertexRule(
            "g2 double-double crossing",
            "x22",
            (
                _arcs(
                    R("1*q^5 - 1*q^3 + 1*q - 1*q^-3 / 1*q^2 - 1 + 1*q^-2"),
                    (0, 1),
                    (2, 3),
                ),
                _arcs(
                    R("-1*q^3 + 1*q - 1*q^-3 - 1*q^-5 / 1*q^2 - 1 + 1*q^-2"),
                    (1, 2),
                    (3, 0),
                ),
                _leg_square(("v2",) * 4, R("1 / 1*q + 2 + 1*q^-1")),
            ),
        ),
    }
    return SpiderSig(
        kind="G2",
        strand_labels=("1", "2"),
        loop_values={
            "1": R("1*q^5 + 1*q^4 + 1*q + 1 + 1*q^-1 + 1*q^-4 + 1*q^-5"),
            "2": R(
                "1*q^9 + 1*q^6 + 1*q^5 + 1*q^4 + 1*q^3 + 1*q + 2"
                " + 1*q^-1 + 1*q^-3 + 1*q^-4 + 1*q^-5 + 1*q^-6 + 1*q^-9"
            ),
        },
        face_rules=(monogon, bigon, triangle, square, pentagon),
        double_edge=double_edge,
        crossings=crossings,
        vertex_weight=weights,
    )


@lru_cache(maxsize=None)
def builtin_sig(kind: str) -> SpiderSig:
    try:
        sig = {"A1": _a1_sig, "A2": _a2_sig, "B2": _b2_sig, "G2": _g2_sig}[kind]()
    except KeyError:
        raise ValueError(f"unknown spider kind {kind!r}") from None
    _check_sig(sig)
    return sig


def _check_sig(sig: SpiderSig):
    for rule in sig.face_rules:
        legs = _rule_leg_labels(sig.kind, rule)
        lhs = sum(sig.vertex_weight[c] for c in rule.corners)
        _check_terms(sig.kind, rule.name, legs, lhs, rule.terms, sig.vertex_weight)
    for erule in (sig.double_edge,):
        if erule is None:
            continue
        lhs = 2 * sig.vertex_weight[erule.endpoint_kind]
        _check_terms(sig.kind, erule.name, erule.leg_labels, lhs, erule.terms, sig.vertex_weight)
    if sig.h_rotate is not None:
        _check_terms(
            sig.kind,
            sig.h_rotate.name,
            sig.h_rotate.leg_labels,
            2 * sig.vertex_weight[sig.h_rotate.endpoint_kind],
            sig.h_rotate.terms,
            sig.vertex_weight,
            strict=False,
        )
    if sig.x_expand is not None:
        legs = kind_of(sig.kind, sig.x_expand.kind).ports
        _check_terms(sig.kind, "x-expand", legs, 0, sig.x_expand.terms, sig.vertex_weight, strict=False)
    for cname, crule in sig.crossings.items():
        kind = kind_of(sig.kind, crule.kind)
        if not kind.crossing:
            raise AssertionError(f"{cname} is not a crossing kind")
        _check_terms(
            sig.kind,
            crule.name,
            kind.ports,
            0,
            crule.terms,
            sig.vertex_weight,
            strict=False,  # expansions trade a crossing for planar vertices
        )


# ---------------------------------------------------------------------------
# rule matching


def match_face(w: WebGraph, face: FaceWalk, sig: SpiderSig):
    """Match a face against the built-in rules; returns (rule, rotation) with
    the rotation r aligning rule position i to face position i + r."""
    k = face.side_count
    sides = tuple(w.label[d] for d in face.darts)
    corners = tuple(w.vertex_kind[v] for v in face.corner_vertices)
    if len(set(face.corner_vertices)) != k:
        return None  # a revisited corner: handled by generic elimination
    for rule in sig.face_rules:
        if len(rule.sides) != k:
            continue
        for r in range(k):
            if all(
                sides[(r + i) % k] == rule.sides[i]
                and corners[(r + i) % k] == rule.corners[i]
                for i in range(k)
            ):
                return rule, r
    return None


def match_rule(w: WebGraph, sig: SpiderSig):
    """First reducible site of a web, or None when w is a basis web.

    Sites, in the engine's deterministic priority order: closed loops,
    internal double edges (for the B2/G2 basis conventions), then elliptic
    faces.  The returned site is ("loop", label), ("edge", dart),
    ("face", face, rule, rotation) or ("generic", face) for an elliptic
    face that no installed rule matches (eliminated against a basis of its
    boundary word by the engine).
    """
    for lab in sorted(w.loops):
        return "loop", lab
    if sig.double_edge is not None:
        for d, e in sorted(w.edge_darts()):
            if (
                w.label[d] == sig.double_edge.label
                and d in w.dart_vertex
                and e in w.dart_vertex
                and not w.kind(w.dart_vertex[d]).crossing
                and not w.kind(w.dart_vertex[e]).crossing
            ):
                return "edge", d
    faces = [f for f in w.faces() if is_elliptic(f, sig)]
    faces.sort(key=lambda f: min(f.darts))
    for face in faces:
        if any(w.kind(v).crossing for v in face.corner_vertices):
            continue  # crossings are expanded, not reduced
        m = match_face(w, face, sig)
        if m is not None:
            return "face", face, m[0], m[1]
        return "generic", face
    return None
