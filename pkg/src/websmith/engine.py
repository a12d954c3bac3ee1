"""Reduction of webs to basis-web combinations, and web-space arithmetic.

A web containing a closed loop, an internal double edge (where the basis
convention excludes one), or an elliptic internal face is rewritten by the
local rules of its spider signature; multilinear expansion then yields a
:class:`WebVector`, a formal linear combination of basis webs with
:class:`~websmith.qcoeff.QRational` coefficients.  The measure that proves
termination is the weighted vertex count of the signature: every installed
rule strictly decreases it, and the two special **closed-web** moves for B2
(tetravalent expansion, double-edge rotation) are governed by separate
counters checked at run time.

Elliptic faces that no installed rule matches (faces with tetravalent or
double-emitting corners, or with a repeated corner vertex) are eliminated
*generically*: the fragment induced on the face's corners is expanded in the
basis of its own boundary word by solving a linear system whose matrix is
the Gram matrix of disk pairings -- each pairing being the scalar value of
the closed web obtained by gluing two disks along their boundary.  Closed
webs are evaluated by a rule-complete strategy that never recurses into the
generic elimination, so the process is well-founded.  The fragment
expansions are cached, and every replacement is checked to be strictly
lighter than the fragment it replaces.

The spider operations ``join``, ``rotate``, ``stitch``, ``concatenate`` and
``assemble`` act linearly on web vectors; reduction results are memoized per
spider in a cache bounded by ``WEBSMITH_CACHE_SIZE`` (default 200000
entries).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

from .combinat import enumerate_basis
from .qcoeff import (
    QRational,
    format_rational,
    laurent_div_exact,
    laurent_gcd,
    qint,
)
from .spiders import LocalTerm, SpiderSig, builtin_sig, is_elliptic
from .webmap import ValidationError, WebGraph, kind_of

__all__ = [
    "WebVector",
    "Engine",
    "engine_for",
    "reduce_web",
    "join",
    "rotate",
    "stitch",
    "concatenate",
    "expand_crossings",
    "assemble",
    "Template",
    "vector_to_json",
]

ONE = QRational(qint(1))
ZERO = QRational(qint(0))
MINUS_ONE = ZERO - ONE


# ---------------------------------------------------------------------------
# web vectors


class WebVector:
    """A formal linear combination of basis webs with a common boundary."""

    __slots__ = ("spider", "boundary", "terms")

    def __init__(self, spider: str, boundary: str):
        self.spider = spider
        self.boundary = boundary
        self.terms: dict[bytes, tuple[QRational, WebGraph]] = {}

    @classmethod
    def of_web(cls, web: WebGraph, coeff: QRational = ONE) -> "WebVector":
        v = cls(web.spider, web.boundary_word() if web.boundary else "")
        v.add_term(coeff, web)
        return v

    def add_term(self, coeff: QRational, web: WebGraph):
        if not isinstance(coeff, QRational):
            coeff = QRational(coeff)
        code = web.canonical_code()
        if code in self.terms:
            coeff = self.terms[code][0] + coeff
        if coeff.is_zero():
            self.terms.pop(code, None)
        else:
            self.terms[code] = (coeff, web)

    def items(self) -> Iterable[tuple[QRational, WebGraph]]:
        for code in sorted(self.terms):
            yield self.terms[code]

    def coeff(self, web_or_code) -> QRational:
        code = (
            web_or_code
            if isinstance(web_or_code, bytes)
            else web_or_code.canonical_code()
        )
        entry = self.terms.get(code)
        return entry[0] if entry else ZERO

    def scalar(self) -> QRational:
        """The coefficient of the empty web (boundary must be empty)."""
        if self.boundary:
            raise ValueError("scalar() requires an empty boundary")
        if not self.terms:
            return ZERO
        (entry,) = self.terms.values()
        return entry[0]

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "WebVector") -> "WebVector":
        if (self.spider, self.boundary) != (other.spider, other.boundary):
            raise ValueError("cannot add web vectors with different boundaries")
        out = WebVector(self.spider, self.boundary)
        out.terms = dict(self.terms)
        for coeff, web in other.terms.values():
            out.add_term(coeff, web)
        return out

    def __sub__(self, other: "WebVector") -> "WebVector":
        return self + other.scale(MINUS_ONE)

    def scale(self, c: QRational) -> "WebVector":
        out = WebVector(self.spider, self.boundary)
        if not c.is_zero():
            for code, (coeff, web) in self.terms.items():
                out.terms[code] = (coeff * c, web)
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WebVector)
            and self.spider == other.spider
            and self.boundary == other.boundary
            and self.terms.keys() == other.terms.keys()
            and all(
                (self.terms[k][0] - other.terms[k][0]).is_zero()
                for k in self.terms
            )
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        parts = " + ".join(
            f"({format_rational(c)}) * {w!r}" for c, w in self.items()
        )
        return f"<WebVector {self.spider} {self.boundary!r}: {parts or '0'}>"


def vector_to_json(v: WebVector) -> str:
    import json

    return json.dumps(
        {
            code.decode(): format_rational(entry[0])
            for code, entry in sorted(v.terms.items())
        }
    )


# ---------------------------------------------------------------------------
# local surgery


def _add_dummy(w: WebGraph) -> tuple[int, int, int]:
    """A nameless degree-2 pass-through vertex with two fresh darts."""
    v = w._next_vertex
    w._next_vertex += 1
    a, b = w.new_dart(), w.new_dart()
    w.vertex_kind[v] = None  # type: ignore[assignment]
    w.vertex_darts[v] = [a, b]
    w.dart_vertex[a] = v
    w.dart_vertex[b] = v
    w._code = None
    return v, a, b


Replacement = Union[LocalTerm, Tuple[QRational, WebGraph]]


def replace_site(
    web: WebGraph,
    site_vertices: Iterable[int],
    leg_darts: Sequence[int],
    replacements: Sequence[Replacement],
) -> List[tuple[QRational, WebGraph]]:
    """Replace the configuration spanned by ``site_vertices``.

    ``leg_darts[i]`` is the site-side dart of the i-th leg edge, numbered as
    the applied rule numbers its legs.  A replacement is either a
    :class:`LocalTerm` or a ``(coeff, web)`` pair whose boundary word
    matches the legs (leg i glued to boundary position i).  Returns
    ``(coeff, web)`` pairs; the webs may contain closed loops or detached
    components and are meant to be fed back into the reduction.
    """
    site = set(site_vertices)
    legs = list(leg_darts)
    leg_index = {d: i for i, d in enumerate(legs)}
    base = web.copy()
    partners: list[int] = []
    leg_in: list[Optional[bool]] = []
    leg_label: list[str] = []
    for d in legs:
        if d in base.alpha:
            leg_label.append(base.label[d])
            leg_in.append(base.toward[d])
            partners.append(base.unpair(d))
        else:
            # this leg was already unpaired as the chord partner of an
            # earlier leg; recover its data from that record
            j = next(i for i, p in enumerate(partners) if p == d)
            leg_label.append(leg_label[j])
            t = leg_in[j]
            leg_in.append(None if t is None else (not t))
            partners.append(legs[j])
    # remove internal edges and the site vertices
    for v in site:
        for d in list(base.vertex_darts[v]):
            if d in base.alpha:
                base.delete_edge(d)
    for v in site:
        for d in list(base.vertex_darts[v]):
            base.discard_dart(d)
        base.delete_isolated_vertex(v)
    # one pass-through dummy per leg, wired to the old far ends
    dummy_vs: list[int] = []
    dummy_out: list[int] = []  # darts facing the surroundings
    dummy_in: list[int] = []  # darts facing the replacement
    for _ in legs:
        v, a, b = _add_dummy(base)
        dummy_vs.append(v)
        dummy_out.append(a)
        dummy_in.append(b)
    for i, p in enumerate(partners):
        j = leg_index.get(p)
        if j is not None:
            if j < i:
                continue  # this leg edge was wired from the other side
            target = dummy_out[j]
        else:
            target = p
        head = None
        if leg_in[i] is not None:
            head = dummy_out[i] if leg_in[i] else target
        base.connect(dummy_out[i], target, leg_label[i], head)

    def leg_end(w2: WebGraph, i: int) -> tuple[int, str, Optional[bool]]:
        # head sits here when the strand leaves the site through leg i
        hh = None if leg_in[i] is None else (not leg_in[i])
        return dummy_in[i], leg_label[i], hh

    out: List[tuple[QRational, WebGraph]] = []
    for rep in replacements:
        if isinstance(rep, LocalTerm):
            w2 = base.copy()
            vports = [w2.add_vertex(k)[1] for k in rep.vertices]
            for e1, e2 in rep.wires:
                ends = []
                for end in (e1, e2):
                    if end[0] == "leg":
                        ends.append(leg_end(w2, end[1]))
                    else:
                        _, j, p = end
                        kind = kind_of(w2.spider, rep.vertices[j])
                        hh = (
                            None
                            if kind.out_ports is None
                            else (not kind.out_ports[p])
                        )
                        ends.append((vports[j][p], kind.ports[p], hh))
                (d1, lab1, h1), (d2, lab2, h2) = ends
                if lab1 != lab2:
                    raise ValidationError("wire joins mismatched labels")
                if h1 is None:
                    head = None
                else:
                    if h1 == h2:
                        raise ValidationError("wire orientations disagree")
                    head = d1 if h1 else d2
                w2.connect(d1, d2, lab1, head)
            for v in dummy_vs:
                w2.smooth_vertex(v)
            out.append((rep.coeff, w2))
        else:
            coeff, bweb = rep
            w2 = base.copy()
            dart_map: dict[int, int] = {}
            for bi, d in enumerate(bweb.boundary):
                dart_map[d] = dummy_in[bi]
            vorder = sorted(bweb.vertex_kind)
            for v in vorder:
                _, ds = w2.add_vertex(bweb.vertex_kind[v])
                for old, new in zip(bweb.vertex_darts[v], ds):
                    dart_map[old] = new
            for d, e in bweb.edge_darts():
                t = bweb.toward[d]
                head = None if t is None else (dart_map[d] if t else dart_map[e])
                w2.connect(dart_map[d], dart_map[e], bweb.label[d], head)
            for v in dummy_vs:
                w2.smooth_vertex(v)
            out.append((coeff, w2))
    return out


# ---------------------------------------------------------------------------
# helpers on webs


def weighted_count(web: WebGraph, sig: SpiderSig) -> int:
    return sum(sig.vertex_weight[k] for k in web.vertex_kind.values())


def _strip_loops(web: WebGraph, sig: SpiderSig) -> tuple[QRational, WebGraph]:
    if not web.loops:
        return ONE, web
    c = ONE
    w2 = web.copy()
    for lab, count in list(w2.loops.items()):
        val = sig.loop_values[lab]
        for _ in range(count):
            c = c * val
    w2.loops = {}
    w2._code = None
    return c, w2


def _split_closed(web: WebGraph) -> tuple[WebGraph, list[WebGraph]]:
    """Separate connected components that never reach the boundary."""
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        for z in (x, y):
            parent.setdefault(z, z)
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for d, e in web.alpha.items():
        union(("d", d), ("d", e))
    for v, ds in web.vertex_darts.items():
        for d in ds:
            union(("v", v), ("d", d))
    anchored = set()
    for d in web.boundary:
        parent.setdefault(("d", d), ("d", d))
        anchored.add(find(("d", d)))
    roots = {find(k) for k in parent}
    closed_roots = [r for r in roots if r not in anchored]
    if not closed_roots:
        return web, []
    main = web.copy()
    comps = []
    for root in closed_roots:
        comp = WebGraph(web.spider)
        comp._next_dart = web._next_dart
        comp._next_vertex = web._next_vertex
        for v in list(main.vertex_kind):
            if find(("v", v)) == root:
                comp.vertex_kind[v] = main.vertex_kind.pop(v)
                comp.vertex_darts[v] = main.vertex_darts.pop(v)
                for d in comp.vertex_darts[v]:
                    comp.dart_vertex[d] = v
                    del main.dart_vertex[d]
        for d in list(main.alpha):
            if d in comp.dart_vertex:
                comp.alpha[d] = main.alpha.pop(d)
                comp.label[d] = main.label.pop(d)
                comp.toward[d] = main.toward.pop(d)
        comps.append(comp)
    main._code = None
    return main, comps


def _match_face_ccw(web: WebGraph, face, sig: SpiderSig):
    """Match a face rule with its data read counterclockwise in the plane.

    Face walks traverse the face boundary clockwise (interior on the right),
    while local patches are drawn counterclockwise (vertex ports are in ccw
    rotation order), so rule position i corresponds to the reversed walk.
    Returns (rule, r) with rule position i at ccw position i + r, i.e. at
    face walk corner index (k - 2 - i - r) mod k.
    """
    k = face.side_count
    if len(set(face.corner_vertices)) != k:
        return None  # a revisited corner: handled by generic elimination
    sides = [web.label[face.darts[k - 1 - j]] for j in range(k)]
    corners = [
        web.vertex_kind[face.corner_vertices[(k - 2 - j) % k]] for j in range(k)
    ]
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


def _face_leg(web: WebGraph, face, pos: int) -> int:
    """The unique non-face dart at the corner vertex at face position pos."""
    v = face.corner_vertices[pos]
    k = face.side_count
    used = {web.alpha[face.darts[pos]], face.darts[(pos + 1) % k]}
    rest = [d for d in web.vertex_darts[v] if d not in used]
    if len(rest) != 1:
        raise ValidationError("face corner does not expose a single leg")
    return rest[0]


def _edge_site(web: WebGraph, d: int) -> tuple[list[int], list[int]]:
    """Site data for a rule on the internal edge with site-side dart d:
    vertices (u, v) and legs (a, b, c, d) numbered by rotation after the
    distinguished edge at each end."""
    e = web.alpha[d]
    u, v = web.dart_vertex[d], web.dart_vertex[e]
    du = web.vertex_darts[u]
    dv = web.vertex_darts[v]
    i, j = du.index(d), dv.index(e)
    legs = [
        du[(i + 1) % len(du)],
        du[(i + 2) % len(du)],
        dv[(j + 1) % len(dv)],
        dv[(j + 2) % len(dv)],
    ]
    return [u, v], legs


def _fragment(web: WebGraph, vertices: set) -> tuple[WebGraph, list[int]]:
    """The induced subweb on ``vertices`` as a disk with its legs in
    counterclockwise boundary order; returns it with the parent-side leg
    darts aligned to its boundary positions."""
    legs = []
    for v in vertices:
        for d in web.vertex_darts[v]:
            p = web.alpha[d]
            if web.dart_vertex.get(p) not in vertices:
                legs.append(d)
    if not legs:
        raise ValidationError("fragment has no legs")
    # order the legs by walking the outer contour of the fragment
    ordered = []
    seen = set()
    d = min(legs)
    while True:
        ordered.append(d)
        seen.add(d)
        x = web.rotation_next(d)
        while True:
            p = web.alpha[x]
            if web.dart_vertex.get(p) in vertices:
                x = web.rotation_next(p)
            else:
                break
        d = x
        if d == ordered[0]:
            break
        if d in seen:  # pragma: no cover - defensive
            raise ValidationError("fragment contour failed to close")
    if len(ordered) != len(legs):
        # more than one contour: the fragment is not a disk here; fall back
        raise ValidationError("fragment is not simply connected")
    frag = WebGraph(web.spider)
    bdarts = frag.add_boundary(len(ordered))
    dart_map = {}
    for i, d in enumerate(ordered):
        dart_map[web.alpha[d]] = bdarts[i]
    vmap = {}
    for v in sorted(vertices):
        nv, ds = frag.add_vertex(web.vertex_kind[v])
        vmap[v] = nv
        for old, new in zip(web.vertex_darts[v], ds):
            dart_map[old] = new
    done = set()
    for v in vertices:
        for d in web.vertex_darts[v]:
            if d in done:
                continue
            e = web.alpha[d]
            done.add(d)
            done.add(e)
            t = web.toward[d]
            head = None if t is None else (dart_map[d] if t else dart_map[e])
            frag.connect(dart_map[d], dart_map[e], web.label[d], head)
    return frag, ordered


def glue_disks(u: WebGraph, w: WebGraph) -> WebGraph:
    """The closed web obtained by capping disk u with the flipped disk w.

    Boundary position i of u meets position m-1-i of the flip of w; the flip
    reverses the disk and, for A2, all strand directions, so that head/tail
    data match up.
    """
    wbar = w.mirror()
    if w.spider == "A2":
        wbar = wbar.dualize()
    m = len(u.boundary)
    if len(wbar.boundary) != m:
        raise ValidationError("cannot glue disks with different boundary sizes")
    out = u.copy()
    offset = out._next_dart
    dart_map = {d: d + offset for d in range(wbar._next_dart)}
    voffset = out._next_vertex
    for v in sorted(wbar.vertex_kind):
        nv = v + voffset
        out.vertex_kind[nv] = wbar.vertex_kind[v]
        out.vertex_darts[nv] = [dart_map[d] for d in wbar.vertex_darts[v]]
        for d in out.vertex_darts[nv]:
            out.dart_vertex[d] = nv
    out._next_vertex = voffset + (max(wbar.vertex_kind) + 1 if wbar.vertex_kind else 0)
    out._next_dart = offset + wbar._next_dart
    for d, e in wbar.edge_darts():
        t = wbar.toward[d]
        head = None if t is None else (dart_map[d] if t else dart_map[e])
        out.alpha[dart_map[d]] = dart_map[e]
        out.alpha[dart_map[e]] = dart_map[d]
        out.label[dart_map[d]] = out.label[dart_map[e]] = wbar.label[d]
        out.toward[dart_map[d]] = None if t is None else (t)
        out.toward[dart_map[e]] = None if t is None else (not t)
    for lab, cnt in wbar.loops.items():
        out.add_loop(lab, cnt)
    # fuse boundary pairs through pass-through vertices
    pairs = [
        (out.boundary[i], dart_map[wbar.boundary[m - 1 - i]]) for i in range(m)
    ]
    out.boundary = []
    for d1, d2 in pairs:
        v = out._next_vertex
        out._next_vertex += 1
        out.vertex_kind[v] = None  # type: ignore[assignment]
        out.vertex_darts[v] = [d1, d2]
        out.dart_vertex[d1] = v
        out.dart_vertex[d2] = v
    out._code = None
    for v in [v for v, k in list(out.vertex_kind.items()) if k is None]:
        out.smooth_vertex(v)
    return out


# ---------------------------------------------------------------------------
# the engine


def _closed_key(web: WebGraph) -> bytes:
    """A canonical key for a connected closed web: the minimum over root
    darts of a rooted depth-first code (same traversal as the boundary
    code, but started at an interior edge)."""
    best = None
    for root in sorted(web.alpha):
        v0 = web.dart_vertex[root]
        ds0 = web.vertex_darts[v0]
        idx0 = ds0.index(root)
        tokens: list = [("v0", web.vertex_kind[v0])]
        visited_vertices: dict[int, tuple[int, int]] = {v0: (0, idx0)}
        visited_edges: set[int] = set()
        stack = [ds0[(idx0 + i) % len(ds0)] for i in range(1, len(ds0))]
        stack.reverse()
        stack.append(root)
        while stack:
            d = stack.pop()
            if d in visited_edges:
                continue
            e = web.alpha[d]
            visited_edges.add(d)
            visited_edges.add(e)
            t = web.toward[d]
            orient = "." if t is None else ("<" if t else ">")
            v = web.dart_vertex[e]
            ds = web.vertex_darts[v]
            idx = ds.index(e)
            if v in visited_vertices:
                order, entry = visited_vertices[v]
                tokens.append(
                    ("r", order, (idx - entry) % len(ds), web.label[d], orient)
                )
                continue
            visited_vertices[v] = (len(visited_vertices), idx)
            tokens.append(("v", web.vertex_kind[v], web.label[d], orient))
            for s in reversed([ds[(idx + i) % len(ds)] for i in range(1, len(ds))]):
                stack.append(s)
        code = repr(tokens).encode()
        if best is None or code < best:
            best = code
    return b"" if best is None else best


def _cache_limit() -> int:
    try:
        return max(0, int(os.environ.get("WEBSMITH_CACHE_SIZE", "200000")))
    except ValueError:
        return 200000


SitePolicy = Callable[[list], int]


class Engine:
    """Per-spider reduction engine with memoization.

    ``policy`` picks one of the candidate reducible sites (default: the
    first in the deterministic order loops < internal double edges <
    elliptic faces by lowest dart).  A non-default policy disables the memo
    cache, since the cache would mask the order-dependence that confluence
    tests probe.
    """

    def __init__(self, spider: str, policy: Optional[SitePolicy] = None):
        self.spider = spider
        self.sig = builtin_sig(spider)
        self.policy = policy
        self._memo: dict[bytes, list[tuple[QRational, bytes]]] = {}
        self._basis_webs: dict[bytes, WebGraph] = {}
        self._fragments: dict[bytes, list[tuple[QRational, WebGraph]]] = {}
        self._gram: dict[str, tuple] = {}
        self._closed_memo: dict[bytes, QRational] = {}
        self._closed_depth = 0
        self._limit = _cache_limit()

    # -- site enumeration --------------------------------------------------

    def _sites(self, web: WebGraph, closed: bool) -> list:
        sig = self.sig
        sites = []
        for v in sorted(web.vertex_kind):
            if web.vertex_kind[v] and web.kind(v).crossing:
                sites.append(("crossing", v))
        if sites:
            return sites  # crossings are expanded before anything else
        if closed and self.spider == "B2":
            return self._b2_closed_sites(web)
        if sig.double_edge is not None:
            for d, e in sorted(web.edge_darts()):
                if (
                    web.label[d] == sig.double_edge.label
                    and d in web.dart_vertex
                    and e in web.dart_vertex
                ):
                    sites.append(("edge", min(d, e)))
        faces = [f for f in web.faces() if is_elliptic(f)]
        faces.sort(key=lambda f: min(f.darts))
        generic = []
        for face in faces:
            m = _match_face_ccw(web, face, sig)
            if m is not None:
                sites.append(("face", face, m[0], m[1]))
            else:
                generic.append(("generic", face))
        return sites + generic

    def _b2_closed_sites(self, web: WebGraph) -> list:
        """Closed B2 strategy: no tetravalent vertices and no double-edge
        expansion; unmatched elliptic faces are attacked by rotating one of
        their double sides."""
        sig = self.sig
        sites = []
        for v in sorted(web.vertex_kind):
            if web.vertex_kind[v] == "x4":
                sites.append(("x_expand", v))
        if sites:
            return sites
        faces = [f for f in web.faces() if is_elliptic(f)]
        faces.sort(key=lambda f: (f.side_count, min(f.darts)))
        for face in faces:
            m = _match_face_ccw(web, face, sig)
            if m is not None:
                sites.append(("face", face, m[0], m[1]))
            else:
                doubles = [d for d in face.darts if web.label[d] == "2"]
                if not doubles:
                    raise ValidationError(
                        "closed B2 face with no rule and no double side"
                    )
                sites.append(("h_rotate", min(doubles)))
        return sites

    # -- applying one site ---------------------------------------------------

    def _apply(self, web: WebGraph, site, closed: bool):
        sig = self.sig
        kind = site[0]
        if kind == "crossing":
            v = site[1]
            rule = sig.crossings[web.vertex_kind[v]]
            return replace_site(web, [v], list(web.vertex_darts[v]), rule.terms)
        if kind == "x_expand":
            v = site[1]
            return replace_site(
                web, [v], list(web.vertex_darts[v]), sig.x_expand.terms
            )
        if kind == "edge":
            vs, legs = _edge_site(web, site[1])
            return replace_site(web, vs, legs, sig.double_edge.terms)
        if kind == "h_rotate":
            vs, legs = _edge_site(web, site[1])
            return replace_site(web, vs, legs, sig.h_rotate.terms)
        if kind == "face":
            _, face, rule, rot = site
            k = face.side_count
            idx = [(k - 2 - i - rot) % k for i in range(k)]
            vs = [face.corner_vertices[x] for x in idx]
            legs = [_face_leg(web, face, x) for x in idx]
            return replace_site(web, vs, legs, rule.terms)
        if kind == "generic":
            if closed:
                raise ValidationError(
                    "generic elimination reached from a closed evaluation"
                )
            return self._eliminate_generic(web, site[1])
        raise ValueError(f"unknown site {site!r}")

    # -- closed evaluation -----------------------------------------------------

    def closed_value(self, web: WebGraph) -> QRational:
        """The scalar value of a closed web (empty boundary)."""
        if web.boundary:
            raise ValueError("closed_value needs an empty boundary")
        c, w = _strip_loops(web, self.sig)
        _, comps = _split_closed(w)
        for comp in comps:
            c = c * self._closed_component(comp)
            if c.is_zero():
                return c
        return c

    def _closed_component(self, comp: WebGraph) -> QRational:
        key = _closed_key(comp)
        cached = self._closed_memo.get(key)
        if cached is not None:
            return cached
        self._closed_depth += 1
        try:
            if self._closed_depth > 10000:
                raise ValidationError("closed evaluation exceeded its depth budget")
            sites = self._sites(comp, closed=True)
            if not sites:
                raise ValidationError("closed web with no reducible site")
            site = sites[0 if self.policy is None else self.policy(sites)]
            total = ZERO
            for cc, ww in self._apply(comp, site, closed=True):
                val = self.closed_value(ww)
                total = total + cc * val
        finally:
            self._closed_depth -= 1
        if self.policy is None:
            if len(self._closed_memo) >= self._limit:
                self._closed_memo.clear()
            self._closed_memo[key] = total
        return total

    # -- generic elimination -----------------------------------------------------

    def _pairing(self, u: WebGraph, w: WebGraph) -> QRational:
        return self.closed_value(glue_disks(u, w))

    def _basis_and_gram(self, word: str):
        entry = self._gram.get(word)
        if entry is not None:
            return entry
        basis = enumerate_basis(self.spider, word)
        n = len(basis)
        gram = [[self._pairing(basis[i], basis[j]) for j in range(n)] for i in range(n)]
        entry = (basis, gram)
        self._gram[word] = entry
        return entry

    def _expand_fragment(self, frag: WebGraph) -> list[tuple[QRational, WebGraph]]:
        code = frag.canonical_code()
        cached = self._fragments.get(code)
        if cached is not None:
            return cached
        word = frag.boundary_word()
        basis, gram = self._basis_and_gram(word)
        if not basis:
            raise ValidationError(
                "generic elimination found an empty basis for a nonzero fragment"
            )
        rhs = [self._pairing(b, frag) for b in basis]
        coeffs = _solve(gram, rhs)
        frag_weight = weighted_count(frag, self.sig)
        result = []
        for x, b in zip(coeffs, basis):
            if x.is_zero():
                continue
            if weighted_count(b, self.sig) >= frag_weight:
                raise ValidationError(
                    "generic elimination produced a replacement at least as"
                    " heavy as the fragment; termination would be unsound"
                )
            result.append((x, b))
        self._fragments[code] = result
        return result

    def _eliminate_generic(self, web: WebGraph, face):
        vertices = set(face.corner_vertices)
        frag, legs = _fragment(web, vertices)
        reps = self._expand_fragment(frag)
        return replace_site(web, vertices, legs, reps)

    # -- full reduction ------------------------------------------------------------

    def reduce(self, web: WebGraph) -> WebVector:
        """Expand ``web`` in the basis of its boundary word."""
        boundary = web.boundary_word() if web.boundary else ""
        out = WebVector(self.spider, boundary)
        for coeff, code in self._reduce_coded(web):
            out.add_term(coeff, self._basis_webs[code])
        return out

    def reduce_vector(self, v: WebVector) -> WebVector:
        out = WebVector(v.spider, v.boundary)
        for coeff, web in v.items():
            out = out + self.reduce(web).scale(coeff)
        return out

    def _reduce_coded(self, web: WebGraph) -> list[tuple[QRational, bytes]]:
        prefactor, w = _strip_loops(web, self.sig)
        w, comps = _split_closed(w)
        for comp in comps:
            prefactor = prefactor * self.closed_value(comp)
        if prefactor.is_zero():
            return []
        code = w.canonical_code()
        cached = self._memo.get(code)
        if cached is None:
            cached = self._reduce_fresh(w)
            if self.policy is None:
                if len(self._memo) >= self._limit:
                    self._memo.clear()  # simple bound; reduction is pure
                self._memo[code] = cached
        return [(prefactor * c, bc) for c, bc in cached]

    def _reduce_fresh(self, w: WebGraph) -> list[tuple[QRational, bytes]]:
        sites = self._sites(w, closed=False)
        if not sites:
            code = w.canonical_code()
            self._basis_webs.setdefault(code, w)
            return [(ONE, code)]
        site = sites[0 if self.policy is None else self.policy(sites)]
        acc: dict[bytes, QRational] = {}
        for c, ww in self._apply(w, site, closed=False):
            for cc, bc in self._reduce_coded(ww):
                prev = acc.get(bc)
                tot = c * cc if prev is None else prev + c * cc
                if tot.is_zero():
                    acc.pop(bc, None)
                else:
                    acc[bc] = tot
        return sorted(((c, bc) for bc, c in acc.items()), key=lambda t: t[1])


def _solve(gram, rhs) -> list[QRational]:
    """Solve the square system gram * x = rhs over the coefficient field.

    Fraction-free Bareiss elimination over Laurent polynomials: rows are
    cleared of denominators, every cross-multiplication step divides exactly
    by the previous pivot, so intermediate entries stay polynomial and never
    trigger expensive rational-function normalization.
    """
    n = len(rhs)
    a: list[list] = []
    for i in range(n):
        row = [
            x if isinstance(x, QRational) else QRational(x)
            for x in list(gram[i]) + [rhs[i]]
        ]
        den = qint(1)
        for x in row:
            g = laurent_gcd(den, x.den)
            den = den * laurent_div_exact(x.den, g)
        a.append([laurent_div_exact(x.num * den, x.den) for x in row])
    prev = qint(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if piv is None:
            raise ValidationError("singular pairing matrix in generic elimination")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
        pivot = a[col][col]
        for r in range(col + 1, n):
            head = a[r][col]
            a[r] = [
                laurent_div_exact(pivot * a[r][c] - head * a[col][c], prev)
                for c in range(n + 1)
            ]
        prev = pivot
    out: list[Optional[QRational]] = [None] * n
    for i in range(n - 1, -1, -1):
        acc = QRational(a[i][n])
        for j in range(i + 1, n):
            acc = acc - QRational(a[i][j]) * out[j]
        out[i] = acc / QRational(a[i][i])
    return out  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# module-level API


_engines: dict[str, Engine] = {}


def engine_for(spider: str) -> Engine:
    eng = _engines.get(spider)
    if eng is None:
        eng = _engines[spider] = Engine(spider)
    return eng


def reduce_web(web: WebGraph, engine: Optional[Engine] = None) -> WebVector:
    """Reduce a web (crossings allowed) to a basis-web combination."""
    eng = engine if isinstance(engine, Engine) else engine_for(web.spider)
    return eng.reduce(web)


def expand_crossings(web: WebGraph, engine: Optional[Engine] = None) -> WebVector:
    """Expand every crossing and reduce; the entry point for link diagrams."""
    return reduce_web(web, engine)


def _merge_disks(u: WebGraph, v: WebGraph) -> tuple[WebGraph, list[int]]:
    """u and v side by side in one disk; returns the merged web and the
    images of v's boundary darts."""
    out = u.copy()
    offset = out._next_dart
    voffset = out._next_vertex
    dmap = {d: d + offset for d in range(v._next_dart)}
    for vv in sorted(v.vertex_kind):
        nv = vv + voffset
        out.vertex_kind[nv] = v.vertex_kind[vv]
        out.vertex_darts[nv] = [dmap[d] for d in v.vertex_darts[vv]]
        for d in out.vertex_darts[nv]:
            out.dart_vertex[d] = nv
    out._next_vertex = voffset + (max(v.vertex_kind) + 1 if v.vertex_kind else 0)
    out._next_dart = offset + v._next_dart
    for d, e in v.edge_darts():
        t = v.toward[d]
        out.alpha[dmap[d]] = dmap[e]
        out.alpha[dmap[e]] = dmap[d]
        out.label[dmap[d]] = out.label[dmap[e]] = v.label[d]
        out.toward[dmap[d]] = t
        out.toward[dmap[e]] = None if t is None else (not t)
    for lab, cnt in v.loops.items():
        out.add_loop(lab, cnt)
    vb = [dmap[d] for d in v.boundary]
    out.boundary = out.boundary + vb
    out._code = None
    return out, vb


def join(u: WebVector, v: WebVector) -> WebVector:
    """Boundary-word concatenation, bilinearly; creates no reducible sites."""
    if u.spider != v.spider:
        raise ValueError("cannot join web vectors of different spiders")
    out = WebVector(u.spider, u.boundary + v.boundary)
    for cu, wu in u.items():
        for cv, wv in v.items():
            merged, _ = _merge_disks(wu, wv)
            out.add_term(cu * cv, merged)
    return out


def rotate(u: WebVector, k: int) -> WebVector:
    n = len(u.boundary)
    if n == 0:
        return u
    kk = k % n
    out = WebVector(u.spider, u.boundary[kk:] + u.boundary[:kk])
    for c, w in u.items():
        out.add_term(c, w.rotate_basepoint(kk))
    return out


def _stitch_web(w: WebGraph, i: int) -> WebGraph:
    w2 = w.copy()
    d1, d2 = w2.boundary[i], w2.boundary[i + 1]
    del w2.boundary[i : i + 2]
    v = w2._next_vertex
    w2._next_vertex += 1
    w2.vertex_kind[v] = None  # type: ignore[assignment]
    w2.vertex_darts[v] = [d1, d2]
    w2.dart_vertex[d1] = v
    w2.dart_vertex[d2] = v
    w2._code = None
    w2.smooth_vertex(v)
    return w2


def stitch(u: WebVector, i: int) -> WebVector:
    """Connect boundary positions i and i+1 by an arc, then reduce."""
    n = len(u.boundary)
    if not (0 <= i < n - 1):
        raise ValueError(f"stitch position {i} out of range for {n} points")
    a, b = u.boundary[i], u.boundary[i + 1]
    dual_ok = (a, b) in (("+", "-"), ("-", "+")) if u.spider == "A2" else a == b
    if not dual_ok:
        raise ValueError(f"cannot stitch non-dual symbols {a!r}, {b!r}")
    eng = engine_for(u.spider)
    out = WebVector(u.spider, u.boundary[:i] + u.boundary[i + 2 :])
    for c, w in u.items():
        out = out + eng.reduce(_stitch_web(w, i)).scale(c)
    return out


def concatenate(u: WebVector, v: WebVector, b: int) -> WebVector:
    """Glue the last b boundary points of u against the first b of v."""
    if u.spider != v.spider:
        raise ValueError("cannot concatenate web vectors of different spiders")
    m = len(u.boundary)
    if b > m or b > len(v.boundary):
        raise ValueError("glue width exceeds a boundary")
    out = join(u, v)
    for t in range(b):
        out = stitch(out, m - 1 - t)
    return out


# ---------------------------------------------------------------------------
# compound webs


@dataclass(frozen=True)
class Template:
    """A compound-web description: slot boundary words, a planar pairing of
    slot ports, and the cyclic order of the unpaired ports on the outer
    boundary.  Ports are (slot index, position) pairs; every port occurs in
    exactly one pairing or once in the outer list."""

    slots: tuple[str, ...]
    pairings: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    outer: tuple[tuple[int, int], ...]


def assemble(template: Template, slots: Sequence[WebVector]) -> WebVector:
    if len(slots) != len(template.slots):
        raise ValueError("slot count mismatch")
    for word, vec in zip(template.slots, slots):
        if vec.boundary != word:
            raise ValueError(
                f"slot boundary {vec.boundary!r} does not match template {word!r}"
            )
    used = set()
    for pair in template.pairings:
        for port in pair:
            if port in used:
                raise ValueError(f"port {port} used twice")
            used.add(port)
    for port in template.outer:
        if port in used:
            raise ValueError(f"port {port} used twice")
        used.add(port)
    expected = {(s, i) for s, w in enumerate(template.slots) for i in range(len(w))}
    if used != expected:
        raise ValueError("template ports do not cover the slot boundaries")

    vec = slots[0]
    ports: list[tuple[int, int]] = [(0, i) for i in range(len(template.slots[0]))]
    for s in range(1, len(slots)):
        vec = join(vec, slots[s])
        ports += [(s, i) for i in range(len(template.slots[s]))]
    partner = {}
    for p1, p2 in template.pairings:
        partner[p1] = p2
        partner[p2] = p1
    while partner:
        n = len(ports)
        hit = None
        for i in range(n):
            p, q = ports[i], ports[(i + 1) % n]
            if partner.get(p) == q:
                hit = i
                break
        if hit is None:
            raise ValueError("pairing is not planar for the given port order")
        if hit == n - 1:
            vec = rotate(vec, 1)
            ports = ports[1:] + ports[:1]
            hit = n - 2
        p, q = ports[hit], ports[hit + 1]
        vec = stitch(vec, hit)
        del partner[p]
        del partner[q]
        del ports[hit : hit + 2]
    if tuple(ports) != template.outer:
        # align to the requested outer basepoint (the cyclic order is forced)
        if len(ports) != len(template.outer):
            raise ValueError("outer boundary mismatch")
        if ports:
            try:
                k = ports.index(template.outer[0])
            except ValueError:
                raise ValueError("outer boundary mismatch") from None
            ports = ports[k:] + ports[:k]
            if tuple(ports) != template.outer:
                raise ValueError("outer boundary mismatch")
            vec = rotate(vec, k)
    return vec
