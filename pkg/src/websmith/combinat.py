"""Enumeration of basis webs and related combinatorics.

Basis webs are the crossing-free, non-elliptic planar webs without internal
double edges; for a fixed boundary word they form a finite basis of the web
space, equinumerous with a space of invariant tensors (checked against
:mod:`websmith.reptheory` in the test suite).

Enumeration works by depth-first resolution of disk regions.  A region is a
cyclic sequence of dangling darts separated by *gaps*; a gap records the
accumulated exterior angle and side count of the partial face between two
neighbouring darts, and whether that face touches the disk boundary.  The
first dart of a region is resolved either by a chord to a compatible dart of
the same region (splitting it) or by attaching a new internal vertex.  A
chord that closes a gap completes a face; internal faces are rejected unless
their total exterior angle reaches 360 degrees, which is exactly the
non-ellipticity condition.  Because the partner of the resolved dart is
determined by the finished web, every basis web is generated exactly once
(a canonical-code set guards against symmetric-vertex duplicates).

Pruning rules keep the search finite and fast.  An invariant-dimension
check discards regions whose dangling word spans no invariant vector, and a
configurable cap bounds the internal vertex count (quadratic in the boundary
length by default).  Two exact angle budgets derived from the combinatorial
Gauss-Bonnet theorem do most of the work: summing the curvature 360 - ext(f)
over all faces of a finished disk web shows that the total exterior angle
collected by the faces touching the disk boundary, plus the total slack
ext(f) - 360 of the internal faces, equals exactly 180 n - 360 for n
boundary points (every vertex contributes 180 deg(v) - 360 regardless of
its kind, so all vertex terms cancel).  Any partial state whose committed
angle exceeds that budget is dead.  The same computation applied to a single
region with no boundary contact shows it can only be completed when its gaps
already hold at least 180 m + 360 degrees for m frontier darts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from . import reptheory
from .webmap import WebGraph, kind_of

__all__ = [
    "enumerate_basis",
    "star_free_matchings",
    "count_sequences",
    "growth_estimate",
]


@dataclass(frozen=True)
class _Dangling:
    dart: int
    label: str
    head_here: Optional[bool]  # True: the edge must point at this end
    at_boundary: bool


@dataclass(frozen=True)
class _Gap:
    ext: int  # accumulated exterior angle of the partial face
    sides: int
    boundary: bool  # face touches the disk boundary: never checked

    def merge(self, other: "_Gap", extra_sides: int = 1) -> "_Gap":
        return _Gap(
            self.ext + other.ext,
            self.sides + other.sides + extra_sides,
            self.boundary or other.boundary,
        )


class _Region:
    __slots__ = ("darts", "gaps")

    def __init__(self, darts: List[_Dangling], gaps: List[_Gap]):
        # gaps[i] sits between darts[i] and darts[i+1] (cyclically)
        self.darts = darts
        self.gaps = gaps


def _vertex_kinds(spider: str) -> list:
    names = {"A1": [], "A2": ["src", "snk"], "B2": ["v", "x4"], "G2": ["v", "v2"]}
    return [kind_of(spider, n) for n in names[spider]]


def _symmetry_ports(kind) -> list:
    """One attachment port per cyclic symmetry class of the kind."""
    deg = kind.degree
    shifts = []
    data = (kind.ports, kind.gaps, kind.out_ports or (None,) * deg)
    for s in range(1, deg):
        if all(
            tuple(t[(i + s) % deg] for i in range(deg)) == tuple(t) for t in data
        ):
            shifts.append(s)
    if not shifts:
        return list(range(deg))
    reps = []
    seen = set()
    group = {0}
    while True:
        new = {((a + s) % deg) for a in group for s in shifts} | group
        if new == group:
            break
        group = new
    for p in range(deg):
        orbit = frozenset((p + g) % deg for g in group)
        if orbit not in seen:
            seen.add(orbit)
            reps.append(p)
    return reps


@lru_cache(maxsize=None)
def _dim_of_multiset(weights: tuple, kind: str) -> int:
    return reptheory.dim_inv(list(weights), kind)


def _region_fillable(region: _Region, spider: str) -> bool:
    """Necessary condition: some invariant vector exists on the dangling word."""
    weights = []
    for d in region.darts:
        if spider == "A1":
            weights.append((1,))
        elif spider == "A2":
            weights.append((1, 0) if d.head_here else (0, 1))
        else:
            weights.append((1, 0) if d.label == "1" else (0, 1))
    return _dim_of_multiset(tuple(sorted(weights)), spider) > 0


def _double_supply_ok(region: _Region) -> bool:
    """Every dangling internal double strand must reach a boundary double."""
    internal = sum(1 for d in region.darts if d.label == "2" and not d.at_boundary)
    at_bnd = sum(1 for d in region.darts if d.label == "2" and d.at_boundary)
    return internal <= at_bnd


def _angle_budget_ok(regions: List[_Region], spent: int, budget: int) -> bool:
    """Exact Gauss-Bonnet budget: boundary-face exterior angle plus internal
    face slack over 360 can total at most 180 n - 360 in the finished web."""
    committed = spent
    for region in regions:
        for gap in region.gaps:
            if gap.boundary:
                committed += gap.ext
            elif gap.ext > 360:
                committed += gap.ext - 360
        if committed > budget:
            return False
    return committed <= budget


def _region_budget_ok(region: _Region) -> bool:
    """A region cut off from the disk boundary can only be filled when its
    gaps already hold 180 m + 360 degrees of exterior angle."""
    if any(gap.boundary for gap in region.gaps):
        return True
    total = sum(gap.ext for gap in region.gaps)
    return total >= 180 * len(region.darts) + 360


def enumerate_basis(sig, word: str, max_vertices: Optional[int] = None) -> list:
    """All basis webs with the given boundary word, sorted by canonical code.

    ``sig`` is a spider kind name or an object with a ``kind`` attribute.
    ``max_vertices`` caps the internal vertex count of the search (default:
    the square of the boundary length, ample for desk-scale words).
    """
    spider = sig if isinstance(sig, str) else sig.kind
    n = len(word)
    if max_vertices is None:
        max_vertices = max(4, n * n)
    w = WebGraph(spider)
    if n == 0:
        return [w]
    bdarts = w.add_boundary(n)
    darts = []
    for i, c in enumerate(word):
        if spider == "A1":
            lab, head = "1", None
        elif spider == "A2":
            if c not in "+-":
                raise ValueError(f"bad A2 symbol {c!r}")
            lab, head = "1", c == "+"
        else:
            if c not in "12":
                raise ValueError(f"bad {spider} symbol {c!r}")
            lab, head = c, None
        darts.append(_Dangling(bdarts[i], lab, head, True))
    region = _Region(darts, [_Gap(0, 0, True)] * n)
    kinds = _vertex_kinds(spider)
    # Gauss-Bonnet budget; vertices whose interior angles sum below 360 add
    # their deficit.  Only the G2 double-emitting vertex has one (60 degrees),
    # and each such vertex needs its own boundary double strand, so the
    # number of '2' symbols bounds how many can occur.
    budget = 180 * n - 360
    if spider == "G2":
        budget += 60 * word.count("2")
    out: dict = {}

    def solve(web: WebGraph, regions: List[_Region], spent: int):
        if not regions:
            code = web.canonical_code()
            if code not in out:
                out[code] = web.copy()
            return
        if not _angle_budget_ok(regions, spent, budget):
            return
        region = regions[0]
        rest = regions[1:]
        if not _region_fillable(region, spider) or not _double_supply_ok(region):
            return
        if not _region_budget_ok(region):
            return
        d0 = region.darts[0]
        m = len(region.darts)
        # chords from the first dart
        for j in range(1, m):
            dj = region.darts[j]
            if dj.label != d0.label:
                continue
            if d0.head_here is not None and dj.head_here == d0.head_here:
                continue
            if d0.label == "2" and not (d0.at_boundary or dj.at_boundary):
                continue  # internal double edge: excluded from the basis
            sub = _split(region, j)
            if sub is None:
                continue
            subs, closed = sub
            w2 = web.copy()
            head = d0.dart if d0.head_here else (dj.dart if d0.head_here is not None else None)
            w2.connect(d0.dart, dj.dart, d0.label, head)
            solve(w2, subs + rest, spent + closed)
        # new internal vertex on the first dart
        if web.vertex_count() >= max_vertices:
            return
        for kind in kinds:
            for p in _symmetry_ports(kind):
                if kind.ports[p] != d0.label:
                    continue
                if kind.out_ports is not None:
                    # the new edge's head sits at d0 iff the port points out
                    if d0.head_here is not None and kind.out_ports[p] != d0.head_here:
                        continue
                if kind.ports[p] == "2" and not d0.at_boundary:
                    continue  # would create an internal double edge
                w2 = web.copy()
                v, vdarts = w2.add_vertex(kind.name)
                head = None
                if d0.head_here is not None:
                    head = d0.dart if d0.head_here else vdarts[p]
                w2.connect(vdarts[p], d0.dart, d0.label, head)
                solve(w2, [_attach(region, kind, vdarts, p)] + rest, spent)

    solve(w, [region], 0)
    return [out[c] for c in sorted(out)]


def _closed_cost(gap: _Gap) -> int:
    # angle budget locked in by a finished face: everything for a boundary
    # face, only the slack over the non-ellipticity threshold otherwise
    return gap.ext if gap.boundary else gap.ext - 360


def _split(region: _Region, j: int) -> Optional[Tuple[List[_Region], int]]:
    """Regions left after a chord from dart 0 to dart j and the angle budget
    spent by any face the chord closes; None if the chord closes an elliptic
    internal face."""
    darts, gaps = region.darts, region.gaps
    m = len(darts)
    subs: List[_Region] = []
    closed = 0
    # the side holding darts 1 .. j-1
    if j == 1:
        if not _face_ok(gaps[0]):
            return None
        closed += _closed_cost(gaps[0])
    else:
        merged = gaps[j - 1].merge(gaps[0])
        subs.append(_Region(darts[1:j], gaps[1 : j - 1] + [merged]))
    # the side holding darts j+1 .. m-1
    if j == m - 1:
        if not _face_ok(gaps[m - 1]):
            return None
        closed += _closed_cost(gaps[m - 1])
    else:
        merged = gaps[m - 1].merge(gaps[j])
        subs.append(_Region(darts[j + 1 :], gaps[j + 1 : m - 1] + [merged]))
    return subs, closed


def _face_ok(gap: _Gap) -> bool:
    # a closed face that never touches the disk boundary must be non-elliptic
    return gap.boundary or gap.ext >= 360


def _attach(region: _Region, kind, vdarts: Sequence[int], p: int) -> _Region:
    """Region after attaching a vertex via port p to the first dart."""
    deg = kind.degree
    darts, gaps = region.darts, region.gaps
    new_darts = []
    new_gaps = []
    # remaining ports in reverse rotation order: p-1, p-2, ..., p+1
    order = [(p - 1 - i) % deg for i in range(deg - 1)]
    for idx, port in enumerate(order):
        head_here = None if kind.out_ports is None else (not kind.out_ports[port])
        new_darts.append(_Dangling(vdarts[port], kind.ports[port], head_here, False))
        if idx < len(order) - 1:
            # corner between rotation-consecutive ports (port-1, port)
            corner = kind.gaps[(port - 1) % deg]
            new_gaps.append(_Gap(180 - corner, 0, False))
    prev_gap = gaps[-1]
    next_gap = gaps[0]
    # the new edge becomes a side of both flanking partial faces, together
    # with the vertex corners adjacent to the attachment port
    prev2 = _Gap(prev_gap.ext + 180 - kind.gaps[(p - 1) % deg], prev_gap.sides + 1, prev_gap.boundary)
    next2 = _Gap(next_gap.ext + 180 - kind.gaps[p], next_gap.sides + 1, next_gap.boundary)
    if len(darts) == 1:
        # single-dart region: both flanks are the same gap, which wraps around
        wrap = _Gap(
            prev_gap.ext + (180 - kind.gaps[(p - 1) % deg]) + (180 - kind.gaps[p]),
            prev_gap.sides + 2,
            prev_gap.boundary,
        )
        return _Region(new_darts, new_gaps + [wrap])
    return _Region(
        new_darts + darts[1:],
        new_gaps + [next2] + gaps[1:-1] + [prev2],
    )


# ---------------------------------------------------------------------------
# matchings and counting series


def star_free_matchings(n: int) -> int:
    """Matchings of 2n cyclically ordered points with no three mutually
    crossing chords."""
    pts = list(range(2 * n))

    def crossing(a, b):
        (i, j), (k, l) = sorted(a), sorted(b)
        return i < k < j < l or k < i < l < j

    count = 0

    def rec(remaining: tuple, chords: tuple):
        nonlocal count
        if not remaining:
            count += 1
            return
        first = remaining[0]
        for other in remaining[1:]:
            ch = (first, other)
            # no 6-point star: no set of three pairwise crossing chords
            crossers = [c for c in chords if crossing(c, ch)]
            if any(crossing(c1, c2) for i, c1 in enumerate(crossers) for c2 in crossers[i + 1 :]):
                continue
            rec(tuple(x for x in remaining if x not in ch), chords + (ch,))

    rec(tuple(pts), ())
    return count


def count_sequences(n_max: int) -> tuple:
    """The G2 single-strand invariant dimensions b_n and the triangulation
    series a_n solving B(x) = A(xB(x)), as coefficient lists of length
    n_max + 1."""
    b = [
        _dim_of_multiset(((1, 0),) * n, "G2") for n in range(n_max + 1)
    ]
    # A(x) = 1 + x^2 + sum_{n>=3} a_n x^n, unknown a_n; expand A(xB(x))
    # to order n_max and match coefficients of B(x) triangularly.
    a = [0] * (n_max + 1)
    a[0] = 1
    if n_max >= 2:
        a[2] = 1
    # powers of xB(x): (xB)^k has lowest order k
    xb = [0] + b[: n_max]  # coefficients of x*B(x)
    powers = [[1] + [0] * n_max]
    for _ in range(n_max):
        prev = powers[-1]
        nxt = [0] * (n_max + 1)
        for i, ci in enumerate(prev):
            if ci:
                for j, cj in enumerate(xb):
                    if i + j <= n_max and cj:
                        nxt[i + j] += ci * cj
        powers.append(nxt)
    for n in range(1, n_max + 1):
        # b_n = sum_k a_k [x^n] (xB)^k ; a_n multiplies [x^n](xB)^n = 1
        acc = sum(a[k] * powers[k][n] for k in range(n))
        a[n] = b[n] - acc
        assert powers[n][n] == 1
    return b, a


def growth_estimate(n_terms: int = 40) -> Fraction:
    """The truncated evaluation 7 / sum_{n<=N} b_n 7^{-n}."""
    b, _ = count_sequences(n_terms)
    s = sum(Fraction(bn, 7**n) for n, bn in enumerate(b))
    return 7 / s
