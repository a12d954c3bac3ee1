"""Convenience constructors for common webs."""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .webmap import WebGraph


def matching_web(
    spider: str,
    word: str,
    pairs: Iterable[tuple[int, int]],
    label: str = "1",
) -> WebGraph:
    """A web of disjoint boundary-to-boundary arcs pairing word positions.

    For A2 the word supplies signs and each arc must join a '+' to a '-'
    (the strand is oriented toward the '+').  For B2/G2 the word supplies
    the strand label of each arc.
    """
    w = WebGraph(spider)
    darts = w.add_boundary(len(word))
    for i, j in pairs:
        if spider == "A2":
            if {word[i], word[j]} != {"+", "-"}:
                raise ValueError(f"arc {i}-{j} must join opposite signs")
            head = darts[i] if word[i] == "+" else darts[j]
            w.connect(darts[i], darts[j], "1", head)
        else:
            lab = word[i] if spider in ("B2", "G2") else label
            if spider in ("B2", "G2") and word[i] != word[j]:
                raise ValueError(f"arc {i}-{j} must join equal labels")
            w.connect(darts[i], darts[j], lab)
    return w


def vertex_star(spider: str, kind_name: str) -> WebGraph:
    """A single internal vertex with every port attached to the boundary."""
    w = WebGraph(spider)
    v, vdarts = w.add_vertex(kind_name)
    kind = w.kind(v)
    bdarts = w.add_boundary(kind.degree)
    for i, (vd, bd) in enumerate(zip(vdarts, bdarts)):
        head = None
        if kind.out_ports is not None:
            head = bd if kind.out_ports[i] else vd
        w.connect(vd, bd, kind.ports[i], head)
    return w


def nested_arcs_word(n: int) -> list[tuple[int, int]]:
    """The matching (0, 2n-1), (1, 2n-2), ..."""
    return [(i, 2 * n - 1 - i) for i in range(n)]


def adjacent_arcs(n: int) -> list[tuple[int, int]]:
    """The matching (0,1), (2,3), ..."""
    return [(2 * i, 2 * i + 1) for i in range(n)]
