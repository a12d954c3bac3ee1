"""Character arithmetic for the rank 1 and 2 simple Lie algebras.

Weights live in fundamental-weight coordinates: a pair (a, b) for the rank-2
kinds, a single-entry tuple (n,) for A1.  For B2 the first coordinate counts
the 4-dimensional (spin) fundamental and the second the 5-dimensional vector
fundamental; for G2 the first counts the 7-dimensional fundamental.  This
matches the strand alphabet: symbol "1" carries the first fundamental weight
and "2" the second.

Everything is exact: Weyl groups act by integer matrices, weight
multiplicities come from Freudenthal's recursion over `fractions.Fraction`,
tensor products are computed by convolving full character supports and
peeling highest weights in decreasing height order.  The module is
independent of the web machinery and serves as the counting oracle against
which basis enumeration is checked.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Sequence, Tuple

Weight = Tuple[int, ...]

__all__ = [
    "RootData",
    "root_data",
    "dominant_rep",
    "dominance_leq",
    "weyl_dim",
    "weight_multiplicities",
    "full_character",
    "tensor_decompose",
    "dim_inv",
    "weight_of_word",
]

# simple roots in fundamental-weight coordinates, one per column
_SIMPLE = {
    "A1": ((2,),),
    "A2": ((2, -1), (-1, 2)),
    "B2": ((2, -1), (-2, 2)),  # first root short (spin node)
    "G2": ((2, -1), (-3, 2)),  # first root short (7-dim node)
}
# half squared lengths of the simple roots
_HALF_LEN = {"A1": (1,), "A2": (1, 1), "B2": (1, 2), "G2": (1, 3)}
_WEYL_ORDER = {"A1": 2, "A2": 6, "B2": 8, "G2": 12}


def _mat_vec(m, v):
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m)))


class RootData:
    """Simple roots, Weyl group, positive roots and the invariant form."""

    def __init__(self, kind: str):
        if kind not in _SIMPLE:
            raise ValueError(f"unknown kind {kind!r}")
        self.kind = kind
        self.rank = len(_SIMPLE[kind])
        self.simple = _SIMPLE[kind]
        self.rho = (1,) * self.rank
        self._gram = self._build_gram()
        self.weyl = self._build_weyl()
        assert len(self.weyl) == _WEYL_ORDER[kind]
        self.positive = self._build_positive()

    def _build_gram(self):
        # G with sum_k G[i][k) * A[k][j] = d_j delta_ij, where column j of A
        # is the j-th simple root
        n, d = self.rank, _HALF_LEN[self.kind]
        a = [[Fraction(_SIMPLE[self.kind][j][i]) for j in range(n)] for i in range(n)]
        if n == 1:
            inv = [[1 / a[0][0]]]
        else:
            det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
            inv = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]
        g = [[d[j] * inv[j][i] for j in range(n)] for i in range(n)]
        assert all(g[i][j] == g[j][i] for i in range(n) for j in range(n))
        return g

    def inner(self, u: Sequence, v: Sequence) -> Fraction:
        return sum(
            Fraction(u[i]) * self._gram[i][j] * v[j]
            for i in range(self.rank)
            for j in range(self.rank)
        )

    def reflect(self, i: int, w: Weight) -> Weight:
        return tuple(w[k] - w[i] * self.simple[i][k] for k in range(self.rank))

    def _build_weyl(self):
        n = self.rank
        ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        refl = []
        for i in range(n):
            cols = [self.reflect(i, tuple(int(k == j) for k in range(n))) for j in range(n)]
            refl.append(tuple(tuple(cols[j][i2] for j in range(n)) for i2 in range(n)))
        group = {ident}
        frontier = [ident]
        while frontier:
            new = []
            for m in frontier:
                for r in refl:
                    prod = tuple(
                        tuple(sum(r[i][k] * m[k][j] for k in range(n)) for j in range(n))
                        for i in range(n)
                    )
                    if prod not in group:
                        group.add(prod)
                        new.append(prod)
            frontier = new
        return sorted(group)

    def _build_positive(self):
        roots = set()
        for m in self.weyl:
            for j in range(self.rank):
                roots.add(_mat_vec(m, self.simple[j]))
        pos = []
        for r in roots:
            coeffs = self._in_root_coords(r)
            if coeffs is not None and all(c >= 0 for c in coeffs) and any(coeffs):
                pos.append(r)
        assert len(pos) == len(roots) // 2
        return sorted(pos)

    def _in_root_coords(self, w: Sequence):
        """Express a weight as a rational combination of simple roots."""
        n = self.rank
        a = _SIMPLE[self.kind]
        if n == 1:
            return (Fraction(w[0], a[0][0]),)
        det = a[0][0] * a[1][1] - a[1][0] * a[0][1]
        x = Fraction(w[0] * a[1][1] - w[1] * a[1][0], det)
        y = Fraction(-w[0] * a[0][1] + w[1] * a[0][0], det)
        return (x, y)

    def height(self, w: Sequence) -> Fraction:
        return sum(self._in_root_coords(w))

    def is_dominant(self, w: Weight) -> bool:
        return all(c >= 0 for c in w)

    def dominant_rep(self, w: Weight) -> Weight:
        while True:
            for i in range(self.rank):
                if w[i] < 0:
                    w = self.reflect(i, w)
                    break
            else:
                return w

    def coroot_pairing(self, w: Sequence, root: Weight) -> Fraction:
        return self.inner(w, root) / (self.inner(root, root) / 2)


@lru_cache(maxsize=None)
def root_data(kind: str) -> RootData:
    return RootData(kind)


def _as_weight(w, kind: str) -> Weight:
    if isinstance(w, int):
        w = (w,)
    w = tuple(int(c) for c in w)
    if len(w) != root_data(kind).rank:
        raise ValueError(f"weight {w} has wrong rank for {kind}")
    return w


def dominant_rep(w, kind: str) -> Weight:
    return root_data(kind).dominant_rep(_as_weight(w, kind))


def dominance_leq(mu, lam, kind: str) -> bool:
    """mu <= lam in the root order: lam - mu is a nonnegative integral
    combination of the simple roots."""
    rd = root_data(kind)
    mu, lam = _as_weight(mu, kind), _as_weight(lam, kind)
    diff = tuple(a - b for a, b in zip(lam, mu))
    coeffs = rd._in_root_coords(diff)
    return all(c >= 0 and c.denominator == 1 for c in coeffs)


def weyl_dim(lam, kind: str) -> int:
    rd = root_data(kind)
    lam = _as_weight(lam, kind)
    if not rd.is_dominant(lam):
        raise ValueError(f"{lam} is not dominant")
    shifted = tuple(c + 1 for c in lam)
    val = Fraction(1)
    for a in rd.positive:
        val *= rd.coroot_pairing(shifted, a) / rd.coroot_pairing(rd.rho, a)
    assert val.denominator == 1 and val > 0
    return int(val)


@lru_cache(maxsize=None)
def weight_multiplicities(lam: Weight, kind: str) -> Dict[Weight, int]:
    """Dominant weight multiplicities of V(lam) by Freudenthal's recursion."""
    rd = root_data(kind)
    lam = _as_weight(lam, kind)
    if not rd.is_dominant(lam):
        raise ValueError(f"{lam} is not dominant")
    # candidate dominant weights mu = lam - (a alpha1 + b alpha2), a, b >= 0
    coords = rd._in_root_coords(lam)
    bounds = [int(2 * c) + 1 for c in coords]  # mu dominant => coords(mu) >= 0
    candidates = []
    if rd.rank == 1:
        for a in range(bounds[0] + 1):
            mu = tuple(lam[k] - a * rd.simple[0][k] for k in range(1))
            if rd.is_dominant(mu):
                candidates.append(mu)
    else:
        for a in range(bounds[0] + 1):
            for b in range(bounds[1] + 1):
                mu = tuple(
                    lam[k] - a * rd.simple[0][k] - b * rd.simple[1][k] for k in range(2)
                )
                if rd.is_dominant(mu):
                    candidates.append(mu)
    candidates.sort(key=rd.height, reverse=True)
    mults: Dict[Weight, int] = {lam: 1}
    lam_rho = tuple(c + 1 for c in lam)
    top = rd.inner(lam_rho, lam_rho)
    for mu in candidates[1:]:
        mu_rho = tuple(c + 1 for c in mu)
        denom = top - rd.inner(mu_rho, mu_rho)
        total = Fraction(0)
        lam_norm = rd.inner(lam, lam)
        for alpha in rd.positive:
            k = 1
            while True:
                nu = tuple(mu[i] + k * alpha[i] for i in range(rd.rank))
                # (nu, nu) grows monotonically in k for dominant mu, so all
                # weights of V(lam) along this ray have been passed once the
                # norm bound |nu| <= |lam| fails
                if rd.inner(nu, nu) > lam_norm:
                    break
                m = mults.get(rd.dominant_rep(nu), 0)
                if m:
                    total += m * rd.inner(nu, alpha)
                k += 1
        m_mu = 2 * total / denom
        assert m_mu.denominator == 1
        if m_mu:
            mults[mu] = int(m_mu)
    return mults


@lru_cache(maxsize=None)
def full_character(lam: Weight, kind: str) -> Dict[Weight, int]:
    """All weights of V(lam) with multiplicities (the full Weyl orbits)."""
    rd = root_data(kind)
    out: Dict[Weight, int] = {}
    for mu, m in weight_multiplicities(_as_weight(lam, kind), kind).items():
        orbit = {mu}
        frontier = [mu]
        while frontier:
            new = []
            for w in frontier:
                for i in range(rd.rank):
                    r = rd.reflect(i, w)
                    if r not in orbit:
                        orbit.add(r)
                        new.append(r)
            frontier = new
        for w in orbit:
            out[w] = out.get(w, 0) + m
    assert sum(out.values()) == weyl_dim(lam, kind)
    return out


def _peel(char: Dict[Weight, int], kind: str) -> Dict[Weight, int]:
    """Decompose a Weyl-invariant character (given on dominant support) into
    irreducible multiplicities by highest-weight peeling."""
    rd = root_data(kind)
    remaining = {w: m for w, m in char.items() if m}
    out: Dict[Weight, int] = {}
    while remaining:
        lam = max(remaining, key=rd.height)
        mult = remaining[lam]
        assert mult > 0, f"negative multiplicity {mult} at {lam}: not a character"
        out[lam] = out.get(lam, 0) + mult
        for mu, m in weight_multiplicities(lam, kind).items():
            nm = remaining.get(mu, 0) - mult * m
            if nm:
                remaining[mu] = nm
            else:
                remaining.pop(mu, None)
    return out


def tensor_decompose(lam, mu, kind: str) -> Dict[Weight, int]:
    """Multiplicities of irreducibles in V(lam) (x) V(mu)."""
    rd = root_data(kind)
    lam, mu = _as_weight(lam, kind), _as_weight(mu, kind)
    ca, cb = full_character(lam, kind), full_character(mu, kind)
    if len(ca) < len(cb):
        ca, cb = cb, ca
    prod: Dict[Weight, int] = {}
    for w1, m1 in ca.items():
        for w2, m2 in cb.items():
            w = tuple(a + b for a, b in zip(w1, w2))
            prod[w] = prod.get(w, 0) + m1 * m2
    dominant_part = {w: m for w, m in prod.items() if rd.is_dominant(w)}
    return _peel(dominant_part, kind)


def _to_dominant_signed(shifted: Weight, kind: str):
    """Reflect a rho-shifted weight into the dominant chamber, tracking the
    sign of the Weyl element; None when the weight lies on a wall."""
    rd = root_data(kind)
    sign = 1
    w = shifted
    while True:
        for i in range(rd.rank):
            if w[i] == 0:
                return None, 0
            if w[i] < 0:
                w = rd.reflect(i, w)
                sign = -sign
                break
        else:
            return w, sign


def _klimyk_step(acc: Dict[Weight, int], mu: Weight, kind: str) -> Dict[Weight, int]:
    """Tensor each V(lam) in acc with V(mu) by the Racah-Speiser rule."""
    rd = root_data(kind)
    char_mu = full_character(mu, kind)
    out: Dict[Weight, int] = {}
    for lam, m in acc.items():
        for nu, k in char_mu.items():
            shifted = tuple(lam[i] + nu[i] + 1 for i in range(rd.rank))
            dom, sign = _to_dominant_signed(shifted, kind)
            if sign:
                target = tuple(c - 1 for c in dom)
                val = out.get(target, 0) + sign * m * k
                if val:
                    out[target] = val
                else:
                    out.pop(target, None)
    assert all(v > 0 for v in out.values())
    return out


def dim_inv(weights: Iterable, kind: str) -> int:
    """Multiplicity of the trivial representation in the ordered tensor
    product of the listed irreducibles."""
    rd = root_data(kind)
    acc: Dict[Weight, int] = {(0,) * rd.rank: 1}
    for w in weights:
        acc = _klimyk_step(acc, _as_weight(w, kind), kind)
    return acc.get((0,) * rd.rank, 0)


def weight_of_word(word: str, kind: str):
    """Fundamental-weight coordinates counted from a boundary word; also the
    per-symbol weight list used by dim_inv."""
    rd = root_data(kind)
    if kind == "A1":
        return (len(word),)
    if kind == "A2":
        counts = {"+": 0, "-": 0}
        for c in word:
            counts[c] += 1
        return (counts["+"], counts["-"])
    counts = {"1": 0, "2": 0}
    for c in word:
        counts[c] += 1
    return (counts["1"], counts["2"])


def word_weights(word: str, kind: str) -> list:
    """The list of fundamental weights of a word's symbols, in order."""
    rd = root_data(kind)
    if kind == "A1":
        return [(1,)] * len(word)
    first = {"A2": "+", "B2": "1", "G2": "1"}[kind]
    return [(1, 0) if c == first else (0, 1) for c in word]
