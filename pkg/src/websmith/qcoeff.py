"""Exact arithmetic in the field Q(q^(1/12)).

Coefficients of web reductions live in the ring of Laurent polynomials in
fractional powers of q.  Every fractional exponent that occurs (1/2, 1/3,
1/4, 1/6, 3/4, ...) is a multiple of 1/12, so exponents are stored as
integers counting units of q^(1/12).  Rational functions are kept in a
canonical reduced form so that equal values have equal representations and
can be hashed.

The canonical form of a quotient num/den:
  * gcd(num, den) = 1 as Laurent polynomials (including integer content),
  * den has lowest exponent 0,
  * den has positive leading (highest-exponent) coefficient.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd as _int_gcd
from typing import Iterable, Mapping, Sequence, Union


class PoleError(ZeroDivisionError):
    """Raised when a rational function is specialized at a pole."""


class QLaurent:
    """A Laurent polynomial in q^(1/12) with big-integer coefficients.

    ``terms`` maps exponent (in twelfths of a power of q) to a nonzero
    integer coefficient.  Instances are immutable and hashable.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[int, int] = {}
        for e, c in items:
            if c:
                clean[e] = clean.get(e, 0) + c
                if not clean[e]:
                    del clean[e]
        self.terms = clean
        self._hash = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def const(c: int) -> "QLaurent":
        return QLaurent({0: c})

    @staticmethod
    def q_power(numerator: int, denominator: int = 1) -> "QLaurent":
        """q^(numerator/denominator); the exponent must be a multiple of 1/12."""
        e = Fraction(12 * numerator, denominator)
        if e.denominator != 1:
            raise ValueError(f"exponent {numerator}/{denominator} is not a multiple of 1/12")
        return QLaurent({int(e): 1})

    # -- ring structure ----------------------------------------------------

    def __add__(self, other: "QLaurent") -> "QLaurent":
        if not isinstance(other, QLaurent):
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        result = QLaurent.__new__(QLaurent)
        result.terms = out
        result._hash = None
        return result

    def __neg__(self) -> "QLaurent":
        result = QLaurent.__new__(QLaurent)
        result.terms = {e: -c for e, c in self.terms.items()}
        result._hash = None
        return result

    def __sub__(self, other: "QLaurent") -> "QLaurent":
        return self + (-other)

    def __mul__(self, other: Union["QLaurent", int]) -> "QLaurent":
        if isinstance(other, int):
            if not other:
                return QLaurent()
            result = QLaurent.__new__(QLaurent)
            result.terms = {e: c * other for e, c in self.terms.items()}
            result._hash = None
            return result
        if not isinstance(other, QLaurent):
            return NotImplemented
        out: dict[int, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        result = QLaurent.__new__(QLaurent)
        result.terms = out
        result._hash = None
        return result

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QLaurent":
        if n < 0:
            raise ValueError("negative power of a QLaurent; use QRational")
        result = QLaurent.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, twelfths: int) -> "QLaurent":
        """Multiply by q^(twelfths/12)."""
        result = QLaurent.__new__(QLaurent)
        result.terms = {e + twelfths: c for e, c in self.terms.items()}
        result._hash = None
        return result

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {0: 1}

    def min_exp(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return min(self.terms)

    def max_exp(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return max(self.terms)

    def leading_coeff(self) -> int:
        return self.terms[self.max_exp()]

    def content(self) -> int:
        g = 0
        for c in self.terms.values():
            g = _int_gcd(g, abs(c))
        return g

    def eval_at_one(self) -> int:
        return sum(self.terms.values())

    def subs_q_inverse(self) -> "QLaurent":
        """The image under the bar involution q -> q^(-1)."""
        result = QLaurent.__new__(QLaurent)
        result.terms = {-e: c for e, c in self.terms.items()}
        result._hash = None
        return result

    # -- equality / hashing --------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, QLaurent) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(sorted(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"QLaurent({format_poly(self)!r})"


# -- dense-coefficient helpers over Q (for gcd / exact division) -------------


def _to_dense(p: QLaurent) -> tuple[list[int], int]:
    """(coefficient list low..high, lowest exponent in twelfths)."""
    lo, hi = p.min_exp(), p.max_exp()
    coeffs = [0] * (hi - lo + 1)
    for e, c in p.terms.items():
        coeffs[e - lo] = c
    return coeffs, lo


def _from_dense(coeffs: Iterable[int], lo: int) -> QLaurent:
    return QLaurent({lo + i: c for i, c in enumerate(coeffs) if c})


def _primitive_part(p: list[int]) -> list[int]:
    g = 0
    for c in p:
        g = _int_gcd(g, abs(c))
    if not g:
        return []
    out = [c // g for c in p]
    if out[-1] < 0:
        out = [-c for c in out]
    return out


def _pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of dense integer polynomials (b nonzero, trimmed)."""
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    while True:
        while r and not r[-1]:
            r.pop()
        if len(r) - 1 < db:
            return r
        lr = r[-1]
        r = [c * lb for c in r]
        off = len(r) - 1 - db
        for i, bc in enumerate(b):
            r[off + i] -= lr * bc
        r.pop()


def _poly_gcd_dense(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd (positive leading coefficient) of two integer polynomials.

    Uses a primitive pseudo-remainder sequence: coefficients stay integral and
    are reduced to their content at every step, avoiding the exponential
    coefficient growth of naive rational-arithmetic Euclid.
    """
    fa = _primitive_part(a)
    fb = _primitive_part(b)
    while fb:
        fa, fb = fb, _primitive_part(_pseudo_rem(fa, fb))
    return fa if fa else [1]


def _poly_divide_exact(a: list[int], b: list[int]) -> list[int]:
    """Exact quotient a/b of dense integer polynomials (b divides a)."""
    fa = [Fraction(c) for c in a]
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    db, lb = len(b) - 1, Fraction(b[-1])
    r = fa
    while len(r) - 1 >= db and any(r):
        while r and not r[-1]:
            r.pop()
        if len(r) - 1 < db:
            break
        f = r[-1] / lb
        q[len(r) - 1 - db] = f
        off = len(r) - 1 - db
        for i, bc in enumerate(b):
            r[off + i] -= f * bc
        r.pop()
    assert all(c == 0 for c in r), "inexact polynomial division"
    assert all(c.denominator == 1 for c in q), "inexact polynomial division"
    return [int(c) for c in q]


def _common_stride(polys: Sequence[QLaurent]) -> int:
    """The largest s so every exponent offset within each poly is a multiple
    of s; lets dense algorithms work in the variable q^(s/12)."""
    s = 0
    for p in polys:
        lo = p.min_exp()
        for e in p.terms:
            s = _int_gcd(s, e - lo)
    return s if s else 1


def _to_dense_stride(p: QLaurent, s: int) -> tuple[list[int], int]:
    lo, hi = p.min_exp(), p.max_exp()
    coeffs = [0] * ((hi - lo) // s + 1)
    for e, c in p.terms.items():
        coeffs[(e - lo) // s] = c
    return coeffs, lo


def _from_dense_stride(coeffs: Iterable[int], lo: int, s: int) -> QLaurent:
    return QLaurent({lo + s * i: c for i, c in enumerate(coeffs) if c})


def laurent_div_exact(a: QLaurent, b: QLaurent) -> QLaurent:
    """Exact quotient a/b of Laurent polynomials (b must divide a)."""
    if a.is_zero():
        return QLaurent()
    if b.is_zero():
        raise ZeroDivisionError("laurent_div_exact by zero")
    s = _common_stride((a, b))
    da, la = _to_dense_stride(a, s)
    db, lb = _to_dense_stride(b, s)
    return _from_dense_stride(_poly_divide_exact(da, db), la - lb, s)


def laurent_gcd(a: QLaurent, b: QLaurent) -> QLaurent:
    """gcd of two Laurent polynomials, as a polynomial with lowest exponent 0."""
    if a.is_zero():
        da, _ = _to_dense(b)
        return _from_dense(da, 0) if not b.is_zero() else QLaurent.const(1)
    if b.is_zero():
        da, _ = _to_dense(a)
        return _from_dense(da, 0)
    s = _common_stride((a, b))
    da, _ = _to_dense_stride(a, s)
    db, _ = _to_dense_stride(b, s)
    return _from_dense_stride(_poly_gcd_dense(da, db), 0, s)


class QRational:
    """A canonical rational function num/den over QLaurent."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: QLaurent | int, den: QLaurent | int = 1):
        if isinstance(num, int):
            num = QLaurent.const(num)
        if isinstance(den, int):
            den = QLaurent.const(den)
        if den.is_zero():
            raise ZeroDivisionError("QRational with zero denominator")
        if num.is_zero():
            self.num, self.den = QLaurent(), QLaurent.const(1)
            self._hash = None
            return
        s = _common_stride((num, den))
        ncoeffs, nlo = _to_dense_stride(num, s)
        dcoeffs, dlo = _to_dense_stride(den, s)
        g = _poly_gcd_dense(ncoeffs, dcoeffs)
        if len(g) > 1 or g[0] != 1:
            ncoeffs = _poly_divide_exact(ncoeffs, g)
            dcoeffs = _poly_divide_exact(dcoeffs, g)
        # integer content
        ic = 0
        for c in ncoeffs + dcoeffs:
            ic = _int_gcd(ic, abs(c))
        if ic > 1:
            ncoeffs = [c // ic for c in ncoeffs]
            dcoeffs = [c // ic for c in dcoeffs]
        # unit normalization: den lowest exponent 0, positive leading coefficient.
        # Both quotients keep nonzero constant terms: q does not divide either
        # trimmed dense polynomial, hence not their gcd or the exact quotients.
        assert ncoeffs[0] and dcoeffs[0]
        if dcoeffs[-1] < 0:
            ncoeffs = [-c for c in ncoeffs]
            dcoeffs = [-c for c in dcoeffs]
        # absorb den's exponent offset into num
        self.num = _from_dense_stride(ncoeffs, nlo - dlo, s)
        self.den = _from_dense_stride(dcoeffs, 0, s)
        self._hash = None

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero() -> "QRational":
        return QRational(0)

    @staticmethod
    def one() -> "QRational":
        return QRational(1)

    @staticmethod
    def q_power(numerator: int, denominator: int = 1) -> "QRational":
        e = Fraction(12 * numerator, denominator)
        if e.denominator != 1:
            raise ValueError(f"exponent {numerator}/{denominator} is not a multiple of 1/12")
        e = int(e)
        if e >= 0:
            return QRational(QLaurent({e: 1}))
        return QRational(QLaurent.const(1), QLaurent({-e: 1}))

    # -- field arithmetic ------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "QRational":
        if isinstance(x, QRational):
            return x
        if isinstance(x, (int, QLaurent)):
            return QRational(x)
        raise TypeError(f"cannot coerce {x!r} to QRational")

    def __add__(self, other) -> "QRational":
        o = QRational._coerce(other)
        return QRational(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "QRational":
        r = QRational.__new__(QRational)
        r.num, r.den, r._hash = -self.num, self.den, None
        return r

    def __sub__(self, other) -> "QRational":
        return self + (-QRational._coerce(other))

    def __rsub__(self, other) -> "QRational":
        return QRational._coerce(other) + (-self)

    def __mul__(self, other) -> "QRational":
        o = QRational._coerce(other)
        return QRational(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QRational":
        o = QRational._coerce(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division of QRational by zero")
        return QRational(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other) -> "QRational":
        return QRational._coerce(other) / self

    def __pow__(self, n: int) -> "QRational":
        if n < 0:
            return QRational.one() / (self ** (-n))
        r = QRational.one()
        for _ in range(n):
            r = r * self
        return r

    def inverse(self) -> "QRational":
        return QRational.one() / self

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_laurent(self) -> bool:
        return self.den.is_one()

    def as_laurent(self) -> QLaurent:
        if not self.den.is_one():
            raise ValueError(f"{self} is not a Laurent polynomial")
        return self.num

    def eval_at_one(self) -> Fraction:
        d = self.den.eval_at_one()
        if d == 0:
            raise PoleError(f"{self} has a pole at q = 1")
        return Fraction(self.num.eval_at_one(), d)

    def subs_q_inverse(self) -> "QRational":
        return QRational(self.num.subs_q_inverse(), self.den.subs_q_inverse())

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, QLaurent)):
            other = QRational(other)
        return (
            isinstance(other, QRational)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __repr__(self) -> str:
        return f"QRational({format_rational(self)!r})"

    def __str__(self) -> str:
        return format_rational(self)


# -- quantum integers ---------------------------------------------------------


def qint(n: int) -> QLaurent:
    """The quantum integer [n] = (q^(n/2) - q^(-n/2)) / (q^(1/2) - q^(-1/2))."""
    if n < 0:
        raise ValueError("qint requires n >= 0")
    # [n] = q^((n-1)/2) + q^((n-3)/2) + ... + q^(-(n-1)/2); exponents in twelfths
    return QLaurent({6 * (n - 1 - 2 * i): 1 for i in range(n)})


def qfact(n: int) -> QLaurent:
    """The quantum factorial [n]! = [n][n-1]...[1], with [0]! = 1."""
    if n < 0:
        raise ValueError("qfact requires n >= 0")
    out = QLaurent.const(1)
    for k in range(2, n + 1):
        out = out * qint(k)
    return out


def qbal(a: int, b: int, k: int) -> QRational:
    """(-1)^k [a]![b]![a+b+k+1]! / ([a-k]![b-k]![a+b+1]![k]!)."""
    if min(a, b, k) < 0:
        raise ValueError("qbal requires nonnegative arguments")
    if k > min(a, b):
        raise ValueError("qbal requires k <= min(a, b)")
    num = qfact(a) * qfact(b) * qfact(a + b + k + 1)
    den = qfact(a - k) * qfact(b - k) * qfact(a + b + 1) * qfact(k)
    r = QRational(num, den)
    return -r if k % 2 else r


# -- printing -----------------------------------------------------------------


def _format_exp(e: int) -> str:
    """Format a twelfth-exponent as a reduced fraction string."""
    f = Fraction(e, 12)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_poly(p: QLaurent) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for e in sorted(p.terms, reverse=True):
        c = p.terms[e]
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if e == 0:
            body = str(mag)
        elif e == 12:
            body = f"{mag}*q"
        else:
            body = f"{mag}*q^{_format_exp(e)}"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def format_rational(r: QRational) -> str:
    return f"{format_poly(r.num)} / {format_poly(r.den)}"


# -- parsing ------------------------------------------------------------------

_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-])?\s*"
    r"(?:(?P<coeff>\d+)\s*\*?\s*)?"
    r"(?P<q>q(?:\^(?P<enum>-?\d+)(?:/(?P<eden>\d+))?)?)?\s*"
)


def parse_poly(text: str) -> QLaurent:
    """Parse `term (('+'|'-') term)*` with term = int ['*'] ['q' ['^' frac]]."""
    pos = 0
    terms: list[tuple[int, int]] = []
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    first = True
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad polynomial syntax at position {pos}: {text!r}")
        sign, coeff, qpart = m.group("sign"), m.group("coeff"), m.group("q")
        if sign is None and not first:
            raise ValueError(f"missing sign at position {pos}: {text!r}")
        if coeff is None and qpart is None:
            raise ValueError(f"empty term at position {pos}: {text!r}")
        c = int(coeff) if coeff is not None else 1
        if sign == "-":
            c = -c
        e = 0
        if qpart is not None:
            if m.group("enum") is not None:
                e = Fraction(int(m.group("enum")), int(m.group("eden") or 1))
            else:
                e = Fraction(1)
            e = e * 12
            if e.denominator != 1:
                raise ValueError(f"exponent not a multiple of 1/12 in {text!r}")
            e = int(e)
        terms.append((e, c))
        pos = m.end()
        first = False
    return QLaurent(terms)


def parse_rational(text: str) -> QRational:
    """Parse `poly / poly` (a bare poly denotes denominator 1)."""
    # exponents may contain '/': only a '/' surrounded by spaces splits num/den
    if " / " in text:
        num_text, den_text = text.split(" / ", 1)
        return QRational(parse_poly(num_text), parse_poly(den_text))
    return QRational(parse_poly(text))
