"""Exact scalars in the field Q(i, sqrt 2).

Every constant in the map catalog (1/2, 1/sqrt 2, sqrt(-2)/4, ...) lives in
this field, so polynomial expansions of catalog maps cancel exactly. Floats
entering from user JSON are converted through :class:`fractions.Fraction`,
which is exact on the binary value.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from numbers import Number

from .errors import InexactCoefficient

_ZERO = Fraction(0)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


class Exact:
    """``(a + b i) + (c + d i) sqrt 2`` with rational ``a, b, c, d``."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        self.a, self.b, self.c, self.d = _frac(a), _frac(b), _frac(c), _frac(d)

    @classmethod
    def coerce(cls, x) -> "Exact":
        if isinstance(x, Exact):
            return x
        if isinstance(x, complex):
            return cls(x.real, x.imag)
        if isinstance(x, Number):
            return cls(x)
        raise TypeError(f"cannot make an exact scalar from {type(x).__name__}")

    @classmethod
    def sqrt2(cls) -> "Exact":
        return cls(0, 0, 1, 0)

    @classmethod
    def i(cls) -> "Exact":
        return cls(0, 1)

    def _key(self):
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, other):
        try:
            return self._key() == Exact.coerce(other)._key()
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self._key())

    def __bool__(self):
        return any(self._key())

    def __repr__(self):
        parts = []
        for val, suffix in ((self.a, ""), (self.b, "i"), (self.c, "r2"), (self.d, "i*r2")):
            if val:
                parts.append(f"{val}{'*' + suffix if suffix else ''}")
        return "Exact(" + (" + ".join(parts) or "0") + ")"

    def __complex__(self):
        r2 = 2 ** 0.5
        return complex(float(self.a) + float(self.c) * r2, float(self.b) + float(self.d) * r2)

    def __neg__(self):
        return Exact(-self.a, -self.b, -self.c, -self.d)

    def __add__(self, other):
        try:
            o = Exact.coerce(other)
        except TypeError:
            return NotImplemented
        return Exact(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            return self + (-Exact.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return Exact.coerce(other) - self

    def __mul__(self, other):
        try:
            o = Exact.coerce(other)
        except TypeError:
            return NotImplemented
        # (p + q r2)(s + t r2) = (ps + 2qt) + (pt + qs) r2 over Gaussian rationals
        p, q, s, t = (self.a, self.b), (self.c, self.d), (o.a, o.b), (o.c, o.d)

        def gm(x, y):
            return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])

        ps, qt, pt, qs = gm(p, s), gm(q, t), gm(p, t), gm(q, s)
        return Exact(ps[0] + 2 * qt[0], ps[1] + 2 * qt[1], pt[0] + qs[0], pt[1] + qs[1])

    __rmul__ = __mul__

    def conjugate(self) -> "Exact":
        return Exact(self.a, -self.b, self.c, -self.d)

    def inverse(self) -> "Exact":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        # multiply by the sqrt2-conjugate, then by the complex conjugate of the
        # resulting Gaussian rational
        bar = Exact(self.a, self.b, -self.c, -self.d)
        g = self * bar  # lies in Q(i)
        norm = g.a * g.a + g.b * g.b
        ginv = Exact(g.a / norm, -g.b / norm)
        return bar * ginv

    def __truediv__(self, other):
        try:
            return self * Exact.coerce(other).inverse()
        except TypeError:
            return NotImplemented

    def __rtruediv__(self, other):
        return Exact.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only natural powers are supported")
        out, base = Exact(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.d)

    def sqrt(self) -> "Exact":
        """Square root with positive real part, when it exists in the field.

        Only positive rationals ``q^2`` and ``2 q^2`` are handled; anything else
        raises :class:`InexactCoefficient`.
        """
        if self.is_rational() and self.a > 0:
            num, den = self.a.numerator, self.a.denominator
            rn, rd = isqrt(num), isqrt(den)
            if rn * rn == num and rd * rd == den:
                return Exact(Fraction(rn, rd))
            if num % 2 == 0:
                h = num // 2
                rh = isqrt(h)
                if rh * rh == h and rd * rd == den:
                    return Exact(0, 0, Fraction(rh, rd))
            if (den % 2 == 0) and isqrt(num) ** 2 == num:
                h = den // 2
                rh = isqrt(h)
                if rh * rh == h:
                    # sqrt(n / (2 h^2)) = sqrt(n) sqrt(2) / (2 h)
                    return Exact(0, 0, Fraction(isqrt(num), 2 * rh))
        if not self:
            return Exact(0)
        raise InexactCoefficient(f"no exact square root of {self!r} in Q(i, sqrt 2)")


ZERO = Exact(0)
ONE = Exact(1)
I = Exact(0, 1)
SQRT2 = Exact(0, 0, 1)


class ExactPoly:
    """Sparse polynomial ``{exponent tuple: Exact}`` in ``nvars`` variables.

    When ``weights`` and ``order`` are set, products drop every monomial whose
    weighted degree exceeds ``order`` (a truncated power series).
    """

    __slots__ = ("nvars", "terms", "weights", "order")

    def __init__(self, nvars: int, terms=None, weights=None, order=None):
        self.nvars = nvars
        self.weights = tuple(weights) if weights is not None else (1,) * nvars
        self.order = order
        self.terms = {}
        for e, c in (terms or {}).items():
            c = Exact.coerce(c)
            if c and self._keep(e):
                self.terms[tuple(e)] = c

    def _keep(self, e) -> bool:
        return self.order is None or self.wdeg(e) <= self.order

    def wdeg(self, e) -> int:
        return sum(w * k for w, k in zip(self.weights, e))

    def _like(self, terms) -> "ExactPoly":
        out = ExactPoly(self.nvars, None, self.weights, self.order)
        out.terms = {e: c for e, c in terms.items() if c and out._keep(e)}
        return out

    @classmethod
    def const(cls, nvars, c, weights=None, order=None) -> "ExactPoly":
        return cls(nvars, {(0,) * nvars: c}, weights, order)

    @classmethod
    def var(cls, nvars, j, weights=None, order=None) -> "ExactPoly":
        e = [0] * nvars
        e[j] = 1
        return cls(nvars, {tuple(e): ONE}, weights, order)

    def _coerce(self, other) -> "ExactPoly":
        if isinstance(other, ExactPoly):
            return other
        return ExactPoly.const(self.nvars, other, self.weights, self.order)

    def __add__(self, other):
        o = self._coerce(other)
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t[e] + c if e in t else c
        return self._like(t)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, ExactPoly):
            c = Exact.coerce(other)
            return self._like({e: v * c for e, v in self.terms.items()})
        t = {}
        for e1, c1 in self.terms.items():
            d1 = self.wdeg(e1)
            for e2, c2 in other.terms.items():
                if self.order is not None and d1 + self.wdeg(e2) > self.order:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                t[e] = t[e] + p if e in t else p
        return self._like(t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ExactPoly.const(self.nvars, ONE, self.weights, self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, ExactPoly):
            other = self._coerce(other)
        return self.terms == other.terms

    def __repr__(self):
        return f"ExactPoly({self.nvars}, {len(self.terms)} terms)"

    def constant(self) -> Exact:
        return self.terms.get((0,) * self.nvars, ZERO)

    def conj_coeffs(self) -> "ExactPoly":
        return self._like({e: c.conjugate() for e, c in self.terms.items()})

    def homogeneous_part(self, deg: int) -> "ExactPoly":
        return self._like({e: c for e, c in self.terms.items() if self.wdeg(e) == deg})

    def max_degree(self) -> int:
        return max((self.wdeg(e) for e in self.terms), default=-1)

    def truncate(self, order: int) -> "ExactPoly":
        out = ExactPoly(self.nvars, None, self.weights, order)
        out.terms = {e: c for e, c in self.terms.items() if out._keep(e)}
        return out

    def embed(self, nvars: int, positions) -> "ExactPoly":
        """Re-index variables: old variable ``j`` becomes new variable ``positions[j]``."""
        t = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for j, k in enumerate(e):
                ne[positions[j]] += k
            t[tuple(ne)] = c
        return ExactPoly(nvars, t)

    def evaluate(self, z) -> complex:
        z = [complex(x) for x in z]
        total = 0j
        for e, c in self.terms.items():
            term = complex(c)
            for x, k in zip(z, e):
                if k:
                    term *= x**k
            total += term
        return total
