"""Expression trees for holomorphic maps.

Nodes are immutable. Arithmetic operators build trees, so catalog formulas read
like the math::

    z = variables(2)
    g = 1 - sqrt(1 - z[0]**2 - z[1]**2)

Evaluation is vectorized over a batch of points. The Jacobian is computed by
forward-mode dual numbers carried through the same tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number

import numpy as np

from .domains import DomainSpec
from .errors import BranchPoint, DimensionMismatch, NotDifferentiable, NotPolynomial, Pole
from .exact import Exact, ExactPoly

POLE_TOL = 1e-12
BRANCH_TOL = 1e-12


class Expr:
    """Base class of expression nodes."""

    def __add__(self, other):
        return Add((self, as_expr(other)))

    def __radd__(self, other):
        return Add((as_expr(other), self))

    def __sub__(self, other):
        return Add((self, Neg(as_expr(other))))

    def __rsub__(self, other):
        return Add((as_expr(other), Neg(self)))

    def __mul__(self, other):
        return Mul((self, as_expr(other)))

    def __rmul__(self, other):
        return Mul((as_expr(other), self))

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a natural number")
        return Pow(self, k)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: object  # complex number or Exact

    def __post_init__(self):
        if not isinstance(self.value, (Exact, Number)):
            raise TypeError(f"constant must be a number, got {type(self.value).__name__}")


@dataclass(frozen=True, eq=True)
class Var(Expr):
    index: int


@dataclass(frozen=True, eq=True)
class Add(Expr):
    terms: tuple


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    factors: tuple


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class Div(Expr):
    num: Expr
    den: Expr


@dataclass(frozen=True, eq=True)
class Sqrt(Expr):
    """Principal square root: argument in ``(-pi, pi]``, result in the right half plane."""

    arg: Expr


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    k: int


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (Exact, Number)):
        return Const(x)
    raise TypeError(f"cannot use {type(x).__name__} in an expression")


def sqrt(x) -> Expr:
    return Sqrt(as_expr(x))


def variables(n: int) -> list:
    return [Var(j) for j in range(n)]


def total(xs) -> Expr:
    xs = [as_expr(x) for x in xs]
    if not xs:
        return Const(0)
    return xs[0] if len(xs) == 1 else Add(tuple(xs))


def children(e: Expr) -> tuple:
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, (Neg, Sqrt)):
        return (e.arg,)
    if isinstance(e, Div):
        return (e.num, e.den)
    if isinstance(e, Pow):
        return (e.base,)
    return ()


def max_var(e: Expr) -> int:
    """Largest variable index used, ``-1`` for a constant."""
    if isinstance(e, Var):
        return e.index
    return max((max_var(c) for c in children(e)), default=-1)


def is_polynomial(e: Expr) -> bool:
    if isinstance(e, (Div, Sqrt)):
        return False
    return all(is_polynomial(c) for c in children(e))


def substitute(e: Expr, args) -> Expr:
    """Replace ``Var(j)`` by ``args[j]``."""
    memo = {}

    def go(x):
        key = id(x)
        if key in memo:
            return memo[key]
        if isinstance(x, Var):
            r = as_expr(args[x.index])
        elif isinstance(x, Const):
            r = x
        elif isinstance(x, Add):
            r = Add(tuple(go(t) for t in x.terms))
        elif isinstance(x, Mul):
            r = Mul(tuple(go(t) for t in x.factors))
        elif isinstance(x, Neg):
            r = Neg(go(x.arg))
        elif isinstance(x, Div):
            r = Div(go(x.num), go(x.den))
        elif isinstance(x, Sqrt):
            r = Sqrt(go(x.arg))
        elif isinstance(x, Pow):
            r = Pow(go(x.base), x.k)
        else:  # pragma: no cover
            raise TypeError(type(x))
        memo[key] = r
        return r

    return go(e)


# --- numeric evaluation ----------------------------------------------------


class _Ctx:
    """Per-batch bookkeeping of failed points."""

    def __init__(self, size: int):
        self.bad = np.zeros(size, dtype=bool)
        self.first = None

    def fail(self, mask, exc_type, msg):
        mask = np.asarray(mask, dtype=bool)
        if mask.any():
            if self.first is None:
                self.first = exc_type(msg)
            self.bad |= mask


def _principal_sqrt(u, ctx: _Ctx, strict_cut: bool):
    mag = np.abs(u)
    ctx.fail(mag <= BRANCH_TOL, BranchPoint, "square root argument at the branch point 0")
    on_cut = (u.real < 0) & (np.abs(u.imag) <= BRANCH_TOL * np.maximum(mag, 1.0))
    if strict_cut:
        ctx.fail(on_cut, NotDifferentiable, "square root argument on the negative real cut")
    r = np.sqrt(u)
    # numpy follows the sign of a zero imaginary part; the principal branch takes +i
    return np.where(on_cut, 1j * np.sqrt(mag), r)


def _eval(e: Expr, z: np.ndarray, ctx: _Ctx, memo: dict):
    key = id(e)
    if key in memo:
        return memo[key]
    if isinstance(e, Const):
        r = np.full(z.shape[0], complex(e.value))
    elif isinstance(e, Var):
        r = z[:, e.index]
    elif isinstance(e, Add):
        r = sum(_eval(t, z, ctx, memo) for t in e.terms)
    elif isinstance(e, Mul):
        r = np.ones(z.shape[0], complex)
        for t in e.factors:
            r = r * _eval(t, z, ctx, memo)
    elif isinstance(e, Neg):
        r = -_eval(e.arg, z, ctx, memo)
    elif isinstance(e, Div):
        a, b = _eval(e.num, z, ctx, memo), _eval(e.den, z, ctx, memo)
        small = np.abs(b) <= POLE_TOL
        ctx.fail(small, Pole, "denominator vanishes")
        r = a / np.where(small, 1.0, b)
    elif isinstance(e, Sqrt):
        r = _principal_sqrt(_eval(e.arg, z, ctx, memo), ctx, strict_cut=False)
    elif isinstance(e, Pow):
        r = _eval(e.base, z, ctx, memo) ** e.k
    else:  # pragma: no cover
        raise TypeError(type(e))
    r = np.broadcast_to(np.asarray(r, dtype=complex), (z.shape[0],))
    memo[key] = r
    return r


def _dual(e: Expr, z: np.ndarray, ctx: _Ctx, memo: dict):
    """Value and gradient (batch, n) of ``e``."""
    key = id(e)
    if key in memo:
        return memo[key]
    b, n = z.shape
    if isinstance(e, Const):
        r = (np.full(b, complex(e.value)), np.zeros((b, n), complex))
    elif isinstance(e, Var):
        g = np.zeros((b, n), complex)
        g[:, e.index] = 1.0
        r = (z[:, e.index].copy(), g)
    elif isinstance(e, Add):
        v, g = np.zeros(b, complex), np.zeros((b, n), complex)
        for t in e.terms:
            tv, tg = _dual(t, z, ctx, memo)
            v, g = v + tv, g + tg
        r = (v, g)
    elif isinstance(e, Mul):
        v, g = np.ones(b, complex), np.zeros((b, n), complex)
        for t in e.factors:
            tv, tg = _dual(t, z, ctx, memo)
            v, g = v * tv, g * tv[:, None] + v[:, None] * tg
        r = (v, g)
    elif isinstance(e, Neg):
        v, g = _dual(e.arg, z, ctx, memo)
        r = (-v, -g)
    elif isinstance(e, Div):
        av, ag = _dual(e.num, z, ctx, memo)
        bv, bg = _dual(e.den, z, ctx, memo)
        small = np.abs(bv) <= POLE_TOL
        ctx.fail(small, Pole, "denominator vanishes")
        bv = np.where(small, 1.0, bv)
        v = av / bv
        r = (v, (ag - v[:, None] * bg) / bv[:, None])
    elif isinstance(e, Sqrt):
        uv, ug = _dual(e.arg, z, ctx, memo)
        s = _principal_sqrt(uv, ctx, strict_cut=True)
        safe = np.where(np.abs(s) <= BRANCH_TOL, 1.0, s)
        r = (s, ug / (2.0 * safe[:, None]))
    elif isinstance(e, Pow):
        uv, ug = _dual(e.base, z, ctx, memo)
        if e.k == 0:
            r = (np.ones(b, complex), np.zeros((b, n), complex))
        else:
            r = (uv**e.k, (e.k * uv ** (e.k - 1))[:, None] * ug)
    else:  # pragma: no cover
        raise TypeError(type(e))
    memo[key] = r
    return r


# --- exact expansion -------------------------------------------------------


def expand_polynomial(e: Expr, nvars: int) -> ExactPoly:
    """Exact expansion of a polynomial tree; raises :class:`NotPolynomial`."""
    memo = {}

    def go(x):
        key = id(x)
        if key in memo:
            return memo[key]
        if isinstance(x, Const):
            r = ExactPoly.const(nvars, Exact.coerce(x.value))
        elif isinstance(x, Var):
            r = ExactPoly.var(nvars, x.index)
        elif isinstance(x, Add):
            r = ExactPoly(nvars)
            for t in x.terms:
                r = r + go(t)
        elif isinstance(x, Mul):
            r = ExactPoly.const(nvars, 1)
            for t in x.factors:
                r = r * go(t)
        elif isinstance(x, Neg):
            r = -go(x.arg)
        elif isinstance(x, Pow):
            r = go(x.base) ** x.k
        else:
            raise NotPolynomial(f"{type(x).__name__} node in a polynomial expansion")
        memo[key] = r
        return r

    return go(e)


# --- JSON --------------------------------------------------------------------


def expr_to_json(e: Expr):
    if isinstance(e, Const):
        if isinstance(e.value, Exact):
            v = e.value
            return {"exact": [str(v.a), str(v.b), str(v.c), str(v.d)]}
        c = complex(e.value)
        return {"const": {"re": c.real, "im": c.imag}}
    if isinstance(e, Var):
        return {"var": e.index}
    if isinstance(e, Add):
        return {"add": [expr_to_json(t) for t in e.terms]}
    if isinstance(e, Mul):
        return {"mul": [expr_to_json(t) for t in e.factors]}
    if isinstance(e, Neg):
        return {"neg": expr_to_json(e.arg)}
    if isinstance(e, Div):
        return {"div": [expr_to_json(e.num), expr_to_json(e.den)]}
    if isinstance(e, Sqrt):
        return {"sqrt": expr_to_json(e.arg)}
    if isinstance(e, Pow):
        return {"pow": [expr_to_json(e.base), e.k]}
    raise TypeError(type(e))  # pragma: no cover


def expr_from_json(d) -> Expr:
    if isinstance(d, (int, float)) and not isinstance(d, bool):
        return Const(complex(d))
    if not isinstance(d, dict) or len(d) != 1:
        raise ValueError(f"malformed expression node: {d!r}")
    (tag, body), = d.items()
    if tag == "const":
        if isinstance(body, dict):
            return Const(complex(float(body.get("re", 0.0)), float(body.get("im", 0.0))))
        return Const(complex(body))
    if tag == "exact":
        if not isinstance(body, list) or len(body) != 4:
            raise ValueError(f"exact constant needs four rational parts, got {body!r}")
        return Const(Exact(*(Fraction(str(x)) for x in body)))
    if tag == "var":
        if not isinstance(body, int) or body < 0:
            raise ValueError(f"bad variable index {body!r}")
        return Var(body)
    if tag == "add":
        return Add(tuple(expr_from_json(t) for t in body))
    if tag == "mul":
        return Mul(tuple(expr_from_json(t) for t in body))
    if tag == "neg":
        return Neg(expr_from_json(body))
    if tag == "div":
        a, b = body
        return Div(expr_from_json(a), expr_from_json(b))
    if tag == "sqrt":
        return Sqrt(expr_from_json(body))
    if tag == "pow":
        base, k = body
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"bad exponent {k!r}")
        return Pow(expr_from_json(base), k)
    raise ValueError(f"unknown expression node {tag!r}")


# --- maps --------------------------------------------------------------------


@dataclass(frozen=True)
class HoloMap:
    """Holomorphic map given by one expression per target coordinate."""

    source: DomainSpec
    target: DomainSpec
    components: tuple
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        comps = tuple(as_expr(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.target.dim:
            raise DimensionMismatch(f"{len(comps)} components for target {self.target}")
        top = max((max_var(c) for c in comps), default=-1)
        if top >= self.source.dim:
            raise DimensionMismatch(f"variable index {top} outside source {self.source}")

    def _points(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape[-1:] != (self.source.dim,):
            raise DimensionMismatch(f"map on {self.source} got points of shape {z.shape}")
        return z

    def eval_batch(self, z, strict: bool = True):
        """Evaluate at a batch ``(b, n)``.

        With ``strict`` the first pole or branch failure is raised; otherwise
        ``(values, ok)`` is returned with failed rows marked in ``ok``.
        """
        z = np.atleast_2d(self._points(z))
        ctx, memo = _Ctx(z.shape[0]), {}
        vals = np.stack([_eval(c, z, ctx, memo) for c in self.components], axis=1)
        if strict:
            if ctx.first is not None:
                raise ctx.first
            return vals
        return vals, ~ctx.bad

    def __call__(self, z) -> np.ndarray:
        z = self._points(z)
        out = self.eval_batch(z.reshape(-1, self.source.dim))
        return out.reshape(z.shape[:-1] + (self.target.dim,))

    def jacobian_batch(self, z, strict: bool = True):
        """Holomorphic Jacobians ``J[b, a, j] = df_a/dz_j``."""
        z = np.atleast_2d(self._points(z))
        ctx, memo = _Ctx(z.shape[0]), {}
        jac = np.stack([_dual(c, z, ctx, memo)[1] for c in self.components], axis=1)
        if strict:
            if ctx.first is not None:
                raise ctx.first
            return jac
        return jac, ~ctx.bad

    def jacobian(self, z) -> np.ndarray:
        z = self._points(z)
        if z.ndim != 1:
            raise DimensionMismatch("jacobian takes a single point; use jacobian_batch")
        return self.jacobian_batch(z[None, :])[0]

    def is_polynomial(self) -> bool:
        return all(is_polynomial(c) for c in self.components)

    def with_target(self, target: DomainSpec, name: str | None = None) -> "HoloMap":
        return HoloMap(self.source, target, self.components, name)

    def to_json(self) -> dict:
        d = {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "components": [expr_to_json(c) for c in self.components],
        }
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_json(cls, d: dict) -> "HoloMap":
        return cls(
            DomainSpec.from_json(d["source"]),
            DomainSpec.from_json(d["target"]),
            tuple(expr_from_json(c) for c in d["components"]),
            d.get("name"),
        )


def jacobian(f: HoloMap, z) -> np.ndarray:
    return f.jacobian(z)


def evaluate(f: HoloMap, z) -> np.ndarray:
    return f(z)
