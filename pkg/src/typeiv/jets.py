"""Weighted truncated series for CR maps between Heisenberg models.

Source points are ``(z_1..z_{n-1}, w)`` with weights ``(1, .., 1, 2)``. A map
``F = (f, phi, g)`` sends the Heisenberg hypersurface ``Im w = |z|^2`` into the
signature-one model when

    rho(F) = -Im g + |f|^2 + sum_{i < last} |phi_i|^2 - |phi_last|^2

vanishes after the substitution ``w = u + i |z|^2``. The restricted ring has
variables ``(z, zbar, u)`` treated as independent symbols, with weights
``(1, .., 1, 1, .., 1, 2)``. All coefficients are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .domains import HEISENBERG, HEISENBERG_SIG1, DomainSpec
from .errors import DomainMismatch, NotAnalyticAtOrigin, NotNormalForm, ParameterOutOfRange
from .exact import ONE, ZERO, Exact, ExactPoly
from .expr import Add, Const, Div, Expr, HoloMap, Mul, Neg, Pow, Sqrt, Var, substitute, variables

DEFAULT_ORDER = 8
HALF_I = Exact(0, Fraction(1, 2))


def heisenberg_weights(nvars: int) -> tuple:
    return (1,) * (nvars - 1) + (2,)


def _poly_json(p: ExactPoly) -> list:
    out = []
    for e in sorted(p.terms, key=lambda e: (p.wdeg(e), tuple(-k for k in e))):
        c = p.terms[e]
        out.append({"exp": list(e), "coeff": [str(c.a), str(c.b), str(c.c), str(c.d)]})
    return out


@dataclass(frozen=True, eq=False)
class WeightedSeries:
    """A holomorphic series in ``(z, w)`` truncated at weighted order ``order``."""

    poly: ExactPoly

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    @property
    def order(self) -> int:
        return self.poly.order

    @classmethod
    def zero(cls, nvars: int, order: int) -> "WeightedSeries":
        return cls(ExactPoly(nvars, None, heisenberg_weights(nvars), order))

    def part(self, k: int) -> ExactPoly:
        return self.poly.homogeneous_part(k)

    def __eq__(self, other):
        return isinstance(other, WeightedSeries) and self.poly == other.poly

    def to_json(self) -> dict:
        return {"nvars": self.nvars, "order": self.order, "weights": list(self.poly.weights),
                "terms": _poly_json(self.poly)}


# --- expansion ---------------------------------------------------------------


def _const(nvars, weights, order, c):
    return ExactPoly.const(nvars, c, weights, order)


def _inverse(p: ExactPoly) -> ExactPoly:
    """``1 / p`` by the geometric series; ``p(0)`` must be nonzero."""
    c0 = p.constant()
    if not c0:
        raise NotAnalyticAtOrigin("denominator vanishes at the origin")
    inv0 = c0.inverse()
    r = p * inv0 - ONE  # no constant term, so r^k has weighted degree >= k
    out = _const(p.nvars, p.weights, p.order, ONE)
    term = out
    for _ in range(p.order):
        term = -(term * r)
        if not term:
            break
        out = out + term
    return out * inv0


def _sqrt(p: ExactPoly) -> ExactPoly:
    """Square root with positive real constant term, by Newton iteration."""
    c0 = p.constant()
    if not c0:
        raise NotAnalyticAtOrigin("square root argument vanishes at the origin")
    y = _const(p.nvars, p.weights, p.order, c0.sqrt())
    half = Exact(Fraction(1, 2))
    correct = 1
    while correct <= p.order:
        y = (y + p * _inverse(y)) * half
        correct *= 2
    return (y + p * _inverse(y)) * half


def expand(e, nvars: int, order: int = DEFAULT_ORDER, weights=None) -> WeightedSeries:
    """Exact Taylor expansion of an expression tree up to weighted ``order``.

    Raises:
        NotAnalyticAtOrigin: a denominator or square root argument vanishes at 0.
        InexactCoefficient: a constant square root leaves ``Q(i, sqrt 2)``.
    """
    if order < 0:
        raise ParameterOutOfRange("order must be nonnegative")
    weights = heisenberg_weights(nvars) if weights is None else tuple(weights)
    memo = {}

    def go(x):
        key = id(x)
        if key in memo:
            return memo[key]
        if isinstance(x, Const):
            r = _const(nvars, weights, order, Exact.coerce(x.value))
        elif isinstance(x, Var):
            r = ExactPoly.var(nvars, x.index, weights, order)
        elif isinstance(x, Add):
            r = _const(nvars, weights, order, ZERO)
            for t in x.terms:
                r = r + go(t)
        elif isinstance(x, Mul):
            r = _const(nvars, weights, order, ONE)
            for t in x.factors:
                r = r * go(t)
        elif isinstance(x, Neg):
            r = -go(x.arg)
        elif isinstance(x, Pow):
            r = go(x.base) ** x.k
        elif isinstance(x, Div):
            r = go(x.num) * _inverse(go(x.den))
        elif isinstance(x, Sqrt):
            r = _sqrt(go(x.arg))
        else:  # pragma: no cover
            raise TypeError(type(x).__name__)
        memo[key] = r
        return r

    if isinstance(e, Expr):
        return WeightedSeries(go(e))
    return WeightedSeries(_const(nvars, weights, order, Exact.coerce(e)))


# --- restriction to the Heisenberg hypersurface -------------------------------


class _Restriction:
    """Substitution ``w = u + i |z|^2`` into holomorphic and antiholomorphic series."""

    def __init__(self, n: int, order: int):
        self.n = n  # source dimension; z has n - 1 entries
        k = n - 1
        self.nv = 2 * k + 1
        self.weights = (1,) * (2 * k) + (2,)
        self.order = order
        norm = ExactPoly(self.nv, None, self.weights, order)
        for j in range(k):
            norm = norm + self.var(j) * self.var(k + j)
        u = self.var(2 * k)
        self.w = u + norm * Exact(0, 1)
        self.wbar = u - norm * Exact(0, 1)
        self._wp = [self.one(), self.w]
        self._wbp = [self.one(), self.wbar]

    def one(self) -> ExactPoly:
        return ExactPoly.const(self.nv, ONE, self.weights, self.order)

    def var(self, j: int) -> ExactPoly:
        return ExactPoly.var(self.nv, j, self.weights, self.order)

    def _pow(self, cache, k):
        while len(cache) <= k:
            cache.append(cache[-1] * cache[1])
        return cache[k]

    def holo(self, p: ExactPoly) -> ExactPoly:
        out = ExactPoly(self.nv, None, self.weights, self.order)
        k = self.n - 1
        for e, c in p.terms.items():
            mon = ExactPoly(self.nv, {tuple(e[:k]) + (0,) * (k + 1): c}, self.weights, self.order)
            out = out + mon * self._pow(self._wp, e[k])
        return out

    def antiholo(self, p: ExactPoly) -> ExactPoly:
        out = ExactPoly(self.nv, None, self.weights, self.order)
        k = self.n - 1
        for e, c in p.terms.items():
            mon = ExactPoly(self.nv, {(0,) * k + tuple(e[:k]) + (0,): c.conjugate()}, self.weights, self.order)
            out = out + mon * self._pow(self._wbp, e[k])
        return out

    def norm_sq(self, p: ExactPoly) -> ExactPoly:
        return self.holo(p) * self.antiholo(p)


@dataclass(frozen=True, eq=False)
class MappingResidual:
    """Weighted-homogeneous parts ``rho^(0..order)`` of the restricted defining function."""

    n: int
    order: int
    parts: tuple

    @property
    def is_zero(self) -> bool:
        return not any(self.parts)

    def first_nonzero(self):
        return next((k for k, p in enumerate(self.parts) if p), None)

    def to_json(self) -> dict:
        return {"n": self.n, "order": self.order, "variables": "z, zbar, u", "zero": self.is_zero,
                "parts": [_poly_json(p) for p in self.parts]}


def _check_heisenberg_map(f: HoloMap):
    if f.source.kind != HEISENBERG or f.target.kind not in (HEISENBERG, HEISENBERG_SIG1):
        raise DomainMismatch(f"expected a map between Heisenberg models, got {f.source} -> {f.target}")


def _rho(f: HoloMap, order: int):
    _check_heisenberg_map(f)
    n = f.source.dim
    series = [expand(c, n, order).poly for c in f.components]
    res = _Restriction(n, order)
    g = series[-1]
    # -Im g = -(g - gbar) / (2i) = (i/2) (g - gbar)
    rho = (res.holo(g) - res.antiholo(g)) * HALF_I
    comps = series[:-1]
    neg = len(comps) - 1 if f.target.kind == HEISENBERG_SIG1 else None
    for j, p in enumerate(comps):
        term = res.norm_sq(p)
        rho = rho - term if j == neg else rho + term
    return rho, series, res


def mapping_residual(f: HoloMap, order: int = DEFAULT_ORDER) -> MappingResidual:
    """Expand ``rho(F)`` on the hypersurface up to weighted ``order``.

    An all-zero result certifies that ``F`` maps the source hypersurface into
    the target one up to that order.
    """
    rho, _, _ = _rho(f, order)
    return MappingResidual(f.source.dim, order, tuple(rho.homogeneous_part(k) for k in range(order + 1)))


# --- normal form --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NormalFormReport:
    """Jets extracted from a normalized map and the status of the quadratic constraint.

    ``a1[j]`` is linear in ``z`` and ``phi2[i]`` is the weight-two part of
    ``phi_i`` (it may involve ``w``; ``phi2_uses_w`` says so). The constraint
    compares ``<a1, zbar> |z|^2`` with ``<phi2, conj(phi2)>_1`` as polynomials
    in ``(z, zbar, u)``.
    """

    n: int
    order: int
    a1: tuple
    phi2: tuple
    phi2_uses_w: bool
    constraint_lhs: ExactPoly
    constraint_rhs: ExactPoly
    constraint_holds: bool
    residual: MappingResidual

    @property
    def maps_hypersurface(self) -> bool:
        return self.residual.is_zero

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "order": self.order,
            "a1": [_poly_json(p) for p in self.a1],
            "phi2": [_poly_json(p) for p in self.phi2],
            "phi2_uses_w": self.phi2_uses_w,
            "constraint_lhs": _poly_json(self.constraint_lhs),
            "constraint_rhs": _poly_json(self.constraint_rhs),
            "constraint_holds": self.constraint_holds,
            "residual_zero": self.residual.is_zero,
            "residual_first_nonzero": self.residual.first_nonzero(),
        }


def _upto(p: ExactPoly, k: int) -> ExactPoly:
    return p.truncate(k)


def normal_form_check(f: HoloMap, order: int = DEFAULT_ORDER) -> NormalFormReport:
    """Read ``a^(1)`` and ``phi^(2)`` off a map in normal form.

    The expected shape is ``f = z + (i/2) a1(z) w + O_wt(4)``,
    ``phi = phi2 + O_wt(3)`` and ``g = w + O_wt(5)``.

    Raises:
        NotNormalForm: with the first jet that breaks the shape.
    """
    _check_heisenberg_map(f)
    n = f.source.dim
    k = n - 1
    if f.target.dim < n:
        raise DomainMismatch("target must have at least the source dimension")
    order = max(order, 4)
    rho, series, res = _rho(f, order)
    fs, phis, g = series[:k], series[k:-1], series[-1]
    wts = heisenberg_weights(n)

    def mono(e, c=ONE):
        return ExactPoly(n, {tuple(e): c}, wts, order)

    w_var = mono((0,) * k + (1,))
    if _upto(g, 4) != w_var:
        raise NotNormalForm("g is not w up to weighted order 4", jet=_upto(g, 4))
    a1 = []
    for j, p in enumerate(fs):
        zj = mono(tuple(int(i == j) for i in range(k)) + (0,))
        low = _upto(p, 2)
        if low != zj:
            raise NotNormalForm(f"f_{j + 1} is not z_{j + 1} up to weighted order 2", jet=low)
        third = p.homogeneous_part(3)
        lin = {}
        for e, c in third.terms.items():
            if e[k] != 1:
                raise NotNormalForm(f"f_{j + 1} has a weight-3 term without w", jet=third)
            # (i/2) a1 w  ->  a1 = -2i * coefficient
            lin[tuple(e[:k]) + (0,)] = c * Exact(0, -2)
        a1.append(ExactPoly(n, lin, wts, order))
    for i, p in enumerate(phis):
        if _upto(p, 1):
            raise NotNormalForm(f"phi_{i + 1} has terms of weighted order below 2", jet=_upto(p, 1))
    phi2 = [p.homogeneous_part(2) for p in phis]
    uses_w = any(e[k] for p in phi2 for e in p.terms)

    lhs = ExactPoly(res.nv, None, res.weights, order)
    for j, a in enumerate(a1):
        lhs = lhs + res.holo(a) * res.var(k + j)
    norm = ExactPoly(res.nv, None, res.weights, order)
    for j in range(k):
        norm = norm + res.var(j) * res.var(k + j)
    lhs = lhs * norm
    rhs = ExactPoly(res.nv, None, res.weights, order)
    neg = len(phi2) - 1 if f.target.kind == HEISENBERG_SIG1 else None
    for i, p in enumerate(phi2):
        t = res.norm_sq(p)
        rhs = rhs - t if i == neg else rhs + t
    return NormalFormReport(n, order, tuple(a1), tuple(phi2), uses_w, lhs, rhs, lhs == rhs,
                            MappingResidual(n, order, tuple(rho.homogeneous_part(d) for d in range(order + 1))))


# --- model maps ---------------------------------------------------------------


def linear_model(n: int, N: int) -> HoloMap:
    """``(z, 0, .., 0, w)`` from the ``n``-dimensional model into the signature-one ``N`` model."""
    if N < n + 1:
        raise ParameterOutOfRange("need N >= n + 1")
    v = variables(n)
    comps = tuple(v[:-1]) + (Const(0),) * (N - n) + (v[-1],)
    return HoloMap(DomainSpec.heisenberg(n), DomainSpec.heisenberg_sig1(N), comps, f"linear:n={n},N={N}")


def psi_model(n: int, N: int, psi: Expr | None = None) -> HoloMap:
    """``(z_1..z_{n-1}, 0, .., 0, psi, psi, w)``; ``psi`` defaults to ``z_1^2``."""
    if N < n + 2:
        raise ParameterOutOfRange("need N >= n + 2")
    v = variables(n)
    psi = v[0] * v[0] if psi is None else psi
    comps = tuple(v[:-1]) + (Const(0),) * (N - n - 2) + (psi, psi, v[-1])
    return HoloMap(DomainSpec.heisenberg(n), DomainSpec.heisenberg_sig1(N), comps, f"psi:n={n},N={N}")


def cayley_exprs(n: int) -> list:
    """``(z, w) -> (2z / (1 - iw), (1 + iw) / (1 - iw))`` as expressions."""
    v = variables(n)
    den = 1 - Const(1j) * v[-1]
    return [Const(2) * x / den for x in v[:-1]] + [(1 + Const(1j) * v[-1]) / den]


def cayley_inverse_exprs(args) -> list:
    """``(Z, Z_N) -> (Z / (1 + Z_N), -i (Z_N - 1) / (1 + Z_N))`` on expressions ``args``."""
    den = 1 + args[-1]
    return [x / den for x in args[:-1]] + [Const(-1j) * (args[-1] - 1) / den]


def cayley_embedding(n: int, N: int) -> HoloMap:
    """The ball embedding ``Z -> (Z', 0, .., 0, Z_n)`` conjugated by Cayley transforms."""
    if N < n + 1:
        raise ParameterOutOfRange("need N >= n + 1")
    c = cayley_exprs(n)
    ball = c[:-1] + [Const(0)] * (N - n) + [c[-1]]
    comps = cayley_inverse_exprs(ball)
    return HoloMap(DomainSpec.heisenberg(n), DomainSpec.heisenberg_sig1(N), tuple(comps),
                   f"cayley-linear:n={n},N={N}")


def compose_heisenberg(f: HoloMap, args) -> HoloMap:
    """``F`` precomposed with expressions ``args`` in the source variables."""
    return HoloMap(f.source, f.target, tuple(substitute(c, list(args)) for c in f.components), f.name)


__all__ = [
    "DEFAULT_ORDER", "MappingResidual", "NormalFormReport", "WeightedSeries", "cayley_embedding",
    "cayley_exprs", "cayley_inverse_exprs", "compose_heisenberg", "expand", "heisenberg_weights",
    "linear_model", "mapping_residual", "normal_form_check", "psi_model",
]
