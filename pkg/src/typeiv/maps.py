"""The catalog of named maps, kernel residuals and composition with automorphisms.

Catalog maps are addressable by key strings such as ``"RIV:n=3"``,
``"Itheta:n=2,theta=pi/6"`` or ``"flat:n=2,m=4"``. Irrational constants
of the formulas (``1/sqrt 2``, ``sqrt(-2)/4``) are stored as exact
:class:`~typeiv.exact.Exact` scalars so polynomial expansions cancel exactly.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .domains import TYPE_IV, UNIT_BALL, DomainSpec
from .errors import DomainMismatch, ParameterOutOfRange
from .exact import Exact
from .expr import Const, Expr, HoloMap, Var, sqrt, substitute, total, variables
from .groups import Automorphism, automorphism_map

HALF = Const(Exact(Fraction(1, 2)))
INV_SQRT2 = Const(Exact(0, 0, Fraction(1, 2)))  # 1/sqrt 2 = sqrt 2 / 2
INV_SQRT_M2 = Const(Exact(0, 0, 0, Fraction(-1, 2)))  # 1/sqrt(-2) = -i sqrt 2 / 2
SQRT2 = Const(Exact(0, 0, 1))
SQRT2_4 = Const(Exact(0, 0, Fraction(1, 4)))  # sqrt 2 / 4
SQRT_M2_4 = Const(Exact(0, 0, 0, Fraction(1, 4)))  # sqrt(-2) / 4 = i sqrt 2 / 4
I = Const(Exact(0, 1))

FAMILIES = ("RIV", "Itheta", "Izero", "L", "flat", "whitneyIV", "Gk", "PsiDegenerate", "Exhp0", "ClassB")


def _sumsq(xs) -> Expr:
    return total([x * x for x in xs])


def parse_angle(s) -> float:
    """Radians as a decimal literal, or a multiple of pi like ``"pi/6"``, ``"2pi/5"``."""
    if isinstance(s, (int, float)):
        return float(s)
    t = str(s).strip().replace(" ", "").replace("*", "")
    m = re.fullmatch(r"([0-9.]*)pi(?:/([0-9.]+))?", t)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(t)
    except ValueError:
        raise ParameterOutOfRange(f"cannot read angle {s!r}") from None


@dataclass(frozen=True)
class CatalogKey:
    family: str
    params: tuple  # sorted (name, value) pairs

    def __str__(self):
        if not self.params:
            return self.family
        return self.family + ":" + ",".join(f"{k}={v}" for k, v in self.params)

    def get(self, name, default=None):
        return dict(self.params).get(name, default)

    @classmethod
    def parse(cls, text: str) -> "CatalogKey":
        fam, _, rest = text.strip().partition(":")
        lookup = {f.lower(): f for f in FAMILIES}
        if fam.lower() not in lookup:
            raise ParameterOutOfRange(f"unknown catalog family {fam!r}")
        params = []
        for item in filter(None, rest.split(",")):
            name, eq, val = item.partition("=")
            if not eq:
                raise ParameterOutOfRange(f"malformed catalog parameter {item!r}")
            name = name.strip()
            if name == "theta":
                params.append((name, parse_angle(val)))
            else:
                try:
                    params.append((name, int(val)))
                except ValueError:
                    raise ParameterOutOfRange(f"parameter {name} must be an integer") from None
        return cls(lookup[fam.lower()], tuple(sorted(params)))


def _need(cond, msg):
    if not cond:
        raise ParameterOutOfRange(msg)


# --- builders ---------------------------------------------------------------


def riv(n: int) -> HoloMap:
    """The rational isometry ``R^IV_n`` of the ball into ``D^IV_{n+1}``."""
    _need(n >= 2, "RIV needs n >= 2")
    z = variables(n)
    s = _sumsq(z[:-1])
    zn = z[-1]
    q = SQRT2 * (1 - zn)
    pn = HALF * s - zn * zn + zn
    pn1 = -I * (HALF * s + zn * zn - zn)
    return HoloMap(DomainSpec.ball(n), DomainSpec.type_iv(n + 1), tuple(z[:-1]) + (pn / q, pn1 / q), f"RIV:n={n}")


def class_a(n: int) -> HoloMap:
    """``R^IV_n`` with the sign of its last component flipped."""
    f = riv(n)
    comps = f.components[:-1] + (-f.components[-1],)
    return HoloMap(f.source, f.target, comps, f"ClassA:n={n}")


def itheta(n: int, theta: float) -> HoloMap:
    """The irrational isometry ``I_{n,theta}``, ``theta`` in ``[0, pi/4)``."""
    _need(n >= 2, "Itheta needs n >= 2")
    _need(0.0 <= theta < math.pi / 4, f"theta = {theta} outside [0, pi/4)")
    z = variables(n)
    zn = z[-1]
    c, s = math.cos(theta), math.sin(theta)
    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    h = 1 + Const(2j * s2) * zn - zn * zn - Const(c2) * _sumsq(z[:-1])
    r = sqrt(h)
    fn = (Const(c) + Const(1j * s) * zn - Const(c) * r) / Const(c2)
    fn1 = (Const(-1j * s) + Const(c) * zn + Const(1j * s) * r) / Const(c2)
    return HoloMap(DomainSpec.ball(n), DomainSpec.type_iv(n + 1), tuple(z[:-1]) + (fn, fn1),
                   f"Itheta:n={n},theta={theta!r}")


def izero(n: int) -> HoloMap:
    _need(n >= 2, "Izero needs n >= 2")
    z = variables(n)
    g = 1 - sqrt(1 - _sumsq(z))
    return HoloMap(DomainSpec.ball(n), DomainSpec.type_iv(n + 1), tuple(z[:-1]) + (g, z[-1]), f"Izero:n={n}")


def class_b(n: int) -> HoloMap:
    """``(z, 1 - sqrt(1 - sum z^2))``."""
    _need(n >= 1, "ClassB needs n >= 1")
    z = variables(n)
    g = 1 - sqrt(1 - _sumsq(z))
    return HoloMap(DomainSpec.ball(n), DomainSpec.type_iv(n + 1), tuple(z) + (g,), f"ClassB:n={n}")


def lembed(m: int) -> HoloMap:
    """``Z -> (ZZ^t / 2, Z)`` from ``D^IV_m`` into the generalized ball of signature 1."""
    _need(m >= 2, "L needs m >= 2")
    z = variables(m)
    return HoloMap(DomainSpec.type_iv(m), DomainSpec.generalized_ball(m, 1), (HALF * _sumsq(z),) + tuple(z), f"L:m={m}")


def flat(n: int, m: int) -> HoloMap:
    """Polynomial isometry ``(z, (sqrt2/4) sum z^2, (sqrt(-2)/4) sum z^2, 0, ...)``."""
    _need(n >= 1 and m >= n + 2, "flat needs m >= n + 2")
    z = variables(n)
    s = _sumsq(z)
    comps = tuple(z) + (SQRT2_4 * s, SQRT_M2_4 * s) + (Const(0),) * (m - n - 2)
    return HoloMap(DomainSpec.ball(n), DomainSpec.type_iv(m), comps, f"flat:n={n},m={m}")


def with_sqrt_closure(h, source: DomainSpec, name: str | None = None) -> HoloMap:
    """Append ``g = 1 - sqrt(1 - sum h_j^2)`` to a ball map ``h``.

    The result ``(h, g)`` satisfies
    ``sum|h|^2 + |g|^2 - |sum h^2 + g^2|^2 / 4 = sum|h|^2``.
    """
    h = tuple(h)
    g = 1 - sqrt(1 - _sumsq(h))
    return HoloMap(source, DomainSpec.type_iv(len(h) + 1), h + (g,), name)


def whitney_iv(n: int) -> HoloMap:
    """Whitney map ``(z', z_1 z_n, ..., z_n^2)`` closed up by ``g``; lands in ``D^IV_{2n}``."""
    _need(n >= 2, "whitneyIV needs n >= 2")
    z = variables(n)
    h = tuple(z[:-1]) + tuple(zj * z[-1] for zj in z)
    return with_sqrt_closure(h, DomainSpec.ball(n), f"whitneyIV:n={n}")


def gk(k: int) -> HoloMap:
    _need(k >= 1, "Gk needs k >= 1")
    z = Var(0)
    zk = z**k
    return HoloMap(DomainSpec.ball(1), DomainSpec.type_iv(2), (zk, 1 - sqrt(1 - zk * zk)), f"Gk:k={k}")


def psi_degenerate(n: int, m: int, psi: Expr | None = None) -> HoloMap:
    """``((1 + psi)/sqrt 2, (1 - psi)/sqrt(-2), 0, ...)``: lands on the Type IV boundary."""
    _need(n >= 1 and m >= 3, "PsiDegenerate needs n >= 1 and m >= 3")
    psi = Var(0) if psi is None else psi
    comps = ((1 + psi) * INV_SQRT2, (1 - psi) * INV_SQRT_M2) + (Const(0),) * (m - 2)
    return HoloMap(DomainSpec.ball(n), DomainSpec.type_iv(m), comps, f"PsiDegenerate:m={m},n={n}")


def exhp0(n: int) -> HoloMap:
    """Cubic map into ``D^IV_{4n-1}`` whose kernel form is not a sum of squares."""
    _need(n >= 2, "Exhp0 needs n >= 2")
    z = variables(n)
    zn = z[-1]
    comps = [zn]
    for zj in z[:-1]:
        comps += [zj * INV_SQRT2, zj * INV_SQRT_M2]
    half = Const(Exact(Fraction(1, 2)))
    for zj in z:
        cube = zj * zn * zn
        comps += [half * cube * INV_SQRT2, half * cube * INV_SQRT_M2]
    return HoloMap(DomainSpec.ball(n), DomainSpec.type_iv(4 * n - 1), tuple(comps), f"Exhp0:n={n}")


def catalog_build(key) -> HoloMap:
    """Build a catalog map from a :class:`CatalogKey` or its string form."""
    if isinstance(key, str):
        key = CatalogKey.parse(key)
    fam, g = key.family, key.get
    if fam == "RIV":
        return riv(g("n", 2))
    if fam == "Itheta":
        return itheta(g("n", 2), g("theta", 0.0))
    if fam == "Izero":
        return izero(g("n", 2))
    if fam == "L":
        return lembed(g("m", 3))
    if fam == "flat":
        n = g("n", 2)
        return flat(n, g("m", n + 2))
    if fam == "whitneyIV":
        return whitney_iv(g("n", 2))
    if fam == "Gk":
        return gk(g("k", 1))
    if fam == "PsiDegenerate":
        return psi_degenerate(g("n", 2), g("m", 3))
    if fam == "Exhp0":
        return exhp0(g("n", 2))
    if fam == "ClassB":
        return class_b(g("n", 2))
    raise ParameterOutOfRange(f"unknown catalog family {fam!r}")  # pragma: no cover


def catalog_list() -> list:
    return [
        "RIV:n=2", "Itheta:n=2,theta=pi/6", "Izero:n=2", "L:m=3", "flat:n=2,m=4",
        "whitneyIV:n=2", "Gk:k=1", "PsiDegenerate:n=2,m=3", "Exhp0:n=2", "ClassB:n=2",
    ]


def load_map(spec: str) -> HoloMap:
    """A catalog key, or the path of a map JSON file."""
    if spec.endswith(".json"):
        with open(spec) as fh:
            return HoloMap.from_json(json.load(fh))
    return catalog_build(spec)


# --- identities ---------------------------------------------------------------


def kernel_identity_residual(f: HoloMap, z, p: int = 1) -> np.ndarray:
    """``|(1 - |z|^2)^p - (1 - f f^* + |f f^t|^2 / 4)|`` at a point or a batch."""
    if f.source.kind != UNIT_BALL:
        raise DomainMismatch("kernel identity needs a unit-ball source")
    if f.target.kind != TYPE_IV:
        raise DomainMismatch("kernel identity needs a Type IV target")
    z = np.asarray(z, dtype=complex)
    fz = f(z)
    lhs = (1.0 - (np.abs(z) ** 2).sum(-1)) ** p
    rhs = 1.0 - (np.abs(fz) ** 2).sum(-1) + 0.25 * np.abs((fz * fz).sum(-1)) ** 2
    return np.abs(lhs - rhs)


def compose_autos(pre: Automorphism | None, f: HoloMap, post: Automorphism | None) -> HoloMap:
    """``post o f o pre`` as a closed-form expression tree.

    ``None`` stands for the identity on either side.
    """
    comps = f.components
    if pre is not None:
        if pre.domain != f.source:
            raise DomainMismatch(f"pre-automorphism acts on {pre.domain}, map starts on {f.source}")
        args = automorphism_map(pre).components
        comps = tuple(substitute(c, args) for c in comps)
    if post is not None:
        if post.domain != f.target:
            raise DomainMismatch(f"post-automorphism acts on {post.domain}, map lands in {f.target}")
        comps = tuple(substitute(c, comps) for c in automorphism_map(post).components)
    return HoloMap(f.source, f.target, comps, None)
