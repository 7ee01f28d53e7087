"""Automorphism groups acting projectively by row vectors ``x -> x A``.

Ball and generalized-ball points are lifted to ``[1, z]`` (``[1, w, z]``),
Type IV points to the Borel lift
``[Z, (1 + ZZ^t/2)/sqrt 2, (1 - ZZ^t/2)/(i sqrt 2)]`` on the quadric
``z_1^2 + ... + z_m^2 = z_{m+1}^2 + z_{m+2}^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import GENERALIZED_BALL, TYPE_IV, UNIT_BALL, DomainSpec, is_interior
from .errors import DimensionMismatch, DomainMismatch, InvalidElement, NotInterior, Pole
from .expr import Const, Expr, HoloMap, Var, total
from .linalg import GroupTag, check_group_membership, matrix_from_json, matrix_to_json

MEMBERSHIP_TOL = 1e-10
POLE_TOL = 1e-12

SQRT2 = np.sqrt(2.0)
# sqrt(-2) and sqrt(-1/2) on the principal branch
SQRT_M2 = 1j * SQRT2
SQRT_MHALF = 1j / SQRT2

_GROUP_NAMES = {UNIT_BALL: "BallAut", GENERALIZED_BALL: "GeneralizedBallAut", TYPE_IV: "TypeIVAut"}


def group_tag(d: DomainSpec) -> GroupTag:
    if d.kind == UNIT_BALL:
        return GroupTag.ball(d.n)
    if d.kind == GENERALIZED_BALL:
        return GroupTag.generalized_ball(d.n, d.l)
    if d.kind == TYPE_IV:
        return GroupTag.type_iv(d.m)
    raise DomainMismatch(f"no automorphism group implemented for {d}")


@dataclass(frozen=True, eq=False)
class Automorphism:
    """A validated group element together with the domain it acts on."""

    domain: DomainSpec
    matrix: np.ndarray
    defect: float = 0.0

    def __post_init__(self):
        tag = group_tag(self.domain)
        m = np.asarray(self.matrix, dtype=complex)
        if tag.kind == "orthogonal":
            if np.max(np.abs(m.imag), initial=0.0) > MEMBERSHIP_TOL:
                raise InvalidElement("Type IV automorphisms need real matrices")
            m = m.real.astype(float)
        try:
            ok, defect = check_group_membership(m, tag, MEMBERSHIP_TOL)
        except DimensionMismatch as exc:
            raise InvalidElement(str(exc)) from exc
        if not ok:
            raise InvalidElement(f"not in the automorphism group of {self.domain} (defect {defect:.3e})")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "defect", defect)

    @property
    def group(self) -> str:
        return _GROUP_NAMES[self.domain.kind]

    def __call__(self, p) -> np.ndarray:
        return apply(self, p)

    def to_json(self) -> dict:
        d = {"group": self.group, "domain": self.domain.to_json(), "matrix": matrix_to_json(self.matrix)}
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Automorphism":
        return cls(DomainSpec.from_json(d["domain"]), matrix_from_json(d["matrix"]))


@dataclass(frozen=True)
class HomogeneousLift:
    point: np.ndarray
    lift: np.ndarray
    residual: float


def lift(z) -> HomogeneousLift:
    z = np.asarray(z, dtype=complex)
    if z.ndim != 1:
        raise DimensionMismatch("lift takes a single point")
    x = lift_batch(z[None, :])[0]
    m = len(z)
    res = abs(np.sum(x[:m] ** 2) - x[m] ** 2 - x[m + 1] ** 2)
    return HomogeneousLift(z, x, float(res))


def lift_batch(z) -> np.ndarray:
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    q = (z * z).sum(1)
    a = (1.0 + 0.5 * q) / SQRT2
    b = (1.0 - 0.5 * q) / SQRT_M2
    return np.column_stack([z, a, b])


def _homogeneous(d: DomainSpec, p: np.ndarray) -> np.ndarray:
    if d.kind == TYPE_IV:
        return lift_batch(p)
    return np.column_stack([np.ones(len(p), complex), p])


def _dehomogenize(d: DomainSpec, y: np.ndarray) -> np.ndarray:
    if d.kind == TYPE_IV:
        m = d.m
        den = y[:, m] / SQRT2 + y[:, m + 1] * SQRT_MHALF
        head = y[:, :m]
    else:
        den = y[:, 0]
        head = y[:, 1:]
    if np.any(np.abs(den) <= POLE_TOL):
        raise Pole("projective denominator vanishes")
    return head / den[:, None]


def apply(a: Automorphism, p) -> np.ndarray:
    """Image of a point (or a batch of points) under ``a``."""
    p = np.asarray(p, dtype=complex)
    if p.shape[-1:] != (a.domain.dim,):
        raise DimensionMismatch(f"{a.domain} expects {a.domain.dim} coordinates")
    flat = p.reshape(-1, a.domain.dim)
    out = _dehomogenize(a.domain, _homogeneous(a.domain, flat) @ a.matrix)
    return out.reshape(p.shape)


def identity(d: DomainSpec) -> Automorphism:
    return Automorphism(d, np.eye(group_tag(d).size))


def inverse(a: Automorphism) -> Automorphism:
    e = group_tag(a.domain).e
    if a.domain.kind == TYPE_IV:
        return Automorphism(a.domain, e @ a.matrix.T @ e)
    return Automorphism(a.domain, e @ a.matrix.conj().T @ e)


def compose(a: Automorphism, b: Automorphism) -> Automorphism:
    """``a`` after ``b``; with row vectors the matrix is ``B @ A``."""
    if a.domain != b.domain:
        raise DomainMismatch(f"cannot compose automorphisms of {a.domain} and {b.domain}")
    return Automorphism(a.domain, b.matrix @ a.matrix)


# --- ball ----------------------------------------------------------------


def ball_aut_to_origin(p0) -> Automorphism:
    """Möbius element of U(n, 1) sending ``p0`` to the origin."""
    p = np.asarray(p0, dtype=complex)
    n = len(p)
    r2 = float(np.vdot(p, p).real)
    if r2 >= 1.0:
        raise NotInterior(f"|p0|^2 = {r2} is not below 1")
    if r2 == 0.0:
        return identity(DomainSpec.ball(n))
    g = 1.0 / np.sqrt(1.0 - r2)
    a = np.empty((n + 1, n + 1), complex)
    a[0, 0] = g
    a[0, 1:] = -g * p
    a[1:, 0] = -g * p.conj()
    a[1:, 1:] = np.eye(n) + (g - 1.0) * np.outer(p.conj(), p) / r2
    return Automorphism(DomainSpec.ball(n), a)


def ball_rotation(u) -> Automorphism:
    """``z -> z U`` for unitary ``U``."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    a = np.eye(n + 1, dtype=complex)
    a[1:, 1:] = u
    return Automorphism(DomainSpec.ball(n), a)


def generalized_ball_aut(n: int, l: int, a) -> Automorphism:
    return Automorphism(DomainSpec.generalized_ball(n, l), a)


# --- Type IV -------------------------------------------------------------


def rotation2(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def typeIV_isotropy(a, d) -> Automorphism:
    """``diag(A, D)`` for ``A`` in O(m) and ``D`` in SO(2); acts as ``Z -> e^{i phi} Z A``."""
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    m = a.shape[0]
    if a.shape != (m, m) or d.shape != (2, 2):
        raise InvalidElement("isotropy data must be m x m and 2 x 2")
    if np.max(np.abs(a @ a.T - np.eye(m))) > MEMBERSHIP_TOL:
        raise InvalidElement("A is not orthogonal")
    if np.max(np.abs(d @ d.T - np.eye(2))) > MEMBERSHIP_TOL or np.linalg.det(d) <= 0:
        raise InvalidElement("D is not a rotation")
    t = np.zeros((m + 2, m + 2))
    t[:m, :m] = a
    t[m:, m:] = d
    return Automorphism(DomainSpec.type_iv(m), t)


def typeIV_boost(m: int, t: float, j: int = 0, k: int = 0) -> Automorphism:
    """Hyperbolic rotation mixing positive coordinate ``j`` with negative coordinate ``m + k``."""
    out = np.eye(m + 2)
    c, s = np.cosh(t), np.sinh(t)
    out[j, j] = out[m + k, m + k] = c
    out[j, m + k] = out[m + k, j] = s
    return Automorphism(DomainSpec.type_iv(m), out)


def _eform(a, b, e):
    return float(a @ e @ b)


def typeIV_aut_to_origin(p0) -> Automorphism:
    """An element of O(m, 2) sending the interior point ``p0`` to the origin.

    The lift ``x = X + iY`` spans a negative definite real plane. An
    E-orthonormal basis ``(p1, p2)`` of it, with ``x`` proportional to
    ``p1 + i p2``, is completed by a positive E-orthonormal basis ``q`` of its
    complement. ``M`` with rows ``(q, p1, -p2)`` lies in O(m, 2) and its inverse
    sends ``x`` to a multiple of the origin's lift.
    """
    p = np.asarray(p0, dtype=complex)
    m = len(p)
    d = DomainSpec.type_iv(m)
    if not is_interior(d, p):
        raise NotInterior("point is not inside the Type IV domain")
    x = lift(p).lift
    e = group_tag(d).e
    big_x, big_y = x.real, x.imag
    nx = -_eform(big_x, big_x, e)
    p1 = big_x / np.sqrt(nx)
    y = big_y - (-_eform(big_y, p1, e)) * p1  # remove the p1 part (<p1,p1> = -1)
    p2 = y / np.sqrt(-_eform(y, y, e))
    basis = []
    for i in range(m + 2):
        v = np.zeros(m + 2)
        v[i] = 1.0
        for _ in range(2):
            v = v + _eform(v, p1, e) * p1 + _eform(v, p2, e) * p2
            for q in basis:
                v = v - _eform(v, q, e) * q
        nrm = _eform(v, v, e)
        if nrm > 1e-8:
            basis.append(v / np.sqrt(nrm))
        if len(basis) == m:
            break
    mm = np.vstack(basis + [p1, -p2])
    t = e @ mm.T @ e
    if np.linalg.det(t[m:, m:]) <= 0:  # pragma: no cover - excluded by connectedness
        raise InvalidElement("constructed element reverses the negative plane")
    return Automorphism(d, t)


# --- random elements ------------------------------------------------------


def random_orthogonal(m: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_automorphism(d: DomainSpec, rng: np.random.Generator, scale: float = 0.6) -> Automorphism:
    """Seeded random element: isotropy, moderate boost, isotropy."""
    if d.kind == UNIT_BALL:
        p = rng.standard_normal(d.n) + 1j * rng.standard_normal(d.n)
        p *= scale * rng.random() / np.linalg.norm(p)
        return compose(ball_aut_to_origin(p), ball_rotation(random_unitary(d.n, rng)))
    if d.kind == GENERALIZED_BALL:
        n, l = d.n, d.l
        a = np.zeros((n + l + 1, n + l + 1), complex)
        a[: l + 1, : l + 1] = random_unitary(l + 1, rng)
        a[l + 1 :, l + 1 :] = random_unitary(n, rng)
        t = scale * rng.standard_normal()
        b = np.eye(n + l + 1, dtype=complex)
        b[0, 0] = b[l + 1, l + 1] = np.cosh(t)
        b[0, l + 1] = b[l + 1, 0] = np.sinh(t)
        return Automorphism(d, a @ b @ a.conj().T)
    if d.kind == TYPE_IV:
        m = d.m
        k1 = typeIV_isotropy(random_orthogonal(m, rng) if m > 1 else np.eye(1), rotation2(rng.uniform(-np.pi, np.pi)))
        k2 = typeIV_isotropy(random_orthogonal(m, rng) if m > 1 else np.eye(1), rotation2(rng.uniform(-np.pi, np.pi)))
        boost = typeIV_boost(m, scale * rng.standard_normal())
        return compose(k1, compose(boost, k2))
    raise DomainMismatch(f"no automorphism group implemented for {d}")


# --- expression form -------------------------------------------------------


def _linear(coeffs, xs) -> Expr:
    terms = []
    for c, x in zip(coeffs, xs):
        c = complex(c)
        if c == 0:
            continue
        terms.append(x if c == 1 else Const(c) * x)
    return total(terms)


def automorphism_map(a: Automorphism) -> HoloMap:
    """The automorphism as a rational :class:`HoloMap` of its domain."""
    d = a.domain
    z = [Var(j) for j in range(d.dim)]
    mat = a.matrix
    if d.kind == TYPE_IV:
        m = d.m
        q = total([zj * zj for zj in z])
        hx = z + [(1 + Const(0.5) * q) * Const(1 / SQRT2), (1 - Const(0.5) * q) * Const(1 / SQRT_M2)]
        cols = [_linear(mat[:, j], hx) for j in range(m + 2)]
        den = cols[m] * Const(1 / SQRT2) + cols[m + 1] * Const(SQRT_MHALF)
        comps = [cols[j] / den for j in range(m)]
    else:
        hx = [Const(1.0)] + z
        cols = [_linear(mat[:, j], hx) for j in range(mat.shape[0])]
        comps = [cols[j] / cols[0] for j in range(1, mat.shape[0])]
    return HoloMap(d, d, tuple(comps), name=f"{a.group}")
