"""Domains, their defining functions, boundary strata and the Cayley transform.

Coordinates are complex numpy vectors. A generalized ball point is ordered
``(w_1..w_l, z_1..z_n)`` with the ``w`` block carrying the negative sign. The
Heisenberg models use ``(z_1..z_{N-1}, w)`` and, for the signature-one model,
the last ``z`` slot is the negative one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ParameterOutOfRange, Pole

UNIT_BALL = "UnitBall"
GENERALIZED_BALL = "GeneralizedBall"
TYPE_IV = "TypeIV"
HEISENBERG = "Heisenberg"
HEISENBERG_SIG1 = "HeisenbergSig1"

KINDS = (UNIT_BALL, GENERALIZED_BALL, TYPE_IV, HEISENBERG, HEISENBERG_SIG1)

INTERIOR = "Interior"
SMOOTH_BOUNDARY = "SmoothBoundary"
SINGULAR_BOUNDARY = "SingularBoundary"
EXTERIOR = "Exterior"

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    n: int = 0
    l: int = 0
    m: int = 0

    def __post_init__(self):
        k = self.kind
        if k not in KINDS:
            raise ParameterOutOfRange(f"unknown domain kind {k!r}")
        ok = {
            UNIT_BALL: self.n >= 1,
            GENERALIZED_BALL: 0 <= self.l <= self.n and self.n >= 2,
            TYPE_IV: self.m >= 1,
            HEISENBERG: self.n >= 2,
            HEISENBERG_SIG1: self.n >= 3,
        }[k]
        if not ok:
            raise ParameterOutOfRange(f"invalid parameters for {k}: n={self.n}, l={self.l}, m={self.m}")

    @classmethod
    def ball(cls, n: int) -> "DomainSpec":
        return cls(UNIT_BALL, n=n)

    @classmethod
    def generalized_ball(cls, n: int, l: int) -> "DomainSpec":
        return cls(GENERALIZED_BALL, n=n, l=l)

    @classmethod
    def type_iv(cls, m: int) -> "DomainSpec":
        return cls(TYPE_IV, m=m)

    @classmethod
    def heisenberg(cls, n: int) -> "DomainSpec":
        return cls(HEISENBERG, n=n)

    @classmethod
    def heisenberg_sig1(cls, N: int) -> "DomainSpec":
        return cls(HEISENBERG_SIG1, n=N)

    @property
    def dim(self) -> int:
        if self.kind == TYPE_IV:
            return self.m
        if self.kind == GENERALIZED_BALL:
            return self.n + self.l
        return self.n

    def __str__(self):
        if self.kind == TYPE_IV:
            return f"TypeIV({self.m})"
        if self.kind == GENERALIZED_BALL:
            return f"GeneralizedBall({self.n},{self.l})"
        return f"{self.kind}({self.n})"

    def to_json(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == TYPE_IV:
            d["m"] = self.m
        else:
            d["n"] = self.n
        if self.kind == GENERALIZED_BALL:
            d["l"] = self.l
        return d

    @classmethod
    def from_json(cls, d: dict) -> "DomainSpec":
        return cls(d["kind"], n=int(d.get("n", 0)), l=int(d.get("l", 0)), m=int(d.get("m", 0)))


@dataclass(frozen=True)
class BoundaryClass:
    tag: str
    values: tuple


def _points(d: DomainSpec, p) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    if p.shape[-1:] != (d.dim,):
        raise DimensionMismatch(f"{d} expects {d.dim} coordinates, got shape {p.shape}")
    return p


def _sq(p):
    return np.abs(p) ** 2


def defining_values(d: DomainSpec, p) -> np.ndarray:
    """Defining values of ``d`` at ``p``; positive means inside.

    ``p`` may be a single point or a batch with coordinates on the last axis;
    the values sit on the last axis of the result (two for Type IV, one
    otherwise).
    """
    p = _points(d, p)
    if d.kind == UNIT_BALL:
        vals = [1.0 - _sq(p).sum(-1)]
    elif d.kind == GENERALIZED_BALL:
        vals = [1.0 + _sq(p[..., : d.l]).sum(-1) - _sq(p[..., d.l :]).sum(-1)]
    elif d.kind == TYPE_IV:
        nrm = _sq(p).sum(-1)
        q = (p * p).sum(-1)
        vals = [1.0 - nrm + 0.25 * np.abs(q) ** 2, 2.0 - nrm]
    elif d.kind == HEISENBERG:
        vals = [p[..., -1].imag - _sq(p[..., :-1]).sum(-1)]
    else:
        z = p[..., :-1]
        vals = [p[..., -1].imag - _sq(z[..., :-1]).sum(-1) + _sq(z[..., -1])]
    return np.stack(vals, axis=-1)


def classify_point(d: DomainSpec, p, tol: float = BOUNDARY_TOL) -> BoundaryClass:
    vals = defining_values(d, p)
    if vals.ndim != 1:
        raise DimensionMismatch("classify_point takes a single point")
    r = float(vals[0])
    if d.kind == TYPE_IV:
        s = float(vals[1])
        if r > tol and s > tol:
            tag = INTERIOR
        elif abs(r) <= tol and abs(s) <= tol:
            tag = SINGULAR_BOUNDARY
        elif abs(r) <= tol and s > tol:
            tag = SMOOTH_BOUNDARY
        else:
            tag = EXTERIOR
    else:
        tag = INTERIOR if r > tol else SMOOTH_BOUNDARY if abs(r) <= tol else EXTERIOR
    return BoundaryClass(tag, tuple(float(v) for v in vals))


def is_interior(d: DomainSpec, p, tol: float = 0.0) -> np.ndarray:
    """Boolean (batch) membership test: all defining values above ``tol``."""
    return np.all(defining_values(d, p) > tol, axis=-1)


# --- sampling -------------------------------------------------------------


def sample_polydisc(rng: np.random.Generator, count: int, dim: int, radius: float) -> np.ndarray:
    """Uniform samples of the polydisc ``|z_j| < radius``."""
    r = radius * np.sqrt(rng.random((count, dim)))
    t = rng.uniform(-np.pi, np.pi, (count, dim))
    return r * np.exp(1j * t)


def sample_interior(d: DomainSpec, count: int, rng: np.random.Generator, radius: float = 0.9,
                    max_rounds: int = 1000) -> np.ndarray:
    """Polydisc samples of radius ``radius`` rejected into the domain."""
    out, have = [], 0
    for _ in range(max_rounds):
        if have >= count:
            break
        cand = sample_polydisc(rng, 2 * (count - have) + 8, d.dim, radius)
        cand = cand[is_interior(d, cand, 1e-6)]
        out.append(cand)
        have += len(cand)
    pts = np.concatenate(out)[:count] if out else np.zeros((0, d.dim), complex)
    if len(pts) < count:
        raise ParameterOutOfRange(f"radius {radius} leaves too little of {d} to sample")
    return pts


def sample_sphere(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Uniform samples of the unit sphere in C^dim."""
    g = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_type_iv_boundary(rng: np.random.Generator, count: int, m: int, qmax: float = 0.95) -> np.ndarray:
    """Samples of the smooth part of the Type IV boundary.

    A unit vector ``Z`` with ``|Z Z^t| < 1`` is scaled by ``t`` where
    ``t^2 = 2 / (1 + sqrt(1 - |Z Z^t|^2))``, the smaller root of the first
    defining function along the ray. ``qmax`` keeps away from the singular set.
    """
    out, have = [], 0
    while have < count:
        z = sample_sphere(rng, 2 * (count - have) + 8, m)
        q = np.abs((z * z).sum(1))
        z, q = z[q < qmax], q[q < qmax]
        t = np.sqrt(2.0 / (1.0 + np.sqrt(1.0 - q**2)))
        out.append(z * t[:, None])
        have += len(z)
    return np.concatenate(out)[:count]


# --- Cayley transform -----------------------------------------------------


def _split_zw(N: int, p):
    p = np.asarray(p, dtype=complex)
    if p.shape[-1] != N:
        raise DimensionMismatch(f"expected {N} coordinates, got {p.shape[-1]}")
    return p[..., :-1], p[..., -1]


def cayley(N: int, p, tol: float = 1e-12) -> np.ndarray:
    """Cayley transform ``(z, w) -> (2z / (1 - iw), (1 + iw) / (1 - iw))``.

    Sends ``{v = |z|^2_1}`` into the boundary of the signature-one ball and
    ``{v > |z|^2_1}`` into the ball itself; see :func:`cayley_ball_value`.
    The same formula maps the Heisenberg hypersurface to the unit sphere when
    no coordinate is negative.
    """
    z, w = _split_zw(N, p)
    den = 1.0 - 1j * w
    if np.any(np.abs(den) <= tol):
        raise Pole("1 - iw vanishes")
    return np.concatenate([2.0 * z / den[..., None], ((1.0 + 1j * w) / den)[..., None]], axis=-1)


def cayley_inverse(N: int, q, tol: float = 1e-12) -> np.ndarray:
    z, zn = _split_zw(N, q)
    den = 1.0 + zn
    if np.any(np.abs(den) <= tol):
        raise Pole("1 + Z_N vanishes")
    w = -1j * (zn - 1.0) / den
    return np.concatenate([z / den[..., None], w[..., None]], axis=-1)


def cayley_ball_value(q, negatives: int = 1) -> np.ndarray:
    """``1 - |Z|^2_1 - |Z_N|^2`` on Cayley coordinates ``Z = (Z_1..Z_{N-1}, Z_N)``.

    The ``negatives`` slots right before ``Z_N`` carry the minus sign. With one
    negative slot this is the generalized-ball defining value after moving
    that slot to the front.
    """
    q = np.asarray(q, dtype=complex)
    a = _sq(q)
    k = q.shape[-1] - 1
    pos = a[..., : k - negatives].sum(-1) + a[..., -1]
    neg = a[..., k - negatives : k].sum(-1)
    return 1.0 - pos + neg


def point_to_json(p) -> dict:
    p = np.asarray(p, dtype=complex).ravel()
    return {"re": [float(x) for x in p.real], "im": [float(x) for x in p.imag]}


def point_from_json(d) -> np.ndarray:
    if isinstance(d, list):
        return np.asarray(d, dtype=complex)
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d.get("im", [0.0] * len(re)), dtype=float)
    if re.shape != im.shape:
        raise DimensionMismatch("re and im lengths differ")
    return re + 1j * im
