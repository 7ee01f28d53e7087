"""Bergman and indefinite Kähler metrics, pullbacks and isometry verdicts.

Every metric has the form ``g = e * (-rho_{jk}/rho + rho_j rho_k / rho^2)``,
i.e. ``-e d dbar log rho``, with

=================  ==========================================  ============
domain             rho                                         exponent e
=================  ==========================================  ============
unit ball B^n      ``1 - |z|^2``                               ``n + 1``
Type IV D^IV_m     ``1 - ZZ^* + |ZZ^t|^2 / 4``                 ``m``
generalized ball   ``1 + sum|w|^2 - sum|z|^2``                 ``1``
=================  ==========================================  ============

Subscripts are Wirtinger derivatives (``j`` holomorphic, ``k`` antiholomorphic).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .domains import (GENERALIZED_BALL, TYPE_IV, UNIT_BALL, DomainSpec, defining_values, is_interior, sample_interior,
                      sample_sphere)
from .errors import DomainMismatch, NotInterior, TargetNotInterior
from .expr import HoloMap

NORMALIZATION = "omega = i ddbar log K; exponents UnitBall n+1, TypeIV m, GeneralizedBall 1"


def metric_exponent(d: DomainSpec) -> int:
    if d.kind == UNIT_BALL:
        return d.n + 1
    if d.kind == TYPE_IV:
        return d.m
    if d.kind == GENERALIZED_BALL:
        return 1
    raise DomainMismatch(f"no metric on {d}")


def log_potential(d: DomainSpec, z) -> np.ndarray:
    """``-e log rho``; its complex Hessian is the metric."""
    z = np.asarray(z, dtype=complex)
    return -metric_exponent(d) * np.log(defining_values(d, z)[..., 0])


def _metric_batch(d: DomainSpec, z: np.ndarray) -> np.ndarray:
    e = metric_exponent(d)
    n = z.shape[1]
    eye = np.eye(n)
    zc = z.conj()
    if d.kind == UNIT_BALL:
        rho = 1.0 - (np.abs(z) ** 2).sum(1)
        rj, rk = -zc, -z
        rjk = -np.broadcast_to(eye, (len(z), n, n))
    elif d.kind == GENERALIZED_BALL:
        s = np.concatenate([np.ones(d.l), -np.ones(d.n)])
        rho = 1.0 + (s * np.abs(z) ** 2).sum(1)
        rj, rk = s * zc, s * z
        rjk = np.broadcast_to(np.diag(s), (len(z), n, n))
    else:
        q = (z * z).sum(1)
        rho = 1.0 - (np.abs(z) ** 2).sum(1) + 0.25 * np.abs(q) ** 2
        rj = -zc + 0.5 * z * q.conj()[:, None]
        rk = -z + 0.5 * zc * q[:, None]
        rjk = -eye + z[:, :, None] * zc[:, None, :]
    outer = rj[:, :, None] * rk[:, None, :]
    return e * (-rjk / rho[:, None, None] + outer / (rho**2)[:, None, None])


@dataclass(frozen=True, eq=False)
class MetricMatrix:
    point: np.ndarray
    entries: np.ndarray


def metric_batch(d: DomainSpec, z) -> np.ndarray:
    """Metric matrices ``(b, n, n)`` at interior points ``(b, n)``."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    metric_exponent(d)
    if not np.all(is_interior(d, z)):
        raise NotInterior(f"metric requested outside {d}")
    return _metric_batch(d, z)


def metric_matrix(d: DomainSpec, z) -> MetricMatrix:
    z = np.asarray(z, dtype=complex)
    return MetricMatrix(z, metric_batch(d, z[None, :])[0])


def pullback_batch(f: HoloMap, z, strict: bool = True):
    """``J^t g(f(z)) conj(J)`` over a batch; non-strict mode returns ``(values, ok)``."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    metric_exponent(f.target)
    vals, ok_v = f.eval_batch(z, strict=False)
    jac, ok_j = f.jacobian_batch(z, strict=False)
    ok = ok_v & ok_j
    inside = is_interior(f.target, np.where(ok[:, None], vals, 0.0))
    if strict:
        if not ok.all():
            f.jacobian_batch(z[~ok])  # re-raise the evaluation error
        if not inside.all():
            raise TargetNotInterior(f"image point outside {f.target}")
    ok = ok & inside
    safe = np.where(ok[:, None], vals, 0.0)
    g = _metric_batch(f.target, safe)
    out = np.einsum("baj,bac,bck->bjk", jac, g, jac.conj())
    return out if strict else (out, ok)


def pullback_metric(f: HoloMap, z) -> MetricMatrix:
    z = np.asarray(z, dtype=complex)
    return MetricMatrix(z, pullback_batch(f, z[None, :])[0])


@dataclass(frozen=True)
class IsometryVerdict:
    """Outcome of :func:`isometry_check`.

    ``max_residual`` is ``max |f^*g - lambda g_src| / max(1, max |lambda g_src|)``
    over the samples, so points close to the boundary, where both metrics
    blow up, are judged at relative precision.
    """

    lam: float
    samples: int
    max_residual: float
    passed: bool
    seed: int
    skipped: int = 0
    tol: float = 1e-9
    residuals: np.ndarray = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "samples": self.samples,
            "seed": self.seed,
            "max_residual": self.max_residual,
            "pass": self.passed,
            "skipped": self.skipped,
            "tol": self.tol,
            "normalization": NORMALIZATION,
        }


def isometry_residuals(f: HoloMap, lam: float, z) -> tuple:
    """Per-sample residuals at the points ``z`` and the mask of usable samples."""
    pb, ok = pullback_batch(f, z, strict=False)
    ref = lam * _metric_batch(f.source, np.asarray(z, dtype=complex))
    scale = np.maximum(1.0, np.abs(ref).max(axis=(1, 2)))
    return np.abs(pb - ref).max(axis=(1, 2)) / scale, ok


def isometry_check(f: HoloMap, lam: float, samples: int = 200, seed: int = 0, tol: float = 1e-9,
                   radius: float = 0.9) -> IsometryVerdict:
    """Compare ``f^* g_target`` with ``lam * g_source`` at seeded interior samples.

    Samples where evaluation fails or the image leaves the target are skipped
    and redrawn, up to ten times the requested count in total.
    """
    if f.source.kind not in (UNIT_BALL, GENERALIZED_BALL, TYPE_IV):
        raise DomainMismatch(f"isometry check needs a ball or Type IV source, got {f.source}")
    metric_exponent(f.target)
    rng = np.random.default_rng(seed)
    res, skipped, drawn = [], 0, 0
    while len(res) < samples and drawn < 10 * samples:
        batch = min(samples - len(res), 10 * samples - drawn)
        z = sample_interior(f.source, batch, rng, radius)
        drawn += batch
        r, ok = isometry_residuals(f, lam, z)
        res.extend(r[ok].tolist())
        skipped += int((~ok).sum())
    res = np.asarray(res[:samples])
    worst = float(res.max()) if res.size else float("inf")
    return IsometryVerdict(float(lam), int(res.size), worst, bool(res.size and worst <= tol), seed, skipped, tol, res)


@dataclass(frozen=True)
class BoundaryVerdict:
    """Outcome of :func:`boundary_check`: ``max |rho_target(f(p))|`` over sphere samples."""

    samples: int
    max_residual: float
    passed: bool
    seed: int
    tol: float = 1e-9

    def to_json(self) -> dict:
        return {"samples": self.samples, "seed": self.seed, "max_residual": self.max_residual,
                "pass": self.passed, "tol": self.tol}


def boundary_check(f: HoloMap, samples: int = 200, seed: int = 0, tol: float = 1e-9) -> BoundaryVerdict:
    """Check that ``f`` sends seeded points of the unit sphere to the target boundary."""
    if f.source.kind != UNIT_BALL:
        raise DomainMismatch(f"boundary check needs a unit-ball source, got {f.source}")
    metric_exponent(f.target)
    p = sample_sphere(np.random.default_rng(seed), samples, f.source.n)
    vals = defining_values(f.target, f.eval_batch(p))[..., 0]
    worst = float(np.abs(vals).max())
    return BoundaryVerdict(samples, worst, worst <= tol, seed, tol)


def expected_lambda(n: int, m: int) -> set:
    """Possible isometric constants for ball-to-Type-IV isometries."""
    if n < 1 or m < 1:
        raise ValueError("dimensions must be positive")
    if n == 1:
        return {Fraction(m, 2), Fraction(m)}
    return {Fraction(m, n + 1)}


def isometry_dimension_feasible(n: int, m: int) -> bool:
    """Whether a ball of dimension ``n`` can sit isometrically in ``D^IV_m``."""
    return n <= m - 1
