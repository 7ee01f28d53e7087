"""Classification of isometries from the ball B^n into D^IV_{n+1}.

An isometry ``F`` with ``F(0) = 0`` satisfies ``(z, s) = F U`` with
``s = sum f_j^2 / 2`` for an (n+1) x (n+1) unitary ``U``. The normalization
group acts on it as ``U -> conj(c) O^t U diag(V, c^2)``, which at the map level
is ``F(z) -> c F(z V^{-1}) O`` with ``V`` in U(n), ``O`` in O(n+1) and
``|c| = 1``. The pipeline drives ``U`` to the canonical matrix

    [[I, 0, 0], [0, i sin t, cos t], [0, cos t, i sin t]]

and reads off ``t`` in ``[0, pi/2]``. ``t = pi/4`` is the rational class; any
other value is the irrational class with ``beta = t`` or ``pi/2 - t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import TYPE_IV, UNIT_BALL, DomainSpec, sample_interior
from .errors import (DomainMismatch, NotIsometry, NotNormalized, NotUnitary, ParameterOutOfRange,
                     RecoveryFailed, StructureViolation)
from .expr import Const, HoloMap, sqrt, total, variables
from .groups import (Automorphism, ball_rotation, compose, rotation2, typeIV_aut_to_origin,
                     typeIV_isotropy)
from .linalg import GroupTag, check_group_membership, extend_orthonormal_real, matrix_to_json, takagi
from .maps import HALF, compose_autos, kernel_identity_residual

RATIONAL = "rational"
IRRATIONAL = "irrational"
RATIONAL_MARGIN = 1e-7


def canonical_unitary(n: int, theta: float) -> np.ndarray:
    u = np.eye(n + 1, dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    u[n - 1 :, n - 1 :] = [[1j * s, c], [c, 1j * s]]
    return u


def functional_residual(f: HoloMap, u, z) -> float:
    """``max |F(z) U - (z, sum f^2 / 2)|`` over the points ``z``."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    fz = f.eval_batch(z)
    phi = np.column_stack([z, 0.5 * (fz * fz).sum(1)])
    return float(np.abs(fz @ u - phi).max())


def _probe_points(n: int, count: int, seed: int) -> np.ndarray:
    return sample_interior(DomainSpec.ball(n), count, np.random.default_rng(seed), radius=0.6 / math.sqrt(n) + 0.2)


def extract_unitary(f: HoloMap, tol: float = 1e-8, seed: int = 0) -> np.ndarray:
    """Recover ``U`` with ``(z, sum f^2 / 2) = F U`` from values at probe points.

    Raises:
        NotNormalized: ``F(0) != 0``.
        NotIsometry: wrong target dimension, or the kernel identity fails at the probes.
        RecoveryFailed: the least squares solution is not unitary or leaves a residual.
    """
    if f.source.kind != UNIT_BALL:
        raise DomainMismatch(f"classification needs a unit-ball source, got {f.source}")
    n = f.source.n
    if f.target.kind != TYPE_IV or f.target.m != n + 1:
        raise NotIsometry(f"target {f.target} is not D^IV_{n + 1}")
    f0 = f(np.zeros(n))
    if np.abs(f0).max() > tol:
        raise NotNormalized(f"F(0) = {f0} is not the origin")
    z = _probe_points(n, 4 * (n + 1) + 8, seed)
    kres = float(kernel_identity_residual(f, z, 1).max())
    if kres > tol:
        raise NotIsometry(f"kernel identity residual {kres:.3e} exceeds {tol:.1e}")
    fz = f.eval_batch(z)
    phi = np.column_stack([z, 0.5 * (fz * fz).sum(1)])
    u, *_ = np.linalg.lstsq(fz, phi, rcond=None)
    res = float(np.abs(fz @ u - phi).max())
    udef = float(np.abs(u.conj().T @ u - np.eye(n + 1)).max())
    if res > tol or udef > math.sqrt(tol):
        raise RecoveryFailed(f"recovered matrix has residual {res:.3e} and unitarity defect {udef:.3e}")
    return u


@dataclass(frozen=True)
class NormalizationStep:
    """One logged normalization: a source unitary, a target orthogonal matrix or a phase."""

    kind: str  # "source" | "target" | "phase"
    label: str
    matrix: np.ndarray = field(default=None, compare=False)
    phase: float = 0.0

    def to_json(self) -> dict:
        d = {"kind": self.kind, "label": self.label}
        if self.matrix is not None:
            d["matrix"] = matrix_to_json(self.matrix)
        if self.kind == "phase":
            d["phase"] = self.phase
        return d


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """Result of :func:`normalize_unitary`.

    ``source_unitary`` ``V``, ``target_orthogonal`` ``O`` and ``phase`` ``phi``
    compose all logged steps: ``canonical_unitary(n, theta_raw)`` equals
    ``exp(-i phi) O^t U diag(V, exp(2 i phi))`` up to ``residual``.
    """

    n: int
    case: str
    theta_raw: float
    beta: float | None
    transforms: tuple
    source_unitary: np.ndarray
    target_orthogonal: np.ndarray
    phase: float
    residual: float
    margin: float
    lambdas: np.ndarray

    def pre_automorphism(self) -> Automorphism:
        """``z -> z V^{-1}`` on the ball."""
        return ball_rotation(self.source_unitary.conj().T)

    def post_automorphism(self) -> Automorphism:
        """``Z -> exp(i phi) Z O`` on D^IV_{n+1}."""
        return typeIV_isotropy(self.target_orthogonal, rotation2(self.phase))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "case": self.case,
            "beta": self.beta,
            "theta_raw": self.theta_raw,
            "margin": self.margin,
            "residual": self.residual,
            "takagi_values": [float(x) for x in self.lambdas],
            "phase": self.phase,
            "source_unitary": matrix_to_json(self.source_unitary),
            "target_orthogonal": matrix_to_json(self.target_orthogonal),
            "transforms": [t.to_json() for t in self.transforms],
        }


def _act(u, v, o, c):
    n = v.shape[0]
    d = np.eye(n + 1, dtype=complex)
    d[:n, :n] = v
    d[n, n] = c * c
    return np.conj(c) * o.T @ u @ d


def _embed(block, size, at):
    out = np.eye(size, dtype=block.dtype)
    k = block.shape[0]
    out[at : at + k, at : at + k] = block
    return out


def normalize_unitary(u, tol: float = 1e-8) -> CanonicalForm:
    """Run the normalization pipeline on the matrix of an isometry.

    Raises:
        NotUnitary: ``u`` is not unitary within ``tol``.
        StructureViolation: the Takagi values or the block structure are not
            those of an isometry's matrix.
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] < 3:
        raise NotUnitary(f"expected a square matrix of size at least 3, got shape {u.shape}")
    size = u.shape[0]
    n = size - 1
    udef = float(np.abs(u.conj().T @ u - np.eye(size)).max())
    if udef > tol:
        raise NotUnitary(f"unitarity defect {udef:.3e}")
    steps = []
    v = np.eye(n, dtype=complex)
    o = np.eye(size)
    c = 1.0 + 0j

    # 1. Takagi factorization of U0^t U0 and the matching source change
    u0 = u[:, :n]
    tk = takagi(u0.T @ u0)
    v = v @ tk.v
    steps.append(NormalizationStep("source", "Takagi diagonalization of U0^t U0", tk.v))
    lam = tk.lambdas
    if np.abs(lam[: n - 1] - 1.0).max(initial=0.0) > tol:
        raise StructureViolation(f"Takagi values {lam} are not (1, ..., 1, lambda_n)")

    # 2. rotate the first n-1 columns real
    cur = _act(u, v, o, c)
    gam = np.array([0.5 * np.angle(cur[:, j] @ cur[:, j]) for j in range(n - 1)] + [0.0])
    p = np.diag(np.exp(-1j * gam))
    v = v @ p
    steps.append(NormalizationStep("source", "phases making the first n-1 columns real", p))
    cur = _act(u, v, o, c)
    a = cur.real[:, : n - 1]
    b = cur.imag[:, :n]
    ab = max(float(np.abs(cur.real[:, :n].T @ b).max()), float(np.abs(b[:, : n - 1]).max(initial=0.0)))
    if ab > math.sqrt(tol):
        raise StructureViolation(f"real and imaginary parts are not orthogonal (defect {ab:.3e})")

    # 3. real basis extension, target rotation by C^t
    cmat = extend_orthonormal_real(list(a.T), dim=size, tol=math.sqrt(tol))
    o = o @ cmat
    steps.append(NormalizationStep("target", "orthonormal extension C; F -> F C", cmat))
    cur = _act(u, v, o, c)
    block = max(float(np.abs(cur[: n - 1, : n - 1] - np.eye(n - 1)).max(initial=0.0)),
                float(np.abs(cur[n - 1 :, : n - 1]).max(initial=0.0)),
                float(np.abs(cur[: n - 1, n - 1 :]).max(initial=0.0)))
    if block > math.sqrt(tol):
        raise StructureViolation(f"block structure defect {block:.3e} after the basis extension")

    # 4. phase alpha making Re eta orthogonal to Im eta
    eta = cur[n - 1 :, n]
    zeta = eta @ eta
    alpha = 0.0
    if abs(zeta) > 1e-12:
        a0 = 0.5 * np.angle(zeta)
        alpha = next(a0 + k * np.pi / 2 for k in range(-2, 3) if -np.pi / 4 < a0 + k * np.pi / 2 <= np.pi / 4 + 1e-15)
    cp = np.exp(-1j * alpha)
    v = v * cp
    c = c * cp
    steps.append(NormalizationStep("phase", "F -> exp(-i alpha) F with z -> exp(-i alpha) z", None, float(-alpha)))
    cur = _act(u, v, o, c)

    # 5. O(2) normalization: eta = (cos t, i sin t) with both entries' moduli taken nonnegative
    eta = cur[n - 1 :, n]
    x, y = eta.real, eta.imag
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx >= ny:
        xh = x / nx
        yp = y - (y @ xh) * xh
        yh = yp / np.linalg.norm(yp) if np.linalg.norm(yp) > 1e-12 else np.array([-xh[1], xh[0]])
    else:
        yh = y / ny
        xp = x - (x @ yh) * yh
        xh = xp / np.linalg.norm(xp) if np.linalg.norm(xp) > 1e-12 else np.array([yh[1], -yh[0]])
    r = np.column_stack([xh, yh])
    o = o @ _embed(r, size, n - 1)
    steps.append(NormalizationStep("target", "O(2) rotation and sign flips on the last two coordinates", r))
    cur = _act(u, v, o, c)
    eta = cur[n - 1 :, n]
    theta = float(math.atan2(max(eta[1].imag, 0.0), max(eta[0].real, 0.0)))

    # 6. absorb the phase of xi into z_n
    xi = cur[n - 1 :, n - 1]
    ref = np.array([1j * math.sin(theta), math.cos(theta)])
    g = np.angle(np.vdot(ref, xi))
    pn = np.diag([1.0] * (n - 1) + [np.exp(-1j * g)])
    v = v @ pn
    steps.append(NormalizationStep("source", "phase on z_n absorbing arg xi", pn))
    cur = _act(u, v, o, c)

    residual = float(np.abs(cur - canonical_unitary(n, theta)).max())
    if residual > math.sqrt(tol):
        raise StructureViolation(f"normalized matrix misses the canonical form by {residual:.3e}")
    margin = abs(theta - math.pi / 4)
    if margin <= RATIONAL_MARGIN:
        case, beta = RATIONAL, None
    else:
        case, beta = IRRATIONAL, (theta if theta < math.pi / 4 else math.pi / 2 - theta)
    return CanonicalForm(n, case, theta, beta, tuple(steps), v, o, float(np.angle(c)), residual, margin, lam)


def reconstruct_map(n: int, theta: float) -> HoloMap:
    """Solve ``(z, s) = F canonical_unitary(n, theta)`` for ``F``.

    With ``k = cos 2t`` and ``q = sin 2t`` the scalar ``s = sum f^2 / 2``
    solves ``k s^2 - 2 (1 + i q z_n) s + sum_{j<n} z_j^2 + k z_n^2 = 0``; the
    root vanishing at the origin is taken. Then
    ``f_n = -i sin t z_n + cos t s`` and ``f_{n+1} = cos t z_n - i sin t s``.
    """
    if n < 2:
        raise ParameterOutOfRange("reconstruction needs n >= 2")
    if not 0.0 <= theta <= math.pi / 2:
        raise ParameterOutOfRange(f"theta = {theta} outside [0, pi/2]")
    z = variables(n)
    zn = z[-1]
    big_s = total([zj * zj for zj in z[:-1]])
    c, sn = math.cos(theta), math.sin(theta)
    if abs(theta - math.pi / 4) <= 1e-15:
        s = big_s / (2 * (1 + Const(1j) * zn))
        c = sn = math.sqrt(0.5)
    else:
        k, q = math.cos(2 * theta), math.sin(2 * theta)
        h = 1 + Const(2j * q) * zn - zn * zn - Const(k) * big_s
        s = (1 + Const(1j * q) * zn - sqrt(h)) / Const(k)
    fn = Const(-1j * sn) * zn + Const(c) * s
    fn1 = Const(c) * zn + Const(-1j * sn) * s
    return HoloMap(DomainSpec.ball(n), DomainSpec.type_iv(n + 1), tuple(z[:-1]) + (fn, fn1),
                   f"reconstruct:n={n},theta={theta!r}")


# --- the witness pair -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WitnessPair:
    """``B`` in U(n, 1) on ``(z, s)`` and ``T`` in O(n+1, 2) intertwining the homogeneous maps."""

    n: int
    theta: float
    b: np.ndarray
    t: np.ndarray
    b_defect: float
    t_defect: float

    def ball_automorphism(self) -> Automorphism:
        """``B`` reordered to act on ``[s, z]``, as a ball automorphism."""
        perm = np.roll(np.arange(self.n + 1), 1)
        return Automorphism(DomainSpec.ball(self.n), self.b[np.ix_(perm, perm)])

    def type_iv_automorphism(self) -> Automorphism:
        return Automorphism(DomainSpec.type_iv(self.n + 1), self.t)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "theta": self.theta,
            "b": matrix_to_json(self.b),
            "t": matrix_to_json(self.t),
            "b_defect": self.b_defect,
            "t_defect": self.t_defect,
        }


def equivalence_witness(n: int, theta: float) -> WitnessPair:
    if n < 2:
        raise ParameterOutOfRange("witness needs n >= 2")
    if not 0.0 <= theta < math.pi / 4:
        raise ParameterOutOfRange(f"theta = {theta} outside [0, pi/4)")
    k = math.cos(2 * theta)
    c, s = math.cos(theta), math.sin(theta)
    rk = math.sqrt(k)
    b = np.eye(n + 1, dtype=complex)
    b[n - 1 :, n - 1 :] = np.array([[c, -1j * s], [1j * s, c]]) / rk
    h = math.sin(theta / 2) ** 2
    r2 = math.sqrt(2.0)
    vm = np.array([
        [1 - 4 * h, 0, 2 * r2 * h, 0],
        [0, 1, 0, -r2 * s],
        [2 * r2 * h, 0, 1 - 4 * h, 0],
        [0, -r2 * s, 0, 1],
    ]) / rk
    t = np.eye(n + 3)
    t[n - 1 :, n - 1 :] = vm
    okb, db = check_group_membership(b, GroupTag.indefinite_unitary((1,) * n + (-1,)), 1e-12)
    okt, dt = check_group_membership(t, GroupTag.type_iv(n + 1), 1e-12)
    if not (okb and okt):  # pragma: no cover - closed-form matrices
        raise StructureViolation(f"witness matrices fail membership ({db:.2e}, {dt:.2e})")
    return WitnessPair(n, theta, b, t, db, dt)


def homogeneous_itheta(n: int, theta: float, x) -> np.ndarray:
    """Homogeneous form of ``I_{n,theta}`` on ``x = (z, s)``, composed with the Borel lift."""
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    z, s = x[:, :n], x[:, n]
    zn = z[:, -1]
    k, q = math.cos(2 * theta), math.sin(2 * theta)
    c, sn = math.cos(theta), math.sin(theta)
    hh = s * s + 2j * q * zn * s - zn * zn - k * (z[:, :-1] ** 2).sum(1)
    r = np.sqrt(hh)
    phi_n = (c * s + 1j * sn * zn - c * r) / k
    phi_n1 = (-1j * sn * s + c * zn + 1j * sn * r) / k
    sig = (s + 1j * q * zn - r) / k  # s times sum f^2 / 2
    r2 = math.sqrt(2.0)
    return np.column_stack([z[:, :-1], phi_n, phi_n1, (s + sig) / r2, (s - sig) / (1j * r2)])


def witness_residual(w: WitnessPair, samples: int = 100, seed: int = 0, radius: float = 0.3) -> float:
    """Largest projective defect of ``I_{n,0}(x) T  ~  I_{n,theta}(x B)`` at seeded ``x = (z, 1)``."""
    rng = np.random.default_rng(seed)
    z = sample_interior(DomainSpec.ball(w.n), samples, rng, radius)
    x = np.column_stack([z, np.ones(samples)])
    lhs = homogeneous_itheta(w.n, 0.0, x) @ w.t
    rhs = homogeneous_itheta(w.n, w.theta, x @ w.b)
    ratio = np.einsum("bi,bi->b", rhs.conj(), lhs) / np.einsum("bi,bi->b", rhs.conj(), rhs)
    return float((np.abs(lhs - ratio[:, None] * rhs).max(1) / np.abs(lhs).max(1)).max())


# --- the full pipeline --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Classification:
    canonical: CanonicalForm
    witness: WitnessPair | None
    final_class: str  # "ClassA" (rational) or "ClassB" (irrational)
    origin_move: Automorphism | None
    extraction_residual: float

    def normalizing_pair(self) -> tuple:
        """``(pre, post)`` with ``post o F o pre = reconstruct_map(n, theta_raw)``."""
        post = self.canonical.post_automorphism()
        if self.origin_move is not None:
            post = compose(post, self.origin_move)
        return self.canonical.pre_automorphism(), post

    def to_json(self) -> dict:
        d = {
            "case": self.canonical.case,
            "beta": self.canonical.beta,
            "theta_raw": self.canonical.theta_raw,
            "final_class": self.final_class,
            "extraction_residual": self.extraction_residual,
            "canonical": self.canonical.to_json(),
            "moved_to_origin": self.origin_move is not None,
        }
        if self.witness is not None:
            d["witness"] = self.witness.to_json()
        return d


def classify_map(f: HoloMap, tol: float = 1e-8, seed: int = 0) -> Classification:
    """Extract, normalize and certify; maps with ``F(0) != 0`` are first moved to the origin."""
    if f.source.kind != UNIT_BALL or f.target.kind != TYPE_IV:
        raise DomainMismatch("classification needs a map from a ball into a Type IV domain")
    n = f.source.n
    move = None
    f0 = f(np.zeros(n))
    if np.abs(f0).max() > tol:
        if f.target.m != n + 1:
            raise NotIsometry(f"target {f.target} is not D^IV_{n + 1}")
        move = typeIV_aut_to_origin(f0)
        f = compose_autos(None, f, move)
    u = extract_unitary(f, tol, seed)
    res = functional_residual(f, u, _probe_points(n, 16, seed + 1))
    cf = normalize_unitary(u, tol)
    witness = equivalence_witness(n, cf.beta) if cf.case == IRRATIONAL else None
    return Classification(cf, witness, "ClassA" if cf.case == RATIONAL else "ClassB", move, res)


__all__ = [
    "CanonicalForm", "Classification", "NormalizationStep", "WitnessPair", "canonical_unitary",
    "classify_map", "equivalence_witness", "extract_unitary", "functional_residual", "homogeneous_itheta",
    "normalize_unitary", "reconstruct_map", "witness_residual", "HALF",
]
