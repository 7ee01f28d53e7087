"""Dense complex linear algebra used by the group validators and the classifier.

Matrices are plain ``numpy`` arrays. The JSON form of a matrix is
``{"rows": r, "cols": c, "re": [...], "im": [...]}`` in row-major order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotOrthonormal, NotSymmetric

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class TakagiResult:
    """``v.T @ s @ v == diag(lambdas)`` with ``v`` unitary, ``lambdas`` nonincreasing."""

    v: np.ndarray
    lambdas: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Return ``conj(v) @ diag(lambdas) @ v^H``, which equals the input matrix."""
        return self.v.conj() @ np.diag(self.lambdas) @ self.v.conj().T


def _max_norm(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def _complete_unitary(q: np.ndarray, dim: int) -> np.ndarray:
    """Append columns to orthonormal ``q`` (dim x k) until it is square.

    Gram-Schmidt (two passes) over the canonical basis vectors in index order;
    candidates that are dependent on the columns collected so far are skipped.
    """
    cols = [q[:, j] for j in range(q.shape[1])]
    dtype = np.result_type(q.dtype, np.float64)
    for i in range(dim):
        if len(cols) == dim:
            break
        e = np.zeros(dim, dtype=dtype)
        e[i] = 1.0
        for _ in range(2):
            for c in cols:
                e = e - c * np.vdot(c, e)
        nrm = np.linalg.norm(e)
        if nrm > 1e-8:
            cols.append(e / nrm)
    return np.column_stack(cols) if cols else np.zeros((dim, 0), dtype=dtype)


def _pivot_phase(col: np.ndarray) -> complex:
    """Phase of the first entry of largest magnitude in ``col``."""
    mags = np.abs(col)
    k = int(np.argmax(mags >= mags.max() * (1 - 1e-12)))
    return col[k] / mags[k]


def _takagi_once(s: np.ndarray, zero_cut: float) -> tuple[np.ndarray, np.ndarray]:
    n = s.shape[0]
    a, b = s.real, s.imag
    # s (x - i w) = sigma (x + i w) is the eigenproblem of this real symmetric matrix
    k = np.block([[a, b], [b, -a]])
    try:
        w, u = np.linalg.eigh(k)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    order = np.argsort(-w, kind="stable")[:n]
    sig = w[order]
    keep = sig > zero_cut
    vecs = u[:n, order[keep]] - 1j * u[n:, order[keep]]
    if vecs.shape[1]:
        # one QR pass cleans up orthonormality inside clusters of equal values
        qq, rr = np.linalg.qr(vecs)
        vecs = qq * (np.diag(rr) / np.abs(np.diag(rr)))
    v = _complete_unitary(vecs, n)
    lam = np.concatenate([sig[keep], np.zeros(n - int(keep.sum()))])
    return v, lam


def takagi(s, tol: float = DEFAULT_TOL, max_sweeps: int = 200) -> TakagiResult:
    """Takagi factorization of a complex symmetric matrix.

    Finds unitary ``V`` and ``lambda_1 >= ... >= lambda_n >= 0`` with
    ``V.T @ s @ V = diag(lambda)``.

    The values come from the real symmetric embedding
    ``[[Re s, Im s], [Im s, -Re s]]`` whose spectrum is ``{+-lambda_i}``, so no
    squaring of ``s`` takes place. If the diagonalized matrix still has
    off-diagonal mass above roundoff, the factorization is re-applied to it,
    at most ``max_sweeps`` times.

    Phase convention: the first entry of largest magnitude of every column is
    rotated into the half plane ``(-pi/2, pi/2]`` (a sign choice) when its value
    is positive, and made real positive when its value is zero.

    Raises:
        NotSymmetric: ``max|s - s.T| > tol * max|s|``.
        NoConvergence: the refinement did not settle within ``max_sweeps``.
    """
    s = np.asarray(s, dtype=complex)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"takagi needs a square matrix, got shape {s.shape}")
    n = s.shape[0]
    scale = _max_norm(s) or 1.0
    if _max_norm(s - s.T) > tol * scale:
        raise NotSymmetric(f"asymmetry {_max_norm(s - s.T):.3e} exceeds {tol * scale:.3e}")
    s = (s + s.T) / 2
    if n == 0:
        return TakagiResult(np.zeros((0, 0), complex), np.zeros(0))
    zero_cut = 64 * n * np.finfo(float).eps * scale
    target = 16 * n * np.finfo(float).eps * scale

    v = np.eye(n, dtype=complex)
    m = s
    for _ in range(max_sweeps):
        w, lam = _takagi_once(m, zero_cut)
        v = v @ w
        m = v.T @ s @ v
        off = m - np.diag(np.diag(m))
        if _max_norm(off) <= target:
            break
    else:
        raise NoConvergence(f"Takagi refinement exceeded {max_sweeps} sweeps")

    d = np.diag(m)
    lam = np.abs(d)
    order = np.argsort(-lam, kind="stable")
    v, d, lam = v[:, order], d[order], lam[order]
    for j in range(n):
        if lam[j] > zero_cut:
            # exact Takagi phase, then the residual sign freedom
            v[:, j] *= np.exp(-0.5j * np.angle(d[j]))
            p = _pivot_phase(v[:, j])
            if p.real < -1e-12 or (abs(p.real) <= 1e-12 and p.imag < 0):
                v[:, j] = -v[:, j]
        else:
            v[:, j] /= _pivot_phase(v[:, j])
            lam[j] = 0.0
    lam = np.real(np.diag(v.T @ s @ v)).clip(min=0.0)
    return TakagiResult(v, lam)


@dataclass(frozen=True)
class GroupTag:
    """Matrix group defined by ``A E A^* = E`` for the diagonal sign matrix ``E``.

    ``kind`` is ``"unitary"`` (``A E conj(A).T = E``) or ``"orthogonal"``
    (real ``A`` with ``A E A.T = E`` and a positive determinant on the trailing
    negative block, the component preserving a Type IV domain).
    """

    kind: str
    signs: tuple

    @classmethod
    def ball(cls, n: int) -> "GroupTag":
        """U(n, 1) acting on ``[1, z]``."""
        return cls("unitary", (-1,) + (1,) * n)

    @classmethod
    def generalized_ball(cls, n: int, l: int) -> "GroupTag":
        """U(n+l+1, l+1) acting on ``[1, w_1..w_l, z_1..z_n]``."""
        return cls("unitary", (-1,) * (l + 1) + (1,) * n)

    @classmethod
    def type_iv(cls, m: int) -> "GroupTag":
        """O(m, 2) with ``det(D) > 0``."""
        return cls("orthogonal", (1,) * m + (-1, -1))

    @classmethod
    def indefinite_unitary(cls, signs) -> "GroupTag":
        return cls("unitary", tuple(int(x) for x in signs))

    @property
    def size(self) -> int:
        return len(self.signs)

    @property
    def e(self) -> np.ndarray:
        return np.diag(np.asarray(self.signs, dtype=float))


def check_group_membership(m, group: GroupTag, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Return ``(member, defect)`` where ``defect`` is the largest identity violation."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != group.size:
        raise DimensionMismatch(f"matrix of shape {m.shape} for a group of size {group.size}")
    e = group.e
    if group.kind == "unitary":
        defect = _max_norm(m @ e @ m.conj().T - e)
        return defect <= tol, defect
    if group.kind == "orthogonal":
        defect = max(_max_norm(np.imag(m)), _max_norm(np.real(m) @ e @ np.real(m).T - e))
        q = sum(1 for x in group.signs if x < 0)
        det_d = float(np.linalg.det(np.real(m)[-q:, -q:])) if q else 1.0
        return (defect <= tol and det_d > 1e-12), defect
    raise ValueError(f"unknown group kind {group.kind!r}")


def extend_orthonormal_real(vs, dim: int | None = None, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Complete real orthonormal vectors to an orthogonal matrix.

    The given vectors become the leading columns; the rest come from
    Gram-Schmidt on ``e_1, e_2, ...`` in index order, skipping dependents.
    ``dim`` is required when ``vs`` is empty.
    """
    vs = [np.asarray(v, dtype=float) for v in vs]
    if not vs:
        if dim is None:
            raise DimensionMismatch("dimension is required for an empty vector list")
        return np.eye(dim)
    dim = len(vs[0]) if dim is None else dim
    if any(v.shape != (dim,) for v in vs):
        raise DimensionMismatch("all vectors must have the same length")
    q = np.column_stack(vs)
    gram = q.T @ q
    if _max_norm(gram - np.eye(len(vs))) > tol:
        raise NotOrthonormal(f"Gram defect {_max_norm(gram - np.eye(len(vs))):.3e}")
    return np.real(_complete_unitary(q, dim))


def matrix_to_json(m) -> dict:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.ravel()],
        "im": [float(x) for x in m.imag.ravel()],
    }


def matrix_from_json(d: dict) -> np.ndarray:
    rows, cols = int(d["rows"]), int(d["cols"])
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d.get("im", [0.0] * len(re)), dtype=float)
    if re.size != rows * cols or im.size != rows * cols:
        raise DimensionMismatch("entry count does not match rows x cols")
    m = (re + 1j * im).reshape(rows, cols)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m
