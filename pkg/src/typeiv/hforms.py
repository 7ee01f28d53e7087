"""Hermitian bihomogeneous forms ``sum c_{ab} z^a conj(z)^b`` with exact coefficients.

A form is stored as an exact coefficient dictionary over pairs of exponent
tuples. Its coefficient matrix lives on the monomial basis in graded
lexicographic order: by total degree, then exponent tuples in descending
lexicographic order (``z1^2, z1 z2, z2^2`` for degree two in two variables).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, NormMismatch, NotPolynomial, NoSolution, NotSymmetric
from .exact import ONE, ZERO, Exact, ExactPoly
from .expr import Expr, HoloMap, expand_polynomial, max_var
from .linalg import _complete_unitary, matrix_from_json, matrix_to_json

SUM_NORM_SQ = "sum-norm-sq"
TYPE_IV_KERNEL = "typeIV-kernel"


def grlex_key(e) -> tuple:
    return (sum(e), tuple(-k for k in e))


class HermitianForm:
    """Real-valued polynomial ``sum_{a,b} c[a, b] z^a conj(z)^b`` with ``c`` Hermitian."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: dict, check: bool = True):
        self.n = n
        self.coeffs = {k: Exact.coerce(v) for k, v in coeffs.items() if v}
        if check:
            for (a, b), c in self.coeffs.items():
                if len(a) != n or len(b) != n:
                    raise DimensionMismatch("exponent length differs from the variable count")
                if self.coeffs.get((b, a), ZERO) != c.conjugate():
                    raise NotSymmetric(f"coefficient matrix is not Hermitian at {(a, b)}")

    # construction ----------------------------------------------------------

    @classmethod
    def norm_squared(cls, p: ExactPoly) -> "HermitianForm":
        """``|p|^2`` for a holomorphic polynomial ``p``."""
        return cls.outer(p, p)

    @classmethod
    def outer(cls, p: ExactPoly, q: ExactPoly) -> "HermitianForm":
        """``p conj(q)``; only Hermitian when combined symmetrically by the caller."""
        out = {}
        for a, ca in p.terms.items():
            for b, cb in q.terms.items():
                out[(a, b)] = out.get((a, b), ZERO) + ca * cb.conjugate()
        return cls(p.nvars, out, check=False)

    @classmethod
    def constant(cls, n: int, c) -> "HermitianForm":
        z = (0,) * n
        return cls(n, {(z, z): Exact.coerce(c)})

    @classmethod
    def norm_z(cls, n: int) -> "HermitianForm":
        """``|z_1|^2 + ... + |z_n|^2``."""
        out = {}
        for j in range(n):
            e = tuple(int(i == j) for i in range(n))
            out[(e, e)] = ONE
        return cls(n, out)

    # arithmetic ------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, HermitianForm):
            other = HermitianForm.constant(self.n, other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, ZERO) + v
        return HermitianForm(self.n, out, check=False)

    __radd__ = __add__

    def __neg__(self):
        return HermitianForm(self.n, {k: -v for k, v in self.coeffs.items()}, check=False)

    def __sub__(self, other):
        return self + (-other if isinstance(other, HermitianForm) else -Exact.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, HermitianForm):
            c = Exact.coerce(other)
            return HermitianForm(self.n, {k: v * c for k, v in self.coeffs.items()}, check=False)
        out = {}
        for (a1, b1), c1 in self.coeffs.items():
            for (a2, b2), c2 in other.coeffs.items():
                k = (tuple(x + y for x, y in zip(a1, a2)), tuple(x + y for x, y in zip(b1, b2)))
                out[k] = out.get(k, ZERO) + c1 * c2
        return HermitianForm(self.n, out, check=False)

    __rmul__ = __mul__

    def __pow__(self, p: int):
        out = HermitianForm.constant(self.n, ONE)
        for _ in range(p):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, HermitianForm):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __repr__(self):
        return f"HermitianForm(n={self.n}, basis={len(self.basis)})"

    # views -----------------------------------------------------------------

    @property
    def basis(self) -> list:
        mons = {a for (a, _) in self.coeffs} | {b for (_, b) in self.coeffs}
        return sorted(mons, key=grlex_key)

    def matrix(self, basis=None) -> np.ndarray:
        basis = self.basis if basis is None else basis
        idx = {e: i for i, e in enumerate(basis)}
        m = np.zeros((len(basis), len(basis)), complex)
        for (a, b), c in self.coeffs.items():
            m[idx[a], idx[b]] = complex(c)
        return m

    def exact_matrix(self, basis=None) -> list:
        basis = self.basis if basis is None else basis
        return [[self.coeffs.get((a, b), ZERO) for b in basis] for a in basis]

    def __call__(self, z) -> np.ndarray:
        """Value at a point or batch; real up to rounding."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        basis = self.basis
        mons = np.stack([np.prod(z ** np.asarray(e), axis=1) for e in basis], axis=1) if basis else np.zeros((len(z), 0))
        vals = np.einsum("ba,ac,bc->b", mons, self.matrix(basis), mons.conj())
        return vals

    def to_json(self) -> dict:
        basis = self.basis
        return {"n": self.n, "monomials": [list(e) for e in basis], "coeff": matrix_to_json(self.matrix(basis))}

    @classmethod
    def from_json(cls, d: dict) -> "HermitianForm":
        n = int(d["n"])
        basis = [tuple(int(k) for k in e) for e in d["monomials"]]
        if any(len(e) != n for e in basis) or len(set(basis)) != len(basis):
            raise DimensionMismatch("monomials must be distinct and have n exponents")
        m = matrix_from_json(d["coeff"])
        if m.shape != (len(basis), len(basis)):
            raise DimensionMismatch("coefficient matrix does not match the basis")
        coeffs = {}
        for i, a in enumerate(basis):
            for j, b in enumerate(basis):
                c = m[i, j]
                if c != 0:
                    coeffs[(a, b)] = Exact(Fraction(c.real), Fraction(c.imag))
        return cls(n, coeffs)


def component_polys(components, n: int | None = None) -> list:
    comps = list(components)
    if n is None:
        n = max((max_var(c) for c in comps if isinstance(c, Expr)), default=-1) + 1
        n = max(n, max((c.nvars for c in comps if isinstance(c, ExactPoly)), default=0))
    return [c if isinstance(c, ExactPoly) else expand_polynomial(c, n) for c in comps], n


def form_from_map(f: HoloMap, mode: str = SUM_NORM_SQ) -> HermitianForm:
    """``sum |f_i|^2`` or the Type IV kernel form ``sum |f_i|^2 - |sum f_i^2|^2 / 4``."""
    if not f.is_polynomial():
        raise NotPolynomial(f"{f.name or 'map'} has non-polynomial components")
    polys, n = component_polys(f.components, f.source.dim)
    out = HermitianForm(n, {}, check=False)
    for p in polys:
        out = out + HermitianForm.norm_squared(p)
    if mode == TYPE_IV_KERNEL:
        s = ExactPoly(n)
        for p in polys:
            s = s + p * p
        out = out - HermitianForm.norm_squared(s) * Exact(Fraction(1, 4))
    elif mode != SUM_NORM_SQ:
        raise ValueError(f"unknown form mode {mode!r}")
    return HermitianForm(n, out.coeffs)


@dataclass(frozen=True)
class SignatureResult:
    positives: int
    negatives: int
    zeros: int

    def as_tuple(self) -> tuple:
        return (self.positives, self.negatives, self.zeros)

    def to_json(self) -> dict:
        return {"pos": self.positives, "neg": self.negatives, "zero": self.zeros}


def signature(h: HermitianForm, tol: float = 1e-9, basis=None) -> SignatureResult:
    """Eigenvalue sign counts of the coefficient matrix.

    Eigenvalues within ``tol * max|eigenvalue|`` of zero count as zeros.
    """
    m = h.matrix(basis)
    if m.size == 0:
        return SignatureResult(0, 0, 0)
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    cut = tol * max(float(np.abs(w).max()), 0.0)
    return SignatureResult(int((w > cut).sum()), int((w < -cut).sum()), int((np.abs(w) <= cut).sum()))


def power_form(n: int, p: int) -> HermitianForm:
    """``(1 - |z_1|^2 - ... - |z_n|^2)^p`` expanded exactly."""
    return (1 - HermitianForm.norm_z(n)) ** p


def power_signature(n: int, p: int, tol: float = 1e-9) -> SignatureResult:
    if n < 1 or p < 1:
        raise ValueError("n and p must be positive")
    return signature(power_form(n, p), tol)


def _coeff_matrix(polys, basis) -> np.ndarray:
    return np.array([[complex(p.terms.get(e, ZERO)) for e in basis] for p in polys], dtype=complex).reshape(
        len(polys), len(basis)
    )


def dangelo_unitary(f, g, tol: float = 1e-9) -> np.ndarray:
    """A unitary ``U`` with ``f = g U`` (row vectors) when ``sum|f|^2 = sum|g|^2``.

    With ``A``, ``B`` the monomial-by-component coefficient matrices of ``g``
    and ``f``, equal norms mean ``A A^* = B B^*``. From the thin SVD
    ``A = W S X^*`` one gets ``B = W S Y^*``, and
    ``U = X Y^* + X_perp Y_perp^*`` with both complements taken by Gram-Schmidt
    on the canonical basis.

    Raises:
        NormMismatch: the two norm forms differ by more than ``tol``.
        NoSolution: the recovered ``U`` fails ``g U = f`` or unitarity.
    """
    f, g = list(f), list(g)
    if len(f) != len(g):
        raise DimensionMismatch("component lists must have equal length")
    pf, n1 = component_polys(f)
    pg, n2 = component_polys(g)
    n = max(n1, n2, 1)
    pf, _ = component_polys(f, n)
    pg, _ = component_polys(g, n)
    k = len(f)
    basis = sorted({e for p in pf + pg for e in p.terms}, key=grlex_key)
    a = _coeff_matrix(pg, basis).T  # monomials x components
    b = _coeff_matrix(pf, basis).T
    scale = max(1.0, float(np.abs(a).max(initial=0.0)), float(np.abs(b).max(initial=0.0))) ** 2
    gap = float(np.abs(a @ a.conj().T - b @ b.conj().T).max(initial=0.0))
    if gap > tol * scale:
        raise NormMismatch(f"norm forms differ by {gap:.3e}")
    w, s, xh = np.linalg.svd(a, full_matrices=False) if a.size else (np.zeros((0, 0)), np.zeros(0), np.zeros((0, k)))
    r = int((s > tol * max(1.0, s.max(initial=0.0))).sum())
    w, s, x = w[:, :r], s[:r], xh[:r].conj().T
    yh = (w.conj().T @ b) / s[:, None]
    y = yh.conj().T
    xf = _complete_unitary(x, k)
    yf = _complete_unitary(y, k)
    u = xf @ yf.conj().T
    if np.abs(a @ u - b).max(initial=0.0) > max(tol, 1e-10) * scale or np.abs(u.conj().T @ u - np.eye(k)).max() > 1e-9:
        raise NoSolution("coefficient matching did not give a unitary solution")
    return u
