import json
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
import sympy as sp

from typeiv.domains import DomainSpec
from typeiv.errors import NormMismatch, NotPolynomial, NotSymmetric
from typeiv.exact import Exact
from typeiv.expr import Const, HoloMap, variables
from typeiv.hforms import (SUM_NORM_SQ, TYPE_IV_KERNEL, HermitianForm, dangelo_unitary, form_from_map, grlex_key,
                           power_form, power_signature, signature)
from typeiv.maps import catalog_build, exhp0, flat, riv


def sympy_power_signature(n, p):
    """Brute force: expand with sympy, read the coefficient matrix, count eigenvalue signs."""
    z = sp.symbols(f"z0:{n}")
    zb = sp.symbols(f"zb0:{n}")
    poly = sp.Poly(sp.expand((1 - sum(a * b for a, b in zip(z, zb))) ** p), *z, *zb)
    mons = sorted({m[:n] for m in poly.monoms()} | {m[n:] for m in poly.monoms()})
    idx = {m: i for i, m in enumerate(mons)}
    mat = np.zeros((len(mons), len(mons)))
    for m, c in zip(poly.monoms(), poly.coeffs()):
        mat[idx[m[:n]], idx[m[n:]]] = float(c)
    w = np.linalg.eigvalsh(mat)
    return int((w > 1e-9).sum()), int((w < -1e-9).sum()), int((np.abs(w) <= 1e-9).sum())


def test_grlex_order():
    basis = power_form(2, 2).basis
    assert basis == sorted(basis, key=grlex_key)
    assert basis == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_forms_from_maps():
    z = variables(2)
    f = HoloMap(DomainSpec.ball(2), DomainSpec.ball(2), (z[0], z[1]))
    h = form_from_map(f, SUM_NORM_SQ)
    assert h.basis == [(1, 0), (0, 1)] and np.allclose(h.matrix(), np.eye(2))
    assert form_from_map(flat(2, 4), TYPE_IV_KERNEL) == HermitianForm.norm_z(2)
    # Exhp0(2): sum|z|^2 - |z_2|^4 (1 - sum|z|^2) / 4
    nz = HermitianForm.norm_z(2)
    z2 = HermitianForm(2, {((0, 2), (0, 2)): Exact(1)})
    assert form_from_map(exhp0(2), TYPE_IV_KERNEL) == nz - z2 * (1 - nz) * Exact(Fraction(1, 4))
    with pytest.raises(NotPolynomial):
        form_from_map(riv(2))


def test_hermitian_check_and_values(rng):
    with pytest.raises(NotSymmetric):
        HermitianForm(1, {((1,), (0,)): Exact(1)})
    h = form_from_map(exhp0(2), TYPE_IV_KERNEL)
    z = 0.5 * (rng.standard_normal((20, 2)) + 1j * rng.standard_normal((20, 2)))
    v = h(z)
    assert np.abs(v.imag).max() < 1e-12
    back = HermitianForm.from_json(json.loads(json.dumps(h.to_json())))
    assert np.allclose(back(z), v)


def test_signature_examples():
    assert signature(power_form(2, 2)).as_tuple() == (4, 2, 0)
    assert signature(power_form(1, 2)).as_tuple() == (2, 1, 0)
    assert signature(HermitianForm.norm_z(1)).as_tuple() == (1, 0, 0)
    assert power_signature(3, 1).as_tuple() == (1, 3, 0)
    assert power_signature(1, 2).positives == 2
    assert signature(form_from_map(exhp0(2), TYPE_IV_KERNEL)).negatives >= 1


@pytest.mark.parametrize("n,p", list(product((2, 3, 4), (2, 3, 4))))
def test_power_signature_against_sympy(n, p):
    s = power_signature(n, p)
    assert s.as_tuple() == sympy_power_signature(n, p)
    assert s.positives >= 3


def test_dangelo_examples():
    z = variables(2)
    u = dangelo_unitary([z[1], z[0]], [z[0], z[1]])
    assert np.allclose(u, [[0, 1], [1, 0]])
    r = Const(Exact(0, 0, Fraction(1, 2)))  # 1 / sqrt 2
    g = [r * z[0], r * z[0]]
    f = [z[0], Const(0)]
    u = dangelo_unitary(f, g)
    assert np.allclose(u.conj().T @ u, np.eye(2))
    assert np.allclose(np.array([1, 1]) / np.sqrt(2) @ u, [1, 0])
    with pytest.raises(NormMismatch):
        dangelo_unitary([z[0]], [Const(2) * z[0]])


def test_dangelo_recovers_a_hidden_unitary(rng):
    z = variables(2)
    g = [z[0], z[1], z[0] * z[1], z[0] ** 2]
    q = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
    f = [sum((Const(complex(q[i, j])) * g[i] for i in range(4)), Const(0)) for j in range(4)]
    u = dangelo_unitary(f, g)
    pts = 0.5 * (rng.standard_normal((50, 2)) + 1j * rng.standard_normal((50, 2)))
    gv = np.stack([pts[:, 0], pts[:, 1], pts[:, 0] * pts[:, 1], pts[:, 0] ** 2], axis=1)
    assert np.abs(gv @ u - gv @ q).max() < 1e-10


def test_riv_functional_equation_unitary(rng):
    # (z, sum f^2 / 2) against the components of RIV(2): both have the same norm form
    f = catalog_build("RIV:n=2")
    pts = 0.5 * (rng.standard_normal((50, 2)) + 1j * rng.standard_normal((50, 2)))
    pts = pts[(np.abs(pts) ** 2).sum(1) < 0.8]
    fv = f.eval_batch(pts)
    phi = np.column_stack([pts, 0.5 * (fv * fv).sum(1)])
    u, *_ = np.linalg.lstsq(fv, phi, rcond=None)
    assert np.abs(fv @ u - phi).max() < 1e-10
    assert np.allclose(u.conj().T @ u, np.eye(3))
