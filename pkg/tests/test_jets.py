from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from typeiv.domains import DomainSpec, defining_values
from typeiv.errors import NotAnalyticAtOrigin, NotNormalForm
from typeiv.exact import Exact, ExactPoly
from typeiv.expr import Const, HoloMap, sqrt, variables
from typeiv.jets import (cayley_embedding, expand, heisenberg_weights, linear_model, mapping_residual,
                         normal_form_check, psi_model)


def to_sympy(c: Exact):
    r2 = sp.sqrt(2)
    return sp.Rational(c.a) + sp.I * sp.Rational(c.b) + r2 * (sp.Rational(c.c) + sp.I * sp.Rational(c.d))


def poly_to_sympy(p: ExactPoly, syms):
    return sp.Add(*[to_sympy(c) * sp.Mul(*[s**k for s, k in zip(syms, e)]) for e, c in p.terms.items()])


def heis_map(n, N, comps):
    return HoloMap(DomainSpec.heisenberg(n), DomainSpec.heisenberg_sig1(N), tuple(comps), "test")


# --- expand -------------------------------------------------------------------


def test_expand_examples():
    z1, w = variables(2)
    s = expand(z1 * w, 2, 4).poly
    assert list(s.terms) == [(1, 1)] and s.wdeg((1, 1)) == 3

    s = expand(1 - sqrt(1 - z1 * z1), 1, 6, weights=(1,)).poly
    assert s.terms == {(2,): Exact(Fraction(1, 2)), (4,): Exact(Fraction(1, 8)), (6,): Exact(Fraction(1, 16))}

    z = variables(1)[0]
    s = expand(1 / (1 - z), 1, 3, weights=(1,)).poly
    assert s.terms == {(k,): Exact(1) for k in range(4)}


def test_expand_matches_sympy_series():
    z1, z2, w = variables(3)
    e = sqrt(1 + z1 + Const(1j) * w) / (2 - z2 * w + z1 * z1)
    order = 6
    got = expand(e, 3, order).poly
    a, b, c, t = sp.symbols("a b c t")
    ref = sp.sqrt(1 + t * a + sp.I * t**2 * c) / (2 - t**3 * b * c + t**2 * a * a)
    ser = sp.series(ref, t, 0, order + 1).removeO()
    diff = sp.expand(ser.subs(t, 1) - poly_to_sympy(got, (a, b, c)))
    assert diff == 0


def test_not_analytic():
    z1, w = variables(2)
    with pytest.raises(NotAnalyticAtOrigin):
        expand(1 / z1, 2, 4)
    with pytest.raises(NotAnalyticAtOrigin):
        expand(sqrt(w), 2, 4)


@given(st.lists(st.integers(0, 4), min_size=3, max_size=3), st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_grading_additive(e1, e2):
    wts = heisenberg_weights(3)
    p = ExactPoly(3, {tuple(e1): Exact(1)}, wts)
    q = ExactPoly(3, {tuple(e2): Exact(2)}, wts)
    (e,) = (p * q).terms
    assert p.wdeg(e) == p.wdeg(tuple(e1)) + p.wdeg(tuple(e2))


# --- mapping residual -----------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4])
def test_flat_models(n):
    assert mapping_residual(linear_model(n, n + 1)).is_zero
    assert mapping_residual(linear_model(n, n + 3)).is_zero
    v = variables(n)
    for psi in [v[0] * v[0], v[-1]] + ([v[0] * v[1]] if n > 2 else []):
        assert mapping_residual(psi_model(n, n + 2, psi)).is_zero


def test_broken_map_residual():
    n = 3
    v = variables(n)
    f = heis_map(n, n + 1, list(v[:-1]) + [v[0] * v[0], v[-1]])
    r = mapping_residual(f)
    assert r.first_nonzero() == 4
    # restricted ring is (z1, z2, zbar1, zbar2, u)
    assert r.parts[4].terms == {(2, 0, 2, 0, 0): Exact(-1)}
    assert not any(r.parts[5:])


def test_residual_matches_sympy():
    n = 3
    z1, z2, w = variables(n)
    comps = [z1 + Const(2) * z1 * w, z2 - Const(1j) * z1 * z1, z1 * z2 + w * w, z2 * w, w + z1 * z1 * w]
    order = 6
    r = mapping_residual(heis_map(n, 5, comps), order)
    a1, a2, b1, b2, u = sp.symbols("a1 a2 b1 b2 u")
    w_ = u + sp.I * (a1 * b1 + a2 * b2)
    wb = u - sp.I * (a1 * b1 + a2 * b2)
    hol = [a1 + 2 * a1 * w_, a2 - sp.I * a1**2, a1 * a2 + w_**2, a2 * w_, w_ + a1**2 * w_]
    ant = [b1 + 2 * b1 * wb, b2 + sp.I * b1**2, b1 * b2 + wb**2, b2 * wb, wb + b1**2 * wb]
    rho = sp.I / 2 * (hol[-1] - ant[-1]) + sum(h * g for h, g in zip(hol[:3], ant[:3])) - hol[3] * ant[3]
    t = sp.symbols("t")
    scaled = sp.expand(rho.subs({a1: t * a1, a2: t * a2, b1: t * b1, b2: t * b2, u: t**2 * u}, simultaneous=True))
    syms = (a1, a2, b1, b2, u)
    for k in range(order + 1):
        assert sp.expand(scaled.coeff(t, k) - poly_to_sympy(r.parts[k], syms)) == 0


def test_cayley_transport():
    for n, big_n in [(2, 3), (3, 5)]:
        assert mapping_residual(cayley_embedding(n, big_n), 8).is_zero


def _heisenberg_points(n, count, rng, radius=0.1):
    z = rng.normal(size=(count, n - 1)) + 1j * rng.normal(size=(count, n - 1))
    z *= radius / 2 / np.linalg.norm(z, axis=1, keepdims=True)
    u = rng.uniform(-radius / 2, radius / 2, count)
    w = u + 1j * (np.abs(z) ** 2).sum(1)
    return np.column_stack([z, w])


def test_flat_to_order_8_means_numerically_flat(rng):
    n = 3
    v = variables(n)
    maps = [linear_model(n, 5), psi_model(n, 5, v[0] * v[1]), cayley_embedding(n, 4)]
    p = _heisenberg_points(n, 100, rng)
    assert np.abs(defining_values(DomainSpec.heisenberg(n), p)).max() < 1e-15
    for f in maps:
        assert mapping_residual(f, 8).is_zero
        assert np.abs(defining_values(f.target, f.eval_batch(p))).max() < 1e-8
    broken = heis_map(n, 4, list(v[:-1]) + [v[0] * v[0], v[-1]])
    # the defining value is Im g - |f|^2_1, i.e. minus rho
    vals = defining_values(broken.target, broken.eval_batch(p))[:, 0]
    assert np.allclose(vals, np.abs(p[:, 0]) ** 4, rtol=1e-9, atol=1e-17)


# --- normal form ---------------------------------------------------------------


def test_normal_form_linear():
    r = normal_form_check(linear_model(3, 4))
    assert not any(r.a1) and not any(r.phi2) and r.constraint_holds and r.maps_hypersurface


def test_normal_form_psi():
    n = 3
    v = variables(n)
    r = normal_form_check(psi_model(n, n + 2))
    assert not any(r.a1)
    z1sq = expand(v[0] * v[0], n, 8).poly
    assert all(p == z1sq for p in r.phi2)
    assert not r.constraint_rhs and r.constraint_holds and not r.phi2_uses_w
    assert normal_form_check(psi_model(n, n + 2, v[-1])).phi2_uses_w


def test_normal_form_constraint_failure():
    n = 2
    z, w = variables(n)
    r = normal_form_check(heis_map(n, 3, [z + z * w, Const(0), w]))
    # f = z + (i/2) a1 w  with  a1 = -2i z
    assert r.a1[0].terms == {(1, 0): Exact(0, -2)}
    assert not r.constraint_holds and not r.maps_hypersurface
    # restricted ring (z, zbar, u): lhs = -2i |z|^4
    assert r.constraint_lhs.terms == {(2, 2, 0): Exact(0, -2)}


@pytest.mark.parametrize("comps", [
    lambda z, w: [z, Const(0), Const(2) * w],
    lambda z, w: [Const(2) * z, Const(0), w],
    lambda z, w: [z + z * z * z, Const(0), w],
    lambda z, w: [z, z, w],
])
def test_not_normal_form(comps):
    z, w = variables(2)
    with pytest.raises(NotNormalForm) as info:
        normal_form_check(heis_map(2, 3, comps(z, w)))
    assert info.value.jet is not None


def test_json():
    r = mapping_residual(linear_model(2, 3), 4).to_json()
    assert r["zero"] and len(r["parts"]) == 5
    assert normal_form_check(psi_model(3, 5)).to_json()["constraint_holds"]
