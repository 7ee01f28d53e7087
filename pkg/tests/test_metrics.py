from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from typeiv.domains import DomainSpec, sample_interior
from typeiv.errors import DomainMismatch, NotInterior, TargetNotInterior
from typeiv.expr import Const, HoloMap, Var
from typeiv.maps import catalog_build, gk, itheta, izero, lembed, riv, whitney_iv
from typeiv.metrics import (boundary_check, expected_lambda, isometry_check, isometry_dimension_feasible,
                            metric_batch, metric_matrix, pullback_metric)


def sympy_metric(d: DomainSpec, point):
    """Levi form of -e log rho with z and zbar as independent symbols."""
    n = d.dim
    z = sp.symbols(f"z0:{n}")
    zb = sp.symbols(f"zb0:{n}")
    if d.kind == "UnitBall":
        rho, e = 1 - sum(a * b for a, b in zip(z, zb)), n + 1
    elif d.kind == "TypeIV":
        q = sum(a * a for a in z)
        qb = sum(b * b for b in zb)
        rho, e = 1 - sum(a * b for a, b in zip(z, zb)) + q * qb / 4, n
    else:
        l = d.l
        rho = 1 + sum(z[j] * zb[j] for j in range(l)) - sum(z[j] * zb[j] for j in range(l, n))
        e = 1
    phi = -e * sp.log(rho)
    subs = {**{z[j]: complex(point[j]) for j in range(n)}, **{zb[j]: complex(point[j]).conjugate() for j in range(n)}}
    return np.array([[complex(sp.diff(phi, z[j], zb[k]).evalf(subs=subs)) for k in range(n)] for j in range(n)])


def test_metric_at_origin():
    assert np.allclose(metric_matrix(DomainSpec.ball(3), np.zeros(3)).entries, 4 * np.eye(3))
    assert np.allclose(metric_matrix(DomainSpec.type_iv(4), np.zeros(4)).entries, 4 * np.eye(4))
    assert np.allclose(metric_matrix(DomainSpec.generalized_ball(2, 1), np.zeros(3)).entries, np.diag([-1, 1, 1]))


@pytest.mark.parametrize("d", [DomainSpec.ball(2), DomainSpec.type_iv(3), DomainSpec.generalized_ball(2, 1)])
def test_metric_against_sympy(d, rng):
    for p in sample_interior(d, 3, rng, 0.7):
        assert np.allclose(metric_matrix(d, p).entries, sympy_metric(d, p), rtol=1e-10, atol=1e-12)


def test_metric_is_hermitian_positive(rng):
    for d in (DomainSpec.ball(3), DomainSpec.type_iv(3)):
        g = metric_batch(d, sample_interior(d, 30, rng, 0.9))
        assert np.abs(g - g.conj().transpose(0, 2, 1)).max() < 1e-12 * np.abs(g).max()
        assert (np.linalg.eigvalsh(g) > 0).all()
    with pytest.raises(NotInterior):
        metric_batch(DomainSpec.ball(2), np.array([[1.0, 0.0]]))


def test_pullback_examples():
    assert np.allclose(pullback_metric(lembed(3), np.zeros(3)).entries, np.eye(3))
    const = HoloMap(DomainSpec.ball(2), DomainSpec.type_iv(2), (Const(0.1), Const(0)))
    assert np.allclose(pullback_metric(const, np.array([0.1, 0.2])).entries, 0)
    p = np.array([0.1, 0.2])
    assert np.allclose(pullback_metric(izero(2), p).entries, metric_matrix(DomainSpec.ball(2), p).entries)
    far = HoloMap(DomainSpec.ball(1), DomainSpec.type_iv(1), (Const(2.0) + Var(0),))
    with pytest.raises(TargetNotInterior):
        pullback_metric(far, np.array([0.0]))


def test_isometry_verdicts():
    v = isometry_check(riv(3), 1.0, samples=200, seed=0)
    assert v.passed and v.max_residual < 1e-9 and v.samples == 200
    assert isometry_check(itheta(3, 0.3), 1.0).passed
    assert isometry_check(catalog_build("flat:n=2,m=4"), 4 / 3).passed
    assert isometry_check(lembed(4), 0.25).passed
    bad = isometry_check(gk(2), 1.0)
    assert not bad.passed and bad.max_residual > 1e-3
    assert not isometry_check(whitney_iv(3), 1.5).passed
    assert set(v.to_json()) >= {"lambda", "samples", "seed", "max_residual", "pass", "normalization"}
    with pytest.raises(DomainMismatch):
        isometry_check(HoloMap(DomainSpec.heisenberg(2), DomainSpec.ball(2), (Var(0), Var(1))), 1.0)


def test_isometry_check_is_deterministic():
    a = isometry_check(riv(2), 1.0, seed=7)
    b = isometry_check(riv(2), 1.0, seed=7)
    assert np.array_equal(a.residuals, b.residuals)


def test_boundary_check():
    assert boundary_check(whitney_iv(3)).passed
    assert boundary_check(riv(2)).passed
    assert boundary_check(gk(2)).passed  # proper, though not an isometry
    half = HoloMap(DomainSpec.ball(2), DomainSpec.type_iv(2), (Const(0.5) * Var(0), Const(0.5) * Var(1)))
    assert not boundary_check(half).passed


def test_expected_lambda_and_feasibility():
    assert expected_lambda(4, 5) == {Fraction(1)}
    assert expected_lambda(1, 2) == {Fraction(1), Fraction(2)}
    assert expected_lambda(2, 3) == {Fraction(1)}
    assert isometry_dimension_feasible(3, 4)
    assert not isometry_dimension_feasible(4, 4)
    assert isometry_dimension_feasible(1, 2)
