import math

import numpy as np
import pytest

from typeiv.domains import DomainSpec, sample_interior, sample_sphere
from typeiv.errors import DomainMismatch, ParameterOutOfRange, Pole
from typeiv.expr import Var, variables
from typeiv.groups import ball_rotation, identity, random_unitary, typeIV_isotropy
from typeiv.maps import (CatalogKey, catalog_build, catalog_list, class_a, class_b, compose_autos, exhp0, flat, gk,
                         itheta, izero, kernel_identity_residual, load_map, parse_angle, psi_degenerate, riv,
                         whitney_iv, with_sqrt_closure)


def fd_jacobian(f, z, h=1e-6):
    return np.stack([(f(z + h * e) - f(z - h * e)) / (2 * h) for e in np.eye(len(z))], axis=1)


def test_parse_angle_and_keys():
    assert parse_angle("pi/6") == pytest.approx(math.pi / 6)
    assert parse_angle("2pi/5") == pytest.approx(2 * math.pi / 5)
    assert parse_angle("0.25") == 0.25
    k = CatalogKey.parse("itheta:n=3,theta=pi/12")
    assert k.family == "Itheta" and k.get("n") == 3 and k.get("theta") == pytest.approx(math.pi / 12)
    for bad in ("Nope:n=2", "RIV:n", "RIV:n=x"):
        with pytest.raises(ParameterOutOfRange):
            CatalogKey.parse(bad)


def test_catalog_builds_every_listed_key():
    for key in catalog_list():
        f = catalog_build(key)
        assert f.name and len(f.components) == f.target.dim
    assert load_map("RIV:n=2") == riv(2)


def test_parameter_ranges():
    for bad in (lambda: riv(1), lambda: itheta(2, 0.9), lambda: flat(2, 3), lambda: whitney_iv(1), lambda: gk(0)):
        with pytest.raises(ParameterOutOfRange):
            bad()


def test_point_values():
    assert np.allclose(riv(2)(np.zeros(2)), 0)
    assert np.allclose(izero(3)(np.array([0.3, 0, 0.4])), [0.3, 0, 1 - math.sqrt(0.75), 0.4])
    assert riv(2)(np.array([0, 0.5]))[1] == pytest.approx(0.25 * math.sqrt(2))
    assert np.allclose(gk(1)(np.array([0.6])), [0.6, 0.2])
    with pytest.raises(Pole):
        riv(2)(np.array([0, 1.0]))


def test_itheta_zero_is_izero_up_to_order(rng):
    z = sample_interior(DomainSpec.ball(2), 50, rng, 0.9)
    a, b = itheta(2, 0.0).eval_batch(z), izero(2).eval_batch(z)
    assert np.allclose(np.sort_complex(a), np.sort_complex(b))


def test_jacobians():
    assert np.allclose(gk(1).jacobian(np.array([0.0])), [[1.0], [0.0]])
    p = np.array([0.3, 0.4])
    assert np.allclose(izero(2).jacobian(p), fd_jacobian(izero(2), p), atol=1e-7)


@pytest.mark.parametrize("f", [izero(2), izero(4), flat(2, 4), flat(3, 5), riv(3), itheta(3, 0.4), class_a(3),
                               class_b(3)])
def test_kernel_identity_for_isometries(f, rng):
    z = sample_interior(f.source, 100, rng, 0.9)
    assert kernel_identity_residual(f, z).max() < 1e-12


def test_gk_kernel_identity_fails():
    assert kernel_identity_residual(gk(2), np.array([0.5])) == pytest.approx(0.1875)
    assert kernel_identity_residual(gk(2), np.array([0.5]), p=2) > 0
    with pytest.raises(DomainMismatch):
        kernel_identity_residual(catalog_build("L:m=3"), np.zeros(3))


def test_whitney_identity(rng):
    n = 3
    f = whitney_iv(n)
    for z in (sample_interior(f.source, 100, rng, 0.9), sample_sphere(rng, 200, n)):
        g = f.eval_batch(z)
        lhs = (np.abs(g) ** 2).sum(1) - 0.25 * np.abs((g * g).sum(1)) ** 2
        nz = (np.abs(z) ** 2)
        rhs = nz[:, :-1].sum(1) + nz[:, -1] * nz.sum(1)
        assert np.abs(lhs - rhs).max() < 1e-10
    s = sample_sphere(rng, 200, n)
    g = f.eval_batch(s)
    assert np.allclose((np.abs(g) ** 2).sum(1) - 0.25 * np.abs((g * g).sum(1)) ** 2, 1.0, atol=1e-10)


def test_sqrt_closure_identity(rng):
    z = variables(2)
    f = with_sqrt_closure((z[0], z[0] * z[1], z[1] ** 2 * 0.5), DomainSpec.ball(2))
    p = sample_interior(f.source, 50, rng, 0.8)
    g = f.eval_batch(p)
    h = g[:, :-1]
    lhs = (np.abs(g) ** 2).sum(1) - 0.25 * np.abs((g * g).sum(1)) ** 2
    assert np.allclose(lhs, (np.abs(h) ** 2).sum(1))


def test_exhp0_kernel_value(rng):
    f = exhp0(2)
    z = sample_interior(f.source, 50, rng, 0.9)
    g = f.eval_batch(z)
    val = (np.abs(g) ** 2).sum(1) - 0.25 * np.abs((g * g).sum(1)) ** 2
    nz = (np.abs(z) ** 2).sum(1)
    assert np.allclose(val, nz - 0.25 * np.abs(z[:, 1]) ** 4 * (1 - nz))


def test_psi_degenerate_on_type_iv_boundary(rng):
    f = psi_degenerate(2, 3, Var(0) * Var(1))
    g = f.eval_batch(sample_interior(f.source, 20, rng, 0.9))
    rho = 1 - (np.abs(g) ** 2).sum(1) + 0.25 * np.abs((g * g).sum(1)) ** 2
    assert np.allclose(rho, 0.0)


def test_compose_autos(rng):
    f = izero(2)
    z = sample_interior(f.source, 20, rng, 0.9)
    same = compose_autos(identity(f.source), f, identity(f.target))
    assert np.allclose(same.eval_batch(z), f.eval_batch(z))
    flip = typeIV_isotropy(np.diag([1.0, 1.0, -1.0]), np.eye(2))
    assert np.allclose(compose_autos(None, riv(2), flip).eval_batch(z), class_a(2).eval_batch(z))
    rot = compose_autos(ball_rotation(random_unitary(2, rng)), f, None)
    assert kernel_identity_residual(rot, z).max() < 1e-12
    with pytest.raises(DomainMismatch):
        compose_autos(identity(DomainSpec.ball(3)), f, None)
