import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from typeiv.errors import DimensionMismatch, NotOrthonormal, NotSymmetric
from typeiv.linalg import (GroupTag, check_group_membership, extend_orthonormal_real, matrix_from_json,
                           matrix_to_json, takagi)


def random_symmetric(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a + a.T


def test_takagi_identity():
    r = takagi(np.eye(3))
    assert np.allclose(r.lambdas, 1.0)
    assert np.allclose(r.v.T @ np.eye(3) @ r.v, np.eye(3))


def test_takagi_sign_absorbed_by_phase():
    r = takagi(np.diag([2.0, -2.0]))
    assert np.allclose(r.lambdas, [2.0, 2.0])
    # the negative entry needs a factor i in its column
    assert np.allclose(np.abs(r.v), np.eye(2))
    assert np.allclose(r.v.T @ np.diag([2.0, -2.0]) @ r.v, 2 * np.eye(2))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_takagi_against_svd(n, seed):
    s = random_symmetric(np.random.default_rng(seed), n)
    r = takagi(s)
    scale = np.abs(s).max()
    assert np.abs(r.reconstruct() - s).max() <= 1e-10 * scale
    assert np.abs(r.v.conj().T @ r.v - np.eye(n)).max() <= 1e-10
    assert np.all(np.diff(r.lambdas) <= 1e-12)
    # Takagi values are the singular values
    assert np.allclose(r.lambdas, np.linalg.svd(s, compute_uv=False), atol=1e-10 * scale)


def test_takagi_degenerate_and_rank_deficient(rng):
    u = np.linalg.qr(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))[0]
    s = u @ np.diag([3.0, 1.0, 1.0, 0.0, 0.0]) @ u.T
    r = takagi(s)
    assert np.allclose(r.lambdas, [3, 1, 1, 0, 0], atol=1e-12)
    assert np.abs(r.v.T @ s @ r.v - np.diag(r.lambdas)).max() < 1e-12


def test_takagi_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        takagi(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(DimensionMismatch):
        takagi(np.zeros((2, 3)))


def test_membership_identity_and_isotropy(rng):
    for tag in (GroupTag.ball(3), GroupTag.type_iv(4), GroupTag.generalized_ball(2, 1)):
        ok, defect = check_group_membership(np.eye(tag.size), tag)
        assert ok and defect == 0.0
    a = np.linalg.qr(rng.standard_normal((4, 4)))[0]
    c, s = np.cos(0.4), np.sin(0.4)
    t = np.zeros((6, 6))
    t[:4, :4] = a
    t[4:, 4:] = [[c, -s], [s, c]]
    ok, defect = check_group_membership(t, GroupTag.type_iv(4), 1e-12)
    assert ok and defect < 1e-14


def test_membership_hyperbolic_block():
    m, t = 3, 0.7
    h = np.eye(m + 2)
    h[m - 1, m - 1] = h[m, m] = np.cosh(t)
    h[m - 1, m] = h[m, m - 1] = np.sinh(t)
    ok, defect = check_group_membership(h, GroupTag.type_iv(m), 1e-12)
    assert ok and defect < 1e-12
    bad = h.copy()
    bad[0, 0] = 1.1
    ok, defect = check_group_membership(bad, GroupTag.type_iv(m), 1e-12)
    assert not ok and defect > 0.1


def test_membership_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        check_group_membership(np.eye(3), GroupTag.type_iv(3))


def test_extend_orthonormal_real():
    e = np.eye(3)
    assert np.allclose(extend_orthonormal_real([e[0], e[1]]), e)
    v = np.array([1.0, 1.0, 0.0]) / np.sqrt(2)
    c = extend_orthonormal_real([v])
    assert np.allclose(c.T @ c, np.eye(3))
    assert np.allclose(c[:, 0], v)
    assert np.allclose(extend_orthonormal_real([], dim=2), np.eye(2))
    with pytest.raises(NotOrthonormal):
        extend_orthonormal_real([np.array([1.0, 1.0, 0.0])])


def test_matrix_json_round_trip(rng):
    m = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    d = matrix_to_json(m)
    assert d["rows"] == 2 and d["cols"] == 3 and len(d["re"]) == 6
    assert np.array_equal(matrix_from_json(d), m)
    with pytest.raises(DimensionMismatch):
        matrix_from_json({"rows": 2, "cols": 2, "re": [1.0]})
    with pytest.raises(ValueError):
        matrix_from_json({"rows": 1, "cols": 1, "re": [float("nan")]})
