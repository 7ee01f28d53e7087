"""The eight acceptance checks, shared by the ``suite`` command and the test suite."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import product
from math import comb

import numpy as np

from .classify import classify_map, equivalence_witness, reconstruct_map, witness_residual
from .domains import DomainSpec, classify_point, sample_interior, sample_sphere, sample_type_iv_boundary
from .errors import EvaluationError
from .expr import HoloMap, variables
from .groups import apply, automorphism_map, ball_rotation, random_automorphism, random_orthogonal, random_unitary
from .groups import rotation2, typeIV_isotropy
from .hforms import TYPE_IV_KERNEL, form_from_map, power_signature, signature
from .jets import cayley_embedding, linear_model, mapping_residual, normal_form_check, psi_model
from .linalg import GroupTag, check_group_membership, takagi
from .maps import catalog_build, compose_autos, flat, gk, itheta, lembed, riv, whitney_iv
from .metrics import _metric_batch, boundary_check, isometry_check, log_potential, metric_batch, pullback_metric


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"criterion {self.number} [{'PASS' if self.passed else 'FAIL'}] {self.name} ({self.seconds:.2f}s)"

    def to_json(self) -> dict:
        # timing stays out so reports are reproducible byte for byte
        return {"number": self.number, "name": self.name, "pass": self.passed, "details": self.details}


def _timed(number, name, fn, seed):
    t0 = time.perf_counter()
    ok, details = fn(seed)
    return CriterionResult(number, name, bool(ok), time.perf_counter() - t0, details)


# 1 ---------------------------------------------------------------------------


def isometry_constants(seed: int = 0):
    t0 = time.perf_counter()
    cases = [riv(n) for n in (2, 3, 4)]
    cases += [itheta(n, t) for n in (2, 3) for t in (0.0, math.pi / 12, math.pi / 6)]
    cases += [flat(2, 4), flat(3, 5)]
    worst, fails = {}, []
    for f in cases:
        lam = f.target.m / (f.source.n + 1)
        v = isometry_check(f, lam, samples=200, seed=seed, tol=1e-9)
        worst[f.name] = v.max_residual
        if not v.passed:
            fails.append(f.name)
    lem = {}
    for m in (2, 3, 4):
        pb = pullback_metric(lembed(m), np.zeros(m)).entries
        ref = metric_batch(DomainSpec.type_iv(m), np.zeros((1, m)))[0] / m
        lem[m] = float(max(np.abs(pb - np.eye(m)).max(), np.abs(ref - np.eye(m)).max()))
    elapsed = time.perf_counter() - t0
    ok = not fails and max(lem.values()) <= 1e-12 and elapsed <= 10.0
    return ok, {"max_residual": max(worst.values()), "failed": fails, "lembed_defect": max(lem.values()),
                "within_time_budget": elapsed <= 10.0}


# 2 ---------------------------------------------------------------------------


def separation(seed: int = 0):
    w = whitney_iv(3)
    bv = boundary_check(w, samples=200, seed=seed, tol=1e-9)
    iv = isometry_check(w, 2 * 3 / 4, samples=200, seed=seed)
    g = [isometry_check(gk(2), lam, samples=200, seed=seed) for lam in (1.0, 2.0)]
    ok = bv.passed and not iv.passed and iv.max_residual >= 1e-3 and not any(v.passed for v in g)
    return ok, {"whitney_boundary": bv.max_residual, "whitney_isometry": iv.max_residual,
                "gk2_residuals": [v.max_residual for v in g]}


# 3 ---------------------------------------------------------------------------


def _fold(theta):
    if abs(theta - math.pi / 4) <= 1e-7:
        return "rational", None
    return "irrational", theta if theta < math.pi / 4 else math.pi / 2 - theta


def classification_round_trip(seed: int = 0, conjugations: int = 20):
    rng = np.random.default_rng(seed)
    thetas = (0.0, math.pi / 12, math.pi / 6, math.pi / 4, math.pi / 3)
    worst, bad = 0.0, []
    for n, th in product((2, 3, 4), thetas):
        case, beta = _fold(th)
        f = reconstruct_map(n, th)
        for k in range(conjugations + 1):
            g = f
            if k:
                pre = ball_rotation(random_unitary(n, rng))
                post = typeIV_isotropy(random_orthogonal(n + 1, rng), rotation2(rng.uniform(-np.pi, np.pi)))
                g = compose_autos(pre, f, post)
            cf = classify_map(g).canonical
            err = 0.0 if beta is None else abs(cf.beta - beta)
            worst = max(worst, err)
            if cf.case != case or (beta is not None and err > 1e-8):
                bad.append((n, th, k))
    return not bad, {"max_beta_error": worst, "failures": bad[:5]}


# 4 ---------------------------------------------------------------------------


def witness_certification(seed: int = 0):
    out = {}
    ok = True
    for n, th in product((2, 3), (math.pi / 12, math.pi / 6, math.pi / 5)):
        w = equivalence_witness(n, th)
        okb, db = check_group_membership(w.b, GroupTag.indefinite_unitary((1,) * n + (-1,)), 1e-12)
        okt, dt = check_group_membership(w.t, GroupTag.type_iv(n + 1), 1e-12)
        r = witness_residual(w, samples=100, seed=seed)
        out[f"n={n},theta={th:.6f}"] = {"b_defect": db, "t_defect": dt, "intertwining": r}
        ok = ok and okb and okt and r <= 1e-9
    return ok, out


# 5 ---------------------------------------------------------------------------


def power_signature_oracle(n: int, p: int) -> tuple:
    """Counts from the diagonal coefficients ``(-1)^|a| C(p, |a|) |a|! / a!`` on monomials ``|a| <= p``."""
    pos = neg = 0
    for k in range(p + 1):
        count = comb(n + k - 1, k)
        if k % 2:
            neg += count
        else:
            pos += count
    return pos, neg, 0


def signature_suite(seed: int = 0):
    table, ok = {}, True
    for n, p in product((2, 3, 4), (2, 3, 4)):
        s = power_signature(n, p).as_tuple()
        table[f"{n},{p}"] = list(s)
        ok = ok and s[0] >= 3 and s == power_signature_oracle(n, p)
    s22 = power_signature(2, 2).as_tuple()
    ex = signature(form_from_map(catalog_build("Exhp0:n=2"), TYPE_IV_KERNEL))
    ok = ok and s22 == (4, 2, 0) and ex.negatives >= 1
    return ok, {"power": table, "exhp0": ex.to_json()}


# 6 ---------------------------------------------------------------------------


def _boundary_samples(d: DomainSpec, rng, count):
    if d.kind == DomainSpec.ball(1).kind:
        return sample_sphere(rng, count, d.n)
    if d.kind == DomainSpec.type_iv(1).kind:
        return sample_type_iv_boundary(rng, count, d.m)
    w = 0.5 * (rng.standard_normal((count, d.l)) + 1j * rng.standard_normal((count, d.l)))
    z = sample_sphere(rng, count, d.n) * np.sqrt(1 + (np.abs(w) ** 2).sum(1))[:, None]
    return np.concatenate([w, z], axis=1)


def group_invariance(seed: int = 0, elements: int = 20, samples: int = 200):
    rng = np.random.default_rng(seed)
    domains = [DomainSpec.ball(3), DomainSpec.generalized_ball(2, 1), DomainSpec.type_iv(3), DomainSpec.type_iv(4)]
    report, ok = {}, True
    for d in domains:
        worst_metric, mismatches = 0.0, 0
        for k in range(elements):
            a = random_automorphism(d, rng)
            v = isometry_check(automorphism_map(a), 1.0, samples=samples, seed=seed + k, tol=1e-8, radius=0.8)
            worst_metric = max(worst_metric, v.max_residual)
            pts = np.concatenate([sample_interior(d, samples // 2, rng, 0.8), _boundary_samples(d, rng, samples // 2)])
            for p in pts:
                try:
                    q = apply(a, p)
                except EvaluationError:
                    continue
                if classify_point(d, p).tag != classify_point(d, q).tag:
                    mismatches += 1
        report[str(d)] = {"metric": worst_metric, "class_mismatches": mismatches}
        ok = ok and worst_metric <= 1e-8 and mismatches == 0
    lift_err = 0.0
    for m in (2, 3, 5):
        z = sample_interior(DomainSpec.type_iv(m), 50, rng, 0.9)
        a = random_orthogonal(m, rng)
        lift_err = max(lift_err, float(np.abs(apply(typeIV_isotropy(a, np.eye(2)), z) - z @ a).max()))
    report["isotropy_lift"] = lift_err
    return ok and lift_err <= 1e-12, report


# 7 ---------------------------------------------------------------------------


def jet_suite(seed: int = 0, order: int = 8):
    n = 4
    v = variables(n)
    flat_maps = [linear_model(n, n + 1), cayley_embedding(n, n + 1)]
    flat_maps += [psi_model(n, n + 2, psi) for psi in (v[0] * v[0], v[0] * v[1], v[-1])]
    zero = {f.name: mapping_residual(f, order).is_zero for f in flat_maps}
    broken = HoloMap(DomainSpec.heisenberg(n), DomainSpec.heisenberg_sig1(n + 1), tuple(v[:-1]) + (v[0] * v[0], v[-1]))
    r = mapping_residual(broken, order)
    detected = r.first_nonzero() == 4 and r.parts[4].terms == {(2, 0, 0, 2, 0, 0, 0): -1}
    nf = {f.name: normal_form_check(f, order).constraint_holds for f in flat_maps}
    ok = all(zero.values()) and detected and all(nf.values())
    return ok, {"residual_zero": zero, "broken_detected": detected, "constraint_holds": nf}


# 8 ---------------------------------------------------------------------------


def _fd_jacobian(f: HoloMap, z, h=1e-6):
    cols = []
    for j in range(len(z)):
        e = np.zeros(len(z), complex)
        e[j] = h
        cols.append((f(z + e) - f(z - e)) / (2 * h))
    return np.stack(cols, axis=1)


def _fd_levi(d: DomainSpec, z, h=1e-3):
    """Wirtinger Hessian ``d_j dbar_k`` of ``-e log rho``: central differences with one Richardson step."""
    return (4 * _fd_levi_once(d, z, h / 2) - _fd_levi_once(d, z, h)) / 3


def _fd_levi_once(d: DomainSpec, z, h):
    n = len(z)
    phi = lambda p: float(log_potential(d, p[None, :])[0])  # noqa: E731
    out = np.zeros((n, n), complex)
    dirs = [np.eye(n)[j] for j in range(n)]
    for j, k in product(range(n), range(n)):
        def mixed(a, b):
            return (phi(z + h * a + h * b) - phi(z + h * a - h * b) - phi(z - h * a + h * b) + phi(z - h * a - h * b)) / (4 * h * h)
        xx = mixed(dirs[j], dirs[k])
        yy = mixed(1j * dirs[j], 1j * dirs[k])
        xy = mixed(dirs[j], 1j * dirs[k])
        yx = mixed(1j * dirs[j], dirs[k])
        out[j, k] = 0.25 * (xx + yy + 1j * (xy - yx))
    return out


def oracle_cross_checks(seed: int = 0):
    rng = np.random.default_rng(seed)
    keys = ["RIV:n=3", "Itheta:n=3,theta=pi/6", "Izero:n=3", "L:m=3", "flat:n=2,m=4", "whitneyIV:n=3", "Gk:k=2",
            "Exhp0:n=2", "ClassB:n=2", "PsiDegenerate:n=2,m=3"]
    jac_err = 0.0
    for key in keys:
        f = catalog_build(key)
        for z in sample_interior(f.source, 20, rng, 0.6):
            fd = _fd_jacobian(f, z)
            jac_err = max(jac_err, float(np.abs(f.jacobian(z) - fd).max() / max(1.0, np.abs(fd).max())))
    met_err = 0.0
    for d in (DomainSpec.ball(3), DomainSpec.generalized_ball(2, 1), DomainSpec.type_iv(3)):
        for z in sample_interior(d, 20, rng, 0.6):
            g = _metric_batch(d, z[None, :])[0]
            fd = _fd_levi(d, z)
            met_err = max(met_err, float(np.abs(g - fd).max() / max(1.0, np.abs(g).max())))
    tk_err = 0.0
    for k in range(100):
        size = 1 + k % 8
        a = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        s = a + a.T
        tk_err = max(tk_err, float(np.abs(takagi(s).reconstruct() - s).max() / max(1.0, np.abs(s).max())))
    ok = jac_err <= 1e-6 and met_err <= 1e-6 and tk_err <= 1e-9
    return ok, {"jacobian": jac_err, "metric": met_err, "takagi": tk_err}


CRITERIA = (
    (1, "isometry constants", isometry_constants),
    (2, "properness vs isometry separation", separation),
    (3, "classification round trip", classification_round_trip),
    (4, "witness certification", witness_certification),
    (5, "signature suite", signature_suite),
    (6, "group and metric invariance", group_invariance),
    (7, "jet suite", jet_suite),
    (8, "oracle cross-checks", oracle_cross_checks),
)


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    num, name, fn = CRITERIA[number - 1]
    return _timed(num, name, fn, seed)


def run_all(seed: int = 0) -> list:
    return [_timed(num, name, fn, seed) for num, name, fn in CRITERIA]
