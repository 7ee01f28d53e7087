"""Command line: batch checks with JSON reports.

Exit codes: 0 when the check passes, 1 when it fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .acceptance import run_all
from .classify import classify_map, equivalence_witness, normalize_unitary, witness_residual
from .domains import GENERALIZED_BALL, TYPE_IV, UNIT_BALL, point_from_json, point_to_json
from .errors import (DimensionMismatch, DomainMismatch, InvalidElement, NotIsometry, NotNormalForm, NotNormalized,
                     NotUnitary, ParameterOutOfRange, RecoveryFailed, StructureViolation, TypeIVError)
from .expr import HoloMap, variables
from .groups import Automorphism, apply
from .hforms import HermitianForm, power_signature, signature
from .jets import cayley_embedding, linear_model, mapping_residual, psi_model
from .linalg import matrix_from_json, matrix_to_json
from .maps import catalog_list, load_map, parse_angle
from .metrics import NORMALIZATION, boundary_check, expected_lambda, isometry_check

# errors that mean "the object under test failed", as opposed to bad input
CHECK_FAILURES = (NotIsometry, NotNormalized, StructureViolation, RecoveryFailed, NotNormalForm, NotUnitary)


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    samples: int = 200
    tol: float = 1e-9
    radius: float = 0.9
    order: int = 8
    out: str | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise InputError("--samples must be at least 1")
        if not 0.0 < self.radius < 1.0:
            raise InputError("--radius must lie in (0, 1)")
        if not self.tol > 0.0:
            raise InputError("--tol must be positive")
        if self.order < 0:
            raise InputError("--order must be nonnegative")

    def to_json(self) -> dict:
        return asdict(self)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from None


def parse_point(text: str) -> np.ndarray:
    """Comma separated complex literals (``0.1,0.2+0.1j``) or a point JSON file."""
    if text.endswith(".json"):
        return point_from_json(_read_json(text))
    try:
        return np.array([complex(t.strip().replace(" ", "")) for t in text.split(",")], dtype=complex)
    except ValueError:
        raise InputError(f"cannot read point {text!r}") from None


def _map(spec: str) -> HoloMap:
    if spec.endswith(".json"):
        return HoloMap.from_json(_read_json(spec))
    return load_map(spec)


# --- subcommands ---------------------------------------------------------------


def cmd_catalog(args, cfg):
    if args.action == "list":
        return True, {"maps": catalog_list()}
    if not args.map or args.point is None:
        raise InputError("catalog eval needs a map and --point")
    f = _map(args.map)
    z = parse_point(args.point)
    return True, {"map": f.name, "point": point_to_json(z), "value": point_to_json(f(z)),
                  "jacobian": matrix_to_json(f.jacobian(z))}


def _auto_lambda(f: HoloMap) -> list:
    if f.source.kind == UNIT_BALL and f.target.kind == TYPE_IV:
        return sorted(float(x) for x in expected_lambda(f.source.n, f.target.m))
    if f.source.kind == TYPE_IV and f.target.kind == GENERALIZED_BALL:
        return [float(Fraction(1, f.source.m))]
    raise InputError(f"no automatic lambda for {f.source} -> {f.target}")


def cmd_verify(args, cfg):
    f = _map(args.map)
    if args.what == "proper":
        v = boundary_check(f, cfg.samples, cfg.seed, cfg.tol)
        return v.passed, {"map": f.name, "verdict": v.to_json()}
    if args.lam is None or args.lam == "auto":
        lams = _auto_lambda(f)
    else:
        try:
            lams = [float(args.lam)]
        except ValueError:
            raise InputError(f"--lambda must be a number or 'auto', got {args.lam!r}") from None
    verdicts = [isometry_check(f, lam, cfg.samples, cfg.seed, cfg.tol, cfg.radius) for lam in lams]
    best = min(verdicts, key=lambda v: v.max_residual)
    return best.passed, {"map": f.name, "lambda_candidates": lams, "verdict": best.to_json()}


def cmd_classify(args, cfg):
    if args.target.endswith(".json"):
        data = _read_json(args.target)
        if isinstance(data, dict) and "components" not in data:
            u = matrix_from_json(data.get("unitary", data))
            cf = normalize_unitary(u, max(cfg.tol, 1e-8))
            return True, cf.to_json()
    f = _map(args.target)
    c = classify_map(f, max(cfg.tol, 1e-8), cfg.seed)
    return True, c.to_json()


def cmd_witness(args, cfg):
    w = equivalence_witness(args.n, parse_angle(args.theta))
    r = witness_residual(w, min(cfg.samples, 1000), cfg.seed)
    return r <= cfg.tol, {"witness": w.to_json(), "intertwining_residual": r}


def cmd_signature(args, cfg):
    if args.power:
        n, p = args.power
        if n < 1 or p < 1:
            raise InputError("--power needs positive n and p")
        s = power_signature(n, p, cfg.tol)
    elif args.form:
        s = signature(HermitianForm.from_json(_read_json(args.form)), cfg.tol)
    else:
        raise InputError("signature needs --power n p or --form file")
    return True, s.to_json()


def cmd_aut(args, cfg):
    data = _read_json(args.file)
    try:
        a = Automorphism.from_json(data)
    except InvalidElement as e:
        return False, {"valid": False, "reason": str(e)}
    if args.action == "check":
        return True, {"valid": True, "group": a.group, "defect": a.defect}
    if args.point is None:
        raise InputError("aut apply needs --point")
    z = parse_point(args.point)
    return True, {"group": a.group, "point": point_to_json(z), "image": point_to_json(apply(a, z))}


def _jet_map(spec: str) -> HoloMap:
    """``linear:n=..,N=..``, ``cayley:n=..,N=..``, ``psi:n=..,N=..[,psi=z1^2|z1z2|w]`` or a map JSON file."""
    if spec.endswith(".json"):
        return HoloMap.from_json(_read_json(spec))
    name, _, rest = spec.partition(":")
    params = dict(item.split("=", 1) for item in filter(None, rest.split(",")))
    try:
        n, big_n = int(params["n"]), int(params["N"])
    except (KeyError, ValueError):
        raise InputError(f"jet map {spec!r} needs integer n and N") from None
    if name == "linear":
        return linear_model(n, big_n)
    if name == "cayley":
        return cayley_embedding(n, big_n)
    if name == "psi":
        v = variables(n)
        choices = {"z1^2": v[0] * v[0], "z1z2": v[0] * v[1] if n > 2 else None, "w": v[-1]}
        psi = choices.get(params.get("psi", "z1^2"))
        if psi is None:
            raise InputError(f"unknown psi {params.get('psi')!r}")
        return psi_model(n, big_n, psi)
    raise InputError(f"unknown jet map {name!r}")


def cmd_jet(args, cfg):
    f = _jet_map(args.map)
    r = mapping_residual(f, cfg.order)
    return r.is_zero, {"map": f.name, "residual": r.to_json()}


def cmd_suite(args, cfg):
    results = run_all(cfg.seed)
    for r in results:
        print(r.line(), file=sys.stderr)
    return all(r.passed for r in results), {"criteria": [r.to_json() for r in results]}


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=200)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--radius", type=float, default=0.9)
    common.add_argument("--order", type=int, default=8)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="typeiv", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", parents=[common], help="list or evaluate catalog maps")
    c.add_argument("action", choices=["list", "eval"])
    c.add_argument("map", nargs="?")
    c.add_argument("--point")
    c.set_defaults(func=cmd_catalog)

    v = sub.add_parser("verify", parents=[common], help="isometry or boundary check")
    v.add_argument("what", choices=["isometry", "proper"])
    v.add_argument("map")
    v.add_argument("--lambda", dest="lam", default=None, help="number or 'auto'")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("classify", parents=[common], help="classify an isometry or a unitary matrix")
    k.add_argument("target")
    k.set_defaults(func=cmd_classify)

    w = sub.add_parser("witness", parents=[common], help="equivalence witness for I_{n,theta}")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--theta", required=True)
    w.set_defaults(func=cmd_witness)

    s = sub.add_parser("signature", parents=[common], help="signature of a Hermitian form")
    s.add_argument("--power", type=int, nargs=2, metavar=("N", "P"))
    s.add_argument("--form")
    s.set_defaults(func=cmd_signature)

    a = sub.add_parser("aut", parents=[common], help="validate or apply an automorphism")
    a.add_argument("action", choices=["check", "apply"])
    a.add_argument("file")
    a.add_argument("--point")
    a.set_defaults(func=cmd_aut)

    j = sub.add_parser("jet", parents=[common], help="exact mapping residual on Heisenberg models")
    j.add_argument("action", choices=["residual"])
    j.add_argument("map")
    j.set_defaults(func=cmd_jet)

    u = sub.add_parser("suite", parents=[common], help="run every acceptance check")
    u.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    config = None
    try:
        config = RunConfig(args.seed, args.samples, args.tol, args.radius, args.order, args.out)
        passed, result = args.func(args, config)
        code = 0 if passed else 1
    except CHECK_FAILURES as e:
        passed, result, code = False, {"error": type(e).__name__, "message": str(e)}, 1
    except (InputError, DimensionMismatch, DomainMismatch, ParameterOutOfRange, TypeIVError, ValueError,
            KeyError, TypeError) as e:
        print(f"typeiv: error: {e}", file=sys.stderr)
        return 2
    report = {"version": __version__, "command": args.command, "config": config.to_json(),
              "normalization": NORMALIZATION, "pass": passed, "result": result}
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if config.out:
        try:
            with open(config.out, "w") as fh:
                fh.write(text)
        except OSError as e:
            print(f"typeiv: error: {e}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return code


__all__ = ["RunConfig", "build_parser", "main", "parse_point"]
