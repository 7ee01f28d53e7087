import json
import math

import numpy as np
import pytest

from typeiv.cli import RunConfig, InputError, main, parse_point
from typeiv.domains import DomainSpec
from typeiv.groups import random_automorphism
from typeiv.linalg import matrix_to_json
from typeiv.classify import canonical_unitary


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out else None
    return code, report, out.err


def test_verify_isometry_auto_lambda(capsys):
    code, rep, _ = run(capsys, "verify", "isometry", "RIV:n=3", "--lambda", "auto")
    assert code == 0 and rep["pass"]
    assert rep["result"]["lambda_candidates"] == [1.0]
    assert rep["result"]["verdict"]["max_residual"] < 1e-9
    assert rep["config"]["seed"] == 0 and rep["command"] == "verify"


def test_verify_failures_exit_one(capsys):
    code, rep, _ = run(capsys, "verify", "isometry", "Gk:k=2", "--lambda", "1")
    assert code == 1 and not rep["pass"]
    code, rep, _ = run(capsys, "verify", "proper", "whitneyIV:n=3")
    assert code == 0 and rep["pass"]


def test_classify_itheta(capsys):
    code, rep, _ = run(capsys, "classify", "Itheta:n=2,theta=0.2618")
    cf = rep["result"]["canonical"]
    assert code == 0 and cf["case"] == "irrational"
    assert cf["beta"] == pytest.approx(0.2618, abs=1e-8)
    assert rep["result"]["final_class"] == "ClassB"


def test_classify_unitary_file(capsys, tmp_path):
    path = tmp_path / "u.json"
    path.write_text(json.dumps({"unitary": matrix_to_json(canonical_unitary(2, math.pi / 4))}))
    code, rep, _ = run(capsys, "classify", str(path))
    assert code == 0 and rep["result"]["case"] == "rational"


def test_signature_power(capsys):
    code, rep, _ = run(capsys, "signature", "--power", "2", "2")
    assert code == 0 and rep["result"] == {"pos": 4, "neg": 2, "zero": 0}


def test_witness(capsys):
    code, rep, _ = run(capsys, "witness", "--n", "3", "--theta", "pi/6")
    assert code == 0 and rep["result"]["intertwining_residual"] < 1e-9


def test_aut_roundtrip(capsys, tmp_path):
    a = random_automorphism(DomainSpec.type_iv(3), np.random.default_rng(4))
    path = tmp_path / "a.json"
    path.write_text(json.dumps(a.to_json()))
    code, rep, _ = run(capsys, "aut", "check", str(path))
    assert code == 0 and rep["result"]["valid"]
    code, rep, _ = run(capsys, "aut", "apply", str(path), "--point", "0.1,0.2j,0")
    assert code == 0 and len(rep["result"]["image"]["re"]) == 3


def test_jet_residual(capsys):
    code, rep, _ = run(capsys, "jet", "residual", "psi:n=3,N=5,psi=z1z2", "--order", "6")
    assert code == 0 and rep["result"]["residual"]["zero"]
    code, rep, _ = run(capsys, "jet", "residual", "cayley:n=2,N=3")
    assert code == 0


def test_catalog(capsys):
    code, rep, _ = run(capsys, "catalog", "list")
    assert code == 0 and "RIV:n=2" in rep["result"]["maps"]
    code, rep, _ = run(capsys, "catalog", "eval", "Izero:n=2", "--point", "0,0")
    assert code == 0 and rep["result"]["value"] is not None


@pytest.mark.parametrize("argv", [
    ["verify", "isometry", "Bogus:n=2"],
    ["verify", "isometry", "RIV:n=2", "--samples", "0"],
    ["verify", "isometry", "RIV:n=2", "--radius", "1.5"],
    ["verify", "isometry", "RIV:n=2", "--lambda", "abc"],
    ["signature"],
    ["witness", "--n", "2", "--theta", "1.0"],
    ["catalog", "eval", "RIV:n=2"],
    ["aut", "check", "/nonexistent.json"],
    ["nosuchcommand"],
    ["jet", "residual", "psi:n=2"],
])
def test_input_errors_exit_two(capsys, argv):
    assert main(argv) == 2


def test_deterministic_and_out(capsys, tmp_path):
    argv = ["verify", "isometry", "Itheta:n=2,theta=pi/6", "--lambda", "auto", "--seed", "3"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
    out = tmp_path / "r.json"
    assert main(argv + ["--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    saved = json.loads(out.read_text())
    assert saved["result"] == json.loads(first)["result"]


def test_run_config_validation():
    with pytest.raises(InputError):
        RunConfig(tol=0.0)
    assert RunConfig().to_json()["samples"] == 200


def test_parse_point():
    assert np.allclose(parse_point("0.1, 0.2+0.1j"), [0.1, 0.2 + 0.1j])
    with pytest.raises(InputError):
        parse_point("x,y")
