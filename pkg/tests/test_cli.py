import json

import pytest

from metasplit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, json.loads(out), err


def test_hilbert_command(capsys):
    code, out, err = run(capsys, "hilbert", "--p", "2", "--x", "-1", "--y", "-1")
    assert code == 0
    assert out["sign"] == -1
    assert out["backend"] == "q2-formula"
    assert "= -1" in err


def test_hilbert_oracle_backend(capsys):
    code, out, _ = run(capsys, "hilbert", "--p", "2", "--ext", "-1", "--x", "3", "--y", "-5", "--backend", "oracle")
    assert code == 0
    _, auto, _ = run(capsys, "hilbert", "--p", "2", "--ext", "-1", "--x", "3", "--y", "-5")
    assert out["sign"] == auto["sign"]


def test_cocycle_torus_matches_hilbert(capsys):
    code, out, _ = run(capsys, "cocycle", "--p", "3", "--ext", "2", "--g1", "3,0;0,1/3", "--g2", "2,0;0,1/2", "--group", "sl2")
    assert code == 0
    _, h, _ = run(capsys, "hilbert", "--p", "3", "--ext", "2", "--x", "3", "--y", "2")
    assert out["sign"] == h["sign"]
    assert "certification_depth" in out


def test_cohomology_commands(capsys):
    _, out, _ = run(capsys, "cohomology", "gprime", "--q", "5")
    assert out["invariant_factors"] == [2, 2]
    _, out, _ = run(capsys, "cohomology", "gprime", "--q", "3", "--coeffs", "qz")
    assert out["invariant_factors"] == [2]
    code, out, _ = run(capsys, "cohomology", "lemma-l", "--q", "7")
    assert code == 0 and out["bijective_on_2_torsion"]
    _, out, _ = run(capsys, "cohomology", "brute", "--group", "product:cyclic:2,cyclic:2")
    assert out["invariant_factors"] == [2, 2, 2]


def test_quaternion_commands(capsys):
    code, out, _ = run(capsys, "quaternion", "--p", "3", "split-torus", "--d", "6", "--samples", "10")
    assert code == 0
    assert out["all_passed"] and out["sampled_pairs"] == 10
    code, out, _ = run(capsys, "quaternion", "--p", "2", "conjugator", "--d", "-2")
    assert code == 0 and out["verified"]
    code, out, _ = run(capsys, "quaternion", "--p", "5", "embed", "--q", "1,0,2,1")
    assert out["det_equals_nrd"]


def test_verify_suite(capsys):
    code, out, err = run(capsys, "verify", "lemma-b", "--p", "3", "--ext", "2", "--samples", "50", "--seed", "7")
    assert code == 0
    assert out["schema"] == 1 and out["passed"]
    names = [r["name"] for r in out["records"]]
    assert names == sorted(names)
    assert "PASS" in err


def test_verify_is_deterministic(capsys):
    args = ("verify", "cocycle-identity", "--p", "5", "--ext", "2", "--samples", "10", "--seed", "3", "--compact")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    a.pop("wall_time_s")
    b.pop("wall_time_s")
    assert a == b


def test_verify_semidirect_assembly(capsys):
    code, out, _ = run(capsys, "verify", "prop-h", "--q", "3")
    assert code == 0
    rec = next(r for r in out["records"] if r["name"] == "h2-semidirect-z2/q=3")
    assert rec["got"]["order"] == 4


def test_configuration_errors_exit_2(capsys):
    code, out, _ = run(capsys, "hilbert", "--p", "4", "--x", "1", "--y", "1")
    assert code == 2 and out["error"] == "ValueError"
    code, out, _ = run(capsys, "verify", "lemma-b", "--p", "3", "--precision", "1")
    assert code == 2 and out["error"] == "ConfigOutOfRange"
    code, out, _ = run(capsys, "hilbert", "--p", "3", "--x", "0", "--y", "1")
    assert code == 2 and out["error"] == "InsufficientPrecision"


def test_unknown_suite_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nope"])
    assert exc.value.code == 2


def test_split_constants_are_bad_input(capsys):
    code, out, _ = run(capsys, "quaternion", "--p", "3", "--constants", "1,3", "embed", "--q", "1,0,0,0")
    assert code == 2


def test_failing_check_exits_1(capsys, monkeypatch):
    import metasplit.suites as suites

    monkeypatch.setattr(suites, "hilbert", lambda x, y, K: -1)
    code, out, err = run(capsys, "verify", "lemma-b", "--p", "5", "--ext", "2", "--samples", "5")
    assert code == 1
    assert not out["passed"]
    assert "FAIL" in err
