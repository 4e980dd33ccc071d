"""Command-line surface: geometry files, reports, exit codes."""

import json

import pytest

from fedquant.cli import main


FLAT = '{"kind": "flat", "n": 1, "order": 11}'
DARBOUX_BAD = ('{"kind": "darboux", "n": 1, "order": 6,'
               ' "base_point": ["0"],'
               ' "gamma": {"112": "q1", "121": "2*q1"}}')
KAEHLER = ('{"kind": "kaehler", "n": 1, "order": 8, "base_point": ["0"],'
           ' "potential": "z1*zb1 + (z1*zb1)^2/3"}')


@pytest.fixture
def flat_file(tmp_path):
    path = tmp_path / "flat.json"
    path.write_text(FLAT)
    return str(path)


def test_validate_flat(flat_file, capsys):
    assert main(["validate", flat_file]) == 0
    out = capsys.readouterr().out
    assert "ok" in out and "FAIL" not in out


def test_validate_kaehler(tmp_path):
    path = tmp_path / "k.json"
    path.write_text(KAEHLER)
    assert main(["validate", str(path)]) == 0


def test_asymmetric_gamma_is_input_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(DARBOUX_BAD)
    assert main(["validate", str(path)]) == 2
    assert "error" in capsys.readouterr().err


def test_broken_json_is_input_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{nope")
    assert main(["validate", str(path)]) == 2


def test_star_coefficient_dump(flat_file, capsys):
    assert main(["star", flat_file, "--f", "q1", "--g", "p1",
                 "--order", "1"]) == 0
    out = capsys.readouterr().out
    assert "hbar^1" in out
    assert "1/2*i" in out


def test_star_order_too_high_for_file(tmp_path, capsys):
    path = tmp_path / "small.json"
    path.write_text('{"kind": "flat", "n": 1, "order": 5}')
    assert main(["star", str(path), "--f", "q1", "--g", "p1",
                 "--order", "3"]) == 2


def test_quantize_momentum_square(flat_file, capsys):
    assert main(["quantize", flat_file, "--f", "p1^2"]) == 0
    out = capsys.readouterr().out
    assert "d^(2)" in out and "-1" in out


def test_quantize_kinetic_needs_cotangent(tmp_path, capsys):
    path = tmp_path / "k.json"
    path.write_text(KAEHLER)
    assert main(["quantize", str(path), "--f", "kinetic"]) == 2


def test_check_unknown_suite(capsys):
    assert main(["check", "no-such-suite"]) == 2


def test_check_suite_runs_and_json_deterministic(tmp_path, capsys):
    j1 = tmp_path / "a.json"
    j2 = tmp_path / "b.json"
    assert main(["check", "r-terms", "--seed", "5", "--quiet",
                 "--json", str(j1)]) == 0
    assert main(["check", "r-terms", "--seed", "5", "--quiet",
                 "--json", str(j2)]) == 0
    assert j1.read_bytes() == j2.read_bytes()
    doc = json.loads(j1.read_text())
    assert doc["checks"] and all(c["passed"] for c in doc["checks"])


def test_quiet_suppresses_table(flat_file, capsys):
    assert main(["validate", flat_file, "--quiet"]) == 0
    assert capsys.readouterr().out == ""
