import json
import random

import pytest
from hypothesis import given, strategies as st

from transverse_hopf.cli import (
    EXIT_BUDGET,
    EXIT_FAIL,
    EXIT_OK,
    EXIT_USAGE,
    ParseError,
    main,
    parse_coeff,
    parse_expr,
    parse_value,
    parse_weil,
    serialize,
)
from transverse_hopf.coeff_ring import base, curv, derive, gamma
from transverse_hopf.cyclic_module import HopfInstance
from transverse_hopf.hopf_core import HElement, commutator
from transverse_hopf.hopf_structure import coproduct, random_word, tensor_normalize
from transverse_hopf.weil_complex import gv, random_form


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out.strip()


def test_parse_examples():
    assert parse_value("X[1]*b(f) - b(f)*X[1]", 1) == commutator(HElement.X(1, 1), HElement.beta(1, base("f")))
    tree = parse_expr("Y[1,1] (x) X[1]", 1)
    assert tree[0] == "tensor" and len(tree[1]) == 2
    assert parse_value("D[1;1,1]", 1) == HElement.delta(1, 1, 1, 1)


def test_parse_coefficients():
    n = 2
    assert parse_coeff("Dx[1](Dy[1,2](f))", n) == derive(derive(base("f"), ("Y", 1, 2), n), ("X", 1), n)
    assert parse_coeff("R[1,2,2,1] - g[L;1;2,1;2]", n) == -curv(1, 2, 1, 2) - gamma("L", 1, 1, 2, (2,))


@pytest.mark.parametrize("src,pos", [("X[1]*(Y[1,1]", 12), ("X[3]", 2), ("Q[1]", 0), ("X[1] $", 5)])
def test_parse_errors_report_position(src, pos):
    with pytest.raises(ParseError) as err:
        parse_value(src, 2)
    assert err.value.pos == pos


def test_normalize_command(capsys):
    assert run(capsys, "normalize", "--n", "1", "Y[1,1]*X[1]") == (EXIT_OK, "X[1]*Y[1,1] + X[1]")


def test_tilde_c_command(capsys):
    code, out = run(capsys, "vanest", "tilde-c", "--n", "1", "--class", "gv")
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "cocycle: true"
    assert out.startswith("q=1: ")


def test_failed_check_exit_code_and_witness(capsys):
    code, out = run(capsys, "cocycle-check", "--n", "1", "--component", "1=X[1]")
    assert code == EXIT_FAIL
    assert "witness: cocycle: degree 2:" in out


def test_usage_errors(capsys):
    assert main(["normalize", "--n", "1", "X[2]"]) == EXIT_USAGE
    assert "outside 1..1" in capsys.readouterr().err


def test_term_budget(capsys, monkeypatch):
    monkeypatch.setenv("TRANSVERSE_HOPF_MAX_TERMS", "5")
    assert main(["normalize", "--n", "2", "Y[2,1]*Y[1,2]*X[2]*X[1]*D[1;1,2]"]) == EXIT_BUDGET


def test_json_document(capsys):
    code, out = run(capsys, "coproduct", "--json", "--n", "1", "X[1]")
    doc = json.loads(out)
    assert set(doc) == {"config", "command", "result_terms", "checks", "witnesses"}
    assert doc["config"] == {"expr": "X[1]", "n": 1}
    assert parse_value(doc["result_terms"][0], 1) == coproduct(HElement.X(1, 1))


def test_cyclic_commands(capsys):
    assert run(capsys, "cyclic", "tau", "--n", "1", "D[1;1,1]") == (EXIT_OK, "-D[1;1,1]")
    assert run(capsys, "cyclic", "b", "--n", "1", "--q", "0", "r") == (EXIT_OK, "b(r) - a(r)")
    assert run(capsys, "cyclic", "B", "--n", "1", "D[1;1,1]") == (EXIT_OK, "0")
    code, out = run(capsys, "cyclic", "face", "--n", "1", "--i", "1", "X[1]")
    assert parse_value(out, 1) == coproduct(HElement.X(1, 1))


def test_weil_commands(capsys):
    assert run(capsys, "weil", "d", "--n", "1", "--form", "th[1,1]") == (EXIT_OK, "R[1,1]")
    code, out = run(capsys, "weil", "basic", "--n", "2", "--form", "th[1,2]")
    assert code == EXIT_FAIL and out.endswith("basic: FAIL")
    assert run(capsys, "weil", "closed", "--n", "3", "--class", "chern", "--k", "2")[0] == EXIT_OK


def test_jets_table(capsys, monkeypatch, tmp_path):
    table = tmp_path / "psi.txt"
    table.write_text("n: 1\npsi1: x1 + 3/7*x1**2\n", encoding="utf-8")
    assert run(capsys, "jets", "gamma", "--table", str(table), "--y", "5") == (EXIT_OK, "g[1;1,1] = 30/7")
    table.write_text("n: 2\npsi1: x1 + x2**2\npsi2: x2 - x1*x2\nGamma[1,1,2]: x1\n", encoding="utf-8")
    assert run(capsys, "jets", "verify", "--table", str(table), "--samples", "3")[0] == EXIT_OK


def test_selftest_is_deterministic(capsys):
    first = run(capsys, "selftest", "--n", "1", "--seed", "7", "--samples", "2")
    second = run(capsys, "selftest", "--n", "1", "--seed", "7", "--samples", "2")
    assert first == second and first[0] == EXIT_OK
    assert first[1].splitlines()[-1].startswith("summary: ")


@given(st.integers(0, 10**6), st.sampled_from([1, 2]))
def test_operator_round_trip(seed, n):
    h = random_word(random.Random(seed), n, 3)
    assert parse_value(serialize(h), n) == h


@given(st.integers(0, 10**6))
def test_tensor_round_trip(seed):
    rnd = random.Random(seed)
    t = HopfInstance(1).random_element(rnd.randint(2, 3), rnd)
    assert parse_value(serialize(t), 1) == t


@given(st.integers(0, 10**6), st.sampled_from([1, 2, 3]))
def test_weil_round_trip(seed, n):
    w = random_form(n, random.Random(seed), 4)
    assert parse_weil(serialize(w), n) == w


def test_higher_jet_round_trip():
    for src in ["D[1;1,2;2,2]*X[1]", "a(Dx[2](Dy[1,2](f)))*b(R[1,2,1,2]*g[p;2;1,1;1])"]:
        h = parse_value(src, 2)
        assert parse_value(serialize(h), 2) == h
    t = tensor_normalize([HElement.X(2, 1), HElement.beta(2, base("f"))])
    assert parse_value(serialize(t), 2) == t
    assert parse_weil(serialize(gv(2)), 2) == gv(2)
