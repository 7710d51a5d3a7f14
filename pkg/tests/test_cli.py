"""Command-line surface: the expression grammar, subcommands, JSON output
and exit codes."""

import json

import pytest

from dqmf.algebra import FieldConfig, PolyT, RatT, bracket
from dqmf.cli import ParseError, main, parse_qmpoly, parse_ratt
from dqmf.qmring import QmPoly


@pytest.fixture
def cfg5():
    return FieldConfig.from_q(5)


# ---------------------------------------------------------------------------
# expression grammar


def test_parse_generators(cfg5):
    assert parse_qmpoly(cfg5, "E") == QmPoly.gen_E(cfg5)
    assert parse_qmpoly(cfg5, "E^2 g h^3") == QmPoly.monomial(cfg5, 2, 1, 3)
    assert parse_qmpoly(cfg5, "E*g*h") == QmPoly.monomial(cfg5, 1, 1, 1)


def test_parse_sums_and_signs(cfg5):
    expr = parse_qmpoly(cfg5, "E g + h")
    assert expr == QmPoly.monomial(cfg5, 1, 1, 0) + QmPoly.gen_h(cfg5)
    assert parse_qmpoly(cfg5, "-E + E").is_zero()
    assert parse_qmpoly(cfg5, "E - E").is_zero()


def test_parse_coefficients(cfg5):
    f = parse_qmpoly(cfg5, "(1/(T^5 - T)) h^2")
    inv_b = RatT(cfg5, cfg5.poly_one, bracket(1, cfg5))
    assert f == QmPoly.monomial(cfg5, 0, 0, 2, inv_b)
    g = parse_qmpoly(cfg5, "(T^2 + 1) E + 3 h")
    want = QmPoly.monomial(cfg5, 1, 0, 0, RatT(cfg5, PolyT.from_ints(cfg5, [1, 0, 1])))
    want = want + QmPoly.monomial(cfg5, 0, 0, 1, 3)
    assert g == want


def test_parse_rational_functions(cfg5):
    r = parse_ratt(cfg5, "(T^2 - 1)/(T - 1)")
    assert r == RatT(cfg5, PolyT.from_ints(cfg5, [1, 1]))
    assert parse_ratt(cfg5, "2^3") == RatT.from_int(cfg5, 8)


def test_parse_errors(cfg5):
    with pytest.raises(ParseError):
        parse_qmpoly(cfg5, "E +")
    with pytest.raises(ParseError):
        parse_qmpoly(cfg5, "x")
    with pytest.raises(ParseError):
        parse_qmpoly(cfg5, "E^h")


def test_textbook_formula_pastes(cfg5):
    # the first-order system for g parses as written
    f = parse_qmpoly(cfg5, "-(E g + h)")
    assert f == -(QmPoly.monomial(cfg5, 1, 1, 0) + QmPoly.gen_h(cfg5))


# ---------------------------------------------------------------------------
# subcommands


def test_cmd_derive_matches_table(capsys):
    rc = main(["derive", "--q", "5", "E", "5"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "E^6" in out and "h^2" in out and "grading: weight 12" in out


def test_cmd_derive_json_roundtrip(capsys):
    rc = main(["derive", "--q", "5", "--json", "E g + h", "3"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    from dqmf.cli import qmpoly_from_json
    from dqmf.hyperd import DerivationEngine

    cfg = FieldConfig.from_q(5)
    back = qmpoly_from_json(cfg, data["result"])
    eng = DerivationEngine(cfg)
    f = QmPoly.monomial(cfg, 1, 1, 0) + QmPoly.gen_h(cfg)
    assert back == eng.derive(f, 3)


def test_cmd_derive_rejects_excessive_order(capsys):
    rc = main(["derive", "--q", "4", "E", "100"])
    assert rc == 2


def test_cmd_expand_h_leading(capsys):
    rc = main(["expand", "--q", "4", "h", "12"])
    out = capsys.readouterr().out
    assert rc == 0
    # q = 4: h = -t - t^10 + ...; char 2 so -1 prints as 1
    assert out.startswith("t + t^10")


def test_cmd_expand_json(capsys):
    rc = main(["expand", "--q", "5", "--json", "g", "10"])
    data = json.loads(capsys.readouterr().out)
    assert rc == 0
    from dqmf.cli import tseries_from_json
    from dqmf.tseries import expand_g

    cfg = FieldConfig.from_q(5)
    assert tseries_from_json(cfg, data["series"]) == expand_g(cfg, 10)


def test_cmd_basis(capsys):
    rc = main(["basis", "--q", "5", "0", "0", "0"])
    out = capsys.readouterr().out.strip()
    assert rc == 0 and out == "1"
    rc = main(["basis", "--q", "5", "6", "1", "1"])
    out = capsys.readouterr().out.strip().splitlines()
    assert rc == 0 and out == ["h", "E g"]


def test_cmd_ideal_pass_and_fail(capsys):
    rc = main(["ideal", "--q", "5", "Pd", "--d", "T", "--n-max", "24"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "hyperdifferential" in out
    rc = main(["ideal", "--q", "5", "g", "--n-max", "4"])
    assert rc == 1
    out = capsys.readouterr().out
    assert "fails at n = 1" in out


def test_cmd_field_file(tmp_path, capsys):
    path = tmp_path / "f.cfg"
    path.write_text("p = 3\ne = 2\nmodulus = 1 0 1\n")
    rc = main(["field", "--field-file", str(path)])
    out = capsys.readouterr().out
    assert rc == 0 and "p = 3" in out and "modulus = 1 0 1" in out


def test_cmd_verify_small_field(capsys):
    rc = main(["verify", "--q", "4", "--n-max", "8",
               "--suite", "generator_tables", "munu_congruence"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.count("[PASS]") == 2


def test_cmd_verify_json_determinism(capsys):
    argv = ["verify", "--q", "4", "--json", "--n-max", "6", "--seed", "99",
            "--suite", "generator_tables"]
    rc1 = main(argv)
    out1 = capsys.readouterr().out
    rc2 = main(argv)
    out2 = capsys.readouterr().out
    assert rc1 == rc2 == 0 and out1 == out2
