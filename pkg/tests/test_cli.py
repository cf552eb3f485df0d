"""Command-line surface: output shapes and exit codes."""

import json

import pytest

from tpc.cli import main

FG_PAIR = [
    "--from",
    "P(Z, Z)",
    "--to",
    "P(F(F(F(F(F(F(F(F(Z)))))))), G(G(G(G(G(Z))))))",
]


class TestExitCodes:
    def test_positive_decision(self, capsys):
        assert main(["decide", "fg", *FG_PAIR]) == 0
        assert capsys.readouterr().out.strip() == "true"

    def test_negative_decision(self, capsys):
        assert main(["decide", "fg", "--from", "P(Z, Z)", "--to", "P(Z, G(Z))"]) == 1
        assert capsys.readouterr().out.strip() == "false"

    def test_synthesis_failure_is_reported(self, capsys):
        code = main(["decide", "ancestor", "--method", "generated", "--from", "S", "--to", "S"])
        assert code == 3
        assert "error" in capsys.readouterr().err

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["decide", "fg", "--from", "P(Z, Z)"])
        assert exc.value.code == 2

    def test_unknown_theory(self, capsys):
        assert main(["parse", "no_such_theory"]) == 2


class TestCommands:
    def test_parse_roundtrip(self, capsys):
        assert main(["parse", "chain"]) == 0
        out = capsys.readouterr().out
        assert "start: P(Z)" in out and "a: P(x) -> P(F(x))" in out

    def test_oracle_finds_seven_step_proof(self, capsys):
        assert main(["oracle", "ancestor", "--depth", "8"]) == 0
        assert capsys.readouterr().out.strip() == "p3.a1.p2.a2.p1.a2.l1"

    def test_oracle_dump(self, capsys):
        assert main(["oracle", "chain", "--dump", "--depth", "2"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines == ["P(Z)", "P(F(Z))", "P(F(F(Z)))"]

    def test_prove_with_generated_procedure(self, capsys):
        assert main(["prove", "fg", "--method", "generated", "--goal", "P(F(F(F(Z))), G(G(Z)))"]) == 0
        assert capsys.readouterr().out.strip() == "b.a"

    def test_prove_falls_back_to_oracle(self, capsys):
        assert main(["prove", "ancestor"]) == 0
        assert capsys.readouterr().out.strip() == "p3.a1.p2.a2.p1.a2.l1"

    def test_sigma_json(self, capsys):
        assert main(["--json", "sigma", "chain", "--scheme", "a*"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["schema"] == "tpc/1"
        (branch,) = payload["charfn"]["branches"]
        assert branch["atoms"] == ["EqualsLR([P(x)->x], [P(x)->x].[F(x)->x]^{n})"]

    def test_includes_region(self, capsys):
        assert main(["includes", "fg", "--left", "a.b.a*.b", "--right", "b.a*.b"]) == 0
        assert "all naturals" in capsys.readouterr().out

    def test_reduce_trace(self, capsys):
        assert main(["reduce", "fg"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "reduced: b*.a*"
        assert "absorption" in out and "commutation" in out

    def test_json_reduce_schema(self, capsys):
        assert main(["--json", "reduce", "fg"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["trace"]["result"] == "b*.a*"
        assert [s["rule"] for s in payload["trace"]["steps"]] == [
            "absorption",
            "normalize",
            "commutation",
            "normalize",
        ]

    def test_theory_from_file(self, tmp_path, capsys):
        f = tmp_path / "tiny.tpc"
        f.write_text("start: Q(Z)\na: Q(x) -> Q(H(x))\n")
        assert main(["decide", str(f), "--from", "Q(Z)", "--to", "Q(H(H(Z)))"]) == 0
