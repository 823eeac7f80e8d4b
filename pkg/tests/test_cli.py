import json

import pytest
from click.testing import CliRunner

from fjrw.cli import main


@pytest.fixture
def cli():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, list(args))

    return invoke


class TestAnalyze:
    def test_e19(self, cli):
        r = cli("analyze", "x^3 + x*y^7")
        assert r.exit_code == 0
        assert "q_x = 1/3, q_y = 2/21" in r.output and "group: order 21" in r.output
        row = next(l for l in r.output.splitlines() if l.startswith("| order*deg"))
        assert len(row.strip("|").split("|")) == 16  # label column plus 15 sectors

    def test_heavy_weight_warning(self, cli):
        r = cli("analyze", "x^2")
        assert r.exit_code == 0 and "warning: a variable has weight at least 1/2" in r.output

    def test_degenerate(self, cli):
        r = cli("analyze", "x*y")
        assert r.exit_code == 3 and "weights are not uniquely determined" in r.output

    def test_parse_error(self, cli):
        assert cli("analyze", "x^^2").exit_code == 2

    def test_json(self, cli):
        r = cli("analyze", "x^3 + x*y^7", "--format", "json")
        data = json.loads(r.output)
        assert data["group"]["order"] == 21 and len(data["sectors"]) == 15

    def test_group_j(self, cli):
        r = cli("analyze", "x^3 + x*y^8", "--group", "J", "--format", "json")
        assert r.exit_code == 0 and json.loads(r.output)["group"]["order"] == 12

    def test_group_generator(self, cli):
        r = cli("analyze", "x^3 + x*y^8", "--group", "gen=(16/24, 1/24)", "--format", "json")
        assert r.exit_code == 0 and json.loads(r.output)["group"]["generator"] == "(2/3, 1/24)"

    def test_bad_group(self, cli):
        assert cli("analyze", "x^3", "--group", "huge").exit_code == 2

    def test_param(self, cli):
        r = cli("analyze", "x^3 + b*x^2*y^3 + y^9", "--param", "b=2")
        assert r.exit_code == 0 and "2*x^2*y^3" in r.output

    def test_bad_param(self, cli):
        assert cli("analyze", "x^3", "--param", "b").exit_code == 2


class TestOtherCommands:
    def test_correlators(self, cli):
        r = cli("correlators", "x^3 + x*y^7")
        assert r.exit_code == 0 and "<y^6e_0, y^6e_0, 1> = -1/7" in r.output and "-7*u1^2 + 7 = 0" in r.output

    def test_ring(self, cli):
        r = cli("ring", "x^3*y + y^7")
        assert r.exit_code == 0 and "mu = 15" in r.output


class TestMirrorCheck:
    def test_e19(self, cli):
        r = cli("mirror-check", "E_19")
        assert r.exit_code == 0 and "Verdict: isomorphic" in r.output and "dim A = 15, dim B = 15" in r.output

    def test_j30(self, cli):
        r = cli("mirror-check", "J_3_0", "--param", "b=1")
        assert r.exit_code == 0 and "Verdict: no-milnor-ring-exists" in r.output
        assert "alpha = 1/22, mu = 168/25" in r.output

    def test_q17t(self, cli):
        r = cli("mirror-check", "Q_17T", "--format", "json")
        v = json.loads(r.output)["verdict"]
        assert r.exit_code == 0 and v["status"] == "conditional" and v["hypotheses"] == ["a != 0"]

    def test_polynomial(self, cli):
        r = cli("mirror-check", "x^4 + x*y^3")
        assert r.exit_code == 0 and "Verdict: isomorphic" in r.output

    def test_degenerate_param(self, cli):
        assert cli("mirror-check", "W_1_0", "--param", "a=2").exit_code == 3

    def test_unknown_param(self, cli):
        assert cli("mirror-check", "J_3_0", "--param", "c=2").exit_code == 2

    def test_wrong_target(self, cli):
        assert cli("mirror-check", "x^3 + x*y^7", "--target", "x^3 + y^3").exit_code == 3


class TestCorpus:
    def test_list(self, cli):
        r = cli("corpus", "list")
        assert r.exit_code == 0 and len(r.output.splitlines()) == 40

    def test_filter(self, cli):
        r = cli("corpus", "run", "Z_1*", "--jobs", "2")
        names = [l.split()[0] for l in r.output.splitlines() if l and not l.startswith(" ")][:-1]
        assert r.exit_code == 0 and names == ["Z_11", "Z_12", "Z_13", "Z_17", "Z_17T", "Z_18", "Z_19", "Z_19T", "Z_1_0"]

    def test_json(self, cli):
        r = cli("corpus", "run", "E_1*", "--format", "json")
        data = json.loads(r.output)
        assert r.exit_code == 0 and data["summary"]["mismatches"] == 0 and len(data["results"]) == 5

    def test_no_match(self, cli):
        assert cli("corpus", "run", "NOPE*").exit_code == 2

    def test_mismatch_exit_code(self, cli, tmp_path, monkeypatch):
        import fjrw.cli as cli_module
        from fjrw.corpus import load_corpus

        def broken():
            entries = load_corpus()
            entries[0].expected = dict(entries[0].expected, chat="1")
            return entries

        monkeypatch.setattr(cli_module, "load_corpus", broken)
        r = cli("corpus", "run", "E_19")
        assert r.exit_code == 1 and "mismatch chat" in r.output
