import json

import pytest

from ordbayes.cli import main
from ordbayes.compare import sweep_q
from ordbayes.errors import InputError
from ordbayes.io import dump_table, emit_report, load_report, load_table
from ordbayes.tables import McConfig, MultinomialHyper

TRAUMA_CSV = "59,151\n48,142\n44,163\n43,152\n"


@pytest.fixture
def files(tmp_path):
    (tmp_path / "trauma.csv").write_text(TRAUMA_CSV)
    (tmp_path / "h34.json").write_text(json.dumps({"kind": "multinomial", "counts": [[20, 0], [18, 5]]}))
    return tmp_path


class TestLoad:
    def test_trauma_csv(self, files):
        t = load_table(files / "trauma.csv", kind="binomial").to_table()
        assert t.y.tolist() == [59, 48, 44, 43]
        assert t.n.tolist() == [210, 190, 207, 195]

    def test_hospital_json(self, files):
        t = load_table(files / "h34.json").to_table()
        assert t.n == 43

    @pytest.mark.parametrize(
        "text,needle",
        [
            ("1,2\n3\n", "line 2: ragged"),
            ("1,2\n3,-4\n", "line 2: negative"),
            ("", "empty"),
            ("1,2\n3,x\n", "line 2:"),
        ],
    )
    def test_csv_errors(self, tmp_path, text, needle):
        p = tmp_path / "bad.csv"
        p.write_text(text)
        with pytest.raises(InputError, match=needle):
            load_table(p, kind="multinomial")

    def test_json_errors(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"kind": "multinomial", "counts": [[1, 2], [3]]}')
        with pytest.raises(InputError, match="ragged"):
            load_table(p)
        p.write_text('{"kind": "multinomial", "counts": [[1, 2], [3, -1]]}')
        with pytest.raises(InputError, match="negative"):
            load_table(p)

    def test_csv_json_csv_round_trip(self, files, tmp_path):
        tf = load_table(files / "trauma.csv", kind="binomial")
        (tmp_path / "t.json").write_text(dump_table(tf, "json"))
        back = load_table(tmp_path / "t.json")
        assert dump_table(back, "csv") == TRAUMA_CSV


class TestReport:
    def test_json_round_trip(self, files):
        t = load_table(files / "h34.json").to_table()
        rep = sweep_q(t, MultinomialHyper.uniform(2, 2), "cond(1,1)<cond(2,1)", [0, 0.5], McConfig(2000, seed=1))
        raw = emit_report(rep, "json")
        assert emit_report(load_report(raw), "json") == raw
        doc = json.loads(raw)
        assert doc["provenance"]["seed"] == 1 and doc["provenance"]["samples"] == 2000

    def test_formats(self, files):
        t = load_table(files / "h34.json").to_table()
        rep = sweep_q(t, MultinomialHyper.uniform(2, 2), "cond(1,1)<cond(2,1)", [0], McConfig(500))
        csv_text = emit_report(rep, "csv").decode()
        assert csv_text.splitlines()[0].startswith("q,t,BF_e0,BF_e0_se")
        assert "| 0 | 3.648 |" in emit_report(rep, "md").decode()
        with pytest.raises(InputError):
            emit_report(rep, "xml")


class TestCli:
    def test_analyze(self, files, capsysbinary):
        rc = main(["analyze", "--table", str(files / "trauma.csv"), "--kind", "binomial",
                   "--constraint", "p[1]>p[2]>p[3]>p[4]", "--q", "0,0.5", "--samples", "2000", "--out", "json"])
        assert rc == 0
        doc = json.loads(capsysbinary.readouterr().out)
        assert [r["q"] for r in doc["rows"]] == [0.0, 0.5]

    def test_analyze_deterministic(self, files, tmp_path):
        argv = ["analyze", "--table", str(files / "h34.json"), "--constraint", "cond(1,1)<cond(2,1)",
                "--q", "0,1", "--samples", "2000", "--seed", "4"]
        main(argv + ["--output", str(tmp_path / "a.json")])
        main(argv + ["--output", str(tmp_path / "b.json")])
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_input_error_exit(self, files, capsys):
        rc = main(["analyze", "--table", str(files / "h34.json"), "--constraint", "cond(1,1)<=cond(2,1)"])
        assert rc == 2
        assert "non-strict" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["analyze", "--table", str(tmp_path / "nope.csv"), "--kind", "binomial"]) == 2

    def test_bad_flag(self):
        with pytest.raises(SystemExit) as info:
            main(["analyze", "--bogus"])
        assert info.value.code == 2

    def test_estimation_failure_exit(self, files):
        rc = main(["analyze", "--table", str(files / "h34.json"), "--constraint", "cond(1,1)<cond(2,1)",
                   "--q", "0.5", "--samples", "1", "--seed", "0"])
        assert rc == 3

    def test_oracle(self, files, capsysbinary):
        assert main(["oracle", "--table", str(files / "h34.json"), "--t", "0"]) == 0
        doc = json.loads(capsysbinary.readouterr().out)
        assert doc["bf_intrinsic_e0_exact"] == pytest.approx(3.648, abs=5e-4)

    def test_oracle_budget(self, files):
        assert main(["oracle", "--table", str(files / "trauma.csv"), "--kind", "binomial", "--q", "1"]) == 2

    def test_simulate(self, capsysbinary):
        rc = main(["simulate", "--scenario", "XL1", "--replicates", "2", "--q", "0.5", "--samples", "500", "--out", "md"])
        assert rc == 0
        assert b"P(Mc\\|0c)" in capsysbinary.readouterr().out

    def test_simulate_custom(self, capsysbinary):
        assert main(["simulate", "--custom", "10:0.7,0.2", "--replicates", "1", "--q", "0", "--samples", "200"]) == 0
        assert main(["simulate", "--custom", "garbage", "--replicates", "1"]) == 2
