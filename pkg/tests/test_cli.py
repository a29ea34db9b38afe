import json

import pytest

from amrkbqa.cli import main
from amrkbqa.config import bundled_path

KB = str(bundled_path("toy_kb.nt"))
DATASET = str(bundled_path("questions.jsonl"))


def first_record_file(tmp_path):
    line = bundled_path("questions.jsonl").read_text(encoding="utf-8").splitlines()[0]
    path = tmp_path / "question.json"
    path.write_text(line)
    return str(path)


class TestAnswer:
    def test_answers_running_example(self, tmp_path, capsys):
        code = main(["answer", "--kb", KB, "--question", first_record_file(tmp_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "dbr:Benicio_del_Toro" in out
        assert "SELECT DISTINCT ?z ?x" in out

    def test_trace_flag(self, tmp_path, capsys):
        code = main(
            ["answer", "--kb", KB, "--question", first_record_file(tmp_path), "--trace"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "global bindings" in out

    def test_missing_kb_flag_exits_2(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as err:
            main(["answer", "--question", first_record_file(tmp_path)])
        assert err.value.code == 2

    def test_bad_question_exits_3(self, capsys):
        code = main(["answer", "--kb", KB, "--question", "{not json"])
        assert code == 3


class TestSparql:
    def test_emits_query_only(self, tmp_path, capsys):
        code = main(["sparql", "--question", first_record_file(tmp_path)])
        out = capsys.readouterr().out.strip()
        assert code == 0
        assert out.startswith("SELECT DISTINCT ?z ?x WHERE {")

    def test_inline_json_record(self, capsys):
        record = json.dumps(
            {
                "id": "inline",
                "text": "Is Christian Bale starring in Velvet Goldmine?",
                "amr": '(s / star-01 :ARG2 (p / person :name (n / name :op1 "Christian" :op2 "Bale")) '
                ':ARG1 (m / movie :name (n2 / name :op1 "Velvet" :op2 "Goldmine")) :mode interrogative)',
            }
        )
        code = main(["sparql", "--kb", KB, "--question", record])
        out = capsys.readouterr().out.strip()
        assert code == 0
        assert out == "ASK WHERE { dbr:Velvet_Goldmine dbo:starring dbr:Christian_Bale . }"


class TestEval:
    def test_writes_report_and_figure(self, tmp_path, capsys):
        out_path = tmp_path / "report.tsv"
        code = main(["eval", "--kb", KB, "--dataset", DATASET, "--out", str(out_path)])
        printed = capsys.readouterr().out
        assert code == 0
        assert "macro" in printed
        tsv = out_path.read_text(encoding="utf-8")
        assert tsv.startswith("id\tprecision\trecall\tf1")
        assert "macro-f1-qald" in tsv
        figure = out_path.with_suffix(".png")
        assert figure.exists() and figure.stat().st_size > 0

    def test_missing_dataset_exits_3(self, tmp_path, capsys):
        code = main(
            ["eval", "--kb", KB, "--dataset", str(tmp_path / "nope.jsonl"),
             "--out", str(tmp_path / "r.tsv")]
        )
        assert code == 3

    def test_deterministic_tsv(self, tmp_path):
        a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        assert main(["eval", "--kb", KB, "--dataset", DATASET, "--out", str(a)]) == 0
        assert main(["eval", "--kb", KB, "--dataset", DATASET, "--out", str(b)]) == 0
        assert a.read_text() == b.read_text()


class TestConfig:
    def test_unknown_config_key_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "config.json"
        bad.write_text(json.dumps({"no_such_option": 1}))
        code = main(
            ["--config", str(bad), "answer", "--kb", KB, "--question", "{}"]
        )
        assert code == 2

    def test_config_overrides_weights(self, tmp_path, capsys):
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({"weights": [0.4, 0.0, 0.3, 0.3], "beam": 2}))
        code = main(
            ["--config", str(cfg), "answer", "--kb", KB,
             "--question", first_record_file(tmp_path)]
        )
        assert code == 0

    def test_env_var_config_path(self, tmp_path, monkeypatch):
        from amrkbqa.config import CONFIG_ENV_VAR, load_config

        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({"beam": 7, "closed_world_output": True}))
        monkeypatch.setenv(CONFIG_ENV_VAR, str(cfg))
        loaded = load_config()
        assert loaded.beam == 7 and loaded.closed_world_output
