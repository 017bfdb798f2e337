from __future__ import annotations

import json
from pathlib import Path

from apibind.cli import main
from apibind.ingest import load_corpus, record_id_census


def read_tree(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()
    }


def run(argv) -> int:
    return main([str(a) for a in argv])


class TestAnalyze:
    def test_fixture_corpus(self, corpus12_path, tmp_path, capsys):
        out = tmp_path / "out"
        assert run(["analyze", "--input", corpus12_path, "--out-dir", out]) == 0
        assert (out / "analyzed.csv").is_file()
        assert (out / "rejects.csv").is_file()
        assert (out / "dashboard.txt").is_file()
        assert (out / "dashboard.json").is_file()

        stage = load_corpus(out / "analyzed.csv")
        assert len(stage) == 12
        rejects = load_corpus(out / "rejects.csv")
        assert sorted(str(r.id) for r in rejects) == ["r11", "r12"]

        doc = json.loads((out / "dashboard.json").read_text())
        assert doc["total_records"] == 12
        assert doc["valid_records"] == 10
        assert abs(doc["percent_valid"] - 83.3) < 0.1
        assert "83.3%" in capsys.readouterr().out

    def test_missing_input_no_partial_outputs(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = run(["analyze", "--input", tmp_path / "absent.csv", "--out-dir", out])
        assert code == 1
        assert not out.exists()
        assert "error:" in capsys.readouterr().err

    def test_all_records_erring_still_exits_zero(self, tmp_path):
        corpus = tmp_path / "bad.csv"
        corpus.write_text(
            "record_id,source_url,http_method,path,curl_example,parameters,"
            "request_example,response_example,description,group\n"
            "b1,https://d/x,GET,/v1/{x}/{x},,,,,,\n",
            encoding="utf-8",
        )
        out = tmp_path / "out"
        assert run(["analyze", "--input", corpus, "--out-dir", out]) == 0
        doc = json.loads((out / "dashboard.json").read_text())
        assert doc["percent_valid"] == 0.0

    def test_empty_corpus_percent_absent(self, tmp_path):
        corpus = tmp_path / "empty.csv"
        corpus.write_text(
            "record_id,source_url,http_method,path,curl_example,parameters,"
            "request_example,response_example,description,group\n",
            encoding="utf-8",
        )
        out = tmp_path / "out"
        assert run(["analyze", "--input", corpus, "--out-dir", out]) == 0
        doc = json.loads((out / "dashboard.json").read_text())
        assert "percent_valid" not in doc

    def test_out_dir_colliding_with_input_rejected(self, corpus12_path, capsys):
        assert run(["analyze", "--input", corpus12_path, "--out-dir", corpus12_path]) == 1

    def test_idempotent(self, corpus12_path, tmp_path):
        out = tmp_path / "out"
        run(["analyze", "--input", corpus12_path, "--out-dir", out])
        first = read_tree(out)
        run(["analyze", "--input", corpus12_path, "--out-dir", out])
        assert read_tree(out) == first

    def test_reanalyzing_stage_output_adds_nothing(self, corpus12_path, tmp_path):
        out1 = tmp_path / "one"
        out2 = tmp_path / "two"
        run(["analyze", "--input", corpus12_path, "--out-dir", out1])
        run(["analyze", "--input", out1 / "analyzed.csv", "--out-dir", out2])
        first = load_corpus(out1 / "analyzed.csv")
        second = load_corpus(out2 / "analyzed.csv")
        assert [r.issues for r in second] == [r.issues for r in first]

    def test_merge_flag(self, tmp_path):
        corpus = tmp_path / "dup.csv"
        corpus.write_text(
            "record_id,source_url,http_method,path,curl_example,parameters,"
            "request_example,response_example,description,group\n"
            "m1,https://d/x,GET,/v1/thing,,,,,first,\n"
            "m2,https://d/x,GET,/v1/thing,,,,,second,\n",
            encoding="utf-8",
        )
        out = tmp_path / "out"
        assert run(["analyze", "--input", corpus, "--merge", "--out-dir", out]) == 0
        stage = load_corpus(out / "analyzed.csv")
        assert len(stage) == 1
        assert str(stage[0].id) == "m1|m2"
        assert any(i.code == "W_MERGE_CONFLICT" for i in stage[0].issues)


class TestGenerate:
    def test_fixture_corpus(self, corpus12_path, tmp_path, capsys):
        out = tmp_path / "out"
        assert run(["generate", "--input", corpus12_path, "--out-dir", out]) == 0
        package = out / "package"
        assert sorted(p.name for p in package.iterdir()) == [
            "manifest.txt", "messages.txt", "misc.txt", "users.txt",
        ]
        rejects = load_corpus(out / "rejects.csv")
        assert len(rejects) == 2
        stdout = capsys.readouterr().out
        assert "rejected r11" in stdout and "rejected r12" in stdout

        report = json.loads((out / "build_report.json").read_text())
        assert len(report["functions"]) == 10

    def test_end_to_end_conservation(self, corpus12_path, tmp_path):
        out = tmp_path / "out"
        run(["generate", "--input", corpus12_path, "--out-dir", out])
        report = json.loads((out / "build_report.json").read_text())
        from collections import Counter

        package_ids = Counter(a for fn in report["functions"] for a in fn["record_id"])
        reject_ids = Counter(a for ids in report["rejected_record_ids"] for a in ids)
        input_ids = record_id_census(load_corpus(corpus12_path))
        assert package_ids + reject_ids == input_ids

    def test_strict_rejects_warning_only_records(self, corpus12_path, tmp_path):
        out = tmp_path / "out"
        assert run(["generate", "--input", corpus12_path, "--strict", "--out-dir", out]) == 0
        report = json.loads((out / "build_report.json").read_text())
        assert len(report["functions"]) == 6
        rejects = load_corpus(out / "rejects.csv")
        assert len(rejects) == 6

    def test_zero_valid_records_fails(self, tmp_path, capsys):
        corpus = tmp_path / "bad.csv"
        corpus.write_text(
            "record_id,source_url,http_method,path,curl_example,parameters,"
            "request_example,response_example,description,group\n"
            "b1,https://d/x,GET,/v1/{x}/{x},,,,,,\n",
            encoding="utf-8",
        )
        out = tmp_path / "out"
        assert run(["generate", "--input", corpus, "--out-dir", out]) == 1
        assert "nothing to generate" in capsys.readouterr().err

    def test_custom_templates_and_policy(self, corpus12_path, tmp_path):
        tpl_dir = tmp_path / "tpl"
        tpl_dir.mkdir()
        from apibind.templates import NEUTRAL_TEMPLATES

        for name, source in NEUTRAL_TEMPLATES.items():
            (tpl_dir / name).write_text(source, encoding="utf-8")
        (tpl_dir / "function.tpl").write_text(
            "def {{function_name}} -> {{response_type}}\n", encoding="utf-8"
        )
        policy = tmp_path / "policy.json"
        policy.write_text(json.dumps({"casing_function": "snake"}), encoding="utf-8")

        out = tmp_path / "out"
        code = run([
            "generate", "--input", corpus12_path, "--out-dir", out,
            "--templates", tpl_dir, "--identifier-policy", policy,
        ])
        assert code == 0
        module = (out / "package" / "misc.txt").read_text()
        assert "def get_v1_ping -> GetV1PingResponse" in module

    def test_broken_template_fails_with_name(self, corpus12_path, tmp_path, capsys):
        tpl_dir = tmp_path / "tpl"
        tpl_dir.mkdir()
        from apibind.templates import NEUTRAL_TEMPLATES

        for name, source in NEUTRAL_TEMPLATES.items():
            (tpl_dir / name).write_text(source, encoding="utf-8")
        (tpl_dir / "manifest.tpl").write_text("{{mystery}}", encoding="utf-8")
        out = tmp_path / "out"
        code = run(["generate", "--input", corpus12_path, "--out-dir", out, "--templates", tpl_dir])
        assert code == 1
        err = capsys.readouterr().err
        assert "manifest.tpl" in err and "mystery" in err

    def test_idempotent(self, corpus12_path, tmp_path):
        out = tmp_path / "out"
        run(["generate", "--input", corpus12_path, "--out-dir", out])
        first = read_tree(out)
        run(["generate", "--input", corpus12_path, "--out-dir", out])
        assert read_tree(out) == first


class TestDashboardCommand:
    def test_from_stage_csv(self, corpus12_path, tmp_path, capsys):
        out = tmp_path / "out"
        run(["analyze", "--input", corpus12_path, "--out-dir", out])
        capsys.readouterr()
        assert run(["dashboard", "--input", out / "analyzed.csv"]) == 0
        text = capsys.readouterr().out
        assert "records      12" in text
        assert "83.3%" in text

    def test_json_format(self, corpus12_path, tmp_path, capsys):
        out = tmp_path / "out"
        run(["analyze", "--input", corpus12_path, "--out-dir", out])
        capsys.readouterr()
        assert run(["dashboard", "--input", out / "analyzed.csv", "--dashboard-format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["total_records"] == 12

    def test_works_on_raw_input_too(self, corpus12_path, capsys):
        assert run(["dashboard", "--input", corpus12_path]) == 0
        assert "records      12" in capsys.readouterr().out
