"""Unit tests for the stylearmor CLI."""

from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest
from typer.testing import CliRunner

from conftest import FIXTURES
from stylearmor.cli import app, dispatch

runner = CliRunner()

PANCAKES = FIXTURES / "pancakes.c"
TARGET_DIR = FIXTURES / "target_author"


def _invoke(*args: str, config: Path):
    return runner.invoke(app, [*args, "--config", str(config)])


def _manifest(run_dir: Path) -> dict:
    return json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))


def _attack_report(run_dir: Path) -> dict[str, str]:
    lines = (run_dir / "attack.txt").read_text(encoding="utf-8").splitlines()
    return dict(line.split("=", 1) for line in lines)


class TestHelp:
    """Tests for the command surface."""

    def test_help(self):
        result = runner.invoke(app, ["--help"])
        assert result.exit_code == 0
        assert "coding-style attacks" in result.output
        for name in ("imitate", "gen-corpus", "train-ropgen", "matrix"):
            assert name in result.output

    def test_unknown_command(self):
        assert dispatch(["bogus"]) == 1

    def test_missing_config(self, tmp_path):
        result = runner.invoke(app, ["extract", str(PANCAKES), "--config", str(tmp_path / "absent.toml")])
        assert result.exit_code == 1


class TestAnalyze:
    """Tests for parse, extract and profile."""

    def test_parse_with_run(self, tmp_path, config_file):
        out = tmp_path / "p"
        result = _invoke("parse", str(PANCAKES), "--run", "-o", str(out), config=config_file)
        assert result.exit_code == 0, result.output
        assert (out / "pancakes.c").read_text(encoding="utf-8") == PANCAKES.read_text(encoding="utf-8")
        assert sorted(p.name for p in (out / "traces").iterdir()) == [f"{k}.trace" for k in range(5)]
        assert len(_manifest(out)["results"]["trace_statuses"]) == 5

    def test_parse_error_is_a_data_error(self, tmp_path, config_file):
        bad = tmp_path / "bad.c"
        bad.write_text("int main() {\n    return 0\n}\n", encoding="utf-8")
        result = _invoke("parse", str(bad), "-o", str(tmp_path / "p"), config=config_file)
        assert result.exit_code == 2

    def test_extract(self, tmp_path, config_file):
        out = tmp_path / "x"
        result = _invoke("extract", str(PANCAKES), "-o", str(out), config=config_file)
        assert result.exit_code == 0, result.output
        lines = (out / "pancakes.profile").read_text(encoding="utf-8").splitlines()
        assert "attr 20 set for_loop:4,while_loop:1" in lines

    def test_default_run_directory(self, tmp_path, config_file):
        """Without -o each run gets a stamped directory under output_root."""
        result = _invoke("extract", str(PANCAKES), config=config_file)
        assert result.exit_code == 0, result.output
        runs = list((tmp_path / "runs").iterdir())
        assert len(runs) == 1
        assert runs[0].name.endswith("-extract")
        manifest = _manifest(runs[0])
        assert manifest["config"]["command"] == "extract"
        assert manifest["started_at"] <= manifest["finished_at"]

    def test_profile_against(self, tmp_path, config_file):
        out = tmp_path / "pr"
        args = ["profile", str(TARGET_DIR), "--author", "target", "--against", str(PANCAKES), "-o", str(out)]
        result = _invoke(*args, config=config_file)
        assert result.exit_code == 0, result.output
        assert (out / "target.profile").read_text(encoding="utf-8").startswith("author target\nsupport 2\n")
        assert _manifest(out)["results"]["discrepancies"] == [2, 20, 23]


class TestAttack:
    """Tests for imitate, hide and perturb."""

    def test_imitate(self, tmp_path, config_file):
        out = tmp_path / "imitate"
        args = ["imitate", "--program", str(PANCAKES), "--target-corpus", str(TARGET_DIR), "--no-certify"]
        result = _invoke(*args, "-o", str(out), config=config_file)
        assert result.exit_code == 0, result.output
        report = _attack_report(out)
        assert report["target"] == "target_author"
        assert report["steps"] == "3"
        assert int(report["changed_lines"]) > 0
        assert "oracle" in report
        assert (out / "pancakes.imitate.c").exists()
        plan = (out / "pancakes.plan").read_text(encoding="utf-8").splitlines()
        assert [line.split()[1] for line in plan if line.startswith("step")] == ["2", "20", "23"]

    def test_imitate_with_budget(self, tmp_path, config_file):
        out = tmp_path / "imitate"
        args = ["imitate", "--program", str(PANCAKES), "--target-corpus", str(TARGET_DIR), "--phi", "1"]
        result = _invoke(*args, "--no-certify", "-o", str(out), config=config_file)
        assert result.exit_code == 0, result.output
        assert _attack_report(out)["steps"] == "1"

    def test_hide(self, tmp_path, config_file):
        corpus = tmp_path / "candidates"
        (corpus / "me").mkdir(parents=True)
        shutil.copy(PANCAKES, corpus / "me" / "pancakes.c")
        shutil.copytree(TARGET_DIR, corpus / "target")
        out = tmp_path / "hide"
        args = ["hide", "--program", str(PANCAKES), "--corpus", str(corpus), "--author", "me", "--no-certify"]
        result = _invoke(*args, "-o", str(out), config=config_file)
        assert result.exit_code == 0, result.output
        assert _attack_report(out)["target"] == "target"

    def test_perturb_attribute(self, tmp_path, config_file):
        out = tmp_path / "perturb"
        args = ["perturb", str(PANCAKES), "--attribute", "20", "--no-certify", "-o", str(out)]
        result = _invoke(*args, config=config_file)
        assert result.exit_code == 0, result.output
        assert _attack_report(out)["steps"] == "1"
        assert (out / "pancakes.perturb.c").exists()

    def test_extraction_only_attribute(self, tmp_path, config_file):
        result = _invoke("perturb", str(PANCAKES), "--attribute", "17", "-o", str(tmp_path / "p"), config=config_file)
        assert result.exit_code == 2

    def test_replay_plan(self, tmp_path, config_file):
        plan = tmp_path / "loops.plan"
        plan.write_text("step 20 while_to_for\n", encoding="utf-8")
        out = tmp_path / "replay"
        args = ["perturb", str(PANCAKES), "--plan", str(plan), "--no-certify", "-o", str(out)]
        result = _invoke(*args, config=config_file)
        assert result.exit_code == 0, result.output
        assert _attack_report(out)["steps"] == "1"

    def test_plan_and_attribute_conflict(self, tmp_path, config_file):
        plan = tmp_path / "loops.plan"
        plan.write_text("step 20 while_to_for\n", encoding="utf-8")
        args = ["perturb", str(PANCAKES), "--plan", str(plan), "--attribute", "20", "--config", str(config_file)]
        assert dispatch(args) == 1


class TestExperiment:
    """Tests for corpus generation, training and evaluation."""

    def _gen(self, tmp_path: Path, config_file: Path) -> Path:
        out = tmp_path / "gen"
        args = ["gen-corpus", "--authors", "2", "--programs", "2", "--tasks", "2", "--external", "1", "--seed", "0"]
        result = _invoke(*args, "-o", str(out), config=config_file)
        assert result.exit_code == 0, result.output
        return out

    def test_gen_corpus(self, tmp_path, config_file):
        out = self._gen(tmp_path, config_file)
        assert sorted(p.name for p in (out / "corpus").iterdir()) == ["a01", "a02"]
        assert len(list((out / "corpus" / "a01").glob("*.c"))) == 2
        assert len(list((out / "external" / "a02").glob("*.c"))) == 1
        assert _manifest(out)["results"]["programs"] == 4

    def test_gen_corpus_one_author(self, tmp_path, config_file):
        result = _invoke("gen-corpus", "--authors", "1", "-o", str(tmp_path / "gen"), config=config_file)
        assert result.exit_code == 2

    def test_train(self, tmp_path, config_file):
        corpus = self._gen(tmp_path, config_file)
        out = tmp_path / "train"
        result = _invoke("train", str(corpus), "--epochs", "2", "-o", str(out), config=config_file)
        assert result.exit_code == 0, result.output
        assert (out / "model.npz").exists()
        assert len(_manifest(out)["results"]["loss_history"]) == 2

    def test_unknown_attack(self, tmp_path, config_file):
        corpus = self._gen(tmp_path, config_file)
        model = tmp_path / "model.npz"
        model.write_bytes(b"")
        args = ["evaluate", "--model", str(model), "--corpus", str(corpus), "--attack", "bogus"]
        assert dispatch([*args, "--config", str(config_file)]) == 1

    @pytest.mark.slow
    def test_train_ropgen_and_evaluate(self, tmp_path, config_file):
        corpus = self._gen(tmp_path, config_file)
        trained = tmp_path / "ropgen"
        result = _invoke("train-ropgen", str(corpus), "--epochs", "2", "-o", str(trained), config=config_file)
        assert result.exit_code == 0, result.output
        rows = (trained / "provenance.tsv").read_text(encoding="utf-8").splitlines()
        assert rows[0] == "source\tlabel\torigin\tdetail\tsteps"
        assert sum(row.split("\t")[2] == "original" for row in rows[1:]) == 4
        out = tmp_path / "eval"
        args = ["evaluate", "--model", str(trained / "model.npz"), "--corpus", str(corpus), "--attack", "hide"]
        result = _invoke(*args, "--no-certify", "-o", str(out), config=config_file)
        assert result.exit_code == 0, result.output
        assert (out / "report.txt").read_text(encoding="utf-8").startswith("# stylearmor evaluation report\n")

    @pytest.mark.slow
    def test_matrix(self, tmp_path, config_file):
        corpus = self._gen(tmp_path, config_file)
        out = tmp_path / "matrix"
        args = ["matrix", str(corpus), "-d", "baseline", "-d", "no-cp-ga", "--attack", "hide", "--max-folds", "1"]
        result = _invoke(*args, "--epochs", "2", "--no-certify", "-o", str(out), config=config_file)
        assert result.exit_code == 0, result.output
        assert sorted(p.name for p in (out / "reports").iterdir()) == ["-CP-GA__hide.txt", "baseline__hide.txt"]
