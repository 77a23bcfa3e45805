"""
Tests for the command line driver
"""

import json

import pytest

from bergman_lab import cli
from bergman_lab.archive import read_csv_rows, read_manifest
from bergman_lab.experiments import EXPERIMENTS, Experiment, ExperimentResult
from bergman_lab.models import CriterionResult

SMOKE_CONFIG = """
experiment = wbergman
generator = gaf
window_radius = 2.0
s_grid = 1.5, 1.2
functions = constant, monomial:1
"""


@pytest.fixture
def smoke_config(tmp_path):
    path = tmp_path / "smoke.conf"
    path.write_text(SMOKE_CONFIG, encoding="utf-8")
    return str(path)


def test_list_prints_experiments(capsys):
    assert cli.main(["list"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "poincare-mass" in out
    assert "pluriharmonic" in out


def test_report_without_runs_is_incomplete(tmp_path):
    assert cli.main(["report", "--out", str(tmp_path)]) == cli.EXIT_OK
    report = json.loads((tmp_path / cli.REPORT).read_text(encoding="utf-8"))
    assert report["status"] == "incomplete"
    assert {row["status"] for row in report["criteria"]} == {"incomplete"}


def test_variance_writes_csv_manifest_and_criterion(tmp_path):
    assert cli.main(["variance", "--experiment", "poincare-mass", "--out", str(tmp_path)]) == cli.EXIT_OK
    rows = read_csv_rows(tmp_path / "poincare-mass.csv")
    assert [r["method"] for r in rows] == ["quadrature", "closed_form"]
    manifest = read_manifest(tmp_path / cli.MANIFEST)
    assert "criteria/02.json" in manifest.outputs["poincare-mass"]
    assert "poincare-mass.conf" in manifest.outputs["poincare-mass"]
    assert len(manifest.config_hash) == 64
    crit = CriterionResult.model_validate_json((tmp_path / "criteria" / "02.json").read_text(encoding="utf-8"))
    assert crit.status == "pass"

    assert cli.main(["report", "--out", str(tmp_path)]) == cli.EXIT_OK
    report = json.loads((tmp_path / cli.REPORT).read_text(encoding="utf-8"))
    assert report["criteria"][1]["status"] == "pass"
    assert report["status"] == "incomplete"


def test_outputs_are_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert cli.main(["variance", "--experiment", "poincare-mass", "--out", str(out)]) == cli.EXIT_OK
    assert (a / "poincare-mass.csv").read_bytes() == (b / "poincare-mass.csv").read_bytes()


def test_wrong_command_for_experiment(tmp_path):
    assert cli.main(["interpolate", "--experiment", "poincare-mass", "--out", str(tmp_path)]) == cli.EXIT_ERROR


def test_missing_config_is_an_error(tmp_path):
    assert cli.main(["variance", "--out", str(tmp_path)]) == cli.EXIT_ERROR
    assert cli.main(["variance", "--config", str(tmp_path / "none.conf"), "--out", str(tmp_path)]) == cli.EXIT_ERROR


def test_failed_criterion_exit_code(tmp_path, monkeypatch):
    def failing(config, ctx):
        crit = CriterionResult(id=2, name="closed-form Poincaré mass", status="fail")
        return ExperimentResult(name="poincare-mass", command="variance", criterion=crit)

    original = EXPERIMENTS["poincare-mass"]
    monkeypatch.setitem(EXPERIMENTS, "poincare-mass", Experiment(
        name=original.name, command=original.command, criterion=original.criterion, title=original.title,
        defaults=original.defaults, runner=failing))
    assert cli.main(["variance", "--experiment", "poincare-mass", "--out", str(tmp_path)]) == cli.EXIT_FAILED
    assert cli.main(["report", "--out", str(tmp_path)]) == cli.EXIT_FAILED


def test_sample_then_interpolate_from_archives(tmp_path, smoke_config):
    out = tmp_path / "run"
    assert cli.main(["sample", "--config", smoke_config, "--seeds", "1..3", "--out", str(out)]) == cli.EXIT_OK
    archives = sorted((out / "archives").glob("*.dpp"))
    assert [p.name for p in archives] == [f"gaf_d1_seed00000{i}.dpp" for i in (1, 2, 3)]
    first = archives[0].read_bytes()
    assert cli.main(["sample", "--config", smoke_config, "--seeds", "1..3", "--out", str(out)]) == cli.EXIT_OK
    assert archives[0].read_bytes() == first

    code = cli.main(["interpolate", "--config", smoke_config, "--seeds", "1..3",
                     "--archives", str(out / "archives"), "--out", str(out)])
    assert code == cli.EXIT_OK
    rows = read_csv_rows(out / "wbergman.csv")
    assert len(rows) == 3 * 2 * 1 * 2
    assert [r["seed"] for r in rows[:4]] == ["1"] * 4
    manifest = read_manifest(out / cli.MANIFEST)
    assert set(manifest.outputs) == {"sample-wbergman", "wbergman"}


def test_interpolate_with_missing_archive(tmp_path, smoke_config):
    out = tmp_path / "run"
    assert cli.main(["sample", "--config", smoke_config, "--seeds", "1..2", "--out", str(out)]) == cli.EXIT_OK
    code = cli.main(["interpolate", "--config", smoke_config, "--seeds", "1..3",
                     "--archives", str(out / "archives"), "--out", str(out)])
    assert code == cli.EXIT_ERROR
