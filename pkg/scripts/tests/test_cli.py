# -*- coding: utf-8 -*-
"""CLI : codes de sortie, sorties écrites, refus."""

import json

import pytest
from click.testing import CliRunner

from scripts.cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE
from scripts.cli.commands import cli

from . import write_graph_file


@pytest.fixture
def runner():
    return CliRunner()


# =============================================================================
# validate / analyze / generate / covering
# =============================================================================

def test_validate_ok_and_invalid(runner, tmp_path):
    good = write_graph_file(tmp_path / "good.json", [("a", "x", None), ("b", "y", None)], [("a", "b", 1, 1)])
    bad = write_graph_file(tmp_path / "bad.json", [("a", "x", None), ("b", "y", None)], [("a", "b", 2, 1)])
    assert runner.invoke(cli, ["validate", good]).exit_code == EXIT_OK
    result = runner.invoke(cli, ["validate", bad])
    assert result.exit_code == EXIT_USAGE
    assert "port-set" in result.output


def test_analyze_reports_b_minimality(runner):
    result = runner.invoke(cli, ["analyze", "ring:6,labels=ab,shared"])
    assert result.exit_code == EXIT_OK
    assert "B-minimal: false, base size 2" in result.output


def test_analyze_writes_base(runner, tmp_path):
    out = tmp_path / "base.json"
    result = runner.invoke(cli, ["analyze", "ring:4,anon,one-unshared", "-o", str(out)])
    assert result.exit_code == EXIT_OK
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["b_minimal"] is True


def test_bad_spec_is_usage_error(runner):
    assert runner.invoke(cli, ["analyze", "star:4"]).exit_code == EXIT_USAGE


def test_generate_graph_file(runner, tmp_path):
    out = tmp_path / "ring.json"
    assert runner.invoke(cli, ["generate", "ring:5,anon,shared", "-o", str(out)]).exit_code == EXIT_OK
    assert runner.invoke(cli, ["validate", str(out)]).exit_code == EXIT_OK


def test_generated_covering_is_accepted_then_broken(runner, tmp_path):
    assert runner.invoke(cli, ["generate", "ring:3,anon,unshared", "--sheets", "2",
                               "-o", str(tmp_path)]).exit_code == EXIT_OK
    files = [str(tmp_path / f) for f in ("total.json", "base.json", "phi.json")]
    assert runner.invoke(cli, ["covering", *files]).exit_code == EXIT_OK

    phi = json.loads((tmp_path / "phi.json").read_text(encoding="utf-8"))
    phi["vertex_map"]["v0"] = "v1"
    (tmp_path / "phi.json").write_text(json.dumps(phi), encoding="utf-8")
    assert runner.invoke(cli, ["covering", *files]).exit_code == EXIT_CHECK_FAILED


# =============================================================================
# elect
# =============================================================================

def test_elect_without_knowledge_is_refused(runner):
    result = runner.invoke(cli, ["elect", "--graph", "ring:4,anon,one-unshared", "--algorithm", "mtau",
                                 "--knowledge", "none", "--trials", "2"])
    assert result.exit_code == EXIT_USAGE
    assert "Refus" in result.output


def test_elect_las_vegas_with_bound_is_refused(runner):
    result = runner.invoke(cli, ["elect", "--graph", "ring:4,anon,one-unshared", "--algorithm", "mtau",
                                 "--knowledge", "bound:6", "--mode", "las-vegas", "--trials", "2"])
    assert result.exit_code == EXIT_USAGE


def test_elect_requires_graph(runner):
    assert runner.invoke(cli, ["elect", "--knowledge", "exact-size:3"]).exit_code == EXIT_USAGE


def test_elect_summaries_are_reproducible(runner, tmp_path):
    args = ["elect", "--graph", "path:3,distinct,shared", "--algorithm", "m", "--knowledge", "exact-size:3",
            "--trials", "3", "--seed", "9", "--workers", "1", "--budget", "50000", "-o", str(tmp_path / "run")]
    outputs = []
    for _ in range(2):
        assert runner.invoke(cli, args).exit_code == EXIT_OK
        outputs.append([(tmp_path / f"run{ext}").read_bytes() for ext in (".json", ".csv")])
    assert outputs[0] == outputs[1]
    data = json.loads((tmp_path / "run.json").read_text(encoding="utf-8"))
    assert data["counts"]["correct"] == 3


def test_elect_from_config_file(runner, tmp_path):
    config = tmp_path / "exp.yaml"
    config.write_text(
        "graph: clique:2,labels=ab,shared\nalgorithm: mtau\nknowledge: two-approx:2\n"
        "trials: 2\nworkers: 1\nbudget: 50000\n",
        encoding="utf-8",
    )
    out = tmp_path / "run"
    result = runner.invoke(cli, ["elect", "--config", str(config), "-o", str(out)])
    assert result.exit_code == EXIT_OK
    assert json.loads((tmp_path / "run.json").read_text(encoding="utf-8"))["config"]["algorithm"] == "mtau"


# =============================================================================
# check
# =============================================================================

def test_check_unknown_battery(runner):
    assert runner.invoke(cli, ["check", "nope"]).exit_code == EXIT_USAGE


def test_check_impossibility_passes(runner, tmp_path):
    out = tmp_path / "reports.json"
    result = runner.invoke(cli, ["check", "impossibility", "--seed", "1", "-o", str(out)])
    assert result.exit_code == EXIT_OK
    reports = json.loads(out.read_text(encoding="utf-8"))
    assert all(r["passed"] for r in reports)


def test_check_corrupted_impossibility_fails(runner):
    result = runner.invoke(cli, ["check", "impossibility", "--corrupt"])
    assert result.exit_code == EXIT_CHECK_FAILED
