# -*- coding: utf-8 -*-
"""Expériences : plan, refus, essais, résumés reproductibles."""

import json

import pytest

from src.anon_election.core.election_m import ConfigurationError
from src.anon_election.core.experiment import (
    CSV_COLUMNS, ElectionRefused, b_minimal_error_rate, dump_config, load_config, plan_experiment,
    run_experiment, summary_csv, summary_json, write_summary,
)
from src.anon_election.core.knowledge import KnowledgeError
from src.anon_election.core.models import ExperimentConfig, Mode


def _config(**overrides) -> ExperimentConfig:
    values = {"graph": "path:3,distinct,shared", "algorithm": "m", "knowledge": "exact-size:3",
              "trials": 4, "budget": 100_000, "workers": 1, "master_seed": 11}
    values.update(overrides)
    return ExperimentConfig(**values)


# =============================================================================
# Plan
# =============================================================================

def test_no_knowledge_is_refused():
    with pytest.raises(ElectionRefused):
        plan_experiment(_config(algorithm="mtau", knowledge="none"))


def test_las_vegas_with_bound_is_refused():
    with pytest.raises(ElectionRefused):
        plan_experiment(_config(algorithm="mtau", knowledge="bound:5", mode="las-vegas"))


def test_bound_plans_monte_carlo():
    plan = plan_experiment(_config(algorithm="mtau", knowledge="bound:5"))
    assert plan.mode == Mode.MONTE_CARLO


def test_las_vegas_on_b_minimal_exact_size():
    plan = plan_experiment(_config(mode="las-vegas"))
    assert plan.mode == Mode.LAS_VEGAS
    assert plan.b_minimal == {"path:3,distinct,shared": True}


def test_forced_monte_carlo():
    assert plan_experiment(_config(mode="monte-carlo")).mode == Mode.MONTE_CARLO


def test_algorithm_m_needs_exact_size():
    with pytest.raises(ConfigurationError):
        plan_experiment(_config(knowledge="two-approx:4"))


def test_graph_outside_family():
    with pytest.raises(KnowledgeError):
        plan_experiment(_config(knowledge="exact-size:4"))


# =============================================================================
# Essais
# =============================================================================

def test_b_minimal_path_always_elects():
    summary = run_experiment(_config())
    assert summary.counts["correct"] == 4
    assert sum(summary.counts.values()) == 4
    [graph] = summary.graphs
    assert graph.success_rate == 1.0
    assert graph.completed == 4
    assert b_minimal_error_rate(summary) == 0.0
    assert [r.trial for r in summary.trials] == [0, 1, 2, 3]


def test_same_seed_same_summary():
    first = summary_json(run_experiment(_config(master_seed=5)))
    second = summary_json(run_experiment(_config(master_seed=5)))
    assert first == second


def test_workers_do_not_change_trials():
    serial = run_experiment(_config(trials=6))
    parallel = run_experiment(_config(trials=6, workers=2))
    assert serial.trials == parallel.trials


def test_mtau_experiment_with_two_approx():
    summary = run_experiment(_config(graph="clique:2,labels=ab,shared", algorithm="mtau",
                                     knowledge="two-approx:2", trials=3))
    assert summary.counts["correct"] == 3
    assert summary.knowledge == "two-approx:2"


# =============================================================================
# Sorties
# =============================================================================

def test_summary_files(tmp_path):
    summary = run_experiment(_config(trials=2))
    json_path, csv_path = write_summary(summary, tmp_path / "out" / "run")
    assert json_path.name == "run.json"
    data = json.loads(json_path.read_text(encoding="utf-8"))
    assert data["counts"]["correct"] == 2
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    assert summary_csv(summary) == csv_path.read_text(encoding="utf-8")


def test_config_files_roundtrip(tmp_path):
    config = _config(scheduler="adaptive")
    (tmp_path / "c.json").write_text(dump_config(config), encoding="utf-8")
    assert load_config(tmp_path / "c.json") == config
    (tmp_path / "c.yaml").write_text(
        "graph: ring:4,anon,one-unshared\nalgorithm: mtau\nknowledge: two-approx:4\ntrials: 3\n",
        encoding="utf-8",
    )
    loaded = load_config(tmp_path / "c.yaml")
    assert loaded.algorithm == "mtau"
    assert loaded.scheduler == "random"
