# -*- coding: utf-8 -*-
"""
Orchestration des expériences d'élection (commande elect).

Une ExperimentConfig détermine entièrement l'expérience : graphes, algorithme,
connaissance, ordonnanceur, graine maîtresse, nombre d'essais et budget.
La graine de l'essai i est derive_seed(master, "trial", graphe, i) : le
nombre de workers ne change jamais les résultats.
"""

import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import yaml

from ..config import settings
from .coverings import is_b_minimal
from .election_m import ConfigurationError, MAlgorithm, evaluate_outcome
from .election_mtau import MTauAlgorithm
from .families import resolve_graphs
from .graph import LabeledGraph, build_dir
from .knowledge import ExactSize, Knowledge, Topology, check_corpus, decide_mode, parse_knowledge
from .models import ExperimentConfig, GraphSummary, Mode, Outcome, TrialRecord, TrialSummary
from .randomness import SourceAssignment, derive_seed
from .runtime import AdaptivePolicy, RandomPolicy, SynchronousPolicy, run


class ElectionRefused(ValueError):
    """Expérience refusée avant tout essai (aucune τ, ou Las Vegas impossible)."""


CSV_COLUMNS = ("trial", "outcome", "steps", "bits", "elected_vertex")


# =============================================================================
# Configuration
# =============================================================================

def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Fichier JSON ou YAML."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    data = yaml.safe_load(text) if path.suffix in (".yaml", ".yml") else json.loads(text)
    return ExperimentConfig.model_validate(data or {})


def dump_config(config: ExperimentConfig) -> str:
    return json.dumps(config.model_dump(mode="json"), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class ExperimentPlan:
    config: ExperimentConfig
    graphs: List[LabeledGraph]
    knowledge: Knowledge
    mode: Mode
    b_minimal: Dict[str, bool]


def n_total_for(knowledge: Knowledge) -> int:
    """M a besoin de la taille exacte."""
    if isinstance(knowledge, ExactSize):
        return knowledge.size
    if isinstance(knowledge, Topology):
        return len(knowledge.digraph)
    raise ConfigurationError(
        f"L'algorithme m exige la taille exacte (exact-size:N ou topology:FILE), reçu {knowledge.describe()}")


def plan_experiment(config: ExperimentConfig) -> ExperimentPlan:
    """Charge les graphes, vérifie la connaissance et choisit le mode (ou refuse)."""
    knowledge = parse_knowledge(config.knowledge)
    graphs = resolve_graphs(config.graph)
    mode = decide_mode(knowledge, graphs)
    if mode == Mode.REFUSE:
        raise ElectionRefused(
            "Aucune connaissance : l'élection n'est pas possible quand rien n'est connu "
            "(des quasi-revêtements propres de rayon arbitraire existent, aucune τ ne borne l'attente)")
    check_corpus(knowledge, graphs)
    if config.algorithm == "m":
        n_total_for(knowledge)
    if config.mode == "las-vegas" and mode != Mode.LAS_VEGAS:
        raise ElectionRefused(
            f"Las Vegas refusé pour {knowledge.describe()} sur {config.graph} : seule une exécution "
            "Monte Carlo est garantie (connaissance sans τ pour les quasi-revêtements, ou corpus non B-minimal)")
    if config.mode == "monte-carlo":
        mode = Mode.MONTE_CARLO
    b_minimal = {g.name: is_b_minimal(knowledge.prepare(g)) for g in graphs}
    return ExperimentPlan(config, graphs, knowledge, mode, b_minimal)


# =============================================================================
# Essais
# =============================================================================

def _policy(scheduler: str, seed: int):
    if scheduler == "synchronous":
        return SynchronousPolicy()
    if scheduler == "adaptive":
        return AdaptivePolicy(seed)
    return RandomPolicy(seed)


def run_trial(g: LabeledGraph, knowledge: Knowledge, config: ExperimentConfig, trial: int) -> TrialRecord:
    """Un essai : sources et ordonnanceur dérivés de (graine maîtresse, graphe, essai)."""
    seed = derive_seed(config.master_seed, "trial", g.name, trial)
    prepared = knowledge.prepare(g)
    d = build_dir(prepared)
    alg = MAlgorithm(n_total_for(knowledge)) if config.algorithm == "m" else MTauAlgorithm(knowledge)
    src = SourceAssignment.from_graph(prepared, seed)
    trace = run(d, alg, src, _policy(config.scheduler, derive_seed(seed, "scheduler")),
                budget=config.budget, snapshot_stride=config.snapshot_stride)
    result = evaluate_outcome(trace)
    return TrialRecord(
        trial=trial, graph=g.name, outcome=result.outcome, status=trace.status, steps=trace.steps,
        bits=len(trace.draw_log), elected_vertex=result.elected,
        decisions={v: s.decision.value if s.decision else None for v, s in sorted(trace.final_states.items())},
    )


def _trial_job(job: Tuple[LabeledGraph, Knowledge, ExperimentConfig, int]) -> TrialRecord:
    return run_trial(*job)


def _summarize_graph(g: LabeledGraph, records: List[TrialRecord], plan: ExperimentPlan) -> GraphSummary:
    counts = {o.value: 0 for o in Outcome}
    for r in records:
        counts[r.outcome.value] += 1
    completed = sum(1 for r in records if r.outcome != Outcome.UNDECIDED)
    correct = counts[Outcome.CORRECT.value]
    return GraphSummary(
        graph=g.name, vertices=len(g), b_minimal=plan.b_minimal[g.name], mode=plan.mode,
        trials=len(records), counts=counts, completed=completed,
        success_rate=correct / completed if completed else 0.0,
        error_rate=(completed - correct) / completed if completed else 0.0,
    )


def run_experiment(config: ExperimentConfig, plan: Optional[ExperimentPlan] = None) -> TrialSummary:
    """Tous les essais sur tous les graphes ; ordre des résultats indépendant du parallélisme."""
    plan = plan or plan_experiment(config)
    jobs = [(g, plan.knowledge, config, i) for g in plan.graphs for i in range(config.trials)]
    workers = config.workers or settings.trial_workers or os.cpu_count() or 1
    print(f"🗳️ [Experiment] {len(jobs)} essais ({config.algorithm}, {plan.knowledge.describe()}, "
          f"{plan.mode.value}) sur {workers} worker(s)", file=sys.stderr)

    if workers <= 1 or len(jobs) <= 1:
        records = [_trial_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            records = list(executor.map(_trial_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))

    graphs = []
    for g in plan.graphs:
        graphs.append(_summarize_graph(g, [r for r in records if r.graph == g.name], plan))
    totals = {o.value: 0 for o in Outcome}
    for r in records:
        totals[r.outcome.value] += 1

    undecided = totals[Outcome.UNDECIDED.value]
    if undecided:
        print(f"⚠️ [Experiment] {undecided} essai(s) sans décision dans le budget de {config.budget} événements",
              file=sys.stderr)
    return TrialSummary(config=config, knowledge=plan.knowledge.describe(), graphs=graphs,
                        trials=records, counts=totals)


def b_minimal_error_rate(summary: TrialSummary) -> Optional[float]:
    """Taux d'erreur agrégé sur les graphes B-minimaux (None s'il n'y en a pas)."""
    members = [g for g in summary.graphs if g.b_minimal and g.completed]
    completed = sum(g.completed for g in members)
    if not completed:
        return None
    errors = sum(g.completed - g.counts.get(Outcome.CORRECT.value, 0) for g in members)
    return errors / completed


# =============================================================================
# Sorties
# =============================================================================

def summary_json(summary: TrialSummary) -> str:
    return json.dumps(summary.model_dump(mode="json"), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def summary_csv(summary: TrialSummary) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in summary.trials:
        writer.writerow([r.trial, r.outcome.value, r.steps, r.bits, r.elected_vertex or ""])
    return buffer.getvalue()


def write_summary(summary: TrialSummary, prefix: Union[str, Path]) -> Tuple[Path, Path]:
    """<prefix>.json et <prefix>.csv ; mêmes entrées ⇒ fichiers identiques octet pour octet."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    json_path = prefix.with_name(prefix.name + ".json")
    csv_path = prefix.with_name(prefix.name + ".csv")
    json_path.write_text(summary_json(summary), encoding="utf-8")
    csv_path.write_text(summary_csv(summary), encoding="utf-8")
    print(f"💾 [Experiment] résumé écrit : {json_path}, {csv_path}", file=sys.stderr)
    return json_path, csv_path
