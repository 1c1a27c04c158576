#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Recette complète anon-election : les critères d'acceptation en phases numérotées.

13 phases, toutes exécutées localement (aucun service externe) :
   1. Relèvement        : paires de revêtement, rondes synchrones, égalité fibre par fibre
   2. Oracle            : minimal_base ≡ recherche exhaustive (≤ 7 sommets)
   3. Suffisance        : M + exact-size sur des réseaux B-minimaux, élection correcte
   4. Impossibilité     : C6/C3 et C4/C2 à sources partagées par fibre, jamais correct
   5. Monotonie         : n, b̄, N, M à chaque pas des traces de la phase 3
   6. Rayon (M_τ)       : Dir(G) quasi-revêtement de D_M(v) de rayon c(v)
   7. Compteurs (M_τ)   : discipline des compteurs sur les mêmes traces
   8. Feuillets         : q feuillets pour r ≥ q·|V(D₀)|
   9. Quasi-relèvement  : rayon résiduel r − k et égalité au centre
  10. Las Vegas         : M_τ + two-approx:T, T ∈ {6, 8, 10}
  11. Monte Carlo       : M_τ + bk:2 sur un corpus mixte, taux d'erreur
  12. Refus             : elect sans connaissance, Las Vegas avec bound:S
  13. Reproductibilité  : mêmes graines ⇒ résumés identiques octet pour octet

Usage :
    python scripts/test_recette.py           # tailles réduites (quelques minutes)
    python scripts/test_recette.py --full    # tailles des critères d'acceptation
"""

import argparse
import json
import os
import sys
import time
from pathlib import Path

# S'assurer que scripts/ et la racine sont dans le path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from tests import check, fail, get_counters, ok, phase_header, reset_counters, skip  # noqa: E402

from click.testing import CliRunner  # noqa: E402

from src.anon_election import __version__  # noqa: E402
from src.anon_election.config import settings  # noqa: E402
from src.anon_election.core.coverings import (  # noqa: E402
    brute_force_base_oracle, check_sheet_bound, is_b_minimal, minimal_base,
)
from src.anon_election.core.election_m import MAlgorithm, evaluate_outcome, final_numbers  # noqa: E402
from src.anon_election.core.experiment import (  # noqa: E402
    b_minimal_error_rate, run_experiment, summary_json,
)
from src.anon_election.core.families import (  # noqa: E402
    generate, generate_quasi_covering_path, load_corpus, quasi_covering_corpus,
)
from src.anon_election.core.graph import build_dir  # noqa: E402
from src.anon_election.core.models import ExperimentConfig, Outcome, RunStatus  # noqa: E402
from src.anon_election.core.randomness import SourceAssignment, derive_seed  # noqa: E402
from src.anon_election.core.runtime import RandomPolicy, run  # noqa: E402
from src.anon_election.core.verifier import (  # noqa: E402
    MonotonicityMonitor, impossibility_fixtures, impossibility_witness, run_battery,
)
from scripts.cli import EXIT_OK, EXIT_USAGE  # noqa: E402
from scripts.cli.commands import cli  # noqa: E402

CORPUS_DIR = ROOT / "CORPUS"


def _failed_reports(reports) -> str:
    bad = [r for r in reports if not r.passed]
    if not bad:
        return ""
    r = bad[0]
    c = r.counterexample
    where = f" pas {c.step}, sommet {c.vertex}" if c else ""
    return f"{len(bad)} échec(s), premier : {r.instance}{where} (graines {r.seeds})"


# =============================================================================
# Phases
# =============================================================================

def phase_lifting(full: bool, seed: int):
    phase_header(1, "Relèvement le long des revêtements", "🧩")
    reports = run_battery("lifting", seed=seed, quick=not full)
    check(all(r.passed for r in reports), f"{len(reports)} paires relevées", _failed_reports(reports))
    if full and len(reports) < 50:
        fail("≥ 50 paires", f"{len(reports)} seulement")


def _oracle_specs(full: bool):
    layouts = ["anon,shared", "anon,unshared", "anon,one-unshared",
               "labels=ab,shared", "anon,classes=ab", "labels=aab,classes=ba"]
    specs = []
    for n in range(3, 8):
        specs += [f"ring:{n},{layout}" for layout in layouts]
    for n in range(2, 8):
        specs += [f"path:{n},{layout}" for layout in layouts]
    for n in range(2, 7):
        specs += [f"clique:{n},{layout}" for layout in layouts]
    seeds = range(10) if full else range(2)
    for n in range(4, 8):
        for degree in (2, 3):
            for s in seeds:
                specs += [f"random:{n}:{degree}:{s},anon,shared", f"random:{n}:{degree}:{s},anon,classes=ab"]
    return specs if full else specs[::4]


def phase_oracle(full: bool):
    phase_header(2, "Base minimale contre oracle exhaustif", "🔬")
    specs = _oracle_specs(full)
    mismatches = []
    for spec in specs:
        d = build_dir(generate(spec), with_sources=True)
        base, _ = minimal_base(d)
        if len(brute_force_base_oracle(d)[0]) != len(base):
            mismatches.append(spec)
    check(not mismatches, f"{len(specs)} digraphes comparés", ", ".join(mismatches[:5]))


def phase_sufficiency(full: bool, seed: int, monitor: MonotonicityMonitor):
    phase_header(3, "Suffisance : M avec taille exacte sur réseaux B-minimaux", "🗳️")
    trials = 200 if full else 10
    graphs = load_corpus("b-minimal", CORPUS_DIR)
    for g in graphs:
        if not is_b_minimal(g):
            skip(g.name, "non B-minimal")
            continue
        d = build_dir(g)
        bad = []
        for i in range(trials):
            s = derive_seed(seed, "sufficiency", g.name, i)
            trace = run(d, MAlgorithm(len(g)), SourceAssignment.from_graph(g, s),
                        RandomPolicy(derive_seed(s, "scheduler")), budget=settings.event_budget,
                        snapshot_stride=0, monitors=[monitor])
            result = evaluate_outcome(trace)
            numbers = sorted(final_numbers(trace).values())
            if trace.status != RunStatus.TERMINATED or result.outcome != Outcome.CORRECT \
                    or numbers != list(range(1, len(g) + 1)):
                bad.append((i, result.outcome.value, numbers))
        check(not bad, f"{g.name} : {trials} essais corrects", f"{len(bad)} échec(s), premier {bad[:1]}")


def phase_impossibility(full: bool, seed: int):
    phase_header(4, "Impossibilité sur les revêtements à deux feuillets", "🚫")
    count = 100 if full else 10
    for total, base, phi, n_total, description in impossibility_fixtures():
        seeds = [derive_seed(seed, "impossibility", n_total, j) for j in range(count)]
        report = impossibility_witness(total, base, phi, MAlgorithm(n_total), budget=20_000, seeds=seeds)
        outcomes = report.details["outcomes"]
        terminal = {k for k in outcomes if k != Outcome.UNDECIDED.value}
        check(report.passed and terminal <= {Outcome.MULTIPLE_ELECTED.value},
              f"{description} : {count} graines", json.dumps(outcomes))


def phase_monotonicity(monitor: MonotonicityMonitor):
    phase_header(5, "Monotonie des états", "📈")
    check(not monitor.violations, "aucune violation sur les traces de la phase 3",
          str(monitor.first) if monitor.first else "")


def phase_counters(full: bool, seed: int):
    phase_header(6, "M_τ : rayon des quasi-revêtements", "🎯")
    rounds = 8 if full else 1
    reports = []
    for j in range(rounds):
        reports += run_battery("prop-a5", seed=derive_seed(seed, "prop-a5-round", j), quick=not full)
    radius = [r for r in reports if r.details.get("failed_monitor") == "quasi-covering"]
    counters = [r for r in reports if r.details.get("failed_monitor") == "counters"]
    checked = sum(r.details.get("radius_checks", 0) for r in reports)
    check(not radius, f"{len(reports)} essais M_τ, {checked} contrôles de rayon", _failed_reports(radius))
    if full and len(reports) < 50:
        fail("≥ 50 essais M_τ", f"{len(reports)} seulement")

    phase_header(7, "M_τ : discipline des compteurs", "🔢")
    check(not counters, f"{len(reports)} essais M_τ", _failed_reports(counters))
    others = [r for r in reports if not r.passed and r not in radius and r not in counters]
    check(not others, "monotonie et stabilisation pendant M_τ", _failed_reports(others))


def phase_sheets(full: bool):
    phase_header(8, "Nombre de feuillets des quasi-revêtements", "📐")
    witnesses = quasi_covering_corpus(settings.quasi_max_radius if full else 8)
    lengths = range(13, 73, 2) if full else range(13, 25, 2)
    witnesses += [generate_quasi_covering_path(length, base) for base in (3, 4, 5) for length in lengths]
    for q in (2, 3):
        applicable = [w for w in witnesses if w.proper and w.radius >= q * len(w.d0)]
        bad = [w for w in applicable if not check_sheet_bound(w, q)]
        check(not bad, f"q = {q} : {len(applicable)} témoins applicables",
              ", ".join(f"{w.d1.name}/{w.d0.name}" for w in bad[:3]))
        if full and len(applicable) < 100:
            fail(f"≥ 100 témoins pour q = {q}", f"{len(applicable)} seulement")


def phase_quasi_lifting(full: bool, seed: int):
    phase_header(9, "Quasi-relèvement", "🌀")
    reports = run_battery("quasi-lifting", seed=seed, quick=not full)
    check(all(r.passed for r in reports), f"{len(reports)} (témoin, k) vérifiés", _failed_reports(reports))


def _experiment(graph: str, algorithm: str, knowledge: str, trials: int, seed: int, **extra):
    config = ExperimentConfig(graph=graph, algorithm=algorithm, knowledge=knowledge, trials=trials,
                              master_seed=seed, budget=settings.event_budget, **extra)
    return run_experiment(config)


def phase_las_vegas(full: bool, seed: int):
    phase_header(10, "M_τ Las Vegas avec two-approx:T", "🎲")
    trials = 200 if full else 5
    for t in (6, 8, 10):
        for size in (t // 2 + 1, t):
            spec = f"ring:{size},anon,one-unshared"
            summary = _experiment(spec, "mtau", f"two-approx:{t}", trials, seed)
            check(summary.counts[Outcome.CORRECT.value] == trials,
                  f"{spec} [two-approx:{t}] : {trials} essais", json.dumps(summary.counts))


def phase_monte_carlo(full: bool, seed: int):
    phase_header(11, "M_τ Monte Carlo avec bk:2 (corpus mixte)", "🎰")
    trials = 200 if full else 10
    summary = _experiment("corpus:mixed", "mtau", "bk:2",
                          trials, seed)
    undecided = summary.counts[Outcome.UNDECIDED.value]
    check(undecided == 0, f"{len(summary.trials)} essais terminés", f"{undecided} indécis")
    for g in summary.graphs:
        ok(g.graph, f"B-minimal={g.b_minimal}, erreur {g.error_rate:.3f} sur {g.completed}")
    rate = b_minimal_error_rate(summary)
    if rate is None:
        skip("taux d'erreur B-minimal", "aucun membre B-minimal")
    else:
        check(rate <= settings.monte_carlo_error_threshold,
              f"taux d'erreur B-minimal {rate:.3f} ≤ {settings.monte_carlo_error_threshold}")


def phase_refusal():
    phase_header(12, "Refus de la commande elect", "✋")
    runner = CliRunner()
    base = ["elect", "--graph", "ring:4,anon,one-unshared", "--algorithm", "mtau", "--trials", "2",
            "--workers", "1"]
    result = runner.invoke(cli, [*base, "--knowledge", "none"])
    check(result.exit_code == EXIT_USAGE and "Refus" in result.output, "knowledge none refusé (code 2)")
    result = runner.invoke(cli, [*base, "--knowledge", "bound:6", "--mode", "las-vegas"])
    check(result.exit_code == EXIT_USAGE, "Las Vegas avec bound:6 refusé (code 2)")
    result = runner.invoke(cli, [*base, "--knowledge", "bound:6"])
    check(result.exit_code == EXIT_OK and '"mode": "monte-carlo"' in result.output,
          "bound:6 exécuté en Monte Carlo")


def phase_reproducibility(seed: int):
    phase_header(13, "Reproductibilité", "🔁")
    first = summary_json(_experiment("corpus:small", "mtau", "two-approx:4", 3, seed, workers=1))
    second = summary_json(_experiment("corpus:small", "mtau", "two-approx:4", 3, seed, workers=2))
    # la config (workers) fait partie du résumé : on compare les essais
    check(json.loads(first)["trials"] == json.loads(second)["trials"], "essais identiques quel que soit workers")
    again = summary_json(_experiment("corpus:small", "mtau", "two-approx:4", 3, seed, workers=1))
    check(first == again, "résumé JSON identique octet pour octet")
    reports = [r.model_dump_json() for r in run_battery("impossibility", seed=seed)]
    check(reports == [r.model_dump_json() for r in run_battery("impossibility", seed=seed)],
          "rapports de vérification identiques")


# =============================================================================
# Point d'entrée
# =============================================================================

def main():
    parser = argparse.ArgumentParser(description="Recette anon-election")
    parser.add_argument("--full", action="store_true", help="Tailles des critères d'acceptation")
    parser.add_argument("--seed", type=int, default=settings.master_seed, help="Graine maîtresse")
    args = parser.parse_args()
    os.chdir(ROOT)

    print("=" * 70)
    print(f"🧪 RECETTE COMPLÈTE — Anon Election v{__version__}")
    print(f"   Mode    : {'complet' if args.full else 'rapide'}")
    print(f"   Graine  : {args.seed}")
    print("   Phases  : 13 (relèvement, oracle, élection, impossibilité, M_τ, quasi-revêtements, CLI)")
    print("=" * 70)

    t0 = time.monotonic()
    reset_counters()
    monitor = MonotonicityMonitor()

    try:
        phase_lifting(args.full, args.seed)
        phase_oracle(args.full)
        phase_sufficiency(args.full, args.seed, monitor)
        phase_impossibility(args.full, args.seed)
        phase_monotonicity(monitor)
        phase_counters(args.full, args.seed)
        phase_sheets(args.full)
        phase_quasi_lifting(args.full, args.seed)
        phase_las_vegas(args.full, args.seed)
        phase_monte_carlo(args.full, args.seed)
        phase_refusal()
        phase_reproducibility(args.seed)
    except Exception as e:
        print(f"\n💥 ERREUR FATALE: {e}")
        import traceback
        traceback.print_exc()
        fail("recette interrompue", str(e))

    elapsed = round(time.monotonic() - t0, 1)
    c = get_counters()

    # Rapport final
    print(f"\n{'=' * 70}")
    print("📊 RAPPORT FINAL")
    print("=" * 70)
    print(f"  ✅ Réussis  : {c['passed']}")
    print(f"  ❌ Échoués  : {c['failed']}")
    print(f"  ⏭️  Ignorés  : {c['skipped']}")
    print(f"  ⏱️  Durée    : {elapsed}s")

    if c["errors"]:
        print("\n  🔴 Détail des échecs :")
        for err in c["errors"]:
            print(f"    {err}")

    print()
    if c["failed"] == 0:
        print("  🎉 RECETTE RÉUSSIE — Tous les critères OK !")
    else:
        print(f"  🚨 RECETTE ÉCHOUÉE — {c['failed']} test(s) en échec")

    print("=" * 70)
    sys.exit(1 if c["failed"] > 0 else 0)


if __name__ == "__main__":
    main()
