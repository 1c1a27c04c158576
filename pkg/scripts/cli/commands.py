# -*- coding: utf-8 -*-
"""
Commandes Click pour la CLI Anon Election.

Commandes disponibles :
  - validate PATH              : Valider un fichier de graphe
  - analyze SOURCE             : Base minimale et B-minimalité
  - elect                      : Lancer des essais d'élection (flags ou --config)
  - check BATTERY              : Batteries de vérification (lifting, quasi-lifting, prop-a5, impossibility, all)
  - generate SPEC              : Générer un graphe (ou un revêtement avec --sheets)
  - covering TOTAL BASE HOM    : Vérifier un revêtement symétrique
"""

import json
import sys
from pathlib import Path

import click
from pydantic import ValidationError

from src.anon_election.config import settings
from src.anon_election.core.coverings import CoveringError, is_b_minimal, is_symmetric_covering, minimal_base
from src.anon_election.core.election_m import ConfigurationError
from src.anon_election.core.experiment import (
    ElectionRefused, load_config, plan_experiment, run_experiment, write_summary, summary_json,
)
from src.anon_election.core.families import (
    GeneratorError, generate, generate_covering_pair, resolve_graph,
)
from src.anon_election.core.graph import (
    GraphValidationError, HomomorphismError, build_dir, dump_digraph, dump_graph, dump_homomorphism,
    load_digraph, load_graph, load_homomorphism,
)
from src.anon_election.core.knowledge import KnowledgeError
from src.anon_election.core.models import ExperimentConfig
from src.anon_election.core.verifier import BATTERIES, CheckError, run_battery

from . import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE
from .display import (
    console, show_analysis, show_digraph, show_error, show_graph_ok, show_reports, show_success,
    show_summary, show_violations, show_warning,
)

USAGE_ERRORS = (GraphValidationError, GeneratorError, KnowledgeError, ConfigurationError,
                HomomorphismError, CoveringError, CheckError, ValidationError)


def _write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


# =============================================================================
# Groupe principal
# =============================================================================

@click.group(invoke_without_command=True)
@click.option("--debug", is_flag=True, default=False, help="Trace chaque événement du simulateur (stderr)")
@click.pass_context
def cli(ctx, debug):
    """🗳️ Anon Election CLI - Élection randomisée dans les réseaux anonymes.

    \b
    Exemples:
      anon-cli validate graph.json                     # Valider un graphe
      anon-cli analyze "ring:6,anon,classes=ab"        # Base minimale
      anon-cli elect --graph "ring:5,anon,one-unshared" --algorithm m --knowledge exact-size:5
      anon-cli check all                               # Toutes les batteries
    """
    ctx.ensure_object(dict)
    ctx.obj["debug"] = debug
    if debug:
        settings.sim_debug = True
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


# =============================================================================
# Graphes
# =============================================================================

@cli.command()
@click.argument("path", type=click.Path())
def validate(path):
    """✅ Valider un fichier de graphe (JSON ou YAML)."""
    try:
        g = load_graph(path)
    except GraphValidationError as e:
        show_violations(e.violations, path)
        sys.exit(EXIT_USAGE)
    show_graph_ok(g)
    sys.exit(EXIT_OK)


@cli.command()
@click.argument("source")
@click.option("--with-sources/--labels-only", default=True, help="Inclure les classes de sources dans les étiquettes")
@click.option("--output", "-o", type=click.Path(), default=None, help="Écrire la base minimale (JSON)")
def analyze(source, with_sources, output):
    """🔬 Base minimale et B-minimalité d'un graphe (fichier ou spec)."""
    try:
        g = resolve_graph(source)
        d = build_dir(g, with_sources=with_sources)
        base, phi = minimal_base(d)
        b_minimal = is_b_minimal(g)
    except USAGE_ERRORS as e:
        show_error(str(e))
        sys.exit(EXIT_USAGE)
    show_analysis(g, d, base, b_minimal, with_sources)
    if len(base) < len(d):
        show_digraph(base, f"📐 Base minimale de {g.name}")
    if output:
        _write_json(Path(output), {"base": dump_digraph(base), "phi": dump_homomorphism(phi),
                                   "b_minimal": b_minimal})
        show_success(f"Base écrite dans {output}")
    sys.exit(EXIT_OK)


@cli.command("generate")
@click.argument("spec")
@click.option("--output", "-o", type=click.Path(), default=None,
              help="Fichier de sortie (répertoire avec --sheets)")
@click.option("--sheets", type=int, default=None, help="Générer un revêtement à SHEETS feuillets de la spec")
def generate_cmd(spec, output, sheets):
    """🧪 Générer un graphe depuis une spec (ex: ring:6,anon,classes=ababab)."""
    try:
        if sheets is None:
            g = generate(spec)
            data = dump_graph(g)
            if output:
                _write_json(Path(output), data)
                show_success(f"{g.name} ({len(g)} sommets) écrit dans {output}")
            else:
                console.print_json(json.dumps(data, sort_keys=True))
            sys.exit(EXIT_OK)

        pair = generate_covering_pair(spec, sheets)
        target = Path(output or ".")
        _write_json(target / "total.json", dump_digraph(pair.total_dir))
        _write_json(target / "base.json", dump_digraph(pair.base_dir))
        _write_json(target / "phi.json", dump_homomorphism(pair.phi))
        show_success(f"{pair.total.name} -> {pair.base.name} ({sheets} feuillets) écrit dans {target}")
    except USAGE_ERRORS as e:
        show_error(str(e))
        sys.exit(EXIT_USAGE)
    sys.exit(EXIT_OK)


@cli.command()
@click.argument("total", type=click.Path())
@click.argument("base", type=click.Path())
@click.argument("hom", type=click.Path())
def covering(total, base, hom):
    """🧩 Vérifier qu'un homomorphisme est un revêtement symétrique."""
    try:
        d1, d0 = load_digraph(total), load_digraph(base)
        phi = load_homomorphism(hom, d1.name, d0.name).retarget(d1.name, d0.name)
        verdict = is_symmetric_covering(d1, d0, phi)
    except USAGE_ERRORS as e:
        show_error(str(e))
        sys.exit(EXIT_USAGE)
    if not verdict.accepted:
        for reason in verdict.reasons:
            show_error(reason)
        sys.exit(EXIT_CHECK_FAILED)
    show_success(f"{d1.name} -> {d0.name} : revêtement symétrique à {verdict.sheet_count} feuillet(s)")
    sys.exit(EXIT_OK)


# =============================================================================
# Élection
# =============================================================================

@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Configuration JSON ou YAML (les flags la surchargent)")
@click.option("--graph", default=None, help="Fichier, spec de générateur ou corpus:NOM")
@click.option("--algorithm", type=click.Choice(["m", "mtau"]), default=None)
@click.option("--knowledge", default=None, help="exact-size:N, bound:S, two-approx:T, topology:FILE, bk:K, none")
@click.option("--scheduler", type=click.Choice(["synchronous", "random", "adaptive"]), default=None)
@click.option("--mode", type=click.Choice(["auto", "las-vegas", "monte-carlo"]), default=None)
@click.option("--seed", "master_seed", type=int, default=None, help="Graine maîtresse")
@click.option("--trials", type=int, default=None)
@click.option("--budget", type=int, default=None, help="Budget d'événements par essai")
@click.option("--output", "-o", default=None, help="Préfixe des fichiers de résumé (.json, .csv)")
@click.option("--snapshot-stride", type=int, default=None)
@click.option("--workers", type=int, default=None, help="Processus parallèles (défaut : tous les cœurs)")
def elect(config_path, **flags):
    """🗳️ Lancer des essais d'élection et écrire le résumé."""
    try:
        base = load_config(config_path).model_dump() if config_path else {
            "trials": settings.default_trials, "budget": settings.event_budget,
            "master_seed": settings.master_seed,
        }
        base.update({k: v for k, v in flags.items() if v is not None})
        if "graph" not in base or base["graph"] is None:
            raise click.UsageError("--graph ou --config requis")
        config = ExperimentConfig.model_validate(base)
        plan = plan_experiment(config)
    except ElectionRefused as e:
        show_error(f"Refus : {e}")
        sys.exit(EXIT_USAGE)
    except USAGE_ERRORS as e:
        show_error(str(e))
        sys.exit(EXIT_USAGE)

    summary = run_experiment(config, plan)
    show_summary(summary)
    if config.output:
        json_path, csv_path = write_summary(summary, config.output)
        show_success(f"Résumé : {json_path}, {csv_path}")
    else:
        click.echo(summary_json(summary), nl=False)
    undecided = summary.counts.get("undecided", 0)
    if undecided:
        show_warning(f"{undecided} essai(s) indécis dans le budget")
    sys.exit(EXIT_OK)


# =============================================================================
# Vérifications
# =============================================================================

@cli.command()
@click.argument("battery", type=click.Choice([*BATTERIES, "all"]))
@click.option("--seed", type=int, default=None, help="Graine maîtresse des vérifications")
@click.option("--corrupt", is_flag=True, default=False, help="Contrôle négatif : corrompt sources ou γ")
@click.option("--full", is_flag=True, default=False, help="Corpus complet au lieu du corpus rapide")
@click.option("--output", "-o", type=click.Path(), default=None, help="Écrire les rapports (JSON)")
def check(battery, seed, corrupt, full, output):
    """🔎 Lancer une batterie de vérifications ; code 1 si une vérification échoue."""
    seed = settings.master_seed if seed is None else seed
    try:
        reports = run_battery(battery, seed=seed, corrupt=corrupt, quick=not full)
    except USAGE_ERRORS as e:
        show_error(str(e))
        sys.exit(EXIT_USAGE)
    show_reports(reports)
    if output:
        _write_json(Path(output), [r.model_dump(mode="json") for r in reports])
    failed = sum(1 for r in reports if not r.passed)
    if failed:
        show_error(f"{failed} vérification(s) en échec")
        sys.exit(EXIT_CHECK_FAILED)
    show_success(f"{len(reports)} vérification(s) réussie(s)")
    sys.exit(EXIT_OK)
