# -*- coding: utf-8 -*-
"""
Helpers d'affichage Rich pour la CLI Anon Election.

Fournit des fonctions réutilisables pour formater et afficher :
  - Violations d'un fichier de graphe
  - Analyse de revêtement (base minimale, B-minimalité)
  - Résumés d'expériences et rapports de vérification
"""

from collections import Counter
from typing import Iterable, List

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src.anon_election.core.graph import LabeledGraph, SymDigraph, Violation
from src.anon_election.core.models import CheckReport, TrialSummary

console = Console()


# =============================================================================
# Graphes
# =============================================================================

def show_violations(violations: Iterable[Violation], source: str):
    """Affiche la liste complète des invariants violés."""
    violations = list(violations)
    table = Table(title=f"❌ {source} : {len(violations)} violation(s)", show_header=True)
    table.add_column("Code", style="red", no_wrap=True)
    table.add_column("Message", style="white")
    for v in violations:
        table.add_row(v.code, v.message)
    console.print(table)


def show_graph_ok(g: LabeledGraph):
    classes = Counter(g.source_class.get(v) for v in g.vertices)
    shared = sum(n for c, n in classes.items() if c is not None and n >= 2)
    console.print(Panel.fit(
        f"[bold]Sommets:[/bold] [cyan]{len(g)}[/cyan]  "
        f"[bold]Arêtes:[/bold] [cyan]{len(g.edges)}[/cyan]  "
        f"[bold]Étiquettes:[/bold] [cyan]{len(set(g.vertex_label.values()))}[/cyan]  "
        f"[bold]Nœuds à source partagée:[/bold] [cyan]{shared}[/cyan]",
        title=f"✅ {g.name}", border_style="green",
    ))


def show_digraph(d: SymDigraph, title: str):
    """Sommets et arcs d'un digraphe (ports p, q)."""
    table = Table(title=title, show_header=True)
    table.add_column("Arc", style="dim", no_wrap=True)
    table.add_column("s", style="cyan")
    table.add_column("t", style="cyan")
    table.add_column("(p, q)", style="magenta")
    for a in sorted(d.arcs.values(), key=lambda a: a.id):
        table.add_row(a.id, f"{a.s} {d.vertex_label[a.s]}", f"{a.t} {d.vertex_label[a.t]}",
                      f"({a.label[0]}, {a.label[1]})")
    console.print(table)


def show_analysis(g: LabeledGraph, d: SymDigraph, base: SymDigraph, b_minimal: bool, with_sources: bool):
    scope = "étiquettes et sources" if with_sources else "étiquettes seules"
    color = "green" if b_minimal else "yellow"
    console.print(Panel.fit(
        f"[bold]Sommets:[/bold] [cyan]{len(d)}[/cyan]  "
        f"[bold]Base minimale ({scope}):[/bold] [cyan]{len(base)}[/cyan] sommet(s)\n"
        f"[bold]B-minimal:[/bold] [{color}]{str(b_minimal).lower()}[/{color}]",
        title=f"🔬 Analyse : {g.name}", border_style=color,
    ))
    console.print(f"B-minimal: {str(b_minimal).lower()}, base size {len(base)}")


# =============================================================================
# Expériences
# =============================================================================

def show_summary(summary: TrialSummary):
    """Agrégats par graphe puis total."""
    table = Table(title=f"🗳️ {summary.config.algorithm} [{summary.knowledge}] - {len(summary.trials)} essai(s)")
    table.add_column("Graphe", style="cyan")
    table.add_column("|V|", justify="right")
    table.add_column("B-min", justify="center")
    table.add_column("Mode", style="magenta")
    table.add_column("correct", justify="right", style="green")
    table.add_column("multiple", justify="right", style="red")
    table.add_column("aucun", justify="right", style="red")
    table.add_column("indécis", justify="right", style="yellow")
    table.add_column("Succès", justify="right")
    for g in summary.graphs:
        table.add_row(
            g.graph, str(g.vertices), "✓" if g.b_minimal else "-", g.mode.value,
            str(g.counts.get("correct", 0)), str(g.counts.get("multiple-elected", 0)),
            str(g.counts.get("none-elected", 0)), str(g.counts.get("undecided", 0)),
            f"{g.success_rate:.3f} ({g.completed})",
        )
    console.print(table)


# =============================================================================
# Vérifications
# =============================================================================

def show_reports(reports: List[CheckReport]):
    failed = [r for r in reports if not r.passed]
    table = Table(title=f"🔎 {len(reports) - len(failed)}/{len(reports)} vérification(s) réussie(s)")
    table.add_column("Vérification", style="cyan", no_wrap=True)
    table.add_column("Instance", style="white")
    table.add_column("", width=3)
    for r in reports:
        table.add_row(r.check, r.instance, "✅" if r.passed else "❌")
    console.print(table)
    for r in failed[:5]:
        c = r.counterexample
        if c is None:
            continue
        console.print(Panel(
            f"[bold]Pas:[/bold] {c.step}  [bold]Sommet:[/bold] {c.vertex}  [bold]Graines:[/bold] {r.seeds}\n"
            f"[bold]Attendu:[/bold] {c.expected}\n[bold]Obtenu:[/bold] {c.actual}",
            title=f"❌ {r.check} : {r.instance}", border_style="red",
        ))


def show_error(msg: str):
    """Affiche un message d'erreur."""
    console.print(f"[red]❌ {msg}[/red]")


def show_success(msg: str):
    """Affiche un message de succès."""
    console.print(f"[green]✅ {msg}[/green]")


def show_warning(msg: str):
    """Affiche un avertissement."""
    console.print(f"[yellow]⚠️ {msg}[/yellow]")
