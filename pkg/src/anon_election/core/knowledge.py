# -*- coding: utf-8 -*-
"""
Connaissances structurelles : familles F, fonctions τ et choix du mode.

Une connaissance est une famille de graphes (les réseaux compatibles avec
l'information a priori) munie d'un prédicat d'appartenance décidable et,
quand elle existe, d'une fonction τ bornant le rayon des quasi-revêtements
(propres) entre membres de la famille.

    none            aucune τ : élection impossible, refus
    bound:S         |V| ≤ S, τ = 2S (Monte Carlo seulement)
    two-approx:T    T/2 < |V| ≤ T, τ = 2|V|
    exact-size:N    |V| = N, τ = 2|V|
    topology:FILE   isomorphe au graphe du fichier, τ = 2|V|
    bk:K            au plus K nœuds partagent une source, classes connues,
                    τ = (K+1)|V| (Monte Carlo seulement)
"""

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .coverings import is_b_minimal
from .graph import (
    LabeledGraph, SymDigraph, build_dir, is_isomorphic, load_graph, source_class_of, strip_sources,
)
from .models import Mode


class KnowledgeError(ValueError):
    """Connaissance inconnue, mal formée, sans τ, ou incompatible avec le corpus."""


CLASS_SEPARATOR = "@"


@dataclass(frozen=True)
class Knowledge:
    """Famille F ; les sous-classes définissent contains() et tau()."""

    kind = "abstract"
    las_vegas_capable = True

    def contains(self, d: SymDigraph) -> bool:
        raise NotImplementedError

    def tau(self, d: SymDigraph) -> int:
        raise NotImplementedError

    def prepare(self, g: LabeledGraph) -> LabeledGraph:
        """Graphe effectivement simulé (étiquettes enrichies si la connaissance l'exige)."""
        return g

    def describe(self) -> str:
        return self.kind


@dataclass(frozen=True)
class NoKnowledge(Knowledge):
    kind = "none"
    las_vegas_capable = False

    def contains(self, d: SymDigraph) -> bool:
        return True

    def tau(self, d: SymDigraph) -> int:
        raise KnowledgeError("Aucune fonction τ sans connaissance : "
                             "des quasi-revêtements de rayon arbitraire existent")


@dataclass(frozen=True)
class SizeBound(Knowledge):
    bound: int
    kind = "bound"
    las_vegas_capable = False

    def contains(self, d: SymDigraph) -> bool:
        return len(d) <= self.bound

    def tau(self, d: SymDigraph) -> int:
        return 2 * self.bound

    def describe(self) -> str:
        return f"bound:{self.bound}"


@dataclass(frozen=True)
class TwoApprox(Knowledge):
    t: int
    kind = "two-approx"

    def contains(self, d: SymDigraph) -> bool:
        return self.t < 2 * len(d) and len(d) <= self.t

    def tau(self, d: SymDigraph) -> int:
        return 2 * len(d)

    def describe(self) -> str:
        return f"two-approx:{self.t}"


@dataclass(frozen=True)
class ExactSize(Knowledge):
    size: int
    kind = "exact-size"

    def contains(self, d: SymDigraph) -> bool:
        return len(d) == self.size

    def tau(self, d: SymDigraph) -> int:
        return 2 * len(d)

    def describe(self) -> str:
        return f"exact-size:{self.size}"


@dataclass(frozen=True)
class Topology(Knowledge):
    """Topologie connue à isomorphisme près (étiquettes λ comprises, sources exclues)."""
    digraph: SymDigraph
    source: str = ""
    kind = "topology"

    def contains(self, d: SymDigraph) -> bool:
        return len(d) == len(self.digraph) and is_isomorphic(strip_sources(d), strip_sources(self.digraph))

    def tau(self, d: SymDigraph) -> int:
        return 2 * len(d)

    def describe(self) -> str:
        return f"topology:{self.source or self.digraph.name}"


@dataclass(frozen=True)
class BoundedSharing(Knowledge):
    """
    Au plus k nœuds partagent leur source avec un autre nœud ; chaque nœud
    connaît sa classe, portée dans son étiquette sous la forme λ@classe.
    """
    k: int
    kind = "bk"
    las_vegas_capable = False

    def shared_count(self, d: SymDigraph) -> int:
        classes = [_class_suffix(d.vertex_label[v][0]) for v in d.vertices]
        sizes = Counter(classes)
        return sum(1 for c in classes if c is not None and sizes[c] >= 2)

    def contains(self, d: SymDigraph) -> bool:
        return self.shared_count(d) <= self.k

    def tau(self, d: SymDigraph) -> int:
        return (self.k + 1) * len(d)

    def prepare(self, g: LabeledGraph) -> LabeledGraph:
        return g.relabeled({v: f"{g.vertex_label[v]}{CLASS_SEPARATOR}{source_class_of(g, v)}"
                            for v in g.vertices}, name=g.name)

    def describe(self) -> str:
        return f"bk:{self.k}"


def _class_suffix(label) -> Optional[str]:
    if label is None:
        return None
    text = str(label)
    return text.rsplit(CLASS_SEPARATOR, 1)[1] if CLASS_SEPARATOR in text else None


# =============================================================================
# Parsing & décisions
# =============================================================================

def _positive(kind: str, value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise KnowledgeError(f"{kind} : entier attendu, reçu '{value}'") from None
    if n < 1:
        raise KnowledgeError(f"{kind} : valeur ≥ 1 attendue, reçu {n}")
    return n


def parse_knowledge(text: Optional[str], base_dir: Union[str, Path, None] = None) -> Knowledge:
    """exact-size:N, bound:S, two-approx:T, topology:FILE, bk:K ou none."""
    if text is None or text.strip() in ("", "none"):
        return NoKnowledge()
    kind, _, value = text.strip().partition(":")
    if not value:
        raise KnowledgeError(f"Connaissance '{text}' : valeur manquante après '{kind}:'")
    if kind == "exact-size":
        return ExactSize(_positive(kind, value))
    if kind == "bound":
        return SizeBound(_positive(kind, value))
    if kind == "two-approx":
        return TwoApprox(_positive(kind, value))
    if kind == "bk":
        return BoundedSharing(_positive(kind, value))
    if kind == "topology":
        path = Path(value)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        g = load_graph(path)
        return Topology(build_dir(g), source=value)
    raise KnowledgeError(f"Connaissance inconnue : '{kind}' "
                         "(attendu exact-size, bound, two-approx, topology, bk, none)")


def family_contains(knowledge: Knowledge, d: SymDigraph) -> bool:
    return knowledge.contains(d)


def tau_of(knowledge: Knowledge, d: SymDigraph) -> int:
    return knowledge.tau(d)


def check_corpus(knowledge: Knowledge, corpus: Iterable[LabeledGraph]) -> None:
    """Chaque graphe (préparé) doit appartenir à la famille."""
    for g in corpus:
        if not knowledge.contains(build_dir(knowledge.prepare(g))):
            raise KnowledgeError(f"{g.name} ({len(g)} sommets) hors de la famille {knowledge.describe()}")


def decide_mode(knowledge: Knowledge, corpus: Iterable[LabeledGraph]) -> Mode:
    """
    Refus sans connaissance ; Monte Carlo pour bound et bk ; Las Vegas pour
    les connaissances exactes si tout le corpus est B-minimal, Monte Carlo sinon.
    """
    if isinstance(knowledge, NoKnowledge):
        return Mode.REFUSE
    if not knowledge.las_vegas_capable:
        return Mode.MONTE_CARLO
    if all(is_b_minimal(knowledge.prepare(g)) for g in corpus):
        return Mode.LAS_VEGAS
    return Mode.MONTE_CARLO
