# -*- coding: utf-8 -*-
"""
Modèles Pydantic pour Anon Election Lab.

Définit les formats de fichiers (graphes, digraphes, homomorphismes,
ordonnancements, traces) et les enregistrements produits par les
expériences et les vérifications.
"""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field


# =============================================================================
# Enums
# =============================================================================

class Decision(str, Enum):
    """Décision finale d'un nœud."""
    ELECTED = "ELECTED"
    NON_ELECTED = "NON-ELECTED"


class Outcome(str, Enum):
    """Classification d'une exécution d'élection."""
    CORRECT = "correct"
    MULTIPLE_ELECTED = "multiple-elected"
    NONE_ELECTED = "none-elected"
    UNDECIDED = "undecided"


class RunStatus(str, Enum):
    """Statut d'arrêt du simulateur."""
    TERMINATED = "terminated"  # tous les nœuds terminaux, ou plus rien d'activable
    UNDECIDED = "undecided"    # budget d'événements épuisé


class EventKind(str, Enum):
    """Types d'événements d'un ordonnancement."""
    WAKEUP = "wakeup"
    DELIVER = "deliver"
    SPONTANEOUS = "spontaneous"


class Mode(str, Enum):
    """Mode d'exécution retenu pour une connaissance donnée."""
    LAS_VEGAS = "las-vegas"
    MONTE_CARLO = "monte-carlo"
    REFUSE = "refuse"


# =============================================================================
# Fichiers de graphes
# =============================================================================

class VertexRecord(BaseModel):
    """Sommet d'un fichier de graphe."""
    id: str = Field(..., description="Identifiant opaque du sommet")
    label: str = Field(default="", description="Étiquette λ (ordre lexicographique)")
    source: Optional[str] = Field(None, description="Classe de source aléatoire (absente = privée)")


class EdgeRecord(BaseModel):
    """Arête avec numéros de ports : pu = port_u(v), pv = port_v(u)."""
    u: str
    v: str
    pu: int
    pv: int


class GraphFile(BaseModel):
    """Format JSON/YAML d'un graphe étiqueté à numérotation de ports."""
    name: Optional[str] = None
    vertices: List[VertexRecord] = Field(default_factory=list)
    edges: List[EdgeRecord] = Field(default_factory=list)


class ArcRecord(BaseModel):
    """Arc d'un digraphe symétrique : étiquette (p, q)."""
    id: str
    s: str
    t: str
    p: int
    q: int


class DigraphVertexRecord(BaseModel):
    """Sommet de digraphe : étiquette quelconque (listes JSON pour les n-uplets)."""
    id: str
    label: Any = ""
    source: Optional[str] = None


class DigraphFile(BaseModel):
    """Forme explicite d'un digraphe symétrique (fixtures de revêtements)."""
    name: Optional[str] = None
    vertices: List[DigraphVertexRecord] = Field(default_factory=list)
    arcs: List[ArcRecord] = Field(default_factory=list)
    sym: List[List[str]] = Field(default_factory=list, description="Paires d'arcs ; [a, a] pour une boucle auto-appariée")


class HomomorphismFile(BaseModel):
    """Homomorphisme sérialisé."""
    domain: Optional[str] = None
    codomain: Optional[str] = None
    vertex_map: Dict[str, str] = Field(default_factory=dict)
    arc_map: Dict[str, str] = Field(default_factory=dict)


# =============================================================================
# Ordonnancements & traces
# =============================================================================

class EventRecord(BaseModel):
    """Événement sérialisé (Wakeup / Deliver / Spontaneous)."""
    kind: EventKind
    vertex: str
    port: Optional[int] = Field(None, description="Port de réception (Deliver uniquement)")
    rule: Optional[str] = Field(None, description="Règle spontanée (ex: 'C')")


class ScheduleFile(BaseModel):
    """Script d'événements pour la politique 'scripted'."""
    events: List[EventRecord] = Field(default_factory=list)


class DrawRecordModel(BaseModel):
    """Un tirage : (sommet, classe, index, bit)."""
    vertex: str
    class_id: str
    index: int = Field(..., ge=0)
    bit: Literal["0", "1"]


class DrawLogFile(BaseModel):
    """Journal de tirages rejouable."""
    master_seed: int
    draws: List[DrawRecordModel] = Field(default_factory=list)


class SnapshotRecord(BaseModel):
    """Résumé de l'état global après un événement."""
    step: int
    states: Dict[str, Dict[str, Any]] = Field(default_factory=dict)


class TraceFile(BaseModel):
    """Export JSON d'une ExecutionTrace."""
    digraph: str
    algorithm: str
    policy: str
    status: RunStatus
    events: List[EventRecord] = Field(default_factory=list)
    draws: List[DrawRecordModel] = Field(default_factory=list)
    snapshots: List[SnapshotRecord] = Field(default_factory=list)


# =============================================================================
# Vérifications
# =============================================================================

class Counterexample(BaseModel):
    """Premier contre-exemple d'une vérification."""
    step: int
    vertex: str
    expected: str
    actual: str


class CheckReport(BaseModel):
    """Rapport d'une vérification exécutable."""
    check: str
    instance: str
    passed: bool
    counterexample: Optional[Counterexample] = None
    seeds: List[int] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)


# =============================================================================
# Expériences (commande elect)
# =============================================================================

class ExperimentConfig(BaseModel):
    """Configuration complète et rejouable d'une expérience."""
    graph: str = Field(..., description="Fichier, spec de générateur ou 'corpus:NOM'")
    algorithm: Literal["m", "mtau"] = "m"
    knowledge: Optional[str] = Field(None, description="exact-size:N, bound:S, two-approx:T, topology:FILE, bk:K, none")
    scheduler: Literal["synchronous", "random", "adaptive"] = "random"
    mode: Literal["auto", "las-vegas", "monte-carlo"] = "auto"
    master_seed: int = 0
    trials: int = Field(default=200, ge=1)
    budget: int = Field(default=1_000_000, gt=0)
    output: Optional[str] = Field(None, description="Préfixe des fichiers de sortie (.json, .csv)")
    snapshot_stride: int = Field(default=0, ge=0)
    workers: Optional[int] = Field(None, ge=1)


class TrialRecord(BaseModel):
    """Résultat d'un essai."""
    trial: int
    graph: str
    outcome: Outcome
    status: RunStatus
    steps: int
    bits: int
    elected_vertex: Optional[str] = None
    decisions: Dict[str, Optional[str]] = Field(default_factory=dict)


class GraphSummary(BaseModel):
    """Agrégat par graphe."""
    graph: str
    vertices: int
    b_minimal: bool
    mode: Mode
    trials: int
    counts: Dict[str, int] = Field(default_factory=dict)
    completed: int = 0
    success_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    error_rate: float = Field(default=0.0, ge=0.0, le=1.0)


class TrialSummary(BaseModel):
    """Résumé d'une expérience : les agrégats égalent la somme des essais."""
    config: ExperimentConfig
    knowledge: str
    graphs: List[GraphSummary] = Field(default_factory=list)
    trials: List[TrialRecord] = Field(default_factory=list)
    counts: Dict[str, int] = Field(default_factory=dict)
