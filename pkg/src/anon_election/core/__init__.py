# -*- coding: utf-8 -*-
"""
Cœur du simulateur d'élection anonyme.

- graph : graphes étiquetés à ports, Dir(G), boules, vues, homomorphismes
- coverings : revêtements symétriques, base minimale, quasi-revêtements
- randomness : sources aléatoires partagées par classe
- runtime : simulateur à événements discrets, politiques, relèvement
- election_m / election_mtau : algorithmes M et M_τ
- knowledge : familles F et fonctions τ
- verifier : vérifications exécutables sur des traces
- families : générateurs de graphes et de corpus
- experiment : essais reproductibles (commande elect)
"""

from .graph import LabeledGraph, SymDigraph, build_dir, load_graph
from .coverings import is_b_minimal, is_symmetric_covering, minimal_base
from .randomness import SourceAssignment, derive_seed
from .runtime import run
from .election_m import MAlgorithm, evaluate_outcome
from .election_mtau import MTauAlgorithm
from .knowledge import parse_knowledge

__all__ = [
    "LabeledGraph", "SymDigraph", "build_dir", "load_graph",
    "is_b_minimal", "is_symmetric_covering", "minimal_base",
    "SourceAssignment", "derive_seed", "run",
    "MAlgorithm", "MTauAlgorithm", "evaluate_outcome", "parse_knowledge",
]
