# -*- coding: utf-8 -*-
"""
Framework de test pour la recette anon-election.

Fournit les helpers, compteurs et fixtures partagés par les tests pytest
(scripts/tests/test_*.py) et par la recette (scripts/test_recette.py).
"""

import os
import sys

# Ajouter le dossier parent pour les imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from src.anon_election.core.graph import LabeledGraph, SymDigraph, build_dir  # noqa: E402

# =============================================================================
# Compteurs globaux (recette)
# =============================================================================

_passed = 0
_failed = 0
_skipped = 0
_errors = []


def reset_counters():
    """Remet les compteurs à zéro."""
    global _passed, _failed, _skipped, _errors
    _passed = 0
    _failed = 0
    _skipped = 0
    _errors = []


def get_counters() -> dict:
    """Retourne les compteurs."""
    return {"passed": _passed, "failed": _failed, "skipped": _skipped, "errors": _errors}


def ok(test_name: str, detail: str = ""):
    """Marque un test comme réussi."""
    global _passed
    _passed += 1
    suffix = f" : {detail}" if detail else ""
    print(f"  ✅ {test_name}{suffix}")


def fail(test_name: str, detail: str = ""):
    """Marque un test comme échoué."""
    global _failed
    _failed += 1
    suffix = f" : {detail}" if detail else ""
    msg = f"  ❌ {test_name}{suffix}"
    print(msg)
    _errors.append(msg)


def skip(test_name: str, detail: str = ""):
    """Marque un test comme ignoré."""
    global _skipped
    _skipped += 1
    suffix = f" : {detail}" if detail else ""
    print(f"  ⏭️  {test_name}{suffix}")


def check(condition: bool, test_name: str, detail: str = "") -> bool:
    """ok() ou fail() selon la condition."""
    if condition:
        ok(test_name, detail)
    else:
        fail(test_name, detail)
    return condition


def phase_header(num: int, title: str, emoji: str = "📋"):
    """Affiche un header de phase."""
    print(f"\n{'=' * 70}")
    print(f"{emoji} PHASE {num} : {title}")
    print("=" * 70)


# =============================================================================
# Fixtures
# =============================================================================

def k2(labels=("a", "b"), sources=(None, None), name="K2") -> LabeledGraph:
    """Deux sommets reliés par le port 1."""
    return LabeledGraph.build(name, [("v0", labels[0], sources[0]), ("v1", labels[1], sources[1])],
                              [("v0", "v1", 1, 1)])


def ring(n: int, labels=None, sources=None, name=None) -> LabeledGraph:
    """Anneau orienté : port 1 vers le successeur, port 2 vers le prédécesseur."""
    labels = labels or ["x"] * n
    sources = sources or [None] * n
    vertices = [(f"v{i}", labels[i], sources[i]) for i in range(n)]
    edges = [(f"v{i}", f"v{(i + 1) % n}", 1, 2) for i in range(n)]
    return LabeledGraph.build(name or f"C{n}", vertices, edges)


def ring_dir(n: int, labels=None, sources=None, with_sources: bool = False) -> SymDigraph:
    return build_dir(ring(n, labels, sources), with_sources=with_sources)


def write_graph_file(path, vertices, edges, name="g") -> str:
    """Écrit un fichier de graphe JSON brut (sans validation)."""
    import json
    data = {
        "name": name,
        "vertices": [{"id": v, "label": lbl, "source": src} for v, lbl, src in vertices],
        "edges": [{"u": u, "v": v, "pu": pu, "pv": pv} for u, v, pu, pv in edges],
    }
    path.write_text(json.dumps(data, indent=2), encoding="utf-8")
    return str(path)
