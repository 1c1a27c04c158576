# -*- coding: utf-8 -*-
"""
Anon Election Lab
=================

Simulateur déterministe et boîte à outils d'analyse pour l'élection
randomisée dans les réseaux anonymes à sources aléatoires partagées.

Architecture:
- core/graph.py      : graphes à numérotation de ports, Dir(G), boules, vues
- core/coverings.py  : revêtements symétriques, base minimale, quasi-revêtements
- core/randomness.py : sources aléatoires partagées (flux Philox indexés)
- core/runtime.py    : simulateur par passage de messages FIFO + relèvement
- core/election_m.py, core/election_mtau.py : algorithmes M et M_τ
- core/verifier.py   : vérifications exécutables (relèvement, quasi-relèvement...)

Usage:
    python scripts/anon_cli.py elect --graph "ring:5,anon,one-unshared"
"""

__version__ = "0.3.0"
__author__ = "Anon Election Lab"
