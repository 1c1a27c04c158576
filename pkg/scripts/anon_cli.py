#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
🗳️ Anon Election CLI - Point d'entrée.

Usage:
    python scripts/anon_cli.py [COMMAND] [ARGS]
    python scripts/anon_cli.py check all

Toute la logique est dans le package scripts/cli/ :
    cli/__init__.py  - Configuration, codes de sortie
    cli/commands.py  - Commandes Click
    cli/display.py   - Affichage Rich
"""

import os
import sys

# Ajouter le chemin racine du projet au PYTHONPATH
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from scripts.cli.commands import cli

if __name__ == "__main__":
    cli()
