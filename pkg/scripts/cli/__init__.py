# -*- coding: utf-8 -*-
"""
🗳️ Anon Election CLI - Package principal.

Architecture:
    commands.py - Commandes Click (validate, analyze, elect, check, generate, covering)
    display.py  - Helpers d'affichage Rich (tables, panels)

Codes de sortie : 0 succès, 1 vérification en échec, 2 erreur d'usage,
de validation ou refus.
"""

from dotenv import load_dotenv

load_dotenv()

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
