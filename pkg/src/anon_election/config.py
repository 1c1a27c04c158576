# -*- coding: utf-8 -*-
"""
Configuration centralisée du simulateur d'élection anonyme.

Utilise pydantic-settings pour charger et valider la configuration
depuis les variables d'environnement ou un fichier .env.
"""

from functools import lru_cache
from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Configuration du simulateur.

    Toutes les variables peuvent être définies via:
    - Variables d'environnement (préfixe ANON_)
    - Fichier .env à la racine du projet
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="ANON_",
        case_sensitive=False,
        extra="ignore"
    )

    # =========================================================================
    # Reproductibilité
    # =========================================================================
    master_seed: int = 0  # Unique graine exposée : tout le reste en dérive

    # =========================================================================
    # Simulation
    # =========================================================================
    event_budget: int = 1_000_000  # Au-delà : statut "undecided", jamais une erreur
    snapshot_stride: int = 1  # 0 = pas de snapshots, k = un snapshot tous les k événements
    sim_debug: bool = False  # Trace chaque événement sur stderr

    # =========================================================================
    # Expériences (commande elect)
    # =========================================================================
    default_trials: int = 200
    trial_workers: Optional[int] = None  # None = os.cpu_count()
    corpus_dir: str = "CORPUS"
    # Seuil d'erreur Monte Carlo sur le sous-corpus B-minimal.
    # Valeur par défaut de l'outil, pas une constante théorique.
    monte_carlo_error_threshold: float = 0.05

    # =========================================================================
    # Vérifications
    # =========================================================================
    check_rounds: int = 30
    oracle_max_vertices: int = 8  # Garde de l'oracle exhaustif (nombre de Bell)
    quasi_max_radius: int = 12


@lru_cache()
def get_settings() -> Settings:
    """Retourne l'instance singleton des settings."""
    return Settings()


# Raccourci pour import direct
settings = get_settings()
