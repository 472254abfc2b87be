"""
Module de configuration du toolkit BRAC Witness.

Toutes les valeurs sont lues dans les variables d'environnement (préfixe
``BRAC_``) avec une valeur par défaut raisonnable. Les services reçoivent
leurs plafonds dans leur constructeur : ces constantes ne sont que les
valeurs par défaut.

Variables:
    BRAC_DATABASE_URL: URL SQLModel du cache des valeurs de p_crit
    BRAC_SQL_ECHO: "1" pour afficher les requêtes SQL
    BRAC_COMPOSITION_CAP: nombre maximal de compositions énumérées
    BRAC_ENCODING_CAP: nombre maximal de tables d'encodage énumérées
    BRAC_DECODING_CAP: nombre maximal de décodages (mode joint)
    BRAC_WORD_CAP: nombre maximal de mots d^n dans une table de stratégie
    BRAC_LOG_LEVEL: niveau de log (WARNING par défaut)
"""

import logging
import os
import sys

DATABASE_URL = os.getenv("BRAC_DATABASE_URL", "sqlite:///./brac_witness.db")
SQL_ECHO = os.getenv("BRAC_SQL_ECHO", "0") == "1"

# ==============================================================================
# PLAFONDS D'ÉNUMÉRATION
# ==============================================================================

COMPOSITION_CAP = int(os.getenv("BRAC_COMPOSITION_CAP", str(10**6)))
ENCODING_CAP = int(os.getenv("BRAC_ENCODING_CAP", str(10**8)))
DECODING_CAP = int(os.getenv("BRAC_DECODING_CAP", str(10**4)))
WORD_CAP = int(os.getenv("BRAC_WORD_CAP", str(10**6)))

# ==============================================================================
# TOLÉRANCES NUMÉRIQUES
# ==============================================================================

# Bande de garde du test de signe de Delta_i
DELTA_GUARD = 1e-12
# Marge côté quantique lors d'une certification
CERTIFICATION_SLACK = 1e-9
# Écart toléré sur p(G=0) + p(G=1)
NORMALIZATION_TOLERANCE = 1e-6
# Identités algébriques (normes, projecteurs)
ALGEBRAIC_TOLERANCE = 1e-12

# ==============================================================================
# LOGGING
# ==============================================================================

LOG_LEVEL = os.getenv("BRAC_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | int | None = None) -> None:
    """
    Installe un handler unique sur stderr.

    stdout reste réservé aux rapports (JSON ou CSV), les diagnostics passent
    tous par stderr.
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level if level is not None else LOG_LEVEL)
