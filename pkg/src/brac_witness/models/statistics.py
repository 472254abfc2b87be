from decimal import Decimal
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field


# ------------------------------
# Une ligne de statistiques observées
# ------------------------------
class StatisticsEntry(BaseModel):
    """
    Probabilités observées (p(G=0), p(G=1)) pour le triplet (a, y, k), ou
    comptes bruts (c0, c1) normalisés au chargement.
    """

    a: list[int]
    y: int
    k: int
    p0: Optional[float] = None
    p1: Optional[float] = None
    c0: Optional[int] = None
    c1: Optional[int] = None


# ------------------------------
# Table complète de statistiques
# ------------------------------
class StatisticsTable(BaseModel):
    """
    Statistiques p(G | a, y, k) d'une expérience préparer-et-mesurer.

    Schéma JSON : ``{d, n, t_yes, entries: [{a: [...], y, k, p0, p1}]}``.
    La distribution des entrées est supposée uniforme ; ``prior`` n'accepte
    que la valeur "uniform".
    """

    d: int
    n: int = 2
    t_yes: Decimal
    prior: str = "uniform"
    entries: list[StatisticsEntry] = Field(default_factory=list)

    def p0_array(self) -> np.ndarray:
        """
        Tableau p(G=0 | a, y, k) de forme (d^n, n, d), indexé par le rang
        lexicographique du mot. Suppose une table déjà validée.
        """
        p0 = np.zeros((self.d**self.n, self.n, self.d))
        for entry in self.entries:
            rank = 0
            for letter in entry.a:
                rank = rank * self.d + letter
            p0[rank, entry.y, entry.k] = entry.p0
        return p0

    def p1_array(self) -> np.ndarray:
        p1 = np.zeros((self.d**self.n, self.n, self.d))
        for entry in self.entries:
            rank = 0
            for letter in entry.a:
                rank = rank * self.d + letter
            p1[rank, entry.y, entry.k] = entry.p1
        return p1


class Verdict(str, Enum):
    CERTIFIED = "certified"
    NOT_CERTIFIED = "not certified"


# ------------------------------
# Rapport de certification
# ------------------------------
class CertificationReport(BaseModel):
    """
    Résultat de la comparaison entre le gain observé et la borne classique
    exacte de la dimension revendiquée.

    ``exhaustive_optimum`` est l'optimum déterministe trouvé par recherche
    exhaustive, renseigné seulement sur demande ; il peut dépasser la
    borne par formule. ``exhaustive_checked`` indique que le verdict en a
    tenu compte.
    """

    d_claim: int
    n: int
    t_yes: Decimal
    observed_payoff: float
    classical_bound: str
    classical_bound_decimal: float
    quantum_reference: Optional[float] = None
    exhaustive_optimum: Optional[str] = None
    exhaustive_optimum_decimal: Optional[float] = None
    exhaustive_checked: bool = False
    margin: float
    verdict: Verdict
    statement: str
