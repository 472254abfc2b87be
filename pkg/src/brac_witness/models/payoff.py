from datetime import datetime, timezone
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, ConfigDict, model_validator
from sqlmodel import Field, SQLModel

from brac_witness.exceptions import InvalidIndex, InvalidParams


# ------------------------------
# Configuration des gains du BRAC
# ------------------------------
class PayoffConfig(BaseModel):
    """
    Gains du RAC binaire : ``t_yes`` points pour un OUI correct, 1 point pour
    un NON correct.

    ``t_yes`` est stocké en Decimal (comme les montants du projet bancaire)
    pour que les valeurs décimales publiées, par exemple 1.99940, soient
    converties exactement en rationnels dans les calculs classiques.

    Attributes:
        t_yes (Decimal): gain d'un OUI correct, strictement positif
        d (int): dimension
    """

    model_config = ConfigDict(frozen=True)

    t_yes: Decimal
    d: int

    @model_validator(mode="after")
    def check_values(self) -> "PayoffConfig":
        if not self.t_yes.is_finite() or self.t_yes <= 0:
            raise InvalidParams(f"t_yes doit être strictement positif (reçu {self.t_yes})")
        if self.d < 2:
            raise InvalidParams(f"La dimension d doit être >= 2 (reçu {self.d})")
        return self

    @classmethod
    def from_p_crit(cls, p_crit: float | str | Decimal, d: int) -> "PayoffConfig":
        """Construit la configuration telle que p_crit = 1/(t_yes + 1)."""
        p = Decimal(str(p_crit))
        if not 0 < p < 1:
            raise InvalidParams(f"p_crit doit être dans ]0, 1[ (reçu {p_crit})")
        return cls(t_yes=(1 - p) / p, d=d)

    # Valeurs exactes utilisées par les bornes classiques et l'oracle
    @property
    def t_yes_exact(self) -> Fraction:
        return Fraction(self.t_yes)

    @property
    def t_d(self) -> Fraction:
        """Constante de normalisation T_d = T_YES + d - 1."""
        return self.t_yes_exact + self.d - 1

    @property
    def p_crit(self) -> Fraction:
        return 1 / (self.t_yes_exact + 1)

    # Valeurs flottantes pour le solveur d'entropie et la simulation
    @property
    def t_yes_float(self) -> float:
        return float(self.t_yes)

    @property
    def t_d_float(self) -> float:
        return float(self.t_d)

    @property
    def p_crit_float(self) -> float:
        return float(self.p_crit)


# ------------------------------
# Distribution en escalier
# ------------------------------
class StepDistribution(BaseModel):
    """
    Distribution a posteriori sur la lettre interrogée : ``x`` valeurs à
    ``p`` et ``d - x`` valeurs à (1 - x p)/(d - x).

    Le modèle n'impose que la faisabilité (toutes les valeurs dans [0, 1]).
    Le domaine ordonné p >= 1/d est vérifié par le solveur.
    """

    model_config = ConfigDict(frozen=True)

    x: int
    p: float
    d: int

    @model_validator(mode="after")
    def check_shape(self) -> "StepDistribution":
        if self.d < 2:
            raise InvalidParams(f"La dimension d doit être >= 2 (reçu {self.d})")
        if not 1 <= self.x <= self.d - 1:
            raise InvalidIndex(f"x doit être dans {{1, ..., {self.d - 1}}} (reçu {self.x})")
        return self

    @property
    def low(self) -> float:
        """Valeur commune des d - x entrées basses."""
        return (1 - self.x * self.p) / (self.d - self.x)

    def mirror(self) -> "StepDistribution":
        """Même multiset de probabilités, vu depuis les entrées basses."""
        return StepDistribution(x=self.d - self.x, p=self.low, d=self.d)


class PcritResult(BaseModel):
    """Résultat du balayage : plus petit p_crit rendant la stratégie x=1 optimale."""

    d: int
    epsilon: float
    p_crit: float
    t_yes: float
    steps: int


class RangeStatus(str, Enum):
    """
    Issue de la recherche du minimum de Delta_i sur [T_0, T_1^{x=i}].

    Attributes:
        OK (str): un minimum a été trouvé
        EMPTY_RANGE (str): T_0 >= T_1^{x=i}, l'intervalle est vide
        UNDEFINED (str): aucun échantillon dans le domaine des deux distributions
    """

    OK = "ok"
    EMPTY_RANGE = "empty_range"
    UNDEFINED = "undefined"


class DeltaMinimum(BaseModel):
    i: int
    status: RangeStatus
    value: Optional[float] = None
    argmin_t: Optional[float] = None
    t_lower: float
    t_upper: float


class CurvePoint(BaseModel):
    """
    Un échantillon des courbes H(T) : une entropie par valeur de x (None hors
    de l'intervalle valide) et la liste des x dont T est une borne.
    """

    t: float
    entropies: dict[int, Optional[float]]
    valid: dict[int, bool]
    limits: list[int] = []


# ==============================
# Cache persistant des balayages
# ==============================
class PcritRecord(SQLModel, table=True):
    """Résultat d'un balayage de p_crit conservé en base pour l'API."""

    id: Optional[int] = Field(default=None, primary_key=True)
    d: int = Field(index=True)
    epsilon: float
    p_crit: float
    t_yes: float
    steps: int
    computed_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))

    def to_result(self) -> PcritResult:
        return PcritResult(d=self.d, epsilon=self.epsilon, p_crit=self.p_crit,
                           t_yes=self.t_yes, steps=self.steps)
