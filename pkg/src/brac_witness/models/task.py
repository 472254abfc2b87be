from fractions import Fraction

from pydantic import BaseModel, ConfigDict, model_validator

from brac_witness.exceptions import InvalidParams


def format_float(value: float) -> float:
    """Arrondit un flottant à 12 chiffres significatifs pour les sorties."""
    return float(f"{value:.12g}")


def exact_payload(value: Fraction) -> dict:
    """Représentation JSON d'un rationnel exact : fraction et décimal."""
    return {"fraction": str(value), "decimal": format_float(float(value))}


# ------------------------------
# Paramètres de la tâche (d, n)
# ------------------------------
class TaskParams(BaseModel):
    """
    Paramètres d'un RAC : Alice reçoit ``n`` lettres d'un alphabet de
    taille ``d`` et envoie un seul message à d valeurs.

    Attributes:
        d (int): taille de l'alphabet (dimension), d >= 2
        n (int): longueur du mot d'Alice, n >= 1
    """

    model_config = ConfigDict(frozen=True)

    d: int
    n: int

    @model_validator(mode="after")
    def check_ranges(self) -> "TaskParams":
        if self.d < 2:
            raise InvalidParams(f"La dimension d doit être >= 2 (reçu {self.d})")
        if self.n < 1:
            raise InvalidParams(f"La longueur n doit être >= 1 (reçu {self.n})")
        return self

    @property
    def word_count(self) -> int:
        """Nombre de mots d'Alice, d^n."""
        return self.d**self.n


# ------------------------------
# Composition : profil de comptage des lettres
# ------------------------------
class Composition(BaseModel):
    """Comptes (n_0, ..., n_{d-1}) des lettres d'un mot ; la somme vaut n."""

    model_config = ConfigDict(frozen=True)

    counts: tuple[int, ...]

    @model_validator(mode="after")
    def check_counts(self) -> "Composition":
        if len(self.counts) < 2:
            raise InvalidParams("Une composition doit avoir au moins 2 parts")
        if any(c < 0 for c in self.counts):
            raise InvalidParams(f"Comptes négatifs dans {self.counts}")
        if sum(self.counts) < 1:
            raise InvalidParams("Une composition doit sommer à n >= 1")
        return self

    @property
    def d(self) -> int:
        return len(self.counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def majority_count(self) -> int:
        """Nombre d'occurrences de la lettre majoritaire (max des comptes)."""
        return max(self.counts)


# ------------------------------
# Mot d'Alice
# ------------------------------
class DitString(BaseModel):
    """Mot a = a_0 ... a_{n-1} dont chaque lettre est dans {0, ..., d-1}."""

    model_config = ConfigDict(frozen=True)

    letters: tuple[int, ...]
    d: int

    @model_validator(mode="after")
    def check_letters(self) -> "DitString":
        if self.d < 2:
            raise InvalidParams(f"La dimension d doit être >= 2 (reçu {self.d})")
        if not self.letters:
            raise InvalidParams("Un mot doit contenir au moins une lettre")
        for letter in self.letters:
            if not 0 <= letter < self.d:
                raise InvalidParams(f"Lettre {letter} hors de l'alphabet {{0, ..., {self.d - 1}}}")
        return self

    @property
    def n(self) -> int:
        return len(self.letters)

    def rank(self) -> int:
        """Rang lexicographique du mot parmi les d^n mots (a_0 le plus significatif)."""
        value = 0
        for letter in self.letters:
            value = value * self.d + letter
        return value
