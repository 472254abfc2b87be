from enum import Enum
from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, ConfigDict, model_validator

from brac_witness.exceptions import InvalidParams
from brac_witness.models.task import DitString, TaskParams, exact_payload


class SearchMode(str, Enum):
    """Classe de stratégies parcourue par la recherche exhaustive."""

    IDENTITY = "identity"
    JOINT = "joint"


# ------------------------------
# Encodage d'Alice
# ------------------------------
class EncodingStrategy(BaseModel):
    """
    Fonction E : mot -> message, stockée comme table indexée par le rang
    lexicographique du mot (a_0 le plus significatif).

    Attributes:
        d (int): dimension
        n (int): longueur des mots
        table (tuple[int, ...]): message envoyé pour chacun des d^n mots
    """

    model_config = ConfigDict(frozen=True)

    d: int
    n: int
    table: tuple[int, ...]

    @model_validator(mode="after")
    def check_table(self) -> "EncodingStrategy":
        if len(self.table) != self.d**self.n:
            raise InvalidParams(
                f"L'encodage doit couvrir les {self.d**self.n} mots (reçu {len(self.table)})"
            )
        if any(not 0 <= m < self.d for m in self.table):
            raise InvalidParams("Chaque message doit être dans {0, ..., d-1}")
        return self

    @classmethod
    def constant(cls, params: TaskParams, message: int = 0) -> "EncodingStrategy":
        return cls(d=params.d, n=params.n, table=(message,) * params.word_count)

    @classmethod
    def letter(cls, params: TaskParams, position: int) -> "EncodingStrategy":
        """Envoie la lettre a_position telle quelle."""
        if not 0 <= position < params.n:
            raise InvalidParams(f"Position {position} hors de {{0, ..., {params.n - 1}}}")
        stride = params.d ** (params.n - 1 - position)
        table = tuple((rank // stride) % params.d for rank in range(params.word_count))
        return cls(d=params.d, n=params.n, table=table)

    def message_for(self, word: DitString) -> int:
        return self.table[word.rank()]


# ------------------------------
# Décodage standard de Bob
# ------------------------------
class StandardDecoding(BaseModel):
    """Une table D_y : m -> b par entrée y (``maps[y][m]``)."""

    model_config = ConfigDict(frozen=True)

    d: int
    maps: tuple[tuple[int, ...], ...]

    @model_validator(mode="after")
    def check_maps(self) -> "StandardDecoding":
        for row in self.maps:
            if len(row) != self.d or any(not 0 <= b < self.d for b in row):
                raise InvalidParams("Chaque D_y doit être une table totale sur {0, ..., d-1}")
        return self

    @property
    def n(self) -> int:
        return len(self.maps)

    @classmethod
    def identity(cls, params: TaskParams) -> "StandardDecoding":
        return cls(d=params.d, maps=tuple(tuple(range(params.d)) for _ in range(params.n)))

    def is_identity(self) -> bool:
        return all(row == tuple(range(self.d)) for row in self.maps)


# ------------------------------
# Décodage binaire (réponse OUI/NON)
# ------------------------------
class BinaryDecodingTable(BaseModel):
    """
    Réponse G pour chaque triplet (m, y, k) : ``guesses[m][y][k]``.
    G = 0 signifie OUI (a_y = k), G = 1 signifie NON.

    ``unreachable`` liste les messages jamais envoyés par l'encodage ;
    ils sont décodés en G = 1 par convention.
    """

    model_config = ConfigDict(frozen=True)

    d: int
    n: int
    guesses: tuple[tuple[tuple[int, ...], ...], ...]
    unreachable: tuple[int, ...] = ()

    @model_validator(mode="after")
    def check_guesses(self) -> "BinaryDecodingTable":
        if len(self.guesses) != self.d:
            raise InvalidParams("La table doit couvrir tous les messages")
        for per_message in self.guesses:
            if len(per_message) != self.n:
                raise InvalidParams("La table doit couvrir toutes les entrées y")
            for per_y in per_message:
                if len(per_y) != self.d or any(g not in (0, 1) for g in per_y):
                    raise InvalidParams("Chaque réponse G doit valoir 0 ou 1 pour tout k")
        return self

    @classmethod
    def constant(cls, params: TaskParams, answer: int) -> "BinaryDecodingTable":
        row = (answer,) * params.d
        return cls(d=params.d, n=params.n, guesses=tuple((row,) * params.n for _ in range(params.d)))


# ------------------------------
# Résultat d'une recherche exhaustive
# ------------------------------
class OracleResult(BaseModel):
    """
    Optimum exact d'une recherche exhaustive et une stratégie témoin
    (la plus petite dans l'ordre lexicographique).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mode: str
    value: Fraction
    witness: EncodingStrategy
    decoding: Optional[StandardDecoding] = None
    binary_decoding: Optional[BinaryDecodingTable] = None
    evaluated: int

    def to_payload(self) -> dict:
        """Structure JSON du résultat : valeur exacte, stratégie témoin et décodage."""
        payload = {
            "mode": self.mode,
            "value": exact_payload(self.value),
            "evaluated": self.evaluated,
            "witness": list(self.witness.table),
        }
        if self.decoding is not None:
            payload["decoding"] = [list(row) for row in self.decoding.maps]
            payload["identity_decoding"] = self.decoding.is_identity()
        if self.binary_decoding is not None:
            payload["binary_decoding"] = [[list(row) for row in per_m] for per_m in self.binary_decoding.guesses]
            payload["unreachable"] = list(self.binary_decoding.unreachable)
        return payload
