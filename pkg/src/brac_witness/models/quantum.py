import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from brac_witness.config import ALGEBRAIC_TOLERANCE


def _as_vector(value) -> np.ndarray:
    vector = np.asarray(value, dtype=np.complex128).reshape(-1)
    vector.flags.writeable = False
    return vector


# ------------------------------
# État pur de dimension d
# ------------------------------
class QuantumState(BaseModel):
    """Vecteur complexe unitaire de dimension d."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitudes: np.ndarray

    @field_validator("amplitudes", mode="before")
    @classmethod
    def to_vector(cls, value) -> np.ndarray:
        return _as_vector(value)

    @model_validator(mode="after")
    def check_norm(self) -> "QuantumState":
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > ALGEBRAIC_TOLERANCE:
            raise ValueError(f"L'état doit être normé (norme {norm:.15g})")
        return self

    @property
    def d(self) -> int:
        return self.amplitudes.shape[0]


# ------------------------------
# Mesure projective binaire
# ------------------------------
class ProjectiveBinaryMeasurement(BaseModel):
    """
    Mesure {P, I - P} avec P = |v><v| de rang 1. Le projecteur correspond
    à la réponse G = 0, son complément à G = 1.

    Attributes:
        y (int): base mesurée (0 : base de calcul, 1 : base de Fourier)
        k (int): étiquette de l'état projeté
        vector (np.ndarray): vecteur unitaire définissant P
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    y: int
    k: int
    vector: np.ndarray

    @field_validator("vector", mode="before")
    @classmethod
    def to_vector(cls, value) -> np.ndarray:
        return _as_vector(value)

    @model_validator(mode="after")
    def check_projector(self) -> "ProjectiveBinaryMeasurement":
        norm = np.linalg.norm(self.vector)
        if abs(norm - 1.0) > ALGEBRAIC_TOLERANCE:
            raise ValueError(f"Le vecteur du projecteur doit être normé (norme {norm:.15g})")
        projector = self.projector
        if not np.allclose(projector @ projector, projector, rtol=0.0, atol=ALGEBRAIC_TOLERANCE):
            raise ValueError("Le projecteur n'est pas idempotent")
        return self

    @property
    def d(self) -> int:
        return self.vector.shape[0]

    @property
    def projector(self) -> np.ndarray:
        return np.outer(self.vector, np.conj(self.vector))
