from decimal import Decimal
from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, ConfigDict

from brac_witness.models.task import exact_payload, format_float


# ------------------------------
# Rapport de bornes (classique / quantique)
# ------------------------------
class BoundReport(BaseModel):
    """
    Bornes du RAC standard et binaire pour (d, n, t_yes).

    Attributes:
        classical_standard (Fraction): succès classique optimal du RAC standard
        classical_binary (Fraction): gain classique optimal du RAC binaire
        provenance (str): "enumeration" ou "closed_form_n2"
        quantum_binary_n2 (float): gain du protocole quantique, n = 2 seulement
        gap (float): écart quantique - classique, n = 2 seulement
        preparations (int): nombre de préparations d'Alice (d^n)
        measurements (int): nombre de mesures binaires de Bob (n d)
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    d: int
    n: int
    t_yes: Decimal
    classical_standard: Fraction
    classical_binary: Fraction
    provenance: str
    quantum_binary_n2: Optional[float] = None
    gap: Optional[float] = None
    preparations: int
    measurements: int

    def to_payload(self) -> dict:
        """Structure JSON du rapport : fractions exactes et décimaux à 12 chiffres."""
        return {
            "d": self.d,
            "n": self.n,
            "t_yes": str(self.t_yes),
            "classical_standard": exact_payload(self.classical_standard),
            "classical_binary": exact_payload(self.classical_binary),
            "provenance": self.provenance,
            "quantum_binary_n2": None if self.quantum_binary_n2 is None else format_float(self.quantum_binary_n2),
            "gap": None if self.gap is None else format_float(self.gap),
            "preparations": self.preparations,
            "measurements": self.measurements,
        }
