"""
Hiérarchie d'erreurs du toolkit.

Chaque erreur porte, comme ``HTTPException``, un ``status_code`` et un
``detail`` lisible ; elle porte aussi le code de sortie utilisé par la CLI :

- 2 : erreur de validation (paramètres, fichiers, dimensions)
- 3 : plafond dépassé ou problème infaisable
"""


class WitnessError(Exception):
    """Erreur de base, convertie en réponse JSON par l'API et en code de sortie par la CLI."""

    status_code = 400
    exit_code = 2

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# ------------------------------
# Erreurs de validation (exit 2)
# ------------------------------
class InvalidParams(WitnessError):
    status_code = 422


class DimensionMismatch(WitnessError):
    status_code = 422


class DomainError(WitnessError):
    """Probabilité hors du domaine [1/d, 1/x] ; ``side`` indique la borne violée."""

    status_code = 422

    def __init__(self, detail: str, side: str | None = None):
        super().__init__(detail)
        self.side = side


class InvalidIndex(WitnessError):
    status_code = 422


class InvalidLabel(WitnessError):
    status_code = 422


class ParseError(WitnessError):
    pass


class SchemaError(WitnessError):
    pass


class NormalizationError(WitnessError):
    pass


# ------------------------------
# Plafonds et infaisabilité (exit 3)
# ------------------------------
class CapExceeded(WitnessError):
    status_code = 422
    exit_code = 3


class BoundUnavailable(WitnessError):
    status_code = 422
    exit_code = 3


class NoSolution(WitnessError):
    status_code = 422
    exit_code = 3
