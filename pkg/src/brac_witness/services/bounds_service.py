import logging
import math
from fractions import Fraction

from brac_witness.exceptions import BoundUnavailable, CapExceeded, DimensionMismatch, InvalidParams
from brac_witness.models.payoff import PayoffConfig
from brac_witness.models.report import BoundReport
from brac_witness.models.task import TaskParams
from brac_witness.services.combinatorics_service import CombinatoricsService, combinatorics_service

logger = logging.getLogger(__name__)


# ------------------------------
# Bornes classiques et quantiques
# ------------------------------
class BoundsService:
    """
    Gains moyens normalisés du RAC binaire :
    - classique, pour tout n (énumération des compositions) et en forme close pour n = 2
    - quantique, protocole à deux bases pour n = 2

    Les valeurs classiques sont des rationnels exacts, les valeurs quantiques
    des flottants (racine de d).
    """

    def __init__(self, combinatorics: CombinatoricsService = combinatorics_service):
        self.combinatorics = combinatorics

    @staticmethod
    def _check_dimension(d: int, cfg: PayoffConfig) -> None:
        if d < 2:
            raise InvalidParams(f"La dimension d doit être >= 2 (reçu {d})")
        if cfg.d != d:
            raise DimensionMismatch(f"Gains définis pour d={cfg.d}, borne demandée en d={d}")


    # ------------------------------
    # Borne classique, n quelconque
    # ------------------------------
    def binary_rac_classical_value(self, params: TaskParams, cfg: PayoffConfig) -> Fraction:
        """
        (1/(n d^n T_d)) * somme_c multinomial(c) [max(c)(T_YES + 1) + n(d - 2)]

        Le second terme somme à n(d-2) d^n, seule la somme pondérée des
        maxima demande l'énumération.

        Raises:
            CapExceeded: trop de compositions pour (n, d)
        """
        self._check_dimension(params.d, cfg)
        n, d = params.n, params.d
        weighted = self.combinatorics.weighted_majority_sum(params)
        total = (cfg.t_yes_exact + 1) * weighted + n * (d - 2) * params.word_count
        return total / (n * params.word_count * cfg.t_d)


    def binary_from_standard(self, t_standard: Fraction, d: int, cfg: PayoffConfig) -> Fraction:
        """((T_YES + 1) T_S + d - 2) / T_d : gain binaire d'une stratégie de succès standard T_S."""
        self._check_dimension(d, cfg)
        if not 0 <= t_standard <= 1:
            raise InvalidParams(f"Le succès standard doit être dans [0, 1] (reçu {t_standard})")
        return ((cfg.t_yes_exact + 1) * Fraction(t_standard) + d - 2) / cfg.t_d


    # ------------------------------
    # Formes closes pour n = 2
    # ------------------------------
    def binary_classical_n2(self, d: int, cfg: PayoffConfig) -> Fraction:
        """[T_YES + 1 + d(2d + T_YES - 3)] / (2d T_d)"""
        self._check_dimension(d, cfg)
        t_yes = cfg.t_yes_exact
        return (t_yes + 1 + d * (2 * d + t_yes - 3)) / (2 * d * cfg.t_d)


    def binary_quantum_n2(self, d: int, cfg: PayoffConfig) -> float:
        """[T_YES + 1 + sqrt(d)(2d + T_YES - 3)] / (2 sqrt(d) T_d)"""
        self._check_dimension(d, cfg)
        t_yes, root = cfg.t_yes_float, math.sqrt(d)
        return (t_yes + 1 + root * (2 * d + t_yes - 3)) / (2 * root * cfg.t_d_float)


    def quantum_classical_gap(self, d: int, cfg: PayoffConfig) -> float:
        """(T_YES + 1)(sqrt(d) - 1) / (2d T_d), strictement positif pour d >= 2."""
        self._check_dimension(d, cfg)
        return (cfg.t_yes_float + 1) * (math.sqrt(d) - 1) / (2 * d * cfg.t_d_float)


    # ------------------------------
    # Rapport complet
    # ------------------------------
    def bound_report(self, params: TaskParams, cfg: PayoffConfig) -> BoundReport:
        """
        Rassemble les bornes de (d, n, t_yes). Si l'énumération dépasse son
        plafond, les formes closes prennent le relais pour n = 2.

        Raises:
            BoundUnavailable: énumération impossible et n != 2
        """
        self._check_dimension(params.d, cfg)
        try:
            standard = self.combinatorics.standard_rac_classical_value(params)
            binary = self.binary_rac_classical_value(params, cfg)
            provenance = "enumeration"
        except CapExceeded as exc:
            if params.n != 2:
                raise BoundUnavailable(f"Borne classique indisponible : {exc.detail}") from exc
            logger.info("Plafond atteint pour d=%d, formes closes n=2 utilisées", params.d)
            standard = self.combinatorics.standard_rac_value_n2(params.d)
            binary = self.binary_classical_n2(params.d, cfg)
            provenance = "closed_form_n2"

        quantum = gap = None
        if params.n == 2:
            quantum = self.binary_quantum_n2(params.d, cfg)
            gap = self.quantum_classical_gap(params.d, cfg)

        return BoundReport(
            d=params.d,
            n=params.n,
            t_yes=cfg.t_yes,
            classical_standard=standard,
            classical_binary=binary,
            provenance=provenance,
            quantum_binary_n2=quantum,
            gap=gap,
            preparations=params.word_count,
            measurements=params.n * params.d,
        )


# ------------------------------
# Instance unique (singleton) du service
# ------------------------------
bounds_service = BoundsService()
