import csv
import logging
import math
from typing import Iterable, Optional, TextIO

import numpy as np
from scipy.special import xlogy
from sqlmodel import Session, select

from brac_witness.config import ALGEBRAIC_TOLERANCE, DELTA_GUARD
from brac_witness.exceptions import DomainError, InvalidIndex, InvalidParams, NoSolution
from brac_witness.models.payoff import (
    CurvePoint,
    DeltaMinimum,
    PayoffConfig,
    PcritRecord,
    PcritResult,
    RangeStatus,
    StepDistribution,
)
from brac_witness.models.task import format_float

logger = logging.getLogger(__name__)

# Valeurs publiées (p_crit, t_yes) pour epsilon = 1e-5 ; pour d >= 8,
# find_pcrit s'arrête quelques 1e-4 en dessous (tous les Delta_i y sont déjà > 0)
REFERENCE_PCRIT_VALUES: dict[int, tuple[float, float]] = {
    3: (0.33340, 1.99940),
    8: (0.18495, 4.40687),
    10: (0.17021, 4.87510),
    50: (0.11180, 7.94454),
    200: (0.08885, 10.25490),
    700: (0.07524, 12.29080),
    1000: (0.07121, 13.04300),
}

# Raffinement local : 201 points sur deux pas de grille, soit un pas 100 fois plus fin
REFINE_POINTS = 201


def _step_entropy(x, p, d):
    """H^x en bits, vectorisé ; 0 log 0 = 0."""
    low = (1 - x * p) / (d - x)
    # xlogy vaut 0 en 0 ; division par ln 2 pour des bits
    return -(x * xlogy(p, p) + (d - x) * xlogy(low, low)) / math.log(2)


def _p_from_t(t, x, d, p_crit):
    # inverse de T = (x [T_YES p - (1 - p)] + d - 1) / T_d avec T_YES = (1 - p_crit) / p_crit
    return (t + p_crit * (d * (t - 1) - 2 * t + x + 1)) / x


def _in_domain(p, x, d):
    return (p >= 1 / d - ALGEBRAIC_TOLERANCE) & (p <= 1 / x + ALGEBRAIC_TOLERANCE)


# ------------------------------
# Solveur de p_crit
# ------------------------------
class PcritService:
    """
    Analyse entropique du RAC binaire : entropie et gain des distributions en
    escalier, bornes de l'intervalle [T_0, T_1^{x=i}], fonction Delta_i et
    balayage du plus petit p_crit pour lequel la stratégie majoritaire (x = 1)
    maximise l'entropie.
    """

    def __init__(self, grid_size: int = 1001):
        self.grid_size = grid_size


    # ------------------------------
    # Entropie et gain d'une distribution en escalier
    # ------------------------------
    def entropy_step(self, sd: StepDistribution, ordered: bool = True) -> float:
        """
        Entropie (bits) de la distribution en escalier.

        Args:
            sd (StepDistribution): distribution (x, p, d)
            ordered (bool): impose p dans [1/d, 1/x] ; False n'exige que la
                faisabilité (utile pour la distribution miroir)

        Raises:
            DomainError: p hors du domaine, ``side`` vaut "low" ou "high"
        """
        self._check_domain(sd, ordered)
        return float(_step_entropy(sd.x, min(max(sd.p, 0.0), 1 / sd.x), sd.d))


    def payoff_step(self, sd: StepDistribution, cfg: PayoffConfig) -> float:
        """T = (x [T_YES p - (1 - p)] + d - 1) / T_d."""
        if cfg.d != sd.d:
            raise InvalidParams(f"Dimensions incohérentes : {sd.d} et {cfg.d}")
        self._check_domain(sd, ordered=True)
        t_yes = cfg.t_yes_float
        return (sd.x * (t_yes * sd.p - (1 - sd.p)) + sd.d - 1) / cfg.t_d_float


    @staticmethod
    def _check_domain(sd: StepDistribution, ordered: bool) -> None:
        lower = 1 / sd.d if ordered else 0.0
        if sd.p < lower - ALGEBRAIC_TOLERANCE:
            raise DomainError(f"p = {sd.p} < {lower} (x={sd.x}, d={sd.d})", side="low")
        if sd.p > 1 / sd.x + ALGEBRAIC_TOLERANCE:
            raise DomainError(f"p = {sd.p} > 1/{sd.x} (d={sd.d})", side="high")


    # ------------------------------
    # Inversion T -> p et bornes de l'intervalle
    # ------------------------------
    def p_from_T(self, t: float, x: int, d: int, p_crit: float) -> float:
        """
        Probabilité p de la distribution (x, p) dont le gain vaut T.

        Raises:
            DomainError: le p obtenu sort de [1/d, 1/x] (``side`` indique la borne)
        """
        self._check_index(x, d, low=1, high=d - 1)
        p = _p_from_t(t, x, d, p_crit)
        if p < 1 / d - ALGEBRAIC_TOLERANCE:
            raise DomainError(f"T = {t} donne p = {p} < 1/{d} pour x={x}", side="low")
        if p > 1 / x + ALGEBRAIC_TOLERANCE:
            raise DomainError(f"T = {t} donne p = {p} > 1/{x}", side="high")
        return p


    def t_lower(self, d: int, p_crit: float) -> float:
        """T_0 = (1 + (d-2) d p_crit) / (d + (d-2) d p_crit), atteint en p = 1/d."""
        spread = (d - 2) * d * p_crit
        return (1 + spread) / (d + spread)


    def t_upper(self, d: int, p_crit: float, i: int) -> float:
        """T_1^{x=i} = (1 + p_crit (d-i-1)) / (1 + (d-2) p_crit), atteint en i p = 1."""
        self._check_index(i, d, low=1, high=d - 1)
        return (1 + p_crit * (d - i - 1)) / (1 + (d - 2) * p_crit)


    @staticmethod
    def _check_index(i: int, d: int, low: int, high: int) -> None:
        if not low <= i <= high:
            raise InvalidIndex(f"Indice {i} hors de {{{low}, ..., {high}}} pour d={d}")


    # ------------------------------
    # Delta_i = H^{x=1} - H^{x=i}
    # ------------------------------
    def delta_i(self, t: float, d: int, p_crit: float, i: int) -> Optional[float]:
        """Delta_i(T), ou None si l'une des deux probabilités sort de son domaine."""
        self._check_index(i, d, low=2, high=d - 1)
        values = self._delta_values(np.asarray([[t]], dtype=float), np.asarray([[i]]), d, p_crit)
        value = values[0, 0]
        return None if np.isnan(value) else float(value)


    @staticmethod
    def _delta_values(t: np.ndarray, i: np.ndarray, d: int, p_crit: float) -> np.ndarray:
        """Delta_i sur une grille (lignes : i, colonnes : T) ; NaN hors domaine."""
        p1 = _p_from_t(t, 1, d, p_crit)
        pi = _p_from_t(t, i, d, p_crit)
        valid = _in_domain(p1, 1, d) & _in_domain(pi, i, d)
        # bornage pour xlogy, les points hors domaine sont masqués ci-dessous
        p1 = np.clip(p1, 1 / d, 1.0)
        pi = np.clip(pi, 1 / d, 1 / i)
        delta = _step_entropy(1, p1, d) - _step_entropy(i, pi, d)
        return np.where(valid, delta, np.nan)


    def _range_minima(self, d: int, p_crit: float, indices: Iterable[int],
                      grid_size: Optional[int] = None) -> list[DeltaMinimum]:
        """
        Minimum de Delta_i sur [T_0, T_1^{x=i}] pour plusieurs i à la fois :
        grille uniforme (extrémités comprises), puis grille locale autour du
        meilleur point. Égalités résolues vers le plus petit T.
        """
        grid_size = grid_size or self.grid_size
        if grid_size < 3:
            raise InvalidParams(f"grid_size doit être >= 3 (reçu {grid_size})")

        rows = np.asarray(list(indices), dtype=np.int64)
        t0 = self.t_lower(d, p_crit)
        t1 = (1 + p_crit * (d - rows - 1)) / (1 + (d - 2) * p_crit)
        width = t1 - t0
        nonempty = width > 0

        # une ligne par i, une colonne par T
        unit = np.linspace(0.0, 1.0, grid_size)
        grid = t0 + width[:, None] * unit[None, :]
        values = self._delta_values(grid, rows[:, None], d, p_crit)
        defined = ~np.all(np.isnan(values), axis=1) & nonempty

        # NaN ignorés par argmin
        safe = np.where(np.isnan(values), np.inf, values)
        best = np.argmin(safe, axis=1)
        t_star = grid[np.arange(len(rows)), best]
        # grille locale sur un pas de part et d'autre du meilleur point
        step = width / (grid_size - 1)
        lo = np.maximum(t0, t_star - step)
        hi = np.minimum(t1, t_star + step)
        local = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, REFINE_POINTS)[None, :]
        refined = self._delta_values(local, rows[:, None], d, p_crit)

        samples_t = np.concatenate([grid, local], axis=1)
        samples = np.concatenate([safe, np.where(np.isnan(refined), np.inf, refined)], axis=1)

        minima = []
        for r, i in enumerate(rows):
            if not nonempty[r]:
                minima.append(DeltaMinimum(i=int(i), status=RangeStatus.EMPTY_RANGE,
                                           t_lower=t0, t_upper=float(t1[r])))
                continue
            if not defined[r]:
                minima.append(DeltaMinimum(i=int(i), status=RangeStatus.UNDEFINED,
                                           t_lower=t0, t_upper=float(t1[r])))
                continue
            value = samples[r].min()
            # Plus petit T parmi les minima
            candidates = np.flatnonzero(samples[r] == value)
            argmin_t = float(samples_t[r, candidates].min())
            minima.append(DeltaMinimum(i=int(i), status=RangeStatus.OK, value=float(value),
                                       argmin_t=argmin_t, t_lower=t0, t_upper=float(t1[r])))
        return minima


    def min_delta_over_range(self, d: int, p_crit: float, i: int,
                             grid_size: Optional[int] = None) -> DeltaMinimum:
        """Minimum de Delta_i sur [T_0, T_1^{x=i}] (statut EMPTY_RANGE si l'intervalle est vide)."""
        self._check_index(i, d, low=2, high=d - 1)
        return self._range_minima(d, p_crit, [i], grid_size)[0]


    # ------------------------------
    # Test d'optimalité de la stratégie majoritaire
    # ------------------------------
    @staticmethod
    def _failing(minima: list[DeltaMinimum]) -> Optional[int]:
        for minimum in minima:
            if minimum.status == RangeStatus.OK and minimum.value <= DELTA_GUARD:
                return minimum.i
        return None


    def _passes(self, d: int, p_crit: float, hint: Optional[int], grid_size: int) -> tuple[bool, Optional[int]]:
        # L'indice fautif du pas précédent est testé en premier
        if hint is not None and self._failing(self._range_minima(d, p_crit, [hint], grid_size)) is not None:
            return False, hint
        failing = self._failing(self._range_minima(d, p_crit, range(2, math.ceil(d / 2) + 1), grid_size))
        return failing is None, failing


    # ------------------------------
    # Balayage de p_crit
    # ------------------------------
    def find_pcrit(self, d: int, epsilon: float = 1e-5, grid_size: Optional[int] = None,
                   coarse_factor: int = 1) -> PcritResult:
        """
        Plus petit p_crit = 1/d + k epsilon (k >= 1) tel que min Delta_i > 0
        pour tout i dans {2, ..., ceil(d/2)}.

        Avec ``coarse_factor`` > 1, le balayage avance d'abord par pas de
        coarse_factor * epsilon, recule d'un pas grossier au premier succès
        et reprend au pas epsilon.

        Raises:
            InvalidParams: d < 3, epsilon <= 0 ou coarse_factor < 1
            NoSolution: p_crit atteint 1 sans succès
        """
        if d < 3:
            raise InvalidParams(f"Le balayage exige d >= 3 (reçu {d})")
        if not epsilon > 0:
            raise InvalidParams(f"epsilon doit être > 0 (reçu {epsilon})")
        if coarse_factor < 1:
            raise InvalidParams(f"coarse_factor doit être >= 1 (reçu {coarse_factor})")
        grid_size = grid_size or self.grid_size

        start = 1 / d
        steps = 0
        hint = None
        stride = coarse_factor
        k = 0
        while True:
            # p_crit recalculé depuis k, sans cumul d'arrondis
            k += stride
            p_crit = start + k * epsilon
            if p_crit >= 1:
                raise NoSolution(f"Aucun p_crit < 1 trouvé pour d={d} (epsilon={epsilon})")
            steps += 1
            passed, hint = self._passes(d, p_crit, hint, grid_size)
            if steps % 1000 == 0:
                logger.debug("d=%d : %d pas, p_crit=%.6f", d, steps, p_crit)
            if not passed:
                continue
            if stride == 1:
                break
            # Retour d'un pas grossier puis reprise au pas fin
            k -= stride
            stride = 1

        t_yes = (1 - p_crit) / p_crit
        logger.info("d=%d : p_crit=%.5f, t_yes=%.5f (%d pas)", d, p_crit, t_yes, steps)
        return PcritResult(d=d, epsilon=epsilon, p_crit=p_crit, t_yes=t_yes, steps=steps)


    def get_or_compute(self, session: Session, d: int, epsilon: float = 1e-5) -> PcritResult:
        """Résultat en cache pour (d, epsilon), calculé et enregistré sinon."""
        record = session.exec(
            select(PcritRecord).where(PcritRecord.d == d, PcritRecord.epsilon == epsilon)
        ).first()
        if record is not None:
            return record.to_result()

        result = self.find_pcrit(d, epsilon)
        session.add(PcritRecord(d=result.d, epsilon=result.epsilon, p_crit=result.p_crit,
                                t_yes=result.t_yes, steps=result.steps))
        session.commit()
        return result


    # ------------------------------
    # Courbes H(T)
    # ------------------------------
    def emit_curves(self, d: int, p_crit: float, x_values: list[int], samples: int) -> list[CurvePoint]:
        """
        Échantillonne H^x(T) sur [T_0, T_1^{x}] pour chaque x ; les points des
        différentes courbes sont fusionnés et triés par T. Une entropie vaut
        None quand T sort de l'intervalle de x ou que p sort de son domaine.
        """
        if samples < 2:
            raise InvalidParams(f"samples doit être >= 2 (reçu {samples})")
        for x in x_values:
            self._check_index(x, d, low=1, high=d - 1)

        t0 = self.t_lower(d, p_crit)
        uppers = {x: self.t_upper(d, p_crit, x) for x in x_values}
        grid = sorted({float(t) for x in x_values for t in np.linspace(t0, uppers[x], samples)})

        points = []
        for t in grid:
            entropies, valid, limits = {}, {}, []
            for x in x_values:
                p = _p_from_t(t, x, d, p_crit)
                inside = t0 <= t <= uppers[x] and bool(_in_domain(p, x, d))
                valid[x] = inside
                entropies[x] = float(_step_entropy(x, np.clip(p, 1 / d, 1 / x), d)) if inside else None
                if t == t0 or t == uppers[x]:
                    limits.append(x)
            points.append(CurvePoint(t=t, entropies=entropies, valid=valid, limits=limits))
        return points


    def write_curves_csv(self, points: list[CurvePoint], x_values: list[int], stream: TextIO) -> None:
        """En-tête ``T,H_x1,...,limit_x1,...`` ; flottants à 12 chiffres significatifs."""
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["T"] + [f"H_x{x}" for x in x_values] + [f"limit_x{x}" for x in x_values])
        for point in points:
            entropies = ["" if point.entropies[x] is None else format_float(point.entropies[x]) for x in x_values]
            limits = [1 if x in point.limits else 0 for x in x_values]
            writer.writerow([format_float(point.t)] + entropies + limits)


# ------------------------------
# Instance unique (singleton) du service
# ------------------------------
pcrit_service = PcritService()
