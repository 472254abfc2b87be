import logging
import math
from collections import Counter
from fractions import Fraction
from typing import Iterator

import numpy as np

from brac_witness.config import COMPOSITION_CAP, WORD_CAP
from brac_witness.exceptions import CapExceeded, InvalidParams
from brac_witness.models.task import Composition, TaskParams

logger = logging.getLogger(__name__)


# ------------------------------
# Service de combinatoire exacte
# ------------------------------
class CombinatoricsService:
    """
    Énumération et comptage exacts sous-jacents à la borne classique du RAC :
    - compositions de n en d parts (ordre lexicographique décroissant)
    - coefficients multinomiaux
    - valeur classique optimale du RAC standard, en rationnel exact

    Les plafonds sont passés au constructeur pour que les tests puissent
    travailler avec de petites limites.
    """

    def __init__(self, composition_cap: int = COMPOSITION_CAP, word_cap: int = WORD_CAP):
        self.composition_cap = composition_cap
        self.word_cap = word_cap


    # ------------------------------
    # Comptage des compositions
    # ------------------------------
    def composition_count(self, params: TaskParams) -> int:
        """Nombre de solutions de n_0 + ... + n_{d-1} = n : C(n+d-1, d-1)."""
        return math.comb(params.n + params.d - 1, params.d - 1)


    def _check_cap(self, params: TaskParams) -> int:
        count = self.composition_count(params)
        if count > self.composition_cap:
            raise CapExceeded(
                f"{count} compositions pour (n={params.n}, d={params.d}) : "
                f"plafond {self.composition_cap} dépassé"
            )
        return count


    # ------------------------------
    # Énumération des compositions
    # ------------------------------
    def enumerate_compositions(self, params: TaskParams) -> Iterator[Composition]:
        """
        Renvoie un itérateur sur toutes les compositions, chacune une seule
        fois, dans l'ordre lexicographique décroissant des comptes.

        Raises:
            CapExceeded: si le nombre de compositions dépasse le plafond
        """
        self._check_cap(params)
        return (Composition(counts=counts) for counts in self._descending_counts(params.n, params.d))


    @staticmethod
    def _descending_counts(total: int, parts: int) -> Iterator[tuple[int, ...]]:
        # Successeur lexicographique décroissant, sans récursion (d peut valoir 1000)
        counts = [0] * parts
        counts[0] = total
        while True:
            yield tuple(counts)
            pivot = parts - 2
            while pivot >= 0 and counts[pivot] == 0:
                pivot -= 1
            if pivot < 0:
                return
            tail = counts[pivot + 1]
            for j in range(pivot + 2, parts):
                tail += counts[j]
                counts[j] = 0
            counts[pivot] -= 1
            counts[pivot + 1] = tail + 1


    # ------------------------------
    # Coefficient multinomial
    # ------------------------------
    def multinomial(self, composition: Composition) -> int:
        """n! / (n_0! ... n_{d-1}!) en entier exact."""
        result = 1
        running = 0
        for count in composition.counts:
            running += count
            result *= math.comb(running, count)
        return result


    # ------------------------------
    # Partitions : compositions regroupées par multiset de parts
    # ------------------------------
    @staticmethod
    def _partitions(total: int, largest: int, max_parts: int) -> Iterator[tuple[int, ...]]:
        if total == 0:
            yield ()
            return
        if max_parts == 0:
            return
        for first in range(min(total, largest), 0, -1):
            for rest in CombinatoricsService._partitions(total - first, first, max_parts - 1):
                yield (first,) + rest


    def weighted_majority_sum(self, params: TaskParams) -> int:
        """
        Somme exacte sur toutes les compositions c de multinomial(c) * max(c),
        c'est-à-dire le nombre de couples (a, y) où a_y est la lettre majoritaire.

        Les compositions ayant le même multiset de parts non nulles ont le même
        multinomial et le même max ; on somme donc sur les partitions de n en
        au plus d parts, pondérées par le nombre de placements d!/((d-k)! prod m_v!).
        """
        self._check_cap(params)
        n, d = params.n, params.d
        factorial_n = math.factorial(n)
        total = 0
        for parts in self._partitions(n, n, d):
            multinomial = factorial_n
            for part in parts:
                multinomial //= math.factorial(part)
            placements = math.perm(d, len(parts))
            for multiplicity in Counter(parts).values():
                placements //= math.factorial(multiplicity)
            total += placements * multinomial * parts[0]
        return total


    # ------------------------------
    # Valeur classique du RAC standard
    # ------------------------------
    def standard_rac_classical_value(self, params: TaskParams) -> Fraction:
        """
        Succès moyen optimal (encodage majoritaire, décodage identité) :
        (1/(n d^n)) * somme des multinomial(c) * max(c), en rationnel exact.
        """
        value = Fraction(self.weighted_majority_sum(params), params.n * params.word_count)
        logger.debug("RAC standard (n=%d, d=%d) : %s", params.n, params.d, value)
        return value


    def standard_rac_value_n2(self, d: int) -> Fraction:
        """Forme close pour n = 2 : 1/2 + 1/(2d) = (d+1)/(2d)."""
        if d < 2:
            raise InvalidParams(f"La dimension d doit être >= 2 (reçu {d})")
        return Fraction(d + 1, 2 * d)


    # ------------------------------
    # Table des mots d'Alice
    # ------------------------------
    def enumerate_words(self, params: TaskParams) -> np.ndarray:
        """
        Tous les mots de longueur n sous forme de tableau (d^n, n), dans
        l'ordre lexicographique (a_0 le plus significatif).
        """
        if params.word_count > self.word_cap:
            raise CapExceeded(
                f"{params.word_count} mots pour (n={params.n}, d={params.d}) : "
                f"plafond {self.word_cap} dépassé"
            )
        grid = np.indices((params.d,) * params.n).reshape(params.n, -1).T
        return np.ascontiguousarray(grid, dtype=np.int64)


# ------------------------------
# Instance unique (singleton) du service
# ------------------------------
combinatorics_service = CombinatoricsService()
