import logging
import math

import numpy as np
from scipy.linalg import dft

from brac_witness.exceptions import DimensionMismatch, InvalidLabel, InvalidParams
from brac_witness.models.payoff import PayoffConfig
from brac_witness.models.quantum import ProjectiveBinaryMeasurement, QuantumState
from brac_witness.models.statistics import StatisticsEntry, StatisticsTable

logger = logging.getLogger(__name__)


# ------------------------------
# Simulation du protocole quantique (n = 2)
# ------------------------------
class QuantumService:
    """
    Protocole quantique du RAC binaire pour n = 2 : Alice prépare une
    superposition de |a0> (base de calcul) et de |a1 barre> (base de
    Fourier), Bob mesure le projecteur associé à (y, k).
    """

    @staticmethod
    def _check_label(label: int, d: int) -> None:
        if d < 2:
            raise InvalidParams(f"La dimension d doit être >= 2 (reçu {d})")
        if not 0 <= label < d:
            raise InvalidLabel(f"Étiquette {label} hors de {{0, ..., {d - 1}}}")


    # ------------------------------
    # Bases de calcul et de Fourier
    # ------------------------------
    def _fourier_amplitudes(self, label: int, d: int) -> np.ndarray:
        # dft utilise exp(-2 pi i / d) : on conjugue pour obtenir omega = exp(2 pi i / d)
        return np.conj(dft(d, scale="sqrtn")[:, label])


    def fourier_vector(self, label: int, d: int) -> QuantumState:
        """|k barre> : amplitudes omega^(j k) / sqrt(d), omega = exp(2 pi i / d)."""
        self._check_label(label, d)
        return QuantumState(amplitudes=self._fourier_amplitudes(label, d))


    @staticmethod
    def _basis_vector(label: int, d: int) -> np.ndarray:
        vector = np.zeros(d, dtype=np.complex128)
        vector[label] = 1.0
        return vector


    # ------------------------------
    # Préparation d'Alice
    # ------------------------------
    def unnormalized_state(self, a0: int, a1: int, d: int, aligned: bool = True) -> np.ndarray:
        """
        |a0> + e^(i phi) |a1 barre> avant normalisation.

        Avec ``aligned``, phi = -2 pi a0 a1 / d rend le recouvrement réel
        positif et la norme au carré vaut 2 + 2/sqrt(d) pour tout (a0, a1).
        Sans alignement (écriture littérale), phi = 0.
        """
        self._check_label(a0, d)
        self._check_label(a1, d)
        phase = np.exp(-2j * np.pi * a0 * a1 / d) if aligned else 1.0
        return self._basis_vector(a0, d) + phase * self._fourier_amplitudes(a1, d)


    def prepare_state(self, a0: int, a1: int, d: int, aligned: bool = True) -> QuantumState:
        vector = self.unnormalized_state(a0, a1, d, aligned)
        return QuantumState(amplitudes=vector / np.linalg.norm(vector))


    # ------------------------------
    # Mesures de Bob
    # ------------------------------
    def measurement(self, y: int, k: int, d: int) -> ProjectiveBinaryMeasurement:
        """y = 0 : projecteur |k><k| ; y = 1 : projecteur |k barre><k barre|. Le projecteur donne G = 0."""
        if y not in (0, 1):
            raise InvalidLabel(f"La base y doit valoir 0 ou 1 (reçu {y})")
        self._check_label(k, d)
        vector = self._basis_vector(k, d) if y == 0 else self._fourier_amplitudes(k, d)
        return ProjectiveBinaryMeasurement(y=y, k=k, vector=vector)


    def born_probability(self, state: QuantumState, meas: ProjectiveBinaryMeasurement) -> float:
        """Probabilité de G = 0 : |<v|psi>|^2."""
        if state.d != meas.d:
            raise DimensionMismatch(f"État de dimension {state.d}, mesure de dimension {meas.d}")
        # vdot conjugue le premier argument
        probability = abs(np.vdot(meas.vector, state.amplitudes)) ** 2
        return float(min(max(probability, 0.0), 1.0))


    # ------------------------------
    # Table complète p(G = 0 | a0, a1, y, k)
    # ------------------------------
    def _yes_probabilities(self, d: int, aligned: bool) -> np.ndarray:
        """Tableau (d^2, 2, d) indexé par le rang de (a0, a1), puis y, puis k."""
        if d < 2:
            raise InvalidParams(f"La dimension d doit être >= 2 (reçu {d})")
        states = np.array([self.prepare_state(a0, a1, d, aligned).amplitudes
                           for a0 in range(d) for a1 in range(d)])
        # bases[0] : base de calcul, bases[1] : base de Fourier (lignes = vecteurs)
        bases = np.stack([np.eye(d, dtype=np.complex128), np.conj(dft(d, scale="sqrtn")).T])
        # overlaps[w, y, k] = <v_{y,k}|psi_w>
        overlaps = np.einsum("ykj,wj->wyk", np.conj(bases), states)
        # règle de Born, bornée contre les arrondis
        return np.clip(np.abs(overlaps) ** 2, 0.0, 1.0)


    def quantum_guess_probability(self, d: int) -> float:
        """Moyenne sur (a0, a1, y) de la probabilité de G = 0 pour k = a_y ; vaut 1/2 + 1/(2 sqrt d)."""
        yes = self._yes_probabilities(d, aligned=True)
        terms = []
        for a0 in range(d):
            for a1 in range(d):
                rank = a0 * d + a1
                terms.append(yes[rank, 0, a0])
                terms.append(yes[rank, 1, a1])
        return math.fsum(terms) / (2 * d * d)


    def simulate_binary_payoff(self, d: int, cfg: PayoffConfig, aligned: bool = True) -> float:
        """
        Gain moyen normalisé du protocole : T_YES p(G=0) quand k = a_y,
        p(G=1) sinon, moyenné sur (a0, a1, y, k) puis divisé par T_d.
        Sommation compensée (math.fsum) dans l'ordre des indices.
        """
        if cfg.d != d:
            raise DimensionMismatch(f"Gains définis pour d={cfg.d}, simulation en d={d}")
        yes = self._yes_probabilities(d, aligned)
        t_yes = cfg.t_yes_float
        terms = []
        for a0 in range(d):
            for a1 in range(d):
                rank = a0 * d + a1
                for y, letter in enumerate((a0, a1)):
                    for k in range(d):
                        p0 = yes[rank, y, k]
                        # T_YES si G = 0 sur la bonne lettre, 1 si G = 1 ailleurs
                        terms.append(t_yes * p0 if k == letter else 1.0 - p0)
        payoff = math.fsum(terms) / (2 * d * d * cfg.t_d_float)
        logger.debug("Simulation d=%d (alignée=%s) : %.12g", d, aligned, payoff)
        return payoff


    # ------------------------------
    # Export vers le format de certification
    # ------------------------------
    def export_statistics(self, d: int, cfg: PayoffConfig, aligned: bool = True) -> StatisticsTable:
        """Statistiques idéales du protocole, au format chargé par la certification."""
        if cfg.d != d:
            raise DimensionMismatch(f"Gains définis pour d={cfg.d}, simulation en d={d}")
        yes = self._yes_probabilities(d, aligned)
        entries = []
        for a0 in range(d):
            for a1 in range(d):
                rank = a0 * d + a1
                for y in range(2):
                    for k in range(d):
                        p0 = float(yes[rank, y, k])
                        entries.append(StatisticsEntry(a=[a0, a1], y=y, k=k, p0=p0, p1=1.0 - p0))
        return StatisticsTable(d=d, n=2, t_yes=cfg.t_yes, entries=entries)


# ------------------------------
# Instance unique (singleton) du service
# ------------------------------
quantum_service = QuantumService()
