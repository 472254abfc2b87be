import itertools
import logging
import math
from fractions import Fraction
from typing import Iterator

import numpy as np
from scipy.stats import entropy

from brac_witness.config import DECODING_CAP, ENCODING_CAP
from brac_witness.exceptions import CapExceeded, DimensionMismatch
from brac_witness.models.payoff import PayoffConfig
from brac_witness.models.statistics import StatisticsEntry, StatisticsTable
from brac_witness.models.strategy import (
    BinaryDecodingTable,
    EncodingStrategy,
    OracleResult,
    SearchMode,
    StandardDecoding,
)
from brac_witness.models.task import DitString, TaskParams
from brac_witness.services.combinatorics_service import CombinatoricsService, combinatorics_service

logger = logging.getLogger(__name__)

# Nombre d'éléments numpy manipulés par paquet d'encodages
CHUNK_BUDGET = 2_000_000


# ------------------------------
# Oracle des stratégies déterministes
# ------------------------------
class StrategyOracleService:
    """
    Évaluation exacte des stratégies classiques déterministes et recherche
    exhaustive de l'optimum :
    - RAC standard (encodage E, décodages D_y)
    - RAC binaire (encodage E, table de réponses G(m, y, k))

    Toutes les valeurs renvoyées sont des rationnels exacts.
    """

    def __init__(self,
                 combinatorics: CombinatoricsService = combinatorics_service,
                 encoding_cap: int = ENCODING_CAP,
                 decoding_cap: int = DECODING_CAP):
        self.combinatorics = combinatorics
        self.encoding_cap = encoding_cap
        self.decoding_cap = decoding_cap


    # ------------------------------
    # Outils internes
    # ------------------------------
    @staticmethod
    def _check_encoding(encoding: EncodingStrategy, params: TaskParams) -> None:
        if encoding.d != params.d or encoding.n != params.n:
            raise DimensionMismatch(
                f"Encodage (d={encoding.d}, n={encoding.n}) incompatible avec "
                f"la tâche (d={params.d}, n={params.n})"
            )

    @staticmethod
    def _check_payoff(cfg: PayoffConfig, params: TaskParams) -> None:
        if cfg.d != params.d:
            raise DimensionMismatch(f"Gains définis pour d={cfg.d}, tâche en d={params.d}")

    @staticmethod
    def _letter_indicator(words: np.ndarray, d: int) -> np.ndarray:
        """Indicatrice (d^n, n, d) de a_y = k."""
        return words[:, :, None] == np.arange(d)

    @staticmethod
    def _success_matrix(decoding: np.ndarray, words: np.ndarray) -> np.ndarray:
        """S[w, m] = nombre de y tels que D_y(m) = a_y pour le mot w."""
        return (decoding.T[None, :, :] == words[:, None, :]).sum(axis=2)

    @staticmethod
    def _message_letter_counts(tables: np.ndarray, indicator: np.ndarray, d: int) -> np.ndarray:
        """N[b, m, y, k] = nombre de mots envoyés sur m avec a_y = k, pour chaque encodage b."""
        sent = (tables[:, :, None] == np.arange(d)).astype(np.int64)
        return np.einsum("bwm,wyk->bmyk", sent, indicator.astype(np.int64))

    def _encoding_chunks(self, word_count: int, d: int) -> Iterator[tuple[int, np.ndarray]]:
        """Toutes les tables d'encodage, par paquets, dans l'ordre lexicographique."""
        total = d**word_count
        powers = d ** np.arange(word_count - 1, -1, -1, dtype=np.int64)
        size = max(1, CHUNK_BUDGET // (word_count * d * d))
        for start in range(0, total, size):
            index = np.arange(start, min(start + size, total), dtype=np.int64)
            yield start, (index[:, None] // powers[None, :]) % d

    def _check_literal_cap(self, params: TaskParams) -> None:
        # Comparaison en log pour ne pas calculer d^(d^n) quand il est gigantesque
        if params.word_count * math.log10(params.d) > math.log10(self.encoding_cap) + 1e-9:
            raise CapExceeded(
                f"d^(d^n) encodages pour (n={params.n}, d={params.d}) : "
                f"plafond {self.encoding_cap} dépassé"
            )

    @staticmethod
    def _scaled_binary_payoff(counts: np.ndarray, sent: np.ndarray, num: int, den: int) -> np.ndarray:
        """
        den * (somme des gains) pour la réponse optimale à chaque (m, y, k) :
        max(T_YES N, N_m - N) multiplié par den pour rester entier.
        """
        if max(num, den) * max(int(sent.max(initial=0)), 1) >= 2**62:
            counts = counts.astype(object)
            sent = sent.astype(object)
        yes = num * counts
        no = den * (sent[..., None, None] - counts)
        return np.maximum(yes, no).reshape(counts.shape[0], -1).sum(axis=1)


    # ------------------------------
    # RAC standard : évaluation d'une stratégie
    # ------------------------------
    def evaluate_standard_strategy(self, encoding: EncodingStrategy, decoding: StandardDecoding,
                                   params: TaskParams) -> Fraction:
        """
        Succès moyen exact (1/(n d^n)) * #{(a, y) : D_y(E(a)) = a_y}.

        Raises:
            DimensionMismatch: si E ou D ne correspondent pas à (n, d)
        """
        self._check_encoding(encoding, params)
        if decoding.d != params.d or decoding.n != params.n:
            raise DimensionMismatch("Le décodage ne correspond pas à la tâche")

        words = self.combinatorics.enumerate_words(params)
        messages = np.asarray(encoding.table, dtype=np.int64)
        maps = np.asarray(decoding.maps, dtype=np.int64)
        decoded = maps[np.arange(params.n)[None, :], messages[:, None]]
        hits = int((decoded == words).sum())
        return Fraction(hits, params.n * params.word_count)


    # ------------------------------
    # Encodage majoritaire
    # ------------------------------
    def majority_encoding(self, word: DitString) -> int:
        """Lettre la plus fréquente du mot ; égalité résolue vers la plus petite lettre."""
        counts = np.bincount(np.asarray(word.letters), minlength=word.d)
        return int(np.argmax(counts))


    def majority_strategy(self, params: TaskParams) -> EncodingStrategy:
        """Table complète de l'encodage majoritaire."""
        words = self.combinatorics.enumerate_words(params)
        counts = self._letter_indicator(words, params.d).sum(axis=1)
        table = np.argmax(counts, axis=1)
        return EncodingStrategy(d=params.d, n=params.n, table=tuple(int(m) for m in table))


    def optimal_encoding_for_decoding(self, decoding: StandardDecoding, params: TaskParams) -> EncodingStrategy:
        """
        Meilleur encodage pour des décodages D_y fixés : pour chaque mot, le
        message qui maximise le nombre de y tels que D_y(m) = a_y (plus petit
        message en cas d'égalité).
        """
        if decoding.d != params.d or decoding.n != params.n:
            raise DimensionMismatch("Le décodage ne correspond pas à la tâche")
        words = self.combinatorics.enumerate_words(params)
        scores = self._success_matrix(np.asarray(decoding.maps, dtype=np.int64), words)
        table = np.argmax(scores, axis=1)
        return EncodingStrategy(d=params.d, n=params.n, table=tuple(int(m) for m in table))


    # ------------------------------
    # RAC standard : recherche exhaustive
    # ------------------------------
    def _best_encoding(self, scores: np.ndarray, literal: bool) -> tuple[int, np.ndarray]:
        """
        Meilleure table d'encodage pour une matrice de scores S[w, m].

        L'objectif est une somme sur les mots : le maximum sur les d^(d^n)
        tables est atteint mot par mot. En mode ``literal`` chaque table est
        énumérée explicitement.
        """
        if not literal:
            return int(scores.max(axis=1).sum()), np.argmax(scores, axis=1)

        word_count, d = scores.shape
        rows = np.arange(word_count)[None, :]
        best_score, best_table = -1, None
        for _, tables in self._encoding_chunks(word_count, d):
            totals = scores[rows, tables].sum(axis=1)
            position = int(np.argmax(totals))
            if totals[position] > best_score:
                best_score, best_table = int(totals[position]), tables[position].copy()
        return best_score, best_table


    def brute_force_standard(self, params: TaskParams, mode: SearchMode = SearchMode.IDENTITY,
                             literal: bool = False) -> OracleResult:
        """
        Optimum exact du RAC standard sur la classe de stratégies demandée.

        Args:
            params (TaskParams): tâche (n, d)
            mode (SearchMode): IDENTITY (décodage identité) ou JOINT (tous les décodages)
            literal (bool): énumère explicitement les d^(d^n) tables d'encodage

        Raises:
            CapExceeded: si le nombre de décodages (mode joint) ou d'encodages
                (mode littéral) dépasse son plafond
        """
        mode = SearchMode(mode)
        n, d = params.n, params.d
        if literal:
            self._check_literal_cap(params)
        words = self.combinatorics.enumerate_words(params)

        if mode == SearchMode.IDENTITY:
            decodings = [tuple(range(d)) * n]
        else:
            if n * d * math.log10(d) > math.log10(self.decoding_cap) + 1e-9:
                raise CapExceeded(f"d^(n d) décodages : plafond {self.decoding_cap} dépassé")
            decodings = itertools.product(range(d), repeat=n * d)

        best_score, best_table, best_decoding = -1, None, None
        decoding_count = 0
        for flat in decodings:
            decoding_count += 1
            maps = np.asarray(flat, dtype=np.int64).reshape(n, d)
            score, table = self._best_encoding(self._success_matrix(maps, words), literal)
            if score > best_score:
                best_score, best_table, best_decoding = score, table, maps

        logger.info("Recherche %s (n=%d, d=%d) : %d décodage(s) parcourus", mode.value, n, d, decoding_count)
        return OracleResult(
            mode=mode.value,
            value=Fraction(best_score, n * params.word_count),
            witness=EncodingStrategy(d=d, n=n, table=tuple(int(m) for m in best_table)),
            decoding=StandardDecoding(d=d, maps=tuple(tuple(int(b) for b in row) for row in best_decoding)),
            evaluated=decoding_count * d**params.word_count,
        )


    # ------------------------------
    # RAC binaire : meilleure réponse de Bob
    # ------------------------------
    def best_response_binary_decoding(self, encoding: EncodingStrategy, cfg: PayoffConfig,
                                      params: TaskParams) -> BinaryDecodingTable:
        """
        Décodage binaire optimal pour un encodage donné : G = 0 si et seulement si
        T_YES p(a_y = k | m) >= p(a_y != k | m), comparaison exacte en entiers.
        Les messages jamais envoyés sont signalés et décodés en G = 1.
        """
        self._check_encoding(encoding, params)
        self._check_payoff(cfg, params)

        words = self.combinatorics.enumerate_words(params)
        messages = np.asarray(encoding.table, dtype=np.int64)
        counts = self._message_letter_counts(messages[None, :], self._letter_indicator(words, params.d), params.d)[0]
        sent = np.bincount(messages, minlength=params.d)

        t_yes = cfg.t_yes_exact
        guesses = []
        for m in range(params.d):
            per_message = []
            for y in range(params.n):
                row = []
                for k in range(params.d):
                    hits = int(counts[m, y, k])
                    if sent[m] > 0 and t_yes * hits >= int(sent[m]) - hits:
                        row.append(0)
                    else:
                        row.append(1)
                per_message.append(tuple(row))
            guesses.append(tuple(per_message))

        unreachable = tuple(int(m) for m in np.flatnonzero(sent == 0))
        if unreachable:
            logger.debug("Messages jamais envoyés, décodés en NON : %s", unreachable)
        return BinaryDecodingTable(d=params.d, n=params.n, guesses=tuple(guesses), unreachable=unreachable)


    # ------------------------------
    # RAC binaire : évaluation d'une stratégie
    # ------------------------------
    def evaluate_binary_strategy(self, encoding: EncodingStrategy, decoding: BinaryDecodingTable,
                                 cfg: PayoffConfig, params: TaskParams) -> Fraction:
        """
        Gain moyen normalisé exact :
        (1/(n d^n T_d)) * somme sur (a, y, k) de T_YES [G=0, a_y=k] + [G=1, a_y!=k].
        """
        self._check_encoding(encoding, params)
        self._check_payoff(cfg, params)
        if decoding.d != params.d or decoding.n != params.n:
            raise DimensionMismatch("La table de réponses ne correspond pas à la tâche")

        words = self.combinatorics.enumerate_words(params)
        correct = self._letter_indicator(words, params.d)
        answers = np.asarray(decoding.guesses, dtype=np.int64)[np.asarray(encoding.table, dtype=np.int64)]
        yes = int(((answers == 0) & correct).sum())
        no = int(((answers == 1) & ~correct).sum())
        return (cfg.t_yes_exact * yes + no) / (params.n * params.word_count * cfg.t_d)


    # ------------------------------
    # RAC binaire : recherche exhaustive
    # ------------------------------
    def brute_force_binary(self, params: TaskParams, cfg: PayoffConfig) -> OracleResult:
        """
        Maximum sur tous les encodages du gain obtenu avec la meilleure réponse
        de Bob. La réponse se décompose par (m, y, k), donc cet optimum est
        l'optimum déterministe exact.

        Raises:
            CapExceeded: si d^(d^n) dépasse le plafond d'encodages
        """
        self._check_payoff(cfg, params)
        self._check_literal_cap(params)

        words = self.combinatorics.enumerate_words(params)
        indicator = self._letter_indicator(words, params.d)
        t_yes = cfg.t_yes_exact
        num, den = t_yes.numerator, t_yes.denominator

        best_score, best_table, evaluated = -1, None, 0
        for _, tables in self._encoding_chunks(params.word_count, params.d):
            counts = self._message_letter_counts(tables, indicator, params.d)
            sent = counts[:, :, 0, :].sum(axis=2)
            scores = self._scaled_binary_payoff(counts, sent, num, den)
            position = int(np.argmax(scores))
            if scores[position] > best_score:
                best_score, best_table = int(scores[position]), tables[position].copy()
            evaluated += tables.shape[0]

        logger.info("RAC binaire (n=%d, d=%d) : %d encodages évalués", params.n, params.d, evaluated)
        witness = EncodingStrategy(d=params.d, n=params.n, table=tuple(int(m) for m in best_table))
        value = Fraction(best_score, den) / (params.n * params.word_count * cfg.t_d)
        return OracleResult(
            mode="binary",
            value=value,
            witness=witness,
            binary_decoding=self.best_response_binary_decoding(witness, cfg, params),
            evaluated=evaluated,
        )


    # ------------------------------
    # Inégalité de causalité informationnelle
    # ------------------------------
    def information_causality_lhs(self, encoding: EncodingStrategy, params: TaskParams) -> float:
        """
        H(a) - somme_i H_i = n log2 d - somme_i somme_m p(m) H(a_i | m), en bits,
        calculé à partir des distributions conditionnelles exactes.
        """
        self._check_encoding(encoding, params)
        words = self.combinatorics.enumerate_words(params)
        messages = np.asarray(encoding.table, dtype=np.int64)
        counts = self._message_letter_counts(messages[None, :], self._letter_indicator(words, params.d), params.d)[0]
        sent = np.bincount(messages, minlength=params.d)

        residual = 0.0
        for m in np.flatnonzero(sent):
            weight = sent[m] / params.word_count
            for i in range(params.n):
                residual += weight * entropy(counts[m, i], base=2)
        return params.n * math.log2(params.d) - residual


    # ------------------------------
    # Export des statistiques d'une stratégie classique
    # ------------------------------
    def strategy_statistics(self, encoding: EncodingStrategy, decoding: BinaryDecodingTable,
                            cfg: PayoffConfig, params: TaskParams) -> StatisticsTable:
        """Table p(G | a, y, k) produite par une stratégie classique déterministe."""
        self._check_encoding(encoding, params)
        self._check_payoff(cfg, params)
        words = self.combinatorics.enumerate_words(params)

        entries = []
        for rank, word in enumerate(words):
            message = encoding.table[rank]
            for y in range(params.n):
                for k in range(params.d):
                    answer = decoding.guesses[message][y][k]
                    entries.append(StatisticsEntry(
                        a=[int(letter) for letter in word], y=y, k=k,
                        p0=1.0 if answer == 0 else 0.0,
                        p1=0.0 if answer == 0 else 1.0,
                    ))
        return StatisticsTable(d=params.d, n=params.n, t_yes=cfg.t_yes, entries=entries)


# ------------------------------
# Instance unique (singleton) du service
# ------------------------------
strategy_oracle_service = StrategyOracleService()
