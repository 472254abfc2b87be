import csv
import json
import logging
import math
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Optional, TextIO

import numpy as np
from pydantic import ValidationError

from brac_witness.config import CERTIFICATION_SLACK, NORMALIZATION_TOLERANCE
from brac_witness.exceptions import (
    BoundUnavailable,
    CapExceeded,
    DimensionMismatch,
    InvalidParams,
    NormalizationError,
    ParseError,
    SchemaError,
)
from brac_witness.models.payoff import PayoffConfig
from brac_witness.models.statistics import CertificationReport, StatisticsEntry, StatisticsTable, Verdict
from brac_witness.models.task import TaskParams, format_float
from brac_witness.services.bounds_service import BoundsService, bounds_service
from brac_witness.services.combinatorics_service import combinatorics_service
from brac_witness.services.strategy_oracle_service import StrategyOracleService, strategy_oracle_service

logger = logging.getLogger(__name__)


# ------------------------------
# Certification de dimension
# ------------------------------
class CertificationService:
    """
    Chargement des statistiques observées p(G | a, y, k), calcul du gain
    moyen et comparaison avec la borne classique exacte de la dimension
    revendiquée.
    """

    def __init__(self, bounds: BoundsService = bounds_service,
                 oracle: StrategyOracleService = strategy_oracle_service):
        self.bounds = bounds
        self.oracle = oracle


    # ------------------------------
    # Lecture des fichiers
    # ------------------------------
    def load_statistics(self, path: str | Path, fmt: Optional[str] = None,
                        t_yes: Optional[Decimal] = None) -> StatisticsTable:
        """
        Charge et valide une table JSON ou CSV ; les comptes sont normalisés
        en probabilités.

        Le format est déduit de l'extension si ``fmt`` est absent. Un CSV ne
        porte pas t_yes dans son en-tête : il vient d'une colonne ``t_yes``
        ou de l'argument.

        Raises:
            ParseError: fichier illisible ou mal formé
            SchemaError: champ manquant, triplet absent ou en double, loi non uniforme
            NormalizationError: p0 + p1 s'écarte de 1 de plus de 1e-6, ou valeur non finie
        """
        path = Path(path)
        fmt = (fmt or path.suffix.lstrip(".")).lower()
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"Lecture impossible de {path} : {exc}") from exc

        if fmt == "json":
            table = self._parse_json(text)
        elif fmt == "csv":
            table = self._parse_csv(text, t_yes)
        else:
            raise ParseError(f"Format inconnu : {fmt!r} (json ou csv)")

        validated = self.validate_table(table)
        logger.info("Statistiques chargées depuis %s : d=%d, %d entrées", path, validated.d, len(validated.entries))
        return validated


    @staticmethod
    def _parse_json(text: str) -> StatisticsTable:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"JSON invalide : {exc}") from exc
        if not isinstance(raw, dict):
            raise ParseError("Le document JSON doit être un objet")

        missing = [key for key in ("d", "t_yes", "entries") if key not in raw]
        if missing:
            raise SchemaError(f"Champs manquants : {', '.join(missing)}")
        if isinstance(raw["t_yes"], float):
            raw["t_yes"] = str(raw["t_yes"])
        try:
            return StatisticsTable.model_validate(raw)
        except ValidationError as exc:
            raise SchemaError(f"Schéma invalide : {exc.errors()[0]['msg']}") from exc


    @staticmethod
    def _parse_csv(text: str, t_yes: Optional[Decimal]) -> StatisticsTable:
        reader = csv.DictReader(text.splitlines())
        columns = reader.fieldnames or []
        letters = sorted((c for c in columns if c.startswith("a") and c[1:].isdigit()), key=lambda c: int(c[1:]))
        if not letters or "y" not in columns or "k" not in columns:
            raise SchemaError("Colonnes attendues : a0, ..., a{n-1}, y, k, p0, p1 (ou c0, c1)")
        if [int(c[1:]) for c in letters] != list(range(len(letters))):
            raise SchemaError("Les colonnes a0, ..., a{n-1} doivent être consécutives")

        def number(row: dict, key: str, cast):
            value = row.get(key)
            if value is None or value == "":
                return None
            try:
                return cast(value)
            except ValueError as exc:
                raise ParseError(f"Valeur illisible pour {key} : {value!r}") from exc

        entries, seen_t_yes = [], set()
        for row in reader:
            if row.get("t_yes"):
                seen_t_yes.add(row["t_yes"])
            try:
                entries.append(StatisticsEntry(
                    a=[number(row, c, int) for c in letters],
                    y=number(row, "y", int),
                    k=number(row, "k", int),
                    p0=number(row, "p0", float),
                    p1=number(row, "p1", float),
                    c0=number(row, "c0", int),
                    c1=number(row, "c1", int),
                ))
            except ValidationError as exc:
                raise SchemaError(f"Ligne {reader.line_num} incomplète : {exc.errors()[0]['loc']}") from exc
        if not entries:
            raise SchemaError("Aucune ligne de statistiques")

        if t_yes is None:
            if len(seen_t_yes) != 1:
                raise SchemaError("t_yes absent du CSV : le fournir en argument ou en colonne")
            try:
                t_yes = Decimal(seen_t_yes.pop())
            except InvalidOperation as exc:
                raise ParseError("t_yes illisible") from exc

        d = 1 + max(max(entry.k for entry in entries), max(max(entry.a) for entry in entries))
        return StatisticsTable(d=d, n=len(letters), t_yes=t_yes, entries=entries)


    # ------------------------------
    # Validation du contenu
    # ------------------------------
    def validate_table(self, table: StatisticsTable) -> StatisticsTable:
        """
        Vérifie la couverture complète des n d^n d triplets et la
        normalisation de chaque paire ; renvoie une table en probabilités.
        """
        if table.prior != "uniform":
            raise SchemaError(f"Seule la distribution uniforme des entrées est acceptée (reçu {table.prior!r})")
        try:
            params = TaskParams(d=table.d, n=table.n)
            PayoffConfig(t_yes=table.t_yes, d=table.d)
        except InvalidParams as exc:
            raise SchemaError(exc.detail) from exc

        seen = set()
        normalized = []
        for entry in table.entries:
            key = (tuple(entry.a), entry.y, entry.k)
            if len(entry.a) != params.n or any(not 0 <= letter < params.d for letter in entry.a) \
                    or not 0 <= entry.y < params.n or not 0 <= entry.k < params.d:
                raise SchemaError(f"Triplet hors domaine : a={list(entry.a)}, y={entry.y}, k={entry.k}")
            if key in seen:
                raise SchemaError(f"Triplet en double : a={list(entry.a)}, y={entry.y}, k={entry.k}")
            seen.add(key)
            normalized.append(self._normalize_entry(entry))

        if len(seen) != params.n * params.word_count * params.d:
            words = combinatorics_service.enumerate_words(params)
            for word in words:
                for y in range(params.n):
                    for k in range(params.d):
                        if (tuple(int(v) for v in word), y, k) not in seen:
                            raise SchemaError(f"Triplet manquant : a={[int(v) for v in word]}, y={y}, k={k}")

        return table.model_copy(update={"entries": normalized})


    @staticmethod
    def _normalize_entry(entry: StatisticsEntry) -> StatisticsEntry:
        where = f"a={list(entry.a)}, y={entry.y}, k={entry.k}"
        if entry.p0 is None and entry.p1 is None:
            if entry.c0 is None or entry.c1 is None:
                raise SchemaError(f"Ni probabilités ni comptes pour {where}")
            if entry.c0 < 0 or entry.c1 < 0:
                raise SchemaError(f"Comptes négatifs pour {where}")
            total = entry.c0 + entry.c1
            if total == 0:
                raise NormalizationError(f"Comptes nuls pour {where}")
            return StatisticsEntry(a=entry.a, y=entry.y, k=entry.k, p0=entry.c0 / total, p1=entry.c1 / total)

        p0 = entry.p0 if entry.p0 is not None else 1.0 - entry.p1
        p1 = entry.p1 if entry.p1 is not None else 1.0 - entry.p0
        if not (math.isfinite(p0) and math.isfinite(p1)):
            raise NormalizationError(f"Probabilités non finies (p0={p0}, p1={p1}) pour {where}")
        if min(p0, p1) < -NORMALIZATION_TOLERANCE or abs(p0 + p1 - 1.0) > NORMALIZATION_TOLERANCE:
            raise NormalizationError(f"p0 + p1 = {p0 + p1} pour {where}")
        return StatisticsEntry(a=entry.a, y=entry.y, k=entry.k, p0=p0, p1=p1)


    # ------------------------------
    # Gain observé
    # ------------------------------
    def payoff_from_statistics(self, table: StatisticsTable) -> float:
        """
        (1/(n d^n T_d)) somme_{a,y,k} [T_YES p(G=0) 1(a_y = k) + p(G=1) 1(a_y != k)]
        pour une table déjà validée.
        """
        params = TaskParams(d=table.d, n=table.n)
        cfg = PayoffConfig(t_yes=table.t_yes, d=table.d)
        words = combinatorics_service.enumerate_words(params)
        correct = words[:, :, None] == np.arange(params.d)
        terms = np.where(correct, cfg.t_yes_float * table.p0_array(), table.p1_array())
        return math.fsum(terms.ravel()) / (params.n * params.word_count * cfg.t_d_float)


    # ------------------------------
    # Verdict
    # ------------------------------
    def classical_bound(self, params: TaskParams, cfg: PayoffConfig) -> Fraction:
        """Borne classique exacte ; forme close pour n = 2 quand l'énumération est trop grande."""
        try:
            return self.bounds.binary_rac_classical_value(params, cfg)
        except CapExceeded as exc:
            if params.n != 2:
                raise BoundUnavailable(f"Borne classique indisponible pour d={params.d}, n={params.n}") from exc
            return self.bounds.binary_classical_n2(params.d, cfg)


    def exhaustive_optimum(self, params: TaskParams, cfg: PayoffConfig) -> Optional[Fraction]:
        """Optimum déterministe exact par recherche exhaustive, None si les plafonds l'interdisent."""
        try:
            return self.oracle.brute_force_binary(params, cfg).value
        except CapExceeded:
            logger.debug("Recherche exhaustive hors plafond pour d=%d, n=%d", params.d, params.n)
            return None


    def certify_dimension(self, table: StatisticsTable, d_claim: int, exhaustive: bool = False) -> CertificationReport:
        """
        Certifié si et seulement si le gain observé dépasse strictement la
        borne classique de dimension d_claim (marge 1e-9 côté observé).

        Avec ``exhaustive``, l'optimum déterministe exhaustif est calculé,
        joint au rapport, et le gain doit aussi le dépasser.

        Raises:
            DimensionMismatch: d_claim différent de la dimension de la table
            BoundUnavailable: borne non calculable (n != 2 et énumération trop
                grande), ou optimum exhaustif demandé mais hors plafond
        """
        if d_claim != table.d:
            raise DimensionMismatch(f"Dimension revendiquée {d_claim}, table de dimension {table.d}")
        params = TaskParams(d=table.d, n=table.n)
        cfg = PayoffConfig(t_yes=table.t_yes, d=table.d)

        bound = self.classical_bound(params, cfg)
        optimum = None
        if exhaustive:
            optimum = self.exhaustive_optimum(params, cfg)
            if optimum is None:
                raise BoundUnavailable(f"Optimum exhaustif hors plafond pour d={params.d}, n={params.n}")
            if optimum > bound:
                logger.warning("L'optimum déterministe %s dépasse la borne par formule %s (d=%d, t_yes=%s)",
                               optimum, bound, params.d, cfg.t_yes)

        threshold = bound if optimum is None else max(bound, optimum)
        observed = self.payoff_from_statistics(table)
        certified = observed > float(threshold) + CERTIFICATION_SLACK
        quantum = self.bounds.binary_quantum_n2(params.d, cfg) if params.n == 2 else None

        if certified:
            statement = f"Le gain observé dépasse la borne classique : le système communiqué est de dimension au moins {d_claim}."
        else:
            statement = f"Le gain observé ne dépasse pas la borne classique de dimension {d_claim} : aucune certification."
        logger.info("Certification d=%d : observé %.12g, seuil %s", d_claim, observed, threshold)

        return CertificationReport(
            d_claim=d_claim,
            n=params.n,
            t_yes=cfg.t_yes,
            observed_payoff=observed,
            classical_bound=str(bound),
            classical_bound_decimal=float(bound),
            quantum_reference=quantum,
            exhaustive_optimum=None if optimum is None else str(optimum),
            exhaustive_optimum_decimal=None if optimum is None else float(optimum),
            exhaustive_checked=exhaustive,
            margin=observed - float(threshold),
            verdict=Verdict.CERTIFIED if certified else Verdict.NOT_CERTIFIED,
            statement=statement,
        )


    # ------------------------------
    # Écriture des fichiers
    # ------------------------------
    def write_statistics(self, table: StatisticsTable, stream: TextIO, fmt: str = "json") -> None:
        """Écrit la table en JSON ou CSV, flottants à 12 chiffres significatifs."""
        if fmt == "json":
            payload = {
                "d": table.d,
                "n": table.n,
                "t_yes": str(table.t_yes),
                "entries": [
                    {"a": list(e.a), "y": e.y, "k": e.k, "p0": format_float(e.p0), "p1": format_float(e.p1)}
                    for e in table.entries
                ],
            }
            json.dump(payload, stream, indent=1)
            stream.write("\n")
        elif fmt == "csv":
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow([f"a{i}" for i in range(table.n)] + ["y", "k", "p0", "p1", "t_yes"])
            for e in table.entries:
                writer.writerow(list(e.a) + [e.y, e.k, format_float(e.p0), format_float(e.p1), str(table.t_yes)])
        else:
            raise InvalidParams(f"Format inconnu : {fmt!r} (json ou csv)")


# ------------------------------
# Instance unique (singleton) du service
# ------------------------------
certification_service = CertificationService()
