"""
Interface en ligne de commande du toolkit BRAC Witness.

Usage:
    brac-witness bounds --d 3 --n 2 --tyes 1.9994
    brac-witness pcrit --d 8 --eps 1e-5
    brac-witness pcrit-table --dims 3,8,10
    brac-witness oracle --d 3 --n 2 --binary --tyes 1.9994
    brac-witness simulate --d 3 --tyes 2 --export stats.json
    brac-witness certify --input stats.json --claim 3 --exhaustive
    brac-witness curves --d 8 --pcrit 0.18495 --x 1,2,3,4 --samples 200 --out curves.csv

Les rapports sont écrits sur stdout (JSON, ou CSV avec ``--csv``), les
diagnostics sur stderr. Codes de sortie : 0 succès, 2 erreur de validation,
3 plafond dépassé ou problème infaisable.
"""

import argparse
import csv
import json
import logging
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from brac_witness.config import configure_logging
from brac_witness.exceptions import ParseError, WitnessError
from brac_witness.models.payoff import PayoffConfig
from brac_witness.models.strategy import SearchMode, StandardDecoding
from brac_witness.models.task import TaskParams, format_float
from brac_witness.services.bounds_service import bounds_service
from brac_witness.services.certification_service import certification_service
from brac_witness.services.pcrit_service import REFERENCE_PCRIT_VALUES, pcrit_service
from brac_witness.services.quantum_service import quantum_service
from brac_witness.services.strategy_oracle_service import strategy_oracle_service

logger = logging.getLogger("brac_witness.cli")


# ==============================================================================
# CONVERSIONS D'ARGUMENTS
# ==============================================================================

def _decimal(value: str) -> Decimal:
    try:
        return Decimal(value)
    except InvalidOperation as exc:
        raise argparse.ArgumentTypeError(f"nombre décimal attendu : {value!r}") from exc


def _int_list(value: str) -> list[int]:
    try:
        return [int(item) for item in value.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"liste d'entiers attendue : {value!r}") from exc


def _payoff(args: argparse.Namespace, d: int) -> PayoffConfig:
    """t_yes explicite, ou déduit de --pcrit."""
    if getattr(args, "pcrit", None) is not None and getattr(args, "tyes", None) is None:
        return PayoffConfig.from_p_crit(args.pcrit, d)
    return PayoffConfig(t_yes=args.tyes, d=d)


# ==============================================================================
# SORTIES
# ==============================================================================

def _emit(payload, as_csv: bool) -> None:
    """JSON indenté, ou CSV (une ligne par dictionnaire) avec ``--csv``."""
    if not as_csv:
        json.dump(payload, sys.stdout, indent=2, default=str)
        sys.stdout.write("\n")
        return
    rows = payload if isinstance(payload, list) else [payload]
    flat = [{key: value for key, value in row.items() if not isinstance(value, (list, dict))} for row in rows]
    writer = csv.DictWriter(sys.stdout, fieldnames=list(flat[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)


def _flatten_exact(payload: dict) -> dict:
    # Les rationnels {"fraction", "decimal"} deviennent deux colonnes
    flat = {}
    for key, value in payload.items():
        if isinstance(value, dict) and set(value) == {"fraction", "decimal"}:
            flat[key] = value["fraction"]
            flat[f"{key}_decimal"] = value["decimal"]
        else:
            flat[key] = value
    return flat


# ==============================================================================
# SOUS-COMMANDES
# ==============================================================================

def cmd_bounds(args: argparse.Namespace) -> int:
    params = TaskParams(d=args.d, n=args.n)
    report = bounds_service.bound_report(params, _payoff(args, args.d))
    payload = report.to_payload()
    _emit(_flatten_exact(payload) if args.csv else payload, args.csv)
    return 0


def _pcrit_payload(d: int, eps: float, coarse: int, grid: int) -> dict:
    result = pcrit_service.find_pcrit(d, eps, grid_size=grid, coarse_factor=coarse)
    payload = {
        "d": result.d,
        "epsilon": result.epsilon,
        "p_crit": format_float(result.p_crit),
        "t_yes": format_float(result.t_yes),
        "steps": result.steps,
    }
    if d in REFERENCE_PCRIT_VALUES:
        ref_p, ref_t = REFERENCE_PCRIT_VALUES[d]
        payload.update({
            "reference_p_crit": ref_p,
            "reference_t_yes": ref_t,
            "deviation_p_crit": format_float(result.p_crit - ref_p),
            "deviation_t_yes": format_float(result.t_yes - ref_t),
        })
    return payload


def cmd_pcrit(args: argparse.Namespace) -> int:
    _emit(_pcrit_payload(args.d, args.eps, args.coarse, args.grid), args.csv)
    return 0


def cmd_pcrit_table(args: argparse.Namespace) -> int:
    rows = []
    for d in args.dims:
        logger.info("Balayage d=%d", d)
        rows.append(_pcrit_payload(d, args.eps, args.coarse, args.grid))
    _emit(rows, args.csv)
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    params = TaskParams(d=args.d, n=args.n)
    if args.binary:
        cfg = _payoff(args, args.d)
        result = strategy_oracle_service.brute_force_binary(params, cfg)
        majority = strategy_oracle_service.majority_strategy(params)
        majority_value = strategy_oracle_service.evaluate_binary_strategy(
            majority, strategy_oracle_service.best_response_binary_decoding(majority, cfg, params), cfg, params
        )
        if args.export:
            table = strategy_oracle_service.strategy_statistics(
                majority, strategy_oracle_service.best_response_binary_decoding(majority, cfg, params), cfg, params
            )
            _write_file(args.export, lambda stream: certification_service.write_statistics(table, stream, _format_of(args.export)))
    else:
        result = strategy_oracle_service.brute_force_standard(params, SearchMode(args.mode), literal=args.literal)
        majority_value = strategy_oracle_service.evaluate_standard_strategy(
            strategy_oracle_service.majority_strategy(params), StandardDecoding.identity(params), params
        )

    payload = result.to_payload()
    payload.update({"d": args.d, "n": args.n, "majority_value": str(majority_value),
                    "majority_is_optimal": majority_value == result.value})
    _emit(_flatten_exact(payload) if args.csv else payload, args.csv)
    return 0


def _format_of(path: str) -> str:
    return "csv" if Path(path).suffix.lower() == ".csv" else "json"


def _write_file(path: str, write) -> None:
    # toute erreur d'écriture sort avec le code 2
    try:
        with open(path, "w", encoding="utf-8", newline="") as stream:
            write(stream)
    except OSError as exc:
        raise ParseError(f"Écriture impossible dans {path} : {exc}") from exc


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _payoff(args, args.d)
    simulated = quantum_service.simulate_binary_payoff(args.d, cfg)
    closed_form = bounds_service.binary_quantum_n2(args.d, cfg)
    classical = bounds_service.binary_classical_n2(args.d, cfg)
    payload = {
        "d": args.d,
        "t_yes": str(cfg.t_yes),
        "simulated_payoff": format_float(simulated),
        "closed_form": format_float(closed_form),
        "deviation": format_float(simulated - closed_form),
        "guess_probability": format_float(quantum_service.quantum_guess_probability(args.d)),
        "classical_bound": str(classical),
        "classical_bound_decimal": format_float(float(classical)),
        "margin": format_float(simulated - float(classical)),
        "gap": format_float(bounds_service.quantum_classical_gap(args.d, cfg)),
    }
    if args.literal_state:
        literal = quantum_service.simulate_binary_payoff(args.d, cfg, aligned=False)
        payload["literal_state_payoff"] = format_float(literal)
        payload["literal_state_deviation"] = format_float(literal - closed_form)
    if args.export:
        table = quantum_service.export_statistics(args.d, cfg)
        _write_file(args.export, lambda stream: certification_service.write_statistics(table, stream, _format_of(args.export)))
        logger.info("Statistiques exportées vers %s", args.export)
    _emit(payload, args.csv)
    return 0


def cmd_certify(args: argparse.Namespace) -> int:
    table = certification_service.load_statistics(args.input, args.format, args.tyes)
    report = certification_service.certify_dimension(table, args.claim, exhaustive=args.exhaustive)
    payload = report.model_dump(mode="json")
    for key in ("observed_payoff", "classical_bound_decimal", "quantum_reference", "exhaustive_optimum_decimal", "margin"):
        if payload[key] is not None:
            payload[key] = format_float(payload[key])
    _emit(payload, args.csv)
    return 0


def cmd_curves(args: argparse.Namespace) -> int:
    points = pcrit_service.emit_curves(args.d, args.pcrit, args.x, args.samples)
    if args.out:
        _write_file(args.out, lambda stream: pcrit_service.write_curves_csv(points, args.x, stream))
        logger.info("%d points écrits dans %s", len(points), args.out)
    else:
        pcrit_service.write_curves_csv(points, args.x, sys.stdout)
    return 0


# ==============================================================================
# ANALYSEUR D'ARGUMENTS
# ==============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brac-witness", description="Témoin de dimension par RAC binaire")
    parser.add_argument("--verbose", action="store_true", help="diagnostics détaillés sur stderr")
    parser.add_argument("--csv", action="store_true", help="rapport CSV au lieu de JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="bornes classiques et quantiques")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--tyes", type=_decimal)
    p.add_argument("--pcrit", type=_decimal, help="alternative à --tyes : t_yes = (1 - p)/p")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("pcrit", help="plus petit p_crit pour une dimension")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--coarse", type=int, default=1, help="balayage grossier par pas de coarse * eps")
    p.add_argument("--grid", type=int, default=1001)
    p.set_defaults(handler=cmd_pcrit)

    p = sub.add_parser("pcrit-table", help="p_crit pour plusieurs dimensions, comparé aux valeurs publiées")
    p.add_argument("--dims", type=_int_list, default=[3, 8, 10])
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--coarse", type=int, default=1)
    p.add_argument("--grid", type=int, default=1001)
    p.set_defaults(handler=cmd_pcrit_table)

    p = sub.add_parser("oracle", help="recherche exhaustive des stratégies déterministes")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--binary", action="store_true")
    p.add_argument("--tyes", type=_decimal, default=Decimal(1))
    p.add_argument("--mode", choices=[m.value for m in SearchMode], default=SearchMode.IDENTITY.value)
    p.add_argument("--literal", action="store_true", help="énumère explicitement les tables d'encodage")
    p.add_argument("--export", help="écrit les statistiques de la stratégie majoritaire (mode binaire)")
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("simulate", help="simulation du protocole quantique n = 2")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--tyes", type=_decimal)
    p.add_argument("--pcrit", type=_decimal)
    p.add_argument("--export", help="fichier de statistiques (.json ou .csv)")
    p.add_argument("--paper-literal-state", "--literal-state", dest="literal_state", action="store_true",
                   help="compare avec l'état sans alignement de phase")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("certify", help="certification de dimension à partir de statistiques")
    p.add_argument("--input", required=True)
    p.add_argument("--claim", type=int, required=True)
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--tyes", type=_decimal, help="t_yes pour un CSV qui ne le porte pas")
    p.add_argument("--exhaustive", action="store_true",
                   help="le verdict doit aussi battre l'optimum déterministe exhaustif")
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("curves", help="courbes H(T) au format CSV")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--pcrit", type=float, required=True)
    p.add_argument("--x", type=_int_list, default=[1, 2, 3, 4])
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_curves)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else None)

    needs_tyes = args.command in ("bounds", "simulate")
    if needs_tyes and args.tyes is None and args.pcrit is None:
        parser.error("--tyes ou --pcrit est requis")

    try:
        return args.handler(args)
    except WitnessError as exc:
        logger.error("%s : %s", type(exc).__name__, exc.detail)
        return exc.exit_code
    except ValidationError as exc:
        logger.error("Paramètres invalides : %s", exc.errors()[0]["msg"])
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
