from decimal import Decimal
from typing import List

from fastapi import APIRouter, Depends, Query
from sqlmodel import Session, select

from brac_witness.db import get_session
from brac_witness.models.payoff import PayoffConfig, PcritRecord, PcritResult
from brac_witness.models.statistics import CertificationReport, StatisticsTable
from brac_witness.models.strategy import SearchMode
from brac_witness.models.task import TaskParams, format_float
from brac_witness.services.bounds_service import bounds_service
from brac_witness.services.certification_service import certification_service
from brac_witness.services.pcrit_service import pcrit_service
from brac_witness.services.quantum_service import quantum_service
from brac_witness.services.strategy_oracle_service import strategy_oracle_service


# ------------------------------
# Création du routeur principal de l'application
# ------------------------------
router = APIRouter()
# Ce routeur expose les bornes, le balayage de p_crit, la simulation et la certification.


@router.get("/")
async def read_root():
    """Route de test pour vérifier que l'API fonctionne."""
    return {"message": "BRAC Witness API", "docs": "/docs"}


# ------------------------------
# Bornes classiques et quantiques
# ------------------------------
@router.get("/bounds")
def get_bounds(d: int = Query(..., description="Dimension"),
               n: int = Query(2, description="Longueur des mots d'Alice"),
               tyes: Decimal = Query(..., description="Gain d'un OUI correct")):
    """
    Rapport de bornes pour (d, n, t_yes) :
    - succès classique du RAC standard
    - gain classique du RAC binaire
    - gain quantique et écart pour n = 2
    """
    params = TaskParams(d=d, n=n)
    cfg = PayoffConfig(t_yes=tyes, d=d)
    return bounds_service.bound_report(params, cfg).to_payload()


# ------------------------------
# Balayage de p_crit (avec cache en base)
# ------------------------------
@router.get("/pcrit/records", response_model=List[PcritRecord])
def list_pcrit_records(session: Session = Depends(get_session)):
    """Liste les balayages déjà calculés."""
    return session.exec(select(PcritRecord).order_by(PcritRecord.d)).all()


@router.get("/pcrit/{d}", response_model=PcritResult)
def get_pcrit(d: int, epsilon: float = Query(1e-5, gt=0), session: Session = Depends(get_session)):
    """Plus petit p_crit pour la dimension d ; le résultat est mis en cache."""
    return pcrit_service.get_or_compute(session, d, epsilon)


# ------------------------------
# Simulation du protocole quantique
# ------------------------------
@router.get("/simulate")
def simulate(d: int, tyes: Decimal, literal: bool = False):
    """Gain simulé du protocole n = 2 comparé aux formes closes."""
    cfg = PayoffConfig(t_yes=tyes, d=d)
    simulated = quantum_service.simulate_binary_payoff(d, cfg, aligned=not literal)
    closed_form = bounds_service.binary_quantum_n2(d, cfg)
    classical = bounds_service.binary_classical_n2(d, cfg)
    return {
        "d": d,
        "t_yes": str(cfg.t_yes),
        "aligned_state": not literal,
        "simulated_payoff": format_float(simulated),
        "closed_form": format_float(closed_form),
        "deviation": format_float(simulated - closed_form),
        "classical_bound": str(classical),
        "margin": format_float(simulated - float(classical)),
    }


# ------------------------------
# Recherche exhaustive
# ------------------------------
@router.get("/oracle")
def oracle(d: int, n: int = 2, mode: SearchMode = SearchMode.IDENTITY,
           binary: bool = False, tyes: Decimal | None = None):
    """Optimum exact des stratégies déterministes (RAC standard ou binaire)."""
    params = TaskParams(d=d, n=n)
    if binary:
        cfg = PayoffConfig(t_yes=tyes if tyes is not None else Decimal(1), d=d)
        result = strategy_oracle_service.brute_force_binary(params, cfg)
    else:
        result = strategy_oracle_service.brute_force_standard(params, mode)
    return result.to_payload()


# ------------------------------
# Certification de dimension
# ------------------------------
@router.post("/certify", response_model=CertificationReport)
def certify(table: StatisticsTable,
            claim: int = Query(..., description="Dimension revendiquée"),
            exhaustive: bool = Query(False, description="Le verdict doit aussi battre l'optimum exhaustif")):
    """
    Certifie la dimension à partir de statistiques observées :
    - valide la table (couverture, normalisation)
    - compare le gain observé à la borne classique exacte
    """
    validated = certification_service.validate_table(table)
    return certification_service.certify_dimension(validated, claim, exhaustive=exhaustive)
