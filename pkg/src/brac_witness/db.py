"""
Module de configuration de la base de données.

La base ne sert qu'à mettre en cache les résultats du balayage de p_crit
(table ``PcritRecord``) : un balayage à epsilon = 1e-5 coûte plusieurs
secondes, voire plusieurs minutes pour les grandes dimensions.

Functions:
    create_db_and_tables: Création des tables SQLModel
    get_session: Générateur de session pour l'injection FastAPI

Example:
    Utilisation dans une route FastAPI :
        >>> @router.get("/pcrit/records")
        >>> def list_records(session: Session = Depends(get_session)):
        >>>     return session.exec(select(PcritRecord)).all()
"""

from sqlmodel import SQLModel, create_engine, Session

from brac_witness.config import DATABASE_URL, SQL_ECHO

engine = create_engine(DATABASE_URL, echo=SQL_ECHO)

# ==============================================================================
# FONCTION DE CRÉATION DES TABLES
# ==============================================================================

def create_db_and_tables():
    """
    Crée toutes les tables de la base de données.

    Note:
        Appelée au démarrage de l'application dans main.py via la fonction
        lifespan.
    """
    # Import local : enregistre PcritRecord dans les métadonnées
    from brac_witness.models.payoff import PcritRecord  # noqa: F401

    SQLModel.metadata.create_all(engine)


# ==============================================================================
# DÉPENDANCE FASTAPI - SESSION DE BASE DE DONNÉES
# ==============================================================================

def get_session():
    """
    Générateur de session de base de données pour FastAPI.

    Yields:
        Session: Session SQLModel connectée à la base de données

    Note:
        La session est fermée après l'exécution de la route, même en cas
        d'exception, grâce au context manager 'with'.
    """
    with Session(engine) as session:
        yield session
