"""
Application principale FastAPI du toolkit BRAC Witness.

Ce module configure et initialise l'application FastAPI avec :
- Création des tables du cache de p_crit au démarrage (lifespan)
- Conversion des erreurs du toolkit en réponses JSON
- Enregistrement des routes de l'API
"""

from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from brac_witness.config import configure_logging
from brac_witness.controllers import witness_controller
from brac_witness.db import create_db_and_tables
from brac_witness.exceptions import WitnessError


@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    Gestionnaire du cycle de vie de l'application FastAPI.

    Au démarrage : configuration du logging et création des tables
    (si elles n'existent pas). Aucun nettoyage n'est nécessaire à l'arrêt.
    """
    configure_logging()
    create_db_and_tables()
    yield


# ==============================================================================
# CONFIGURATION DE L'APPLICATION FASTAPI
# ==============================================================================

app = FastAPI(
    title="BRAC Witness API",
    description="Témoin de dimension par codes à accès aléatoire binaires",
    version="1.0.0",
    lifespan=lifespan,
    docs_url="/docs",
    redoc_url="/redoc"
)


# ==============================================================================
# GESTION DES ERREURS
# ==============================================================================
# Chaque WitnessError porte son code HTTP, comme une HTTPException.

@app.exception_handler(WitnessError)
async def witness_error_handler(request: Request, exc: WitnessError):
    return JSONResponse(status_code=exc.status_code,
                        content={"detail": exc.detail, "error": type(exc).__name__})


# ==============================================================================
# INCLUSION DES ROUTES
# ==============================================================================
app.include_router(witness_controller.router)
