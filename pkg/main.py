from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
import uvicorn
import logging
from dotenv import load_dotenv

from app.api.v1.algebra import router as algebra_router
from app.api.v1.cyclic import router as cyclic_router
from app.api.v1.classes import router as classes_router
from app.utils.config import get_settings
from app.utils.structured_logging import configure_logging

load_dotenv()

logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)

settings = get_settings()
configure_logging(settings.log_level)

app = FastAPI(
    title="Hopf-Cyclic Engine API",
    description="""
    Exact symbolic engine for the Hopf algebras H_n and their cyclic cohomology.

    ## Services

    1. **Algebra** - PBW normal form, coproduct, antipode and twisted antipode
    2. **Cyclic** - Hochschild b, Connes B, tau_n, cocycle test and the cyclic-relation suite
    3. **Classes** - Named codimension-1 cocycles and their verification

    Expressions use the same language as the command line, e.g. `d1 ox X + 1/2 d1^2 ox Y`.
    All coefficients are exact rationals and are rendered in canonical form.

    ## Health Checks

    - `/health` - overall status
    - `/v1/{service}/health` - status per service
    """,
    version="1.0.0",
    docs_url="/docs",
    redoc_url="/redoc",
    openapi_tags=[
        {"name": "Health", "description": "Health checks"},
        {"name": "algebra", "description": "Operations on elements of H_n"},
        {"name": "cyclic", "description": "Operators of the Hopf-cyclic module"},
        {"name": "classes", "description": "Godbillon-Vey, Schwarzian and related cocycles"},
    ],
)

if settings.environment == "production":
    origins = []
else:
    origins = [
        "http://localhost:3000",
        "http://localhost:8000",
        "http://localhost:8080",
    ]

app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=False,
    allow_methods=["GET", "POST", "OPTIONS"],
    allow_headers=["*"],
    max_age=86400,
)

app.include_router(algebra_router)
app.include_router(cyclic_router)
app.include_router(classes_router)


@app.get("/health", tags=["Health"], summary="Health Check")
def health_check():
    """
    Overall status of the engine.

    Returns:
        - status: "healthy" when the API is serving
        - service: service name
        - environment: current environment
    """
    return {
        "status": "healthy",
        "service": "hopf-cyclic-engine",
        "environment": settings.environment,
        "version": "1.0.0",
    }


@app.on_event("startup")
async def startup_event():
    logger.info("Hopf-Cyclic Engine started")
    logger.info(f"Environment: {settings.environment}")
    logger.info(f"Default codim: {settings.codim}, degree cap: {settings.degree_cap}")


@app.on_event("shutdown")
async def shutdown_event():
    logger.info("Hopf-Cyclic Engine stopped")


if __name__ == "__main__":
    uvicorn.run(
        "main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.environment == "development",
    )
