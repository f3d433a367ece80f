from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from contextlib import asynccontextmanager
import logging

from app.core.config import settings
from app.core.exceptions import CapacityError, ConfigValidationError, GlmbToolkitError, ReportWriteError
from app.core.logging import setup_logging
from app.api.v1.router import api_router
from app.middleware.logging_middleware import RequestLoggingMiddleware

setup_logging()
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(f"{settings.APP_NAME} {settings.APP_VERSION} up ({settings.ENVIRONMENT}, debug={settings.DEBUG})")
    yield
    logger.info(f"{settings.APP_NAME} stopping")


def error_status(exc: GlmbToolkitError) -> int:
    """HTTP status of a toolkit error: 413 over a guard, 500 on report I/O, 422 otherwise."""
    if isinstance(exc, CapacityError):
        return 413
    if isinstance(exc, ReportWriteError):
        return 500
    return 422


async def toolkit_error_handler(request: Request, exc: GlmbToolkitError) -> JSONResponse:
    status = error_status(exc)
    logger.warning(
        f"{type(exc).__name__} on {request.url.path}: {exc}",
        extra={"extra_data": {"status_code": status, "path": request.url.path}},
    )
    content = {"detail": str(exc), "error": type(exc).__name__}
    if isinstance(exc, ConfigValidationError):
        content["keys"] = exc.keys
    return JSONResponse(status_code=status, content=content)


def create_app() -> FastAPI:
    application = FastAPI(
        title=settings.APP_NAME,
        version=settings.APP_VERSION,
        debug=settings.DEBUG,
        lifespan=lifespan,
        docs_url="/docs" if settings.DEBUG else None,
        redoc_url="/redoc" if settings.DEBUG else None,
    )
    application.add_middleware(
        CORSMiddleware,
        allow_origins=settings.CORS_ORIGINS,
        allow_credentials=settings.CORS_ALLOW_CREDENTIALS,
        allow_methods=settings.CORS_ALLOW_METHODS,
        allow_headers=settings.CORS_ALLOW_HEADERS,
    )
    application.add_middleware(RequestLoggingMiddleware)
    application.add_exception_handler(GlmbToolkitError, toolkit_error_handler)
    application.include_router(api_router, prefix=settings.API_V1_PREFIX)

    @application.get("/")
    def root():
        """Service banner."""
        return {
            "service": settings.APP_NAME,
            "version": settings.APP_VERSION,
            "api": settings.API_V1_PREFIX,
            "docs": "/docs" if settings.DEBUG else "disabled",
        }

    return application


app = create_app()

if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "main:app",
        host=settings.API_HOST,
        port=settings.API_PORT,
        reload=settings.DEBUG,
        log_config=None,  # keep the JSON handlers installed above
    )
