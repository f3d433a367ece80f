"""
Request/response logging middleware for FastAPI.

Every request gets a run id: the client's ``X-Request-ID`` header when it is
a valid UUID, a fresh UUID4 otherwise. The id is stored in the
``current_run_id`` ContextVar for the lifetime of the request, so log
records emitted by endpoints, services and the :func:`log_action` decorator
carry it, and it is echoed back in the ``X-Request-ID`` response header.

One structured record is written per request with method, path, status and
duration; failures are logged with their traceback and re-raised so the
application's exception handlers still run.
"""

import logging
import time
import uuid
from typing import Optional

from fastapi import Request
from starlette.middleware.base import BaseHTTPMiddleware

from app.core.run_context import current_run_id

logger = logging.getLogger(__name__)

REQUEST_ID_HEADER = "X-Request-ID"


class RequestLoggingMiddleware(BaseHTTPMiddleware):
    """
    Middleware that logs incoming HTTP requests and outgoing responses.

    Typical registration::

        app = FastAPI()
        app.add_middleware(RequestLoggingMiddleware)
    """

    async def dispatch(self, request: Request, call_next):
        started = time.perf_counter()
        request_id = self._get_or_generate_request_id(request.headers.get(REQUEST_ID_HEADER))
        token = current_run_id.set(request_id)
        request.state.request_id = request_id
        base = {
            "request_id": request_id,
            "method": request.method,
            "path": request.url.path,
        }
        try:
            response = await call_next(request)
        except Exception:
            duration_ms = (time.perf_counter() - started) * 1000.0
            logger.exception(
                f"{request.method} {request.url.path} failed",
                extra={"extra_data": {**base, "status_code": 500, "duration_ms": round(duration_ms, 3)}},
            )
            raise
        finally:
            current_run_id.reset(token)

        duration_ms = (time.perf_counter() - started) * 1000.0
        response.headers[REQUEST_ID_HEADER] = request_id
        log = logger.warning if response.status_code >= 400 else logger.info
        log(
            f"{request.method} {request.url.path} -> {response.status_code}",
            extra={
                "extra_data": {
                    **base,
                    "status_code": response.status_code,
                    "duration_ms": round(duration_ms, 3),
                }
            },
        )
        return response

    @staticmethod
    def _get_or_generate_request_id(client_request_id: Optional[str]) -> str:
        """Normalized client UUID when valid, otherwise a new UUID4 string."""
        if not client_request_id:
            return str(uuid.uuid4())
        try:
            return str(uuid.UUID(client_request_id))
        except ValueError:
            return str(uuid.uuid4())
