from fastapi import APIRouter
import app.api.v1.endpoints.health as health
import app.api.v1.endpoints.sampling as sampling
import app.api.v1.endpoints.scenarios as scenarios

api_router = APIRouter()


api_router.include_router(
    health.router,
    tags = ['health']
)

api_router.include_router(
    sampling.router,
    prefix = "/sampling",
    tags = ['sampling']
)

api_router.include_router(
    scenarios.router,
    prefix = "/scenarios",
    tags = ['scenarios']
)
