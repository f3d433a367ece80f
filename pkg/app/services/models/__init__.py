from app.services.models.gaussian import (
    BirthModel,
    GaussianDensity,
    Label,
    ModelSet,
    MotionModel,
    Region,
    SensorModel,
    kalman_predict,
    kalman_update,
    log_predictive_likelihoods,
    predictive_likelihood,
)

__all__ = [
    "BirthModel",
    "GaussianDensity",
    "Label",
    "ModelSet",
    "MotionModel",
    "Region",
    "SensorModel",
    "kalman_predict",
    "kalman_update",
    "log_predictive_likelihoods",
    "predictive_likelihood",
]
