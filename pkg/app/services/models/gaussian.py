"""
Linear-Gaussian single-object models and the standard multi-object model.

State vectors are ``[x, vx, y, vy]`` (m, m/s); measurements are 2D positions.
Densities are immutable; every function returns new objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from app.core.exceptions import DomainError, NumericError
from app.schemas.scenario import ScenarioParams

LOG_2PI = math.log(2.0 * math.pi)


class Label(NamedTuple):
    birth_time: int
    index: int


@dataclass(frozen=True)
class Region:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise DomainError("region must have positive width and height")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask over an ``(n, 2)`` array (or a single 2-vector)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (
            (pts[:, 0] >= self.x_min) & (pts[:, 0] <= self.x_max)
            & (pts[:, 1] >= self.y_min) & (pts[:, 1] <= self.y_max)
        )

    def sample_uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        xs = rng.uniform(self.x_min, self.x_max, size=n)
        ys = rng.uniform(self.y_min, self.y_max, size=n)
        return np.column_stack([xs, ys]).reshape(n, 2)


def _symmetrize(cov: np.ndarray) -> np.ndarray:
    return 0.5 * (cov + cov.T)


@dataclass(frozen=True)
class GaussianDensity:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.covariance, dtype=float)
        if cov.shape != (mean.size, mean.size):
            raise DomainError(f"covariance shape {cov.shape} does not match mean length {mean.size}")
        scale = max(1.0, float(np.abs(cov).max()))
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-9 * scale):
            raise DomainError("covariance is not symmetric")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise DomainError("covariance is not positive-definite") from exc
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def position(self) -> np.ndarray:
        return self.mean[[0, 2]]

    def pdf(self, x: np.ndarray) -> float:
        d = np.asarray(x, dtype=float) - self.mean
        factor = cho_factor(self.covariance)
        log_det = 2.0 * np.log(np.diag(factor[0])).sum()
        maha = float(d @ cho_solve(factor, d))
        return math.exp(-0.5 * (self.mean.size * LOG_2PI + log_det + maha))


@dataclass(frozen=True)
class MotionModel:
    F: np.ndarray
    Q: np.ndarray
    ps: float

    @classmethod
    def constant_velocity(cls, dt: float = 1.0, sigma_p: float = 5.0, ps: float = 0.99) -> "MotionModel":
        """White-acceleration CV model: ``Q = sigma_p^2 G G^T`` with gain ``(dt^2/2, dt)`` per axis."""
        block = np.array([[1.0, dt], [0.0, 1.0]])
        F = np.kron(np.eye(2), block)
        G = np.kron(np.eye(2), np.array([[dt ** 2 / 2.0], [dt]]))
        Q = sigma_p ** 2 * G @ G.T
        return cls(F=F, Q=Q, ps=ps)


@dataclass(frozen=True)
class SensorModel:
    H: np.ndarray
    R: np.ndarray
    pd: float
    clutter_rate: float
    region: Region

    @classmethod
    def position_sensor(cls, sigma_m: float, pd: float, clutter_rate: float, region: Region) -> "SensorModel":
        H = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
        return cls(H=H, R=sigma_m ** 2 * np.eye(2), pd=pd, clutter_rate=clutter_rate, region=region)

    def with_noise(self, R: np.ndarray) -> "SensorModel":
        return SensorModel(self.H, np.asarray(R, dtype=float), self.pd, self.clutter_rate, self.region)

    def clutter_intensity(self, z: np.ndarray) -> np.ndarray:
        """``kappa(z) = lambda_c / area`` inside the region, zero outside."""
        inside = self.region.contains(z)
        return np.where(inside, self.clutter_rate / self.region.area, 0.0)


class BirthComponent(NamedTuple):
    label: Label
    pb: float
    density: GaussianDensity


@dataclass(frozen=True)
class BirthModel:
    """Per-scan LMB birth; component ``i`` born at scan ``k`` carries label ``(k, i)``."""

    pbs: tuple
    densities: tuple

    def __post_init__(self) -> None:
        if len(self.pbs) != len(self.densities):
            raise DomainError("birth probabilities and densities differ in length")
        if any(not 0.0 <= pb < 1.0 for pb in self.pbs):
            raise DomainError("birth probabilities must lie in [0, 1)")

    @classmethod
    def grid(
        cls,
        region: Region,
        nx: int = 10,
        ny: int = 5,
        pb: float = 0.01,
        std: float = 10.0,
    ) -> "BirthModel":
        """Regular ``nx x ny`` grid of zero-velocity means with half-cell margins."""
        xs = region.x_min + (np.arange(nx) + 0.5) * (region.x_max - region.x_min) / nx
        ys = region.y_min + (np.arange(ny) + 0.5) * (region.y_max - region.y_min) / ny
        cov = np.diag(np.full(4, std ** 2))
        densities = tuple(
            GaussianDensity(np.array([x, 0.0, y, 0.0]), cov) for y in ys for x in xs
        )
        return cls(pbs=tuple(pb for _ in densities), densities=densities)

    def __len__(self) -> int:
        return len(self.pbs)

    def at_scan(self, k: int) -> List[BirthComponent]:
        """Active components (``pb > 0``) labelled for scan ``k``."""
        return [
            BirthComponent(Label(k, i), pb, density)
            for i, (pb, density) in enumerate(zip(self.pbs, self.densities))
            if pb > 0.0
        ]


@dataclass(frozen=True)
class ModelSet:
    motion: MotionModel
    sensor: SensorModel
    birth: BirthModel

    @property
    def region(self) -> Region:
        return self.sensor.region

    @classmethod
    def from_params(cls, params: ScenarioParams) -> "ModelSet":
        r = params.region
        region = Region(r.x_min, r.x_max, r.y_min, r.y_max)
        motion = MotionModel.constant_velocity(params.motion.dt, params.motion.sigma_p, params.motion.ps)
        sensor = SensorModel.position_sensor(
            params.sensor.sigma_m, params.sensor.pd, params.sensor.clutter_rate, region
        )
        birth = BirthModel.grid(
            region, params.birth.nx, params.birth.ny, params.birth_probability, params.birth.std
        )
        return cls(motion=motion, sensor=sensor, birth=birth)


def kalman_predict(p: GaussianDensity, m: MotionModel) -> GaussianDensity:
    mean = m.F @ p.mean
    cov = _symmetrize(m.F @ p.covariance @ m.F.T + m.Q)
    return GaussianDensity(mean, cov)


def _innovation(p_pred: GaussianDensity, s: SensorModel):
    S = _symmetrize(s.H @ p_pred.covariance @ s.H.T + s.R)
    try:
        factor = cho_factor(S)
    except LinAlgError as exc:
        raise NumericError("innovation covariance is singular") from exc
    return S, factor


def log_predictive_likelihoods(p_pred: GaussianDensity, Z: np.ndarray, s: SensorModel) -> np.ndarray:
    """
    ``ln(Pd * N(z; H m, H P H^T + R) / kappa(z))`` for every row of ``Z``.

    Points outside the clutter region raise :class:`DomainError`; ``Pd = 0``
    gives ``-inf`` everywhere.
    """
    Z = np.asarray(Z, dtype=float).reshape(-1, 2)
    if Z.shape[0] == 0:
        return np.empty(0)
    if not s.region.contains(Z).all():
        raise DomainError("measurement outside the clutter region (kappa = 0)")
    _, factor = _innovation(p_pred, s)
    d = Z - s.H @ p_pred.mean
    maha = np.einsum("ij,ji->i", d, cho_solve(factor, d.T))
    log_det = 2.0 * np.log(np.diag(factor[0])).sum()
    if s.clutter_rate <= 0.0:
        raise DomainError("clutter rate must be positive (kappa = 0)")
    log_kappa = math.log(s.clutter_rate / s.region.area)
    with np.errstate(divide="ignore"):
        log_pd = np.log(s.pd)
    return log_pd - 0.5 * (2 * LOG_2PI + log_det + maha) - log_kappa


def predictive_likelihood(p_pred: GaussianDensity, z: np.ndarray, s: SensorModel) -> float:
    """``Pd * N(z; H m, S) / kappa(z)``, the detection factor of one label and one measurement."""
    return float(np.exp(log_predictive_likelihoods(p_pred, np.asarray(z).reshape(1, 2), s)[0]))


def kalman_update(p_pred: GaussianDensity, z: np.ndarray, s: SensorModel) -> GaussianDensity:
    """Innovation update with the Joseph-form covariance."""
    S, factor = _innovation(p_pred, s)
    PHt = p_pred.covariance @ s.H.T
    K = cho_solve(factor, PHt.T).T
    mean = p_pred.mean + K @ (np.asarray(z, dtype=float) - s.H @ p_pred.mean)
    A = np.eye(p_pred.mean.size) - K @ s.H
    cov = _symmetrize(A @ p_pred.covariance @ A.T + K @ s.R @ K.T)
    return GaussianDensity(mean, cov)


def sample_density(p: GaussianDensity, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    return rng.multivariate_normal(p.mean, p.covariance, size=size, method="cholesky")
