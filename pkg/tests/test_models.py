import math

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import multivariate_normal

from app.core.exceptions import DomainError
from app.schemas.scenario import ScenarioParams
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


def random_density(rng, scale=20.0) -> GaussianDensity:
    A = rng.normal(size=(4, 4))
    cov = scale * (A @ A.T + 4 * np.eye(4))
    mean = np.array([500.0, 3.0, 500.0, -2.0]) + rng.normal(scale=5.0, size=4)
    return GaussianDensity(mean, cov)


def assert_spd(cov):
    np.testing.assert_allclose(cov, cov.T, atol=1e-9)
    assert np.all(np.linalg.eigvalsh(cov) > 0)


@pytest.fixture
def region():
    return Region(0.0, 1000.0, 0.0, 1000.0)


@pytest.fixture
def sensor(region):
    return SensorModel.position_sensor(sigma_m=10.0, pd=0.86, clutter_rate=9.0, region=region)


class TestDensity:
    def test_rejects_asymmetric(self):
        with pytest.raises(DomainError):
            GaussianDensity(np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_rejects_indefinite(self):
        with pytest.raises(DomainError):
            GaussianDensity(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestPredict:
    def test_identity_dynamics(self, rng):
        p = random_density(rng)
        out = kalman_predict(p, MotionModel(np.eye(4), np.zeros((4, 4)), 0.99))
        np.testing.assert_allclose(out.mean, p.mean)
        np.testing.assert_allclose(out.covariance, p.covariance)

    def test_zero_velocity_keeps_position(self):
        m = MotionModel.constant_velocity(1.0, 5.0, 0.99)
        p = GaussianDensity(np.array([10.0, 0.0, -4.0, 0.0]), np.eye(4))
        out = kalman_predict(p, m)
        np.testing.assert_allclose(out.position, [10.0, -4.0])
        np.testing.assert_allclose(out.covariance, m.F @ np.eye(4) @ m.F.T + m.Q)
        assert np.all(np.diag(out.covariance) > 1.0)

    def test_cv_noise_gain(self):
        m = MotionModel.constant_velocity(2.0, 3.0)
        np.testing.assert_allclose(m.Q[:2, :2], 9.0 * np.array([[4.0, 4.0], [4.0, 4.0]]))
        np.testing.assert_allclose(m.F[:2, :2], [[1.0, 2.0], [0.0, 1.0]])

    def test_random_result_spd(self, rng):
        m = MotionModel.constant_velocity()
        for _ in range(10):
            assert_spd(kalman_predict(random_density(rng), m).covariance)


class TestPredictiveLikelihood:
    def test_peak_value(self, sensor, rng):
        p = random_density(rng)
        z = sensor.H @ p.mean
        S = sensor.H @ p.covariance @ sensor.H.T + sensor.R
        kappa = sensor.clutter_rate / sensor.region.area
        expected = sensor.pd / (2 * math.pi * math.sqrt(np.linalg.det(S))) / kappa
        assert predictive_likelihood(p, z, sensor) == pytest.approx(expected, rel=1e-10)
        for _ in range(5):
            other = z + rng.normal(scale=15.0, size=2)
            assert predictive_likelihood(p, other, sensor) < expected

    def test_zero_detection(self, region, rng):
        s = SensorModel.position_sensor(10.0, 0.0, 9.0, region)
        p = random_density(rng)
        assert predictive_likelihood(p, np.array([500.0, 500.0]), s) == 0.0

    def test_outside_region(self, sensor, rng):
        with pytest.raises(DomainError):
            predictive_likelihood(random_density(rng), np.array([-5.0, 10.0]), sensor)

    def test_vectorized_matches_scalar(self, sensor, rng):
        p = random_density(rng)
        Z = rng.uniform(400.0, 600.0, size=(6, 2))
        batch = log_predictive_likelihoods(p, Z, sensor)
        for z, value in zip(Z, batch):
            assert math.exp(value) == pytest.approx(predictive_likelihood(p, z, sensor), rel=1e-12)

    def test_matches_quadrature(self, sensor, rng):
        p = GaussianDensity(np.array([500.0, 1.0, 480.0, 0.0]), np.diag([30.0, 4.0, 20.0, 4.0]))
        z = np.array([507.0, 476.0])
        prior_pos = multivariate_normal(p.position, p.covariance[np.ix_([0, 2], [0, 2])])
        noise = multivariate_normal(np.zeros(2), sensor.R)
        kappa = sensor.clutter_rate / sensor.region.area

        def integrand(y, x):
            pos = np.array([x, y])
            return sensor.pd * noise.pdf(z - pos) * prior_pos.pdf(pos)

        value, _ = integrate.dblquad(
            integrand, 440.0, 560.0, 420.0, 540.0, epsabs=0.0, epsrel=1e-11
        )
        assert predictive_likelihood(p, z, sensor) == pytest.approx(value / kappa, rel=1e-6)


class TestUpdate:
    def test_uninformative_measurement(self, region):
        s = SensorModel.position_sensor(1000.0, 0.9, 1.0, region)
        p = GaussianDensity(np.array([100.0, 1.0, 200.0, -1.0]), np.eye(4))
        out = kalman_update(p, np.array([130.0, 180.0]), s)
        np.testing.assert_allclose(out.mean, p.mean, atol=1e-2)

    def test_exact_measurement(self, region):
        s = SensorModel.position_sensor(1.0, 0.9, 1.0, region).with_noise(1e-6 * np.eye(2))
        p = GaussianDensity(np.array([100.0, 1.0, 200.0, -1.0]), 100.0 * np.eye(4))
        z = np.array([112.0, 190.0])
        out = kalman_update(p, z, s)
        np.testing.assert_allclose(out.position, z, atol=1e-2)
        assert_spd(out.covariance)

    def test_joint_consistency(self, sensor, rng):
        p = random_density(rng)
        z = sensor.H @ p.mean + np.array([6.0, -4.0])
        psi = predictive_likelihood(p, z, sensor)
        post = kalman_update(p, z, sensor)
        assert_spd(post.covariance)
        kappa = sensor.clutter_rate / sensor.region.area
        g = multivariate_normal(np.zeros(2), sensor.R)
        prior = multivariate_normal(p.mean, p.covariance)
        posterior = multivariate_normal(post.mean, post.covariance)
        for x in posterior.rvs(size=5, random_state=7):
            lhs = psi * posterior.pdf(x)
            rhs = sensor.pd * g.pdf(z - sensor.H @ x) * prior.pdf(x) / kappa
            assert lhs == pytest.approx(rhs, rel=1e-8)


class TestStandardModel:
    def test_birth_grid_layout(self):
        region = Region(0.0, 3000.0, 0.0, 3000.0)
        birth = BirthModel.grid(region, 10, 5, pb=0.01, std=10.0)
        assert len(birth) == 50
        comps = birth.at_scan(7)
        assert comps[0].label == Label(7, 0)
        assert comps[-1].label == Label(7, 49)
        np.testing.assert_allclose(comps[0].density.mean, [150.0, 0.0, 300.0, 0.0])
        np.testing.assert_allclose(comps[0].density.covariance, 100.0 * np.eye(4))
        assert all(c.pb == 0.01 for c in comps)

    def test_zero_probability_components_inactive(self, region):
        birth = BirthModel.grid(region, 2, 1, pb=0.0)
        assert birth.at_scan(0) == []

    def test_clutter_intensity(self, sensor):
        kappa = sensor.clutter_intensity(np.array([[10.0, 10.0], [-1.0, 10.0]]))
        np.testing.assert_allclose(kappa, [9.0 / 1e6, 0.0])

    def test_from_params_defaults(self):
        models = ModelSet.from_params(ScenarioParams())
        assert models.birth.pbs[0] == pytest.approx(0.01)
        assert models.motion.ps == 0.99
        assert models.sensor.pd == 0.86
        assert models.region.area == pytest.approx(9e6)

    def test_region_sampling(self, region, rng):
        pts = region.sample_uniform(rng, 500)
        assert pts.shape == (500, 2)
        assert region.contains(pts).all()
