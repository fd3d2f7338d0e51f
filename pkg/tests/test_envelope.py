import numpy as np
import pytest

from molbench.envelope import (
    DegenerateCovarianceError,
    OutlierEnvelope,
    fit_outlier_envelope,
    is_outlier,
)


def gaussian_cloud(n, seed=0, cov=((1.0, 0.3), (0.3, 2.0))):
    rng = np.random.default_rng(seed)
    return rng.multivariate_normal([10.0, -40.0], np.asarray(cov), size=n)


class TestFit:
    def test_synthetic_flag_rate(self):
        points = gaussian_cloud(10_000, seed=1)
        env = fit_outlier_envelope(points, contamination=0.01)
        flagged = sum(is_outlier(env, p) for p in points)
        assert abs(flagged / len(points) - 0.01) <= 0.005

    def test_isotropic_unit_gaussian(self):
        rng = np.random.default_rng(7)
        points = rng.standard_normal((10_000, 2))
        env = fit_outlier_envelope(points, contamination=0.01)
        flagged = sum(is_outlier(env, p) for p in points)
        assert abs(flagged / len(points) - 0.01) <= 0.005
        assert np.allclose(env.center, [0.0, 0.0], atol=0.1)

    def test_identical_points_degenerate(self):
        with pytest.raises(DegenerateCovarianceError):
            fit_outlier_envelope([[1.0, 2.0]] * 50, contamination=0.01)

    def test_collinear_degenerate(self):
        points = [[float(i), 2.0 * i] for i in range(50)]
        with pytest.raises(DegenerateCovarianceError):
            fit_outlier_envelope(points, contamination=0.01)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_outlier_envelope(gaussian_cloud(10), contamination=0.01)

    def test_contamination_bounds(self):
        points = gaussian_cloud(100)
        for bad in (0.0, 0.5, -0.1, 1.0):
            with pytest.raises(ValueError):
                fit_outlier_envelope(points, contamination=bad)

    def test_tiny_contamination_dataset_scale(self):
        # The reactivity configuration: 0.00035 on a large reference set.
        points = gaussian_cloud(60_000, seed=3)
        env = fit_outlier_envelope(points, contamination=0.00035)
        flagged = sum(is_outlier(env, p) for p in points)
        assert flagged / len(points) <= 2 * 0.00035 + 0.0005
        assert flagged >= 1

    def test_robust_to_planted_outliers(self):
        points = np.vstack([gaussian_cloud(5_000, seed=5),
                            np.full((25, 2), [500.0, 500.0])])
        env = fit_outlier_envelope(points, contamination=0.01)
        assert all(is_outlier(env, p) for p in points[-25:])


class TestDecision:
    def test_center_is_inlier(self):
        env = fit_outlier_envelope(gaussian_cloud(1_000), contamination=0.05)
        assert not is_outlier(env, env.center)

    def test_far_point_is_outlier(self):
        points = gaussian_cloud(1_000)
        env = fit_outlier_envelope(points, contamination=0.05)
        worst = max(env.mahalanobis_sq(p) for p in points)
        direction = np.array([1.0, 0.0])
        far = np.asarray(env.center) + direction * 10 * np.sqrt(worst)
        assert is_outlier(env, far)

    def test_boundary_point_is_inlier(self):
        env = fit_outlier_envelope(gaussian_cloud(1_000), contamination=0.05)
        # Move along an eigenvector to land exactly on the threshold.
        cov = np.asarray(env.covariance)
        values, vectors = np.linalg.eigh(cov)
        direction = vectors[:, 0]
        scale = np.sqrt(env.threshold / (direction @ np.linalg.solve(cov, direction)))
        boundary = np.asarray(env.center) + direction * scale
        assert env.mahalanobis_sq(boundary) == pytest.approx(env.threshold, rel=1e-9)
        assert not is_outlier(env, np.asarray(env.center) + direction * scale * (1 - 1e-9))

    def test_save_load_round_trip(self, tmp_path):
        env = fit_outlier_envelope(gaussian_cloud(500), contamination=0.02)
        path = tmp_path / "envelope.json"
        env.save(path)
        again = OutlierEnvelope.load(path)
        assert again == env
