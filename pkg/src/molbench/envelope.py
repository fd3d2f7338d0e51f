"""Robust elliptic envelope over the (reaction energy, activation energy)
plane.

Fitting runs a fixed number of Mahalanobis-trimmed re-estimation rounds
(drop the top contamination fraction, recompute location/scatter); the
decision threshold is the empirical (1 - contamination) quantile of squared
Mahalanobis distances over the full training set.  Boundary points are
inliers: only strictly larger distances are flagged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

_TRIM_ROUNDS = 10
_MIN_POINTS = 20


class DegenerateCovarianceError(ValueError):
    """Training data is collinear or otherwise rank-deficient."""


@dataclass(frozen=True)
class OutlierEnvelope:
    center: tuple[float, ...]
    covariance: tuple[tuple[float, ...], ...]
    threshold: float
    contamination: float
    version: int = 1

    def mahalanobis_sq(self, point: Sequence[float]) -> float:
        delta = np.asarray(point, dtype=float) - np.asarray(self.center)
        cov = np.asarray(self.covariance)
        return float(delta @ np.linalg.solve(cov, delta))

    def save(self, path: str | Path) -> None:
        payload = {
            "version": self.version,
            "center": list(self.center),
            "covariance": [list(row) for row in self.covariance],
            "threshold": self.threshold,
            "contamination": self.contamination,
        }
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "OutlierEnvelope":
        payload = json.loads(Path(path).read_text())
        return cls(
            center=tuple(payload["center"]),
            covariance=tuple(tuple(row) for row in payload["covariance"]),
            threshold=payload["threshold"],
            contamination=payload["contamination"],
            version=payload.get("version", 1),
        )


def _location_scatter(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    center = points.mean(axis=0)
    delta = points - center
    cov = delta.T @ delta / len(points)
    return center, cov


def _check_covariance(cov: np.ndarray) -> None:
    if not np.isfinite(cov).all():
        raise DegenerateCovarianceError("non-finite covariance")
    det = float(np.linalg.det(cov))
    scale = float(np.trace(cov)) or 1.0
    if det <= 1e-12 * scale ** cov.shape[0]:
        raise DegenerateCovarianceError("training data is (near-)collinear")


def fit_outlier_envelope(
    points: Sequence[Sequence[float]], contamination: float
) -> OutlierEnvelope:
    data = np.asarray(points, dtype=float)
    if data.ndim != 2:
        raise ValueError("points must be an (n, d) array")
    n = len(data)
    if n < _MIN_POINTS:
        raise ValueError(f"need at least {_MIN_POINTS} points, got {n}")
    if not 0.0 < contamination < 0.5:
        raise ValueError("contamination must lie in (0, 0.5)")

    center, cov = _location_scatter(data)
    _check_covariance(cov)
    n_trim = int(np.floor(contamination * n))
    for _ in range(_TRIM_ROUNDS):
        if n_trim == 0:
            break
        delta = data - center
        d2 = np.einsum("ij,ij->i", delta @ np.linalg.inv(cov), delta)
        keep = np.argsort(d2, kind="stable")[: n - n_trim]
        center, cov = _location_scatter(data[keep])
        _check_covariance(cov)

    delta = data - center
    d2 = np.einsum("ij,ij->i", delta @ np.linalg.inv(cov), delta)
    order = np.sort(d2)
    rank = int(np.ceil((1.0 - contamination) * n))
    threshold = float(order[min(rank, n) - 1])
    return OutlierEnvelope(
        center=tuple(float(x) for x in center),
        covariance=tuple(tuple(float(x) for x in row) for row in cov),
        threshold=threshold,
        contamination=contamination,
    )


def is_outlier(envelope: OutlierEnvelope, point: Sequence[float]) -> bool:
    """Strictly outside the threshold; boundary points are inliers."""
    return envelope.mahalanobis_sq(point) > envelope.threshold
