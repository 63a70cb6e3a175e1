# File: dsqi_bench/classifiers/one_class.py
"""Per-class Mahalanobis one-class detectors for outlier rejection"""

import enum
import logging
from dataclasses import dataclass
from typing import Any, Dict, Mapping

import numpy as np
import scipy.linalg

from core.exceptions import TrainingError
from models.stream_model import FeatureVector

logger = logging.getLogger(__name__)


class OccVerdict(str, enum.Enum):
    INLIER = "inlier"
    OUTLIER = "outlier"


@dataclass(frozen=True, eq=False)
class OneClassModel:
    """Mahalanobis detector g_k of one class

    Attributes:
        class_id: Class the detector accepts
        mean: (d,) class mean
        covariance: (d, d) regularized class covariance
        precision: (d, d) inverse covariance
        threshold: Largest accepted squared distance t_k
    """
    class_id: int
    mean: np.ndarray
    covariance: np.ndarray
    precision: np.ndarray
    threshold: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "class_id": self.class_id,
            "mean": self.mean.tolist(),
            "covariance": self.covariance.tolist(),
            "threshold": self.threshold,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'OneClassModel':
        covariance = np.asarray(data["covariance"], dtype=np.float64)
        return cls(
            class_id=int(data["class_id"]),
            mean=np.asarray(data["mean"], dtype=np.float64),
            covariance=covariance,
            precision=_invert(covariance, int(data["class_id"])),
            threshold=float(data["threshold"]),
        )


#: One detector per class, keyed by class id.
OneClassSet = Dict[int, OneClassModel]


def mahalanobis_sq(model: OneClassModel, features: np.ndarray) -> np.ndarray:
    """Squared Mahalanobis distance of (n, d) features (or one (d,) vector)"""
    centered = np.asarray(features, dtype=np.float64) - model.mean
    return np.sum((centered @ model.precision) * centered, axis=-1)


def train_occ(
    features: np.ndarray,
    labels: np.ndarray,
    quantile: float = 0.99,
    regularization: float = 1e-6,
) -> OneClassSet:
    """Fit one Mahalanobis detector per class

    The threshold t_k is the given quantile of the squared training
    distances of class k.

    Args:
        features: (n, d) training features
        labels: (n,) class ids
        quantile: Quantile in (0, 1] of training distances accepted
        regularization: Ridge factor relative to trace(Σ_k)/d

    Returns:
        Mapping from class id to OneClassModel

    Raises:
        TrainingError: On singular covariance or too few samples
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if not 0.0 < quantile <= 1.0:
        raise TrainingError(f"quantile must be in (0, 1], got {quantile}")
    d = features.shape[1]
    models: OneClassSet = {}
    for class_id in np.unique(labels).tolist():
        rows = features[labels == class_id]
        if rows.shape[0] < 2:
            raise TrainingError(f"class {class_id} has {rows.shape[0]} samples, need at least 2")
        if rows.shape[0] < d + 1:
            logger.warning("class %d has %d samples for %d features; covariance relies on regularization",
                           class_id, rows.shape[0], d)
        mean = rows.mean(axis=0)
        covariance = np.atleast_2d(np.cov(rows, rowvar=False))
        covariance = covariance + regularization * np.trace(covariance) / d * np.eye(d)
        precision = _invert(covariance, class_id)
        model = OneClassModel(class_id, mean, covariance, precision, threshold=1.0)
        distances = mahalanobis_sq(model, rows)
        threshold = float(np.quantile(distances, quantile))
        if not threshold > 0:
            raise TrainingError(f"class {class_id}: distance threshold {threshold} is not positive")
        models[class_id] = OneClassModel(class_id, mean, covariance, precision, threshold)
    logger.info("Trained %d one-class detectors (quantile %.3f)", len(models), quantile)
    return models


def inlier_mask(models: OneClassSet, features: np.ndarray) -> np.ndarray:
    """Vectorized occ_check over (n, d) features -> (n,) bool"""
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    accepted = np.zeros(features.shape[0], dtype=bool)
    for model in models.values():
        accepted |= mahalanobis_sq(model, features) <= model.threshold
    return accepted


def occ_check(models: OneClassSet, x: FeatureVector) -> OccVerdict:
    """Inlier iff at least one class detector accepts x (closed threshold)"""
    for model in models.values():
        if mahalanobis_sq(model, x.values) <= model.threshold:
            return OccVerdict.INLIER
    return OccVerdict.OUTLIER


def _invert(covariance: np.ndarray, class_id: int) -> np.ndarray:
    if np.linalg.eigvalsh(covariance).min() <= 0:
        raise TrainingError(f"class {class_id}: covariance is singular after regularization")
    return scipy.linalg.inv(covariance, check_finite=True)
