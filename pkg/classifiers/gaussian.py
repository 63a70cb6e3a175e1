# File: dsqi_bench/classifiers/gaussian.py
"""Shared-covariance Gaussian discriminant (LDA) with adjustable class priors"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.special import softmax

from core.base import Classifier
from core.exceptions import ArgumentError, EvaluationError, TrainingError
from models.stream_model import ConfidenceVector, FeatureVector

logger = logging.getLogger(__name__)

#: Ridge added to the pooled covariance, relative to trace(Σ)/d.
DEFAULT_REGULARIZATION = 1e-6


@dataclass(frozen=True, eq=False)
class GaussianModel:
    """Trained LDA model

    Attributes:
        means: (K, d) class means, row k-1 for class k
        covariance: (d, d) regularized pooled within-class covariance
        priors: (K,) class priors, stored as given (not renormalized)
        coef: (d, K) linear discriminant weights Σ⁻¹μ_k
        intercept: (K,) discriminant offsets -½ μ_kᵀΣ⁻¹μ_k
        regularization: Relative ridge factor used in training
    """
    means: np.ndarray
    covariance: np.ndarray
    priors: np.ndarray
    coef: np.ndarray
    intercept: np.ndarray
    regularization: float = DEFAULT_REGULARIZATION

    @property
    def n_classes(self) -> int:
        return self.means.shape[0]

    @property
    def dimension(self) -> int:
        return self.means.shape[1]

    @property
    def log_priors(self) -> np.ndarray:
        """Log of the renormalized priors"""
        return np.log(self.priors / self.priors.sum())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "means": self.means.tolist(),
            "covariance": self.covariance.tolist(),
            "priors": self.priors.tolist(),
            "regularization": self.regularization,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'GaussianModel':
        means = np.asarray(data["means"], dtype=np.float64)
        covariance = np.asarray(data["covariance"], dtype=np.float64)
        coef, intercept = _discriminant_terms(means, covariance)
        return cls(
            means=means,
            covariance=covariance,
            priors=np.asarray(data["priors"], dtype=np.float64),
            coef=coef,
            intercept=intercept,
            regularization=float(data.get("regularization", DEFAULT_REGULARIZATION)),
        )


def train_gaussian(
    features: np.ndarray,
    labels: np.ndarray,
    regularization: float = DEFAULT_REGULARIZATION,
    n_classes: Optional[int] = None,
) -> GaussianModel:
    """Fit an LDA model with pooled covariance and uniform priors

    Args:
        features: (n, d) training feature matrix
        labels: (n,) class ids in 1..K
        regularization: Ridge factor; the ridge is regularization × trace(Σ)/d
        n_classes: Expected K; defaults to the largest label

    Returns:
        Trained GaussianModel with priors 1/K

    Raises:
        TrainingError: If fewer than 2 classes, a class has fewer than 2
            samples or no samples, or the covariance is singular
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.ndim != 2 or labels.shape != (features.shape[0],):
        raise TrainingError(f"features {features.shape} and labels {labels.shape} do not match")
    if not np.all(np.isfinite(features)):
        raise TrainingError("training features contain non-finite values")
    if regularization < 0:
        raise TrainingError(f"regularization must be >= 0, got {regularization}")
    n_classes = int(labels.max()) if n_classes is None else n_classes
    if n_classes < 2:
        raise TrainingError(f"need at least 2 classes, got {n_classes}")

    d = features.shape[1]
    means = np.empty((n_classes, d))
    scatter = np.zeros((d, d))
    for k in range(1, n_classes + 1):
        rows = features[labels == k]
        if rows.shape[0] < 2:
            raise TrainingError(f"class {k} has {rows.shape[0]} training samples, need at least 2")
        means[k - 1] = rows.mean(axis=0)
        centered = rows - means[k - 1]
        scatter += centered.T @ centered

    dof = features.shape[0] - n_classes
    covariance = scatter / dof
    ridge = regularization * np.trace(covariance) / d
    covariance = covariance + ridge * np.eye(d)
    covariance = 0.5 * (covariance + covariance.T)
    if np.linalg.eigvalsh(covariance).min() <= 0:
        raise TrainingError("pooled covariance is singular after regularization")

    coef, intercept = _discriminant_terms(means, covariance)
    logger.info("Trained LDA on %d samples, %d classes, %d features", features.shape[0], n_classes, d)
    return GaussianModel(
        means=means,
        covariance=covariance,
        priors=np.full(n_classes, 1.0 / n_classes),
        coef=coef,
        intercept=intercept,
        regularization=regularization,
    )


def posterior(model: GaussianModel, x: FeatureVector) -> ConfidenceVector:
    """Class posteriors of one feature vector under the model's priors

    Computed as a softmax over linear discriminants plus log-priors with the
    maximum subtracted before exponentiation.

    Raises:
        EvaluationError: If x has the wrong dimension or non-finite values
    """
    values = _check_input(model, np.asarray(x.values, dtype=np.float64)[None, :])
    return ConfidenceVector(_posterior_rows(model, values)[0], x.frame_index)


def posterior_batch(model: GaussianModel, features: np.ndarray) -> np.ndarray:
    """Class posteriors of an (n, d) feature matrix -> (n, K)"""
    features = _check_input(model, np.asarray(features, dtype=np.float64))
    return _posterior_rows(model, features)


def set_priors(model: GaussianModel, priors) -> GaussianModel:
    """Return a copy of the model with new class priors

    Priors are stored as given; posterior() renormalizes them.

    Raises:
        ArgumentError: If the count is wrong or any prior is outside (0, 1]
    """
    priors = np.asarray(priors, dtype=np.float64)
    if priors.shape != (model.n_classes,):
        raise ArgumentError(f"expected {model.n_classes} priors, got shape {priors.shape}")
    if np.any(~np.isfinite(priors)) or np.any(priors <= 0) or np.any(priors > 1):
        raise ArgumentError(f"priors must lie in (0, 1], got {priors.tolist()}")
    return replace(model, priors=priors.copy())


class GaussianClassifier(Classifier):
    """Classifier adapter around a GaussianModel"""

    is_generative = True

    def __init__(self, model: GaussianModel):
        self.model = model

    @property
    def n_classes(self) -> int:
        return self.model.n_classes

    def posterior(self, x: FeatureVector) -> ConfidenceVector:
        return posterior(self.model, x)

    def posterior_batch(self, features: np.ndarray) -> np.ndarray:
        return posterior_batch(self.model, features)

    def with_priors(self, priors) -> 'GaussianClassifier':
        return GaussianClassifier(set_priors(self.model, priors))


def _discriminant_terms(means: np.ndarray, covariance: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    try:
        factor = scipy.linalg.cho_factor(covariance, check_finite=True)
    except np.linalg.LinAlgError as e:
        raise TrainingError(f"covariance is not positive definite: {e}") from e
    coef = scipy.linalg.cho_solve(factor, means.T)
    intercept = -0.5 * np.einsum("kd,dk->k", means, coef)
    return coef, intercept


def _posterior_rows(model: GaussianModel, features: np.ndarray) -> np.ndarray:
    scores = features @ model.coef + model.intercept + model.log_priors
    confidences = softmax(scores, axis=1)
    return confidences / confidences.sum(axis=1, keepdims=True)


def _check_input(model: GaussianModel, features: np.ndarray) -> np.ndarray:
    if features.ndim != 2 or features.shape[1] != model.dimension:
        raise EvaluationError(f"expected features of dimension {model.dimension}, got shape {features.shape}")
    if not np.all(np.isfinite(features)):
        raise EvaluationError("feature vector contains non-finite values")
    return features
