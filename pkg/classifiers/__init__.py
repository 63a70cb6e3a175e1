"""Classifier contract implementations: LDA posteriors and one-class detectors"""

from .gaussian import (
    GaussianModel,
    GaussianClassifier,
    train_gaussian,
    posterior,
    posterior_batch,
    set_priors,
)
from .one_class import OneClassModel, OneClassSet, OccVerdict, train_occ, occ_check, inlier_mask, mahalanobis_sq

__all__ = [
    'GaussianModel',
    'GaussianClassifier',
    'train_gaussian',
    'posterior',
    'posterior_batch',
    'set_priors',
    'OneClassModel',
    'OneClassSet',
    'OccVerdict',
    'train_occ',
    'occ_check',
    'inlier_mask',
    'mahalanobis_sq',
]

from .bank import ClassifierBank, train_bank, steady_frame_labels

__all__ += ['ClassifierBank', 'train_bank', 'steady_frame_labels']
