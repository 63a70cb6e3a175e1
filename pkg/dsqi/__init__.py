"""Decision stream quality improvement schemes"""

from .common import SchemeProcessor
from .kernels import bf_weights, majority_vote, bayesian_fusion, confidence_variance, frames_since_change
from .decision_based import (
    MajorityVoteProcessor,
    PriorAdjustedLdaProcessor,
    DecayingConfidenceRejectionProcessor,
    dcir_threshold,
)
from .confidence_based import (
    ConfidenceRejectionProcessor,
    ConfidenceScalingProcessor,
    BayesianFusionProcessor,
    AdaptiveWindowProcessor,
    VarianceRejectionProcessor,
)
from .feature_based import OnsetLockProcessor, OutlierDetectionProcessor, ol_threshold
from .runner import PassThroughProcessor, SchemeResources, build_processor, run_scheme, registered_schemes

__all__ = [
    'SchemeProcessor',
    'bf_weights',
    'majority_vote',
    'bayesian_fusion',
    'confidence_variance',
    'frames_since_change',
    'MajorityVoteProcessor',
    'PriorAdjustedLdaProcessor',
    'DecayingConfidenceRejectionProcessor',
    'dcir_threshold',
    'ConfidenceRejectionProcessor',
    'ConfidenceScalingProcessor',
    'BayesianFusionProcessor',
    'AdaptiveWindowProcessor',
    'VarianceRejectionProcessor',
    'OnsetLockProcessor',
    'OutlierDetectionProcessor',
    'ol_threshold',
    'PassThroughProcessor',
    'SchemeResources',
    'build_processor',
    'run_scheme',
    'registered_schemes',
]
