"""Pytest configuration and shared fixtures"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add parent directory to path to import modules
sys.path.insert(0, str(Path(__file__).parent.parent))

from models.stream_model import ClassCatalog, DecisionStream
from models.timeline import GroundTruthTimeline, Segment
from synthesis.config import GeneratorConfig


@pytest.fixture
def catalog():
    """Three classes with NM = 1"""
    return ClassCatalog(n_classes=3, nm_class=1)


@pytest.fixture
def small_timeline():
    """NM -> 2 -> 3 with 30-frame holds and 10-frame transitions"""
    return GroundTruthTimeline([
        Segment.steady(0, 30, 1),
        Segment.transition(30, 40, 1, 2),
        Segment.steady(40, 70, 2),
        Segment.transition(70, 80, 2, 3),
        Segment.steady(80, 110, 3),
    ])


@pytest.fixture
def small_config():
    """Generator configuration producing a short three-class trial"""
    return GeneratorConfig(seed=3, n_classes=3, steady_ms=480.0, transition_ms=160.0, training_frames=60)


@pytest.fixture
def random_stream():
    """Factory for seeded Dirichlet confidence streams"""

    def make(n_frames=200, n_classes=4, seed=0, alpha=0.7, **kwargs):
        rng = np.random.default_rng(seed)
        confidences = rng.dirichlet(np.full(n_classes, alpha), size=n_frames)
        return DecisionStream(confidences=confidences, **kwargs)

    return make


def one_hot_stream(decisions, n_classes, confidence=0.9, **kwargs):
    """Stream whose argmax follows ``decisions`` with a fixed max confidence"""
    decisions = np.asarray(decisions, dtype=np.int64)
    rest = (1.0 - confidence) / (n_classes - 1)
    confidences = np.full((decisions.size, n_classes), rest)
    confidences[np.arange(decisions.size), decisions - 1] = confidence
    return DecisionStream(confidences=confidences, **kwargs)


@pytest.fixture
def make_stream():
    return one_hot_stream
