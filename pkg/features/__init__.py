"""Framing and feature extraction"""

from .windowing import make_frames, frame_geometry, frame_windows, frame_sample_ends, count_frames
from .extractors import mav, mean_mav_batch, TimeDomainExtractor, extract_features

__all__ = [
    'make_frames',
    'frame_geometry',
    'frame_windows',
    'frame_sample_ends',
    'count_frames',
    'mav',
    'mean_mav_batch',
    'TimeDomainExtractor',
    'extract_features',
]
