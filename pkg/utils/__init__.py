"""Utility functions and validators"""

from .validators import ConfidenceValidator, UNIT_SUM_TOL

__all__ = ['ConfidenceValidator', 'UNIT_SUM_TOL']
