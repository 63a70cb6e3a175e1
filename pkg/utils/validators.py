# File: dsqi_bench/utils/validators.py
"""Utilities for validating confidence vectors and hyperparameters"""

import numpy as np

from core.exceptions import ArgumentError, InvariantError

#: Tolerance on the unit-sum constraint of a confidence vector.
UNIT_SUM_TOL = 1e-9


class ConfidenceValidator:
    """Validates the range and unit-sum constraints on confidences"""

    @staticmethod
    def check_vector(confidences: np.ndarray, tol: float = UNIT_SUM_TOL) -> None:
        """Check that one confidence vector lies on the probability simplex

        Args:
            confidences: Vector of K per-class confidences
            tol: Allowed deviation of the sum from 1

        Raises:
            InvariantError: If any confidence is outside [0, 1], non-finite,
                or the vector does not sum to 1

        Examples:
            >>> ConfidenceValidator.check_vector(np.array([0.25, 0.75]))
            >>> ConfidenceValidator.check_vector(np.array([0.5, 0.6]))
            Traceback (most recent call last):
            ...
            core.exceptions.InvariantError: confidences sum to 1.1, expected 1
        """
        if confidences.ndim != 1 or confidences.size < 2:
            raise InvariantError(f"expected a vector of at least 2 confidences, got shape {confidences.shape}")
        if not np.all(np.isfinite(confidences)):
            raise InvariantError("confidences must be finite")
        if confidences.min() < 0.0 or confidences.max() > 1.0:
            raise InvariantError("confidences must lie in [0, 1]")
        total = float(confidences.sum())
        if abs(total - 1.0) > tol:
            raise InvariantError(f"confidences sum to {total:.12g}, expected 1")

    @staticmethod
    def check_matrix(confidences: np.ndarray, tol: float = UNIT_SUM_TOL) -> None:
        """Check every row of an (N, K) confidence matrix

        Raises:
            InvariantError: Naming the first offending row
        """
        if confidences.ndim != 2 or confidences.shape[1] < 2:
            raise InvariantError(f"expected an (N, K>=2) confidence matrix, got shape {confidences.shape}")
        if confidences.shape[0] == 0:
            return
        finite = np.isfinite(confidences).all(axis=1)
        in_range = (confidences >= 0.0).all(axis=1) & (confidences <= 1.0).all(axis=1)
        unit_sum = np.abs(confidences.sum(axis=1) - 1.0) <= tol
        bad = np.flatnonzero(~(finite & in_range & unit_sum))
        if bad.size:
            row = int(bad[0])
            raise InvariantError(
                f"confidence row {row} violates range/unit-sum: {confidences[row].tolist()}"
            )

    @staticmethod
    def check_probability(name: str, value: float, *, open_low: bool = False, open_high: bool = False) -> float:
        """Check that a scalar hyperparameter lies in [0, 1]

        Args:
            name: Parameter name used in the error message
            value: The value to check
            open_low: Exclude 0
            open_high: Exclude 1

        Returns:
            The value as float

        Raises:
            ArgumentError: If out of range
        """
        value = float(value)
        low_ok = value > 0.0 if open_low else value >= 0.0
        high_ok = value < 1.0 if open_high else value <= 1.0
        if not (low_ok and high_ok and np.isfinite(value)):
            low = "(" if open_low else "["
            high = ")" if open_high else "]"
            raise ArgumentError(f"{name} must be in {low}0, 1{high}, got {value}")
        return value

    @staticmethod
    def check_positive(name: str, value: float, *, allow_zero: bool = False) -> float:
        """Check that a scalar is positive (or non-negative)

        Raises:
            ArgumentError: If the check fails
        """
        value = float(value)
        ok = value >= 0.0 if allow_zero else value > 0.0
        if not (ok and np.isfinite(value)):
            bound = ">= 0" if allow_zero else "> 0"
            raise ArgumentError(f"{name} must be {bound}, got {value}")
        return value
