# File: dsqi_bench/dsqi/kernels.py
"""Sliding-window kernels shared by the streaming and batch scheme paths

Every kernel takes a matrix whose rows are consecutive frames and evaluates
the window ending at each row, looking back over ``m`` earlier rows. Lags
that fall before the first row contribute the operation's identity (1.0 for
products, 0.0 for sums), so the streaming path can evaluate its short history
buffer with the same kernel and get bit-identical results to a pass over the
full stream.
"""

import numpy as np


def shifted(values: np.ndarray, lag: int, fill) -> np.ndarray:
    """Rows shifted down by ``lag`` with ``fill`` in the first ``lag`` rows"""
    if lag == 0:
        return values
    out = np.empty_like(values)
    out[:lag] = fill
    out[lag:] = values[:-lag] if lag < values.shape[0] else values[:0]
    return out


def row_sum(values: np.ndarray) -> np.ndarray:
    """Sum over the last axis in fixed left-to-right order"""
    total = values[..., 0]
    for k in range(1, values.shape[-1]):
        total = total + values[..., k]
    return total


def normalize_rows(values: np.ndarray) -> np.ndarray:
    return values / np.expand_dims(row_sum(values), -1)


def window_counts(n_rows: int, m: int) -> np.ndarray:
    """Number of rows inside each window during warm-up"""
    return np.minimum(np.arange(n_rows) + 1, m + 1)


def majority_vote(decisions: np.ndarray, m: int, n_classes: int) -> np.ndarray:
    """Mode of each window of m + 1 decisions; the most recent modal class wins ties

    Args:
        decisions: (N,) class ids in 1..K
        m: History length
        n_classes: K

    Returns:
        (N,) voted class ids
    """
    decisions = np.asarray(decisions, dtype=np.int64)
    n = decisions.shape[0]
    counts = np.zeros((n, n_classes), dtype=np.int64)
    last_lag = np.full((n, n_classes), m + 1, dtype=np.int64)
    rows = np.arange(n)
    for lag in range(min(m, n - 1), -1, -1):
        past = shifted(decisions, lag, 0)
        valid = rows >= lag
        idx = rows[valid]
        cls = past[valid] - 1
        counts[idx, cls] += 1
        last_lag[idx, cls] = lag
    modal = counts == counts.max(axis=1, keepdims=True)
    recency = np.where(modal, last_lag, m + 2)
    return np.argmin(recency, axis=1).astype(np.int64) + 1


def bf_weights(m: int) -> np.ndarray:
    """Bayesian fusion weights a_0..a_m; positive, decreasing, summing to 10"""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    scale = np.exp(-0.5 * np.arange(1, m + 2) / (m + 1))
    return 10.0 * scale / scale.sum()


def bayesian_fusion(confidences: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Fused confidences ∝ Π_n (c_(i-n)k + a_n), normalized per row

    Args:
        confidences: (N, K) raw confidences
        weights: (m + 1,) weights from bf_weights

    Returns:
        (N, K) fused confidences with unit row sums
    """
    product = confidences + weights[0]
    for lag in range(1, weights.shape[0]):
        if lag >= confidences.shape[0]:
            break
        term = shifted(confidences, lag, 0.0) + weights[lag]
        term[:lag] = 1.0
        product = product * term
    return normalize_rows(product)


def confidence_variance(confidences: np.ndarray, m: int) -> np.ndarray:
    """Largest per-class population variance over each window of m + 1 rows

    Args:
        confidences: (N, K) raw confidences
        m: History length

    Returns:
        (N,) v_i = max_k var(c_(i-m..i)k)
    """
    n = confidences.shape[0]
    lags = min(m, n - 1) + 1
    counts = window_counts(n, m).astype(np.float64)[:, None]
    total = confidences.copy()
    for lag in range(1, lags):
        total = total + shifted(confidences, lag, 0.0)
    mean = total / counts
    spread = (confidences - mean) ** 2
    for lag in range(1, lags):
        deviation = (shifted(confidences, lag, 0.0) - mean) ** 2
        deviation[:lag] = 0.0
        spread = spread + deviation
    return (spread / counts).max(axis=1)


def frames_since_change(decisions: np.ndarray) -> np.ndarray:
    """Frames elapsed since the last change of the decision stream (0 at a change and at frame 0)"""
    decisions = np.asarray(decisions)
    n = decisions.shape[0]
    rows = np.arange(n)
    if n == 0:
        return rows
    change = np.zeros(n, dtype=bool)
    change[0] = True
    change[1:] = decisions[1:] != decisions[:-1]
    last_change = np.maximum.accumulate(np.where(change, rows, 0))
    return rows - last_change
