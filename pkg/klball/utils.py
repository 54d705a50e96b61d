from __future__ import annotations

import math
from typing import Iterable, Sequence, Tuple

import numpy as np
from scipy.special import xlog1py

# Power series of (1+u)ln(1+u) - u: sum_{k>=2} (-1)^k u^k / (k(k-1))
_SERIES_TERMS = 20
_EXCESS_SERIES = np.array(
    [0.0, 0.0] + [(-1) ** k / (k * (k - 1)) for k in range(2, _SERIES_TERMS)]
)
_SERIES_CUTOFF = 0.1


def log1p_excess(u):
    """(1+u)*ln(1+u) - u for u >= -1, accurate near u = 0.

    Bregman divergence of x*ln(x) between 1+u and 1: nonnegative, zero only at u = 0.
    Accepts scalars or arrays.
    """
    u = np.asarray(u, dtype=np.float64)
    small = np.abs(u) < _SERIES_CUTOFF
    series = np.polynomial.polynomial.polyval(np.where(small, u, 0.0), _EXCESS_SERIES)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = xlog1py(1.0 + u, u) - u
    out = np.where(small, series, direct)
    return float(out) if out.ndim == 0 else out


def subset_masses(weights: Sequence[float]) -> np.ndarray:
    """Masses of all 2^k subsets; entry m is the mass of the set whose bit i is set iff atom i is in it."""
    masses = np.zeros(1)
    for w in weights:
        masses = np.concatenate((masses, masses + w))
    return masses


def popcount(masks: np.ndarray, k: int) -> np.ndarray:
    masks = np.asarray(masks, dtype=np.int64)
    counts = np.zeros(masks.shape, dtype=np.int64)
    for i in range(k):
        counts += (masks >> i) & 1
    return counts


def _reversed_bits(masks: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros(masks.shape, dtype=np.int64)
    for i in range(k):
        out |= ((masks >> i) & 1) << (k - 1 - i)
    return out


def mask_to_indices(mask: int, k: int) -> Tuple[int, ...]:
    return tuple(i for i in range(k) if (int(mask) >> i) & 1)


def canonical_subset(masks: Iterable[int], k: int) -> Tuple[int, ...]:
    """Pick the smallest-cardinality subset, ties broken by lexicographic index order.

    For equal cardinality, the lexicographically smallest sorted index tuple is the one
    with the largest bit-reversed mask (atom 0 as the most significant bit).
    """
    masks = np.asarray(list(masks) if not isinstance(masks, np.ndarray) else masks, dtype=np.int64)
    if masks.size == 0:
        raise ValueError("no candidate subsets")
    counts = popcount(masks, k)
    smallest = masks[counts == counts.min()]
    best = smallest[np.argmax(_reversed_bits(smallest, k))]
    return mask_to_indices(best, k)


def complement(indices: Iterable[int], k: int) -> Tuple[int, ...]:
    inside = set(indices)
    return tuple(i for i in range(k) if i not in inside)


def format_number(x, digits: int = 12) -> str:
    """Format with `digits` significant digits; +infinity is written as "inf"."""
    if x is None:
        return ""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.{digits}g}"


def to_jsonable(obj, digits: int = 12):
    """Round floats to `digits` significant digits and replace infinities by "inf"."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v, digits) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x) or math.isnan(x):
            return format_number(x)
        return float(format_number(x, digits))
    return obj
