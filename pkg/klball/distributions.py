"""
Finite discrete distributions, total variation and KL divergence.

Conventions used everywhere in klball:

- Total variation is the full L1 norm, V(P,Q) = sum_i |p_i - q_i|, with range [0, 2].
  It is NOT the half-L1 convention (range [0, 1]) used by many libraries.
- Divergences are in nats (natural logarithm).
- Zero-weight atoms are kept, so atom indices stay stable for subset enumeration.
- +infinity is a legitimate divergence value (math.inf).
"""

from __future__ import annotations

import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Tuple

import numpy as np

from .errors import DomainError, InputError
from .utils import log1p_excess

WEIGHT_SUM_TOL = 1e-12

# nonnegative real or math.inf
ExtendedReal = float


@dataclass(frozen=True)
class DiscreteDistribution:
    """Immutable finite distribution given by its atom weights."""

    weights: Tuple[float, ...]

    def __post_init__(self):
        try:
            weights = tuple(float(w) for w in self.weights)
        except (TypeError, ValueError):
            raise InputError(f"weights must be numbers, got {self.weights!r}") from None
        if len(weights) == 0:
            raise InputError("a distribution needs at least one atom")
        for w in weights:
            if not math.isfinite(w):
                raise InputError(f"weights must be finite, got {w}")
            if w < 0:
                raise InputError(f"weights must be nonnegative, got {w}")
        total = math.fsum(weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise InputError(
                f"weights must sum to 1 (got {total!r}); pass renormalize=True to rescale"
            )
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_weights(cls, weights: Iterable[float], renormalize: bool = False) -> "DiscreteDistribution":
        weights = [float(w) for w in weights]
        if renormalize:
            if any(w < 0 for w in weights):
                raise InputError("weights must be nonnegative")
            total = math.fsum(weights)
            if not total > 0 or not math.isfinite(total):
                raise InputError("cannot renormalize weights with zero or non-finite total")
            weights = [w / total for w in weights]
        return cls(tuple(weights))

    @classmethod
    def uniform(cls, k: int) -> "DiscreteDistribution":
        if k < 1:
            raise InputError("k must be >= 1")
        return cls((1.0 / k,) * k)

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def array(self) -> np.ndarray:
        arr = np.array(self.weights, dtype=np.float64)
        arr.flags.writeable = False
        return arr

    @property
    def q_max(self) -> float:
        return max(self.weights)

    @property
    def support_size(self) -> int:
        """Number of atoms with positive weight."""
        return sum(1 for w in self.weights if w > 0)

    def mass(self, indices: Iterable[int]) -> float:
        indices = set(indices)
        for i in indices:
            if not 0 <= i < self.size:
                raise InputError(f"atom index {i} out of range for support size {self.size}")
        return math.fsum(self.weights[i] for i in sorted(indices))

    def padded(self, k: int) -> "DiscreteDistribution":
        """Append zero atoms up to support size k."""
        if k < self.size:
            raise InputError(f"cannot pad a distribution of size {self.size} down to {k}")
        return DiscreteDistribution(self.weights + (0.0,) * (k - self.size))


def align(P: DiscreteDistribution, Q: DiscreteDistribution, pad: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """Return the weight arrays of P and Q on a common support."""
    if P.size != Q.size:
        if not pad:
            raise InputError(
                f"support sizes differ ({P.size} vs {Q.size}); pass pad=True to zero-pad"
            )
        k = max(P.size, Q.size)
        P, Q = P.padded(k), Q.padded(k)
    return P.array, Q.array


def total_variation(P: DiscreteDistribution, Q: DiscreteDistribution, pad: bool = False) -> float:
    """V(P,Q) = sum |p_i - q_i|, in [0, 2]."""
    p, q = align(P, Q, pad)
    return math.fsum(np.abs(p - q))


def kl_divergence(P: DiscreteDistribution, Q: DiscreteDistribution, pad: bool = False) -> ExtendedReal:
    """D(P||Q) = sum p_i ln(p_i/q_i) in nats; +inf if some p_i > 0 where q_i = 0."""
    p, q = align(P, Q, pad)
    if np.any((p > 0) & (q == 0)):
        return math.inf
    pos = q > 0
    p, q = p[pos], q[pos]
    # sum p ln(p/q) = sum q * h((p-q)/q) + sum (p - q), every h-term is >= 0
    terms = q * log1p_excess((p - q) / q)
    value = math.fsum(np.atleast_1d(terms)) + (math.fsum(p) - math.fsum(q))
    return max(0.0, value)


def mix_toward(P: DiscreteDistribution, Q: DiscreteDistribution, delta: float, pad: bool = False) -> DiscreteDistribution:
    """delta*P + (1-delta)*Q; satisfies V(mix, Q) = delta * V(P, Q)."""
    if not 0.0 <= delta <= 1.0:
        raise DomainError(f"delta must be in [0, 1], got {delta}")
    p, q = align(P, Q, pad)
    mixed = delta * p + (1.0 - delta) * q
    return DiscreteDistribution.from_weights(mixed, renormalize=True)


def rescale_to_tv(P: DiscreteDistribution, Q: DiscreteDistribution, v: float, pad: bool = False) -> DiscreteDistribution:
    """Move P toward Q until V(P', Q) = v exactly; requires V(P, Q) >= v.

    By convexity D(P'||Q) <= D(P||Q), which is why D* is attained on the sphere V = v.
    """
    distance = total_variation(P, Q, pad)
    if v < 0 or v > distance:
        raise DomainError(f"need 0 <= v <= V(P,Q) = {distance}, got v = {v}")
    if distance == 0:
        return Q
    return mix_toward(P, Q, v / distance, pad)


_SPLIT_RE = re.compile(r"[,\s;]+")


def parse_weights(text: str) -> list:
    """Parse weights from a JSON array, a comma separated list, or one weight per line."""
    text = text.strip()
    if not text:
        raise InputError("no weights given")
    if text.startswith("["):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"invalid JSON weights: {e}") from None
        if not isinstance(values, list):
            raise InputError("JSON weights must be an array of numbers")
    else:
        values = [tok for tok in _SPLIT_RE.split(text) if tok]
    weights = []
    for raw in values:
        if isinstance(raw, bool):
            raise InputError(f"not a number: {raw!r}")
        try:
            w = float(raw)
        except (TypeError, ValueError):
            raise InputError(f"not a number: {raw!r}") from None
        weights.append(w)
    return weights


def load_distribution(source: str, renormalize: bool = False, stdin=None) -> DiscreteDistribution:
    """Read a distribution from "-" (stdin), a file path, or an inline weight list."""
    if source == "-":
        text = (stdin or sys.stdin).read()
    elif not any(ch in source for ch in ",[") and Path(source).is_file():
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    weights = parse_weights(text)
    if any(w < 0 for w in weights):
        raise InputError("weights must be nonnegative")
    return DiscreteDistribution.from_weights(weights, renormalize=renormalize)


def as_distribution(obj, renormalize: bool = False) -> DiscreteDistribution:
    if isinstance(obj, DiscreteDistribution):
        return obj
    return DiscreteDistribution.from_weights(obj, renormalize=renormalize)


def indices_in_range(indices: Iterable[int], k: int) -> Tuple[int, ...]:
    out = tuple(sorted(set(int(i) for i in indices)))
    for i in out:
        if not 0 <= i < k:
            raise InputError(f"atom index {i} out of range for support size {k}")
    return out

