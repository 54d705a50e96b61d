"""
Two-point divergence KL2(p, q) and the binary extremal results.

KL2(p, q) = p ln(p/q) + (1-p) ln((1-p)/(1-q)) is the divergence between the Bernoulli
distributions (p, 1-p) and (q, 1-q). It is evaluated as

    q * h((p-q)/q) + (1-q) * h((q-p)/(1-q)),   h(u) = (1+u) ln(1+u) - u,

a sum of two nonnegative terms, so there is no cancellation when p is close to q.
Boundary values follow the continuity limits: KL2(0,q) = ln(1/(1-q)), KL2(1,q) = ln(1/q),
KL2(p,0) = inf for p > 0, KL2(p,1) = inf for p < 1, KL2(0,0) = KL2(1,1) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .distributions import DiscreteDistribution, ExtendedReal
from .errors import DomainError
from .utils import log1p_excess


@dataclass(frozen=True)
class BinaryDistribution:
    """Distribution (q0, 1 - q0) on two outcomes."""

    q0: float

    def __post_init__(self):
        q0 = float(self.q0)
        if not 0.0 <= q0 <= 1.0:
            raise DomainError(f"q0 must be in [0, 1], got {q0}")
        object.__setattr__(self, "q0", q0)

    @property
    def q1(self) -> float:
        return 1.0 - self.q0

    def swapped(self) -> "BinaryDistribution":
        return BinaryDistribution(self.q1)

    def as_distribution(self) -> DiscreteDistribution:
        return DiscreteDistribution((self.q0, self.q1))


def _check_unit(name: str, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if np.any(~((x >= 0.0) & (x <= 1.0))):
        raise DomainError(f"{name} must lie in [0, 1], got {x.tolist()}")
    return x


def kl2(p, q):
    """Binary KL divergence KL2(p, q) in nats. Scalars give a float, arrays an array."""
    p = _check_unit("p", p)
    q = _check_unit("q", q)
    p, q = np.broadcast_arrays(p, q)
    d = p - q
    inner = (q > 0.0) & (q < 1.0)
    q_safe = np.where(inner, q, 0.5)
    d_safe = np.where(inner, d, 0.0)
    value = q_safe * log1p_excess(d_safe / q_safe) + (1.0 - q_safe) * log1p_excess(
        -d_safe / (1.0 - q_safe)
    )
    # q on the boundary: zero iff p == q, else infinite
    edge = np.where(p == q, 0.0, math.inf)
    out = np.where(inner, value, edge)
    return float(out) if out.ndim == 0 else out


def extremal_binary(Q: BinaryDistribution, v: float) -> Tuple[BinaryDistribution, ExtendedReal]:
    """Minimizer of D(P||Q) over binary P with V(P,Q) = v, for q0 > 1/2.

    Mass v/2 is taken from the heavy outcome: P* = (q0 - v/2, 1 - q0 + v/2), and the
    minimum value is KL2(q0 - v/2, q0).
    """
    if not Q.q0 > 0.5:
        raise DomainError(f"need q0 > 1/2, got {Q.q0}")
    if not 0.0 < v <= 2.0 * Q.q0:
        raise DomainError(f"need 0 < v <= 2*q0 = {2.0 * Q.q0}, got {v}")
    p0 = max(0.0, Q.q0 - v / 2.0)
    return BinaryDistribution(p0), kl2(p0, Q.q0)


def kl2_shift_increasing_check(delta: float, grid: Sequence[float]) -> bool:
    """True iff x -> KL2(x - delta, x) is strictly increasing along the sorted grid.

    The grid must lie in [1/2 + delta/2, 1), where the function is known to increase.
    """
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must be in (0, 1/2), got {delta}")
    x = np.asarray(grid, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise DomainError("grid must be a non-empty 1-D sequence")
    if np.any(np.diff(x) <= 0):
        raise DomainError("grid must be sorted strictly ascending")
    lo = 0.5 + delta / 2.0
    if x[0] < lo - 1e-15 or x[-1] >= 1.0:
        raise DomainError(f"grid must lie in [{lo}, 1)")
    values = kl2(x - delta, x)
    return bool(np.all(np.diff(np.atleast_1d(values)) > 0))


def expansion_balanced(v: float) -> float:
    """KL2(1/2 - v/2, 1/2) = v^2/2 + v^4/12 + O(v^6)."""
    return v * v / 2.0 + v ** 4 / 12.0
