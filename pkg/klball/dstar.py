"""
D*(v, Q) = inf { D(P||Q) : V(P,Q) >= v }, the minimum KL divergence outside an L1 ball.

The infimum is attained on the sphere V(P,Q) = v. For a set A that receives mass v/2, the best P
is the tilt of Q that multiplies weights in A by a = 1 + v/(2Q(A)) and the rest by
b = 1 - v/(2(1-Q(A))); its divergence is KL2(Q(A) + v/2, Q(A)). Hence

    D*(v, Q) = min over subsets A with Q(A) <= 1 - v/2 of KL2(Q(A) + v/2, Q(A)),

which `dstar_enumerate` evaluates exactly. `dstar` prefers the closed form KL2(beta - v/2, beta),
valid for beta > 1/2 and v < 4(beta - 1/2), and returns L(v) for distributions with full range.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from .balance import balance_exact, balance_greedy
from .binary import BinaryDistribution, kl2
from .config import get_settings
from .distributions import (
    DiscreteDistribution,
    ExtendedReal,
    as_distribution,
    indices_in_range,
)
from .errors import CapacityError, DomainError
from .utils import canonical_subset, complement, subset_masses
from .vajda import vajda_L

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-12


class DStarMethod(enum.Enum):
    CLOSED_FORM_THM1B = "closed_form_thm1b"
    UPPER_BOUND_THM1A = "upper_bound_thm1a"
    ENUMERATION = "enumeration"
    FULL_RANGE_THM2 = "full_range_thm2"


@dataclass(frozen=True)
class DStarResult:
    """Value of D*(v, Q) and how it was obtained.

    With `upper_bound_only` set, `value` is only an upper bound and `lower_bound` holds L(v);
    the pair is the bracket [L(v), value].
    """

    value: ExtendedReal
    method: DStarMethod
    v: float
    extremal: Optional[DiscreteDistribution] = None
    achieving_subset: Optional[Tuple[int, ...]] = None
    beta: Optional[float] = None
    lower_bound: Optional[float] = None
    upper_bound_only: bool = False

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method.value,
            "v": self.v,
            "beta": self.beta,
            "achieving_subset": None if self.achieving_subset is None else list(self.achieving_subset),
            "extremal": None if self.extremal is None else list(self.extremal.weights),
            "lower_bound": self.lower_bound,
            "upper_bound_only": self.upper_bound_only,
        }


def _check_v(v: float) -> None:
    if not 0.0 < v < 2.0:
        raise DomainError(f"v must be in (0, 2), got {v}")


def extremal_tilt(Q, A: Iterable[int], v: float) -> DiscreteDistribution:
    """Minimizer of D(P||Q) among P with V(P,Q) = v that put extra mass exactly on A."""
    Q = as_distribution(Q)
    A = indices_in_range(A, Q.size)
    qa = Q.mass(A)
    if not 0.0 < qa < 1.0:
        raise DomainError(f"need 0 < Q(A) < 1, got Q(A) = {qa}")
    if not 0.0 < v <= 2.0 * (1.0 - qa) + BOUNDARY_TOL:
        raise DomainError(f"need 0 < v <= 2(1 - Q(A)) = {2.0 * (1.0 - qa)}, got {v}")
    a = 1.0 + v / (2.0 * qa)
    b = max(0.0, 1.0 - v / (2.0 * (1.0 - qa)))
    inside = np.zeros(Q.size, dtype=bool)
    inside[list(A)] = True
    weights = np.where(inside, a * Q.array, b * Q.array)
    return DiscreteDistribution.from_weights(weights, renormalize=True)


def binary_coarsen(P, A: Iterable[int]) -> BinaryDistribution:
    """Image (P(A), 1 - P(A)) of P under the two-cell partition {A, complement of A}."""
    P = as_distribution(P)
    return BinaryDistribution(min(1.0, P.mass(indices_in_range(A, P.size))))


def binary_lift(Q, A: Iterable[int], P2: BinaryDistribution) -> DiscreteDistribution:
    """P = p0 * Q(.|A) + p1 * Q(.|not A).

    Preserves both distances to the coarsened Q:
    V(P,Q) = V(P2, coarsen(Q)) and D(P||Q) = D(P2||coarsen(Q)).
    """
    Q = as_distribution(Q)
    A = indices_in_range(A, Q.size)
    qa = Q.mass(A)
    if not 0.0 < qa < 1.0:
        raise DomainError(f"need 0 < Q(A) < 1, got Q(A) = {qa}")
    inside = np.zeros(Q.size, dtype=bool)
    inside[list(A)] = True
    weights = np.where(inside, P2.q0 * Q.array / qa, P2.q1 * Q.array / (1.0 - qa))
    return DiscreteDistribution.from_weights(weights, renormalize=True)


def dstar_enumerate(Q, v: float, k_max: Optional[int] = None) -> DStarResult:
    """Exact D*(v, Q) by minimizing over the distinct masses of all 2^k subsets."""
    _check_v(v)
    Q = as_distribution(Q)
    k_max = get_settings().k_max if k_max is None else k_max
    k = Q.size
    if k > k_max:
        raise CapacityError(f"support size {k} exceeds k_max={k_max} for subset enumeration")
    half = v / 2.0
    masses = subset_masses(Q.weights)
    feasible = masses[masses <= 1.0 - half + BOUNDARY_TOL]
    distinct = np.unique(feasible)
    logger.debug("dstar_enumerate: %d subsets, %d distinct feasible masses", masses.size, distinct.size)
    values = np.atleast_1d(kl2(np.minimum(distinct + half, 1.0), distinct))
    j = int(np.argmin(values))
    best = float(values[j])
    if math.isinf(best):
        return DStarResult(value=math.inf, method=DStarMethod.ENUMERATION, v=v)
    x = distinct[j]
    subset = canonical_subset(np.flatnonzero(masses == x), k)
    return DStarResult(
        value=best,
        method=DStarMethod.ENUMERATION,
        v=v,
        extremal=extremal_tilt(Q, subset, v),
        achieving_subset=subset,
    )


def _closed_form(Q: DiscreteDistribution, v: float, beta: float, beta_set: Tuple[int, ...]) -> DStarResult:
    value = kl2(max(0.0, beta - v / 2.0), beta)
    if math.isinf(value):
        return DStarResult(value=value, method=DStarMethod.CLOSED_FORM_THM1B, v=v, beta=beta)
    # mass v/2 moves onto the complement of the beta-set
    receiving = complement(beta_set, Q.size)
    return DStarResult(
        value=value,
        method=DStarMethod.CLOSED_FORM_THM1B,
        v=v,
        extremal=extremal_tilt(Q, receiving, v),
        achieving_subset=receiving,
        beta=beta,
    )


def closed_form_applies(beta: float, v: float) -> bool:
    return beta > 0.5 and 0.0 < v < 4.0 * (beta - 0.5)


def dstar(Q, v: float, full_range: bool = False, method: str = "auto", k_max: Optional[int] = None) -> DStarResult:
    """D*(v, Q), dispatching between the full-range formula, closed form and enumeration.

    method: "auto" (closed form when valid, else enumeration, else the bracket from the
    best certified set), "enumerate" (always enumerate), "closed" (closed form or error).
    """
    _check_v(v)
    if full_range:
        return DStarResult(value=vajda_L(v), method=DStarMethod.FULL_RANGE_THM2, v=v, beta=0.5)
    if method not in ("auto", "enumerate", "closed"):
        raise DomainError(f"unknown method {method!r}")
    Q = as_distribution(Q)
    k_max = get_settings().k_max if k_max is None else k_max

    if method == "enumerate":
        return dstar_enumerate(Q, v, k_max)

    if Q.size <= k_max:
        report = balance_exact(Q, k_max)
        if closed_form_applies(report.beta, v):
            logger.debug("dstar: closed form with beta=%r", report.beta)
            return _closed_form(Q, v, report.beta, report.achieving_subset)
        if method == "closed":
            raise DomainError(
                f"closed form needs beta > 1/2 and v < 4(beta - 1/2); beta={report.beta}, v={v}"
            )
        result = dstar_enumerate(Q, v, k_max)
        return DStarResult(
            value=result.value,
            method=result.method,
            v=v,
            extremal=result.extremal,
            achieving_subset=result.achieving_subset,
            beta=report.beta,
        )

    if method == "closed":
        raise CapacityError(f"support size {Q.size} exceeds k_max={k_max}; beta cannot be computed exactly")
    return dstar_bracket(Q, v)


def dstar_bracket(Q, v: float) -> DStarResult:
    """Bracket [L(v), KL2(m - v/2, m)] for 0 < v < 1, m the mass of the greedy witness set."""
    _check_v(v)
    Q = as_distribution(Q)
    if v >= 1.0:
        raise CapacityError(
            f"support size {Q.size} is too large to enumerate and the upper bound is only established for v < 1"
        )
    report = balance_greedy(Q)
    m = report.upper_bound
    upper = kl2(max(0.0, m - v / 2.0), m)
    lower = vajda_L(v)
    logger.warning("D*(%g, Q) reported as the bracket [%g, %g]", v, lower, upper)
    extremal = receiving = None
    if m < 1.0:
        receiving = complement(report.achieving_subset, Q.size)
        extremal = extremal_tilt(Q, receiving, v)
    return DStarResult(
        value=upper,
        method=DStarMethod.UPPER_BOUND_THM1A,
        v=v,
        extremal=extremal,
        achieving_subset=receiving,
        lower_bound=lower,
        upper_bound_only=True,
    )


def pinsker_lower(v: float) -> float:
    """Pinsker's bound D >= V^2 / 2."""
    if not 0.0 <= v <= 2.0:
        raise DomainError(f"v must be in [0, 2], got {v}")
    return v * v / 2.0


def ow_lower(Q, v: float, k_max: Optional[int] = None) -> float:
    """Distribution-dependent bound D >= phi(Q)/4 * V^2."""
    if not 0.0 <= v <= 2.0:
        raise DomainError(f"v must be in [0, 2], got {v}")
    report = balance_exact(Q, k_max)
    if report.phi is None:
        raise DomainError("phi(Q) is undefined for beta = 1")
    return report.phi / 4.0 * v * v


def expansion_thm1(beta: float, v: float, order: int = 3) -> float:
    """Partial sum of KL2(beta - v/2, beta) = v^2/(8b(1-b)) - (2b-1) v^3/(48 b^2 (1-b)^2) + O(v^4)."""
    if not 0.5 <= beta < 1.0:
        raise DomainError(f"beta must be in [1/2, 1), got {beta}")
    if order not in (2, 3):
        raise DomainError(f"order must be 2 or 3, got {order}")
    w = beta * (1.0 - beta)
    value = v * v / (8.0 * w)
    if order == 3:
        value -= (2.0 * beta - 1.0) * v ** 3 / (48.0 * w * w)
    return value
