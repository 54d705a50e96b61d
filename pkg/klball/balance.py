"""
Balance coefficient of a discrete distribution.

beta = min{ Q(A) : Q(A) >= 1/2 } over all subsets A. It is a subset-sum problem, so the exact
value is found by enumerating the 2^k subset masses (k <= k_max). For larger supports the greedy
bound is available: sort atoms by weight, fill a set while it stays below 1/2, and at the first
atom w that would cross 1/2 take the lighter of A + {w} and the complement of A. That bound never
exceeds 1/2 + q_max/2.

Meet-in-the-middle over two halves of the atoms would raise the exact limit to about 40 atoms;
plain enumeration is used here.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .config import get_settings
from .distributions import DiscreteDistribution, as_distribution
from .errors import CapacityError, DomainError
from .utils import canonical_subset, complement, subset_masses

logger = logging.getLogger(__name__)

HALF_TOL = 1e-12


class BalanceMethod(enum.Enum):
    EXACT = "exact"
    GREEDY_BOUND = "greedy_bound"


@dataclass(frozen=True)
class BalanceReport:
    """beta with its certificate.

    For EXACT, `beta` is the balance coefficient and `achieving_subset` a set of that mass.
    For GREEDY_BOUND, `beta` equals `upper_bound`, a valid upper bound on the coefficient,
    and `achieving_subset` is the witness set with that mass.
    `phi` is None when beta = 1 and for greedy reports.
    """

    beta: float
    method: BalanceMethod
    achieving_subset: Tuple[int, ...]
    upper_bound: float
    qmax_bound: float
    phi: Optional[float]

    @property
    def is_balanced(self) -> bool:
        return self.method is BalanceMethod.EXACT and self.beta == 0.5

    def as_dict(self) -> dict:
        return {
            "beta": self.beta,
            "method": self.method.value,
            "achieving_subset": list(self.achieving_subset),
            "upper_bound": self.upper_bound,
            "qmax_bound": self.qmax_bound,
            "phi": self.phi,
            "balanced": self.is_balanced,
        }


def phi_coefficient(beta: float) -> float:
    """phi = ln(beta/(1-beta)) / (2 beta - 1), with phi(1/2) = 2.

    Written as 2*atanh(x)/x with x = 2*beta - 1, which is smooth through x = 0.
    """
    if not 0.5 <= beta < 1.0:
        raise DomainError(f"phi needs 1/2 <= beta < 1, got {beta}")
    x = 2.0 * beta - 1.0
    if x < 1e-4:
        return 2.0 * (1.0 + x * x / 3.0 + x ** 4 / 5.0)
    return 2.0 * math.atanh(x) / x


def _qmax_bound(Q: DiscreteDistribution) -> float:
    return 0.5 + Q.q_max / 2.0


def _phi_or_none(beta: float) -> Optional[float]:
    return phi_coefficient(beta) if beta < 1.0 else None


def balance_exact(Q, k_max: Optional[int] = None) -> BalanceReport:
    """Exact balance coefficient by enumerating all subset masses."""
    Q = as_distribution(Q)
    k_max = get_settings().k_max if k_max is None else k_max
    k = Q.size
    if k > k_max:
        raise CapacityError(
            f"support size {k} exceeds k_max={k_max} for exact balance; use balance_greedy"
        )
    logger.debug("balance_exact: enumerating 2^%d subset masses", k)
    masses = subset_masses(Q.weights)
    eligible = masses >= 0.5 - HALF_TOL
    best = float(masses[eligible].min())
    masks = np.flatnonzero(eligible & (np.abs(masses - best) <= HALF_TOL))
    subset = canonical_subset(masks, k)
    beta = 0.5 if abs(best - 0.5) <= HALF_TOL else min(best, 1.0)
    return BalanceReport(
        beta=beta,
        method=BalanceMethod.EXACT,
        achieving_subset=subset,
        upper_bound=beta,
        qmax_bound=_qmax_bound(Q),
        phi=_phi_or_none(beta),
    )


def balance_greedy(Q) -> BalanceReport:
    """Greedy upper bound on the balance coefficient, valid for any support size."""
    Q = as_distribution(Q)
    k = Q.size
    # heaviest first, ties by index
    order = sorted(range(k), key=lambda i: (-Q.weights[i], i))
    heaviest = order[0]
    if Q.q_max >= 0.5:
        bound, witness = Q.q_max, (heaviest,)
    else:
        chosen = []
        mass = 0.0
        for i in order:
            if mass + Q.weights[i] < 0.5 - HALF_TOL:
                chosen.append(i)
                mass += Q.weights[i]
                continue
            with_atom = Q.mass(chosen + [i])
            rest = Q.mass(complement(chosen, k))
            if with_atom <= rest:
                bound, witness = with_atom, tuple(sorted(chosen + [i]))
            else:
                bound, witness = rest, complement(chosen, k)
            break
        else:
            # unreachable for weights summing to 1
            bound, witness = 1.0, tuple(range(k))
    if abs(bound - 0.5) <= HALF_TOL:
        bound = 0.5
    bound = min(bound, 1.0)
    return BalanceReport(
        beta=bound,
        method=BalanceMethod.GREEDY_BOUND,
        achieving_subset=witness,
        upper_bound=bound,
        qmax_bound=_qmax_bound(Q),
        phi=None,
    )


def balance(Q, k_max: Optional[int] = None) -> BalanceReport:
    """Exact report when the support is small enough, greedy bound otherwise."""
    Q = as_distribution(Q)
    k_max = get_settings().k_max if k_max is None else k_max
    if Q.size <= k_max:
        return balance_exact(Q, k_max)
    logger.warning("support size %d > k_max=%d: reporting the greedy bound on beta", Q.size, k_max)
    return balance_greedy(Q)


def consistency_gap(beta: float) -> float:
    """1/(8 beta (1-beta)) - phi(beta)/4, which is >= 0 on [1/2, 1)."""
    return 1.0 / (8.0 * beta * (1.0 - beta)) - phi_coefficient(beta) / 4.0
