"""
Deviation of the empirical distribution: J_n = V(Q, Q_n) for n i.i.d. draws from Q.

Sanov's theorem gives Pr(J_n >= eps) = exp(-n D*(eps, Q) + o(n)). This module estimates the tail
by Monte Carlo, computes it exactly for binary Q, and evaluates the McDiarmid bound and the
E J_n envelope Lambda_n.

Monte Carlo trial i belongs to stream i // TRIALS_PER_STREAM, and stream b is a generator seeded with
SeedSequence(seed, spawn_key=(b,)). The samples depend only on (seed, trials), never on how many
worker threads run the streams.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .binary import BinaryDistribution
from .config import get_settings
from .distributions import DiscreteDistribution, ExtendedReal, as_distribution
from .errors import CapacityError, DomainError, InputError

logger = logging.getLogger(__name__)

# J_n >= eps is tested as J_n >= eps - TAIL_TOL
TAIL_TOL = 1e-12
Z_95 = 1.959963984540054
TRIALS_PER_STREAM = 4096


@dataclass(frozen=True)
class SimConfig:
    Q: DiscreteDistribution
    n: int
    epsilon: float
    trials: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "Q", as_distribution(self.Q))
        if self.n < 1:
            raise InputError(f"n must be >= 1, got {self.n}")
        if self.trials < 1:
            raise InputError(f"trials must be >= 1, got {self.trials}")
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be > 0, got {self.epsilon}")
        if not 0 <= self.seed < 2 ** 64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class SanovEstimate:
    """Monte Carlo summary; probabilities carry a 95% normal-approximation half-width."""

    p_hat_ge_eps: float
    p_hat_centered: float
    rate_estimate: ExtendedReal
    e_jn_hat: float
    e_jn_stderr: float
    ci_halfwidth: float
    ci_halfwidth_centered: float
    insufficient_trials: bool
    n: int
    epsilon: float
    trials: int

    def as_dict(self) -> dict:
        return asdict(self)


def _jn_from_counts(counts: np.ndarray, n: int, q: np.ndarray) -> np.ndarray:
    return np.abs(counts / n - q).sum(axis=-1)


def sample_jn(Q, n: int, stream: np.random.Generator) -> float:
    """One draw of J_n = V(Q, empirical distribution of n samples)."""
    Q = as_distribution(Q)
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    q = Q.array
    counts = stream.multinomial(n, q)
    return float(_jn_from_counts(counts, n, q))


def block_stream(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def _sample_block(q: np.ndarray, n: int, seed: int, block: int, size: int) -> np.ndarray:
    counts = block_stream(seed, block).multinomial(n, q, size=size)
    return _jn_from_counts(counts, n, q)


def simulate_jn(config: SimConfig, workers: Optional[int] = None) -> np.ndarray:
    """All `trials` samples of J_n, in a fixed order independent of `workers`."""
    workers = get_settings().workers if workers is None else workers
    if workers < 1:
        raise InputError(f"workers must be >= 1, got {workers}")
    q = config.Q.array
    sizes = [
        min(TRIALS_PER_STREAM, config.trials - start) for start in range(0, config.trials, TRIALS_PER_STREAM)
    ]
    logger.debug("simulating %d trials in %d streams on %d workers", config.trials, len(sizes), workers)
    with ThreadPoolExecutor(max_workers=min(workers, len(sizes))) as executor:
        blocks = list(
            executor.map(lambda b: _sample_block(q, config.n, config.seed, b, sizes[b]), range(len(sizes)))
        )
    return np.concatenate(blocks)


def _ci(p: float, trials: int) -> float:
    return Z_95 * math.sqrt(p * (1.0 - p) / trials)


def monte_carlo(config: SimConfig, workers: Optional[int] = None) -> SanovEstimate:
    """Monte Carlo estimates of Pr(J_n >= eps), Pr(|J_n - E J_n| > eps) and the rate."""
    jn = simulate_jn(config, workers)
    trials = config.trials
    mean = math.fsum(jn) / trials
    stderr = float(np.std(jn, ddof=1)) / math.sqrt(trials) if trials > 1 else 0.0
    hits = int(np.count_nonzero(jn >= config.epsilon - TAIL_TOL))
    centered_hits = int(np.count_nonzero(np.abs(jn - mean) > config.epsilon))
    p_hat = hits / trials
    p_centered = centered_hits / trials
    insufficient = hits == 0
    if insufficient:
        logger.warning(
            "no trial reached J_n >= %g in %d trials; rate reported as inf", config.epsilon, trials
        )
        rate = math.inf
    else:
        rate = max(0.0, -math.log(p_hat) / config.n)
    return SanovEstimate(
        p_hat_ge_eps=p_hat,
        p_hat_centered=p_centered,
        rate_estimate=rate,
        e_jn_hat=mean,
        e_jn_stderr=stderr,
        ci_halfwidth=_ci(p_hat, trials),
        ci_halfwidth_centered=_ci(p_centered, trials),
        insufficient_trials=insufficient,
        n=config.n,
        epsilon=config.epsilon,
        trials=trials,
    )


def _binary_tail_counts(Q: BinaryDistribution, n: int, epsilon: float) -> np.ndarray:
    k = np.arange(n + 1)
    return k[np.abs(k / n - Q.q0) >= epsilon / 2.0 - TAIL_TOL]


def log_binary_tail_exact(Q: BinaryDistribution, n: int, epsilon: float) -> float:
    """ln Pr(J_n >= eps) for binary Q, i.e. ln Pr(|count/n - q0| >= eps/2)."""
    if not 0.0 < Q.q0 < 1.0:
        raise DomainError(f"need 0 < q0 < 1, got {Q.q0}")
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if epsilon <= 0:
        return 0.0
    k = _binary_tail_counts(Q, n, epsilon)
    if k.size == 0:
        return -math.inf
    log_pmf = (
        gammaln(n + 1)
        - gammaln(k + 1)
        - gammaln(n - k + 1)
        + k * math.log(Q.q0)
        + (n - k) * math.log1p(-Q.q0)
    )
    return min(0.0, float(logsumexp(log_pmf)))


def binary_tail_exact(Q: BinaryDistribution, n: int, epsilon: float) -> float:
    """Pr(J_n >= eps) for binary Q by summing binomial probabilities in log space."""
    return math.exp(log_binary_tail_exact(Q, n, epsilon))


def binary_tail_rate(Q: BinaryDistribution, n: int, epsilon: float) -> ExtendedReal:
    """-(1/n) ln Pr(J_n >= eps)."""
    return -log_binary_tail_exact(Q, n, epsilon) / n


def mcdiarmid_bound(n: int, epsilon: float) -> float:
    """Pr(|J_n - E J_n| > eps) <= 2 exp(-n eps^2 / 2), capped at 1."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    return min(1.0, 2.0 * math.exp(-n * epsilon * epsilon / 2.0))


@dataclass(frozen=True)
class LambdaEnvelope:
    """Lambda_n and the bounds on E J_n derived from it.

    lower <= E J_n <= lam (n >= 2), E J_n <= upper_sum_sqrt, and E J_n <= upper_sqrt_k.
    """

    lam: float
    lower: Optional[float]
    upper_sqrt_k: float
    upper_sum_sqrt: float

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "lower": self.lower,
            "upper_sqrt_k": self.upper_sqrt_k,
            "upper_sum_sqrt": self.upper_sum_sqrt,
        }


def lambda_n(Q, n: int, envelope: bool = True) -> LambdaEnvelope:
    """Lambda_n(Q) = n^-1/2 * sum_{q_j >= 1/n} sqrt(q_j) + 2 * sum_{q_j < 1/n} q_j."""
    Q = as_distribution(Q)
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if envelope and n < 2:
        raise DomainError("the E J_n envelope needs n >= 2")
    q = Q.array
    heavy = q * n >= 1.0
    root_n = math.sqrt(n)
    lam = math.fsum(np.sqrt(q[heavy])) / root_n + 2.0 * math.fsum(q[~heavy])
    lower = (lam - 1.0 / root_n) / 4.0 if n >= 2 else None
    return LambdaEnvelope(
        lam=lam,
        lower=lower,
        upper_sqrt_k=math.sqrt(Q.support_size / n),
        upper_sum_sqrt=math.fsum(np.sqrt(q)) / root_n,
    )


def sanov_report(config: SimConfig, workers: Optional[int] = None) -> dict:
    """Monte Carlo estimate together with the reference quantities it is compared against."""
    from .dstar import dstar

    estimate = monte_carlo(config, workers)
    report = {"config": {"Q": list(config.Q.weights), "n": config.n, "epsilon": config.epsilon,
                         "trials": config.trials, "seed": config.seed},
              "estimate": estimate.as_dict()}
    if config.epsilon < 2.0:
        try:
            reference = dstar(config.Q, config.epsilon)
            report["dstar"] = reference.as_dict()
        except CapacityError as e:
            logger.warning("no D* reference: %s", e)
            report["dstar"] = None
    else:
        report["dstar"] = None
    report["mcdiarmid_bound"] = mcdiarmid_bound(config.n, config.epsilon)
    report["mcdiarmid_exponent"] = config.epsilon ** 2 / 2.0
    report["lambda_n"] = lambda_n(config.Q, config.n, envelope=config.n >= 2).as_dict()
    if config.Q.size == 2 and 0.0 < config.Q.weights[0] < 1.0:
        report["binary_tail_exact"] = binary_tail_exact(BinaryDistribution(config.Q.weights[0]), config.n, config.epsilon)
    return report


def rate_sequence(Q: BinaryDistribution, ns: List[int], epsilon: float) -> List[float]:
    return [binary_tail_rate(Q, n, epsilon) for n in ns]
