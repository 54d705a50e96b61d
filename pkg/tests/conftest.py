import numpy as np
import pytest

from klball.config import Settings, set_settings
from klball.distributions import DiscreteDistribution


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """No user config file or KLBALL_* variables leak into a test."""
    monkeypatch.setenv("HOME", str(tmp_path))
    for name in ("K_MAX", "WORKERS", "DIGITS"):
        monkeypatch.delenv(f"KLBALL_{name}", raising=False)
    set_settings(Settings(k_max=24, workers=2, digits=12))
    yield
    set_settings(None)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_distribution(rng, k, alpha=1.0):
    weights = rng.dirichlet(np.full(k, alpha))
    return DiscreteDistribution.from_weights(weights, renormalize=True)


def random_subset(rng, k):
    """Non-empty proper subset of range(k), k >= 2."""
    size = int(rng.integers(1, k))
    return tuple(sorted(rng.choice(k, size=size, replace=False).tolist()))


def sample_class_p(rng, Q, A, v):
    """Random P with P >= Q on A, P <= Q off A, and P(A) - Q(A) = v/2, so V(P,Q) = v.

    Added mass is spread over A by Dirichlet proportions. Removed mass is a random mixture
    of proportional removal and greedy removal in a random atom order.
    """
    q = Q.array.copy()
    inside = np.zeros(Q.size, dtype=bool)
    inside[list(A)] = True
    half = v / 2.0
    p = q.copy()
    p[inside] += half * rng.dirichlet(np.ones(inside.sum()))

    outside = np.flatnonzero(~inside)
    rest = q[outside].sum()
    proportional = half * q[outside] / rest
    greedy = np.zeros(outside.size)
    need = half
    for j in rng.permutation(outside.size):
        take = min(q[outside][j], need)
        greedy[j] = take
        need -= take
    lam = rng.uniform()
    removal = lam * proportional + (1.0 - lam) * greedy
    p[outside] = np.maximum(q[outside] - removal, 0.0)
    return DiscreteDistribution.from_weights(p, renormalize=True)
