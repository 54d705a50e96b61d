"""Minimum KL divergence outside a total variation ball, and the bounds around it."""

from .balance import BalanceMethod, BalanceReport, balance, balance_exact, balance_greedy, phi_coefficient
from .binary import BinaryDistribution, extremal_binary, kl2
from .config import Settings, get_settings, load_settings, set_settings
from .distributions import (
    DiscreteDistribution,
    kl_divergence,
    load_distribution,
    mix_toward,
    rescale_to_tv,
    total_variation,
)
from .dstar import (
    DStarMethod,
    DStarResult,
    binary_lift,
    dstar,
    dstar_bracket,
    dstar_enumerate,
    expansion_thm1,
    extremal_tilt,
    ow_lower,
    pinsker_lower,
)
from .errors import CapacityError, ConvergenceError, DomainError, InputError, KlballError
from .sanov import (
    SanovEstimate,
    SimConfig,
    binary_tail_exact,
    lambda_n,
    mcdiarmid_bound,
    monte_carlo,
    sample_jn,
)
from .vajda import vajda_by_minimization, vajda_L, vajda_parametric, vajda_t

__version__ = "0.1.0"
