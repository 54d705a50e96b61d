"""
Vajda's tight lower bound L(v) = inf { D(P||Q) : V(P,Q) = v }.

Two independent evaluations are provided:

- the parametric curve, t > 0:
      v(t) = t * (1 - (coth t - 1/t)^2)
      L(t) = ln(t / sinh t) + t coth t - (t / sinh t)^2
  inverted by bisection in t;
- the one-dimensional identity L(v) = inf_{0 < x < 1 - v/2} KL2(x + v/2, x),
  minimized on a grid and refined with a bounded golden-section search.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import optimize, special

from .binary import kl2
from .errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

SERIES_SWITCH = 1e-3
MAX_BISECTIONS = 200
CLAMP = 1e-12

# above this t, sinh/cosh are replaced by their exponential forms
_LARGE_T = 20.0
_ODD_TERMS = 11


@dataclass(frozen=True)
class VajdaPoint:
    t: float
    v: float
    L: float


def _v_of_t(t: float) -> float:
    if t < SERIES_SWITCH:
        # coth t - 1/t = t/3 - t^3/45 + 2 t^5/945 - ...
        c = t / 3.0 - t ** 3 / 45.0 + 2.0 * t ** 5 / 945.0
        return t * (1.0 - c * c)
    if t <= _LARGE_T:
        # coth t - 1/t = (t cosh t - sinh t) / (t sinh t)
        a, b = _sinh_parts(t)
        c = b / (t * (t + a))
        return t * (1.0 - c) * (1.0 + c)
    # 1 - c = 1/t - (coth t - 1) and coth t - 1 = 2 / expm1(2t)
    with np.errstate(over="ignore"):
        one_minus_c = 1.0 / t - 2.0 / np.expm1(2.0 * t)
    c = 1.0 - one_minus_c
    return float(t * one_minus_c * (1.0 + c))


def _sinh_parts(t: float) -> Tuple[float, float]:
    """(sinh t - t, t cosh t - sinh t), summed as odd power series for t < 1."""
    if t < 1.0:
        k = np.arange(1, _ODD_TERMS + 1)
        terms = t ** (2 * k + 1) / special.factorial(2 * k + 1)
        return math.fsum(terms), math.fsum(2 * k * terms)
    return math.sinh(t) - t, t * math.cosh(t) - math.sinh(t)


def _L_of_t(t: float) -> float:
    if t < SERIES_SWITCH:
        t2 = t * t
        return t2 / 2.0 - t2 * t2 / 12.0 + t2 ** 3 / 81.0
    if t <= _LARGE_T:
        # with r = t/sinh t and c = t coth t: L = ln r + (c - 1) + (1 - r)(1 + r)
        a, b = _sinh_parts(t)
        sh = t + a
        return -math.log1p(a / t) + b / sh + (a / sh) * (1.0 + t / sh)
    log_ratio = math.log(2.0 * t) - t - math.log1p(-math.exp(-2.0 * t))
    t_coth = t * (1.0 + 2.0 / math.expm1(min(2.0 * t, 700.0)))
    return log_ratio + t_coth - math.exp(2.0 * log_ratio)


def vajda_parametric(t: float) -> VajdaPoint:
    """Point (v(t), L(v(t))) of the parametric curve."""
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    return VajdaPoint(t=t, v=_v_of_t(t), L=max(0.0, _L_of_t(t)))


def _check_v(v: float) -> None:
    if not 0.0 < v < 2.0:
        raise DomainError(f"v must be in (0, 2), got {v}")


def vajda_t(v: float) -> float:
    """Curve parameter t with v(t) = v."""
    _check_v(v)
    lo, hi = v / 2.0, max(4.0, 2.0 / (2.0 - v))
    f = lambda t: _v_of_t(t) - v
    if not (f(lo) < 0.0 < f(hi)):
        raise ConvergenceError(f"failed to bracket t for v={v} in [{lo}, {hi}]")
    try:
        return optimize.bisect(
            f, lo, hi, xtol=1e-15 * min(1.0, v), rtol=4 * np.finfo(float).eps, maxiter=MAX_BISECTIONS
        )
    except RuntimeError as e:
        raise ConvergenceError(f"bisection for v={v} did not converge: {e}") from None


def vajda_L(v: float) -> float:
    """L(v) by inverting the parametric curve."""
    return vajda_parametric(vajda_t(v)).L


def vajda_argmin(v: float, grid_points: int = 10_000) -> Tuple[float, float]:
    """(x*, L(v)) minimizing KL2(x + v/2, x) over 0 < x < 1 - v/2."""
    _check_v(v)
    half = v / 2.0
    lo, hi = CLAMP, 1.0 - half - CLAMP
    g = lambda x: kl2(min(x + half, 1.0), x)
    xs = np.linspace(lo, hi, grid_points)
    values = kl2(np.minimum(xs + half, 1.0), xs)
    i = int(np.argmin(values))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, grid_points - 1)]
    res = optimize.minimize_scalar(g, bounds=(a, b), method="bounded", options={"xatol": 1e-13, "maxiter": 500})
    if res.fun <= values[i]:
        return float(res.x), float(res.fun)
    logger.debug("refinement did not improve on grid point for v=%g", v)
    return float(xs[i]), float(values[i])


def vajda_by_minimization(v: float, grid_points: int = 10_000) -> float:
    """L(v) from the one-dimensional minimization identity."""
    return vajda_argmin(v, grid_points)[1]


def vajda_series(v: float) -> float:
    """Small-v expansion L(v) = v^2/2 + v^4/36 + v^6/270 + O(v^8)."""
    return v * v / 2.0 + v ** 4 / 36.0 + v ** 6 / 270.0


def is_v_increasing(t_grid) -> bool:
    """True iff v(t) is strictly increasing along the ascending grid of t values."""
    ts = np.asarray(t_grid, dtype=np.float64)
    vs = np.array([_v_of_t(float(t)) for t in ts])
    return bool(np.all(np.diff(vs) > 0))
