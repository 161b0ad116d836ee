"""Bounded (transformed-l1) and lp vector norms with their component operators.

The transformed-l1 norm sums rho_a over the entries, where

    rho_a(t) = (a + 1) |t| / (a + |t|),

a bounded, Lipschitz component operator with asymptote a + 1.  Small a
makes the sum behave like a nonzero count, large a like the l1 norm.
The lp machinery (0 < p <= 1) is kept alongside for the baseline
objectives.
"""

import numpy as np

from .errors import ConfigError, DataError


def check_shape_param(a) -> float:
    """Validate the positive shape parameter of rho_a."""
    try:
        a = float(a)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"shape parameter a must be a number, got {a!r}") from exc
    if not np.isfinite(a) or a <= 0.0:
        raise ConfigError(f"shape parameter a must be positive and finite, got {a}")
    return a


def check_p_exponent(p) -> float:
    """Validate the lp exponent; only 0 < p <= 1 is supported."""
    try:
        p = float(p)
    except (TypeError, ValueError) as exc:
        raise ConfigError("p must be in (0,1]") from exc
    if not np.isfinite(p) or not 0.0 < p <= 1.0:
        raise ConfigError("p must be in (0,1]")
    return p


def rho_a(t, a):
    """Component operator (a+1)|t| / (a+|t|), elementwise.

    Evaluated as (a+1) / (1 + a/|t|), which cannot overflow for any
    finite input.  Increases from 0 at t=0 toward the asymptote a+1.
    """
    a = check_shape_param(a)
    t_abs = np.abs(np.asarray(t, dtype=np.float64))
    if not np.all(np.isfinite(t_abs)):
        raise DataError("rho_a requires finite input")
    # t = 0 divides to inf and denormal t can overflow a/|t|; both give
    # the correct limit out = 0, so silence those two flags only
    with np.errstate(divide="ignore", over="ignore"):
        out = (a + 1.0) / (1.0 + a / t_abs)
    return np.where(t_abs > 0.0, out, 0.0)


def tl1_norm(x, a) -> float:
    """Sum of rho_a over the entries of x.

    Nonnegative, zero iff x = 0, bounded above by len(x) * (a+1).  Not
    absolutely homogeneous, so not a norm in the strict sense.
    """
    return float(np.sum(rho_a(x, a)))


def lp_norm(x, p) -> float:
    """(sum_i |x_i|^p)^(1/p) for 0 < p <= 1."""
    p = check_p_exponent(p)
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise DataError("lp_norm requires finite input")
    return float(np.sum(np.abs(x) ** p) ** (1.0 / p))


def lp_dispersion(x, p) -> float:
    """sum_i |x_i|^p, the root-free form used as a maximization objective."""
    p = check_p_exponent(p)
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise DataError("lp_dispersion requires finite input")
    return float(np.sum(np.abs(x) ** p))
