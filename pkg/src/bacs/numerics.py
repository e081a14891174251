"""Special functions, distributions and root finding.

Normal and incomplete-beta primitives delegate to ``scipy.special`` (Cephes
implementations with ~1e-15 relative accuracy). Binomial masses are computed
in log space from ``gammaln`` so that large ``n`` never overflows.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special

from .errors import ConvergenceError, DomainError, NoSignChangeError

__all__ = [
    "check_probability",
    "normal_cdf",
    "normal_sf",
    "normal_pdf",
    "normal_quantile",
    "binomial_logpmf",
    "binomial_pmf",
    "binomial_cdf",
    "binomial_sf",
    "binomial_pmf_table",
    "beta_log_density",
    "beta_cdf",
    "beta_quantile",
    "find_root",
]


def check_probability(value, name="p", open_interval=False):
    """Validate that ``value`` is a probability and return it as float.

    Args:
        value: Candidate probability.
        name: Argument name used in the error message.
        open_interval: If True, require 0 < value < 1.

    Raises:
        DomainError: If the value is NaN or out of range.
    """
    v = float(value)
    if math.isnan(v):
        raise DomainError(f"{name} is NaN")
    if open_interval:
        if not 0.0 < v < 1.0:
            raise DomainError(f"{name}={v} must lie strictly inside (0, 1)")
    elif not 0.0 <= v <= 1.0:
        raise DomainError(f"{name}={v} must lie in [0, 1]")
    return v


def normal_cdf(x):
    """Standard normal CDF.

    Accepts scalars or arrays. Absolute error is below 1e-15 everywhere.
    """
    out = special.ndtr(x)
    return float(out) if np.ndim(out) == 0 else out


def normal_sf(x):
    """Standard normal upper tail, 1 - Phi(x), without cancellation."""
    out = special.ndtr(-np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def normal_pdf(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return float(out) if out.ndim == 0 else out


def normal_quantile(p: float) -> float:
    """Inverse of the standard normal CDF.

    Raises:
        DomainError: If ``p`` is not strictly inside (0, 1).
    """
    p = check_probability(p, "p", open_interval=True)
    return float(special.ndtri(p))


def _check_binomial(k, n, p):
    if n < 0 or int(n) != n:
        raise DomainError(f"n={n} must be a nonnegative integer")
    check_probability(p, "p")
    k = np.asarray(k)
    if np.any(k < 0) or np.any(k > n):
        raise DomainError(f"k must satisfy 0 <= k <= n={n}")
    return k


def binomial_logpmf(k, n: int, p: float):
    """Log binomial mass ``log P(X = k)`` for ``X ~ Bin(n, p)``.

    Degenerate ``p`` in {0, 1} returns 0 or -inf as appropriate.
    """
    k = _check_binomial(k, n, p).astype(float)
    logc = special.gammaln(n + 1.0) - special.gammaln(k + 1.0) - special.gammaln(n - k + 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = logc + special.xlogy(k, p) + special.xlog1py(n - k, -p)
    return float(out) if out.ndim == 0 else out


def binomial_pmf(k, n: int, p: float):
    """Binomial mass ``P(X = k)``.

    Examples:
        >>> binomial_pmf(0, 5, 0.0)
        1.0
    """
    out = np.exp(binomial_logpmf(k, n, p))
    return float(out) if np.ndim(out) == 0 else out


def binomial_pmf_table(n: int, p: float) -> np.ndarray:
    """All masses ``P(X = k)`` for ``k = 0..n`` as an array of length ``n+1``."""
    return np.asarray(binomial_pmf(np.arange(n + 1), n, p), dtype=float).reshape(n + 1)


def binomial_cdf(k: int, n: int, p: float) -> float:
    """``P(X <= k)``; ``k`` may be -1 (returns 0)."""
    if k < 0:
        _check_binomial(0, n, p)
        return 0.0
    _check_binomial(k, n, p)
    if k == n:
        return 1.0
    return float(min(1.0, np.sum(binomial_pmf_table(n, p)[: k + 1])))


def binomial_sf(k: int, n: int, p: float) -> float:
    """``P(X >= k)``; ``k`` may be ``n + 1`` (returns 0) or 0 (returns 1)."""
    if k <= 0:
        return 1.0
    if k > n:
        _check_binomial(0, n, p)
        return 0.0
    _check_binomial(k, n, p)
    return float(min(1.0, np.sum(binomial_pmf_table(n, p)[k:])))


def beta_log_density(x: float, a: float, b: float) -> float:
    """Log of the normalized Beta(a, b) density at ``x``.

    Endpoints are allowed only where the density has a finite limit
    (``a >= 1`` at 0, ``b >= 1`` at 1).

    Raises:
        DomainError: For invalid shape parameters or an unbounded endpoint.
    """
    if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"shape parameters must be positive, got a={a}, b={b}")
    x = check_probability(x, "x")
    if (x == 0.0 and a < 1) or (x == 1.0 and b < 1):
        raise DomainError(f"Beta({a}, {b}) density is unbounded at x={x}")
    return float(special.xlogy(a - 1.0, x) + special.xlog1py(b - 1.0, -x) - special.betaln(a, b))


def beta_cdf(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta ``I_x(a, b)``."""
    return float(special.betainc(a, b, check_probability(x, "x")))


def beta_quantile(p: float, a: float, b: float, tol: float = 1e-13) -> float:
    """Quantile of Beta(a, b) by bracketing root search on the incomplete beta.

    Args:
        p: Probability in (0, 1).
        a: First shape parameter.
        b: Second shape parameter.
        tol: Absolute tolerance on ``x``.
    """
    p = check_probability(p, "p", open_interval=True)
    if not (a > 0 and b > 0):
        raise DomainError(f"shape parameters must be positive, got a={a}, b={b}")
    return find_root(lambda x: special.betainc(a, b, x) - p, (0.0, 1.0), tol=tol)


def find_root(
    f: Callable[[float], float],
    bracket: Sequence[float],
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Find a root of ``f`` inside ``bracket`` with Brent's bracketing method.

    Brent's method keeps the root bracketed at every step, falling back to
    bisection when interpolation stalls, so it is deterministic and never
    escapes the interval.

    Args:
        f: Continuous scalar function.
        bracket: ``(lo, hi)`` with ``lo < hi`` and a sign change of ``f``.
        tol: Absolute tolerance on the root location.
        max_iter: Iteration cap.

    Returns:
        The root location.

    Raises:
        DomainError: If ``lo >= hi``.
        NoSignChangeError: If ``f(lo)`` and ``f(hi)`` share a sign.
        ConvergenceError: If the iteration cap is hit; carries the count.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise DomainError(f"bracket must satisfy lo < hi, got ({lo}, {hi})")
    flo, fhi = float(f(lo)), float(f(hi))
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.isnan(flo) or math.isnan(fhi) or (flo > 0) == (fhi > 0):
        raise NoSignChangeError(f"no sign change on [{lo}, {hi}]: f={flo:.3g}, {fhi:.3g}")
    root, info = optimize.brentq(
        f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=max_iter,
        full_output=True, disp=False,
    )
    if not info.converged:
        raise ConvergenceError(
            f"root search did not converge after {info.iterations} iterations",
            iterations=info.iterations,
            residual=float(f(root)),
        )
    return float(root)
