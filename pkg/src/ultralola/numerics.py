"""Scalar special functions and bracketing root search."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy.special import log_ndtr

from .errors import NoConvergence, NoSignChange

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    tol: float = 1e-9
    max_iter: int = 200

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x) = P(Z > x) for standard normal Z."""
    return 0.5 * math.erfc(x / _SQRT2)


def log_q_function(x: float) -> float:
    """Natural log of Q(x), accurate far into both tails."""
    return float(log_ndtr(-x))


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def log_sigmoid(x: float) -> float:
    # log(1/(1+e^-x)) without overflow for large |x|
    if x >= 0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


def q_sigmoid_approx(x: float, eta: float = 1.7) -> float:
    """Logistic approximation Q(x) ~ 1 - sigmoid(eta * x)."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    return sigmoid(-eta * x)


def safe_exp(x: float) -> float:
    """exp that returns inf instead of raising OverflowError."""
    if x > 709.0:
        return math.inf
    return math.exp(x)


def floor_tol(x: float, rtol: float = 1e-9) -> int:
    """Floor that forgives representation error just below an integer."""
    return math.floor(x + rtol * max(1.0, abs(x)))


def ceil_tol(x: float, rtol: float = 1e-9) -> int:
    return math.ceil(x - rtol * max(1.0, abs(x)))


def bisect(f: Callable[[float], float], bracket: RootBracket) -> float:
    """Find a sign change of ``f`` inside ``bracket`` by bisection.

    Returns the midpoint of the final interval, whose width is at most
    ``bracket.tol``. An exact zero at an evaluated point is returned as-is.
    """
    lo, hi = bracket.lo, bracket.hi
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.isnan(f_lo) or math.isnan(f_hi) or (f_lo > 0) == (f_hi > 0):
        raise NoSignChange(f"f({lo})={f_lo!r} and f({hi})={f_hi!r} share a sign")
    for _ in range(bracket.max_iter):
        if hi - lo <= bracket.tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # interval cannot shrink further in floating point
            return mid
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    if hi - lo <= bracket.tol:
        return 0.5 * (lo + hi)
    raise NoConvergence(f"bisection did not reach tol={bracket.tol} in {bracket.max_iter} steps")
