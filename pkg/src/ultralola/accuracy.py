"""Deadline bookkeeping and analytical end-to-end sensing accuracy.

Two sensing scenarios share one deadline ``T``:

* multi-snapshot (MS): one sensor takes K snapshots of ``sensing_time_s``
  each, fuses them, and sends one packet of D channel uses;
* multi-view (MV): K sensors sense once in parallel and send their packets in
  K TDMA slots of D channel uses each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import LN2, LinkConfig, q_argument, success_prob
from .errors import DomainViolation, InfeasibleDeadline
from .gmm import accuracy_lower_bound
from .numerics import floor_tol, log_sigmoid, q_function, safe_exp, sigmoid

# slack allowed when checking a real packet length against an integer bound
_DOMAIN_SLACK = 1e-9


@dataclass(frozen=True)
class ScenarioConfig:
    deadline_s: float
    sensing_time_s: float
    link: LinkConfig
    num_classes: int
    g_min: float
    eta: float = 1.7

    def __post_init__(self):
        if not self.sensing_time_s > 0:
            raise ValueError("sensing_time_s must be positive")
        if not self.deadline_s > self.sensing_time_s:
            raise ValueError("deadline_s must exceed sensing_time_s")
        if int(self.num_classes) < 2:
            raise ValueError("num_classes must be >= 2")
        if not self.g_min > 0:
            raise ValueError("g_min must be positive")
        if not self.eta > 0:
            raise ValueError("eta must be positive")

    @property
    def G(self) -> float:
        """Per-view separation sqrt(g_min) / 2."""
        return 0.5 * math.sqrt(self.g_min)

    @property
    def L(self) -> int:
        return int(self.num_classes)


class Surrogate(NamedTuple):
    nu: float
    psi: float


# ---------------------------------------------------------------- deadlines

def k_ms(cfg: ScenarioConfig, packet_len: float) -> int:
    """Snapshots that fit before the deadline when the packet takes D/B_W seconds."""
    T, dS, B = cfg.deadline_s, cfg.sensing_time_s, cfg.link.bandwidth_hz
    return max(0, floor_tol(T / dS - packet_len / (B * dS)))


def k_mv(cfg: ScenarioConfig, packet_len: float) -> int:
    """TDMA slots of D channel uses that fit after one sensing period."""
    if packet_len <= 0:
        raise ValueError("packet_len must be positive")
    T, dS, B = cfg.deadline_s, cfg.sensing_time_s, cfg.link.bandwidth_hz
    return max(0, floor_tol((T - dS) * B / packet_len))


def max_packet_len(cfg: ScenarioConfig) -> int:
    """Longest packet that fits in the deadline with no sensing at all."""
    return floor_tol(cfg.deadline_s * cfg.link.bandwidth_hz)


def d_max_ms_raw(cfg: ScenarioConfig) -> int:
    """Largest D keeping the sigmoid-approximated accuracy above random guessing."""
    slack = cfg.sensing_time_s * math.log(cfg.L - 1) ** 2 / (cfg.G ** 2 * cfg.eta ** 2)
    return floor_tol((cfg.deadline_s - slack) * cfg.link.bandwidth_hz)


def d_max_ms(cfg: ScenarioConfig) -> int:
    """Upper end of the MS search range, also guaranteeing at least one snapshot."""
    one_snapshot = floor_tol((cfg.deadline_s - cfg.sensing_time_s) * cfg.link.bandwidth_hz)
    d = min(d_max_ms_raw(cfg), one_snapshot)
    if d < 1:
        raise InfeasibleDeadline(f"no packet length leaves room for a snapshot (D_max={d})")
    return d


def d_max_mv(cfg: ScenarioConfig) -> int:
    """Longest packet that still leaves one TDMA slot after sensing."""
    d = floor_tol((cfg.deadline_s - cfg.sensing_time_s) * cfg.link.bandwidth_hz)
    if d < 1:
        raise InfeasibleDeadline(f"(T - dS) * B_W = {d} < 1 channel use")
    return d


# ------------------------------------------------------- exact expressions

def e2e_ms_lower_bound(cfg: ScenarioConfig, packet_len: int) -> float:
    """Lower bound on MS sensing accuracy at integer packet length D.

    Correct decoding happens with probability rho and yields the clamped
    K-snapshot classification bound; otherwise the server guesses.
    """
    L = cfg.L
    rho = success_prob(cfg.link, packet_len)
    A = accuracy_lower_bound(L, cfg.g_min, k_ms(cfg, packet_len))
    return rho * A + (1.0 - rho) / L


def binomial_pmf(n: int, p: float) -> np.ndarray:
    """Binomial(n, p) probabilities for k = 0..n, via log-space coefficients."""
    if n < 0 or not 0.0 <= p <= 1.0:
        raise ValueError("need n >= 0 and p in [0, 1]")
    k = np.arange(n + 1)
    if p == 0.0 or p == 1.0:
        out = np.zeros(n + 1)
        out[0 if p == 0.0 else n] = 1.0
        return out
    lgam = np.array([math.lgamma(i + 1) for i in range(n + 1)])
    log_coef = lgam[n] - lgam - lgam[::-1]
    logp = log_coef + k * math.log(p) + (n - k) * math.log1p(-p)
    return np.exp(logp)


def mv_bound_from_rho(L: int, g_min: float, K: int, rho: float) -> float:
    """Binomial expectation of the clamped classification bound over received views."""
    pmf = binomial_pmf(K, rho)
    acc = np.array([accuracy_lower_bound(L, g_min, k) for k in range(K + 1)])
    return float(np.dot(pmf, acc))


def e2e_mv_exact_bound(cfg: ScenarioConfig, packet_len: int) -> float:
    return mv_bound_from_rho(cfg.L, cfg.g_min, k_mv(cfg, packet_len), success_prob(cfg.link, packet_len))


def mv_taylor_from_rho(L: int, G: float, K: int, rho: float) -> float:
    """Unclamped first-order approximation around the mean received views."""
    return (L - 1) * q_function(-G * math.sqrt(K * rho)) - (L - 2)


def e2e_mv_taylor(cfg: ScenarioConfig, packet_len: int) -> float:
    return mv_taylor_from_rho(cfg.L, cfg.G, k_mv(cfg, packet_len), success_prob(cfg.link, packet_len))


# ------------------------------------------------ continuous surrogates

def psi_I(cfg: ScenarioConfig, packet_len: float) -> float:
    T, dS, B = cfg.deadline_s, cfg.sensing_time_s, cfg.link.bandwidth_hz
    inner = T / dS - packet_len / (dS * B)
    if inner < 0:
        raise DomainViolation(f"D={packet_len} leaves negative sensing time")
    return cfg.G * cfg.eta * math.sqrt(inner)


def psi_T(cfg: ScenarioConfig, packet_len: float) -> float:
    return cfg.eta * q_argument(cfg.link, packet_len)


def psi_T_prime(cfg: ScenarioConfig, packet_len: float) -> float:
    D = float(packet_len)
    link = cfg.link
    return LN2 * cfg.eta / (2.0 * math.sqrt(D * link.dispersion)) * (link.capacity + link.payload_bits / D)


def _check_domain(packet_len: float, hi: int) -> None:
    if not 1.0 - _DOMAIN_SLACK <= packet_len <= hi + _DOMAIN_SLACK:
        raise DomainViolation(f"D={packet_len} outside [1, {hi}]")


def log_nu_ms(cfg: ScenarioConfig, packet_len: float, check: bool = True) -> float:
    """ln of the MS surrogate; -inf where the sensing factor is not positive."""
    if check:
        _check_domain(packet_len, d_max_ms(cfg))
    L = cfg.L
    pi = psi_I(cfg, packet_len)
    # sigma(pi) - (L-1)/L == sigma(pi) * (1 - (L-1) e^{-pi}) / L
    head = -math.expm1(math.log(L - 1) - pi)
    if head <= 0:
        return -math.inf
    return math.log(head) + log_sigmoid(pi) - math.log(L) + log_sigmoid(psi_T(cfg, packet_len))


def nu_ms(cfg: ScenarioConfig, packet_len: float, check: bool = True) -> float:
    lv = log_nu_ms(cfg, packet_len, check)
    return math.exp(lv) if lv > -math.inf else 0.0


def surrogate_ms(cfg: ScenarioConfig, packet_len: float) -> Surrogate:
    """Sigmoid-smoothed, continuously relaxed MS accuracy on [1, D_max]."""
    nu = nu_ms(cfg, packet_len)
    return Surrogate(nu, cfg.link.activation_prob * (cfg.L - 1) * nu + 1.0 / cfg.L)


def nu_mv(cfg: ScenarioConfig, packet_len: float, check: bool = True) -> float:
    """Relaxed expected number of views received before the deadline."""
    if check:
        _check_domain(packet_len, d_max_mv(cfg))
    slots = (cfg.deadline_s - cfg.sensing_time_s) * cfg.link.bandwidth_hz / packet_len
    return slots * cfg.link.activation_prob * sigmoid(psi_T(cfg, packet_len))


def surrogate_mv(cfg: ScenarioConfig, packet_len: float) -> Surrogate:
    nu = nu_mv(cfg, packet_len)
    return Surrogate(nu, mv_taylor_from_rho(cfg.L, cfg.G, 1, nu))


def mv_sign_function(cfg: ScenarioConfig, packet_len: float) -> float:
    """-(1 + e^{psi_T}) + D psi_T'(D): same sign as the slope of the MV surrogate."""
    return -(1.0 + safe_exp(psi_T(cfg, packet_len))) + packet_len * psi_T_prime(cfg, packet_len)
