"""Packet-length selection: surrogate optimizers, exhaustive search, baselines."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

from . import accuracy as acc
from .accuracy import ScenarioConfig
from .channel import LN2, LinkConfig, decode_error_prob, success_prob
from .errors import InfeasibleDeadline, TargetUnreachable
from .numerics import RootBracket, bisect, ceil_tol, safe_exp


class Scenario(str, enum.Enum):
    MS = "ms"
    MV = "mv"


class Method(str, enum.Enum):
    ULTRALOLA_MS = "UltraLoLaMS"
    ULTRALOLA_MV = "UltraLoLaMV"
    BRUTE_FORCE = "BruteForce"
    URLLC = "URLLC"
    SHANNON = "ShannonRate"
    LOOKUP_TABLE = "LookupTable"


@dataclass(frozen=True)
class PacketPlan:
    packet_len: int
    num_views: int
    decode_error: float
    success_prob: float
    predicted_accuracy: float
    method: Method
    surrogate_value: float
    # diagnostics of the surrogate optimizers; None for the other methods
    continuous_optimum: Optional[float] = None
    closed_form_len: Optional[int] = None
    root_residual: Optional[float] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class AccuracyTable:
    """Trained accuracy per packet length, for models without a closed form."""

    entries: dict
    num_classes: int

    def __post_init__(self):
        if not self.entries:
            raise ValueError("accuracy table is empty")
        if self.num_classes < 2:
            raise ValueError("num_classes must be >= 2")
        clean = {}
        for k, v in self.entries.items():
            d, a = int(k), float(v)
            if d < 1 or not 0.0 <= a <= 1.0:
                raise ValueError(f"bad table entry {k}: {v}")
            clean[d] = a
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    def to_dict(self) -> dict:
        return {"num_classes": self.num_classes, "entries": {str(k): v for k, v in self.entries.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "AccuracyTable":
        return cls(entries=d["entries"], num_classes=int(d["num_classes"]))


def _clamp_accuracy(x: float, L: int) -> float:
    return min(1.0, max(1.0 / L, x))


def _search_hi(cfg: ScenarioConfig, scenario: Scenario) -> int:
    """Largest deadline-feasible packet length for the scenario."""
    if scenario is Scenario.MS:
        hi = acc.max_packet_len(cfg)
        if hi < 1:
            raise InfeasibleDeadline(f"T * B_W = {cfg.deadline_s * cfg.link.bandwidth_hz} < 1")
        return hi
    return acc.d_max_mv(cfg)


def _plan(cfg: ScenarioConfig, scenario: Scenario, D: int, method: Method, surrogate_value: float, **diag) -> PacketPlan:
    if scenario is Scenario.MS:
        views, predicted = acc.k_ms(cfg, D), acc.e2e_ms_lower_bound(cfg, D)
    else:
        views, predicted = acc.k_mv(cfg, D), acc.e2e_mv_exact_bound(cfg, D)
    predicted = diag.pop("predicted", predicted)
    return PacketPlan(
        packet_len=int(D),
        num_views=views,
        decode_error=decode_error_prob(cfg.link, D),
        success_prob=success_prob(cfg.link, D),
        predicted_accuracy=_clamp_accuracy(predicted, cfg.L),
        method=method,
        surrogate_value=surrogate_value,
        **diag,
    )


def round_by(objective: Callable[[float], float], x: float, lo: int, hi: int) -> int:
    """Pick floor or ceil of ``x`` (clamped to [lo, hi]) by the larger objective; ties to floor."""
    f = min(hi, max(lo, math.floor(x)))
    c = min(hi, max(lo, math.ceil(x)))
    if f == c:
        return f
    return f if objective(f) >= objective(c) else c


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------- multi-snapshot

def f_ms(cfg: ScenarioConfig, packet_len: float) -> float:
    """Sign function of the MS surrogate's slope (positive: still increasing)."""
    D = float(packet_len)
    link, L = cfg.link, cfg.L
    T, dS, B = cfg.deadline_s, cfg.sensing_time_s, link.bandwidth_hz
    c_ms = LN2 / cfg.G * math.sqrt(dS * B / link.dispersion)
    ratio = c_ms * math.sqrt(B * T / D - 1.0) * (link.capacity + link.payload_bits / D)
    pi = acc.psi_I(cfg, D)
    head = 1.0 / L - (L - 1) / L * math.exp(-pi)
    return ratio - (1.0 + safe_exp(acc.psi_T(cfg, D))) / ((1.0 + math.exp(pi)) * head)


def optimize_ms(cfg: ScenarioConfig) -> PacketPlan:
    """Maximize the log-concave MS surrogate over D in [1, D_max]."""
    d_max = acc.d_max_ms(cfg)
    nu = lambda d: acc.log_nu_ms(cfg, d)
    d_cont = None
    if d_max == 1:
        d_star = 1
    else:
        f_lo, f_hi = f_ms(cfg, 1.0), f_ms(cfg, float(d_max))
        if _sign(f_lo) * _sign(f_hi) < 0:
            d_cont = bisect(lambda d: f_ms(cfg, d), RootBracket(1.0, float(d_max), tol=1e-9))
            d_star = round_by(nu, d_cont, 1, d_max)
        else:
            d_star = 1 if nu(1) >= nu(d_max) else d_max
    return _plan(
        cfg, Scenario.MS, d_star, Method.ULTRALOLA_MS,
        acc.surrogate_ms(cfg, d_star).psi,
        continuous_optimum=d_cont, closed_form_len=d_star,
    )


# -------------------------------------------------------------- multi-view

def f_mv(cfg: ScenarioConfig, packet_len: float) -> float:
    """Slope sign function of the MV surrogate: d/dD ln nu_mv."""
    D = float(packet_len)
    return acc.psi_T_prime(cfg, D) / (safe_exp(acc.psi_T(cfg, D)) + 1.0) - 1.0 / D


def mv_omega(cfg: ScenarioConfig) -> float:
    """Constant of the transcendental stationarity equation."""
    link = cfg.link
    return LN2 ** 2 * cfg.eta ** 2 * link.capacity * link.payload_bits / link.dispersion


def transcendental_residual(x: float, omega: float) -> float:
    """x + omega/x - 2 exp(x - omega/x) - 2; strictly decreasing for x > 0."""
    return x + omega / x - 2.0 * safe_exp(x - omega / x) - 2.0


def solve_transcendental(omega: float) -> float:
    """Unique positive root of :func:`transcendental_residual`."""
    q = lambda x: transcendental_residual(x, omega)
    hi = max(1.0, math.sqrt(omega))
    while q(hi) >= 0:
        hi *= 2.0
    root = bisect(q, RootBracket(1e-9, hi, tol=4 * math.ulp(hi), max_iter=400))
    return root


def optimize_mv(cfg: ScenarioConfig) -> PacketPlan:
    """Maximize the expected-received-views surrogate over D in [1, D_max].

    The closed-form root is computed when the boundary slopes differ in sign
    and kept as a diagnostic; the returned packet length is the integer grid
    maximizer, which the closed form should reproduce.
    """
    d_max = acc.d_max_mv(cfg)
    nu = lambda d: acc.nu_mv(cfg, d)
    link = cfg.link
    d_cont = residual = None
    if d_max > 1 and _sign(f_mv(cfg, 1.0)) * _sign(f_mv(cfg, float(d_max))) < 0:
        omega = mv_omega(cfg)
        zeta = solve_transcendental(omega)
        residual = abs(transcendental_residual(zeta, omega))
        d_cont = link.dispersion * zeta ** 2 / (LN2 ** 2 * cfg.eta ** 2 * link.capacity ** 2)
        closed = round_by(nu, d_cont, 1, d_max)
    else:
        closed = 1 if nu(1) >= nu(d_max) else d_max
    d_star, best = 1, nu(1)
    for d in range(2, d_max + 1):
        v = nu(d)
        if v > best:
            d_star, best = d, v
    s = acc.surrogate_mv(cfg, d_star)
    return _plan(
        cfg, Scenario.MV, d_star, Method.ULTRALOLA_MV, s.psi,
        continuous_optimum=d_cont, closed_form_len=closed, root_residual=residual,
        predicted=s.psi,
    )


# ----------------------------------------------------------- benchmarks

def objective(cfg: ScenarioConfig, scenario: Scenario) -> Callable[[int], float]:
    """Exact analytical accuracy bound for the scenario, as a function of D."""
    if scenario is Scenario.MS:
        return lambda d: acc.e2e_ms_lower_bound(cfg, d)
    return lambda d: acc.e2e_mv_exact_bound(cfg, d)


def brute_force(cfg: ScenarioConfig, scenario: Scenario) -> PacketPlan:
    """Exhaustive integer search of the exact bound; ties go to the shortest packet."""
    scenario = Scenario(scenario)
    obj = objective(cfg, scenario)
    hi = _search_hi(cfg, scenario)
    d_star, best = 1, obj(1)
    for d in range(2, hi + 1):
        v = obj(d)
        if v > best:
            d_star, best = d, v
    return _plan(cfg, scenario, d_star, Method.BRUTE_FORCE, best)


def urllc_baseline(cfg: ScenarioConfig, scenario: Scenario, target_eps: float = 1e-5) -> PacketPlan:
    """Shortest feasible packet whose decoding error is at most ``target_eps``."""
    scenario = Scenario(scenario)
    hi = _search_hi(cfg, scenario)
    link = cfg.link
    # eps >= 1/2 up to the capacity point, so a small target cannot be met below it
    start = 1 if target_eps >= 0.5 else max(1, math.floor(link.payload_bits / link.capacity))
    for d in range(start, hi + 1):
        if decode_error_prob(link, d) <= target_eps:
            return _plan(cfg, scenario, d, Method.URLLC, objective(cfg, scenario)(d))
    raise TargetUnreachable(f"no D <= {hi} reaches eps <= {target_eps:g}")


def shannon_packet_len(link: LinkConfig) -> int:
    # rtol absorbs SNR values given in dB to four decimals (e.g. 4.7712 for 3x)
    return max(1, ceil_tol(link.payload_bits / link.capacity, rtol=1e-5))


def shannon_baseline(cfg: ScenarioConfig, scenario: Scenario) -> PacketPlan:
    """Packet sized by Shannon capacity, ignoring finite-blocklength error."""
    scenario = Scenario(scenario)
    hi = _search_hi(cfg, scenario)
    d = shannon_packet_len(cfg.link)
    if d > hi:
        raise InfeasibleDeadline(f"Shannon packet length {d} exceeds {hi}")
    return _plan(cfg, scenario, d, Method.SHANNON, objective(cfg, scenario)(d))


def table_score(accuracy: float, rho: float, L: int) -> float:
    """Expected accuracy when a decoding failure falls back to guessing."""
    return rho * accuracy + (1.0 - rho) / L


def lookup_table_optimize(table: AccuracyTable, link: LinkConfig) -> PacketPlan:
    """Best table entry under the link's success probability.

    The table carries no deadline information, so ``num_views`` is reported
    as 0.
    """
    L = table.num_classes
    d_star, best = None, -math.inf
    for d, a in sorted(table.entries.items()):
        s = table_score(a, success_prob(link, d), L)
        if s > best:
            d_star, best = d, s
    return PacketPlan(
        packet_len=d_star,
        num_views=0,
        decode_error=decode_error_prob(link, d_star),
        success_prob=success_prob(link, d_star),
        predicted_accuracy=_clamp_accuracy(best, L),
        method=Method.LOOKUP_TABLE,
        surrogate_value=best,
    )
