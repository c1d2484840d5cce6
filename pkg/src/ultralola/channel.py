"""Finite-blocklength link under truncated channel inversion.

Channel inversion turns every active link into an AWGN channel at a fixed
receive SNR, so a packet of D channel uses carrying N*Q_B bits fails with
the normal-approximation error probability, and an inactive device (deep
fade) sends nothing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .numerics import log_q_function, q_function

LN2 = math.log(2.0)


@dataclass(frozen=True)
class LinkConfig:
    snr: float                  # linear receive SNR after inversion
    activation_prob: float      # xi_a
    bandwidth_hz: float
    bits_per_feature: int       # Q_B
    feature_dim: int            # N

    def __post_init__(self):
        if not self.snr > 0 or not math.isfinite(self.snr):
            raise ValueError(f"snr must be positive, got {self.snr}")
        if not 0.0 <= self.activation_prob <= 1.0:
            raise ValueError(f"activation_prob must lie in [0, 1], got {self.activation_prob}")
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be positive")
        if int(self.bits_per_feature) < 1 or int(self.feature_dim) < 1:
            raise ValueError("bits_per_feature and feature_dim must be >= 1")

    @classmethod
    def from_db(cls, snr_db: float, **kw) -> "LinkConfig":
        return cls(snr=db_to_linear(snr_db), **kw)

    @property
    def payload_bits(self) -> int:
        return self.feature_dim * self.bits_per_feature

    @property
    def capacity(self) -> float:
        """Shannon capacity in bits per channel use."""
        return math.log2(1.0 + self.snr)

    @property
    def dispersion(self) -> float:
        return dispersion(self.snr)


class TransmissionOutcome(enum.IntEnum):
    INACTIVE = 0
    DECODE_FAIL = 1
    SUCCESS = 2


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dispersion(snr: float) -> float:
    """Channel dispersion V = 1 - (1 + snr)^-2 of the complex AWGN channel."""
    if snr <= 0:
        raise ValueError("snr must be positive")
    return 1.0 - (1.0 + snr) ** -2


def q_argument(cfg: LinkConfig, packet_len: float) -> float:
    """Argument of Q in the normal approximation; increasing in ``packet_len``."""
    if packet_len <= 0:
        raise ValueError("packet_len must be positive")
    D = float(packet_len)
    return LN2 * math.sqrt(D / cfg.dispersion) * (cfg.capacity - cfg.payload_bits / D)


def decode_error_prob(cfg: LinkConfig, packet_len: float) -> float:
    """Normal-approximation block error probability.

    Values above 0.5 (rate beyond capacity) are returned unchanged.
    """
    return q_function(q_argument(cfg, packet_len))


def log_decode_probs(cfg: LinkConfig, packet_len: float) -> tuple[float, float]:
    """``(ln eps, ln(1 - eps))``, both accurate where eps saturates in float."""
    x = q_argument(cfg, packet_len)
    return log_q_function(x), log_q_function(-x)


def success_prob(cfg: LinkConfig, packet_len: float) -> float:
    """rho = xi_a * (1 - eps)."""
    # 1 - Q(x) = Q(-x) keeps precision when eps is tiny
    return cfg.activation_prob * q_function(-q_argument(cfg, packet_len))


def rayleigh_threshold(activation_prob: float) -> float:
    """Inversion threshold on |h|^2 giving ``activation_prob`` under Rayleigh fading."""
    if not 0.0 < activation_prob <= 1.0:
        raise ValueError("activation_prob must lie in (0, 1]")
    return -math.log(activation_prob)


def sample_transmissions(
    cfg: LinkConfig, packet_len: float, size, gen: np.random.Generator
) -> np.ndarray:
    """Independent outcomes for ``size`` packets, as ``TransmissionOutcome`` codes.

    Activation is drawn from unit-mean exponential channel gains against the
    inversion threshold; decoding is a Bernoulli draw against eps.
    """
    eps = decode_error_prob(cfg, packet_len)
    gain = gen.standard_exponential(size)
    if cfg.activation_prob > 0:
        active = gain >= rayleigh_threshold(cfg.activation_prob)
    else:
        active = np.zeros(np.shape(gain), dtype=bool)
    decoded = gen.random(size) >= eps
    out = np.full(np.shape(gain), TransmissionOutcome.INACTIVE, dtype=np.int8)
    out[active & ~decoded] = TransmissionOutcome.DECODE_FAIL
    out[active & decoded] = TransmissionOutcome.SUCCESS
    return out


def sample_transmission(cfg: LinkConfig, packet_len: float, gen: np.random.Generator) -> TransmissionOutcome:
    return TransmissionOutcome(int(sample_transmissions(cfg, packet_len, 1, gen)[0]))
