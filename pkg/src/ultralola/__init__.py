"""Packet-length optimization for deadline-constrained edge inference.

Analytical end-to-end sensing accuracy for multi-snapshot and multi-view
sensing over finite-blocklength links, surrogate-based packet-length
optimizers with reliability-oriented baselines, and a Monte Carlo simulator
that checks every analytical claim.
"""

from .accuracy import ScenarioConfig
from .channel import LinkConfig, TransmissionOutcome
from .gmm import GmmModel
from .optimizer import AccuracyTable, Method, PacketPlan, Scenario
from .results import SimResult

__all__ = [
    "AccuracyTable",
    "GmmModel",
    "LinkConfig",
    "Method",
    "PacketPlan",
    "Scenario",
    "ScenarioConfig",
    "SimResult",
    "TransmissionOutcome",
]
__version__ = "0.1.0"
