from __future__ import annotations

import math
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class SimResult:
    """Monte Carlo accuracy estimate with a 95% Wald half-width."""

    trials: int
    successes: int
    accuracy: float
    ci_halfwidth_95: float
    seed: int

    @classmethod
    def from_counts(cls, trials: int, successes: int, seed: int) -> "SimResult":
        if trials < 1 or not 0 <= successes <= trials:
            raise ValueError(f"bad counts {successes}/{trials}")
        p = successes / trials
        return cls(trials, successes, p, 1.96 * math.sqrt(p * (1.0 - p) / trials), seed)

    @property
    def sigma(self) -> float:
        """One standard error of the estimate."""
        return self.ci_halfwidth_95 / 1.96

    def to_dict(self) -> dict:
        return asdict(self)
