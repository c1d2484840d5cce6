"""Monte Carlo ground truth for end-to-end sensing accuracy."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import astuple, dataclass, fields, replace
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from . import accuracy as acc
from . import optimizer as opt
from . import rng
from .accuracy import ScenarioConfig
from .channel import TransmissionOutcome, db_to_linear, decode_error_prob, sample_transmissions, success_prob
from .errors import InfeasibleDeadline, TargetUnreachable
from .gmm import GmmModel, classify_batch, draw_fused, run_blocks
from .optimizer import Method, Scenario
from .results import SimResult


def _correct(model: GmmModel, labels, fused, delivered, gen) -> int:
    guesses = gen.integers(0, model.L, size=labels.shape[0])
    pred = np.where(delivered, classify_batch(model, np.nan_to_num(fused)), guesses)
    return int(np.count_nonzero(pred == labels))


def simulate_ms(
    model: GmmModel,
    cfg: ScenarioConfig,
    packet_len: int,
    trials: int,
    seed: int,
    workers: int = 1,
    explicit_views: bool = False,
) -> SimResult:
    """Multi-snapshot rounds: K snapshots fused locally, one packet sent.

    A lost packet (inactive device or decoding failure) or a round with no
    snapshot ends in a uniform random guess at the server.
    """
    seed = rng.check_seed(seed)
    K = acc.k_ms(cfg, packet_len)

    def block(b: int, n: int) -> int:
        gen = rng.stream(seed, rng.TAG_SIM_MS, b)
        labels = gen.integers(0, model.L, size=n)
        if K >= 1:
            fused = draw_fused(model, labels, np.full(n, K), gen, explicit_views)
            outcome = sample_transmissions(cfg.link, packet_len, n, gen)
            delivered = outcome == TransmissionOutcome.SUCCESS
        else:
            fused = np.zeros((n, model.N))
            delivered = np.zeros(n, dtype=bool)
        return _correct(model, labels, fused, delivered, gen)

    return SimResult.from_counts(trials, run_blocks(block, trials, workers), seed)


def simulate_mv(
    model: GmmModel,
    cfg: ScenarioConfig,
    packet_len: int,
    trials: int,
    seed: int,
    workers: int = 1,
    explicit_views: bool = False,
) -> SimResult:
    """Multi-view rounds: K sensors each send one view in its own TDMA slot.

    The server pools whichever views decode and guesses when none do. By
    default the number of delivered views is drawn as Binomial(K, rho) and the
    pooled vector from its exact distribution; ``explicit_views`` draws each
    sensor's outcome and feature individually.
    """
    seed = rng.check_seed(seed)
    K = acc.k_mv(cfg, packet_len)
    rho = success_prob(cfg.link, packet_len)

    def block(b: int, n: int) -> int:
        gen = rng.stream(seed, rng.TAG_SIM_MV, b)
        labels = gen.integers(0, model.L, size=n)
        if K == 0:
            received = np.zeros(n, dtype=np.int64)
        elif explicit_views:
            outcome = sample_transmissions(cfg.link, packet_len, (n, K), gen)
            received = np.count_nonzero(outcome == TransmissionOutcome.SUCCESS, axis=1)
        else:
            received = gen.binomial(K, rho, size=n)
        fused = draw_fused(model, labels, received, gen, explicit_views)
        return _correct(model, labels, fused, received > 0, gen)

    return SimResult.from_counts(trials, run_blocks(block, trials, workers), seed)


def simulate(model, cfg, scenario, packet_len, trials, seed, workers=1, explicit_views=False) -> SimResult:
    fn = simulate_ms if Scenario(scenario) is Scenario.MS else simulate_mv
    return fn(model, cfg, packet_len, trials, seed, workers=workers, explicit_views=explicit_views)


# ------------------------------------------------------------------ sweeps

class SweepVar(str, enum.Enum):
    PACKET_LENGTH = "packet_length"
    SNR_DB = "snr_db"
    DEADLINE_S = "deadline_s"


FIXED_METHOD = "Fixed"

METHOD_ALIASES = {
    "ultralola": None,  # resolved per scenario
    "brute": Method.BRUTE_FORCE,
    "urllc": Method.URLLC,
    "shannon": Method.SHANNON,
}


@dataclass(frozen=True)
class SweepRow:
    sweep_var: str
    sweep_value: float
    method: str
    packet_len: Optional[int]
    num_views: Optional[int]
    epsilon: Optional[float]
    rho: Optional[float]
    analytic_accuracy: Optional[float]
    empirical_accuracy: Optional[float]
    ci_halfwidth_95: Optional[float]
    trials: int
    seed: int
    status: str


CSV_COLUMNS = [f.name for f in fields(SweepRow)]


def resolve_method(name, scenario: Scenario) -> Method:
    if isinstance(name, Method):
        return name
    key = str(name).lower()
    if key == "ultralola":
        return Method.ULTRALOLA_MS if scenario is Scenario.MS else Method.ULTRALOLA_MV
    if key in METHOD_ALIASES:
        return METHOD_ALIASES[key]
    return Method(name)


def plan_for(cfg: ScenarioConfig, scenario: Scenario, method: Method) -> opt.PacketPlan:
    if method in (Method.ULTRALOLA_MS, Method.ULTRALOLA_MV):
        return opt.optimize_ms(cfg) if scenario is Scenario.MS else opt.optimize_mv(cfg)
    if method is Method.BRUTE_FORCE:
        return opt.brute_force(cfg, scenario)
    if method is Method.URLLC:
        return opt.urllc_baseline(cfg, scenario)
    if method is Method.SHANNON:
        return opt.shannon_baseline(cfg, scenario)
    raise ValueError(f"method {method.value} cannot run inside a sweep")


def _point_config(cfg: ScenarioConfig, var: SweepVar, value: float) -> ScenarioConfig:
    if var is SweepVar.SNR_DB:
        return replace(cfg, link=replace(cfg.link, snr=db_to_linear(value)))
    if var is SweepVar.DEADLINE_S:
        if not value > cfg.sensing_time_s:
            raise InfeasibleDeadline(f"deadline {value} does not exceed the sensing time")
        return replace(cfg, deadline_s=value)
    return cfg


def _row(var, value, method, D, cfg, scenario, analytic, model, trials, seed, workers) -> SweepRow:
    views = acc.k_ms(cfg, D) if scenario is Scenario.MS else acc.k_mv(cfg, D)
    sim = simulate(model, cfg, scenario, D, trials, seed, workers)
    return SweepRow(
        var.value, value, method, int(D), views,
        decode_error_prob(cfg.link, D), success_prob(cfg.link, D), analytic,
        sim.accuracy, sim.ci_halfwidth_95, trials, seed, "ok",
    )


def _failed(var, value, method, trials, seed, status) -> SweepRow:
    return SweepRow(var.value, value, method, None, None, None, None, None, None, None, trials, seed, status)


def sweep(
    model: GmmModel,
    cfg: ScenarioConfig,
    scenario,
    variable,
    grid: Sequence[float],
    methods: Iterable = ("ultralola", "brute", "urllc", "shannon"),
    trials: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> list[SweepRow]:
    """Plan and simulate every method at every grid point.

    For a packet-length sweep the grid value is the packet length itself and
    one ``Fixed`` row is produced per point. Infeasible points become rows
    with an error status instead of aborting the sweep. Every point reuses the
    master seed, so methods that pick the same packet length agree exactly.
    """
    scenario, var = Scenario(scenario), SweepVar(variable)
    grid = [float(v) for v in grid]
    if not grid:
        raise ValueError("sweep grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("sweep grid must be strictly increasing")
    rows = []
    if var is SweepVar.PACKET_LENGTH:
        obj = opt.objective(cfg, scenario)
        for value in grid:
            D = int(round(value))
            hi = acc.max_packet_len(cfg) if scenario is Scenario.MS else acc.d_max_mv(cfg)
            if D < 1 or D > hi:
                rows.append(_failed(var, value, FIXED_METHOD, trials, seed, "infeasible_deadline"))
                continue
            rows.append(_row(var, value, FIXED_METHOD, D, cfg, scenario, obj(D), model, trials, seed, workers))
        return rows
    resolved = [resolve_method(m, scenario) for m in methods]
    for value in grid:
        for method in resolved:
            try:
                point = _point_config(cfg, var, value)
                plan = plan_for(point, scenario, method)
            except InfeasibleDeadline:
                rows.append(_failed(var, value, method.value, trials, seed, "infeasible_deadline"))
                continue
            except TargetUnreachable:
                rows.append(_failed(var, value, method.value, trials, seed, "target_unreachable"))
                continue
            rows.append(_row(var, value, method.value, plan.packet_len, point, scenario,
                             plan.predicted_accuracy, model, trials, seed, workers))
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".9g")
    return str(v)


def write_csv(rows: Iterable[SweepRow], fh: TextIO, comments: Sequence[str] = ()) -> None:
    """SweepRow CSV with optional leading ``#`` comment lines."""
    for line in comments:
        fh.write(f"# {line}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(v) for v in astuple(row)])


def to_csv(rows: Iterable[SweepRow], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, comments)
    return buf.getvalue()
