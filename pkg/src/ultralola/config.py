"""Experiment configuration: JSON schema, presets, and ``key=value`` overrides."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

from .accuracy import ScenarioConfig
from .channel import LinkConfig, db_to_linear
from .errors import ConfigError, IndivisibleDimensions
from .gmm import GmmModel, equidistant_model, min_discriminant_gain, synthetic_model

REQUIRED = (
    "snr_db", "bandwidth_hz", "deadline_s", "sensing_time_s", "xi_a",
    "n_features", "q_bits", "n_classes",
)
OPTIONAL = ("g_min", "model", "variance", "eta")
KNOWN = set(REQUIRED) | set(OPTIONAL)

PRESETS: dict[str, dict[str, Any]] = {
    # synthetic-GMM experiment defaults
    "synthetic": {
        "snr_db": 10.0,
        "bandwidth_hz": 1e5,
        "deadline_s": 1e-3,
        "sensing_time_s": 1e-4,
        "xi_a": 1 - 1e-5,
        "n_features": 20,
        "q_bits": 4,
        "n_classes": 10,
        "variance": 3.0,
        "eta": 1.7,
    },
    # surrogate-comparison settings, G = 1
    "fast-sensing": {
        "snr_db": 5.0,
        "bandwidth_hz": 2e5,
        "deadline_s": 1e-3,
        "sensing_time_s": 2e-5,
        "xi_a": 0.95,
        "n_features": 10,
        "q_bits": 8,
        "n_classes": 2,
        "g_min": 4.0,
        "eta": 1.7,
    },
}
# same with G = 0.5
PRESETS["fast-sensing-lowgain"] = {**PRESETS["fast-sensing"], "g_min": 1.0}


@dataclass(frozen=True)
class Experiment:
    scenario: ScenarioConfig
    model: GmmModel
    raw: dict

    def effective(self) -> dict:
        """The configuration as parsed, overrides applied."""
        return copy.deepcopy(self.raw)


def parse_override(item: str) -> tuple[str, Any]:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not key=value")
    key, text = item.split("=", 1)
    key = key.strip()
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    return key, value


def apply_overrides(raw: dict, overrides: Sequence[str]) -> dict:
    out = copy.deepcopy(raw)
    for item in overrides:
        key, value = parse_override(item)
        if key not in KNOWN:
            raise ConfigError(f"unknown config key {key!r}")
        if value is None:
            out.pop(key, None)
        else:
            out[key] = value
    return out


def _number(raw: dict, key: str, kind=float):
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number, got {v!r}")
    if kind is int:
        if float(v) != int(v):
            raise ConfigError(f"{key} must be an integer, got {v!r}")
        return int(v)
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"{key} must be finite")
    return v


def build(raw: dict) -> Experiment:
    """Validate a raw config mapping and build the scenario and feature model."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - KNOWN
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing config keys: {missing}")
    L = _number(raw, "n_classes", int)
    N = _number(raw, "n_features", int)
    sources = [k for k in ("model", "variance", "g_min") if k in raw]
    if len(sources) != 1:
        raise ConfigError("give exactly one of 'model', 'variance', 'g_min'")
    try:
        if "model" in raw:
            model = GmmModel.from_dict(raw["model"])
        elif "variance" in raw:
            model = synthetic_model(L, N, _number(raw, "variance"))
        else:
            model = equidistant_model(L, N, _number(raw, "g_min"))
        if model.L != L or model.N != N:
            raise ConfigError(f"model is {model.L} classes x {model.N} features, config says {L} x {N}")
        link = LinkConfig(
            snr=db_to_linear(_number(raw, "snr_db")),
            activation_prob=_number(raw, "xi_a"),
            bandwidth_hz=_number(raw, "bandwidth_hz"),
            bits_per_feature=_number(raw, "q_bits", int),
            feature_dim=N,
        )
        scenario = ScenarioConfig(
            deadline_s=_number(raw, "deadline_s"),
            sensing_time_s=_number(raw, "sensing_time_s"),
            link=link,
            num_classes=L,
            g_min=min_discriminant_gain(model),
            eta=_number(raw, "eta") if "eta" in raw else 1.7,
        )
    except ConfigError:
        raise
    except (IndivisibleDimensions, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return Experiment(scenario, model, copy.deepcopy(raw))


def load(path: Optional[str] = None, preset: Optional[str] = None, overrides: Sequence[str] = ()) -> Experiment:
    """Read a JSON config file (or a named preset) and apply overrides."""
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    else:
        name = preset or "synthetic"
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        raw = PRESETS[name]
    return build(apply_overrides(raw, overrides))
