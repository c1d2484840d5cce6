"""Shared scenario builders for the test suite."""

from ultralola import config


def experiment(preset="fast-sensing-lowgain", **overrides):
    raw = dict(config.PRESETS[preset])
    for key, value in overrides.items():
        if value is None:
            raw.pop(key, None)
        else:
            raw[key] = value
    return config.build(raw)


def scenario(preset="fast-sensing-lowgain", **overrides):
    return experiment(preset, **overrides).scenario
