"""White-noise-aided control: simulation, sweeps and ISS condition checks."""

import json

from . import _core
from ._core import IoError, ValidationError, chen_drift, clf_bound, correlated_increments

__all__ = [
    "IoError",
    "ValidationError",
    "chen_drift",
    "check_conditions",
    "clf_bound",
    "config",
    "correlated_increments",
    "cost_comparison",
    "preset",
    "preset_names",
    "simulate",
    "sweep",
]


def preset_names():
    return list(_core.preset_names())


def preset(name):
    return json.loads(_core.preset(name))


def config(base=None, **overrides):
    """Complete scenario dict: defaults, then `base`, then top-level overrides."""
    doc = dict(base or {})
    doc.update(overrides)
    return json.loads(_core.complete(json.dumps(doc)))


def simulate(cfg=None, seed=1):
    return _core.simulate(json.dumps(cfg or {}), seed)


def sweep(cfg=None, jobs=0):
    return _core.sweep(json.dumps(cfg or {}), jobs)


def cost_comparison(cfg=None, jobs=0):
    return _core.cost_comparison(json.dumps(cfg or {}), jobs)


def check_conditions(task):
    return json.loads(_core.check_conditions(json.dumps(task)))
