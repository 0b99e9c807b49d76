"""Python face of the PPO outer-update laboratory.

The native module speaks JSON text for configs and reports; this package
turns those strings into plain dicts and back, so callers work with regular
python objects end to end.
"""

import json as _json

import _ppolab
from _ppolab import ConfigError, env_ids, gae, preset_names, sweep_seed

__all__ = [
    "ConfigError",
    "aggregate",
    "default_config",
    "env_ids",
    "evaluate",
    "gae",
    "preset",
    "preset_names",
    "probability_of_improvement",
    "reference_table",
    "sweep_seed",
    "train",
    "validate_config",
]


def default_config():
    """Fully resolved default run config as a dict."""
    return _json.loads(_ppolab.default_config_json())


def validate_config(config):
    """Raises ConfigError unless the config dict is complete and valid."""
    _ppolab.validate_config_json(_json.dumps(config))


def train(config):
    """Runs one seeded training run and returns its result document."""
    return _json.loads(_ppolab.train_json(_json.dumps(config)))


def evaluate(config, params, episodes, seed):
    """Raw episode returns of flat parameters under the config's environment."""
    return _ppolab.evaluate_json(_json.dumps(config), list(params), episodes, seed)


def aggregate(scores):
    """Interval estimates over a {task: [scores]} table."""
    return _json.loads(_ppolab.aggregate_json(_json.dumps(scores)))


def probability_of_improvement(method_scores, baseline_scores):
    """P(method > baseline) with a bootstrap interval, both {task: [scores]}."""
    return _json.loads(
        _ppolab.poi_json(_json.dumps(method_scores), _json.dumps(baseline_scores))
    )


def reference_table():
    """Built-in per-task normalization ranges as {task: [min, max]}."""
    return _json.loads(_ppolab.reference_table_json())


def preset(name):
    """One named preset as a dict."""
    return _json.loads(_ppolab.preset_document_json(name))
