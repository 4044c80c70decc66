"""Quasi-reversibility regularization of backward reaction-diffusion systems.

Thin Python layer over the C++ core in ``qrbackward._core``.
"""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import run_experiment_json as _run_experiment_json
from ._core import run_sample_json as _run_sample_json


def run_experiment(config):
    """Run a Monte Carlo experiment. ``config`` is a dict in the JSON config schema."""
    return _json.loads(_run_experiment_json(_json.dumps(config)))


def run_sample(config, epsilon, index):
    """Run one sample of an experiment and return its squared errors."""
    return _json.loads(_run_sample_json(_json.dumps(config), epsilon, index))
