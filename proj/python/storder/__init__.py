"""Stochastic order checks for distorted lifetime distributions.

Distributions, distortions and copulas are given in the same text forms as
the command line, e.g. ``"exp:1"``, ``"q:17/8*p-1/2*p^2"``, ``"power:5"``,
``"durante:f=p^0.5,n=4"``.
"""

import json

from . import _core
from ._core import DomainError, Error, ParseError, ValidationError, mean, quantile, targets

__all__ = [
    "DomainError",
    "Error",
    "ParseError",
    "ValidationError",
    "check_order",
    "classify_distortion",
    "classify_system",
    "excess_wealth",
    "mean",
    "quantile",
    "reproduce",
    "sweep",
    "system_distortion",
    "targets",
    "ttt",
]


def check_order(x, y, order, distortion=None, grid_count=512, curve=False):
    """Verdict document for ``x <= y`` in the given order (ttt, ew, dmrl, qmit, c, star).

    With ``distortion`` both sides are distorted first.
    """
    return json.loads(_core.check_order(x, y, order, distortion or "", grid_count, curve))


def classify_distortion(h, grid_count=512):
    return json.loads(_core.classify_distortion(h, grid_count))


def classify_system(signature, copula, grid_count=512):
    return json.loads(_core.classify_system(signature, copula, grid_count))


def system_distortion(signature, copula, p):
    return _core.system_distortion(signature, copula, list(p))


def ttt(x, p):
    return _core.ttt(x, list(p))


def excess_wealth(x, p):
    return _core.excess_wealth(x, list(p))


def reproduce(target):
    """Summary and CSV tables of one worked example (see ``targets()``)."""
    return json.loads(_core.reproduce(target))


def sweep(config=None):
    """Randomized preservation checks; ``config`` keys as in the sweep config file."""
    return json.loads(_core.sweep(json.dumps(config or {})))
