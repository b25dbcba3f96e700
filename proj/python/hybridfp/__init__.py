"""Hybrid flight planner: guided corridor A* over a 3-D lattice."""

import json

from ._core import (
    HfpError,
    airport_codes,
    distance_m,
    end_reward,
    pct_diff,
    step_reward,
    train,
)
from ._core import plan_json as _plan_json


def plan(origin, destination, **kwargs):
    """Plan a route and return the route document as a dict."""
    return json.loads(_plan_json(origin, destination, **kwargs))


__all__ = [
    "HfpError",
    "airport_codes",
    "distance_m",
    "end_reward",
    "pct_diff",
    "plan",
    "step_reward",
    "train",
]
