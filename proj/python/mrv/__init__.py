"""Multi-round visibility ordering over committed DAG logs."""

import json

from ._mrv import (
    MrvError,
    RunConfig,
    bench,
    loglog_slope,
    scenario,
    scenario_names,
    simulate,
    verify,
)
from ._mrv import order as _order

__all__ = [
    "MrvError",
    "RunConfig",
    "bench",
    "loglog_slope",
    "order",
    "scenario",
    "scenario_names",
    "simulate",
    "verify",
]


def order(log, config=None):
    """Replay `log` (bytes) through the ordering engine.

    Returns a dict with the sealed slice orders, the metrics record, the
    timing record and whether the run's invariants held.
    """
    orders, metrics, timing, ok = _order(log, config)
    return {
        "orders": orders,
        "metrics": json.loads(metrics),
        "timing": json.loads(timing),
        "invariants_hold": ok,
    }
