"""Python bindings for the cas_limits C++ core."""

import csv
import io
import json

from . import _cas
from ._cas import (  # noqa: F401
    CasError,
    ConfigError,
    FiniteCasModel,
    InfeasibleConstraint,
    IoError,
    SolverError,
    TradeoffPoint,
    TrmModel,
    UnreachableDistortion,
    channel_mi,
    constrained_capacity,
    estimate_costs,
    feasibility_margin,
    load_finite_model,
    load_trm_model,
    min_total_distortion,
    modes,
    optimal_estimate,
    random_trm_model,
    rate_distortion,
    reverse_waterfill,
    run_config,
    sensing_mse,
    with_snr,
)


def optimize_isac(model):
    return json.loads(_cas.optimize_isac(model))


def optimize_sw(model, split_grid=201):
    return json.loads(_cas.optimize_sw(model, split_grid))


def sweep_snr(model, snr_db):
    """One dict per (snr, scheme) row; numeric fields are floats, failed rows hold None."""
    rows = []
    for row in csv.DictReader(io.StringIO(_cas.sweep_snr(model, list(snr_db)))):
        out = {}
        for k, v in row.items():
            if k == "scheme":
                out[k] = v
            elif k == "converged":
                out[k] = v if v == "failed" else v == "true"
            else:
                out[k] = float(v) if v != "" else None
        rows.append(out)
    return rows


def simulate(model, X, rate=None, trials=100000, seed=1, workers=1):
    return json.loads(_cas.simulate(model, X, rate, trials, seed, workers))
