"""Evaluate the witness set on a strategy and check the results before they leave the process."""
from __future__ import annotations

import math

from . import witnesses as wt
from .errors import InvariantViolation
from .families import NamedStrategy

METRICS = ("W", "Q", "WL", "PB", "PMIN", "CHSH", "HMIN")
SWEEP_COLUMNS = ("Q", "W", "WL", "PB", "PMIN", "CHSH", "HMIN", "f_Q")

# valid range per metric; W and Q can reach 2 on nonsignaling (non-quantum) data
RANGES = {"W": (0, 2), "Q": (0, 2), "WL": (-4, 4), "PB": (0, 1), "PMIN": (0, 1),
          "CHSH": (0, 4), "HMIN": (0, 1), "f_Q": (0.5, 1)}

_EPS = 1e-12


def thresholds_exceeded(metric: str, value: float) -> list:
    if value is None:
        return []
    checks = {
        "W": [("W>0", value > _EPS)],
        "Q": [("Q>0", value > _EPS)],
        "WL": [("|WL|>2", wt.wl_violation(value))],
        "PB": [("PB>3/4", value > wt.PB_CLASSICAL_BOUND + _EPS)],
        "PMIN": [("PMIN>2/3(SL2)", value > wt.sl_thresholds(2) + _EPS),
                 ("PMIN>1/2(SL3)", value > wt.sl_thresholds(2, True) + _EPS)],
        "CHSH": [("CHSH>2", value > wt.CHSH_LOCAL_BOUND + _EPS)],
        "HMIN": [("HMIN>0", value > _EPS)],
    }
    return [name for name, hit in checks.get(metric, []) if hit]


def parse_metrics(text: str | None) -> list:
    if not text:
        return list(METRICS)
    out = []
    for item in text.split(","):
        name = item.strip().upper()
        if name not in METRICS:
            from .errors import ParseError
            raise ParseError(f"unknown metric {item!r}; choose from {', '.join(METRICS)}")
        if name not in out:
            out.append(name)
    return out


def evaluate(strategy: NamedStrategy, names=METRICS) -> dict:
    """metric name -> value, or None where the metric does not apply to this realization."""
    names = set(names)
    out = {}
    need_seq = names & {"W", "WL", "PB", "PMIN"}
    need_q = names & {"Q", "HMIN", "f_Q"}
    seq = strategy.sequential() if need_seq else None
    cond = strategy.conditional() if need_q else None
    box = strategy.joint_box() if "CHSH" in names else None
    q = wt.quantity_q(cond).value if cond is not None else None
    for name in names:
        if name == "W":
            out[name] = wt.witness_w(seq).value
        elif name == "WL":
            out[name] = wt.linear_witness_wl(seq).value
        elif name == "PB":
            out[name] = wt.rac_average_success(seq).value
        elif name == "PMIN":
            out[name] = wt.rac_worst_case(seq).value
        elif name == "Q":
            out[name] = q
        elif name == "HMIN":
            out[name] = None if q is None else wt.min_entropy(q)
        elif name == "f_Q":
            out[name] = None if q is None else wt.guessing_bound(q)
        elif name == "CHSH":
            out[name] = None if box is None else wt.chsh_value(box).value
    validate(out)
    return out


def validate(values: dict):
    for name, value in values.items():
        if value is None:
            continue
        lo, hi = RANGES[name]
        if not math.isfinite(value) or value < lo - 1e-9 or value > hi + 1e-9:
            raise InvariantViolation(f"{name} = {value!r} outside its valid range [{lo}, {hi}]")
