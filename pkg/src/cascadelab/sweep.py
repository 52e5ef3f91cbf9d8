"""Parameter sweeps over eps with delimited output.

One row per grid point.  CSV and JSON carry the same eleven fields in the
same order; numbers are written with 17 significant digits so a
round-trip through text reproduces the exact doubles.  A grid point that
fails (undecided Monte Carlo trials, unsupported regime for the sequence
bound) becomes a marker row with empty value fields rather than aborting
the sweep.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from . import agents, approx, walk
from .errors import ParameterError, UndecidedRateError, UnsupportedRegimeError
from .model import ModelParams, cascade_thresholds

__all__ = [
    "CSV_HEADER",
    "METHODS",
    "SweepSpec",
    "SweepRow",
    "build_grid",
    "sweep_eps",
    "detect_drops",
    "write_table",
    "read_table",
]

log = logging.getLogger(__name__)

CSV_HEADER = ["eps", "beta", "p", "v", "method", "value", "lower", "upper",
              "std_err", "trials", "seed"]

METHODS = ("mc", "agent-mc", "exact", "tree", "sequence")

# Grid points are pushed at least this far from any computed threshold so
# that absorption classes cannot flip through float noise at a boundary.
THRESHOLD_CLEARANCE = 1e-6

_NUDGE_R_MAX = 60
_NUDGE_K_MAX = 2


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: fixed (p, beta, v), eps ranging over a uniform grid."""

    p: float
    beta: float
    v: str
    method: str
    eps_start: float = 0.0
    eps_stop: float | None = None
    eps_step: float = 0.005
    trials: int = 10**5
    seed: int = 0
    depth: int = walk.DEFAULT_DP_DEPTH
    iters: int = 10
    max_steps: int = walk.DEFAULT_MAX_STEPS

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ParameterError(
                f"method must be one of {METHODS}, got {self.method!r}"
            )
        if self.v not in ("G", "B"):
            raise ParameterError(f"true value v must be 'G' or 'B', got {self.v!r}")
        if self.eps_step <= 0.0:
            raise ParameterError(f"eps_step must be > 0, got {self.eps_step!r}")
        stop = self.resolved_stop()
        if not 0.0 <= self.eps_start <= stop:
            raise ParameterError(
                f"need 0 <= eps_start <= eps_stop, got {self.eps_start!r}, {stop!r}"
            )
        if stop >= 1.0 - self.beta:
            raise ParameterError(
                f"eps_stop must stay below 1 - beta, got {stop!r} with beta={self.beta!r}"
            )

    def resolved_stop(self) -> float:
        """Default stop: 90% of the open upper limit 1 - beta."""
        if self.eps_stop is not None:
            return self.eps_stop
        return 0.9 * (1.0 - self.beta)


@dataclass(frozen=True)
class SweepRow:
    """One evaluated grid point; unset fields stay None (empty in CSV)."""

    eps: float
    beta: float
    p: float
    v: str
    method: str
    value: float | None = None
    lower: float | None = None
    upper: float | None = None
    std_err: float | None = None
    trials: int | None = None
    seed: int | None = None


def build_grid(spec: SweepSpec) -> list[float]:
    """Uniform eps grid, nudged clear of every computed threshold."""
    pts: list[float] = []
    stop = spec.resolved_stop()
    n = 0
    while True:
        x = spec.eps_start + n * spec.eps_step
        if x > stop + 1e-12:
            break
        pts.append(min(x, stop))
        n += 1
    thresholds = [
        t.eps_value
        for t in cascade_thresholds(spec.p, spec.beta, _NUDGE_R_MAX, _NUDGE_K_MAX)
    ]
    out: list[float] = []
    for x in pts:
        for t in thresholds:
            if abs(x - t) < THRESHOLD_CLEARANCE:
                x = t - THRESHOLD_CLEARANCE if x < t else t + THRESHOLD_CLEARANCE
                x = min(max(x, 0.0), (1.0 - spec.beta) * (1.0 - 1e-9))
                break
        out.append(x)
    return out


def _evaluate_point(spec: SweepSpec, eps: float) -> SweepRow:
    params = ModelParams(p=spec.p, eps=eps, beta=spec.beta)
    base = dict(eps=eps, beta=spec.beta, p=spec.p, v=spec.v, method=spec.method)
    if spec.method == "mc":
        est = walk.mc_estimate(params, spec.v, spec.trials, spec.seed, spec.max_steps)
        return SweepRow(**base, value=est.p_hat, std_err=est.std_err,
                        trials=est.trials, seed=est.seed)
    if spec.method == "agent-mc":
        est = agents.mc_estimate(params, spec.v, spec.trials, spec.seed)
        return SweepRow(**base, value=est.p_hat, std_err=est.std_err,
                        trials=est.trials, seed=est.seed)
    if spec.method == "exact":
        iv = walk.exact_interval(params, spec.v, spec.depth)
        return SweepRow(**base, value=0.5 * (iv.y_lower + iv.y_upper),
                        lower=iv.y_lower, upper=iv.y_upper)
    if spec.method == "tree":
        iv = approx.tree_approx(params, spec.v, spec.iters)
        return SweepRow(**base, value=0.5 * (iv.y_lower + iv.y_upper),
                        lower=iv.y_lower, upper=iv.y_upper)
    if spec.method == "sequence":
        bound = approx.sequence_lower_bound(params, spec.v, spec.iters)
        return SweepRow(**base, value=bound, lower=bound)
    raise ParameterError(f"unknown method {spec.method!r}")


def sweep_eps(spec: SweepSpec) -> list[SweepRow]:
    """Evaluate the sweep; per-point failures become marker rows."""
    rows: list[SweepRow] = []
    for eps in build_grid(spec):
        try:
            rows.append(_evaluate_point(spec, eps))
        except (UndecidedRateError, UnsupportedRegimeError, ParameterError) as exc:
            log.warning("sweep point eps=%.6g failed: %s", eps, exc)
            rows.append(SweepRow(eps=eps, beta=spec.beta, p=spec.p, v=spec.v,
                                 method=spec.method))
    return rows


def detect_drops(rows: list[SweepRow], min_jump: float) -> list[tuple[float, float]]:
    """Locations (midpoint eps, size) of value decreases exceeding min_jump.

    Marker rows without a value are skipped; drops are measured between
    consecutive evaluated rows.
    """
    if min_jump <= 0.0:
        raise ParameterError(f"min_jump must be > 0, got {min_jump!r}")
    valued = [r for r in rows if r.value is not None]
    drops: list[tuple[float, float]] = []
    for prev, cur in zip(valued, valued[1:]):
        fall = prev.value - cur.value
        if fall > min_jump:
            drops.append((0.5 * (prev.eps + cur.eps), fall))
    return drops


def _format_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_table(rows: list[SweepRow], fmt: str, path) -> None:
    """Write rows as CSV or JSON with the canonical field order."""
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for r in rows:
                writer.writerow([_format_cell(getattr(r, name)) for name in CSV_HEADER])
        return
    if fmt == "json":
        payload = [{name: getattr(r, name) for name in CSV_HEADER} for r in rows]
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return
    raise ParameterError(f"format must be 'csv' or 'json', got {fmt!r}")


def _parse_cell(name: str, text: str):
    if text == "":
        return None
    if name in ("trials", "seed"):
        return int(text)
    if name in ("v", "method"):
        return text
    return float(text)


def read_table(path) -> list[SweepRow]:
    """Read back a table written by ``write_table`` (CSV or JSON)."""
    path = Path(path)
    if path.suffix == ".json":
        payload = json.loads(path.read_text())
        return [SweepRow(**entry) for entry in payload]
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ParameterError(f"unexpected CSV header {header!r}")
        rows = []
        for record in reader:
            kwargs = {name: _parse_cell(name, cell) for name, cell in zip(header, record)}
            rows.append(SweepRow(**kwargs))
    return rows
