"""Per-host attack probabilities from cumulative event-level detections.

Each classified record is a Bernoulli trial with success probability p
(the event-level detection rate). Detections are grouped by srcip and
accumulated across runs; a host's attack probability is the cumulative
binomial P(X <= d_r) over its n_r trials. Hosts whose detection counts
keep pace with p push toward 1; hosts that rarely trigger decay toward 0.

All binomial arithmetic runs in log space so host histories with n ~ 1e5
trials stay finite.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np


class SituationError(ValueError):
    pass


def _check_nd(n: int, d: int) -> tuple[int, int]:
    n = int(n)
    d = int(d)
    if n < 0:
        raise SituationError(f"negative trial count {n}")
    if d < 0 or d > n:
        raise SituationError(f"successes {d} outside [0, {n}]")
    return n, d


def _log_pmf(n: int, d: int, p: float) -> float:
    logc = math.lgamma(n + 1) - math.lgamma(d + 1) - math.lgamma(n - d + 1)
    return logc + d * math.log(p) + (n - d) * math.log1p(-p)


def binom_pmf(n: int, d: int, p: float) -> float:
    """Exact binomial point probability C(n,d) p^d (1-p)^(n-d)."""
    n, d = _check_nd(n, d)
    if not 0.0 <= p <= 1.0:
        raise SituationError(f"probability {p} outside [0, 1]")
    if p == 0.0:
        return 1.0 if d == 0 else 0.0
    if p == 1.0:
        return 1.0 if d == n else 0.0
    return min(1.0, math.exp(_log_pmf(n, d, p)))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified
    Lentz), convergent for x < (a+1)/(a+b+2)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise SituationError(f"incomplete beta failed to converge (a={a}, b={b}, x={x})")


def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), log-space front factor."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def binom_cdf(n: int, d: int, p: float) -> float:
    """Cumulative binomial P(X <= d) via the regularized incomplete beta
    I_{1-p}(n-d, d+1); see binom_cdf_direct for the summation cross-check."""
    n, d = _check_nd(n, d)
    if not 0.0 <= p <= 1.0:
        raise SituationError(f"probability {p} outside [0, 1]")
    if d == n:
        return 1.0
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0  # d < n here
    value = _betainc_reg(n - d, d + 1.0, 1.0 - p)
    return min(1.0, max(0.0, value))


def binom_cdf_direct(n: int, d: int, p: float) -> float:
    """P(X <= d) by direct log-space PMF summation.

    Independent of the incomplete-beta route; O(d) per call, intended for
    cross-checks and small n rather than 1e5-trial host histories.
    """
    n, d = _check_nd(n, d)
    if not 0.0 <= p <= 1.0:
        raise SituationError(f"probability {p} outside [0, 1]")
    if d == n or p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0
    ks = np.arange(0, d + 1, dtype=np.float64)
    logc = (
        math.lgamma(n + 1)
        - np.array([math.lgamma(k + 1) for k in range(d + 1)])
        - np.array([math.lgamma(n - k + 1) for k in range(d + 1)])
    )
    logs = logc + ks * math.log(p) + (n - ks) * math.log1p(-p)
    peak = logs.max()
    return float(min(1.0, math.exp(peak + math.log(np.exp(logs - peak).sum()))))


@dataclass(frozen=True)
class DetectionParams:
    """Bernoulli-trial parameters: p is the event-level detection rate
    (default the measured bagging sensitivity 0.325, hence q = 0.675)."""

    p: float = 0.325
    mode: str = "cdf"

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise SituationError(f"detection probability {self.p} outside (0, 1)")
        if self.mode not in ("cdf", "pmf"):
            raise SituationError(f"unknown mode {self.mode!r}")

    @property
    def q(self) -> float:
        return 1.0 - self.p


def host_probability(n: int, d: int, params: DetectionParams) -> float:
    if params.mode == "pmf":
        return binom_pmf(n, d, params.p)
    return binom_cdf(n, d, params.p)


@dataclass(frozen=True)
class HostState:
    """Cumulative per-host evidence: run history, prefix sums, probability."""

    srcip: str
    history: tuple[tuple[int, int], ...]
    n_r: int
    d_r: int
    probability: float

    @classmethod
    def from_history(cls, srcip: str, history, params: DetectionParams) -> "HostState":
        history = tuple((int(n), int(d)) for n, d in history)
        for n, d in history:
            _check_nd(n, d)
        n_r = sum(n for n, _ in history)
        d_r = sum(d for _, d in history)
        return cls(srcip, history, n_r, d_r, host_probability(n_r, d_r, params))


def aggregate_run(predictions, srcips) -> dict[str, tuple[int, int]]:
    """Group one run's predictions by srcip: (records seen, detections)."""
    predictions = np.asarray(predictions, dtype=np.int8)
    srcips = np.asarray(srcips, dtype=object)
    if len(predictions) != len(srcips):
        raise SituationError(
            f"length mismatch: {len(predictions)} predictions vs {len(srcips)} srcips"
        )
    out: dict[str, tuple[int, int]] = {}
    for srcip, pred in zip(srcips, predictions):
        key = str(srcip)
        n, d = out.get(key, (0, 0))
        out[key] = (n + 1, d + int(pred))
    return out


def update(hosts: dict[str, HostState], run_counts: dict[str, tuple[int, int]],
           params: DetectionParams) -> dict[str, HostState]:
    """Fold one run's per-host counts into the cumulative host table.

    Known hosts missing from the run keep their state (a host with no
    records this run contributes no trials); new hosts are admitted with
    the run as their first history entry.
    """
    out = dict(hosts)
    for srcip, (n_i, d_i) in run_counts.items():
        _check_nd(n_i, d_i)
        prev = hosts.get(srcip)
        history = (prev.history if prev else ()) + ((int(n_i), int(d_i)),)
        out[srcip] = HostState.from_history(srcip, history, params)
    return out


def host_table_rows(snapshots: list[dict[str, HostState]],
                    types: dict[str, str] | None = None) -> list[dict]:
    """Rows for the per-host report: srcip, type, per-run records, and one
    probability column per run (full precision plus 3-decimal display).

    snapshots[i] is the host table after run i+1; hosts sorted by per-run
    record count descending, then srcip.
    """
    types = types or {}
    if not snapshots:
        return []
    final = snapshots[-1]
    rows = []
    for srcip, state in final.items():
        row = {
            "srcip": srcip,
            "type": types.get(srcip, ""),
            "n": state.history[0][0],
        }
        for i, snap in enumerate(snapshots, start=1):
            prob = snap[srcip].probability if srcip in snap else ""
            row[f"run_{i}"] = prob
        rows.append(row)
    rows.sort(key=lambda r: (-r["n"], r["srcip"]))
    return rows


def host_table_to_csv(rows: list[dict], path, n_runs: int) -> None:
    run_cols = [f"run_{i}" for i in range(1, n_runs + 1)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["srcip", "type", "n", *run_cols, *[f"{c}_3dp" for c in run_cols]])
        for row in rows:
            full = [repr(row[c]) if row[c] != "" else "" for c in run_cols]
            disp = [f"{row[c]:.3f}" if row[c] != "" else "" for c in run_cols]
            writer.writerow([row["srcip"], row["type"], row["n"], *full, *disp])
