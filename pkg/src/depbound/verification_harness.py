"""Monte Carlo tail probabilities, bound-versus-simulation reports and the
Toeplitz/periodogram eigenvalue check."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg, optimize, stats

from . import _rng
from .dependence_measures import dan, fdm_analytic_linear
from .process_models import (
    LinearProcessSpec,
    MatrixSeriesSpec,
    VarSpec,
    linear_block,
    matrix_sum_block,
    spec_to_dict,
    var_block,
)
from .scalar_bounds import USER_SUPPLIED, BoundResult, InapplicableBoundError, _consts

CI_LEVEL = 0.99
STATISTICS = ("abs_sum", "sum", "max_abs_sum_coord", "matrix_lambda_max", "u_statistic")


def clopper_pearson(k: int, n: int, level: float = CI_LEVEL) -> tuple[float, float]:
    """Exact two-sided binomial confidence interval."""
    a = (1 - level) / 2
    lo = 0.0 if k == 0 else float(stats.beta.ppf(a, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - a, k + 1, n - k))
    return lo, hi


@dataclass(frozen=True)
class TailEstimate:
    n: int
    x: float
    p_hat: float
    ci_low: float
    ci_high: float
    reps: int
    seed: int
    statistic: str = "abs_sum"
    count: int = 0

    def __post_init__(self):
        if not (0 <= self.ci_low <= self.p_hat <= self.ci_high <= 1):
            raise ValueError("confidence interval must bracket p_hat inside [0, 1]")

    @property
    def se(self) -> float:
        return math.sqrt(self.p_hat * (1 - self.p_hat) / self.reps)

    def to_dict(self) -> dict:
        return {"n": self.n, "x": self.x, "p_hat": self.p_hat, "ci_low": self.ci_low, "ci_high": self.ci_high,
                "reps": self.reps, "seed": self.seed, "statistic": self.statistic, "count": self.count}


def _stat_block(spec, statistic: str, n: int, kernel=None):
    if statistic in ("abs_sum", "sum"):
        if isinstance(spec, LinearProcessSpec):
            def f(rng, size, offset):
                s = linear_block(spec, rng, size, n).sum(axis=1)
                return np.abs(s) if statistic == "abs_sum" else s
            return f
        if isinstance(spec, VarSpec) and spec.dimension == 1:
            def f(rng, size, offset):
                s = var_block(spec, rng, size, n)[:, :, 0].sum(axis=1)
                return np.abs(s) if statistic == "abs_sum" else s
            return f
        raise TypeError(f"{statistic} needs a scalar process spec")
    if statistic == "max_abs_sum_coord":
        if not isinstance(spec, VarSpec):
            raise TypeError("max_abs_sum_coord needs a VarSpec")
        return lambda rng, size, offset: np.abs(var_block(spec, rng, size, n).sum(axis=1)).max(axis=1)
    if statistic == "matrix_lambda_max":
        if not isinstance(spec, MatrixSeriesSpec):
            raise TypeError("matrix_lambda_max needs a MatrixSeriesSpec")
        return lambda rng, size, offset: np.linalg.eigvalsh(matrix_sum_block(spec, rng, size, n))[:, -1]
    if statistic == "u_statistic":
        from .ustat_vstat import u_statistic

        if kernel is None:
            raise ValueError("u_statistic needs a kernel")

        def f(rng, size, offset):
            if isinstance(spec, LinearProcessSpec):
                paths = linear_block(spec, rng, size, n)
            elif isinstance(spec, VarSpec):
                paths = var_block(spec, rng, size, n)
            else:
                raise TypeError("u_statistic needs a linear or VAR spec")
            return np.abs(np.array([u_statistic(p, kernel) for p in paths]))
        return f
    raise ValueError(f"unknown statistic {statistic!r}; choose from {STATISTICS}")


def simulate_statistic(spec, statistic: str, n: int, reps: int, seed: int, kernel=None, workers: int = 1):
    """The statistic for each replication, in replication order."""
    f = _stat_block(spec, statistic, n, kernel)
    return _rng.concat(_rng.run_blocks(f, reps, seed, f"tail:{statistic}:{n}", workers))


def estimate_tail(spec, statistic: str, n: int, x_grid: Sequence[float], reps: int, seed: int,
                  kernel=None, workers: int = 1) -> list[TailEstimate]:
    """``P(T >= x)`` for every ``x`` in the grid from one simulation pass."""
    if reps < 1000:
        raise ValueError(f"reps must be >= 1000, got {reps}")
    vals = np.sort(simulate_statistic(spec, statistic, n, reps, seed, kernel, workers))
    out = []
    for x in x_grid:
        k = int(reps - np.searchsorted(vals, x, side="left"))
        lo, hi = clopper_pearson(k, reps)
        out.append(TailEstimate(int(n), float(x), k / reps, lo, hi, int(reps), int(seed), statistic, k))
    return out


# ---------------------------------------------------------------------------
# comparison reports


VERDICTS = ("dominated", "vacuous_bound", "violation_flag", "not_applicable")
REPORT_COLUMNS = ("theorem", "n", "x", "bound_raw", "bound_clamped", "p_hat", "ci_low", "ci_high", "verdict")


def verdict(bound: BoundResult, est: TailEstimate) -> str:
    if est.ci_low > bound.clamped:
        return "violation_flag"
    if bound.vacuous:
        return "vacuous_bound"
    return "dominated"


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    x: float
    bound: BoundResult | None
    estimate: TailEstimate
    verdict: str
    note: str = ""

    def to_dict(self) -> dict:
        return {"n": self.n, "x": self.x, "bound": None if self.bound is None else self.bound.to_dict(),
                "estimate": self.estimate.to_dict(), "verdict": self.verdict, "note": self.note}


@dataclass(frozen=True)
class ComparisonReport:
    theorem: str
    spec: dict
    params: dict
    statistic: str
    constants_source: str | None
    rows: tuple
    applicable: bool = True
    hypothesis_failures: tuple = ()
    reps: int = 0
    seed: int = 0

    @property
    def violations(self) -> int:
        return sum(r.verdict == "violation_flag" for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "spec": self.spec,
            "params": self.params,
            "statistic": self.statistic,
            "constants_source": self.constants_source,
            "applicable": self.applicable,
            "hypothesis_failures": list(self.hypothesis_failures),
            "reps": self.reps,
            "seed": self.seed,
            "violations": self.violations,
            "rows": [r.to_dict() for r in self.rows],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in self.rows:
            b = r.bound
            w.writerow([
                self.theorem, r.n, repr(r.x),
                "" if b is None else repr(b.raw_value), "" if b is None else repr(b.clamped),
                repr(r.estimate.p_hat), repr(r.estimate.ci_low), repr(r.estimate.ci_high),
                "" if r.verdict is None else r.verdict,
            ])
        return buf.getvalue()


def compare(bound_id: str, spec, params: dict, x_grid: Sequence[float], reps: int, seed: int,
            kernel=None, workers: int = 1, consts: dict | None = None) -> ComparisonReport:
    """Pair a bound with the simulated tail at every ``x``; neither side is altered."""
    from .registry import REGISTRY, check_hypotheses

    entry = REGISTRY[bound_id]
    params = dict(params)
    n = int(params["n"])
    statistic = entry.statistic
    failures = tuple(check_hypotheses(bound_id, spec, params))
    ests = estimate_tail(spec, statistic, n, x_grid, reps, seed, kernel, workers)
    rows = []
    source = None
    for est in ests:
        if failures:
            rows.append(ComparisonRow(n, est.x, None, est, None))
            continue
        try:
            b = entry.evaluate({**params, "x": est.x}, consts)
        except InapplicableBoundError as e:
            rows.append(ComparisonRow(n, est.x, None, est, "not_applicable", str(e)))
            continue
        source = b.constants_source
        rows.append(ComparisonRow(n, est.x, b, est, verdict(b, est)))
    return ComparisonReport(bound_id, spec_to_dict(spec), params, statistic, source, tuple(rows),
                            applicable=not failures, hypothesis_failures=failures, reps=reps, seed=seed)


# ---------------------------------------------------------------------------
# autocovariance eigenvalue versus periodogram maximum


def sample_autocovariances(w: np.ndarray) -> np.ndarray:
    """``gamma_k = n^{-1} sum_{l>k} W_l W_{l-k}`` for ``k = 0..n-1``."""
    n = len(w)
    size = 1 << int(math.ceil(math.log2(2 * n)))
    f = np.fft.rfft(w, size)
    return np.fft.irfft(f.real**2 + f.imag**2, size)[:n] / n


def toeplitz_lambda_max(gamma: np.ndarray) -> float:
    n = len(gamma)
    return float(linalg.eigvalsh(linalg.toeplitz(gamma), subset_by_index=[n - 1, n - 1])[0])


def periodogram_max(w: np.ndarray, grid_factor: int = 8, refine: int = 8) -> float:
    """``max_theta |sum_t W_t e^{i t theta}|^2 / n`` by grid search plus local refinement."""
    n = len(w)
    if not np.any(w):
        return 0.0
    size = grid_factor * n
    vals = np.abs(np.fft.fft(w, size)) ** 2
    t = np.arange(1, n + 1)
    h = 2 * math.pi / size

    def neg(theta):
        return -abs(np.dot(w, np.exp(1j * t * theta))) ** 2

    # candidate local maxima on the circular grid
    left, right = np.roll(vals, 1), np.roll(vals, -1)
    peaks = np.flatnonzero((vals >= left) & (vals >= right))
    peaks = peaks[np.argsort(vals[peaks])[::-1][:refine]]
    best = float(vals.max())
    for k in peaks:
        c = k * h
        r = optimize.minimize_scalar(neg, bounds=(c - h, c + h), method="bounded",
                                     options={"xatol": 1e-12})
        best = max(best, -float(r.fun))
    return best / n


@dataclass(frozen=True)
class AutocovCheck:
    n: int
    reps: int
    seed: int
    lambda_max: np.ndarray
    fourier_max: np.ndarray
    slack: float
    holds: int
    tail_rows: tuple = ()

    @property
    def all_hold(self) -> bool:
        return self.holds == self.reps

    def to_dict(self) -> dict:
        gap = self.fourier_max - self.lambda_max
        return {
            "n": self.n, "reps": self.reps, "seed": self.seed, "slack": self.slack,
            "holds": self.holds, "all_hold": self.all_hold,
            "min_gap": float(gap.min()), "mean_lambda_max": float(self.lambda_max.mean()),
            "mean_fourier_max": float(self.fourier_max.mean()),
            "tail": [r.to_dict() for r in self.tail_rows],
        }


def autocov_tail_bound(n: int, u: float, q: float, dan_q: float, dan_2: float, consts=None) -> BoundResult:
    """Tail bound for the largest eigenvalue of the sample autocovariance matrix."""
    c = _consts("nagaev_vector_max", consts)
    C = c["C_q_alpha"]
    thr = C * dan_2**2 * math.log(n)
    if u < thr:
        raise InapplicableBoundError(f"inequality not applicable: u = {u} is below the threshold {thr}", thr)
    t1 = C * n * math.log(n) ** (q / 2) * dan_q**q / (n * u) ** (q / 2)
    t2 = C * math.exp(-C * u / dan_2**2)
    echo = dict(n=n, u=u, q=q, dan_q=dan_q, dan_2=dan_2)
    return BoundResult("autocov_lambda_max", t1 + t2, echo, USER_SUPPLIED, c, (t1, t2), extras={"threshold": thr})


def autocov_eigen_check(spec, n: int, reps: int, seed: int, slack: float = 1e-8,
                        u_grid: Sequence[float] = (), q: float = 4.0, alpha: float = 1.0,
                        consts=None, workers: int = 1) -> AutocovCheck:
    """Check ``lambda_max(Toeplitz(gamma)) <= max_theta |S_n(theta)|^2 / n`` in every replication."""
    if n > 2048:
        raise ValueError("n must be <= 2048")
    if isinstance(spec, LinearProcessSpec):
        paths_fn = lambda rng, size: linear_block(spec, rng, size, n)
    elif isinstance(spec, VarSpec) and spec.dimension == 1:
        paths_fn = lambda rng, size: var_block(spec, rng, size, n)[:, :, 0]
    else:
        raise TypeError("autocov check needs a scalar causal spec")

    def block(rng, size, offset):
        W = paths_fn(rng, size)
        lam = np.array([toeplitz_lambda_max(sample_autocovariances(w)) for w in W])
        fmax = np.array([periodogram_max(w) for w in W])
        return lam, fmax

    parts = _rng.run_blocks(block, reps, seed, f"autocov:{n}", workers)
    lam = np.concatenate([p[0] for p in parts])
    fmax = np.concatenate([p[1] for p in parts])
    holds = int(np.count_nonzero(lam <= fmax * (1 + slack) + slack * np.finfo(float).tiny))
    rows = []
    if len(u_grid):
        if not isinstance(spec, LinearProcessSpec):
            raise TypeError("the tail bound needs a linear spec with analytic dependence measures")
        M = 200
        dq = dan(fdm_analytic_linear(spec, q, M), alpha).value
        d2 = dan(fdm_analytic_linear(spec, 2, M), alpha).value
        srt = np.sort(lam)
        for u in u_grid:
            k = int(reps - np.searchsorted(srt, u, side="left"))
            lo, hi = clopper_pearson(k, reps)
            est = TailEstimate(int(n), float(u), k / reps, lo, hi, int(reps), int(seed), "toeplitz_lambda_max", k)
            try:
                b = autocov_tail_bound(n, u, q, dq, d2, consts)
                rows.append(ComparisonRow(n, float(u), b, est, verdict(b, est)))
            except InapplicableBoundError as e:
                rows.append(ComparisonRow(n, float(u), None, est, "not_applicable", str(e)))
    return AutocovCheck(int(n), int(reps), int(seed), lam, fmax, slack, holds, tuple(rows))
