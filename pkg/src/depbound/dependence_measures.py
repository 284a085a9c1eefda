"""Coupling-based dependence measures.

Functional dependence measures replace the single innovation at time 0;
the tau coupling regenerates the whole past.  Monte Carlo estimators are
blocked through :mod:`depbound._rng` so results do not depend on the
number of workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from . import _rng
from .process_models import (
    Explicit,
    Geometric,
    InnovationLaw,
    LinearProcessSpec,
    Polynomial,
    VarSpec,
    filter_innovations,
    linear_block,
    stationary_covariance,
)


class UncertifiedError(ValueError):
    """A supremum or infinite sum cannot be certified from the available tail information."""


# ---------------------------------------------------------------------------
# tail certificates


@dataclass(frozen=True)
class GeometricTail:
    """``theta_k <= scale * rate**k`` for every lag ``k`` (equality when ``exact``)."""

    scale: float
    rate: float
    exact: bool = False

    def __post_init__(self):
        if not (0 <= self.rate < 1) or self.scale < 0:
            raise ValueError(f"geometric tail needs 0 <= rate < 1 and scale >= 0, got {self.rate}, {self.scale}")

    def theta(self, k):
        return self.scale * self.rate ** np.asarray(k, dtype=float)

    def sum_from(self, m: int) -> float:
        return self.scale * self.rate**m / (1 - self.rate)

    def dan_sup_from(self, m: int, alpha: float) -> tuple[float, int]:
        """``sup_{k >= m} (k + 1)^alpha * sum_from(k)`` and where it is attained."""
        if self.rate == 0 or self.scale == 0:
            return (0.0, m)
        # (k + 1)^alpha rate^k peaks at k + 1 = alpha / (-log rate)
        peak = alpha / -math.log(self.rate) - 1
        cands = {m}
        if peak > m:
            cands.update({math.floor(peak), math.ceil(peak)})
        best = max(cands, key=lambda k: (k + 1) ** alpha * self.sum_from(k))
        return ((best + 1) ** alpha * self.sum_from(best), best)

    def power_sum_from(self, m: int, s: float, e: float) -> float:
        """Upper bound on ``sum_{j >= m} j^s theta_j^e`` (``m >= 1``, ``s >= 0``, ``e > 0``)."""
        r = self.rate**e
        if r == 0 or self.scale == 0:
            return 0.0
        # term ratio (j+1)^s/j^s * r is largest at j = m
        ratio = ((m + 1) / m) ** s * r
        if ratio >= 1:
            head = math.fsum(j**s * float(self.theta(j)) ** e for j in range(m, 2 * m))
            return head + self.power_sum_from(2 * m, s, e)
        return float(m**s * self.theta(m) ** e) / (1 - ratio)

    def to_dict(self) -> dict:
        return {"kind": "geometric", "scale": self.scale, "rate": self.rate, "exact": self.exact}


@dataclass(frozen=True)
class PowerTail:
    """``theta_k <= scale * (1 + k)**(-beta)``."""

    scale: float
    beta: float
    exact: bool = False

    def theta(self, k):
        return self.scale * (1.0 + np.asarray(k, dtype=float)) ** (-self.beta)

    def sum_from(self, m: int) -> float:
        if self.beta <= 1:
            return math.inf
        return self.scale * float(special.zeta(self.beta, m + 1.0))

    def dan_sup_from(self, m: int, alpha: float) -> tuple[float, int]:
        # zeta(b, k+1) <= (k+1)^-b + (k+1)^(1-b)/(b-1); both pieces nonincreasing when alpha <= b-1
        if self.beta <= 1 or alpha > self.beta - 1:
            raise UncertifiedError(
                f"sup_m (m+1)^alpha Theta_m diverges for a (1+m)^-{self.beta} tail with alpha={alpha}"
            )
        k1 = m + 1.0
        bound = self.scale * (k1 ** (alpha - self.beta) + k1 ** (alpha + 1 - self.beta) / (self.beta - 1))
        return (float(bound), m)

    def power_sum_from(self, m: int, s: float, e: float) -> float:
        # j^s (1+j)^(-beta e) <= j^(s - beta e); integral bound for a decreasing summand
        g = self.beta * e - s
        if g <= 1:
            return math.inf
        return self.scale**e * (m ** (-g) + m ** (1 - g) / (g - 1))

    def to_dict(self) -> dict:
        return {"kind": "power", "scale": self.scale, "beta": self.beta, "exact": self.exact}


@dataclass(frozen=True)
class ZeroTail:
    """``theta_k = 0`` for every lag beyond the tabulated ones."""

    exact: bool = True

    def theta(self, k):
        return np.zeros_like(np.asarray(k, dtype=float))

    def sum_from(self, m: int) -> float:
        return 0.0

    def dan_sup_from(self, m: int, alpha: float) -> tuple[float, int]:
        return (0.0, m)

    def power_sum_from(self, m: int, s: float, e: float) -> float:
        return 0.0

    def to_dict(self) -> dict:
        return {"kind": "zero"}


TailCertificate = GeometricTail | PowerTail | ZeroTail


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True, eq=False)
class DependenceProfile:
    """``theta_{0,p} .. theta_{M,p}`` with optional certificate for lags beyond ``M``."""

    p: float
    theta: np.ndarray
    theta_se: np.ndarray
    provenance: str
    tail: TailCertificate | None = None

    def __post_init__(self):
        th = np.array(self.theta, dtype=float)
        se = np.array(self.theta_se, dtype=float)
        if th.shape != se.shape or th.ndim != 1:
            raise ValueError("theta and theta_se must be 1-d arrays of equal length")
        if np.any(th < 0):
            raise ValueError("functional dependence measures are nonnegative")
        if self.provenance not in ("analytic", "monte_carlo"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        for a in (th, se):
            a.flags.writeable = False
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "theta_se", se)

    @property
    def max_lag(self) -> int:
        return len(self.theta) - 1

    @property
    def tail_bound(self) -> float | None:
        """``sum_{k > M} theta_k`` from the certificate, ``None`` without one."""
        return None if self.tail is None else self.tail.sum_from(self.max_lag + 1)

    @property
    def tail_sums(self) -> np.ndarray:
        """``Theta_{m,p}`` for ``m <= M`` (partial sums when there is no certificate)."""
        tail = self.tail_bound or 0.0
        rev = np.cumsum(self.theta[::-1])[::-1]
        return rev + tail

    def theta_at(self, k: int) -> float:
        if k <= self.max_lag:
            return float(self.theta[k])
        if self.tail is None:
            raise UncertifiedError(f"lag {k} is beyond the computed range and no tail certificate is attached")
        return float(self.tail.theta(k))

    def sum_range(self, lo: int, hi: int | None, weight: Callable | None = None) -> float:
        """``sum_{lo <= j <= hi} w(j) theta_j``; ``hi=None`` means to infinity (unweighted only)."""
        if hi is None:
            if weight is not None:
                raise ValueError("weighted infinite sums are not supported")
            head = math.fsum(self.theta[lo:]) if lo <= self.max_lag else 0.0
            if self.tail is None:
                raise UncertifiedError("infinite sum of theta needs a tail certificate")
            return head + self.tail.sum_from(max(lo, self.max_lag + 1))
        js = np.arange(lo, hi + 1)
        if len(js) == 0:
            return 0.0
        known = js[js <= self.max_lag]
        vals = list(self.theta[known])
        if hi > self.max_lag:
            if self.tail is None:
                raise UncertifiedError(
                    f"sum up to lag {hi} needs lags beyond {self.max_lag}; attach a tail certificate"
                )
            extra = js[js > self.max_lag]
            vals.extend(self.tail.theta(extra))
        vals = np.asarray(vals, dtype=float)
        if weight is not None:
            vals = vals * weight(js.astype(float))
        return math.fsum(vals)

    def with_tail(self, tail: TailCertificate) -> "DependenceProfile":
        return DependenceProfile(self.p, self.theta, self.theta_se, self.provenance, tail)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "provenance": self.provenance,
            "lags": list(range(self.max_lag + 1)),
            "theta": self.theta.tolist(),
            "se": self.theta_se.tolist(),
            "Theta": self.tail_sums.tolist(),
            "tail_bound": self.tail_bound,
            "tail": None if self.tail is None else self.tail.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self, alphas: Sequence[float] = ()) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "theta", "se", "Theta"] + [f"dan_alpha_{a:g}" for a in alphas])
        Theta = self.tail_sums
        for m in range(self.max_lag + 1):
            row = [m, repr(float(self.theta[m])), repr(float(self.theta_se[m])), repr(float(Theta[m]))]
            row += [repr(float((m + 1) ** a * Theta[m])) for a in alphas]
            w.writerow(row)
        return buf.getvalue()


@dataclass(frozen=True)
class DanValue:
    p: float
    alpha: float
    value: float
    argmax_m: int
    certified: bool

    def to_dict(self) -> dict:
        return {"p": self.p, "alpha": self.alpha, "value": self.value,
                "argmax_m": self.argmax_m, "certified": self.certified}


# ---------------------------------------------------------------------------
# analytic linear profiles


def coefficient_tail(spec: LinearProcessSpec, factor: float, exact: bool = True) -> TailCertificate:
    """Certificate for ``factor * |f_k|`` under the spec's (untruncated) coefficient rule."""
    rule = spec.coefficients
    if isinstance(rule, Geometric):
        return GeometricTail(factor, abs(rule.kappa), exact)
    if isinstance(rule, Polynomial):
        return PowerTail(factor * rule.K, rule.beta, exact)
    return ZeroTail()


def fdm_analytic_linear(spec: LinearProcessSpec, p: float, max_lag: int) -> DependenceProfile:
    """Exact ``theta_{m,p} = |f_m| * ||eps_0 - eps_0'||_p`` for the untruncated rule."""
    dp = spec.innovation.diff_lp_norm(p)
    rule = spec.coefficients
    f = np.abs(rule.coefficients(max_lag))
    tail = coefficient_tail(spec, dp)
    if isinstance(tail, PowerTail) and tail.beta <= 1:
        # long-range dependence: Theta_m is infinite, only theta is reported
        tail = None
    return DependenceProfile(p, f * dp, np.zeros(max_lag + 1), "analytic", tail)


# ---------------------------------------------------------------------------
# Monte Carlo FDM


def _accumulate(parts):
    """Sum per-block ``(sum, sum_sq, count)`` triples in block order with compensation."""
    sums = np.array([p[0] for p in parts])
    sqs = np.array([p[1] for p in parts])
    count = sum(p[2] for p in parts)
    s = np.array([math.fsum(col) for col in sums.T])
    q = np.array([math.fsum(col) for col in sqs.T])
    return s, q, count


def _moment_to_norm(mean_y: np.ndarray, sq_y: np.ndarray, count: int, p: float):
    """``(mean Y)^(1/p)`` and its delta-method standard error."""
    var_y = np.maximum(sq_y / count - mean_y**2, 0.0) * count / max(count - 1, 1)
    se_mean = np.sqrt(var_y / count)
    est = mean_y ** (1.0 / p)
    with np.errstate(divide="ignore", invalid="ignore"):
        se = np.where(mean_y > 0, est / (p * mean_y) * se_mean, 0.0)
    return est, se


def _check_finite(vals: np.ndarray, offset: int, what: str = "g"):
    bad = ~np.isfinite(vals)
    if np.any(bad):
        rep = offset + int(np.argmax(bad.reshape(bad.shape[0], -1).any(axis=1)))
        raise FloatingPointError(f"{what} returned a non-finite value at replication {rep}")


def fdm_monte_carlo(
    g: Callable[[np.ndarray], np.ndarray],
    law: InnovationLaw,
    p: float,
    max_lag: int,
    window: int,
    reps: int,
    seed: int,
    workers: int = 1,
) -> DependenceProfile:
    """Monte Carlo ``theta_{m,p}`` for a black-box causal map.

    ``g`` receives innovations of shape ``(batch, window + 1)`` ordered
    oldest to newest (the last column is ``eps_t``) and returns the batch of
    ``X_t``.  ``X_m`` and its coupled copy share every innovation except
    ``eps_0``.
    """
    if window < max_lag:
        raise ValueError(f"window ({window}) must be >= max_lag ({max_lag})")
    if reps < 100:
        raise ValueError(f"reps must be >= 100, got {reps}")

    def block(rng, size, offset):
        eps = law.sample(rng, (size, window + max_lag + 1))
        alt = law.sample(rng, size)
        eps2 = eps.copy()
        eps2[:, window] = alt  # column `window` is eps_0
        ys = np.empty((size, max_lag + 1))
        for m in range(max_lag + 1):
            a = np.asarray(g(eps[:, m : m + window + 1]), dtype=float)
            b = np.asarray(g(eps2[:, m : m + window + 1]), dtype=float)
            _check_finite(a, offset)
            _check_finite(b, offset)
            ys[:, m] = np.abs(a - b) ** p
        return ys.sum(axis=0), (ys**2).sum(axis=0), size

    parts = _rng.run_blocks(block, reps, seed, "fdm", workers)
    s, q, count = _accumulate(parts)
    est, se = _moment_to_norm(s / count, q, count, p)
    return DependenceProfile(p, est, se, "monte_carlo", None)


def linear_map(weights: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Causal map of a finite moving average for :func:`fdm_monte_carlo`."""
    w = np.asarray(weights, dtype=float)[::-1]

    def g(eps):
        return eps[:, -len(w):] @ w

    return g


# ---------------------------------------------------------------------------
# dependence-adjusted norm


def dan(profile: DependenceProfile, alpha: float) -> DanValue:
    """``sup_{m >= 0} (m + 1)^alpha Theta_{m,p}``."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    Theta = profile.tail_sums
    vals = (np.arange(profile.max_lag + 1) + 1.0) ** alpha * Theta
    best = int(np.argmax(vals))
    value = float(vals[best])
    if alpha == 0:
        # Theta is nonincreasing; the sup sits at m = 0
        return DanValue(profile.p, alpha, float(Theta[0]), 0, profile.tail is not None)
    if profile.tail is None:
        raise UncertifiedError(
            "the supremum over lags beyond the computed range cannot be certified without a tail bound"
        )
    beyond, where = _dan_beyond(profile, alpha)
    if beyond > value:
        value, best = beyond, where
    return DanValue(profile.p, alpha, value, best, True)


def _dan_beyond(profile: DependenceProfile, alpha: float) -> tuple[float, int]:
    return profile.tail.dan_sup_from(profile.max_lag + 1, alpha)


# ---------------------------------------------------------------------------
# uniform (vector) functional dependence


@dataclass(frozen=True)
class LipschitzVectorSpec:
    """``X_{ij} = g_j(W_i) - E g_j(W_i)`` for a scalar linear process ``W``.

    ``maps`` takes a batch of ``W`` values, shape ``(batch,)``, and returns
    shape ``(batch, d)``.  Centering does not affect coupled differences.
    """

    base: LinearProcessSpec
    maps: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    dimension: int


@dataclass(frozen=True, eq=False)
class UniformFdmProfile:
    q: float
    alpha: float
    delta: np.ndarray
    delta_se: np.ndarray
    coord_theta: np.ndarray  # (M + 1, d)
    coord_se: np.ndarray
    tail: TailCertificate | None

    @property
    def max_lag(self) -> int:
        return len(self.delta) - 1

    def vector_profile(self) -> DependenceProfile:
        return DependenceProfile(self.q, self.delta, self.delta_se, "monte_carlo", self.tail)

    def coordinate_profile(self, j: int) -> DependenceProfile:
        return DependenceProfile(self.q, self.coord_theta[:, j], self.coord_se[:, j], "monte_carlo", self.tail)

    @property
    def omega(self) -> np.ndarray:
        """``Omega_{m,q}``, tail sums of ``delta``."""
        return self.vector_profile().tail_sums

    @property
    def dan_inf(self) -> DanValue:
        return dan(self.vector_profile(), self.alpha)

    @property
    def psi(self) -> float:
        """Coordinate-max DAN ``max_j ||X_{.j}||_{q,alpha}``."""
        return max(dan(self.coordinate_profile(j), self.alpha).value for j in range(self.coord_theta.shape[1]))

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "alpha": self.alpha,
            "delta": self.delta.tolist(),
            "delta_se": self.delta_se.tolist(),
            "Omega": self.omega.tolist(),
            "coord_theta": self.coord_theta.tolist(),
            "dan_inf": self.dan_inf.to_dict() if self.tail is not None or self.alpha == 0 else None,
            "psi": self.psi if self.tail is not None or self.alpha == 0 else None,
        }


def _chi_norm(d: int, q: float) -> float:
    """``|| |Z|_2 ||_q`` for ``Z ~ N(0, I_d)``."""
    return math.exp((q / 2 * math.log(2) + special.gammaln((d + q) / 2) - special.gammaln(d / 2)) / q)


def uniform_fdm(
    spec: VarSpec | LipschitzVectorSpec,
    q: float,
    alpha: float,
    max_lag: int,
    reps: int,
    seed: int,
    workers: int = 1,
) -> UniformFdmProfile:
    """Monte Carlo ``delta_{i,q}`` (max inside the norm) and per-coordinate ``theta_{i,q,j}``."""
    if reps < 100:
        raise ValueError(f"reps must be >= 100, got {reps}")
    if isinstance(spec, VarSpec):
        return _uniform_fdm_var(spec, q, alpha, max_lag, reps, seed, workers)
    return _uniform_fdm_lipschitz(spec, q, alpha, max_lag, reps, seed, workers)


def _finish_uniform(parts, q, alpha, max_lag, d, tail):
    s, sq, count = _accumulate(parts)
    s = s.reshape(max_lag + 1, d + 1)
    sq = sq.reshape(max_lag + 1, d + 1)
    est, se = _moment_to_norm(s / count, sq, count, q)
    return UniformFdmProfile(q, alpha, est[:, 0], se[:, 0], est[:, 1:], se[:, 1:], tail)


def _uniform_fdm_var(spec, q, alpha, max_lag, reps, seed, workers):
    d = spec.dimension
    A = spec.transition
    powers = [np.eye(d)]
    for _ in range(max_lag):
        powers.append(powers[-1] @ A)
    sd = np.sqrt(spec.innovation_diag)

    def block(rng, size, offset):
        diff = (rng.standard_normal((size, d)) - rng.standard_normal((size, d))) * sd
        ys = np.empty((size, max_lag + 1, d + 1))
        for m, P in enumerate(powers):
            delta = np.abs(diff @ P.T)
            ys[:, m, 0] = delta.max(axis=1) ** q
            ys[:, m, 1:] = delta**q
        ys = ys.reshape(size, -1)
        return ys.sum(axis=0), (ys**2).sum(axis=0), size

    parts = _rng.run_blocks(block, reps, seed, "uniform_fdm", workers)
    # |A^m (E0 - E0')|_inf <= ||A||^m |E0 - E0'|_2 and |E0 - E0'|_2 <= sqrt(2 max var) |Z|_2
    scale = math.sqrt(2 * float(np.max(spec.innovation_diag))) * _chi_norm(d, q)
    tail = GeometricTail(scale, spec.transition_norm)
    return _finish_uniform(parts, q, alpha, max_lag, d, tail)


def _uniform_fdm_lipschitz(spec, q, alpha, max_lag, reps, seed, workers):
    base = spec.base
    lag = base.truncation_lag
    f = base.weights
    d = spec.dimension
    law = base.innovation

    def block(rng, size, offset):
        eps = law.sample(rng, (size, lag + max_lag + 1))
        alt = law.sample(rng, size)
        # column `lag` holds eps_0; W_m = sum_j f_j eps_{m-j}
        W = filter_innovations(eps, f, max_lag + 1)
        dW = np.zeros((size, max_lag + 1))
        for m in range(min(max_lag, lag) + 1):
            dW[:, m] = f[m] * (alt - eps[:, lag])
        ys = np.empty((size, max_lag + 1, d + 1))
        for m in range(max_lag + 1):
            a = np.asarray(spec.maps(W[:, m]), dtype=float).reshape(size, d)
            b = np.asarray(spec.maps(W[:, m] + dW[:, m]), dtype=float).reshape(size, d)
            _check_finite(a, offset, "maps")
            _check_finite(b, offset, "maps")
            delta = np.abs(a - b)
            ys[:, m, 0] = delta.max(axis=1) ** q
            ys[:, m, 1:] = delta**q
        ys = ys.reshape(size, -1)
        return ys.sum(axis=0), (ys**2).sum(axis=0), size

    parts = _rng.run_blocks(block, reps, seed, "uniform_fdm", workers)
    # |X_m - X_m'|_inf <= L |f_m| |eps_0 - eps_0'|
    tail = coefficient_tail(base, spec.lipschitz * law.diff_lp_norm(q), exact=False)
    if isinstance(tail, PowerTail) and tail.beta <= 1:
        tail = None
    return _finish_uniform(parts, q, alpha, max_lag, d, tail)


# ---------------------------------------------------------------------------
# tau coupling


@dataclass(frozen=True)
class TauEstimate:
    m: int
    value: float
    se: float
    reps: int

    def to_dict(self) -> dict:
        return {"m": self.m, "value": self.value, "se": self.se, "reps": self.reps}


def tau_coupling_bound(spec, m: int, reps: int, seed: int, workers: int = 1) -> TauEstimate:
    """Monte Carlo ``E||X_m - Y_m||`` where ``Y`` redraws every innovation up to time 0.

    Scalar processes use ``|.|``; VAR vectors use the Euclidean norm.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if isinstance(spec, LinearProcessSpec):
        f = spec.weights
        lag = spec.truncation_lag
        law = spec.innovation
        w = f[m:] if m <= lag else np.zeros(0)

        def block(rng, size, offset):
            if len(w) == 0:
                return np.zeros(1), np.zeros(1), size
            # innovations eps_0, eps_{-1}, ... enter X_m with weights f_m, f_{m+1}, ...
            diff = law.sample(rng, (size, len(w))) - law.sample(rng, (size, len(w)))
            y = np.abs(diff @ w)
            return np.array([y.sum()]), np.array([(y * y).sum()]), size

    elif isinstance(spec, VarSpec):
        S = stationary_covariance(spec)
        L = np.linalg.cholesky(S)
        Am = np.linalg.matrix_power(spec.transition, m)
        d = spec.dimension

        def block(rng, size, offset):
            x0 = rng.standard_normal((size, d)) @ L.T
            y0 = rng.standard_normal((size, d)) @ L.T
            y = np.linalg.norm((x0 - y0) @ Am.T, axis=1)
            return np.array([y.sum()]), np.array([(y * y).sum()]), size

    else:
        raise TypeError(f"tau coupling needs a linear or VAR spec, got {type(spec).__name__}")

    parts = _rng.run_blocks(block, reps, seed, "tau", workers)
    s, q, count = _accumulate(parts)
    mean = float(s[0] / count)
    var = max(float(q[0] / count) - mean**2, 0.0) * count / max(count - 1, 1)
    return TauEstimate(m, mean, math.sqrt(var / count), reps)


# ---------------------------------------------------------------------------
# weak dependence covariance probe


def psi_table(lip1: float, lip2: float, u: int, v: int) -> dict[str, float]:
    """The four weak-dependence ``psi`` conventions."""
    return {
        "theta": v * lip2,
        "eta": u * lip1 + v * lip2,
        "kappa": u * v * lip1 * lip2,
        "lambda": u * lip1 + v * lip2 + u * v * lip1 * lip2,
    }


@dataclass(frozen=True)
class WeakDependenceProbe:
    cov: float
    abs_cov: float
    se: float
    gap: int
    psi: dict
    zeta: dict
    metric: str = "sum_of_coordinate_distances"

    def to_dict(self) -> dict:
        return {"cov": self.cov, "abs_cov": self.abs_cov, "se": self.se, "gap": self.gap,
                "psi": self.psi, "zeta": self.zeta, "metric": self.metric}


def weak_dependence_probe(
    spec: LinearProcessSpec | VarSpec,
    g1: Callable[[np.ndarray], np.ndarray],
    g2: Callable[[np.ndarray], np.ndarray],
    lip1: float,
    lip2: float,
    u: int,
    v: int,
    gap: int,
    reps: int,
    seed: int,
    workers: int = 1,
) -> WeakDependenceProbe:
    """Estimate ``Cov(g1(X_{s_1..s_u}), g2(X_{t_1..t_v}))`` with ``t_1 - s_u = gap``.

    Times are consecutive: ``s = 0..u-1`` and ``t = u-1+gap .. u-2+gap+v``.
    ``g1`` receives shape ``(batch, u)`` for scalar processes and
    ``(batch, u, d)`` for vector ones; ``g2`` likewise with ``v``.
    """
    if lip1 <= 0 or lip2 <= 0:
        raise ValueError("declared Lipschitz constants must be positive")
    if gap < 1:
        raise ValueError(f"gap must be >= 1, got {gap}")
    n = u + gap + v - 1
    s_idx = np.arange(u)
    t_idx = np.arange(u - 1 + gap, u - 1 + gap + v)

    def block(rng, size, offset):
        if isinstance(spec, LinearProcessSpec):
            X = linear_block(spec, rng, size, n)
        else:
            from .process_models import var_block

            X = var_block(spec, rng, size, n)
        a = np.asarray(g1(X[:, s_idx]), dtype=float)
        b = np.asarray(g2(X[:, t_idx]), dtype=float)
        return a, b

    parts = _rng.run_blocks(block, reps, seed, "weak_dep", workers)
    a = np.concatenate([p[0] for p in parts])
    b = np.concatenate([p[1] for p in parts])
    ca = a - math.fsum(a) / len(a)
    cb = b - math.fsum(b) / len(b)
    prod = ca * cb
    cov = math.fsum(prod) / (len(a) - 1)
    se = float(np.std(prod, ddof=1) / math.sqrt(len(a)))
    psi = psi_table(lip1, lip2, u, v)
    return WeakDependenceProbe(cov, abs(cov), se, gap, psi, {k: abs(cov) / val for k, val in psi.items()})
