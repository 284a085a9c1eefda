"""Bernstein inequalities for sums of symmetric random matrices.

Besides the three calculators this module provides the variance proxy
``nu^2``: a Monte Carlo window estimate (a lower estimate of the supremum
over index sets), an exact value for independent series and a certified
upper bound for the Gaussian-driven matrix series of
:mod:`depbound.process_models`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg

from . import _rng
from .process_models import (
    MatrixSeriesSpec,
    _clip_vectors,
    matrix_centering,
    matrix_second_moment,
    stationary_covariance,
    var_block,
)
from .scalar_bounds import PAPER_EXPLICIT, USER_SUPPLIED, BoundResult, _check_n, _consts, _nonneg, _positive


def lambda_max(a: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric matrix."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(np.abs(a).max(), 1.0)
    if np.abs(a - a.T).max() > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    k = a.shape[0] - 1
    return float(linalg.eigvalsh(a, subset_by_index=[k, k])[0])


def lambda_max_batch(a: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of each matrix in a ``(..., d, d)`` stack."""
    return np.linalg.eigvalsh(a)[..., -1]


# ---------------------------------------------------------------------------
# calculators


def _log2_ratio(n):
    return math.log(n) / math.log(2)


def bernstein_independent(n, x, d, sigma2, M) -> BoundResult:
    """Matrix Bernstein bound for independent summands; ``sigma2 = lambda_max(sum E X_i^2)``."""
    _check_n(n)
    _check_n(d)
    _nonneg(x=x, sigma2=sigma2)
    _positive(M=M)
    den = 2 * sigma2 + 2 * M * x / 3
    raw = d * (math.exp(-x * x / den) if den > 0 else 1.0)
    echo = dict(n=n, x=x, d=d, sigma2=sigma2, M=M)
    return BoundResult("bernstein_independent", raw, echo, PAPER_EXPLICIT, {}, (raw,))


def gamma_tilde(gamma: float, n: int) -> float:
    return _log2_ratio(n) * max(2.0, 32 * math.log(n) / (gamma * math.log(2)))


def bernstein_beta_mixing(n, x, d, nu2, M, gamma, consts=None) -> BoundResult:
    """Matrix Bernstein bound under ``beta(m) <= exp(-gamma (m - 1))``."""
    _check_n(n, 2)
    _check_n(d)
    _nonneg(x=x, nu2=nu2)
    _positive(M=M, gamma=gamma)
    c = _consts("bernstein_beta_mixing", consts)
    gt = gamma_tilde(gamma, n)
    den = nu2 * n + M * M / gamma + x * M * gt
    raw = d * math.exp(-c["C"] * x * x / den)
    echo = dict(n=n, x=x, d=d, nu2=nu2, M=M, gamma=gamma)
    return BoundResult("bernstein_beta_mixing", raw, echo, USER_SUPPLIED, c, (raw,),
                       extras={"gamma_tilde": gt})


def psi_tilde(psi1: float, psi2: float, n: int, d: int) -> tuple[float, float]:
    """``(psi~_1, psi~)`` for the tau-mixing bound."""
    p1 = max(1.0 / d, psi1)
    return p1, _log2_ratio(n) * max(1.0, 8 * math.log(p1 * float(n) ** 6 * d) / psi2)


def bernstein_tau_mixing(n, x, d, nu2, M, psi1, psi2) -> BoundResult:
    """Matrix Bernstein bound under ``tau(m) <= M psi1 exp(-psi2 (m - 1))``."""
    _check_n(n, 2)
    _check_n(d)
    _nonneg(x=x, nu2=nu2)
    _positive(M=M, psi1=psi1, psi2=psi2)
    p1, pt = psi_tilde(psi1, psi2, n, d)
    den = 8 * (15**2 * n * nu2 + 60**2 * M * M / psi2) + 2 * x * M * pt
    raw = d * math.exp(-x * x / den)
    echo = dict(n=n, x=x, d=d, nu2=nu2, M=M, psi1=psi1, psi2=psi2)
    return BoundResult("bernstein_tau_mixing", raw, echo, PAPER_EXPLICIT, {}, (raw,),
                       extras={"psi1_tilde": p1, "psi_tilde": pt})


# ---------------------------------------------------------------------------
# variance proxy


@dataclass(frozen=True)
class MatrixVarianceProxy:
    value: float
    method: str
    windows_used: tuple = ()
    per_window: tuple = ()
    per_window_se: tuple = ()
    reps: int = 0
    se: float = 0.0
    lower_estimate: bool = False
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("variance proxy must be nonnegative")
        if self.method not in ("exact_iid", "window_monte_carlo", "certified_upper"):
            raise ValueError(f"unknown method {self.method!r}")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "windows_used": list(self.windows_used),
            "per_window": list(self.per_window),
            "per_window_se": list(self.per_window_se),
            "reps": self.reps,
            "se": self.se,
            "lower_estimate": self.lower_estimate,
            "extras": dict(self.extras),
        }


def variance_proxy_iid(spec: MatrixSeriesSpec) -> MatrixVarianceProxy:
    """``lambda_max(E X^2)``, the exact proxy for independent summands."""
    if spec.var.transition_norm != 0:
        raise ValueError("the exact proxy needs an independent series (zero transition)")
    return MatrixVarianceProxy(lambda_max(matrix_second_moment(spec)), "exact_iid")


def variance_proxy(
    spec: MatrixSeriesSpec,
    window_sizes: Sequence[int],
    reps: int,
    seed: int,
    n: int | None = None,
    workers: int = 1,
) -> MatrixVarianceProxy:
    """Window Monte Carlo estimate of ``nu^2``.

    For each window size ``w`` the squared window sum is averaged over
    replications and its top eigenvalue divided by ``w``.  The maximum over
    windows is a lower estimate of the supremum over all index sets.
    """
    windows = [int(w) for w in window_sizes]
    if not windows:
        raise ValueError("window_sizes is empty")
    for w in windows:
        if w < 1 or (n is not None and w > n):
            raise ValueError(f"window size {w} outside [1, {n}]")
    if reps < 2:
        raise ValueError("reps must be >= 2")
    C = matrix_centering(spec)
    d = spec.dimension
    vals, ses = [], []
    for w in windows:

        def block(rng, size, offset, w=w):
            v = var_block(spec.var, rng, size, w)
            c = _clip_vectors(spec, v)
            if spec.generator == "diagonal_ar":
                S = np.zeros((size, d, d))
                idx = np.arange(d)
                S[:, idx, idx] = c.sum(axis=1)
            else:
                S = np.einsum("rti,rtj->rij", c, c) - w * C
            return S

        S = _rng.concat(_rng.run_blocks(block, reps, seed, f"nu2:{w}", workers))
        sq = S @ S
        mean = np.array([[math.fsum(sq[:, i, j]) for j in range(d)] for i in range(d)]) / reps
        mean = (mean + mean.T) / 2
        lam, vec = linalg.eigh(mean, subset_by_index=[d - 1, d - 1])
        u = vec[:, 0]
        per = np.einsum("rij,j->ri", S, u)
        per = (per * per).sum(axis=1)
        vals.append(float(lam[0]) / w)
        ses.append(float(np.std(per, ddof=1) / math.sqrt(reps)) / w)
    k = int(np.argmax(vals))
    return MatrixVarianceProxy(vals[k], "window_monte_carlo", tuple(windows), tuple(vals), tuple(ses),
                               reps, ses[k], lower_estimate=True, extras={"argmax_window": windows[k]})


def canonical_correlations(spec: MatrixSeriesSpec, upto: int) -> np.ndarray:
    """Largest canonical correlation between ``v_0`` and ``v_k`` for ``k = 0..upto``."""
    var = spec.var
    if var.is_diagonal:
        return abs(var.kappa) ** np.arange(upto + 1, dtype=float)
    S = stationary_covariance(var)
    w, V = linalg.eigh(S)
    half = (V * np.sqrt(w)) @ V.T
    ihalf = (V / np.sqrt(w)) @ V.T
    A = var.transition
    out = [1.0]
    P = np.eye(var.dimension)
    for _ in range(upto):
        P = P @ A
        out.append(float(np.linalg.norm(half @ P.T @ ihalf, 2)))
    return np.array(out)


def nu2_upper_bound(spec: MatrixSeriesSpec, lags: int = 200) -> MatrixVarianceProxy:
    """Certified ``nu^2 <= lambda_max(E X_0^2) (1 + 2 sum_{k>=1} rho_k)``.

    ``X_t`` is a function of the Gaussian state ``v_t`` alone, so the
    covariance of any coordinates of ``X_i u`` and ``X_j u`` is at most the
    maximal correlation of ``v_i`` and ``v_j`` (their largest canonical
    correlation) times the standard deviations.
    """
    lam = lambda_max(matrix_second_moment(spec))
    rho = canonical_correlations(spec, lags)
    a = spec.var.transition_norm
    if a == 0:
        total = 1.0
    else:
        if spec.var.is_diagonal:
            tail = a ** (lags + 1) / (1 - a)
        else:
            S = stationary_covariance(spec.var)
            w = linalg.eigvalsh(S)
            tail = math.sqrt(w[-1] / w[0]) * a ** (lags + 1) / (1 - a)
        total = 1 + 2 * (math.fsum(rho[1:]) + tail)
    return MatrixVarianceProxy(lam * total, "certified_upper", extras={"lambda_max_EX2": lam, "rho_factor": total})


# ---------------------------------------------------------------------------
# mixing parameters of the clipped generators


def _expected_max_abs_gaussian(sd: np.ndarray) -> float:
    """Upper bound on ``E max_j |Z_j|`` for centered Gaussians with the given sds."""
    d = len(sd)
    return float(np.max(sd)) * math.sqrt(2 * math.log(2 * d))


def tau_mixing_parameters(spec: MatrixSeriesSpec) -> tuple[float, float]:
    """``(psi1, psi2)`` with ``tau(m) <= M psi1 exp(-psi2 (m - 1))`` in spectral norm.

    The coupled copy redraws the state at time 0; clipping is 1-Lipschitz.
    """
    if spec.clip is None:
        raise ValueError("tau-mixing parameters need a clipped (bounded) series")
    a = spec.var.transition_norm
    if a == 0:
        raise ValueError("independent series: use the independent bound")
    M = spec.bound
    S = stationary_covariance(spec.var)
    if spec.generator == "diagonal_ar":
        # |diag(c(v_m)) - diag(c(w_m))| <= kappa^m |v_0 - w_0|_inf
        spread = _expected_max_abs_gaussian(np.sqrt(2 * np.diag(S)))
    else:
        # |c c^T - c' c'^T| <= 2 r |v_m - w_m| <= 2 r ||A||^m |v_0 - w_0|
        spread = 2 * math.sqrt(spec.clip) * math.sqrt(2 * np.trace(S))
    return a * spread / M, -math.log(a)

