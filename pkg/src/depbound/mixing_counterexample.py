"""Alpha- versus beta-mixing for high-dimensional Gaussian VAR(1).

The alpha coefficient of a Gaussian VAR admits a dimension-free bound,
while for ``d`` independent AR(1) coordinates the beta coefficient is
bounded below by a quantity tending to 1 as ``d`` grows.  The separation
witness makes the second fact visible by simulation: it compares the joint
law of ``(X_0, X_m)`` with the product of its marginals on one event.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import _rng
from .process_models import Explicit, Geometric, LinearProcessSpec, VarSpec, stationary_covariance

ALPHA_MAX = 0.25


@dataclass(frozen=True)
class AlphaBound:
    raw: float
    clamped: float
    eigen_ratio: float
    transition_norm: float
    m: int

    def to_dict(self) -> dict:
        return {"raw": self.raw, "clamped": self.clamped, "eigen_ratio": self.eigen_ratio,
                "transition_norm": self.transition_norm, "m": self.m}


def alpha_upper_bound(spec: VarSpec, m: int) -> AlphaBound:
    """``sqrt(lambda_max(Sigma) / lambda_min(Sigma)) * ||A||^m``.

    ``raw`` is the formula's value; ``clamped`` caps it at 1/4, the largest
    value an alpha coefficient can take.
    """
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m}")
    if spec.is_diagonal:
        # Sigma = diag(s_j / (1 - kappa^2)); A = kappa I
        s = spec.innovation_diag
        ratio = float(np.max(s) / np.min(s))
    else:
        w = linalg.eigvalsh(stationary_covariance(spec))
        if not w[0] > 0 or w[-1] / w[0] > 1e14:
            raise np.linalg.LinAlgError("stationary covariance is singular")
        ratio = float(w[-1] / w[0])
    a = spec.transition_norm
    raw = (1.0 if ratio == 1.0 else math.sqrt(ratio)) * a**m
    return AlphaBound(raw, min(raw, ALPHA_MAX), ratio, a, int(m))


def beta_lower_bound(d: int, kappa: float, m: int) -> float:
    """``1 - 2 exp(-d kappa^(2m) / (18 pi^2))``."""
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d}")
    if not (0 < kappa < 1):
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    return min(1.0, 1 - 2 * math.exp(-d * kappa ** (2 * m) / (18 * math.pi**2)))


def hoeffding_guarantee(d: int, kappa: float, m: int) -> float:
    """``1 - 2 exp(-d eta^2 / 2)`` with ``eta = kappa^m / (3 pi)``."""
    eta = kappa**m / (3 * math.pi)
    return 1 - 2 * math.exp(-d * eta * eta / 2)


def markov_collapse_check(spec, m: int) -> dict:
    """Record that the process coefficient reduces to ``beta(sigma(X_0), sigma(X_m))``.

    Holds for Markov chains: any VAR(1), or a scalar linear process that is
    an AR(1) or i.i.d.  Anything else is refused.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if isinstance(spec, VarSpec):
        kind = "VAR(1)"
    elif isinstance(spec, LinearProcessSpec) and isinstance(spec.coefficients, Geometric):
        kind = "AR(1)"
    elif isinstance(spec, LinearProcessSpec) and isinstance(spec.coefficients, Explicit) \
            and np.count_nonzero(spec.coefficients.values) <= 1:
        kind = "i.i.d."
    else:
        raise ValueError(
            "process is not Markov (finite- or infinite-order moving average); "
            "the two-time beta coefficient does not determine the process coefficient"
        )
    return {
        "markov": True,
        "model": kind,
        "m": int(m),
        "statement": "beta(process; m) = beta(sigma(X_0), sigma(X_m)) for a stationary Markov chain",
        "witness_lower_bounds_process_coefficient": True,
    }


@dataclass(frozen=True)
class SeparationWitness:
    d: int
    kappa: float
    m: int
    theta: float
    xi: float
    eta: float
    threshold: float
    p_joint: float
    p_joint_se: float
    p_product: float
    p_product_se: float
    beta_lower_empirical: float
    se: float
    beta_lower_theoretical: float
    hoeffding_guarantee: float
    reps: int
    seed: int
    sets: str = "G = H = (-inf, 0]"
    markov: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


_ROW_CELLS = 1 << 21


def separation_witness(d: int, kappa: float, m: int, reps: int, seed: int, workers: int = 1) -> SeparationWitness:
    """Monte Carlo separation of the joint and product laws of ``(X_0, X_m)``.

    Coordinates are stationary AR(1) with unit variance.  ``V_j = 1(X_{0j} <= 0)``,
    ``W_j = 1(X_{mj} <= 0)``; the event is ``mean_j V_j W_j >= theta - eta / 2``.
    Under the product law ``W`` is replaced by an independent draw.
    """
    if reps < 1000:
        raise ValueError(f"reps must be >= 1000, got {reps}")
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d}")
    if not (0 < kappa < 1):
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    rho = kappa**m
    theta = 0.25 + math.asin(rho) / (2 * math.pi)
    xi = 0.25
    eta = rho / (3 * math.pi)
    thr = theta - eta / 2
    sd_eps = math.sqrt(1 - kappa * kappa)
    rows_per = max(1, _ROW_CELLS // d)

    def block(rng, size, offset):
        joint = np.empty(size, dtype=bool)
        prod = np.empty(size, dtype=bool)
        for lo in range(0, size, rows_per):
            k = min(rows_per, size - lo)
            x0 = rng.standard_normal((k, d))
            x = x0
            for _ in range(m):
                x = kappa * x + sd_eps * rng.standard_normal((k, d))
            w_alt = rng.standard_normal((k, d))
            v = x0 <= 0
            joint[lo : lo + k] = np.count_nonzero(v & (x <= 0), axis=1) >= thr * d
            prod[lo : lo + k] = np.count_nonzero(v & (w_alt <= 0), axis=1) >= thr * d
        return joint, prod

    parts = _rng.run_blocks(block, reps, seed, f"witness:{d}", workers)
    joint = np.concatenate([p[0] for p in parts]).astype(float)
    prod = np.concatenate([p[1] for p in parts]).astype(float)
    pj, pp = joint.mean(), prod.mean()
    diff = joint - prod
    se = float(np.std(diff, ddof=1) / math.sqrt(reps))
    return SeparationWitness(
        d=int(d), kappa=kappa, m=int(m), theta=theta, xi=xi, eta=eta, threshold=thr,
        p_joint=float(pj), p_joint_se=float(math.sqrt(pj * (1 - pj) / reps)),
        p_product=float(pp), p_product_se=float(math.sqrt(pp * (1 - pp) / reps)),
        beta_lower_empirical=float(pj - pp), se=se,
        beta_lower_theoretical=beta_lower_bound(d, kappa, m),
        hoeffding_guarantee=hoeffding_guarantee(d, kappa, m),
        reps=int(reps), seed=int(seed),
        markov=markov_collapse_check(VarSpec(int(d), kappa=kappa, innovation_var=np.full(int(d), 1 - kappa * kappa)), m),
    )


@dataclass(frozen=True)
class SweepRow:
    d: int
    beta_lower_theoretical: float
    beta_lower_empirical: float
    se: float
    alpha_upper: float
    hoeffding_guarantee: float


def d_sweep(ds, kappa: float, m: int, reps: int, seed: int, workers: int = 1):
    """Witness and alpha bound across dimensions; returns ``(rows, witnesses)``."""
    rows, witnesses = [], []
    for d in ds:
        w = separation_witness(d, kappa, m, reps, seed, workers)
        spec = VarSpec(int(d), kappa=kappa, innovation_var=np.full(int(d), 1 - kappa * kappa))
        a = alpha_upper_bound(spec, m)
        rows.append(SweepRow(int(d), w.beta_lower_theoretical, w.beta_lower_empirical, w.se, a.raw,
                             w.hoeffding_guarantee))
        witnesses.append(w)
    return rows, witnesses


SWEEP_COLUMNS = ("d", "beta_lower_theoretical", "beta_lower_empirical", "se", "alpha_upper")


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(SWEEP_COLUMNS)
    for r in rows:
        wr.writerow([r.d] + [repr(float(getattr(r, c))) for c in SWEEP_COLUMNS[1:]])
    return buf.getvalue()
