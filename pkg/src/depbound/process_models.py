"""Process specifications and reproducible simulators.

Three families are supported: scalar causal linear processes (truncated
moving averages), Gaussian VAR(1) models and mean-zero symmetric matrix
series built from a VAR(1) driver.  Every simulator is a pure function of
``(spec, n, seed)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np
from scipy import special, stats

from . import _rng

DEFAULT_TAIL_RTOL = 1e-8
MAX_DEFAULT_LAG = 1_000_000
BURN_IN_TOL = 1e-10
_CONV_DIRECT_MAX = 64


class SpecError(ValueError):
    """A specification violates one of its invariants."""


class NonStationaryError(SpecError):
    pass


# ---------------------------------------------------------------------------
# innovations


_INNOVATION_KINDS = ("standard_gaussian", "scaled_gaussian", "uniform_symmetric", "rademacher")


@dataclass(frozen=True)
class InnovationLaw:
    """Mean-zero innovation law with closed-form absolute moments.

    ``scale`` is the standard deviation for ``scaled_gaussian`` and the
    half width for ``uniform_symmetric``; it is ignored otherwise.
    """

    kind: str = "standard_gaussian"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in _INNOVATION_KINDS:
            raise SpecError(f"unknown innovation kind {self.kind!r}; expected one of {_INNOVATION_KINDS}")
        if self.kind in ("standard_gaussian", "rademacher") and self.scale != 1.0:
            raise SpecError(f"{self.kind} takes no scale parameter")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise SpecError(f"innovation scale must be a positive real, got {self.scale}")

    @classmethod
    def gaussian(cls, sigma: float = 1.0) -> "InnovationLaw":
        if sigma == 1.0:
            return cls("standard_gaussian")
        return cls("scaled_gaussian", sigma)

    @classmethod
    def uniform(cls, half_width: float) -> "InnovationLaw":
        return cls("uniform_symmetric", half_width)

    @classmethod
    def rademacher(cls) -> "InnovationLaw":
        return cls("rademacher")

    @property
    def is_gaussian(self) -> bool:
        return self.kind in ("standard_gaussian", "scaled_gaussian")

    @property
    def variance(self) -> float:
        return self.lp_norm(2.0) ** 2

    @property
    def sup_abs(self) -> float:
        """Almost-sure bound on ``|eps|`` (infinite for Gaussian laws)."""
        if self.is_gaussian:
            return math.inf
        return self.scale

    def abs_moment(self, p: float) -> float:
        """``E|eps|^p``."""
        _check_p(p)
        s = self.scale
        if self.is_gaussian:
            return s**p * 2 ** (p / 2) * math.exp(special.gammaln((p + 1) / 2)) / math.sqrt(math.pi)
        if self.kind == "uniform_symmetric":
            return s**p / (p + 1)
        return 1.0

    def lp_norm(self, p: float) -> float:
        return self.abs_moment(p) ** (1.0 / p)

    def diff_lp_norm(self, p: float) -> float:
        """``||eps - eps'||_p`` for an independent copy ``eps'``."""
        _check_p(p)
        if self.is_gaussian:
            return math.sqrt(2.0) * self.lp_norm(p)
        if self.kind == "uniform_symmetric":
            # difference of two U(-h, h) is triangular on (-2h, 2h)
            return (2.0 * (2.0 * self.scale) ** p / ((p + 1) * (p + 2))) ** (1.0 / p)
        return (2.0**p / 2.0) ** (1.0 / p)

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.is_gaussian:
            out = rng.standard_normal(shape)
            return out if self.kind == "standard_gaussian" else out * self.scale
        if self.kind == "uniform_symmetric":
            return rng.uniform(-self.scale, self.scale, shape)
        return rng.integers(0, 2, shape).astype(np.float64) * 2.0 - 1.0

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "scaled_gaussian":
            d["sigma"] = self.scale
        elif self.kind == "uniform_symmetric":
            d["half_width"] = self.scale
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InnovationLaw":
        kind = d.get("kind", "standard_gaussian")
        if kind == "scaled_gaussian":
            return cls(kind, float(d["sigma"]))
        if kind == "uniform_symmetric":
            return cls(kind, float(d["half_width"]))
        return cls(kind)


def _check_p(p):
    if not p >= 1:
        raise ValueError(f"moment order p must be >= 1, got {p}")


# ---------------------------------------------------------------------------
# coefficient rules


@dataclass(frozen=True)
class Geometric:
    """``f_j = kappa**j``."""

    kappa: float

    def __post_init__(self):
        if not abs(self.kappa) < 1:
            raise SpecError(f"geometric coefficients need |kappa| < 1 for a finite ||f||_2, got {self.kappa}")

    def coefficients(self, upto: int) -> np.ndarray:
        return self.kappa ** np.arange(upto + 1, dtype=float)

    def l2_sq(self) -> float:
        return 1.0 / (1.0 - self.kappa**2)

    def tail_l2_sq(self, lag: int) -> float:
        return self.kappa ** (2 * (lag + 1)) / (1.0 - self.kappa**2)

    def l1(self) -> float:
        return 1.0 / (1.0 - abs(self.kappa))

    def to_dict(self) -> dict:
        return {"rule": "geometric", "kappa": self.kappa}


@dataclass(frozen=True)
class Polynomial:
    """``f_j = K (1 + j)**(-beta)``; square summable iff ``beta > 1/2``."""

    K: float
    beta: float

    def __post_init__(self):
        if not self.beta > 0.5:
            raise SpecError(f"polynomial coefficients need beta > 1/2 for a finite ||f||_2, got {self.beta}")
        if not self.K > 0:
            raise SpecError(f"polynomial scale K must be positive, got {self.K}")

    def coefficients(self, upto: int) -> np.ndarray:
        return self.K * (1.0 + np.arange(upto + 1, dtype=float)) ** (-self.beta)

    def l2_sq(self) -> float:
        return self.K**2 * float(special.zeta(2 * self.beta, 1.0))

    def tail_l2_sq(self, lag: int) -> float:
        # sum_{j > lag} (1 + j)^(-2 beta) = zeta(2 beta, lag + 2)
        return self.K**2 * float(special.zeta(2 * self.beta, lag + 2.0))

    def l1(self) -> float:
        return self.K * float(special.zeta(self.beta, 1.0)) if self.beta > 1 else math.inf

    def to_dict(self) -> dict:
        return {"rule": "polynomial", "K": self.K, "beta": self.beta}


@dataclass(frozen=True)
class Explicit:
    values: tuple

    def __post_init__(self):
        if len(self.values) == 0:
            raise SpecError("explicit coefficient list must be nonempty")
        if not all(math.isfinite(v) for v in self.values):
            raise SpecError("explicit coefficients must be finite")

    def coefficients(self, upto: int) -> np.ndarray:
        out = np.zeros(upto + 1)
        k = min(upto + 1, len(self.values))
        out[:k] = self.values[:k]
        return out

    def l2_sq(self) -> float:
        return math.fsum(v * v for v in self.values)

    def tail_l2_sq(self, lag: int) -> float:
        return math.fsum(v * v for v in self.values[lag + 1 :])

    def l1(self) -> float:
        return math.fsum(abs(v) for v in self.values)

    def to_dict(self) -> dict:
        return {"rule": "explicit", "values": list(self.values)}


CoefficientRule = Union[Geometric, Polynomial, Explicit]


def rule_from_dict(d: dict) -> CoefficientRule:
    rule = d.get("rule")
    if rule == "geometric":
        return Geometric(float(d["kappa"]))
    if rule == "polynomial":
        return Polynomial(float(d["K"]), float(d["beta"]))
    if rule == "explicit":
        return Explicit(tuple(float(v) for v in d["values"]))
    raise SpecError(f"unknown coefficient rule {rule!r}")


def default_truncation_lag(rule: CoefficientRule, rtol: float = DEFAULT_TAIL_RTOL) -> int:
    """Smallest lag whose discarded squared tail is below ``rtol * ||f||_2^2``."""
    if isinstance(rule, Explicit):
        return max(1, len(rule.values) - 1)
    total = rule.l2_sq()
    if isinstance(rule, Geometric):
        if rule.kappa == 0:
            return 1
        lag = math.ceil(math.log(rtol) / (2 * math.log(abs(rule.kappa)))) - 1
        lag = max(1, lag)
        while rule.tail_l2_sq(lag) >= rtol * total:
            lag += 1
        return lag
    lo, hi = 1, 1
    while rule.tail_l2_sq(hi) >= rtol * total:
        hi *= 2
        if hi > MAX_DEFAULT_LAG:
            raise SpecError(
                f"discarded tail stays above {rtol:g}*||f||_2^2 beyond lag {MAX_DEFAULT_LAG}; "
                "set truncation_lag explicitly"
            )
    while lo < hi:
        mid = (lo + hi) // 2
        if rule.tail_l2_sq(mid) < rtol * total:
            hi = mid
        else:
            lo = mid + 1
    return lo


# ---------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class LinearProcessSpec:
    """Causal linear process ``X_t = sum_{j<=lag} f_j eps_{t-j}``."""

    coefficients: CoefficientRule
    innovation: InnovationLaw = field(default_factory=InnovationLaw)
    truncation_lag: int | None = None

    def __post_init__(self):
        if self.truncation_lag is None:
            object.__setattr__(self, "truncation_lag", default_truncation_lag(self.coefficients))
        if int(self.truncation_lag) < 1:
            raise SpecError(f"truncation_lag must be >= 1, got {self.truncation_lag}")
        object.__setattr__(self, "truncation_lag", int(self.truncation_lag))

    @property
    def dimension(self) -> int:
        return 1

    @property
    def weights(self) -> np.ndarray:
        """Retained coefficients ``f_0 .. f_lag``."""
        return self.coefficients.coefficients(self.truncation_lag)

    @property
    def discarded_tail(self) -> float:
        """``sum_{j > lag} f_j^2`` for the untruncated rule."""
        return self.coefficients.tail_l2_sq(self.truncation_lag)

    @property
    def f_l1(self) -> float:
        """``||f||_1`` of the simulated (truncated) filter."""
        return math.fsum(np.abs(self.weights))

    @property
    def sup_abs(self) -> float:
        """Almost-sure bound on ``|X_t|`` for the simulated process."""
        return self.f_l1 * self.innovation.sup_abs

    def marginal_variance(self) -> float:
        return self.innovation.variance * math.fsum(self.weights**2)

    def to_dict(self) -> dict:
        return {
            "kind": "linear",
            "coefficients": self.coefficients.to_dict(),
            "innovation": self.innovation.to_dict(),
            "truncation_lag": self.truncation_lag,
        }


@dataclass(frozen=True, eq=False)
class VarSpec:
    """Gaussian VAR(1) ``X_t = A X_{t-1} + E_t`` with diagonal innovation covariance.

    Give either ``kappa`` (transition ``kappa * I``) or a full ``matrix``.
    ``innovation_var`` holds the diagonal of ``Cov(E_t)``; ``None`` means
    the identity.
    """

    dimension: int
    kappa: float | None = None
    matrix: Any = None
    innovation_var: Any = None

    def __post_init__(self):
        d = int(self.dimension)
        if d < 1:
            raise SpecError(f"dimension must be a positive integer, got {self.dimension}")
        object.__setattr__(self, "dimension", d)
        if (self.kappa is None) == (self.matrix is None):
            raise SpecError("give exactly one of kappa (diagonal transition) or matrix")
        if self.matrix is not None:
            A = np.array(self.matrix, dtype=float)
            if A.shape != (d, d):
                raise SpecError(f"transition matrix must be {d}x{d}, got shape {A.shape}")
            A.flags.writeable = False
            object.__setattr__(self, "matrix", A)
        else:
            object.__setattr__(self, "kappa", float(self.kappa))
        if self.innovation_var is not None:
            v = np.array(self.innovation_var, dtype=float).reshape(-1)
            if v.shape != (d,) or not np.all(v > 0) or not np.all(np.isfinite(v)):
                raise SpecError(f"innovation_var must hold {d} positive reals")
            v.flags.writeable = False
            object.__setattr__(self, "innovation_var", v)
        norm = self.transition_norm
        if not norm < 1:
            raise NonStationaryError(
                f"transition spectral norm ||A|| = {norm:.6g} >= 1; stationarity requires ||A|| < 1"
            )

    @property
    def is_diagonal(self) -> bool:
        return self.kappa is not None

    @property
    def transition(self) -> np.ndarray:
        if self.is_diagonal:
            return self.kappa * np.eye(self.dimension)
        return np.array(self.matrix)

    @property
    def transition_norm(self) -> float:
        if self.is_diagonal:
            return abs(self.kappa)
        return float(np.linalg.norm(self.matrix, 2))

    @property
    def innovation_diag(self) -> np.ndarray:
        if self.innovation_var is None:
            return np.ones(self.dimension)
        return np.array(self.innovation_var)

    @property
    def innovation_cov(self) -> np.ndarray:
        return np.diag(self.innovation_diag)

    def burn_in(self, tol: float = BURN_IN_TOL) -> int:
        """Smallest ``b`` with ``||A||^b < tol``."""
        norm = self.transition_norm
        if norm == 0:
            return 0
        b = max(0, math.ceil(math.log(tol) / math.log(norm)))
        while norm**b >= tol:
            b += 1
        return b

    def to_dict(self) -> dict:
        d: dict = {"kind": "var", "dimension": self.dimension}
        if self.is_diagonal:
            d["kappa"] = self.kappa
        else:
            d["matrix"] = np.asarray(self.matrix).tolist()
        if self.innovation_var is not None:
            d["innovation_var"] = np.asarray(self.innovation_var).tolist()
        return d

    def __eq__(self, other):
        return isinstance(other, VarSpec) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))


_MATRIX_GENERATORS = ("rank_one_from_var", "diagonal_ar")


@dataclass(frozen=True)
class MatrixSeriesSpec:
    """Mean-zero symmetric matrix series driven by a VAR(1) vector ``v_t``.

    ``rank_one_from_var``: ``X_t = c(v_t) c(v_t)^T - E[c c^T]`` where ``c``
    projects onto the ball of radius ``sqrt(clip)``.
    ``diagonal_ar``: ``X_t = diag(c(v_t))`` with ``c`` clipping each entry
    to ``[-clip, clip]``.  Both give ``lambda_max(X_t) <= clip``.
    """

    generator: str
    var: VarSpec
    clip: float | None = None

    def __post_init__(self):
        if self.generator not in _MATRIX_GENERATORS:
            raise SpecError(f"unknown matrix generator {self.generator!r}; expected one of {_MATRIX_GENERATORS}")
        if self.clip is not None:
            if not self.clip > 0:
                raise SpecError(f"clip level must be positive, got {self.clip}")
            if self.generator == "rank_one_from_var" and _isotropic_scale(self.var) is None:
                raise SpecError(
                    "clipped rank_one_from_var needs an isotropic stationary covariance "
                    "(diagonal transition with equal innovation variances)"
                )

    @property
    def dimension(self) -> int:
        return self.var.dimension

    @property
    def bound(self) -> float | None:
        """Almost-sure bound ``M`` on ``||X_t||`` (``None`` when unclipped)."""
        return self.clip

    def to_dict(self) -> dict:
        return {"kind": "matrix", "generator": self.generator, "var": self.var.to_dict(), "clip": self.clip}


ProcessSpec = Union[LinearProcessSpec, VarSpec, MatrixSeriesSpec]


def spec_from_dict(d: dict) -> ProcessSpec:
    kind = d.get("kind")
    if kind == "linear":
        return LinearProcessSpec(
            rule_from_dict(d["coefficients"]),
            InnovationLaw.from_dict(d.get("innovation", {})),
            d.get("truncation_lag"),
        )
    if kind == "var":
        return VarSpec(
            int(d["dimension"]),
            kappa=d.get("kappa"),
            matrix=d.get("matrix"),
            innovation_var=d.get("innovation_var"),
        )
    if kind == "matrix":
        clip = d.get("clip")
        return MatrixSeriesSpec(d["generator"], spec_from_dict({**d["var"], "kind": "var"}),
                                None if clip is None else float(clip))
    raise SpecError(f"unknown process kind {kind!r}")


def spec_to_dict(spec: ProcessSpec, seed: int | None = None) -> dict:
    d = spec.to_dict()
    if seed is not None:
        d["seed"] = int(seed)
    return d


# ---------------------------------------------------------------------------
# fragments


@dataclass(frozen=True, eq=False)
class SeriesFragment:
    values: np.ndarray
    spec: ProcessSpec
    seed: int
    burn_in: int = 0

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def to_dict(self) -> dict:
        return {
            "spec": spec_to_dict(self.spec, self.seed),
            "seed": self.seed,
            "burn_in": self.burn_in,
            "n": self.n,
            "values": self.values.tolist(),
        }


# ---------------------------------------------------------------------------
# batch path generators (replication-blocked, deterministic)


def filter_innovations(eps: np.ndarray, weights: np.ndarray, n: int) -> np.ndarray:
    """``out[:, t] = sum_j weights[j] * eps[:, t + lag - j]`` for ``t < n``."""
    lag = len(weights) - 1
    if lag <= _CONV_DIRECT_MAX:
        out = np.zeros((eps.shape[0], n))
        for j, w in enumerate(weights):
            if w != 0.0:
                out += w * eps[:, lag - j : lag - j + n]
        return out
    from scipy import signal

    return signal.fftconvolve(eps, weights[None, :], mode="valid", axes=1)


def linear_block(spec: LinearProcessSpec, rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    eps = spec.innovation.sample(rng, (size, n + spec.truncation_lag))
    return filter_innovations(eps, spec.weights, n)


def linear_paths(spec: LinearProcessSpec, n: int, reps: int, seed: int, workers: int = 1) -> np.ndarray:
    """``reps`` independent fragments, shape ``(reps, n)``."""
    _check_n(n)
    parts = _rng.run_blocks(lambda rng, size, _: linear_block(spec, rng, size, n), reps, seed, "linear", workers)
    return _rng.concat(parts)


def var_block(spec: VarSpec, rng: np.random.Generator, size: int, n: int, burn: int | None = None) -> np.ndarray:
    """VAR paths of shape ``(size, n, d)`` started at zero, burn-in discarded."""
    burn = spec.burn_in() if burn is None else burn
    d = spec.dimension
    sd = np.sqrt(spec.innovation_diag)
    A = spec.transition
    x = np.zeros((size, d))
    out = np.empty((size, n, d))
    for t in range(burn + n):
        e = rng.standard_normal((size, d)) * sd
        if spec.is_diagonal:
            x = spec.kappa * x + e
        else:
            x = x @ A.T + e
        if t >= burn:
            out[:, t - burn] = x
    return out


def var_paths(spec: VarSpec, n: int, reps: int, seed: int, workers: int = 1) -> np.ndarray:
    _check_n(n)
    parts = _rng.run_blocks(lambda rng, size, _: var_block(spec, rng, size, n), reps, seed, "var", workers)
    return _rng.concat(parts)


def _check_n(n):
    if int(n) < 1:
        raise ValueError(f"fragment length n must be >= 1, got {n}")


# ---------------------------------------------------------------------------
# single-fragment simulators


def simulate_linear(spec: LinearProcessSpec, n: int, seed: int) -> SeriesFragment:
    """Replication 0 of the ``linear`` stream for ``seed``."""
    return SeriesFragment(linear_paths(spec, n, 1, seed)[0], spec, seed, 0)


def simulate_var(spec: VarSpec, n: int, seed: int) -> SeriesFragment:
    return SeriesFragment(var_paths(spec, n, 1, seed)[0], spec, seed, spec.burn_in())


def stationary_covariance(spec: VarSpec, tol: float = 1e-15, max_iter: int = 64) -> np.ndarray:
    """Solve ``S = A S A^T + Sigma_E`` via the series ``sum_k A^k Sigma_E (A^T)^k``.

    Partial sums are doubled each iteration (``2^j`` terms after ``j``
    steps); the neglected tail is bounded by
    ``||Sigma_E|| ||A||^(2 * terms) / (1 - ||A||^2)``.
    """
    A = spec.transition
    S = spec.innovation_cov
    norm = spec.transition_norm
    scale = float(np.max(spec.innovation_diag))
    terms = 1
    Ak = A.copy()
    for _ in range(max_iter):
        if scale * norm ** (2 * terms) / (1 - norm**2) <= tol * scale:
            return (S + S.T) / 2
        S = S + Ak @ S @ Ak.T
        Ak = Ak @ Ak
        terms *= 2
    raise ArithmeticError(f"stationary covariance series did not converge within {max_iter} doublings")


# ---------------------------------------------------------------------------
# matrix series


def _isotropic_scale(var: VarSpec) -> float | None:
    """Common stationary variance when ``Cov(v_t)`` is a multiple of ``I``."""
    if var.is_diagonal:
        diag = var.innovation_diag
        if np.all(diag == diag[0]):
            return float(diag[0]) / (1 - var.kappa**2)
        return None
    S = stationary_covariance(var)
    c = float(np.mean(np.diag(S)))
    return c if np.allclose(S, c * np.eye(var.dimension), rtol=1e-12, atol=0) else None


def _clipped_gaussian_second_moment(sigma2: np.ndarray, clip: float) -> np.ndarray:
    """``E[min(max(Z, -c), c)^2]`` for ``Z ~ N(0, sigma2)``."""
    s = np.sqrt(sigma2)
    a = clip / s
    inner = (2 * stats.norm.cdf(a) - 1) - 2 * a * stats.norm.pdf(a)
    return sigma2 * inner + clip**2 * 2 * stats.norm.sf(a)


def _radial_clip_moments(d: int, sigma2: float, r2: float) -> tuple[float, float]:
    """``(E min(|v|^2, r2), E min(|v|^2, r2)^2)`` for ``v ~ N(0, sigma2 I_d)``."""
    t = r2 / sigma2
    m1 = sigma2 * (d * stats.chi2.cdf(t, d + 2) + t * stats.chi2.sf(t, d))
    m2 = sigma2**2 * (d * (d + 2) * stats.chi2.cdf(t, d + 4) + t * t * stats.chi2.sf(t, d))
    return float(m1), float(m2)


def matrix_centering(spec: MatrixSeriesSpec) -> np.ndarray:
    """``E[c(v) c(v)^T]`` subtracted by the rank-one generator."""
    d = spec.dimension
    if spec.generator != "rank_one_from_var":
        return np.zeros((d, d))
    if spec.clip is None:
        return stationary_covariance(spec.var)
    m1, _ = _radial_clip_moments(d, _isotropic_scale(spec.var), spec.clip)
    return (m1 / d) * np.eye(d)


def matrix_second_moment(spec: MatrixSeriesSpec) -> np.ndarray:
    """Analytic ``E[X_t^2]`` for the stationary matrix series."""
    d = spec.dimension
    S = stationary_covariance(spec.var)
    if spec.generator == "diagonal_ar":
        var = np.diag(S)
        if spec.clip is None:
            return np.diag(var)
        return np.diag(_clipped_gaussian_second_moment(var, spec.clip))
    if spec.clip is None:
        # Gaussian: E[|v|^2 v v^T] = tr(S) S + 2 S^2
        return np.trace(S) * S + S @ S
    m1, m2 = _radial_clip_moments(d, _isotropic_scale(spec.var), spec.clip)
    return (m2 / d - (m1 / d) ** 2) * np.eye(d)


def _clip_vectors(spec: MatrixSeriesSpec, v: np.ndarray) -> np.ndarray:
    if spec.clip is None:
        return v
    if spec.generator == "diagonal_ar":
        return np.clip(v, -spec.clip, spec.clip)
    r = math.sqrt(spec.clip)
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    factor = np.minimum(1.0, r / np.maximum(norms, np.finfo(float).tiny))
    return v * factor


def matrices_from_vectors(spec: MatrixSeriesSpec, v: np.ndarray, centering: np.ndarray | None = None) -> np.ndarray:
    c = _clip_vectors(spec, v)
    if spec.generator == "diagonal_ar":
        out = np.zeros(c.shape + (c.shape[-1],))
        idx = np.arange(c.shape[-1])
        out[..., idx, idx] = c
        return out
    C = matrix_centering(spec) if centering is None else centering
    return c[..., :, None] * c[..., None, :] - C


def matrix_sum_block(spec: MatrixSeriesSpec, rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    """Sums ``sum_t X_t`` for ``size`` independent fragments, shape ``(size, d, d)``."""
    v = var_block(spec.var, rng, size, n)
    c = _clip_vectors(spec, v)
    d = spec.dimension
    if spec.generator == "diagonal_ar":
        out = np.zeros((size, d, d))
        idx = np.arange(d)
        out[:, idx, idx] = c.sum(axis=1)
        return out
    return np.einsum("rti,rtj->rij", c, c) - n * matrix_centering(spec)


def simulate_matrix_series(spec: MatrixSeriesSpec, n: int, seed: int) -> np.ndarray:
    """``n`` symmetric ``d x d`` matrices, shape ``(n, d, d)``."""
    _check_n(n)
    v = var_block(spec.var, _rng.stream(seed, "var", 0), 1, n)[0]
    return matrices_from_vectors(spec, v)


def simulate(spec: ProcessSpec, n: int, seed: int):
    if isinstance(spec, LinearProcessSpec):
        return simulate_linear(spec, n, seed)
    if isinstance(spec, VarSpec):
        return simulate_var(spec, n, seed)
    if isinstance(spec, MatrixSeriesSpec):
        return simulate_matrix_series(spec, n, seed)
    raise TypeError(f"not a process spec: {type(spec).__name__}")
