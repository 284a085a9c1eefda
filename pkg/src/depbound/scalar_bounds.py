"""Closed-form tail and moment bounds for sums of dependent scalar sequences.

Constants the literature fixes explicitly are computed here and cannot be
overridden.  Constants that are only known to exist come in through a
:class:`ConstantPack`, default to 1 and are echoed in every result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import special

from .dependence_measures import (
    DanValue,
    DependenceProfile,
    GeometricTail,
    PowerTail,
    UncertifiedError,
    ZeroTail,
)

PAPER_EXPLICIT = "paper_explicit"
USER_SUPPLIED = "user_supplied"


class InapplicableBoundError(ValueError):
    """The inequality does not apply to the given inputs (e.g. x below an admissibility threshold)."""

    def __init__(self, message: str, threshold: float | None = None):
        super().__init__(message)
        self.threshold = threshold


@dataclass(frozen=True)
class BoundResult:
    bound_id: str
    raw_value: float
    inputs_echo: dict
    constants_source: str
    constants: dict = field(default_factory=dict)
    terms: tuple = ()
    probability: bool = True
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.raw_value >= 0):
            raise ArithmeticError(f"{self.bound_id}: bound evaluated to {self.raw_value}")
        if self.constants_source not in (PAPER_EXPLICIT, USER_SUPPLIED):
            raise ValueError(f"unknown constants_source {self.constants_source!r}")

    @property
    def clamped(self) -> float:
        return min(self.raw_value, 1.0) if self.probability else self.raw_value

    @property
    def vacuous(self) -> bool:
        return self.probability and self.raw_value >= 1.0

    def to_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            "raw_value": self.raw_value,
            "clamped": self.clamped,
            "vacuous": self.vacuous,
            "probability": self.probability,
            "constants_source": self.constants_source,
            "constants": dict(self.constants),
            "terms": list(self.terms),
            "inputs_echo": dict(self.inputs_echo),
            "extras": dict(self.extras),
        }


# unspecified constants per calculator; all default to 1
CONSTANT_NAMES: dict[str, tuple[str, ...]] = {
    "nagaev_linear_long": ("C1", "C2"),
    "merlevede_chernoff": ("C1", "C2"),
    "nagaev_fdm_i": ("c_p",),
    "nagaev_fdm_ii": ("C1", "C2"),
    "nagaev_fdm_iii": ("C1", "C2"),
    "nagaev_dan": ("C1", "C2", "C3"),
    "nagaev_vector_max": ("C_q_alpha",),
    "bernstein_beta_mixing": ("C",),
    "ustat_exponential": ("c_prime", "C_prime"),
    "vstat_fourier": ("C_prime",),
}


@dataclass(frozen=True)
class ConstantPack:
    """Named positive constants; anything not given defaults to 1."""

    values: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        vals = {k: float(v) for k, v in dict(self.values).items()}
        for k, v in vals.items():
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"constant {k} must be a positive finite real, got {v}")
        object.__setattr__(self, "values", vals)

    def resolve(self, names: tuple[str, ...]) -> dict[str, float]:
        unknown = set(self.values) - set(names)
        if unknown:
            raise ValueError(f"unknown constants {sorted(unknown)}; expected a subset of {list(names)}")
        return {k: self.values.get(k, 1.0) for k in names}


def _consts(bound_id: str, consts) -> dict[str, float]:
    if consts is None:
        consts = ConstantPack()
    elif not isinstance(consts, ConstantPack):
        consts = ConstantPack(dict(consts))
    return consts.resolve(CONSTANT_NAMES[bound_id])


def _positive(**kw):
    for k, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{k} must be positive and finite, got {v}")


def _nonneg(**kw):
    for k, v in kw.items():
        if not (v >= 0 and math.isfinite(v)):
            raise ValueError(f"{k} must be nonnegative and finite, got {v}")


def _check_n(n, least=1):
    if int(n) != n or n < least:
        raise ValueError(f"n must be an integer >= {least}, got {n}")


def _poly_term(coef: float, n_factor: float, scale: float, x: float, p: float) -> float:
    """``coef * n_factor * (scale / x)**p`` with ``x = 0`` giving infinity."""
    if x == 0:
        return math.inf if coef * n_factor * scale > 0 else 0.0
    return coef * n_factor * (scale / x) ** p


def _exp_term(coef: float, num: float, den: float) -> float:
    """``coef * exp(-num / den)`` treating ``den = 0`` as an infinite exponent."""
    if den == 0:
        return coef if num == 0 else 0.0
    return coef * math.exp(-num / den)


# ---------------------------------------------------------------------------
# linear processes


def c_p_linear(p: float) -> float:
    return 2 * math.exp(-p) * (p + 2) ** -2


def nagaev_linear_short(n, x, p, f_l1, eps_lp, eps_l2) -> BoundResult:
    """Nagaev inequality for a short-range linear process, explicit ``c_p``."""
    if not p > 2:
        raise ValueError(f"p must exceed 2, got {p}")
    _check_n(n)
    _nonneg(x=x)
    _positive(f_l1=f_l1, eps_lp=eps_lp, eps_l2=eps_l2)
    cp = c_p_linear(p)
    t1 = _poly_term((1 + 2 / p) ** p, n, f_l1 * eps_lp, x, p)
    t2 = _exp_term(2.0, cp * x * x, n * f_l1**2 * eps_l2**2)
    echo = dict(n=n, x=x, p=p, f_l1=f_l1, eps_lp=eps_lp, eps_l2=eps_l2)
    return BoundResult("nagaev_linear_short", t1 + t2, echo, PAPER_EXPLICIT, {"c_p": cp}, (t1, t2))


def nagaev_linear_long(n, x, p, beta, K, eps_lp, eps_l2, consts=None) -> BoundResult:
    """Nagaev inequality for a long-range linear process with ``sup_j |f_j|(1+j)^beta = K``."""
    if not p > 2:
        raise ValueError(f"p must exceed 2, got {p}")
    if not (0.5 < beta < 1):
        raise ValueError(f"beta must lie in (1/2, 1), got {beta}")
    _check_n(n)
    _nonneg(x=x)
    _positive(K=K, eps_lp=eps_lp, eps_l2=eps_l2)
    c = _consts("nagaev_linear_long", consts)
    t1 = _poly_term(c["C1"], n ** (1 + p * (1 - beta)), K * eps_lp, x, p)
    t2 = _exp_term(2.0, c["C2"] * x * x, n ** (3 - 2 * beta) * eps_l2**2 * K**2)
    echo = dict(n=n, x=x, p=p, beta=beta, K=K, eps_lp=eps_lp, eps_l2=eps_l2)
    return BoundResult("nagaev_linear_long", t1 + t2, echo, USER_SUPPLIED, c, (t1, t2))


# ---------------------------------------------------------------------------
# phi-mixing moment bound


def phi_moment_bound(n: int, p: int, C: float, phi) -> float:
    """Upper bound on ``E|S_n|^p`` for a bounded phi-mixing sequence."""
    _check_n(n)
    if int(p) != p or p < 2:
        raise ValueError(f"p must be an integer >= 2, got {p}")
    _positive(C=C)
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (n,):
        raise ValueError(f"phi must hold phi(0..n-1), {n} values; got shape {phi.shape}")
    if np.any(phi < 0) or phi[0] > 1:
        raise ValueError("phi values must be nonnegative with phi(0) <= 1")
    if np.any(np.diff(phi) > 0):
        raise ValueError("phi must be nonincreasing")
    weighted = math.fsum((n - np.arange(n)) * phi)
    return (8 * C * C * p * weighted) ** (p / 2)


# ---------------------------------------------------------------------------
# Bernstein-type bound under geometric alpha/tau mixing


def merlevede_mgf(n: int, t: float, sigma2: float, B: float, consts=None) -> float:
    """Upper bound on ``log E exp(t S_n)``."""
    _check_n(n, 2)
    _nonneg(sigma2=sigma2)
    _positive(B=B)
    c = _consts("merlevede_chernoff", consts)
    a = c["C1"] * B * math.log(n) ** 2
    if not (0 < t < 1 / a):
        raise ValueError(f"t must lie in (0, {1 / a!r}), got {t}")
    return c["C2"] * t * t * (n * sigma2 + B * B) / (1 - a * t)


def merlevede_sigma2_ar1(kappa: float, innovation_var: float = 1.0) -> float:
    """``Var(X_1) + 2 sum_{i>1} |Cov(X_1, X_i)|`` for a stationary AR(1)."""
    if not abs(kappa) < 1:
        raise ValueError(f"|kappa| must be < 1, got {kappa}")
    var = innovation_var / (1 - kappa * kappa)
    return var * (1 + 2 * abs(kappa) / (1 - abs(kappa)))


_GOLDEN = (math.sqrt(5) - 1) / 2


def _golden_min(h, lo, hi, rtol=1e-10, max_iter=500):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    hc, hd = h(c), h(d)
    for _ in range(max_iter):
        if b - a <= rtol * max(abs(a), abs(b)):
            break
        if hc <= hd:
            b, d, hd = d, c, hc
            c = b - _GOLDEN * (b - a)
            hc = h(c)
        else:
            a, c, hc = c, d, hd
            d = a + _GOLDEN * (b - a)
            hd = h(d)
    return (c, hc) if hc <= hd else (d, hd)


def merlevede_chernoff(n, x, sigma2, B, consts=None) -> BoundResult:
    """``inf_t exp(-t x + logMGF bound)`` over the admissible interval."""
    _check_n(n, 2)
    _nonneg(x=x, sigma2=sigma2)
    _positive(B=B)
    c = _consts("merlevede_chernoff", consts)
    a = c["C1"] * B * math.log(n) ** 2
    v = c["C2"] * (n * sigma2 + B * B)
    echo = dict(n=n, x=x, sigma2=sigma2, B=B)
    if x == 0:
        return BoundResult("merlevede_chernoff", 1.0, echo, USER_SUPPLIED, c, (1.0,), extras={"t_opt": 0.0})

    def h(t):
        return -t * x + v * t * t / (1 - a * t)

    lo, hi = 0.0, 1 / a
    method = "golden_section"
    # unimodality check: h decreases at 0 and increases near the pole
    eps = hi * 1e-9
    if not (h(eps) < 0 and h(hi - eps) > h(hi - 2 * eps)):
        method = "grid"
        grid = np.linspace(lo, hi, 4001)[1:-1]
        vals = -grid * x + v * grid**2 / (1 - a * grid)
        k = int(np.argmin(vals))
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    t_opt, h_opt = _golden_min(h, lo, hi)
    raw = math.exp(h_opt) if h_opt < 0 else 1.0
    return BoundResult("merlevede_chernoff", raw, echo, USER_SUPPLIED, c, (raw,),
                       extras={"t_opt": t_opt, "t_max": 1 / a, "log_bound": h_opt, "method": method})


# ---------------------------------------------------------------------------
# weak dependence exponential bound


def doukhan_constants(a, b, K, M, L1, L2) -> tuple[float, float]:
    k2 = max(K * K, 2.0)
    C1 = 2 ** (a + b + 3) * K * K * M * M * L1 * k2
    C2 = 2 * (M * L2 * k2) ** (1 / (a + b + 2))
    return C1, C2


def doukhan_louhichi_bound(n, x, a, b, K, M, L1, L2) -> BoundResult:
    """One-sided bound on ``P(S_n >= x)`` under the product-covariance weak dependence condition."""
    _check_n(n)
    _nonneg(x=x, a=a, b=b)
    _positive(K=K, M=M, L1=L1, L2=L2)
    C1, C2 = doukhan_constants(a, b, K, M, L1, L2)
    expo = (2 * a + 2 * b + 3) / (a + b + 2)
    raw = math.exp(-x * x / (C1 * n + C2 * x**expo))
    echo = dict(n=n, x=x, a=a, b=b, K=K, M=M, L1=L1, L2=L2)
    return BoundResult("doukhan_louhichi", raw, echo, PAPER_EXPLICIT, {"C1": C1, "C2": C2}, (raw,),
                       extras={"one_sided": True, "x_exponent": expo})


# ---------------------------------------------------------------------------
# functional dependence bounds


def rosenthal_liu_xiao_wu(n, p, profile_2: DependenceProfile, profile_p: DependenceProfile,
                          x0_l2: float, x0_lp: float) -> float:
    """Upper bound on ``||S_n||_{L_p}`` from functional dependence measures."""
    if not p > 2:
        raise ValueError(f"p must exceed 2, got {p}")
    _check_n(n)
    _nonneg(x0_l2=x0_l2, x0_lp=x0_lp)
    if profile_2.p != 2 or profile_p.p != p:
        raise ValueError(f"profiles must be for p=2 and p={p}, got {profile_2.p} and {profile_p.p}")
    if profile_2.tail is None or profile_p.tail is None:
        raise UncertifiedError("both profiles need a tail certificate")
    lp = math.log(p)
    s2 = profile_2.sum_range(1, n)
    sp_tail = profile_p.sum_range(n + 1, None)
    sp_w = profile_p.sum_range(1, n, weight=lambda j: j ** (0.5 - 1 / p))
    first = math.sqrt(n) * (87 * p / lp * s2 + 3 * math.sqrt(p - 1) * sp_tail + 29 * p / lp * x0_l2)
    second = n ** (1 / p) * (87 * p * math.sqrt(p - 1) / lp * sp_w + 29 * p / lp * x0_lp)
    return first + second


# G_q special function --------------------------------------------------------


def _tail_integral(q: float, y2: float, a: float) -> float:
    """``int_a^inf exp(-y2 t^q) dt``."""
    s = 1.0 / q
    z = y2 * a**q
    upper = special.gammaincc(s, z)
    if upper == 0.0:
        return 0.0
    return math.exp(-math.log(q) - s * math.log(y2) + special.gammaln(s) + math.log(upper))


def _convex_from(q: float, y2: float) -> float:
    """Start of the region where ``t -> exp(-y2 t^q)`` is convex."""
    if q <= 1:
        return 0.0
    return ((q - 1) / (q * y2)) ** (1 / q)


def g_q(q: float, y: float, rel_tol: float = 1e-12, max_terms: int = 1 << 22) -> float:
    """``sum_{j>=1} exp(-j^q y^2)``.

    The first ``J`` terms are summed directly.  The rest is bracketed between
    the trapezoid and midpoint integrals of the convex summand and replaced by
    their midpoint; ``J`` doubles until half the bracket is below
    ``rel_tol`` times the total.
    """
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    if y == 0:
        raise ValueError("G_q diverges at y = 0")
    if not y > 0:
        raise ValueError(f"y must be positive, got {y}")
    y2 = float(y) * float(y)
    J = max(16, math.ceil(_convex_from(q, y2)) + 1)
    while True:
        j = np.arange(1, J + 1, dtype=float)
        head = math.fsum(np.exp(-(j**q) * y2))
        f_next = math.exp(-((J + 1.0) ** q) * y2)
        lower = _tail_integral(q, y2, J + 1.0) + f_next / 2
        upper = _tail_integral(q, y2, J + 0.5)
        upper = max(upper, lower)
        total = head + (lower + upper) / 2
        err = (upper - lower) / 2
        if err <= rel_tol * total or total == 0.0:
            return total
        if J >= max_terms:
            raise ArithmeticError(f"G_q({q}, {y}) did not reach relative tolerance {rel_tol}")
        J *= 2


# Nagaev inequalities from functional dependence ------------------------------

_EXP_SUM_MAX_LAG = 1 << 22


def _exact_pair(t2, tp):
    if t2 is None or tp is None or not (getattr(t2, "exact", False) and getattr(tp, "exact", False)):
        raise UncertifiedError("variant (i) needs exact analytic tails for both theta_2 and theta_p")
    if isinstance(t2, ZeroTail) and isinstance(tp, ZeroTail):
        return "zero"
    if isinstance(t2, GeometricTail) and isinstance(tp, GeometricTail) and t2.rate == tp.rate:
        return "geometric"
    if isinstance(t2, PowerTail) and isinstance(tp, PowerTail) and t2.beta == tp.beta:
        return "power"
    raise UncertifiedError("theta_2 and theta_p tails must be of the same kind and rate")


def _mu(j, theta_p, p):
    j = np.asarray(j, dtype=float)
    return (j ** (p / 2 - 1) * np.asarray(theta_p, dtype=float) ** p) ** (1 / (p + 1))


def _nu(profile_p: DependenceProfile, p: float) -> float:
    M = profile_p.max_lag
    head = math.fsum(_mu(np.arange(1, M + 1), profile_p.theta[1:], p)) if M >= 1 else 0.0
    tail = profile_p.tail.power_sum_from(M + 1, (p / 2 - 1) / (p + 1), p / (p + 1))
    return head + tail


def _log_theta(tail, j):
    j = np.asarray(j, dtype=float)
    if isinstance(tail, GeometricTail):
        return math.log(tail.scale) + j * math.log(tail.rate)
    return math.log(tail.scale) - tail.beta * np.log1p(j)


def _exp_terms(j, log_th2, log_thp, p, K):
    """``exp(-K mu_j^2 / theta_{j,2}^2)`` from log thetas; zero where ``theta_{j,2} = 0``."""
    log_th2 = np.asarray(log_th2, dtype=float)
    log_mu = ((p / 2 - 1) * np.log(np.asarray(j, dtype=float)) + p * np.asarray(log_thp, dtype=float)) / (p + 1)
    out = np.zeros_like(log_th2)
    nz = np.isfinite(log_th2)
    with np.errstate(over="ignore"):
        out[nz] = np.exp(-K * np.exp(2 * (log_mu[nz] - log_th2[nz])))
    return out


def _exp_sum(profile_2, profile_p, p, K, kind):
    """``sum_{j>=1} exp(-K mu_j^2 / theta_{j,2}^2)`` with a certified remainder."""
    M = min(profile_2.max_lag, profile_p.max_lag)
    j = np.arange(1, M + 1)
    with np.errstate(divide="ignore"):
        head = _exp_terms(j, np.log(profile_2.theta[1 : M + 1]), np.log(profile_p.theta[1 : M + 1]), p, K)
    parts = [math.fsum(head)]
    if kind == "zero":
        return math.fsum(parts), 0.0
    t2, tp = profile_2.tail, profile_p.tail
    if t2.scale == 0 or (kind == "geometric" and t2.rate == 0):
        return math.fsum(parts), 0.0
    lo = M + 1
    width = max(64, M)
    while True:
        js = np.arange(lo, lo + width)
        parts.append(math.fsum(_exp_terms(js, _log_theta(t2, js), _log_theta(tp, js), p, K)))
        last = lo + width - 1
        rem = _exp_remainder(t2, tp, p, K, last, kind)
        total = math.fsum(parts)
        if rem <= 1e-17 * total or rem == 0.0:
            return total, rem
        if last >= _EXP_SUM_MAX_LAG:
            return total + rem, rem
        lo = last + 1
        width *= 2


def _exp_remainder(t2, tp, p, K, J, kind):
    """Upper bound on the terms beyond lag ``J``."""
    e = p / (p + 1)
    s = (p / 2 - 1) / (p + 1)
    if K == 0:
        return math.inf
    if kind == "geometric":
        # R_j = mu_j^2 / theta_{j,2}^2 grows at least by a factor rho per lag
        log_R = 2 * (s * math.log(J) + e * float(_log_theta(tp, J)) - float(_log_theta(t2, J)))
        rho = tp.rate ** (-2 / (p + 1))
        if log_R + math.log(K) > 700:
            return 0.0
        a = K * math.exp(log_R)
        b = a * (rho - 1)
        return math.exp(-a - b) / -math.expm1(-b)
    # power: R_j >= C j^gamma
    C = tp.scale ** (2 * e) / t2.scale**2
    gamma = 2 * s + 2 * tp.beta * (1 - e)
    return _tail_integral(gamma, K * C, float(J))


def _variant_regime(variant: str, alpha: float, p: float):
    edge = 0.5 - 1 / p
    if variant == "ii" and not alpha > edge:
        raise ValueError(f"variant (ii) needs alpha > 1/2 - 1/p = {edge}, got {alpha}")
    if variant == "iii" and not alpha < edge:
        raise ValueError(f"variant (iii) needs alpha < 1/2 - 1/p = {edge}, got {alpha}")


def nagaev_fdm(n, x, p, variant: str, *, profile_2: DependenceProfile | None = None,
               profile_p: DependenceProfile | None = None, x0_l2: float | None = None,
               x0_lp: float | None = None, Theta0: float | None = None, alpha: float | None = None,
               consts=None) -> BoundResult:
    """Nagaev-type bounds from functional dependence measures.

    Variant ``"i"`` consumes the two profiles and ``||X_0||`` norms; ``"ii"``
    and ``"iii"`` consume ``Theta_{0,p}`` and the decay rate ``alpha``.
    """
    if not p > 2:
        raise ValueError(f"p must exceed 2, got {p}")
    _check_n(n)
    _nonneg(x=x)
    if variant == "i":
        return _nagaev_fdm_i(n, x, p, profile_2, profile_p, x0_l2, x0_lp, consts)
    if variant not in ("ii", "iii"):
        raise ValueError(f"variant must be one of 'i', 'ii', 'iii', got {variant!r}")
    if Theta0 is None or alpha is None:
        raise ValueError(f"variant ({variant}) needs Theta0 and alpha")
    _positive(Theta0=Theta0)
    _variant_regime(variant, alpha, p)
    bid = f"nagaev_fdm_{variant}"
    c = _consts(bid, consts)
    if variant == "ii":
        nexp = 1.0
        q = 1 - 2 / p
        scale = math.sqrt(n) * Theta0
    else:
        nexp = p * (0.5 - alpha)
        q = (p - 2) / (p + 1)
        scale = n ** ((2 * p - 1 - 2 * alpha * p) / (2 + 2 * p)) * Theta0
    t1 = _poly_term(c["C1"], n**nexp, Theta0, x, p)
    t2 = 4 * g_q(q, c["C2"] * x / scale, rel_tol=1e-14) if x > 0 else math.inf
    echo = dict(n=n, x=x, p=p, variant=variant, Theta0=Theta0, alpha=alpha)
    return BoundResult("nagaev_fdm", t1 + t2, echo, USER_SUPPLIED, c, (t1, t2),
                       extras={"n_exponent": nexp, "g_q_order": q})


def _nagaev_fdm_i(n, x, p, profile_2, profile_p, x0_l2, x0_lp, consts):
    if profile_2 is None or profile_p is None or x0_l2 is None or x0_lp is None:
        raise ValueError("variant (i) needs profile_2, profile_p, x0_l2 and x0_lp")
    _positive(x0_l2=x0_l2, x0_lp=x0_lp)
    if profile_2.p != 2 or profile_p.p != p:
        raise ValueError(f"profiles must be for p=2 and p={p}")
    kind = _exact_pair(profile_2.tail, profile_p.tail)
    c = _consts("nagaev_fdm_i", consts)
    cp = c["c_p"]
    nu = _nu(profile_p, p)
    if not math.isfinite(nu):
        raise UncertifiedError("nu = sum_j mu_j diverges for this profile")
    echo = dict(n=n, x=x, p=p, variant="i", x0_l2=x0_l2, x0_lp=x0_lp,
                profile_2=profile_2.to_dict(), profile_p=profile_p.to_dict())
    if x == 0:
        return BoundResult("nagaev_fdm", math.inf, echo, USER_SUPPLIED, c, (math.inf, math.inf, 2.0),
                           extras={"nu": nu})
    t1 = cp * n / x**p * (nu ** (p + 1) + x0_lp**p)
    if nu == 0:
        t2, rem = 0.0, 0.0
    else:
        t2, rem = _exp_sum(profile_2, profile_p, p, cp * x * x / (n * nu * nu), kind)
        t2 *= 4
    t3 = _exp_term(2.0, cp * x * x, n * x0_l2**2)
    return BoundResult("nagaev_fdm", t1 + t2 + t3, echo, USER_SUPPLIED, c, (t1, t2, t3),
                       extras={"nu": nu, "exp_sum_remainder": rem})


def nagaev_dan(n, x, p, alpha, dan_p: float | DanValue, dan_2: float | DanValue, consts=None) -> BoundResult:
    """Nagaev inequality in terms of dependence-adjusted norms."""
    if not p > 2:
        raise ValueError(f"p must exceed 2, got {p}")
    _check_n(n)
    _nonneg(x=x)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    edge = 0.5 - 1 / p
    if alpha == edge:
        raise ValueError(f"alpha = 1/2 - 1/p = {edge} is the undefined boundary between the two regimes")
    dp = dan_p.value if isinstance(dan_p, DanValue) else float(dan_p)
    d2 = dan_2.value if isinstance(dan_2, DanValue) else float(dan_2)
    _positive(dan_p=dp, dan_2=d2)
    c = _consts("nagaev_dan", consts)
    an = 1.0 if alpha > edge else n ** (p / 2 - 1 - alpha * p)
    t1 = _poly_term(c["C1"], an * n, dp, x, p)
    t2 = _exp_term(c["C2"], c["C3"] * x * x, n * d2 * d2)
    echo = dict(n=n, x=x, p=p, alpha=alpha, dan_p=dp, dan_2=d2)
    return BoundResult("nagaev_dan", t1 + t2, echo, USER_SUPPLIED, c, (t1, t2),
                       extras={"a_n": an, "regime": "weak" if alpha > edge else "strong"})


def nagaev_vector_max(n, x, q, alpha, d, psi_2alpha, dan_inf, consts=None) -> BoundResult:
    """Max-norm Nagaev inequality for a ``d``-dimensional sum."""
    if not q > 2:
        raise ValueError(f"q must exceed 2, got {q}")
    _check_n(n)
    _nonneg(x=x)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d}")
    edge = 0.5 - 1 / q
    if alpha == edge:
        raise ValueError(f"alpha = 1/2 - 1/q = {edge} is the undefined boundary between the two regimes")
    _positive(psi_2alpha=psi_2alpha, dan_inf=dan_inf)
    c = _consts("nagaev_vector_max", consts)
    C = c["C_q_alpha"]
    ell = max(1.0, math.log(d))
    if alpha > edge:
        regime, growth = "i", n ** (1 / q)
        nfac = n
    else:
        regime, growth = "ii", n ** (0.5 - alpha)
        nfac = n ** (q / 2 - alpha * q)
    threshold = C * (math.sqrt(n * ell) * psi_2alpha + growth * ell**1.5 * dan_inf)
    if x < threshold:
        raise InapplicableBoundError(
            f"inequality not applicable: x = {x} is below the admissibility threshold {threshold}", threshold
        )
    t1 = _poly_term(C, nfac * ell ** (q / 2), dan_inf, x, q)
    t2 = _exp_term(C, C * x * x, n * psi_2alpha**2)
    echo = dict(n=n, x=x, q=q, alpha=alpha, d=d, psi_2alpha=psi_2alpha, dan_inf=dan_inf)
    return BoundResult("nagaev_vector_max", t1 + t2, echo, USER_SUPPLIED, c, (t1, t2),
                       extras={"regime": regime, "ell": ell, "threshold": threshold})
