"""Registry of tail-probability calculators: parameter schemas, constants,
hypothesis checks and parameter derivation from process specs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import matrix_bounds as mb
from . import scalar_bounds as sb
from . import ustat_vstat as uv
from .dependence_measures import fdm_analytic_linear
from .process_models import (
    Explicit,
    LinearProcessSpec,
    MatrixSeriesSpec,
    VarSpec,
    matrix_second_moment,
    spec_from_dict,
)


def _num(minimum=None, exclusive=None, integer=False):
    s: dict = {"type": "integer" if integer else "number"}
    if minimum is not None:
        s["minimum"] = minimum
    if exclusive is not None:
        s["exclusiveMinimum"] = exclusive
    return s


def _schema(props: dict, required: list[str]) -> dict:
    return {"type": "object", "properties": props, "required": required, "additionalProperties": False}


@dataclass(frozen=True)
class Constant:
    name: str
    source: str
    default: float | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "source": self.source}
        if self.default is not None:
            d["default"] = self.default
        return d


@dataclass(frozen=True)
class BoundEntry:
    bound_id: str
    module: str
    summary: str
    fn: Callable
    params: dict
    constants: tuple
    statistic: str | None
    constant_key: str | None = None
    kind: str = "probability"
    prepare: Callable | None = None

    def evaluate(self, params: dict, consts: dict | None = None):
        p = dict(params)
        if self.prepare is not None:
            p = self.prepare(p)
        user = [c.name for c in self.constants if c.source == sb.USER_SUPPLIED]
        if user:
            p["consts"] = consts or {}
        elif consts:
            raise ValueError(f"{self.bound_id} has no user-supplied constants; got {sorted(consts)}")
        return self.fn(**p)

    def to_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            "module": self.module,
            "kind": self.kind,
            "summary": self.summary,
            "statistic": self.statistic,
            "parameters": self.params,
            "constants": [c.to_dict() for c in self.constants],
        }


def _user(*names):
    return tuple(Constant(n, sb.USER_SUPPLIED, 1.0) for n in names)


def _explicit(*names):
    return tuple(Constant(n, sb.PAPER_EXPLICIT) for n in names)


_N = _num(1, integer=True)
_N2 = _num(2, integer=True)
_X = _num(0)
_POS = _num(exclusive=0)
_P2 = _num(exclusive=2)


def _prepare_fdm(p: dict) -> dict:
    """Variant (i) takes a linear process spec and builds its analytic profiles."""
    if p.get("variant") == "i":
        proc = p.pop("process")
        spec = proc if isinstance(proc, LinearProcessSpec) else spec_from_dict(proc)
        max_lag = int(p.pop("max_lag", 200))
        p["profile_2"] = fdm_analytic_linear(spec, 2, max_lag)
        p["profile_p"] = fdm_analytic_linear(spec, p["p"], max_lag)
        p.setdefault("x0_l2", math.sqrt(spec.marginal_variance()))
        if "x0_lp" not in p:
            raise ValueError("variant (i) needs x0_lp (the L_p norm of X_0)")
    return p


_PROCESS = {"type": "object"}

_ENTRIES = [
    BoundEntry(
        "nagaev_linear_short", "scalar_bounds", "Nagaev inequality, short-range linear process",
        sb.nagaev_linear_short,
        _schema({"n": _N, "x": _X, "p": _P2, "f_l1": _POS, "eps_lp": _POS, "eps_l2": _POS},
                ["n", "x", "p", "f_l1", "eps_lp", "eps_l2"]),
        _explicit("c_p"), "abs_sum",
    ),
    BoundEntry(
        "nagaev_linear_long", "scalar_bounds", "Nagaev inequality, long-range linear process",
        sb.nagaev_linear_long,
        _schema({"n": _N, "x": _X, "p": _P2, "beta": {"type": "number", "exclusiveMinimum": 0.5, "exclusiveMaximum": 1},
                 "K": _POS, "eps_lp": _POS, "eps_l2": _POS},
                ["n", "x", "p", "beta", "K", "eps_lp", "eps_l2"]),
        _user("C1", "C2"), "abs_sum",
    ),
    BoundEntry(
        "merlevede_chernoff", "scalar_bounds", "Chernoff bound from the geometric alpha/tau-mixing MGF bound",
        sb.merlevede_chernoff,
        _schema({"n": _N2, "x": _X, "sigma2": _X, "B": _POS}, ["n", "x", "sigma2", "B"]),
        _user("C1", "C2"), "sum",
    ),
    BoundEntry(
        "doukhan_louhichi", "scalar_bounds", "Exponential bound under product-covariance weak dependence (one-sided)",
        sb.doukhan_louhichi_bound,
        _schema({"n": _N, "x": _X, "a": _X, "b": _X, "K": _POS, "M": _POS, "L1": _POS, "L2": _POS},
                ["n", "x", "a", "b", "K", "M", "L1", "L2"]),
        _explicit("C1", "C2"), "sum",
    ),
    BoundEntry(
        "nagaev_fdm", "scalar_bounds", "Nagaev inequalities from functional dependence measures, variants i/ii/iii",
        sb.nagaev_fdm,
        _schema({"n": _N, "x": _X, "p": _P2, "variant": {"enum": ["i", "ii", "iii"]},
                 "process": _PROCESS, "max_lag": _N, "x0_l2": _POS, "x0_lp": _POS,
                 "Theta0": _POS, "alpha": _POS},
                ["n", "x", "p", "variant"]),
        _user("c_p", "C1", "C2"), "abs_sum", prepare=_prepare_fdm,
    ),
    BoundEntry(
        "nagaev_dan", "scalar_bounds", "Nagaev inequality in dependence-adjusted norms",
        sb.nagaev_dan,
        _schema({"n": _N, "x": _X, "p": _P2, "alpha": _POS, "dan_p": _POS, "dan_2": _POS},
                ["n", "x", "p", "alpha", "dan_p", "dan_2"]),
        _user("C1", "C2", "C3"), "abs_sum",
    ),
    BoundEntry(
        "nagaev_vector_max", "scalar_bounds", "Max-norm Nagaev inequality for high-dimensional sums",
        sb.nagaev_vector_max,
        _schema({"n": _N, "x": _X, "q": _P2, "alpha": _POS, "d": _N, "psi_2alpha": _POS, "dan_inf": _POS},
                ["n", "x", "q", "alpha", "d", "psi_2alpha", "dan_inf"]),
        _user("C_q_alpha"), "max_abs_sum_coord",
    ),
    BoundEntry(
        "bernstein_independent", "matrix_bounds", "Matrix Bernstein inequality, independent summands",
        mb.bernstein_independent,
        _schema({"n": _N, "x": _X, "d": _N, "sigma2": _X, "M": _POS}, ["n", "x", "d", "sigma2", "M"]),
        (), "matrix_lambda_max",
    ),
    BoundEntry(
        "bernstein_beta_mixing", "matrix_bounds", "Matrix Bernstein inequality, geometric beta-mixing",
        mb.bernstein_beta_mixing,
        _schema({"n": _N2, "x": _X, "d": _N, "nu2": _X, "M": _POS, "gamma": _POS},
                ["n", "x", "d", "nu2", "M", "gamma"]),
        _user("C"), "matrix_lambda_max",
    ),
    BoundEntry(
        "bernstein_tau_mixing", "matrix_bounds", "Matrix Bernstein inequality, geometric tau-mixing",
        mb.bernstein_tau_mixing,
        _schema({"n": _N2, "x": _X, "d": _N, "nu2": _X, "M": _POS, "psi1": _POS, "psi2": _POS},
                ["n", "x", "d", "nu2", "M", "psi1", "psi2"]),
        _explicit("15^2", "60^2", "8", "2", "6"), "matrix_lambda_max",
    ),
    BoundEntry(
        "ustat_exponential", "ustat_vstat", "Exponential inequality for U-statistics under geometric phi-mixing",
        uv.ustat_exponential_bound,
        _schema({"n": _num(4, integer=True), "x": _X, "M": _POS}, ["n", "x", "M"]),
        _user("c_prime", "C_prime"), "u_statistic",
    ),
    BoundEntry(
        "vstat_fourier", "ustat_vstat", "Exponential inequality for degenerate V-statistics with integrable Fourier transform",
        uv.vstat_fourier_bound,
        _schema({"n": _N2, "x": _X, "p": _N, "r": _num(1, integer=True), "fourier_l1": _POS, "c": _POS, "C_mix": _POS},
                ["n", "x", "p", "r", "fourier_l1", "c", "C_mix"]),
        _user("C_prime"), None,
    ),
]

REGISTRY: dict[str, BoundEntry] = {e.bound_id: e for e in _ENTRIES}


def _rosenthal(n, p, process, x0_lp, x0_l2=None, max_lag=200):
    spec = process if isinstance(process, LinearProcessSpec) else spec_from_dict(process)
    p2 = fdm_analytic_linear(spec, 2, max_lag)
    pp = fdm_analytic_linear(spec, p, max_lag)
    x0_l2 = math.sqrt(spec.marginal_variance()) if x0_l2 is None else x0_l2
    val = sb.rosenthal_liu_xiao_wu(n, p, p2, pp, x0_l2, x0_lp)
    echo = dict(n=n, p=p, process=spec.to_dict(), x0_lp=x0_lp, x0_l2=x0_l2, max_lag=max_lag)
    return sb.BoundResult("rosenthal_liu_xiao_wu", val, echo, sb.PAPER_EXPLICIT, {}, (val,), probability=False,
                          extras={"quantity": "upper bound on ||S_n||_{L_p}"})


def _phi_moment(n, p, C, phi):
    val = sb.phi_moment_bound(n, p, C, phi)
    echo = dict(n=n, p=p, C=C, phi=list(phi))
    return sb.BoundResult("phi_moment", val, echo, sb.PAPER_EXPLICIT, {}, (val,), probability=False,
                          extras={"quantity": "upper bound on E|S_n|^p"})


MOMENT_BOUNDS: dict[str, BoundEntry] = {
    e.bound_id: e
    for e in [
        BoundEntry(
            "phi_moment", "scalar_bounds", "Moment bound for bounded phi-mixing sums", _phi_moment,
            _schema({"n": _N, "p": _num(2, integer=True), "C": _POS, "phi": {"type": "array", "items": _X}},
                    ["n", "p", "C", "phi"]),
            _explicit("8"), None, kind="moment",
        ),
        BoundEntry(
            "rosenthal_liu_xiao_wu", "scalar_bounds", "Rosenthal-type bound from functional dependence measures",
            _rosenthal,
            _schema({"n": _N, "p": _P2, "process": _PROCESS, "x0_lp": _POS, "x0_l2": _POS, "max_lag": _N},
                    ["n", "p", "process", "x0_lp"]),
            _explicit("87", "29", "3"), None, kind="moment",
        ),
    ]
}


def lookup(bound_id: str) -> BoundEntry:
    if bound_id in REGISTRY:
        return REGISTRY[bound_id]
    if bound_id in MOMENT_BOUNDS:
        return MOMENT_BOUNDS[bound_id]
    raise KeyError(f"unknown bound {bound_id!r}; see list-bounds")


def validate_params(bound_id: str, params: dict) -> None:
    import jsonschema

    jsonschema.validate(params, lookup(bound_id).params)


LIST_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["bound_id", "module", "kind", "summary", "statistic", "parameters", "constants"],
        "properties": {
            "bound_id": {"type": "string"},
            "module": {"enum": ["scalar_bounds", "matrix_bounds", "ustat_vstat"]},
            "kind": {"enum": ["probability", "moment"]},
            "summary": {"type": "string"},
            "statistic": {"type": ["string", "null"]},
            "parameters": {"type": "object", "required": ["type", "properties", "required"]},
            "constants": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["name", "source"],
                    "properties": {
                        "name": {"type": "string"},
                        "source": {"enum": [sb.PAPER_EXPLICIT, sb.USER_SUPPLIED]},
                        "default": {"type": "number"},
                    },
                },
            },
        },
    },
}


def list_bounds(include_moments: bool = False) -> list[dict]:
    out = [e.to_dict() for e in REGISTRY.values()]
    if include_moments:
        out += [e.to_dict() for e in MOMENT_BOUNDS.values()]
    return out


# ---------------------------------------------------------------------------
# hypotheses and parameter derivation


_RTOL = 1e-12


def _ge(name, given, needed, out):
    if given < needed * (1 - _RTOL):
        out.append(f"{name} = {given} is below the value {needed} required by the process")


def _le(name, given, allowed, out):
    if given > allowed * (1 + _RTOL):
        out.append(f"{name} = {given} exceeds the certified value {allowed}")


def check_hypotheses(bound_id: str, spec, params: dict) -> list[str]:
    """Checkable hypotheses of a bound for a given generating spec; empty when all hold."""
    out: list[str] = []
    n = params.get("n")
    if bound_id in ("nagaev_linear_short", "nagaev_linear_long", "nagaev_fdm", "nagaev_dan"):
        if not isinstance(spec, LinearProcessSpec):
            return [f"{bound_id} needs a linear process spec"]
        law = spec.innovation
        if "eps_lp" in params:
            _ge("eps_lp", params["eps_lp"], law.lp_norm(params["p"]), out)
        if "eps_l2" in params:
            _ge("eps_l2", params["eps_l2"], law.lp_norm(2), out)
        if bound_id == "nagaev_linear_short":
            _ge("f_l1", params["f_l1"], spec.f_l1, out)
        if bound_id == "nagaev_linear_long":
            beta = params["beta"]
            j = np.arange(len(spec.weights))
            _ge("K", params["K"], float(np.max(np.abs(spec.weights) * (1.0 + j) ** beta)), out)
    elif bound_id in ("merlevede_chernoff", "doukhan_louhichi"):
        if not isinstance(spec, LinearProcessSpec):
            return [f"{bound_id} needs a scalar linear process spec"]
        sup = spec.sup_abs
        if not math.isfinite(sup):
            out.append("innovations are unbounded; the bound needs an almost-sure bound on X")
        elif bound_id == "merlevede_chernoff":
            _ge("B", params["B"], sup, out)
        else:
            _ge("M", params["M"], sup, out)
    elif bound_id == "nagaev_vector_max":
        if not isinstance(spec, VarSpec):
            out.append("nagaev_vector_max needs a VAR spec")
        elif params.get("d") != spec.dimension:
            out.append(f"d = {params.get('d')} differs from the spec dimension {spec.dimension}")
    elif bound_id.startswith("bernstein_"):
        if not isinstance(spec, MatrixSeriesSpec):
            return [f"{bound_id} needs a matrix series spec"]
        if spec.clip is None:
            return ["matrix series is unclipped; no almost-sure bound M exists"]
        _ge("M", params["M"], spec.bound, out)
        if params.get("d") != spec.dimension:
            out.append(f"d = {params.get('d')} differs from the spec dimension {spec.dimension}")
        if bound_id == "bernstein_independent":
            if spec.var.transition_norm != 0:
                out.append("summands are dependent (nonzero transition)")
            else:
                _ge("sigma2", params["sigma2"], n * mb.lambda_max(matrix_second_moment(spec)), out)
        if bound_id == "bernstein_tau_mixing":
            _ge("nu2", params["nu2"], mb.nu2_upper_bound(spec).value, out)
            if spec.var.transition_norm > 0:
                psi1, psi2 = mb.tau_mixing_parameters(spec)
                _ge("psi1", params["psi1"], psi1, out)
                _le("psi2", params["psi2"], psi2, out)
    elif bound_id == "ustat_exponential":
        if not isinstance(spec, (LinearProcessSpec, VarSpec)):
            out.append("ustat_exponential needs a linear or VAR spec")
    elif bound_id == "vstat_fourier":
        out.append("vstat_fourier has no simulated counterpart in the harness")
    return out


def derive_params(bound_id: str, spec, n: int, **extra) -> dict:
    """Bound inputs implied by a generating spec (only where they are exactly computable)."""
    if bound_id == "nagaev_linear_short":
        p = float(extra.get("p", 4.0))
        law = spec.innovation
        return {"n": n, "p": p, "f_l1": spec.f_l1, "eps_lp": law.lp_norm(p), "eps_l2": law.lp_norm(2)}
    if bound_id == "doukhan_louhichi":
        # a finite moving average of order q with |X| <= M: products of blocks more than q apart are
        # independent, and |Cov| <= M^(u+v) otherwise; Psi(u, v) = u + v >= 2 absorbs rho = 1 on lags <= q.
        if not isinstance(spec.coefficients, Explicit):
            raise ValueError("doukhan_louhichi parameters derive only for finite moving averages")
        q = len(spec.coefficients.values) - 1
        M = spec.sup_abs
        if not math.isfinite(M):
            raise ValueError("innovations must be bounded")
        return {"n": n, "a": 0.0, "b": 0.0, "K": 1.0, "M": M, "L1": q + 1.0, "L2": q + 1.0}
    if bound_id == "bernstein_independent":
        return {"n": n, "d": spec.dimension, "M": spec.bound,
                "sigma2": n * mb.lambda_max(matrix_second_moment(spec))}
    if bound_id == "bernstein_tau_mixing":
        psi1, psi2 = mb.tau_mixing_parameters(spec)
        return {"n": n, "d": spec.dimension, "M": spec.bound, "nu2": mb.nu2_upper_bound(spec).value,
                "psi1": psi1, "psi2": psi2}
    raise ValueError(f"no parameter derivation for {bound_id!r}; supply parameters explicitly")
