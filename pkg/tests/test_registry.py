import math

import jsonschema
import pytest

from depbound import scalar_bounds as sb
from depbound.process_models import (
    Explicit,
    Geometric,
    InnovationLaw,
    LinearProcessSpec,
    MatrixSeriesSpec,
    VarSpec,
)
from depbound.registry import (
    LIST_SCHEMA,
    MOMENT_BOUNDS,
    REGISTRY,
    check_hypotheses,
    derive_params,
    list_bounds,
    lookup,
    validate_params,
)

UNIF_MA = LinearProcessSpec(Explicit((1.0, 0.5, 0.25)), InnovationLaw.uniform(1.0))


def test_registry_contents():
    assert len(REGISTRY) == 12
    assert not set(REGISTRY) & set(MOMENT_BOUNDS)
    assert all(e.kind == "probability" for e in REGISTRY.values())
    assert all(e.kind == "moment" for e in MOMENT_BOUNDS.values())


@pytest.mark.parametrize("moments", [False, True])
def test_listing_validates(moments):
    listing = list_bounds(include_moments=moments)
    jsonschema.validate(listing, LIST_SCHEMA)
    assert len(listing) == 12 + 2 * moments


def test_every_listed_schema_is_a_valid_schema():
    for e in list(REGISTRY.values()) + list(MOMENT_BOUNDS.values()):
        jsonschema.Draft202012Validator.check_schema(e.params)


def test_lookup():
    assert lookup("phi_moment").kind == "moment"
    with pytest.raises(KeyError, match="unknown bound"):
        lookup("chebyshev")


@pytest.mark.parametrize("params", [
    {"n": 10, "x": 1.0, "d": 2, "sigma2": 1.0},  # missing M
    {"n": 10, "x": -1.0, "d": 2, "sigma2": 1.0, "M": 1.0},
    {"n": 1.5, "x": 1.0, "d": 2, "sigma2": 1.0, "M": 1.0},
    {"n": 10, "x": 1.0, "d": 2, "sigma2": 1.0, "M": 0.0},
])
def test_validate_rejects_bad_params(params):
    with pytest.raises(jsonschema.ValidationError):
        validate_params("bernstein_independent", params)


def test_validate_accepts_good_params():
    validate_params("bernstein_independent", {"n": 10, "x": 1.0, "d": 2, "sigma2": 1.0, "M": 1.0})


def test_evaluate_dispatches_and_guards_constants():
    e = lookup("bernstein_independent")
    r = e.evaluate({"n": 10, "x": 3.0, "d": 2, "sigma2": 0.0, "M": 1.0})
    assert r.raw_value == pytest.approx(2 * math.exp(-4.5))
    with pytest.raises(ValueError, match="no user-supplied constants"):
        e.evaluate({"n": 10, "x": 3.0, "d": 2, "sigma2": 0.0, "M": 1.0}, consts={"C": 2.0})
    r = lookup("bernstein_beta_mixing").evaluate(
        {"n": 10, "x": 3.0, "d": 2, "nu2": 1.0, "M": 1.0, "gamma": 0.5}, consts={"C": 0.5})
    assert r.constants_source == sb.USER_SUPPLIED


def test_fdm_variant_i_builds_profiles_from_process():
    spec = LinearProcessSpec(Geometric(0.5))
    params = {"n": 100, "x": 50.0, "p": 4.0, "variant": "i", "process": spec.to_dict(), "x0_lp": 3.0}
    r = lookup("nagaev_fdm").evaluate(params)
    assert r.raw_value > 0
    assert "process" in params  # caller's dict untouched
    with pytest.raises(ValueError, match="x0_lp"):
        lookup("nagaev_fdm").evaluate({"n": 100, "x": 50.0, "p": 4.0, "variant": "i", "process": spec})


def test_moment_entries_evaluate():
    r = lookup("phi_moment").evaluate({"n": 3, "p": 2, "C": 1.0, "phi": [1.0, 0.5, 0.25]})
    assert r.raw_value > 0
    spec = LinearProcessSpec(Geometric(0.5))
    r = lookup("rosenthal_liu_xiao_wu").evaluate({"n": 10, "p": 4.0, "process": spec.to_dict(), "x0_lp": 3.0})
    assert r.raw_value > 0


# hypotheses ------------------------------------------------------------------------


def test_linear_short_hypotheses():
    spec = LinearProcessSpec(Geometric(0.5))
    ok = derive_params("nagaev_linear_short", spec, 50)
    assert check_hypotheses("nagaev_linear_short", spec, ok) == []
    bad = dict(ok, f_l1=ok["f_l1"] / 2)
    assert any("f_l1" in f for f in check_hypotheses("nagaev_linear_short", spec, bad))
    assert check_hypotheses("nagaev_linear_short", VarSpec(2, kappa=0.1), ok)


def test_bounded_innovation_hypotheses():
    spec = LinearProcessSpec(Geometric(0.5))
    out = check_hypotheses("merlevede_chernoff", spec, {"B": 10.0})
    assert any("unbounded" in f for f in out)
    p = derive_params("doukhan_louhichi", UNIF_MA, 20)
    assert check_hypotheses("doukhan_louhichi", UNIF_MA, p) == []
    assert check_hypotheses("doukhan_louhichi", UNIF_MA, dict(p, M=p["M"] / 2))


def test_matrix_hypotheses():
    spec = MatrixSeriesSpec("diagonal_ar", VarSpec(2, kappa=0.4), clip=1.0)
    p = derive_params("bernstein_tau_mixing", spec, 30)
    assert check_hypotheses("bernstein_tau_mixing", spec, p) == []
    assert any("psi2" in f for f in check_hypotheses("bernstein_tau_mixing", spec, dict(p, psi2=2 * p["psi2"])))
    assert any("dimension" in f for f in check_hypotheses("bernstein_tau_mixing", spec, dict(p, d=3)))
    unclipped = MatrixSeriesSpec("diagonal_ar", VarSpec(2, kappa=0.4))
    assert "unclipped" in check_hypotheses("bernstein_tau_mixing", unclipped, p)[0]


def test_vstat_has_no_simulated_counterpart():
    assert check_hypotheses("vstat_fourier", VarSpec(1, kappa=0.1), {})


# derivations -------------------------------------------------------------------------


def test_derived_linear_params():
    spec = LinearProcessSpec(Geometric(0.5))
    p = derive_params("nagaev_linear_short", spec, 50, p=6.0)
    assert p["f_l1"] == pytest.approx(math.fsum(abs(w) for w in spec.weights), rel=1e-15)
    assert p["f_l1"] == pytest.approx(2.0, rel=1e-3)  # geometric series, truncated
    assert p["eps_l2"] == pytest.approx(1.0)
    assert p["eps_lp"] == pytest.approx(15 ** (1 / 6))  # E Z^6 = 15


def test_derived_doukhan_params():
    p = derive_params("doukhan_louhichi", UNIF_MA, 20)
    assert p["M"] == pytest.approx(1.75)
    assert p["L1"] == p["L2"] == 3.0
    with pytest.raises(ValueError, match="finite moving averages"):
        derive_params("doukhan_louhichi", LinearProcessSpec(Geometric(0.5), InnovationLaw.uniform(1.0)), 20)
    with pytest.raises(ValueError, match="bounded"):
        derive_params("doukhan_louhichi", LinearProcessSpec(Explicit((1.0, 0.5))), 20)


def test_no_derivation_for_other_bounds():
    with pytest.raises(ValueError, match="supply parameters"):
        derive_params("nagaev_dan", LinearProcessSpec(Geometric(0.5)), 20)
