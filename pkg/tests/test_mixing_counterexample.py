import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

import oracles as O
from depbound.mixing_counterexample import (
    ALPHA_MAX,
    alpha_upper_bound,
    beta_lower_bound,
    d_sweep,
    hoeffding_guarantee,
    markov_collapse_check,
    separation_witness,
    sweep_csv,
)
from depbound.process_models import Explicit, Geometric, LinearProcessSpec, Polynomial, VarSpec, stationary_covariance


def test_beta_lower_matches_oracle():
    assert beta_lower_bound(100_000, 0.9, 10) == pytest.approx(float(O.beta_lower(100_000, 0.9, 10)), rel=1e-14)


def test_beta_lower_changes_sign_at_critical_dimension():
    kappa, m = 0.5, 1
    d_star = 18 * math.pi**2 * math.log(2) / kappa ** (2 * m)
    assert beta_lower_bound(math.floor(d_star), kappa, m) < 0 < beta_lower_bound(math.ceil(d_star), kappa, m)
    k = mp.mpf(kappa)
    assert 1 - 2 * mp.exp(-mp.mpf(d_star) * k ** (2 * m) / (18 * mp.pi**2)) == pytest.approx(0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(d1=st.integers(1, 10**6), d2=st.integers(1, 10**6), kappa=st.floats(0.05, 0.99), m=st.integers(1, 20))
def test_beta_lower_nondecreasing_in_dimension(d1, d2, kappa, m):
    lo, hi = sorted((d1, d2))
    assert beta_lower_bound(lo, kappa, m) <= beta_lower_bound(hi, kappa, m)
    assert beta_lower_bound(hi, kappa, m) <= 1


@pytest.mark.parametrize("args", [(0, 0.5, 1), (5, 1.0, 1), (5, 0.5, 0), (5, 0.0, 1)])
def test_beta_lower_domain(args):
    with pytest.raises(ValueError):
        beta_lower_bound(*args)


def test_hoeffding_guarantee_formula():
    eta = 0.5**2 / (3 * math.pi)
    assert hoeffding_guarantee(1000, 0.5, 2) == pytest.approx(1 - 2 * math.exp(-1000 * eta**2 / 2))


# alpha ----------------------------------------------------------------------


def test_alpha_full_transition_uses_condition_number():
    spec = VarSpec(2, matrix=[[0.5, 0.1], [0.2, 0.25]])
    w = np.linalg.eigvalsh(stationary_covariance(spec))
    a = alpha_upper_bound(spec, 3)
    assert a.raw == pytest.approx(math.sqrt(w[-1] / w[0]) * np.linalg.norm(spec.matrix, 2) ** 3, rel=1e-12)
    assert a.clamped == min(a.raw, ALPHA_MAX)


def test_alpha_unequal_innovation_variances():
    spec = VarSpec(3, kappa=0.5, innovation_var=[1.0, 4.0, 2.0])
    assert alpha_upper_bound(spec, 2).raw == pytest.approx(2 * 0.25)


def test_alpha_at_lag_zero_is_clamped():
    a = alpha_upper_bound(VarSpec(5, kappa=0.3), 0)
    assert a.raw == 1.0 and a.clamped == ALPHA_MAX
    with pytest.raises(ValueError):
        alpha_upper_bound(VarSpec(5, kappa=0.3), -1)


# Markov guard -------------------------------------------------------------------


@pytest.mark.parametrize("spec,model", [
    (VarSpec(3, kappa=0.4), "VAR(1)"),
    (LinearProcessSpec(Geometric(0.7)), "AR(1)"),
    (LinearProcessSpec(Explicit((0.0, 2.0))), "i.i.d."),
])
def test_markov_models_accepted(spec, model):
    rec = markov_collapse_check(spec, 2)
    assert rec["markov"] and rec["model"] == model


@pytest.mark.parametrize("spec", [
    LinearProcessSpec(Explicit((1.0, 0.5, 0.25))),
    LinearProcessSpec(Explicit((1.0, 0.5))),
    LinearProcessSpec(Polynomial(1.0, 1.5), truncation_lag=50),
])
def test_moving_averages_refused(spec):
    with pytest.raises(ValueError, match="not Markov"):
        markov_collapse_check(spec, 1)


# witness -------------------------------------------------------------------------


@pytest.mark.parametrize("rho", [0.0, 0.3, 0.81])
def test_orthant_probability_identity(rho):
    # P(X <= 0, Y <= 0) for a standard bivariate normal with correlation rho
    want = stats.multivariate_normal(mean=[0, 0], cov=[[1, rho], [rho, 1]]).cdf([0, 0])
    assert 0.25 + math.asin(rho) / (2 * math.pi) == pytest.approx(want, abs=1e-6)


def test_witness_constants():
    w = separation_witness(20, 0.9, 2, 2000, seed=1)
    rho = 0.81
    assert w.theta == pytest.approx(0.25 + math.asin(rho) / (2 * math.pi))
    assert w.eta == pytest.approx(rho / (3 * math.pi))
    assert w.threshold == pytest.approx(w.theta - w.eta / 2)
    assert w.markov["model"] == "VAR(1)"


def test_witness_separates_in_high_dimension():
    w = separation_witness(2000, 0.8, 1, 4000, seed=2)
    assert w.beta_lower_empirical > 0.9
    assert w.beta_lower_empirical >= w.hoeffding_guarantee - 3 * w.se


def test_witness_independent_of_workers():
    a = separation_witness(50, 0.5, 1, 5000, seed=3, workers=1)
    b = separation_witness(50, 0.5, 1, 5000, seed=3, workers=3)
    assert a == b


def test_witness_argument_checks():
    with pytest.raises(ValueError):
        separation_witness(10, 0.5, 1, 999, 0)
    with pytest.raises(ValueError):
        separation_witness(10, 1.5, 1, 1000, 0)


def test_sweep_and_csv():
    rows, wits = d_sweep([5, 50], 0.6, 1, 2000, seed=4)
    assert [r.d for r in rows] == [5, 50]
    assert all(r.alpha_upper == pytest.approx(0.6) for r in rows)
    lines = sweep_csv(rows).strip().split("\n")
    assert lines[0] == "d,beta_lower_theoretical,beta_lower_empirical,se,alpha_upper"
    assert lines[1].startswith("5,") and len(lines) == 3
    assert wits[1].beta_lower_empirical == rows[1].beta_lower_empirical
