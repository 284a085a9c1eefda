import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles as O
from depbound.matrix_bounds import (
    MatrixVarianceProxy,
    bernstein_beta_mixing,
    bernstein_independent,
    bernstein_tau_mixing,
    gamma_tilde,
    lambda_max,
    lambda_max_batch,
    nu2_upper_bound,
    psi_tilde,
    tau_mixing_parameters,
    variance_proxy,
    variance_proxy_iid,
)
from depbound.process_models import MatrixSeriesSpec, VarSpec, matrices_from_vectors, stationary_covariance


def _char_poly_top_root(a):
    """Largest root of det(t I - a) for d <= 3, via mpmath."""
    A = mp.matrix(a.tolist())
    d = a.shape[0]
    if d == 1:
        return A[0, 0]
    tr = sum(A[i, i] for i in range(d))
    if d == 2:
        coeffs = [1, -tr, A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]]
    else:
        m2 = sum(A[i, i] * A[j, j] - A[i, j] * A[j, i] for i in range(3) for j in range(i + 1, 3))
        det = (A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
               - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0])
               + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0]))
        coeffs = [1, -tr, m2, -det]
    return max(mp.re(r) for r in mp.polyroots(coeffs, maxsteps=200, extraprec=60))


@settings(max_examples=60, deadline=None)
@given(d=st.integers(1, 3), data=st.data())
def test_lambda_max_matches_characteristic_polynomial(d, data):
    b = data.draw(arrays(float, (d, d), elements=st.floats(-5, 5)))
    a = (b + b.T) / 2
    want = _char_poly_top_root(a)
    assert abs(lambda_max(a) - float(want)) <= 1e-10 * max(1.0, float(abs(want)))


def test_lambda_max_batch_and_validation():
    a = np.array([[[2.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [1.0, 0.0]]])
    np.testing.assert_allclose(lambda_max_batch(a), [2.0, 1.0])
    with pytest.raises(ValueError, match="symmetric"):
        lambda_max(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        lambda_max(np.ones((2, 3)))


# calculators ----------------------------------------------------------------


def test_independent_at_zero_is_dimension():
    assert bernstein_independent(10, 0.0, 7, 2.0, 1.0).raw_value == 7
    assert bernstein_independent(10, 0.0, 7, 0.0, 1.0).raw_value == 7


@pytest.mark.parametrize("x,M", [(1.0, 1.0), (6.0, 2.5)])
def test_independent_without_variance(x, M):
    r = bernstein_independent(10, x, 4, 0.0, M)
    assert r.raw_value == pytest.approx(4 * math.exp(-3 * x / (2 * M)), rel=1e-15)


def test_independent_matches_oracle():
    r = bernstein_independent(100, 30.0, 5, 40.0, 2.0)
    assert r.raw_value == pytest.approx(float(O.bernstein_independent(100, 30.0, 5, 40.0, 2.0)), rel=1e-14)
    assert r.clamped <= 1.0


def test_gamma_tilde_branches():
    n = 1000
    # fast mixing: the max picks 2
    assert gamma_tilde(1e6, n) == pytest.approx(2 * math.log(n) / math.log(2))
    # slow mixing: 32 log n / (gamma log 2)
    want = math.log(n) / math.log(2) * 32 * math.log(n) / (0.1 * math.log(2))
    assert gamma_tilde(0.1, n) == pytest.approx(want)


def test_psi_tilde_branches():
    p1, pt = psi_tilde(1e-9, 1e9, 64, 4)
    assert p1 == 0.25
    assert pt == pytest.approx(6.0)  # log2(64) * max(1, tiny)
    p1, pt = psi_tilde(3.0, 0.5, 64, 4)
    assert p1 == 3.0
    assert pt == pytest.approx(6 * 8 * math.log(3.0 * 64.0**6 * 4) / 0.5)


def test_beta_mixing_matches_oracle():
    r = bernstein_beta_mixing(500, 80.0, 3, 1.5, 2.0, 0.3, consts={"C": 0.25})
    want = O.bernstein_beta(500, 80.0, 3, 1.5, 2.0, 0.3, 0.25)
    assert r.raw_value == pytest.approx(float(want), rel=1e-13)
    assert r.constants_source == "user_supplied"


def test_tau_mixing_matches_oracle():
    r = bernstein_tau_mixing(400, 5e4, 6, 2.0, 1.5, 0.4, 0.7)
    want = O.bernstein_tau(400, 5e4, 6, 2.0, 1.5, 0.4, 0.7)
    assert r.raw_value == pytest.approx(float(want), rel=1e-13)
    assert r.constants_source == "paper_explicit"


@settings(max_examples=50, deadline=None)
@given(x1=st.floats(0.0, 1e4), x2=st.floats(0.0, 1e4), nu2=st.floats(0.0, 10.0), M=st.floats(0.1, 5.0))
def test_matrix_bounds_nonincreasing_in_x(x1, x2, nu2, M):
    lo, hi = sorted((x1, x2))
    for f in (lambda x: bernstein_independent(50, x, 3, nu2, M),
              lambda x: bernstein_beta_mixing(50, x, 3, nu2, M, 0.5),
              lambda x: bernstein_tau_mixing(50, x, 3, nu2, M, 0.5, 0.5)):
        assert f(hi).raw_value <= f(lo).raw_value * (1 + 1e-12)


# variance proxies ---------------------------------------------------------------


@pytest.mark.parametrize("gen", ["rank_one_from_var", "diagonal_ar"])
def test_single_window_proxy_matches_exact(gen):
    spec = MatrixSeriesSpec(gen, VarSpec(3, kappa=0.0), clip=2.0)
    exact = variance_proxy_iid(spec).value
    est = variance_proxy(spec, [1], 50_000, seed=1)
    assert est.method == "window_monte_carlo" and est.lower_estimate
    assert abs(est.value - exact) < 4 * est.se


def test_exact_proxy_requires_independence():
    with pytest.raises(ValueError):
        variance_proxy_iid(MatrixSeriesSpec("diagonal_ar", VarSpec(2, kappa=0.5)))


def test_window_proxy_below_certified_upper_bound():
    kappa = 0.5
    spec = MatrixSeriesSpec("diagonal_ar", VarSpec(2, kappa=kappa))
    up = nu2_upper_bound(spec)
    assert up.value == pytest.approx(1 / (1 - kappa) ** 2, rel=1e-12)
    est = variance_proxy(spec, [1, 4, 32], 20_000, seed=2)
    assert est.value <= up.value + 4 * est.se
    # independent windows: w * E X^2 in every window
    assert est.per_window[0] == pytest.approx(1 / (1 - kappa**2), rel=0.05)


def test_certified_bound_for_full_transition():
    spec = MatrixSeriesSpec("rank_one_from_var", VarSpec(2, matrix=[[0.5, 0.1], [0.2, 0.25]]))
    up = nu2_upper_bound(spec)
    est = variance_proxy(spec, [1, 8], 20_000, seed=3)
    assert up.method == "certified_upper"
    assert est.value <= up.value + 4 * est.se


def test_proxy_argument_checks():
    spec = MatrixSeriesSpec("diagonal_ar", VarSpec(2, kappa=0.0))
    with pytest.raises(ValueError):
        variance_proxy(spec, [], 100, 0)
    with pytest.raises(ValueError):
        variance_proxy(spec, [5], 100, 0, n=4)
    with pytest.raises(ValueError):
        MatrixVarianceProxy(-1.0, "exact_iid")


# tau parameters --------------------------------------------------------------


@pytest.mark.parametrize("gen", ["rank_one_from_var", "diagonal_ar"])
def test_tau_parameters_dominate_coupled_distance(gen):
    kappa, d, clip = 0.6, 2, 1.5
    spec = MatrixSeriesSpec(gen, VarSpec(d, kappa=kappa), clip=clip)
    psi1, psi2 = tau_mixing_parameters(spec)
    assert psi2 == pytest.approx(-math.log(kappa))
    rng = np.random.default_rng(0)
    s = math.sqrt(stationary_covariance(spec.var)[0, 0])
    for m in (1, 3, 6):
        v0, w0 = rng.standard_normal((2, 20_000, d)) * s
        shared = rng.standard_normal((20_000, d)) * s * math.sqrt(1 - kappa ** (2 * m))
        X = matrices_from_vectors(spec, kappa**m * v0 + shared)
        Y = matrices_from_vectors(spec, kappa**m * w0 + shared)
        dist = np.abs(np.linalg.eigvalsh(X - Y)).max(axis=1)
        assert dist.mean() <= clip * psi1 * math.exp(-psi2 * (m - 1))


def test_tau_parameters_need_clip_and_dependence():
    with pytest.raises(ValueError):
        tau_mixing_parameters(MatrixSeriesSpec("diagonal_ar", VarSpec(2, kappa=0.5)))
    with pytest.raises(ValueError):
        tau_mixing_parameters(MatrixSeriesSpec("diagonal_ar", VarSpec(2, kappa=0.0), clip=1.0))
