import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from depbound.process_models import Geometric, LinearProcessSpec, simulate_linear
from depbound.ustat_vstat import (
    BudgetExceededError,
    FiniteSupportLaw,
    KernelSpec,
    builtin_kernel,
    hoeffding_decompose,
    u_statistic,
    ustat_exponential_bound,
    v_statistic,
    vstat_fourier_bound,
)

samples = st.lists(st.floats(-3, 3), min_size=4, max_size=25)


@settings(max_examples=40, deadline=None)
@given(x=samples)
def test_sum_kernel_gives_twice_the_mean(x):
    k = builtin_kernel("sum")
    assert u_statistic(x, k) == pytest.approx(2 * math.fsum(x) / len(x), abs=1e-12)
    assert v_statistic(x, k) == pytest.approx(2 * math.fsum(x) / len(x), abs=1e-12)


def test_hand_enumeration_small_sample():
    x = [0.3, -1.2, 2.0, 0.7, -0.4]
    k = builtin_kernel("product", arity=3)
    u = math.fsum(a * b * c for a, b, c in itertools.combinations(x, 3)) / math.comb(5, 3)
    v = math.fsum(a * b * c for a, b, c in itertools.product(x, repeat=3)) / 125
    assert u_statistic(x, k) == pytest.approx(u, rel=1e-14)
    assert v_statistic(x, k) == pytest.approx(v, rel=1e-14)
    assert v == pytest.approx((sum(x) / 5) ** 3)


def test_distance_kernel_on_vectors():
    x = np.array([[0.0, 0.0], [3.0, 4.0], [6.0, 8.0]])
    assert u_statistic(x, builtin_kernel("distance")) == pytest.approx((5 + 10 + 5) / 3)


def test_accepts_series_fragment():
    frag = simulate_linear(LinearProcessSpec(Geometric(0.5)), 30, seed=1)
    k = builtin_kernel("gaussian_rbf", bandwidth=0.5)
    assert u_statistic(frag, k) == u_statistic(frag.values[:, 0], k)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceededError, match="budget"):
        u_statistic(np.arange(5.0), builtin_kernel("sum"), budget=5)
    with pytest.raises(BudgetExceededError):
        v_statistic(np.arange(5.0), builtin_kernel("sum"), budget=24)
    assert v_statistic(np.arange(5.0), builtin_kernel("sum"), budget=25) == pytest.approx(4.0)


def test_too_few_points_and_bad_kernels():
    with pytest.raises(ValueError):
        u_statistic([1.0], builtin_kernel("sum"))
    with pytest.raises(ValueError):
        builtin_kernel("distance", arity=3)
    with pytest.raises(ValueError):
        builtin_kernel("gaussian_rbf", bandwidth=0.0)
    with pytest.raises(ValueError):
        builtin_kernel("cosine")
    with pytest.raises(ValueError):
        KernelSpec(5, lambda *xs: xs[0])


def test_non_finite_kernel_reported():
    k = KernelSpec(2, lambda a, b: np.log(a * b))
    with np.errstate(invalid="ignore"), pytest.raises(FloatingPointError):
        u_statistic([1.0, -1.0, 2.0], k)


def test_symmetry_check():
    rng = np.random.default_rng(0)
    assert builtin_kernel("gaussian_rbf").check_symmetry(rng)
    with pytest.raises(ValueError, match="not symmetric"):
        KernelSpec(2, lambda a, b: a - b, "diff").check_symmetry(rng)


@settings(max_examples=40, deadline=None)
@given(x=samples, r=st.integers(2, 3))
def test_v_close_to_u_for_bounded_kernels(x, r):
    k = KernelSpec(r, lambda *xs: np.cos(sum(xs)))  # sup |h| = 1
    n = len(x)
    assert abs(v_statistic(x, k) - u_statistic(x, k)) <= r * r / n + 1e-12


# Hoeffding decomposition ---------------------------------------------------------


def test_product_kernel_is_degenerate_under_centred_law():
    law = FiniteSupportLaw((-1.0, 0.0, 2.0), (0.4, 0.4, 0.2))
    assert math.fsum(a * p for a, p in zip(law.atoms, law.probabilities)) == pytest.approx(0.0, abs=1e-15)
    dec = hoeffding_decompose(builtin_kernel("product"), law)
    assert dec.theta == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(dec.h[1], 0.0, atol=1e-15)
    np.testing.assert_allclose(dec.h[2], np.outer(law.atoms, law.atoms), atol=1e-15)
    assert dec.component(2)(-1.0, 2.0) == pytest.approx(-2.0)
    with pytest.raises(TypeError):
        dec.component(2)(2.0)


def test_sum_kernel_has_only_linear_part():
    law = FiniteSupportLaw((0.0, 1.0), (0.25, 0.75))
    dec = hoeffding_decompose(builtin_kernel("sum", arity=3), law)
    assert dec.theta == pytest.approx(3 * 0.75)
    np.testing.assert_allclose(dec.h[1], np.array([0.0, 1.0]) - 0.75, atol=1e-15)
    np.testing.assert_allclose(dec.h[2], 0.0, atol=1e-15)
    np.testing.assert_allclose(dec.h[3], 0.0, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(s=st.integers(1, 5), r=st.integers(1, 3), seed=st.integers(0, 2**32 - 1))
def test_decomposition_reconstructs_kernel(s, r, seed):
    rng = np.random.default_rng(seed)
    atoms = tuple(rng.choice(np.arange(-10, 11), size=s, replace=False) / 2.0)
    probs = rng.dirichlet(np.ones(s))
    probs[-1] = 1 - math.fsum(probs[:-1])
    law = FiniteSupportLaw(atoms, tuple(probs))
    k = KernelSpec(r, lambda *xs: np.exp(-sum(x * x for x in xs) / 4) + np.prod(xs, axis=0))
    dec = hoeffding_decompose(k, law)
    grid = np.meshgrid(*([np.array(atoms)] * r), indexing="ij")
    H = np.exp(-sum(g * g for g in grid) / 4) + np.prod(grid, axis=0)
    np.testing.assert_allclose(dec.reconstruct() + dec.theta, H, atol=1e-12)
    assert max(dec.degeneracy_residuals().values()) < 1e-12


def test_law_validation_and_budget():
    with pytest.raises(ValueError):
        FiniteSupportLaw((1.0, 1.0), (0.5, 0.5))
    with pytest.raises(ValueError):
        FiniteSupportLaw((1.0, 2.0), (0.5, 0.6))
    with pytest.raises(ValueError):
        FiniteSupportLaw((1.0, 2.0), (1.0, 0.0))
    law = FiniteSupportLaw(tuple(range(11)), (1 / 11,) * 11)
    with pytest.raises(BudgetExceededError):
        hoeffding_decompose(builtin_kernel("sum", arity=3), law, budget=1000)


# bounds -----------------------------------------------------------------------------


def test_ustat_bound_at_zero_and_oracle():
    r = ustat_exponential_bound(100, 0.0, 2.0)
    assert r.raw_value == 2.0
    r = ustat_exponential_bound(1000, 0.3, 1.5, consts={"c_prime": 0.5, "C_prime": 2.0})
    assert r.raw_value == pytest.approx(float(O.ustat_exponential(1000, 0.3, 1.5, 2.0)), rel=1e-13)
    assert r.extras["shift"] == pytest.approx(0.5 * 1.5 / math.sqrt(1000))
    assert r.extras["threshold"] == pytest.approx(r.extras["shift"] + 0.3)
    with pytest.raises(ValueError):
        ustat_exponential_bound(3, 1.0, 1.0)


@pytest.mark.parametrize("p,r", [(1, 1), (1, 2), (2, 2), (3, 4)])
def test_vstat_bound_matches_oracle(p, r):
    got = vstat_fourier_bound(5000, 0.8, p, r, 1.3, 0.5, 0.9, consts={"C_prime": 0.7})
    want = O.vstat_fourier(5000, 0.8, p, r, 1.3, 0.5, 0.9, 0.7)
    assert got.raw_value == pytest.approx(float(want), rel=1e-13)


def test_vstat_order_one_is_sub_exponential():
    # p = 1: exponent is n x^2 / (A + x M), linear in x for large x
    f = lambda x: -math.log(vstat_fourier_bound(1000, x, 1, 2, 1.0, 1.0, 1.0).raw_value / 6)
    A = vstat_fourier_bound(1000, 1.0, 1, 2, 1.0, 1.0, 1.0).extras["A_pn"]
    M = vstat_fourier_bound(1000, 1.0, 1, 2, 1.0, 1.0, 1.0).extras["M_pn"]
    for x in (0.5, 5.0, 50.0):
        assert f(x) == pytest.approx(1000 * x * x / (A + x * M), rel=1e-12)


def test_vstat_argument_checks():
    with pytest.raises(ValueError):
        vstat_fourier_bound(100, 1.0, 3, 2, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError, match="fourier_l1"):
        vstat_fourier_bound(100, 1.0, 1, 2, None, 1.0, 1.0)
    with pytest.raises(ValueError):
        vstat_fourier_bound(100, 1.0, 1, 5, 1.0, 1.0, 1.0)
