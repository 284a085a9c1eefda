"""Random admissible inputs for every calculator, paired with oracle values.

Inputs whose exact value would underflow double precision are redrawn, so
relative error is meaningful for every case.
"""

from __future__ import annotations

import math

import numpy as np

import oracles as O

CASES_PER_CALCULATOR = 100
REL_TOL = 1e-12
_FLOOR = 1e-250


def _u(rng, lo, hi):
    return float(rng.uniform(lo, hi))


def _gauss_spec(kappa, sigma):
    inn = {"kind": "standard_gaussian"} if sigma == 1.0 else {"kind": "scaled_gaussian", "sigma": sigma}
    return {"kind": "linear", "coefficients": {"rule": "geometric", "kappa": kappa}, "innovation": inn}


def _linear_short(rng):
    n, p = int(rng.integers(1, 1001)), _u(rng, 2.05, 8)
    f1, ep, e2 = _u(rng, 0.5, 5), _u(rng, 0.5, 3), _u(rng, 0.5, 2)
    x = math.sqrt(n) * f1 * e2 * _u(rng, 0.1, 40)
    prm = dict(n=n, x=x, p=p, f_l1=f1, eps_lp=ep, eps_l2=e2)
    return prm, None, O.linear_short(**prm)


def _linear_long(rng):
    n, p, beta = int(rng.integers(1, 1001)), _u(rng, 2.05, 8), _u(rng, 0.51, 0.99)
    K, ep, e2 = _u(rng, 0.2, 3), _u(rng, 0.5, 3), _u(rng, 0.5, 2)
    C = dict(C1=_u(rng, 0.2, 3), C2=_u(rng, 0.2, 3))
    x = n ** ((3 - 2 * beta) / 2) * e2 * K * _u(rng, 0.1, 8)
    prm = dict(n=n, x=x, p=p, beta=beta, K=K, eps_lp=ep, eps_l2=e2)
    return prm, C, O.linear_long(**prm, **C)


def _merlevede(rng):
    n, s2, B = int(rng.integers(2, 5001)), _u(rng, 0, 5), _u(rng, 0.1, 3)
    C = dict(C1=_u(rng, 0.2, 3), C2=_u(rng, 0.2, 3))
    x = math.sqrt(n * s2 + B * B) * _u(rng, 0.05, 15)
    prm = dict(n=n, x=x, sigma2=s2, B=B)
    return prm, C, O.merlevede(**prm, **C)


def _doukhan(rng):
    a, b, K, M = _u(rng, 0, 2), _u(rng, 0, 2), _u(rng, 0.3, 3), _u(rng, 0.1, 3)
    L1, L2, n = _u(rng, 0.5, 5), _u(rng, 0.5, 5), int(rng.integers(1, 2001))
    c1 = 2 ** (a + b + 3) * K * K * M * M * L1 * max(K * K, 2)
    x = math.sqrt(c1 * n) * _u(rng, 0.05, 8)
    prm = dict(n=n, x=x, a=a, b=b, K=K, M=M, L1=L1, L2=L2)
    return prm, None, O.doukhan(**prm)


def _fdm_i(rng):
    kappa = _u(rng, 0.05, 0.9) * (1 if rng.random() < 0.7 else -1)
    sigma = 1.0 if rng.random() < 0.5 else _u(rng, 0.3, 3)
    p, n = _u(rng, 2.1, 8), int(rng.integers(1, 2001))
    x0_l2 = sigma / math.sqrt(1 - kappa * kappa) * _u(rng, 0.8, 1.2)
    x0_lp = x0_l2 * _u(rng, 0.8, 3)
    C = dict(c_p=_u(rng, 0.05, 2))
    x = math.sqrt(n) * x0_l2 * _u(rng, 0.2, 30)
    prm = dict(n=n, x=x, p=p, variant="i", process=_gauss_spec(kappa, sigma), max_lag=1000,
               x0_l2=x0_l2, x0_lp=x0_lp)
    return prm, C, O.nagaev_fdm_i_ar1(n, x, p, kappa, sigma, x0_l2, x0_lp, C["c_p"])


def _fdm_ii(rng):
    p, n, T = _u(rng, 3, 8), int(rng.integers(1, 5001)), _u(rng, 0.3, 3)
    C = dict(C1=_u(rng, 0.2, 3), C2=_u(rng, 0.5, 2))
    alpha = _u(rng, 0.5 - 1 / p + 0.01, 2)
    y = _u(rng, 1.5, 4)
    x = y * math.sqrt(n) * T / C["C2"]
    prm = dict(n=n, x=x, p=p, variant="ii", Theta0=T, alpha=alpha)
    return prm, C, O.nagaev_fdm_ii(n, x, p, T, C["C1"], C["C2"])


def _fdm_iii(rng):
    p, n, T = _u(rng, 3, 8), int(rng.integers(1, 5001)), _u(rng, 0.3, 3)
    C = dict(C1=_u(rng, 0.2, 3), C2=_u(rng, 0.5, 2))
    alpha = _u(rng, 0.01, 0.5 - 1 / p - 0.01)
    y = _u(rng, 2, 4)
    x = y * n ** ((2 * p - 1 - 2 * alpha * p) / (2 + 2 * p)) * T / C["C2"]
    prm = dict(n=n, x=x, p=p, variant="iii", Theta0=T, alpha=alpha)
    return prm, C, O.nagaev_fdm_iii(n, x, p, alpha, T, C["C1"], C["C2"])


def _dan(rng):
    p, n = _u(rng, 2.1, 8), int(rng.integers(1, 5001))
    alpha = _u(rng, 0.01, 1.5)
    if abs(alpha - (0.5 - 1 / p)) < 1e-6:
        alpha += 0.01
    dp, d2 = _u(rng, 0.3, 3), _u(rng, 0.3, 3)
    C = dict(C1=_u(rng, 0.2, 3), C2=_u(rng, 0.2, 3), C3=_u(rng, 0.2, 3))
    x = math.sqrt(n) * d2 * _u(rng, 0.1, 12)
    prm = dict(n=n, x=x, p=p, alpha=alpha, dan_p=dp, dan_2=d2)
    return prm, C, O.nagaev_dan(**prm, **C)


def _vector_max(rng):
    q, n, d = _u(rng, 2.1, 8), int(rng.integers(1, 5001)), int(rng.integers(1, 10**6))
    alpha = _u(rng, 0.01, 1.5)
    psi, di = _u(rng, 0.3, 3), _u(rng, 0.3, 3)
    C = dict(C_q_alpha=_u(rng, 0.3, 2))
    thr = float(O.vector_max_threshold(n, q, alpha, d, psi, di, C["C_q_alpha"]))
    x = thr * _u(rng, 1.0001, 4)
    prm = dict(n=n, x=x, q=q, alpha=alpha, d=d, psi_2alpha=psi, dan_inf=di)
    return prm, C, O.vector_max(n, x, q, alpha, d, psi, di, C["C_q_alpha"])


def _bern_ind(rng):
    n, d, s2, M = int(rng.integers(1, 1001)), int(rng.integers(1, 51)), _u(rng, 0, 100), _u(rng, 0.1, 5)
    x = (math.sqrt(s2) + M) * _u(rng, 0.01, 20)
    prm = dict(n=n, x=x, d=d, sigma2=s2, M=M)
    return prm, None, O.bernstein_independent(**prm)


def _bern_beta(rng):
    n, d, nu2, M = int(rng.integers(2, 5001)), int(rng.integers(1, 51)), _u(rng, 0, 5), _u(rng, 0.1, 5)
    g = float(10 ** rng.uniform(-2, 1))
    C = dict(C=_u(rng, 0.2, 3))
    x = (math.sqrt(n * nu2) + M * math.log(n) ** 2) * _u(rng, 0.01, 20)
    prm = dict(n=n, x=x, d=d, nu2=nu2, M=M, gamma=g)
    return prm, C, O.bernstein_beta(**prm, **C)


def _bern_tau(rng):
    n, d, nu2, M = int(rng.integers(2, 5001)), int(rng.integers(1, 51)), _u(rng, 0, 5), _u(rng, 0.1, 5)
    p1, p2 = float(10 ** rng.uniform(-3, 0.5)), _u(rng, 0.05, 5)
    x = (math.sqrt(1800 * n * nu2) + 60 * M) * _u(rng, 0.01, 30)
    prm = dict(n=n, x=x, d=d, nu2=nu2, M=M, psi1=p1, psi2=p2)
    return prm, None, O.bernstein_tau(**prm)


def _ustat(rng):
    n, M = int(rng.integers(4, 10**5)), _u(rng, 0.1, 5)
    C = dict(c_prime=_u(rng, 0.2, 3), C_prime=_u(rng, 0.2, 3))
    x = M * _u(rng, 0, 15) / math.sqrt(n)
    prm = dict(n=n, x=x, M=M)
    return prm, C, O.ustat_exponential(n, x, M, C["C_prime"])


def _vstat(rng):
    n, r = int(rng.integers(2, 10**5)), int(rng.integers(1, 5))
    p = int(rng.integers(1, r + 1))
    h, c, Cm = _u(rng, 0.1, 5), _u(rng, 0.1, 5), _u(rng, 0.1, 5)
    C = dict(C_prime=_u(rng, 0.2, 3))
    x = float(10 ** rng.uniform(-3, 3))
    prm = dict(n=n, x=x, p=p, r=r, fourier_l1=h, c=c, C_mix=Cm)
    return prm, C, O.vstat_fourier(n, x, p, r, h, c, Cm, C["C_prime"])


def _phi(rng):
    n, p, C = int(rng.integers(1, 301)), int(rng.integers(2, 9)), _u(rng, 0.1, 3)
    if rng.random() < 0.5:
        phi = np.sort(rng.uniform(0, 1, n))[::-1]
    else:
        phi = np.exp(-_u(rng, 0.01, 2) * np.arange(n))
    phi = [float(v) for v in phi]
    prm = dict(n=n, p=p, C=C, phi=phi)
    return prm, None, O.phi_moment(n, p, C, phi)


def _rosenthal(rng):
    kappa = _u(rng, -0.9, 0.9)
    sigma = 1.0 if rng.random() < 0.5 else _u(rng, 0.3, 3)
    n, p = int(rng.integers(1, 3001)), _u(rng, 2.05, 8)
    x0_l2, x0_lp = _u(rng, 0.2, 5), _u(rng, 0.2, 5)
    prm = dict(n=n, p=p, process=_gauss_spec(kappa, sigma), x0_lp=x0_lp, x0_l2=x0_l2)
    return prm, None, O.rosenthal_ar1(n, p, kappa, sigma, x0_l2, x0_lp)


GENERATORS = {
    "nagaev_linear_short": [_linear_short],
    "nagaev_linear_long": [_linear_long],
    "merlevede_chernoff": [_merlevede],
    "doukhan_louhichi": [_doukhan],
    "nagaev_fdm": [_fdm_i, _fdm_ii, _fdm_iii],
    "nagaev_dan": [_dan],
    "nagaev_vector_max": [_vector_max],
    "bernstein_independent": [_bern_ind],
    "bernstein_beta_mixing": [_bern_beta],
    "bernstein_tau_mixing": [_bern_tau],
    "ustat_exponential": [_ustat],
    "vstat_fourier": [_vstat],
    "phi_moment": [_phi],
    "rosenthal_liu_xiao_wu": [_rosenthal],
}


def cases(bound_id: str, gen, count: int = CASES_PER_CALCULATOR, seed: int = 0):
    """``count`` admissible ``(params, consts, oracle)`` triples, deterministic in ``seed``."""
    rng = np.random.default_rng([seed, sum(map(ord, bound_id)), sum(map(ord, gen.__name__))])
    out = []
    while len(out) < count:
        prm, consts, want = gen(rng)
        if want < _FLOOR:
            continue
        out.append((prm, consts, want))
    return out


def max_rel_error(bound_id: str, gen, count: int = CASES_PER_CALCULATOR):
    """Largest relative deviation of the package from the oracle, with the worst inputs."""
    from depbound.registry import lookup

    entry = lookup(bound_id)
    worst, worst_case = 0.0, None
    for prm, consts, want in cases(bound_id, gen, count):
        got = entry.evaluate(dict(prm), consts).raw_value
        err = O.rel_err(got, want)
        if not err <= worst:
            worst, worst_case = err, (prm, consts, got, float(want))
    return worst, worst_case


def all_rel_errors(count: int = CASES_PER_CALCULATOR):
    return {(bid, g.__name__): max_rel_error(bid, g, count) for bid, gens in GENERATORS.items() for g in gens}
