"""Exact U- and V-statistics, Hoeffding decompositions on finite supports,
and exponential bounds for dependent U/V-statistics.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .process_models import SeriesFragment
from .scalar_bounds import USER_SUPPLIED, BoundResult, _check_n, _consts, _nonneg, _positive

MAX_ARITY = 4
DEFAULT_V_BUDGET = 2000**2
DEFAULT_U_BUDGET = math.comb(2000, 2)
DEFAULT_DECOMP_BUDGET = 10**6


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    """Symmetric kernel of arity ``r``.

    ``evaluator`` takes ``r`` arrays of points with a common leading batch
    dimension and returns the batch of kernel values.  It must be a pure
    function.
    """

    arity: int
    evaluator: Callable[..., np.ndarray]
    name: str = "custom"
    fourier_l1: float | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (1 <= self.arity <= MAX_ARITY):
            raise ValueError(f"kernel arity must be in 1..{MAX_ARITY}, got {self.arity}")
        if self.fourier_l1 is not None and not self.fourier_l1 >= 0:
            raise ValueError("fourier_l1 must be nonnegative")

    def __call__(self, *points):
        return np.asarray(self.evaluator(*points), dtype=float)

    def check_symmetry(self, rng: np.random.Generator, dim: int = 1, trials: int = 64, tol: float = 1e-12):
        """Spot-check symmetry on random permutations of random points."""
        pts = [rng.standard_normal((trials, dim)) if dim > 1 else rng.standard_normal(trials) for _ in range(self.arity)]
        base = self(*pts)
        for perm in itertools.permutations(range(self.arity)):
            other = self(*[pts[i] for i in perm])
            if np.max(np.abs(other - base), initial=0.0) > tol * max(1.0, float(np.max(np.abs(base), initial=0.0))):
                raise ValueError(f"kernel {self.name!r} is not symmetric under permutation {perm}")
        return True

    def to_dict(self) -> dict:
        return {"name": self.name, "arity": self.arity, "fourier_l1": self.fourier_l1, "params": dict(self.params)}


def _rows(x):
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def _sqdist(a, b):
    return np.sum((_rows(a) - _rows(b)) ** 2, axis=1)


def builtin_kernel(name: str, bandwidth: float = 1.0, arity: int = 2) -> KernelSpec:
    """The built-in kernels ``sum``, ``product``, ``distance`` and ``gaussian_rbf``."""
    if name == "sum":
        return KernelSpec(arity, lambda *xs: sum(np.sum(_rows(x), axis=1) for x in xs), "sum")
    if name == "product":
        return KernelSpec(arity, lambda *xs: np.prod([np.sum(_rows(x), axis=1) for x in xs], axis=0), "product")
    if name == "distance":
        if arity != 2:
            raise ValueError("the distance kernel has arity 2")
        return KernelSpec(2, lambda a, b: np.sqrt(_sqdist(a, b)), "distance")
    if name == "gaussian_rbf":
        if arity != 2:
            raise ValueError("the gaussian_rbf kernel has arity 2")
        if not bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        h2 = 2 * bandwidth * bandwidth
        return KernelSpec(2, lambda a, b: np.exp(-_sqdist(a, b) / h2), "gaussian_rbf",
                          params={"bandwidth": bandwidth})
    raise ValueError(f"unknown kernel {name!r}; choose from sum, product, distance, gaussian_rbf")


BUILTIN_KERNELS = ("sum", "product", "distance", "gaussian_rbf")


# ---------------------------------------------------------------------------
# exact U/V statistics


def _values(data) -> np.ndarray:
    v = data.values if isinstance(data, SeriesFragment) else np.asarray(data, dtype=float)
    if v.ndim == 2 and v.shape[1] == 1:
        v = v[:, 0]
    return v


_CHUNK = 1 << 16


def _index_chunks(n: int, r: int, distinct: bool):
    it = itertools.combinations(range(n), r) if distinct else itertools.product(range(n), repeat=r)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def _enumerate(kernel: KernelSpec, x: np.ndarray, distinct: bool) -> tuple[float, int]:
    n = len(x)
    r = kernel.arity
    sums = []
    count = 0
    for idx in _index_chunks(n, r, distinct):
        vals = kernel(*[x[idx[:, k]] for k in range(r)])
        if not np.all(np.isfinite(vals)):
            raise FloatingPointError("kernel returned a non-finite value")
        sums.append(math.fsum(vals))
        count += len(idx)
    return math.fsum(sums), count


def u_statistic(data, kernel: KernelSpec, budget: int = DEFAULT_U_BUDGET) -> float:
    """``binom(n, r)^{-1} sum_{i_1 < ... < i_r} h(X_{i_1}, ..., X_{i_r})``."""
    x = _values(data)
    n, r = len(x), kernel.arity
    if n < r:
        raise ValueError(f"need n >= r, got n={n}, r={r}")
    total = math.comb(n, r)
    if total > budget:
        raise BudgetExceededError(
            f"exact U-statistic needs {total} kernel evaluations, over the budget {budget}; "
            "sampled (incomplete) estimators are not provided"
        )
    s, count = _enumerate(kernel, x, True)
    return s / count


def v_statistic(data, kernel: KernelSpec, budget: int = DEFAULT_V_BUDGET) -> float:
    """``n^{-r} sum_{i_1, ..., i_r} h(X_{i_1}, ..., X_{i_r})``."""
    x = _values(data)
    n, r = len(x), kernel.arity
    if n < 1:
        raise ValueError("empty sample")
    total = n**r
    if total > budget:
        raise BudgetExceededError(
            f"exact V-statistic needs {total} kernel evaluations, over the budget {budget}; "
            "sampled estimators are not provided"
        )
    s, count = _enumerate(kernel, x, False)
    return s / count


# ---------------------------------------------------------------------------
# Hoeffding decomposition


@dataclass(frozen=True)
class FiniteSupportLaw:
    atoms: tuple
    probabilities: tuple

    def __post_init__(self):
        atoms = tuple(float(a) for a in self.atoms)
        probs = tuple(float(p) for p in self.probabilities)
        if len(atoms) != len(probs) or not atoms:
            raise ValueError("atoms and probabilities must be nonempty and of equal length")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atoms must be distinct")
        if any(p <= 0 for p in probs):
            raise ValueError("probabilities must be positive")
        if abs(math.fsum(probs) - 1) > 1e-12:
            raise ValueError(f"probabilities sum to {math.fsum(probs)}, not 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probabilities", probs)

    @property
    def size(self) -> int:
        return len(self.atoms)

    def to_dict(self) -> dict:
        return {"atoms": list(self.atoms), "probabilities": list(self.probabilities)}


@dataclass(frozen=True, eq=False)
class HoeffdingDecomposition:
    """Tabulated components on the support.

    ``g[p]`` and ``h[p]`` are arrays of shape ``(s,) * p`` indexed by atom
    positions, for ``p = 1..r``.
    """

    law: FiniteSupportLaw
    arity: int
    theta: float
    g: dict
    h: dict

    def component(self, p: int) -> Callable[..., float]:
        table = self.h[p]
        pos = {a: i for i, a in enumerate(self.law.atoms)}

        def hp(*xs):
            if len(xs) != p:
                raise TypeError(f"h_{p} takes {p} arguments")
            return float(table[tuple(pos[float(x)] for x in xs)])

        return hp

    def reconstruct(self) -> np.ndarray:
        """``sum_p sum_{i_1<...<i_p} h_p(x_{i_1}, ..., x_{i_p})`` tabulated on the support."""
        r, s = self.arity, self.law.size
        out = np.zeros((s,) * r)
        for p in range(1, r + 1):
            for comb in itertools.combinations(range(r), p):
                out += _embed(self.h[p], comb, r, s)
        return out

    def degeneracy_residuals(self) -> dict[int, float]:
        """``max |E h_p(x_1..x_{p-1}, X~)|`` over prefixes, per ``p``."""
        w = np.asarray(self.law.probabilities)
        return {p: float(np.max(np.abs(np.tensordot(self.h[p], w, axes=([p - 1], [0])))))
                for p in range(1, self.arity + 1)}


def _embed(table: np.ndarray, comb: tuple, r: int, s: int) -> np.ndarray:
    """Broadcast a ``p``-way table over the axes ``comb`` of an ``r``-way grid."""
    shape = [1] * r
    for ax in comb:
        shape[ax] = s
    return table.reshape(shape)


def hoeffding_decompose(kernel: KernelSpec, law: FiniteSupportLaw,
                        budget: int = DEFAULT_DECOMP_BUDGET) -> HoeffdingDecomposition:
    """Exact Hoeffding decomposition of ``kernel`` under the product of ``law``."""
    r, s = kernel.arity, law.size
    if s**r > budget:
        raise BudgetExceededError(f"support size {s} to the power {r} exceeds the budget {budget}")
    atoms = np.asarray(law.atoms)
    w = np.asarray(law.probabilities)
    grid = np.array(list(itertools.product(range(s), repeat=r)), dtype=np.intp)
    H = kernel(*[atoms[grid[:, k]] for k in range(r)]).reshape((s,) * r)
    # E over trailing arguments, one axis at a time
    cond = {r: H}
    for p in range(r - 1, -1, -1):
        cond[p] = np.tensordot(cond[p + 1], w, axes=([p], [0]))
    theta = float(cond[0])
    g = {p: cond[p] - theta for p in range(1, r + 1)}
    h = {}
    for p in range(1, r + 1):
        hp = g[p].copy()
        for k in range(1, p):
            for comb in itertools.combinations(range(p), k):
                hp -= _embed(h[k], comb, p, s)
        h[p] = hp
    return HoeffdingDecomposition(law, r, theta, g, h)


# ---------------------------------------------------------------------------
# bounds


def ustat_exponential_bound(n, x, M, consts=None) -> BoundResult:
    """Bound on ``P(|U_n| >= c' M / sqrt(n) + x)`` for a bounded mean-zero kernel
    under geometric phi-mixing."""
    _check_n(n)
    if n < 4:
        raise ValueError(f"n must be >= 4, got {n}")
    _nonneg(x=x)
    _positive(M=M)
    c = _consts("ustat_exponential", consts)
    den = M * M + M * x * math.log(n) * math.log(math.log(4 * n))
    raw = 2 * math.exp(-c["C_prime"] * x * x * n / den)
    shift = c["c_prime"] * M / math.sqrt(n)
    echo = dict(n=n, x=x, M=M)
    return BoundResult("ustat_exponential", raw, echo, USER_SUPPLIED, c, (raw,),
                       extras={"threshold": shift + x, "shift": shift})


def vstat_fourier_bound(n, x, p, r, fourier_l1, c, C_mix, consts=None) -> BoundResult:
    """Bound on ``P(|V_n(h_p)| >= x)`` for the level-``p`` Hoeffding component,
    given ``||h^||_{L_1}`` and a geometric mixing rate ``c exp(-C_mix m)``."""
    _check_n(n, 2)
    if int(r) != r or not (1 <= r <= MAX_ARITY):
        raise ValueError(f"r must be an integer in 1..{MAX_ARITY}, got {r}")
    if int(p) != p or not (1 <= p <= r):
        raise ValueError(f"p must be an integer in 1..r, got {p}")
    if fourier_l1 is None:
        raise ValueError("the Fourier bound needs a declared ||h^||_{L_1} (fourier_l1)")
    _nonneg(x=x)
    _positive(fourier_l1=fourier_l1, c=c, C_mix=C_mix)
    cc = _consts("vstat_fourier", consts)
    ln = math.log(n)
    inner = 64 * c ** (1 / 3) / -math.expm1(-C_mix / 3) + ln**4 / n
    A = 2 ** (2 * r) * fourier_l1**2 * inner**p
    Mp = 2**r * fourier_l1 * ln ** (2 * p)
    den = A ** (1 / p) + x ** (1 / p) * Mp ** (1 / p)
    raw = 6 * math.exp(-cc["C_prime"] * n * x ** (2 / p) / den)
    echo = dict(n=n, x=x, p=p, r=r, fourier_l1=fourier_l1, c=c, C_mix=C_mix)
    return BoundResult("vstat_fourier", raw, echo, USER_SUPPLIED, cc, (raw,),
                       extras={"A_pn": A, "M_pn": Mp, "fourier_moment_attested": True})
