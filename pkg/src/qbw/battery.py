"""Battery ensembles, composite Hamiltonians, Gibbs references and
passivity classification."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .qmat import DensityMatrix, shannon_entropy

PROB_TOL = 1e-12
BETA_INF = math.inf


@dataclass(frozen=True)
class BatteryEnsemble:
    """n identical d-level batteries with level populations and energies.

    probs are the single-battery populations p_0..p_{d-1} (sum to 1);
    energies are strictly increasing.
    """

    n: int
    d: int
    probs: tuple
    energies: tuple

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
        if self.n < 1:
            raise DomainError("battery count must be >= 1")
        if self.d < 2:
            raise DomainError("levels per battery must be >= 2")
        if len(self.probs) != self.d or len(self.energies) != self.d:
            raise DomainError("probs and energies must have length d")
        if any(p < 0 for p in self.probs):
            raise DomainError("populations must be nonnegative")
        if abs(sum(self.probs) - 1.0) > PROB_TOL:
            raise DomainError(f"populations sum to {sum(self.probs)}, not 1")
        if any(b <= a for a, b in zip(self.energies, self.energies[1:])):
            raise DomainError("energies must be strictly increasing")

    @property
    def dim(self) -> int:
        return self.d ** self.n


@dataclass(frozen=True)
class GibbsResult:
    """Inverse temperature and the matching single-battery Gibbs state."""

    beta: float
    state: DensityMatrix


def product_state(e: BatteryEnsemble) -> DensityMatrix:
    """Diagonal n-fold product state; entry at (k_1..k_n) is prod p_{k_i}."""
    p = np.ones(1)
    for _ in range(e.n):
        p = np.kron(p, np.asarray(e.probs))
    return DensityMatrix(np.diag(p.astype(complex)), (e.d,) * e.n, validate=False)


def composite_hamiltonian(e: BatteryEnsemble) -> np.ndarray:
    """Diagonal of the noninteracting sum Hamiltonian, length d^n."""
    h = np.zeros(1)
    eps = np.asarray(e.energies)
    for _ in range(e.n):
        h = (h[:, None] + eps[None, :]).ravel()
    return h


def is_passive(probs, energies) -> bool:
    """True iff populations are non-increasing as energy strictly increases.

    Levels with equal energy may carry populations in any order.
    """
    p = np.asarray(probs, dtype=float)
    eps = np.asarray(energies, dtype=float)
    if p.shape != eps.shape:
        raise DomainError("populations and energies must have equal length")
    order = np.argsort(eps, kind="stable")
    p, eps = p[order], eps[order]
    # group by equal energy; require min of earlier group >= max of later groups
    boundaries = np.nonzero(np.diff(eps) > 0)[0] + 1
    groups = np.split(p, boundaries)
    prev_min = math.inf
    for g in groups:
        if g.max() > prev_min + PROB_TOL:
            return False
        prev_min = min(prev_min, g.min())
    return True


def is_completely_passive(e: BatteryEnsemble, n_check: int = 6) -> bool:
    """True iff the m-fold composite is passive for every m <= n_check."""
    if n_check < 1:
        raise DomainError("n_check must be >= 1")
    p = np.ones(1)
    h = np.zeros(1)
    probs = np.asarray(e.probs)
    eps = np.asarray(e.energies)
    for _ in range(n_check):
        p = np.kron(p, probs)
        h = (h[:, None] + eps[None, :]).ravel()
        if not is_passive(p, h):
            return False
    return True


def _gibbs_probs(beta: float, energies: np.ndarray) -> np.ndarray:
    w = np.exp(-beta * (energies - energies.min()))
    return w / w.sum()


def solve_beta(e: BatteryEnsemble, tol: float = 1e-12) -> GibbsResult:
    """Unique inverse temperature whose Gibbs state matches S(Omega).

    Pure input returns beta = +inf with the ground state; a maximally mixed
    input returns beta = 0. Otherwise a bracketing bisection on beta is used
    (Gibbs entropy is strictly decreasing in beta).
    """
    eps = np.asarray(e.energies)
    target = shannon_entropy(e.probs)
    if target < 1e-12:
        ground = np.zeros(e.d)
        ground[0] = 1.0
        return GibbsResult(BETA_INF, DensityMatrix(np.diag(ground.astype(complex)), (e.d,)))
    if abs(target - math.log2(e.d)) < 1e-12:
        return GibbsResult(0.0, DensityMatrix(np.eye(e.d, dtype=complex) / e.d, (e.d,)))
    lo, hi = 0.0, 1.0
    while shannon_entropy(_gibbs_probs(hi, eps)) > target:
        hi *= 2.0
        if hi > 1e12:
            raise DomainError("failed to bracket the inverse temperature")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if shannon_entropy(_gibbs_probs(mid, eps)) > target:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    return GibbsResult(beta, DensityMatrix(np.diag(_gibbs_probs(beta, eps).astype(complex)), (e.d,)))
