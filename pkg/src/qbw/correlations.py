"""Classical and quantum correlation measures: bipartite discord and
classical correlations, symmetric and global discord, genuine n-partite
correlations, the commutator discord witness, two-qubit entanglement of
formation and the PPT separability test.

Discord-type quantities minimize over rank-1 projective product
measurements (an upper bound on the POVM-optimized value). Minimizations
run a coarse deterministic grid stage followed by Nelder-Mead refinement;
passing quick=True replaces the grid with a handful of seeded starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import BasisError, DomainError, ShapeError
from .minimize import (
    GRID_CAP,
    basis_bounds,
    best_starts,
    grid_points,
    minimize_angles,
    n_basis_params,
    points_per_angle,
    quick_start_points,
    refine_simplex,
    site_param_grid,
    site_unitaries,
    site_unitary,
)
from .qmat import (
    DensityMatrix,
    partial_trace,
    shannon_entropy,
    tensor,
    von_neumann_entropy,
)

COHERENCE_TOL = 1e-12


def _xlog2x(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    np.log2(p, out=out, where=p > 0)
    return p * out


def _entropy_rows(p: np.ndarray) -> np.ndarray:
    """Shannon entropy along the last axis, zeros handled."""
    return -_xlog2x(np.clip(p, 0.0, None)).sum(axis=-1)


@dataclass(frozen=True)
class MeasurementBasis:
    """Product of per-site rank-1 projective measurements.

    Each site carries an angle-parameterized unitary whose columns are the
    measurement vectors.
    """

    site_dims: tuple
    params: tuple  # one parameter tuple per site

    def __post_init__(self):
        if len(self.site_dims) != len(self.params):
            raise BasisError("one parameter list per site is required")
        for d, p in zip(self.site_dims, self.params):
            if len(p) != n_basis_params(d):
                raise BasisError(f"site of dimension {d} needs {n_basis_params(d)} parameters")

    def site_unitaries(self) -> list:
        return [site_unitary(d, p) for d, p in zip(self.site_dims, self.params)]

    def full_unitary(self) -> np.ndarray:
        return tensor(*self.site_unitaries())

    @staticmethod
    def from_flat(site_dims: Sequence[int], flat) -> "MeasurementBasis":
        flat = list(flat)
        params, k = [], 0
        for d in site_dims:
            m = n_basis_params(d)
            params.append(tuple(flat[k:k + m]))
            k += m
        if k != len(flat):
            raise BasisError("parameter vector length does not match site dimensions")
        return MeasurementBasis(tuple(site_dims), tuple(params))


@dataclass(frozen=True)
class Bipartition:
    """A cut of the site set into two nonempty complementary groups."""

    side_a: tuple
    side_b: tuple

    def __post_init__(self):
        a, b = set(self.side_a), set(self.side_b)
        if not a or not b or a & b:
            raise DomainError("sides must be nonempty and disjoint")
        object.__setattr__(self, "side_a", tuple(sorted(a)))
        object.__setattr__(self, "side_b", tuple(sorted(b)))

    def validate(self, n_sites: int):
        if set(self.side_a) | set(self.side_b) != set(range(n_sites)):
            raise DomainError("cut does not cover all sites")


@dataclass(frozen=True)
class CorrelationReport:
    """Bundle of correlation measures for one state."""

    mutual_info: float
    classical_j: float
    discord: float
    global_discord: float
    genuine_total: float
    genuine_classical: float
    genuine_quantum: float
    eof: float | None
    ppt_separable: bool | None
    witness_norm: float


# ---------------------------------------------------------------------------
# bipartite quantities

def _split_tensor(rho: DensityMatrix, keep: Sequence[int]) -> np.ndarray:
    """Reshape rho to (Da, Db, Da, Db) with the `keep` sites grouped first."""
    dims = rho.site_dims
    n = len(dims)
    rest = [s for s in range(n) if s not in keep]
    order = list(keep) + rest
    t = rho.mat.reshape(dims + dims)
    t = np.transpose(t, axes=order + [n + s for s in order])
    da = math.prod(dims[s] for s in keep)
    db = math.prod(dims[s] for s in rest)
    return t.reshape(da, db, da, db)


def mutual_information(rho: DensityMatrix, cut: Bipartition) -> float:
    """S(rho_a) + S(rho_b) - S(rho) in bits."""
    cut.validate(rho.n_sites)
    sa = von_neumann_entropy(partial_trace(rho, cut.side_a))
    sb = von_neumann_entropy(partial_trace(rho, cut.side_b))
    return sa + sb - von_neumann_entropy(rho)


def _cond_entropy_from_mu(mu: np.ndarray) -> np.ndarray:
    """Sum_j p_j S(rho_{a|j}) from unnormalized conditional spectra.

    `mu` has shape (..., K, Da): eigenvalues of the unnormalized conditional
    states, one row per outcome. Outcomes of negligible weight contribute 0.
    """
    mu = np.clip(mu, 0.0, None)
    p = mu.sum(axis=-1)
    return -_xlog2x(mu).sum(axis=(-2, -1)) + _xlog2x(p).sum(axis=-1)


def _conditional_entropy_units(t: np.ndarray, units: list) -> float:
    """Conditional entropy for one product measurement given per-site unitaries."""
    M = tensor(*units) if len(units) > 1 else units[0]
    sigma = np.einsum("abcd,bk,dk->kac", t, M.conj(), M)
    mu = np.linalg.eigvalsh(sigma)
    return float(_cond_entropy_from_mu(mu))


def measured_conditional_entropy(rho: DensityMatrix, cut: Bipartition,
                                 basis: MeasurementBasis) -> float:
    """Conditional entropy of side_a after measuring side_b in `basis`."""
    cut.validate(rho.n_sites)
    dims_b = tuple(rho.site_dims[s] for s in cut.side_b)
    if basis.site_dims != dims_b:
        raise BasisError(f"basis dimensions {basis.site_dims} do not match side_b {dims_b}")
    t = _split_tensor(rho, cut.side_a)
    return _conditional_entropy_units(t, basis.site_unitaries())


def _optimize_conditional_entropy(rho: DensityMatrix, measured: Sequence[int],
                                  seed: int = 0, quick: bool = False):
    """Minimize the measured conditional entropy over product bases.

    Returns (min_value, MeasurementBasis). `measured` lists the measured
    sites; the complement is conditioned on.
    """
    keep = [s for s in range(rho.n_sites) if s not in measured]
    t = _split_tensor(rho, keep)
    dims_m = tuple(rho.site_dims[s] for s in measured)
    bounds = []
    for d in dims_m:
        bounds.extend(basis_bounds(d))

    def objective(x):
        units, k = [], 0
        for d in dims_m:
            m = n_basis_params(d)
            units.append(site_unitary(d, x[k:k + m]))
            k += m
        return _conditional_entropy_units(t, units)

    batch = None
    if len(dims_m) == 1:
        d = dims_m[0]

        def batch(pts):
            us = site_unitaries(d, pts)
            sigma = np.einsum("abcd,gbk,gdk->gkac", t, us.conj(), us)
            return _cond_entropy_from_mu(np.linalg.eigvalsh(sigma))

    quick_starts = quick_start_points(bounds, seed) if quick else None
    val, x = minimize_angles(objective, bounds, seed=seed,
                             quick_starts=quick_starts, batch_objective=batch)
    return val, MeasurementBasis.from_flat(dims_m, x)


def _resolve_measured(rho: DensityMatrix, cut: Bipartition, measured_side) -> tuple:
    cut.validate(rho.n_sites)
    if measured_side in ("a", "A"):
        return cut.side_a
    if measured_side in ("b", "B"):
        return cut.side_b
    raise DomainError("measured_side must be 'a' or 'b'")


def classical_correlations(rho: DensityMatrix, cut: Bipartition,
                           measured_side: str = "b", seed: int = 0,
                           quick: bool = False) -> float:
    """One-way classical information J, maximized over product bases."""
    measured = _resolve_measured(rho, cut, measured_side)
    kept = cut.side_a if measured == cut.side_b else cut.side_b
    s_kept = von_neumann_entropy(partial_trace(rho, kept))
    cond, _ = _optimize_conditional_entropy(rho, measured, seed=seed, quick=quick)
    return s_kept - cond


def quantum_discord(rho: DensityMatrix, cut: Bipartition,
                    measured_side: str = "b", seed: int = 0,
                    quick: bool = False, return_basis: bool = False):
    """Discord = mutual information minus maximal one-way classical information."""
    measured = _resolve_measured(rho, cut, measured_side)
    kept = cut.side_a if measured == cut.side_b else cut.side_b
    s_kept = von_neumann_entropy(partial_trace(rho, kept))
    cond, basis = _optimize_conditional_entropy(rho, measured, seed=seed, quick=quick)
    j = s_kept - cond
    d = mutual_information(rho, cut) - j
    if return_basis:
        return d, basis
    return d


# ---------------------------------------------------------------------------
# global discord

def _single_coherence_structure(rho: DensityMatrix):
    """Return (diag, alpha, beta, c) when rho is diagonal with at most one
    independent off-diagonal element, else None."""
    off = rho.mat - np.diag(np.diag(rho.mat))
    idx = np.argwhere(np.abs(off) > COHERENCE_TOL)
    idx = idx[idx[:, 0] < idx[:, 1]]
    if len(idx) == 0:
        return rho.diagonal(), None, None, 0.0 + 0.0j
    if len(idx) > 1:
        return None
    a, b = int(idx[0][0]), int(idx[0][1])
    return rho.diagonal(), a, b, complex(rho.mat[a, b])


def _mixed_digits(index: int, dims) -> tuple:
    digits = []
    for d in reversed(dims):
        index, r = divmod(index, d)
        digits.append(r)
    return tuple(reversed(digits))


def _dephased_diagonal_fast(diag, alpha, beta, c, dims, units) -> np.ndarray:
    """Diagonal of U^dag rho U for rho = diag + c|a><b| + h.c., U a site product."""
    t = np.asarray(diag, dtype=float).reshape(dims)
    for ax, u in enumerate(units):
        B = (np.abs(u) ** 2).T  # B[k, j] = |u[j, k]|^2
        t = np.moveaxis(np.tensordot(B, t, axes=([1], [ax])), 0, ax)
    probs = t.reshape(-1)
    if alpha is not None:
        da = _mixed_digits(alpha, dims)
        db = _mixed_digits(beta, dims)
        a = np.ones(1, dtype=complex)
        for i, u in enumerate(units):
            a = np.kron(a, u[da[i], :].conj() * u[db[i], :])
        probs = probs + 2.0 * np.real(c * a)
    return probs


_GD_DIAG_EINSUM = {
    2: "xja,ykb,jk->xyab",
    3: "xja,ykb,zlc,jkl->xyzabc",
}
_GD_COH_EINSUM = {
    2: "xa,yb->xyab",
    3: "xa,yb,zc->xyzabc",
}
_GD_FULL_EINSUM = {
    2: "xja,ykb,jklm,xla,ymb->xyab",
}


def _gd_grid_stage(rho, structure, dims, marginals, s_marg, s_rho):
    """Vectorized grid evaluation for the global-discord objective.

    Returns (points, values) or None when no vectorized path applies.
    """
    n = len(dims)
    total_params = sum(n_basis_params(d) for d in dims)
    per_angle = points_per_angle(total_params)
    if per_angle ** total_params > GRID_CAP:
        return None
    if structure is not None:
        if n not in _GD_DIAG_EINSUM:
            return None
    elif n not in _GD_FULL_EINSUM:
        return None

    site_grids = [site_param_grid(d, per_angle) for d in dims]
    site_us = [site_unitaries(d, g) for d, g in zip(dims, site_grids)]
    deltas = []
    for us, m, sm in zip(site_us, marginals, s_marg):
        dj = np.einsum("gij,ik,gkj->gj", us.conj(), m.mat, us).real
        deltas.append(_entropy_rows(dj) - sm)

    if structure is not None:
        diag, a, b, c = structure
        Bs = [np.abs(us) ** 2 for us in site_us]
        probs = np.einsum(_GD_DIAG_EINSUM[n], *Bs, diag.reshape(dims))
        if a is not None:
            da, db = _mixed_digits(a, dims), _mixed_digits(b, dims)
            Vs = [us[:, da[i], :].conj() * us[:, db[i], :] for i, us in enumerate(site_us)]
            coh = np.einsum(_GD_COH_EINSUM[n], *Vs)
            probs = probs + 2.0 * np.real(c * coh)
    else:
        rhot = rho.mat.reshape(dims + dims)
        u1, u2 = site_us
        probs = np.real(np.einsum(_GD_FULL_EINSUM[n], u1.conj(), u2.conj(),
                                  rhot, u1, u2))

    counts = [len(g) for g in site_grids]
    flat = probs.reshape(tuple(counts) + (-1,))
    values = _entropy_rows(flat) - s_rho
    for ax, delta in enumerate(deltas):
        shape = [1] * n
        shape[ax] = counts[ax]
        values = values - delta.reshape(shape)
    values = values.reshape(-1)

    idx = np.meshgrid(*[np.arange(c) for c in counts], indexing="ij")
    points = np.concatenate(
        [site_grids[i][idx[i].ravel()] for i in range(n)], axis=1
    )
    return points, values


def global_discord(rho: DensityMatrix, symmetric_ansatz: bool = False,
                   seed: int = 0, quick: bool = False) -> float:
    """Global discord: relative entropy to the best multi-local dephasing,
    minus the marginal dephasing contributions.

    With `symmetric_ansatz` a single basis parameterization is shared by all
    sites (valid for permutation-symmetric states).
    """
    dims = rho.site_dims
    n = len(dims)
    if n < 2:
        raise ShapeError("global discord needs at least two sites")
    s_rho = von_neumann_entropy(rho)
    marginals = [partial_trace(rho, [j]) for j in range(n)]
    s_marg = [von_neumann_entropy(m) for m in marginals]
    structure = _single_coherence_structure(rho)

    if symmetric_ansatz and len(set(dims)) != 1:
        raise DomainError("symmetric ansatz requires identical site dimensions")

    def units_from(x):
        if symmetric_ansatz:
            return [site_unitary(dims[0], x)] * n
        units, k = [], 0
        for d in dims:
            m = n_basis_params(d)
            units.append(site_unitary(d, x[k:k + m]))
            k += m
        return units

    def objective(x):
        units = units_from(x)
        if structure is not None:
            diag, a, b, c = structure
            probs = _dephased_diagonal_fast(diag, a, b, c, dims, units)
        else:
            U = tensor(*units)
            probs = np.real(np.einsum("ij,ik,kj->j", U.conj(), rho.mat, U))
        total = shannon_entropy(probs) - s_rho
        for j, u in enumerate(units):
            dj = np.real(np.einsum("ij,ik,kj->j", u.conj(), marginals[j].mat, u))
            total -= shannon_entropy(dj) - s_marg[j]
        return total

    if symmetric_ansatz:
        bounds = basis_bounds(dims[0])
    else:
        bounds = []
        for d in dims:
            bounds.extend(basis_bounds(d))

    if quick:
        val, _ = minimize_angles(objective, bounds, seed=seed,
                                 quick_starts=quick_start_points(bounds, seed))
        return val
    if not symmetric_ansatz:
        staged = _gd_grid_stage(rho, structure, dims, marginals, s_marg, s_rho)
        if staged is not None:
            points, values = staged
            val, _ = refine_simplex(objective, best_starts(points, values))
            return min(val, float(values.min()))
    val, _ = minimize_angles(objective, bounds, seed=seed)
    return val


def symmetric_discord(rho: DensityMatrix, seed: int = 0, quick: bool = False) -> float:
    """Two-site discord under bilateral measurements (global discord, N=2)."""
    if rho.n_sites != 2:
        raise ShapeError("symmetric discord is defined for two-site states")
    return global_discord(rho, symmetric_ansatz=False, seed=seed, quick=quick)


def analytic_gd_max(p0: float, N: int) -> float:
    """Closed-form maximum global discord generated by the direct n-qubit swap.

    Equals the computational-basis dephasing cost of the half-swap state;
    see the acceptance notes for the n=2 peculiarity.
    """
    if not 0.0 <= p0 <= 1.0:
        raise DomainError("p0 must lie in [0, 1]")
    if N < 2:
        raise DomainError("N must be >= 2")
    p1 = 1.0 - p0
    a, b = p0 ** N, p1 ** N

    def xlogx(x):
        return x * math.log2(x) if x > 0 else 0.0

    return xlogx(a) + xlogx(b) - (a + b) * math.log2(0.5 * (a + b))


# ---------------------------------------------------------------------------
# genuine correlations

def _bipartitions(n: int) -> list:
    """All distinct cuts, side_a always containing site 0, lexicographic."""
    sites = list(range(n))
    cuts = []
    for size_a in range(1, n):
        for a in combinations(sites, size_a):
            if 0 not in a:
                continue
            b = tuple(s for s in sites if s not in a)
            if b:
                cuts.append(Bipartition(a, b))
    return cuts


def genuine_correlations(rho: DensityMatrix, seed: int = 0, quick: bool = False,
                         assume_symmetric: bool = False) -> tuple:
    """Genuine total, classical and quantum correlations (T_n, J_n, D_n).

    T_n is the minimum bipartite mutual information over all cuts; J_n and
    D_n are the classical and quantum parts across the minimizing cut, with
    the smaller side measured (ties measured on side_b).

    `assume_symmetric` restricts the cut search to one representative per
    cut size (valid for permutation-symmetric states).
    """
    n = rho.n_sites
    if n < 2:
        raise ShapeError("at least two sites are required")
    if assume_symmetric:
        cuts = [Bipartition(tuple(range(k)), tuple(range(k, n)))
                for k in range(1, n // 2 + 1)]
    else:
        cuts = _bipartitions(n)
    mis = [mutual_information(rho, c) for c in cuts]
    t_n = min(mis)
    best = next(c for c, mi in zip(cuts, mis) if mi <= t_n + 1e-12)
    side = "b" if len(best.side_b) <= len(best.side_a) else "a"
    j_n = classical_correlations(rho, best, measured_side=side, seed=seed, quick=quick)
    return t_n, j_n, t_n - j_n


# ---------------------------------------------------------------------------
# witness, entanglement, separability

def discord_witness(rho: DensityMatrix) -> tuple:
    """Commutator of the state with the product of its marginals.

    Returns (C, frobenius_norm); a norm above ~1e-10 certifies that no local
    measurement basis leaves the state unchanged.
    """
    marg = [partial_trace(rho, [j]).mat for j in range(rho.n_sites)]
    tilde = tensor(*marg) if rho.n_sites > 1 else marg[0]
    C = rho.mat @ tilde - tilde @ rho.mat
    return C, float(np.linalg.norm(C))


_SY2 = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence_two_qubits(rho: DensityMatrix) -> float:
    """Wootters concurrence from the spin-flipped spectrum."""
    if rho.dim != 4:
        raise ShapeError("concurrence is defined for two-qubit states")
    R = rho.mat @ _SY2 @ rho.mat.conj() @ _SY2
    vals = np.sort(np.clip(np.real(np.linalg.eigvals(R)), 0.0, None))[::-1]
    roots = np.sqrt(vals)
    return float(max(0.0, roots[0] - roots[1] - roots[2] - roots[3]))


def _binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def eof_two_qubits(rho: DensityMatrix) -> float:
    """Entanglement of formation of a two-qubit state in ebits."""
    c = concurrence_two_qubits(rho)
    return _binary_entropy(0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - c * c))))


def ppt_separable(rho: DensityMatrix, cut: Bipartition) -> bool:
    """Positive-partial-transpose check across the cut.

    Exact separability for 2x2 and 2x3; for 3x3 a positive result is only
    the necessary PPT condition.
    """
    cut.validate(rho.n_sites)
    da = math.prod(rho.site_dims[s] for s in cut.side_a)
    db = math.prod(rho.site_dims[s] for s in cut.side_b)
    if (da, db) not in ((2, 2), (2, 3), (3, 2), (3, 3)):
        raise DomainError(f"PPT test supports 2x2, 2x3 and 3x3 cuts, got {da}x{db}")
    t = _split_tensor(rho, cut.side_a)  # (da, db, da, db)
    pt = np.transpose(t, (0, 3, 2, 1)).reshape(da * db, da * db)
    return bool(np.linalg.eigvalsh(pt)[0] >= -1e-10)
