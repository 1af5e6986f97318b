"""Dense complex matrix kernel: eigendecompositions, tensor products,
partial traces, entropies and projective dephasing for composite states.

All entropies are in bits (base-2 logarithms). States live on a composite
Hilbert space described by a tuple of per-site dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BasisError, DomainError, ShapeError

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
SUPPORT_TOL = 1e-12


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix on a composite space.

    Parameters
    ----------
    mat : array_like
        Square complex matrix.
    site_dims : sequence of int, optional
        Per-site dimensions; their product must equal the matrix dimension.
        Defaults to a single site of the full dimension.
    validate : bool
        When False, skips the invariant checks (used internally for states
        produced by trace-preserving unitary evolution of a valid state).
    """

    __slots__ = ("mat", "site_dims")

    def __init__(self, mat, site_dims: Sequence[int] | None = None, *, validate: bool = True):
        mat = np.asarray(mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ShapeError(f"density matrix must be square, got shape {mat.shape}")
        dim = mat.shape[0]
        if site_dims is None:
            site_dims = (dim,)
        site_dims = tuple(int(d) for d in site_dims)
        if math.prod(site_dims) != dim:
            raise ShapeError(f"site_dims {site_dims} do not multiply to dimension {dim}")
        if validate:
            if np.max(np.abs(mat - mat.conj().T)) > HERM_TOL:
                raise ShapeError("matrix is not Hermitian within tolerance")
            if abs(np.trace(mat).real - 1.0) > TRACE_TOL or abs(np.trace(mat).imag) > TRACE_TOL:
                raise DomainError("trace differs from 1 beyond tolerance")
        # store an exactly Hermitian representative
        mat = 0.5 * (mat + mat.conj().T)
        if validate and np.linalg.eigvalsh(mat)[0] < -PSD_TOL:
            raise DomainError("matrix has an eigenvalue below -1e-10")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "site_dims", site_dims)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("DensityMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.mat)).copy()

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, site_dims={self.site_dims})"


def diagonal_state(probs, site_dims: Sequence[int] | None = None) -> DensityMatrix:
    """Build a diagonal density matrix from a probability vector."""
    probs = np.asarray(probs, dtype=float)
    return DensityMatrix(np.diag(probs.astype(complex)), site_dims)


@dataclass(frozen=True)
class EigenSystem:
    """Eigendecomposition of a Hermitian matrix, values ascending."""

    values: np.ndarray
    vectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def hermitian_eig(M) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    Raises ShapeError if M is not Hermitian within 1e-10.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"expected square matrix, got {M.shape}")
    if np.max(np.abs(M - M.conj().T)) > HERM_TOL:
        raise ShapeError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(M)
    return EigenSystem(values=vals, vectors=vecs)


def tensor(*matrices) -> np.ndarray:
    """Kronecker product of one or more matrices."""
    out = np.asarray(matrices[0], dtype=complex)
    for m in matrices[1:]:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every site not in `keep`, preserving original site order."""
    keep = sorted(set(int(k) for k in keep))
    n = rho.n_sites
    if not keep:
        raise ShapeError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ShapeError(f"site index out of range for {n} sites: {keep}")
    dims = rho.site_dims
    t = rho.mat.reshape(dims + dims)
    traced = [s for s in range(n) if s not in keep]
    # trace highest site index first so earlier axis positions stay valid
    n_live = n
    for s in sorted(traced, reverse=True):
        t = np.trace(t, axis1=s, axis2=s + n_live)
        n_live -= 1
    kept_dims = tuple(dims[s] for s in keep)
    d_out = math.prod(kept_dims)
    return DensityMatrix(t.reshape(d_out, d_out), kept_dims, validate=False)


def _xlog2x(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = p[mask] * np.log2(p[mask])
    return out


def shannon_entropy(probs) -> float:
    """Entropy of a probability vector in bits, with 0 log 0 = 0."""
    p = np.asarray(probs, dtype=float)
    p = np.clip(p, 0.0, None)
    return float(-np.sum(_xlog2x(p)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits; round-off negatives are clamped to 0."""
    vals = np.linalg.eigvalsh(rho.mat)
    return shannon_entropy(vals)


def relative_entropy(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Quantum relative entropy S(rho1 || rho2) in bits.

    Returns math.inf when the support of rho1 is not contained in the
    support of rho2 (eigenvalue tolerance 1e-12).
    """
    if rho1.dim != rho2.dim:
        raise ShapeError(f"dimension mismatch: {rho1.dim} vs {rho2.dim}")
    vals1 = np.clip(np.linalg.eigvalsh(rho1.mat), 0.0, None)
    term1 = float(np.sum(_xlog2x(vals1)))
    vals2, vecs2 = np.linalg.eigh(rho2.mat)
    # weight of rho1 in each eigenvector of rho2
    q = np.real(np.einsum("ij,ik,kj->j", vecs2.conj(), rho1.mat, vecs2))
    q = np.clip(q, 0.0, None)
    unsupported = vals2 <= SUPPORT_TOL
    if np.any(q[unsupported] > SUPPORT_TOL):
        return math.inf
    supported = ~unsupported
    term2 = float(np.sum(q[supported] * np.log2(vals2[supported])))
    return term1 - term2


def dephase(rho: DensityMatrix, basis: np.ndarray) -> DensityMatrix:
    """Project onto the rank-1 projectors given by the columns of `basis`.

    The result is diagonal in the measurement basis; trace is preserved and
    the map is idempotent.
    """
    U = np.asarray(basis, dtype=complex)
    if U.shape != (rho.dim, rho.dim):
        raise BasisError(f"basis shape {U.shape} does not match dimension {rho.dim}")
    if np.max(np.abs(U.conj().T @ U - np.eye(rho.dim))) > 1e-10:
        raise BasisError("basis columns are not a complete orthonormal set")
    diag = np.real(np.einsum("ij,ik,kj->j", U.conj(), rho.mat, U))
    out = (U * diag) @ U.conj().T
    return DensityMatrix(out, rho.site_dims, validate=False)
