"""Reduction of an n-qudit state carrying a single coherence onto an
n-qubit register spanned by the two levels involved at each site."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MultipleCoherences, ShapeError, ZeroWeight
from .qmat import DensityMatrix

COHERENCE_TOL = 1e-12


@dataclass(frozen=True)
class MappedState:
    """Projected and renormalized qubit-register state.

    `weight` is the trace of the projected block before normalization;
    `kept_basis` lists (site, alpha_level, beta_level) for each register
    site, in register order. Sites where the two endpoints share a level are
    pinned to that level and excluded from the register.
    """

    state: DensityMatrix
    weight: float
    kept_basis: tuple


def _digits(index: int, dims) -> tuple:
    out = []
    for d in reversed(dims):
        index, r = divmod(index, d)
        out.append(r)
    return tuple(reversed(out))


def detect_single_coherence(rho: DensityMatrix):
    """Locate the unique off-diagonal element, or None for a diagonal state.

    Raises MultipleCoherences when more than one independent off-diagonal
    entry exceeds 1e-12 in magnitude.
    """
    off = np.abs(rho.mat - np.diag(np.diag(rho.mat)))
    idx = np.argwhere(off > COHERENCE_TOL)
    idx = idx[idx[:, 0] < idx[:, 1]]
    if len(idx) == 0:
        return None
    if len(idx) > 1:
        raise MultipleCoherences(f"found {len(idx)} independent off-diagonal elements")
    return int(idx[0][0]), int(idx[0][1])


def qudit_to_qubit_map(rho: DensityMatrix, alpha: int, beta: int) -> MappedState:
    """Reduce a single-coherence state to the qubit register spanned by the
    coherent pair.

    The register keeps one qubit per site where alpha and beta differ;
    shared sites are pinned to their common level. Only the populations of
    alpha and beta and the coherence between them survive the reduction:
    alpha maps to |0...0> and beta to |1...1> of the register, and the
    state is renormalized by the pair weight p_alpha + p_beta.
    """
    dims = rho.site_dims
    if not (0 <= alpha < rho.dim and 0 <= beta < rho.dim) or alpha == beta:
        raise ShapeError("alpha and beta must be distinct valid basis indices")
    da, db = _digits(alpha, dims), _digits(beta, dims)
    register = [i for i in range(len(dims)) if da[i] != db[i]]
    if not register:
        raise ShapeError("alpha and beta agree at every site")
    pa = float(np.real(rho.mat[alpha, alpha]))
    pb = float(np.real(rho.mat[beta, beta]))
    weight = pa + pb
    if weight < COHERENCE_TOL:
        raise ZeroWeight(f"projected trace {weight} is below tolerance")
    dim = 2 ** len(register)
    out = np.zeros((dim, dim), dtype=complex)
    out[0, 0] = pa
    out[dim - 1, dim - 1] = pb
    out[0, dim - 1] = rho.mat[alpha, beta]
    out[dim - 1, 0] = rho.mat[beta, alpha]
    state = DensityMatrix(out / weight, (2,) * len(register))
    return MappedState(state, weight, tuple((i, da[i], db[i]) for i in register))
