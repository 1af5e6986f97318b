"""Deterministic derivative-free minimization over measurement-basis angles.

A coarse grid (quasi-random beyond the grid cap) seeds Nelder-Mead
refinements from the best few points. All sampling is seeded, so repeated
runs return bit-identical results.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize as _scipy_minimize
from scipy.stats import qmc

from .errors import ConvergenceError, DomainError

TWO_PI = 2.0 * math.pi

#: (lo, hi) per parameter
QUBIT_BOUNDS = ((0.0, math.pi), (0.0, TWO_PI))
QUTRIT_BOUNDS = (
    (0.0, math.pi), (0.0, TWO_PI),
    (0.0, math.pi), (0.0, TWO_PI),
    (0.0, math.pi), (0.0, TWO_PI),
    (0.0, TWO_PI), (0.0, TWO_PI),
)

GRID_CAP = 300_000
SOBOL_POWER = 16  # 65536 quasi-random points when the full grid is too large
N_STARTS = 5


def n_basis_params(d: int) -> int:
    if d == 2:
        return 2
    if d == 3:
        return 8
    raise DomainError(f"measurement bases are parameterized for d <= 3, got d={d}")


def basis_bounds(d: int):
    return QUBIT_BOUNDS if d == 2 else QUTRIT_BOUNDS


def points_per_angle(n_params: int) -> int:
    return 16 if n_params <= 4 else 8


def qubit_unitary(theta: float, phi: float) -> np.ndarray:
    """Basis-change unitary whose columns are the measurement vectors."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    ephi = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, -s / ephi], [s * ephi, c]], dtype=complex)


def _givens(d: int, i: int, j: int, theta, phi) -> np.ndarray:
    """Batched two-level rotation; theta/phi may be scalars or 1-D arrays."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    g = np.zeros((len(theta), d, d), dtype=complex)
    for k in range(d):
        g[:, k, k] = 1.0
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    ephi = np.exp(1j * phi)
    g[:, i, i] = c
    g[:, j, j] = c
    g[:, i, j] = -s / ephi
    g[:, j, i] = s * ephi
    return g


def qubit_unitaries(params: np.ndarray) -> np.ndarray:
    """Batched qubit bases from a (G, 2) parameter array."""
    return _givens(2, 0, 1, params[:, 0], params[:, 1])


def qutrit_unitaries(params: np.ndarray) -> np.ndarray:
    """Batched qutrit bases: three two-level rotations behind a phase layer."""
    params = np.atleast_2d(params)
    g01 = _givens(3, 0, 1, params[:, 0], params[:, 1])
    g02 = _givens(3, 0, 2, params[:, 2], params[:, 3])
    g12 = _givens(3, 1, 2, params[:, 4], params[:, 5])
    out = np.einsum("gij,gjk,gkl->gil", g01, g02, g12)
    out[:, 1, :] *= np.exp(1j * params[:, 6])[:, None]
    out[:, 2, :] *= np.exp(1j * params[:, 7])[:, None]
    return out


def site_unitaries(d: int, params: np.ndarray) -> np.ndarray:
    """Batched per-site basis unitaries, shape (G, d, d)."""
    params = np.atleast_2d(np.asarray(params, dtype=float))
    if d == 2:
        return qubit_unitaries(params)
    if d == 3:
        return qutrit_unitaries(params)
    raise DomainError(f"unsupported site dimension {d}")


def site_unitary(d: int, params) -> np.ndarray:
    return site_unitaries(d, np.asarray(params, dtype=float)[None, :])[0]


def site_param_grid(d: int, per_angle: int) -> np.ndarray:
    """All per-site grid combinations, shape (per_angle**n_params, n_params)."""
    bounds = basis_bounds(d)
    axes = [np.linspace(lo, hi, per_angle) for lo, hi in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def sobol_points(bounds, seed: int, power: int = SOBOL_POWER) -> np.ndarray:
    sampler = qmc.Sobol(d=len(bounds), scramble=True, seed=seed)
    unit = sampler.random_base2(power)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    return lo + unit * (hi - lo)


def grid_points(bounds, seed: int) -> np.ndarray:
    n = len(bounds)
    per_angle = points_per_angle(n)
    if per_angle ** n <= GRID_CAP:
        axes = [np.linspace(lo, hi, per_angle) for lo, hi in bounds]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)
    return sobol_points(bounds, seed)


def refine_simplex(objective, starts):
    """Nelder-Mead from each start; returns (best_value, best_params)."""
    best_val, best_x = math.inf, None
    any_converged = False
    for x0 in starts:
        res = _scipy_minimize(
            objective, np.asarray(x0, dtype=float), method="Nelder-Mead",
            options={"xatol": 1e-7, "fatol": 1e-12, "maxiter": 4000, "maxfev": 4000},
        )
        any_converged = any_converged or res.success
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    if not any_converged:
        raise ConvergenceError("Nelder-Mead failed to converge from every start")
    return best_val, best_x


def best_starts(points: np.ndarray, values: np.ndarray, k: int = N_STARTS):
    order = np.argsort(values, kind="stable")[:k]
    return [points[i] for i in order]


def minimize_angles(objective, bounds, seed: int = 0, quick_starts=None,
                    batch_objective=None):
    """Minimize `objective` over boxed angle parameters.

    Returns (value, params). `batch_objective`, when given, evaluates a
    (G, P) parameter array in one call and is used for the grid stage.
    When `quick_starts` is given the grid stage is skipped and Nelder-Mead
    runs from those starting points only.
    """
    bounds = tuple(bounds)
    if quick_starts is not None:
        starts = [np.asarray(x, dtype=float) for x in quick_starts]
        seeded_best = min(float(objective(x)) for x in starts)
    else:
        pts = grid_points(bounds, seed)
        if batch_objective is not None:
            vals = np.asarray(batch_objective(pts))
        else:
            vals = np.array([objective(x) for x in pts])
        starts = best_starts(pts, vals)
        seeded_best = float(vals.min())
    val, x = refine_simplex(objective, starts)
    if seeded_best < val:
        # NM should never lose to its own seed, but guard against drift
        val = seeded_best
    return val, x


def quick_start_points(bounds, seed: int, n_random: int = 4):
    """Deterministic cheap start set: the identity basis plus random draws."""
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    return [np.zeros(len(bounds))] + [lo + rng.random(len(bounds)) * (hi - lo) for _ in range(n_random)]
