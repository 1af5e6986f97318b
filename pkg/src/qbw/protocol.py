"""Swap-based extraction cycles: evolution through rotation steps, work
accounting, optimal reordering protocols and the multi-step decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .battery import BatteryEnsemble, composite_hamiltonian, product_state
from .errors import DomainError, ShapeError
from .qmat import DensityMatrix

OFFDIAG_TOL = 1e-12


def index_digits(index: int, n: int, d: int) -> tuple:
    """Base-d digits of a composite index, most significant (site 0) first."""
    digits = []
    for _ in range(n):
        index, r = divmod(index, d)
        digits.append(r)
    return tuple(reversed(digits))


def digits_index(digits: Sequence[int], d: int) -> int:
    out = 0
    for k in digits:
        out = out * d + k
    return out


@dataclass(frozen=True)
class SwapStep:
    """A two-level rotation between composite basis states alpha and beta."""

    alpha: int
    beta: int
    hamming: int

    def __post_init__(self):
        if self.alpha == self.beta:
            raise DomainError("swap endpoints must differ")

    @staticmethod
    def build(alpha: int, beta: int, n: int, d: int) -> "SwapStep":
        """Construct a step, computing the number of differing battery indices."""
        if not (0 <= alpha < d ** n and 0 <= beta < d ** n):
            raise DomainError("swap endpoints out of range")
        da, db = index_digits(alpha, n, d), index_digits(beta, n, d)
        m = sum(1 for a, b in zip(da, db) if a != b)
        return SwapStep(alpha, beta, m)


@dataclass(frozen=True)
class SwapProtocol:
    """Ordered swap steps, each driven at angular speed omega for tau_step."""

    steps: tuple
    omega: float = 1.0
    tau_step: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.tau_step is None:
            object.__setattr__(self, "tau_step", (math.pi / 2) / self.omega)
        if abs(self.omega * self.tau_step - math.pi / 2) > 1e-12:
            raise DomainError("each step must complete a full swap: omega*tau = pi/2")

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class ProtocolTrace:
    """Sampled states and accumulated work along a protocol."""

    times: np.ndarray
    states: tuple
    works: np.ndarray


def evolve_step(rho: DensityMatrix, step: SwapStep, theta: float) -> DensityMatrix:
    """Apply U(theta) = exp(-i theta (|a><b| + |b><a|)) to rho.

    For diagonal input the populations at alpha/beta mix as cos^2/sin^2 and
    the generated coherence is i (p_alpha - p_beta) cos(theta) sin(theta).
    """
    if not (0.0 <= theta <= math.pi / 2 + 1e-12):
        raise DomainError(f"theta must lie in [0, pi/2], got {theta}")
    a, b = step.alpha, step.beta
    if a >= rho.dim or b >= rho.dim:
        raise ShapeError("swap indices exceed state dimension")
    c, s = math.cos(theta), math.sin(theta)
    out = rho.mat.copy()
    # left-multiply rows (a, b) by the 2x2 block of U, then columns by U^dag
    ra, rb = out[a].copy(), out[b].copy()
    out[a] = c * ra - 1j * s * rb
    out[b] = -1j * s * ra + c * rb
    ca, cb = out[:, a].copy(), out[:, b].copy()
    out[:, a] = c * ca + 1j * s * cb
    out[:, b] = 1j * s * ca + c * cb
    return DensityMatrix(out, rho.site_dims, validate=False)


def multi_step_decomposition(step: SwapStep, e: BatteryEnsemble) -> SwapProtocol:
    """Decompose an m-index swap into 2m-1 single-index swaps.

    Intermediate states change battery indices left-to-right from alpha
    toward beta; the sequence is palindromic and its composition maps
    |alpha> to |beta> while restoring every other state it touches.
    """
    da = index_digits(step.alpha, e.n, e.d)
    db = index_digits(step.beta, e.n, e.d)
    differing = [i for i in range(e.n) if da[i] != db[i]]
    if not differing:
        raise DomainError("swap endpoints are identical")
    path = [step.alpha]
    cur = list(da)
    for i in differing:
        cur[i] = db[i]
        path.append(digits_index(cur, e.d))
    forward = [
        SwapStep.build(path[k], path[k + 1], e.n, e.d) for k in range(len(path) - 1)
    ]
    steps = forward + forward[-2::-1]
    return SwapProtocol(tuple(steps))


def run_protocol(
    rho0: DensityMatrix,
    proto: SwapProtocol,
    samples_per_step: int,
    energies: np.ndarray | None = None,
) -> ProtocolTrace:
    """Run the protocol, sampling each step on a uniform theta grid.

    Each step contributes `samples_per_step` samples at theta in
    [0, pi/2] including both endpoints. When `energies` is given, the work
    column holds Tr[rho0 h] - Tr[rho(t) h]; otherwise it is zero.
    """
    if samples_per_step < 2:
        raise DomainError("samples_per_step must be >= 2")
    h = None if energies is None else np.asarray(energies, dtype=float)

    def work(state: DensityMatrix) -> float:
        if h is None:
            return 0.0
        return float(np.real(np.sum((rho0.diagonal() - np.real(np.diag(state.mat))) * h)))

    if not proto.steps:
        return ProtocolTrace(np.zeros(1), (rho0,), np.zeros(1))
    thetas = np.linspace(0.0, math.pi / 2, samples_per_step)
    times, states, works = [], [], []
    current = rho0
    for k, step in enumerate(proto.steps):
        for theta in thetas:
            state = evolve_step(current, step, theta)
            times.append(k * proto.tau_step + theta / proto.omega)
            states.append(state)
            works.append(work(state))
        current = states[-1]
    return ProtocolTrace(np.asarray(times), tuple(states), np.asarray(works))


def work_extracted(rho0: DensityMatrix, rho_tau: DensityMatrix, h) -> float:
    """Tr[rho0 h] - Tr[rho_tau h] for a diagonal Hamiltonian h."""
    h = np.asarray(h, dtype=float)
    if rho0.dim != rho_tau.dim or h.shape != (rho0.dim,):
        raise ShapeError("state and Hamiltonian dimensions do not match")
    return float(np.real(np.diag(rho0.mat) - np.diag(rho_tau.mat)) @ h)


def _populations(rho_diag) -> np.ndarray:
    if isinstance(rho_diag, DensityMatrix):
        off = rho_diag.mat - np.diag(np.diag(rho_diag.mat))
        if np.max(np.abs(off)) > OFFDIAG_TOL:
            raise DomainError("state is not diagonal in the energy eigenbasis")
        return rho_diag.diagonal()
    return np.asarray(rho_diag, dtype=float)


def _target_assignment(p: np.ndarray, h: np.ndarray) -> np.ndarray:
    """perm[s] = source slot whose population should end up at slot s.

    Populations are reverse-ordered against energies; ties are resolved by
    lowest index first, and slots already holding the right value stay put.
    """
    n = len(p)
    order_e = np.lexsort((np.arange(n), h))          # energies ascending
    order_p = np.lexsort((np.arange(n), -p))         # populations descending
    perm = np.empty(n, dtype=int)
    perm[order_e] = order_p
    # prefer identity among slots whose current value already matches target
    desired = p[perm]
    for group_val in np.unique(desired):
        slots = np.nonzero(desired == group_val)[0]
        sources = perm[slots].tolist()
        fixed = [s for s in slots if s in sources]
        rest_slots = [s for s in slots if s not in fixed]
        rest_sources = sorted(x for x in sources if x not in fixed)
        for s in fixed:
            perm[s] = s
        for s, src in zip(rest_slots, rest_sources):
            perm[s] = src
    return perm


def max_extractable_work(rho_diag, h) -> tuple:
    """Maximal cyclic work and the population permutation achieving it.

    Populations sorted descending are assigned to energies ascending.
    Returns (work, perm) with perm[s] the source slot feeding slot s.
    """
    p = _populations(rho_diag)
    h = np.asarray(h, dtype=float)
    if p.shape != h.shape:
        raise ShapeError("population and energy lists must have equal length")
    perm = _target_assignment(p, h)
    return float((p - p[perm]) @ h), perm


def classical_limit_work(e: BatteryEnsemble) -> float:
    """n times the maximal work of a single battery (local protocols)."""
    w1, _ = max_extractable_work(np.asarray(e.probs), np.asarray(e.energies))
    return e.n * w1


def qutrit_threshold(p0: float) -> float:
    """The p1 solving p1^2 = p0 p2 with p2 = 1 - p0 - p1, for 0 < p0 < 1/3."""
    if not 0.0 < p0 < 1.0 / 3.0:
        raise DomainError("threshold is defined for 0 < p0 < 1/3")
    return 0.5 * (-p0 + math.sqrt(p0 * p0 + 4.0 * p0 * (1.0 - p0)))


def optimal_protocol(e: BatteryEnsemble) -> SwapProtocol:
    """Swap sequence realizing the reverse-ordering permutation.

    Cycles of the target permutation are decomposed into transpositions
    (selection-sort order); slots already holding the right population are
    never touched, so a passive ensemble yields an empty protocol.
    """
    p = product_state(e).diagonal()
    h = composite_hamiltonian(e)
    _, perm = max_extractable_work(p, h)
    steps = []
    current = np.arange(len(p))  # current[s] = source slot now sitting at s
    for s in range(len(p)):
        if current[s] == perm[s]:
            continue
        t = int(np.nonzero(current == perm[s])[0][0])
        steps.append(SwapStep.build(s, t, e.n, e.d))
        current[s], current[t] = current[t], current[s]
    return SwapProtocol(tuple(steps))


def final_state(e: BatteryEnsemble, proto: SwapProtocol) -> DensityMatrix:
    """State after completing every step of the protocol (full swaps)."""
    rho = product_state(e)
    for step in proto.steps:
        rho = evolve_step(rho, step, math.pi / 2)
    return rho
