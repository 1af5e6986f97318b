import numpy as np
import pytest

from qbw.battery import BatteryEnsemble, product_state
from qbw.protocol import SwapStep, evolve_step
from qbw.qmat import DensityMatrix


def random_density(rng, dim, site_dims=None):
    """Ginibre-sampled full-rank density matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, site_dims)


def qubit_swap_state(p0, n, theta):
    """Direct |0...0> <-> |1...1> swap applied to a qubit product state."""
    e = BatteryEnsemble(n, 2, (p0, 1.0 - p0), (0.0, 1.0))
    step = SwapStep.build(0, 2 ** n - 1, n, 2)
    return evolve_step(product_state(e), step, theta)


def qutrit_swap_state(p0, p1, theta, energies=(0.0, 0.579, 1.0)):
    """Two-qutrit |00> <-> |22> swap applied to a product state."""
    e = BatteryEnsemble(2, 3, (p0, p1, 1.0 - p0 - p1), energies)
    step = SwapStep.build(0, 8, 2, 3)
    return evolve_step(product_state(e), step, theta)


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
