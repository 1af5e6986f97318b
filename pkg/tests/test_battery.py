import math

import numpy as np
import pytest

from qbw.battery import (
    BatteryEnsemble,
    composite_hamiltonian,
    is_completely_passive,
    is_passive,
    product_state,
    solve_beta,
)
from qbw.qmat import von_neumann_entropy


def qubit_pair(p0, energies=(0.0, 1.0)):
    return BatteryEnsemble(2, 2, (p0, 1.0 - p0), energies)


class TestEnsemble:
    def test_probs_must_normalize(self):
        with pytest.raises(ValueError):
            BatteryEnsemble(1, 2, (0.3, 0.8), (0.0, 1.0))

    def test_energies_strictly_increasing(self):
        with pytest.raises(ValueError):
            BatteryEnsemble(1, 2, (0.5, 0.5), (1.0, 1.0))

    def test_negative_prob_rejected(self):
        with pytest.raises(ValueError):
            BatteryEnsemble(1, 2, (-0.1, 1.1), (0.0, 1.0))


class TestProductState:
    def test_qubit_pair(self):
        rho = product_state(qubit_pair(0.3))
        assert np.allclose(rho.mat, np.diag([0.09, 0.21, 0.21, 0.49]))

    def test_single_battery(self):
        e = BatteryEnsemble(1, 3, (0.2, 0.3, 0.5), (0.0, 1.0, 2.0))
        assert np.allclose(product_state(e).mat, np.diag([0.2, 0.3, 0.5]))

    def test_qutrit_pair_entries(self):
        p = (0.224, 0.322, 0.454)
        e = BatteryEnsemble(2, 3, p, (0.0, 0.579, 1.0))
        expected = [p[i] * p[j] for i in range(3) for j in range(3)]
        assert np.allclose(product_state(e).diagonal(), expected)
        assert abs(sum(expected) - 1.0) < 1e-12

    def test_trace_one(self):
        e = BatteryEnsemble(4, 2, (0.13, 0.87), (0.0, 1.0))
        assert abs(product_state(e).diagonal().sum() - 1.0) < 1e-12


class TestCompositeHamiltonian:
    def test_qubit_pair(self):
        assert np.allclose(composite_hamiltonian(qubit_pair(0.3)), [0, 1, 1, 2])

    def test_single_battery(self):
        e = BatteryEnsemble(1, 3, (0.2, 0.3, 0.5), (0.0, 0.579, 1.0))
        assert np.allclose(composite_hamiltonian(e), [0.0, 0.579, 1.0])

    def test_qutrit_pair(self):
        e = BatteryEnsemble(2, 3, (0.224, 0.322, 0.454), (0.0, 0.579, 1.0))
        expected = [0, 0.579, 1, 0.579, 1.158, 1.579, 1, 1.579, 2]
        assert np.allclose(composite_hamiltonian(e), expected)

    def test_permutation_symmetric(self):
        e = BatteryEnsemble(2, 3, (0.2, 0.3, 0.5), (0.0, 0.4, 1.0))
        h = composite_hamiltonian(e).reshape(3, 3)
        assert np.allclose(h, h.T)


class TestPassivity:
    def test_reverse_ordered_is_passive(self):
        assert is_passive([0.7, 0.3], [0.0, 1.0])

    def test_inverted_qubit_is_active(self):
        assert not is_passive([0.3, 0.7], [0.0, 1.0])

    def test_degenerate_populations_passive(self):
        assert is_passive([0.5, 0.5], [0.0, 2.0])

    def test_passive_qubits_are_completely_passive(self):
        for p0 in (0.5, 0.6, 0.8, 0.99):
            e = qubit_pair(p0)
            assert is_completely_passive(e, n_check=6)

    def test_passive_qutrit_not_completely_passive(self):
        # singly passive, but p1^2 > p0 p2 activates the pair
        e = BatteryEnsemble(1, 3, (0.454, 0.322, 0.224), (0.0, 0.579, 1.0))
        assert is_passive(e.probs, e.energies)
        assert 0.322 ** 2 > 0.454 * 0.224
        assert not is_completely_passive(e, n_check=2)

    def test_gibbs_state_completely_passive(self):
        beta = 1.3
        energies = (0.0, 0.579, 1.0)
        w = np.exp(-beta * np.array(energies))
        e = BatteryEnsemble(1, 3, tuple(w / w.sum()), energies)
        assert is_completely_passive(e, n_check=4)


class TestSolveBeta:
    def test_maximally_mixed(self):
        res = solve_beta(qubit_pair(0.5))
        assert res.beta == 0.0

    def test_pure_state(self):
        res = solve_beta(qubit_pair(1.0))
        assert res.beta == math.inf
        assert np.allclose(res.state.mat, np.diag([1.0, 0.0]))

    def test_qubit_analytic_value(self):
        res = solve_beta(qubit_pair(0.3))
        assert abs(res.beta - math.log(0.7 / 0.3)) < 1e-9
        assert abs(res.beta - 0.8473) < 5e-5

    def test_entropy_matched(self):
        e = BatteryEnsemble(1, 3, (0.2, 0.45, 0.35), (0.0, 0.7, 1.0))
        res = solve_beta(e)
        target = von_neumann_entropy(product_state(e))
        assert abs(von_neumann_entropy(res.state) - target) < 1e-9
        assert res.beta >= 0.0

    def test_gibbs_form(self):
        e = qubit_pair(0.3)
        res = solve_beta(e)
        w = np.exp(-res.beta * np.array(e.energies))
        assert np.allclose(res.state.diagonal(), w / w.sum(), atol=1e-10)
