import math
from itertools import permutations

import numpy as np
import pytest

from conftest import qutrit_swap_state, random_density
from qbw.battery import BatteryEnsemble, composite_hamiltonian, product_state
from qbw.errors import DomainError
from qbw.protocol import (
    SwapProtocol,
    SwapStep,
    classical_limit_work,
    digits_index,
    evolve_step,
    final_state,
    index_digits,
    max_extractable_work,
    multi_step_decomposition,
    optimal_protocol,
    qutrit_threshold,
    run_protocol,
    work_extracted,
)
from qbw.qmat import hermitian_eig


def qubit_pair(p0):
    return BatteryEnsemble(2, 2, (p0, 1.0 - p0), (0.0, 1.0))


class TestIndexDigits:
    def test_roundtrip(self):
        for idx in range(27):
            assert digits_index(index_digits(idx, 3, 3), 3) == idx

    def test_site_zero_most_significant(self):
        assert index_digits(8, 2, 3) == (2, 2)
        assert index_digits(6, 2, 3) == (2, 0)


class TestSwapStep:
    def test_hamming_count(self):
        assert SwapStep.build(0, 7, 3, 2).hamming == 3
        assert SwapStep.build(2, 3, 2, 2).hamming == 1

    def test_identical_endpoints_rejected(self):
        with pytest.raises(ValueError):
            SwapStep.build(3, 3, 2, 2)


class TestEvolveStep:
    def test_identity_at_zero(self):
        e = qubit_pair(0.3)
        rho = product_state(e)
        out = evolve_step(rho, SwapStep.build(0, 3, 2, 2), 0.0)
        assert np.allclose(out.mat, rho.mat, atol=1e-14)

    def test_full_swap_exchanges_populations(self):
        e = qubit_pair(0.3)
        out = evolve_step(product_state(e), SwapStep.build(0, 3, 2, 2),
                          math.pi / 2)
        assert np.allclose(out.diagonal(), [0.49, 0.21, 0.21, 0.09], atol=1e-14)
        assert abs(out.mat[0, 3]) < 1e-14

    def test_two_qutrit_matrix_closed_form(self):
        # diagonal entries mix as cos^2/sin^2, the one coherence carries
        # the i(p_alpha - p_beta) phase, all other entries stay put
        p0, p1, p2, t = 0.224, 0.322, 0.454, 0.7
        rho = qutrit_swap_state(p0, p1, t)
        c, s = math.cos(t), math.sin(t)
        assert abs(rho.mat[0, 0] - (p0 ** 2 * c * c + p2 ** 2 * s * s)) < 1e-12
        assert abs(rho.mat[8, 8] - (p2 ** 2 * c * c + p0 ** 2 * s * s)) < 1e-12
        assert abs(rho.mat[0, 8] - 1j * (p0 ** 2 - p2 ** 2) * c * s) < 1e-12
        for k in range(1, 8):
            assert abs(rho.mat[k, k] - [p0 * p1, p0 * p2, p1 * p0, p1 * p1,
                                        p1 * p2, p2 * p0, p2 * p1][k - 1]) < 1e-12

    def test_angle_range_enforced(self):
        rho = product_state(qubit_pair(0.3))
        with pytest.raises(DomainError):
            evolve_step(rho, SwapStep.build(0, 3, 2, 2), -0.1)
        with pytest.raises(DomainError):
            evolve_step(rho, SwapStep.build(0, 3, 2, 2), 1.6)

    def test_unitarity_preserves_spectrum(self, rng):
        rho = random_density(rng, 8, site_dims=(2, 2, 2))
        out = evolve_step(rho, SwapStep.build(1, 6, 3, 2), 0.9)
        a = np.sort(hermitian_eig(rho.mat).values)
        b = np.sort(hermitian_eig(out.mat).values)
        assert np.allclose(a, b, atol=1e-9)
        assert abs(np.trace(out.mat).real - 1.0) < 1e-12


class TestMultiStepDecomposition:
    def test_single_index_step_kept(self):
        e = qubit_pair(0.3)
        proto = multi_step_decomposition(SwapStep.build(1, 3, 2, 2), e)
        assert len(proto.steps) == 1

    def test_two_qubit_three_steps(self):
        e = qubit_pair(0.3)
        proto = multi_step_decomposition(SwapStep.build(0, 3, 2, 2), e)
        pairs = [(st.alpha, st.beta) for st in proto.steps]
        assert pairs == [(0, 2), (2, 3), (0, 2)]

    def test_three_qubit_five_stages(self):
        e = BatteryEnsemble(3, 2, (0.3, 0.7), (0.0, 1.0))
        proto = multi_step_decomposition(SwapStep.build(0, 7, 3, 2), e)
        pairs = [(st.alpha, st.beta) for st in proto.steps]
        assert pairs == [(0, 4), (4, 6), (6, 7), (4, 6), (0, 4)]

    def test_palindrome(self):
        e = BatteryEnsemble(4, 2, (0.3, 0.7), (0.0, 1.0))
        proto = multi_step_decomposition(SwapStep.build(0, 15, 4, 2), e)
        assert len(proto.steps) == 7
        assert proto.steps == proto.steps[::-1]

    def test_final_state_matches_direct_swap(self):
        e = BatteryEnsemble(3, 2, (0.3, 0.7), (0.0, 1.0))
        step = SwapStep.build(0, 7, 3, 2)
        direct = evolve_step(product_state(e), step, math.pi / 2)
        multi = final_state(e, multi_step_decomposition(step, e))
        assert np.allclose(direct.mat, multi.mat, atol=1e-9)


class TestRunProtocol:
    def test_empty_protocol(self):
        rho = product_state(qubit_pair(0.3))
        trace = run_protocol(rho, SwapProtocol(()), 5)
        assert len(trace.states) == 1
        assert trace.works[0] == 0.0

    def test_direct_swap_endpoint(self):
        e = qubit_pair(0.3)
        proto = SwapProtocol((SwapStep.build(0, 3, 2, 2),))
        trace = run_protocol(product_state(e), proto, 11,
                             energies=composite_hamiltonian(e))
        assert np.allclose(trace.states[-1].diagonal(),
                           [0.49, 0.21, 0.21, 0.09], atol=1e-12)
        assert trace.works[0] == 0.0
        assert abs(trace.works[-1] - 0.8) < 1e-12

    def test_work_additivity(self):
        e = BatteryEnsemble(2, 3, (0.224, 0.40, 0.376), (0.0, 0.579, 1.0))
        h = composite_hamiltonian(e)
        proto = optimal_protocol(e)
        rho0 = product_state(e)
        trace = run_protocol(rho0, proto, 7, energies=h)
        total = work_extracted(rho0, trace.states[-1], h)
        assert abs(trace.works[-1] - total) < 1e-10


class TestWork:
    def test_no_change_no_work(self):
        rho = product_state(qubit_pair(0.3))
        h = composite_hamiltonian(qubit_pair(0.3))
        assert work_extracted(rho, rho, h) == 0.0

    def test_two_qubit_full_swap(self):
        e = qubit_pair(0.3)
        rho0 = product_state(e)
        out = evolve_step(rho0, SwapStep.build(0, 3, 2, 2), math.pi / 2)
        assert abs(work_extracted(rho0, out, composite_hamiltonian(e)) - 0.8) < 1e-12

    def test_half_swap(self):
        e = qubit_pair(0.3)
        rho0 = product_state(e)
        out = evolve_step(rho0, SwapStep.build(0, 3, 2, 2), math.pi / 4)
        assert abs(work_extracted(rho0, out, composite_hamiltonian(e)) - 0.4) < 1e-12


class TestMaxExtractableWork:
    def test_passive_state(self):
        e = qubit_pair(0.7)
        w, perm = max_extractable_work(product_state(e).diagonal(),
                                       composite_hamiltonian(e))
        assert w == 0.0
        assert np.array_equal(perm, np.arange(4))

    def test_two_qubit_value(self):
        e = qubit_pair(0.3)
        w, _ = max_extractable_work(product_state(e).diagonal(),
                                    composite_hamiltonian(e))
        assert abs(w - 0.8) < 1e-12

    def test_two_qutrit_brute_force(self):
        e = BatteryEnsemble(2, 3, (0.224, 0.40, 0.376), (0.0, 0.579, 1.0))
        p = product_state(e).diagonal()
        h = composite_hamiltonian(e)
        w, _ = max_extractable_work(p, h)
        e0 = float(p @ h)
        hl = [float(x) for x in h]
        best = min(sum(a * b for a, b in zip(perm, hl))
                   for perm in permutations([float(x) for x in p]))
        assert abs(w - (e0 - best)) < 1e-10
        assert w > classical_limit_work(e) + 1e-9

    def test_qubit_array_additive(self):
        single = BatteryEnsemble(1, 2, (0.3, 0.7), (0.0, 1.0))
        w1, _ = max_extractable_work(product_state(single).diagonal(),
                                     composite_hamiltonian(single))
        for n in (2, 4, 6):
            e = BatteryEnsemble(n, 2, (0.3, 0.7), (0.0, 1.0))
            w, _ = max_extractable_work(product_state(e).diagonal(),
                                        composite_hamiltonian(e))
            assert abs(w - n * w1) < 1e-10


class TestClassicalLimit:
    def test_passive_battery(self):
        assert classical_limit_work(qubit_pair(0.7)) == 0.0

    def test_qutrit_value(self):
        e = BatteryEnsemble(2, 3, (0.224, 0.3, 0.476), (0.0, 0.579, 1.0))
        assert abs(classical_limit_work(e) - 2 * (0.476 - 0.224)) < 1e-12

    def test_qubits_never_beat_classical(self):
        for p0 in (0.1, 0.3, 0.45):
            e = BatteryEnsemble(3, 2, (p0, 1 - p0), (0.0, 1.0))
            w, _ = max_extractable_work(product_state(e).diagonal(),
                                        composite_hamiltonian(e))
            assert abs(w - classical_limit_work(e)) < 1e-10


class TestQutritThreshold:
    def test_reference_value(self):
        assert abs(qutrit_threshold(0.224) - 0.3197) < 5e-5

    def test_quadratic_root(self):
        p1 = qutrit_threshold(0.25)
        assert abs(p1 ** 2 + 0.25 * p1 - 0.1875) < 1e-12
        assert abs(p1 - (-0.25 + math.sqrt(0.8125)) / 2) < 1e-12

    def test_small_p0_limit(self):
        assert qutrit_threshold(1e-8) < 1e-3

    def test_domain(self):
        with pytest.raises(DomainError):
            qutrit_threshold(0.4)


class TestOptimalProtocol:
    def test_passive_empty(self):
        assert optimal_protocol(qubit_pair(0.7)).steps == ()

    def test_two_qubit_single_swap(self):
        proto = optimal_protocol(qubit_pair(0.3))
        assert [(s.alpha, s.beta) for s in proto.steps] == [(0, 3)]

    def test_qutrit_above_threshold_two_swaps(self):
        e = BatteryEnsemble(2, 3, (0.224, 0.36, 0.416), (0.0, 0.579, 1.0))
        pairs = {frozenset((s.alpha, s.beta)) for s in optimal_protocol(e).steps}
        assert frozenset((0, 8)) in pairs
        assert frozenset((4, 2)) in pairs or frozenset((4, 6)) in pairs

    def test_achieves_max_work_random(self, rng):
        for _ in range(10):
            d, n = int(rng.integers(2, 4)), int(rng.integers(1, 3))
            p = rng.dirichlet(np.ones(d))
            en = np.sort(rng.uniform(0, 1, d))
            if np.min(np.diff(en)) < 1e-3:
                continue
            e = BatteryEnsemble(n, d, tuple(p), tuple(en))
            h = composite_hamiltonian(e)
            rho0 = product_state(e)
            w_max, _ = max_extractable_work(rho0.diagonal(), h)
            rho_f = final_state(e, optimal_protocol(e))
            assert abs(work_extracted(rho0, rho_f, h) - w_max) < 1e-10
