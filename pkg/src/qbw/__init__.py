"""Work extraction from arrays of identical quantum batteries via swap
protocols, with classical and quantum correlation accounting."""

from .battery import (
    BatteryEnsemble,
    GibbsResult,
    composite_hamiltonian,
    is_completely_passive,
    is_passive,
    product_state,
    solve_beta,
)
from .correlations import (
    Bipartition,
    CorrelationReport,
    MeasurementBasis,
    analytic_gd_max,
    classical_correlations,
    concurrence_two_qubits,
    discord_witness,
    eof_two_qubits,
    genuine_correlations,
    global_discord,
    mutual_information,
    measured_conditional_entropy,
    ppt_separable,
    quantum_discord,
    symmetric_discord,
)
from .errors import (
    BasisError,
    ConvergenceError,
    DomainError,
    MultipleCoherences,
    QbwError,
    ShapeError,
    ZeroWeight,
)
from .mapping import MappedState, detect_single_coherence, qudit_to_qubit_map
from .protocol import (
    ProtocolTrace,
    SwapProtocol,
    SwapStep,
    classical_limit_work,
    evolve_step,
    final_state,
    max_extractable_work,
    multi_step_decomposition,
    optimal_protocol,
    qutrit_threshold,
    run_protocol,
    work_extracted,
)
from .qmat import (
    DensityMatrix,
    EigenSystem,
    dephase,
    diagonal_state,
    hermitian_eig,
    partial_trace,
    relative_entropy,
    tensor,
    von_neumann_entropy,
)

__version__ = "0.1.0"
