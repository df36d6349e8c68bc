"""Simulation and closed-form analysis of ancilla-free 1->2 phase-covariant telecloning of qudits."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    TOL,
    DensityMatrix,
    StateVector,
    Tolerances,
    fidelity,
    global_phase_equal,
    partial_trace,
    tensor_product,
    von_neumann_entropy,
)
from .cloning import (  # noqa: E402
    econ_clone,
    econ_fidelity_analytic,
    opt_fidelity_analytic,
    phase_state,
    phi_basis_state,
)
from .telecloning import (  # noqa: E402
    BellOutcome,
    ChannelAmplitudes,
    bell_state,
    channel_entanglement,
    channel_entropy,
    channel_state,
    correction_unitary,
    fidelity_analytic,
    measure,
    optimal_amplitudes,
    run_protocol,
    total_state,
)
from .analysis import maximize_fidelity, sweep_x0  # noqa: E402
