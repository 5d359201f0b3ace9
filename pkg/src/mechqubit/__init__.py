"""Two-phonon cooling and mechanical-qubit gates for an electromechanical membrane."""

from .circuit import (
    HBAR,
    CircuitParams,
    DriveParams,
    GeneralizedRates,
    MembraneParams,
    RateSet,
    ResolvedSidebandWarning,
    compute_rates,
    coupling_ratio,
    derive_circuit_elements,
    intracavity_alpha,
    lambda_from_ratios,
    response_xi,
    sm_rates,
    with_balanced_channels,
)
from .dynamics import (
    IntegrationError,
    ReducedState,
    SimulationConfig,
    build_liouvillian,
    evolve_full,
    evolve_reduced,
    full_rhs,
    reduced_rhs,
    reduced_steady_state,
)
from .fock import (
    annihilation,
    default_thermal_dim,
    dissipator,
    fock_dm,
    number_operator,
    parity_populations,
    qubit_dm,
    thermal_state,
    two_phonon_target,
    uhlmann_fidelity,
    validate_density_matrix,
)
from .protocols import (
    PulseResult,
    QubitState,
    SweepRow,
    bloch_sphere_grid,
    cooling_infidelity_curve,
    fidelity_asymptotic,
    ideal_pulse_target,
    min_infidelity,
    optimal_drive,
    pi_pulse,
    pi_pulse_fidelity_sweep,
    pi_pulse_wigner,
    pulse_drive,
    rates_from_lambda,
    reference_bloch_sample,
)
from .wigner import WignerGrid, default_grid, displacement_matrix, origin_parity_value, wigner

__version__ = "0.1.0"
