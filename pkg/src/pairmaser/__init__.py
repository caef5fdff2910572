"""Cavity field driven by a beam of two-level atom pairs prepared in X-states."""

from .dynamics import (PassConfig, RunRecord, detect_steady, first_pass_mean, increment_ratio,
                       integrate_master, iterate_passes, mean_after_j, run_until_steady,
                       steady_mean)
from .errors import (ConfigError, DivergenceError, DomainError, IntegrationError,
                     PairmaserError, TruncationError, UndefinedTemperatureError)
from .fock import (CavityState, ThermalModel, entropy_difference, mean_photon, offdiag_norm,
                   resize, thermal_entropy_of_mean, thermal_state, vacuum, von_neumann_entropy)
from .jc_map import assemble_joint_unitary, build_utable, exact_pass, weak_pass
from .thermo import (TempReport, balance_deviation, cavity_beta_coherent, phase_deviation,
                     reservoir_beta)
from .xstate import (QubitState, XParams, XState, apply_phase_gate, build_xstate,
                     classical_correlated, concurrence, discord, product_state, reduced_states,
                     validate)

__version__ = "0.1.0"
