"""Simulator of coordinated pulse attacks on a qubit group sharing a boson
mode: a driven Dicke model in the collective-spin sector, with closed
(Schrodinger) and open (Lindblad, damped cavity) propagation, sweep
orchestration and result serialization.
"""

from .closed import (IntegratorConfig, QuantumState, Trajectory,
                     TruncationReport, check_truncation, density_from_state,
                     evolve_closed, fidelity, initial_state,
                     parity_expectation, qubit_entropy_series, reduce_boson,
                     reduce_qubits, von_neumann_entropy,
                     von_neumann_entropy_base2)
from .errors import (EmptyPayloadError, NoMinimumError, NormDriftError,
                     NotAStateError, OutputError, PositivityLossError,
                     SimulationError, SpaceMismatchError, TraceDriftError,
                     TruncationOverflowError)
from .lindblad import (DensityMatrix, OpenParams, OpenTrajectory, evolve_open,
                       lindblad_rhs, log_negativity, negativity,
                       partial_transpose_qubits, photon_number_expectation,
                       purity, trace_distance, validate_density_matrix)
from .model import (HilbertSpace, MatrixOperator, ModelParams, PulseProfile,
                    PulseShape, assemble_hamiltonian, build_space,
                    diagonal_energies, op_boson_annihilate, op_boson_create,
                    op_jx, op_jy, op_jz, op_photon_number, parity_operator,
                    pulse_value)
from .sweeps import (DEFAULT_KAPPA_GRID, ENTROPY_COLUMNS, FIDELITY_COLUMNS,
                     NEGATIVITY_COLUMNS, EntropyMap, NegativityTrace,
                     SweepGrid, SweepRecord, UStarResult,
                     default_upsilon_grid, entropy_map, find_ustar,
                     negativity_trace, read_records, sweep_fidelity,
                     write_results)
from .validate import CheckResult, run_validation

__version__ = "0.1.0"
