"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for physics and bookkeeping failures."""


class SpaceMismatchError(SimulationError):
    """Two states or operators live on different Hilbert spaces."""


class NormDriftError(SimulationError):
    """State norm drifted beyond tolerance during closed integration."""


class TruncationOverflowError(SimulationError):
    """Population climbed into the top of the Fock ladder."""


class NotAStateError(SimulationError):
    """Matrix failed a density-matrix validity check."""


class PositivityLossError(SimulationError):
    """Density matrix developed a negative eigenvalue beyond tolerance."""


class TraceDriftError(SimulationError):
    """Density-matrix trace drifted away from one during integration."""


class NoMinimumError(SimulationError):
    """Coarse scan found no interior fidelity minimum in the bracket."""


class EmptyPayloadError(SimulationError):
    """Refused to write an output file with no rows."""


class OutputError(SimulationError):
    """Could not write results to the requested path."""
