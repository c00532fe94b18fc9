"""Closed-system propagation through the pulse and pure-state observables.

i dpsi/dt = H(lam(t)) psi is integrated with a fixed-step classical RK4
scheme, lam sampled at the substep midpoints.  Fixed stepping keeps runs
bit-reproducible; accuracy is policed after the fact through the norm
drift (unitarity) rather than by adaptive control, and a drifting norm is
an error, never silently renormalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NormDriftError, SpaceMismatchError, TruncationOverflowError
from .lindblad import DensityMatrix
from .model import (HilbertSpace, PulseProfile, boson_ladder,
                    diagonal_energies, jx_ladder, pulse_value)

__all__ = [
    "IntegratorConfig",
    "QuantumState",
    "Trajectory",
    "TruncationReport",
    "initial_state",
    "evolve_closed",
    "fidelity",
    "density_from_state",
    "reduce_qubits",
    "reduce_boson",
    "von_neumann_entropy",
    "von_neumann_entropy_base2",
    "qubit_entropy_series",
    "parity_expectation",
    "check_truncation",
]

TAIL_LEVELS = 5


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator settings.

    steps_per_unit_time scales the step count with the pulse duration;
    2000 is empirically safe for couplings up to 1 and the dimensions used
    here.  richardson_check repeats the run at half the step size and
    records the end-state difference on the trajectory.
    """

    steps_per_unit_time: int = 2000
    richardson_check: bool = False
    norm_tolerance: float = 1e-8

    def __post_init__(self):
        if self.steps_per_unit_time < 100:
            raise ValueError("steps_per_unit_time below 100 is not a validated preset")
        if self.norm_tolerance <= 0:
            raise ValueError("norm_tolerance must be positive")


@dataclass(frozen=True)
class QuantumState:
    space: HilbertSpace
    amplitudes: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of one closed run: states[k] is the amplitude vector at
    times[k], lambdas[k] the drive there.  Diagnostics carry the largest
    norm deviation and the largest population found in the top TAIL_LEVELS
    Fock levels over the stored snapshots."""

    space: HilbertSpace
    times: np.ndarray
    states: np.ndarray
    lambdas: np.ndarray
    norm_drift: float
    truncation_tail: float
    step_halving_error: float | None = None

    def __len__(self) -> int:
        return len(self.times)

    def state(self, k: int) -> QuantumState:
        return QuantumState(self.space, self.states[k])

    @property
    def final_state(self) -> QuantumState:
        return QuantumState(self.space, self.states[-1])


@dataclass(frozen=True)
class TruncationReport:
    tail_levels: int
    tolerance: float
    max_tail_population: float
    passed: bool


def initial_state(space: HilbertSpace) -> QuantumState:
    """|m = -N/2> (x) |n = 0>: no photons, all emitters in the lower level.

    This is the ground state of H(lam = 0), with energy -N epsilon / 2.
    """
    amp = np.zeros(space.dim_total, dtype=np.complex128)
    amp[space.index_of(0, 0)] = 1.0
    return QuantumState(space, amp)


def _tail_population(states: np.ndarray, dim_boson: int, tail_levels: int) -> float:
    ds = states.shape[1] // dim_boson
    resh = np.abs(states.reshape(len(states), ds, dim_boson)) ** 2
    lo = max(dim_boson - tail_levels, 0)
    return float(resh[:, :, lo:].sum(axis=(1, 2)).max())


def _integrate(space, psi0, profile, config, sample_count):
    duration = profile.duration
    intervals = sample_count - 1
    nsteps = math.ceil(duration * config.steps_per_unit_time / intervals) * intervals
    h = duration / nsteps
    t_steps = np.arange(nsteps + 1) * h
    lam_start = np.asarray(pulse_value(profile, t_steps))
    lam_mid = np.asarray(pulse_value(profile, t_steps[:-1] + 0.5 * h))
    ds, db = space.dim_spin, space.dim_boson
    psi = psi0.reshape(ds, db).astype(np.complex128, copy=True)
    snap_every = nsteps // intervals
    snaps = np.empty((sample_count, ds, db), np.complex128)
    _kernels.rk4_closed(diagonal_energies(space), jx_ladder(space),
                        boson_ladder(space),
                        2.0 / np.sqrt(space.params.n_attackers),
                        psi, h, lam_start, lam_mid, snap_every, snaps)
    times = t_steps[::snap_every]
    lambdas = lam_start[::snap_every]
    return times, snaps.reshape(sample_count, ds * db), lambdas


def evolve_closed(state0: QuantumState, profile: PulseProfile,
                  config: IntegratorConfig | None = None,
                  sample_count: int = 121,
                  truncation_tol: float | None = 1e-8) -> Trajectory:
    """Integrate through the full pulse window [0, 2/speed].

    Returns sample_count evenly spaced snapshots including both endpoints.
    Raises NormDriftError when unitarity is violated beyond
    config.norm_tolerance (step size too coarse) and
    TruncationOverflowError when population reaches the top TAIL_LEVELS
    Fock levels beyond truncation_tol.  Pass truncation_tol=None to get
    the trajectory anyway and inspect it with check_truncation.
    """
    config = config or IntegratorConfig()
    if sample_count < 2:
        raise ValueError("sample_count must be at least 2")
    norm0 = np.linalg.norm(state0.amplitudes)
    if abs(norm0 - 1.0) > 1e-6:
        raise ValueError(f"initial state is not normalized (norm {norm0!r})")
    space = state0.space
    times, states, lambdas = _integrate(space, state0.amplitudes, profile,
                                        config, sample_count)
    norms = np.linalg.norm(states, axis=1)
    drift = float(np.abs(norms - 1.0).max())
    if drift > config.norm_tolerance:
        raise NormDriftError(
            f"norm drift {drift:.3e} exceeds {config.norm_tolerance:.1e}; "
            "raise steps_per_unit_time")
    tail = _tail_population(states, space.dim_boson, TAIL_LEVELS)
    if truncation_tol is not None and tail > truncation_tol:
        raise TruncationOverflowError(
            f"top-of-ladder population {tail:.3e} exceeds {truncation_tol:.1e}; "
            "raise n_max")
    halving = None
    if config.richardson_check:
        fine = IntegratorConfig(steps_per_unit_time=2 * config.steps_per_unit_time,
                                richardson_check=False,
                                norm_tolerance=config.norm_tolerance)
        _, states2, _ = _integrate(space, state0.amplitudes, profile, fine,
                                   sample_count)
        halving = float(np.linalg.norm(states2[-1] - states[-1]))
    return Trajectory(space, times, states, lambdas, drift, tail, halving)


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """|<a|b>|^2, symmetric, insensitive to global phase."""
    if a.space != b.space:
        raise SpaceMismatchError("states live on different spaces")
    return min(float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2), 1.0)


def density_from_state(state: QuantumState) -> DensityMatrix:
    """Outer product |psi><psi| as a full-space density matrix."""
    psi = state.amplitudes
    return DensityMatrix(state.space, np.outer(psi, psi.conj()))


def reduce_qubits(state: QuantumState) -> DensityMatrix:
    """Trace out the boson factor: (N+1) x (N+1) reduced density matrix."""
    m = state.amplitudes.reshape(state.space.dim_spin, state.space.dim_boson)
    return DensityMatrix(state.space, m @ m.conj().T, part="spin")


def reduce_boson(state: QuantumState) -> DensityMatrix:
    """Trace out the spin factor: (n_max+1) x (n_max+1) reduced matrix."""
    m = state.amplitudes.reshape(state.space.dim_spin, state.space.dim_boson)
    return DensityMatrix(state.space, m.T @ m.conj(), part="boson")


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S = -sum p ln p over the eigenvalues, natural log, 0 ln 0 = 0."""
    from .errors import NotAStateError
    entries = rho.entries
    tr = float(np.trace(entries).real)
    if abs(tr - 1.0) > 1e-8:
        raise NotAStateError(f"trace {tr!r} deviates from 1")
    w = np.linalg.eigvalsh(entries)
    if w[0] < -1e-8:
        raise NotAStateError(f"negative eigenvalue {w[0]!r}")
    p = w[w > 0.0]
    return float(-(p * np.log(p)).sum())


def von_neumann_entropy_base2(rho: DensityMatrix) -> float:
    return von_neumann_entropy(rho) / math.log(2.0)


def qubit_entropy_series(traj: Trajectory) -> np.ndarray:
    """Entanglement entropy of the emitters at every snapshot."""
    return np.array([von_neumann_entropy(reduce_qubits(traj.state(k)))
                     for k in range(len(traj))])


def parity_expectation(state: QuantumState) -> float:
    """Expectation of the conserved parity exp(i pi (a+a + J_z + N/2))."""
    space = state.space
    signs = np.kron((-1.0) ** np.arange(space.dim_spin),
                    (-1.0) ** np.arange(space.dim_boson))
    return float(signs @ (np.abs(state.amplitudes) ** 2))


def check_truncation(traj: Trajectory, tail_levels: int = TAIL_LEVELS,
                     tol: float = 1e-8) -> TruncationReport:
    """Largest snapshot population in the top tail_levels Fock levels.

    PASS means the cutoff did not distort the run at the stated tolerance.
    """
    tail = _tail_population(traj.states, traj.space.dim_boson, tail_levels)
    return TruncationReport(tail_levels, tol, tail, tail < tol)
