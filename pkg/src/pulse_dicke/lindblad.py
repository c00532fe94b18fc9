"""Cavity-damped master equation and entanglement measures.

d rho/dt = -i[H(lam(t)), rho] + 2 kappa (nbar+1) D[a] rho
           + 2 kappa nbar D[a+] rho,
with D[O] rho = O rho O+ - (O+O rho + rho O+O)/2.  Only the cavity is
damped; the emitters stay coherent.  kappa is the damping rate and nbar
the thermal occupation of the bath, both in units of the cavity
frequency.

Two routes compute the right-hand side: lindblad_rhs builds it from the
dense operators (transparent, used by the oracle tests), while
evolve_open runs a structured stencil that never materializes a
superoperator and scales to the dimensions the sweeps need.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (NotAStateError, PositivityLossError,
                     SpaceMismatchError, TraceDriftError,
                     TruncationOverflowError)
from .model import (HilbertSpace, PulseProfile, assemble_hamiltonian,
                    boson_ladder, diagonal_energies, jx_ladder,
                    op_boson_annihilate, pulse_value)

__all__ = [
    "OpenParams",
    "DensityMatrix",
    "OpenTrajectory",
    "validate_density_matrix",
    "lindblad_rhs",
    "evolve_open",
    "partial_transpose_qubits",
    "negativity",
    "log_negativity",
    "purity",
    "photon_number_expectation",
    "trace_distance",
]

TAIL_LEVELS = 5


@dataclass(frozen=True)
class OpenParams:
    kappa: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        if self.kappa < 0 or self.nbar < 0:
            raise ValueError("kappa and nbar must be >= 0")


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian unit-trace operator; part records which factor it lives
    on ("full", "spin" or "boson")."""

    space: HilbertSpace
    entries: np.ndarray
    part: str = "full"


def validate_density_matrix(rho: DensityMatrix, trace_tol: float = 1e-8,
                            herm_tol: float = 1e-10,
                            eig_floor: float = -1e-8) -> None:
    e = rho.entries
    herm = float(np.abs(e - e.conj().T).max())
    if herm > herm_tol:
        raise NotAStateError(f"hermiticity deviation {herm:.3e}")
    tr = float(np.trace(e).real)
    if abs(tr - 1.0) > trace_tol:
        raise NotAStateError(f"trace {tr!r} deviates from 1")
    wmin = float(np.linalg.eigvalsh(e)[0])
    if wmin < eig_floor:
        raise NotAStateError(f"negative eigenvalue {wmin:.3e}")


def lindblad_rhs(rho: DensityMatrix, lambda_now: float,
                 open_params: OpenParams) -> DensityMatrix:
    """Right-hand side of the master equation, dense-operator route.

    The returned matrix is a derivative, traceless and Hermitian, not a
    state.
    """
    space = rho.space
    h = assemble_hamiltonian(space, lambda_now).entries
    a = op_boson_annihilate(space).entries
    ad = a.conj().T
    kap, nbar = open_params.kappa, open_params.nbar
    e = rho.entries
    out = -1j * (h @ e - e @ h)
    if kap > 0:
        out += 2 * kap * (nbar + 1) * (a @ e @ ad - 0.5 * (ad @ a @ e + e @ ad @ a))
        if nbar > 0:
            out += 2 * kap * nbar * (ad @ e @ a - 0.5 * (a @ ad @ e + e @ a @ ad))
    return DensityMatrix(space, out, part=rho.part)


@dataclass(frozen=True)
class OpenTrajectory:
    """Snapshots of one open run plus the worst-case validity diagnostics
    observed across them."""

    space: HilbertSpace
    times: np.ndarray
    rhos: np.ndarray | None
    lambdas: np.ndarray
    trace_drift: float
    herm_deviation: float
    min_eigenvalue: float
    truncation_tail: float

    def __len__(self) -> int:
        return len(self.times)

    def density(self, k: int) -> DensityMatrix:
        if self.rhos is None:
            raise ValueError("snapshots were not kept for this run")
        return DensityMatrix(self.space, self.rhos[k])


def evolve_open(rho0: DensityMatrix, profile: PulseProfile,
                open_params: OpenParams, config=None, sample_count: int = 41,
                truncation_tol: float | None = 1e-8,
                keep_states: bool = True, observer=None) -> OpenTrajectory:
    """Fixed-step RK4 integration of the master equation over the pulse.

    Every snapshot is validated: trace drift beyond config.norm_tolerance
    raises TraceDriftError, an eigenvalue below -1e-6 raises
    PositivityLossError (below -1e-8 only warns), and Fock-tail population
    beyond truncation_tol raises TruncationOverflowError.  observer, when
    given, is called as observer(k, t, lam, rho) at each snapshot with a
    read-only view; set keep_states=False to stream large runs through the
    observer without storing every matrix.
    """
    from .closed import IntegratorConfig
    config = config or IntegratorConfig()
    if sample_count < 2:
        raise ValueError("sample_count must be at least 2")
    if rho0.part != "full":
        raise SpaceMismatchError("open evolution needs a full-space density matrix")
    validate_density_matrix(rho0, trace_tol=config.norm_tolerance)
    space = rho0.space
    ds, db = space.dim_spin, space.dim_boson
    dim = space.dim_total
    duration = profile.duration
    intervals = sample_count - 1
    nsteps = math.ceil(duration * config.steps_per_unit_time / intervals) * intervals
    h = duration / nsteps
    t_steps = np.arange(nsteps + 1) * h
    lam_start = np.asarray(pulse_value(profile, t_steps))
    lam_mid = np.asarray(pulse_value(profile, t_steps[:-1] + 0.5 * h))
    snap_every = nsteps // intervals

    e_flat = diagonal_energies(space).reshape(-1)
    jx_sub = jx_ladder(space)
    x_sub = boson_ladder(space)
    coup = 2.0 / np.sqrt(space.params.n_attackers)
    g1 = 2.0 * open_params.kappa * (open_params.nbar + 1.0)
    g2 = 2.0 * open_params.kappa * open_params.nbar

    rho = rho0.entries.astype(np.complex128, copy=True)
    k1, k2, k3, k4, tmp = (np.empty((dim, dim), np.complex128) for _ in range(5))
    times = t_steps[::snap_every]
    lambdas = lam_start[::snap_every]
    rhos = np.empty((sample_count, dim, dim), np.complex128) if keep_states else None
    n_diag = np.tile(np.arange(db, dtype=float), ds)
    tail_mask = n_diag >= db - TAIL_LEVELS

    worst_trace = worst_herm = 0.0
    worst_eig = np.inf
    worst_tail = 0.0

    def take(k, snap):
        nonlocal worst_trace, worst_herm, worst_eig, worst_tail
        tr = float(np.trace(snap).real)
        worst_trace = max(worst_trace, abs(tr - 1.0))
        worst_herm = max(worst_herm, float(np.abs(snap - snap.conj().T).max()))
        wmin = float(np.linalg.eigvalsh(snap)[0])
        worst_eig = min(worst_eig, wmin)
        tail = float(snap.real.diagonal()[tail_mask].sum())
        worst_tail = max(worst_tail, tail)
        if abs(tr - 1.0) > config.norm_tolerance:
            raise TraceDriftError(
                f"trace drift {abs(tr - 1.0):.3e} at t={times[k]:.4g}; "
                "raise steps_per_unit_time")
        if wmin < -1e-6:
            raise PositivityLossError(
                f"eigenvalue {wmin:.3e} at t={times[k]:.4g}; step too coarse")
        if wmin < -1e-8:
            warnings.warn(f"density matrix eigenvalue {wmin:.3e} slightly negative",
                          RuntimeWarning)
        if truncation_tol is not None and tail > truncation_tol:
            raise TruncationOverflowError(
                f"Fock tail population {tail:.3e} exceeds {truncation_tol:.1e}; "
                "raise n_max")
        if rhos is not None:
            rhos[k] = snap
        if observer is not None:
            observer(k, float(times[k]), float(lambdas[k]), snap)

    take(0, rho)
    isnap = 0
    for s in range(nsteps):
        _kernels.rk4_open_step(e_flat, jx_sub, x_sub, coup, g1, g2, rho, h,
                               lam_start[s], lam_mid[s], lam_start[s + 1],
                               k1, k2, k3, k4, tmp)
        if (s + 1) % snap_every == 0:
            isnap += 1
            take(isnap, rho)
    return OpenTrajectory(space, times, rhos, lambdas, worst_trace,
                          worst_herm, worst_eig, worst_tail)


def partial_transpose_qubits(rho: DensityMatrix) -> np.ndarray:
    """Transpose the spin indices only.

    (rho^G)[(m,n),(m',n')] = rho[(m',n),(m,n')].  An involution that
    preserves Hermiticity and trace but not positivity; its negative
    eigenvalues witness spin-boson entanglement.
    """
    if rho.part != "full":
        raise SpaceMismatchError("partial transpose needs the full-space matrix")
    space = rho.space
    ds, db = space.dim_spin, space.dim_boson
    r4 = rho.entries.reshape(ds, db, ds, db)
    return r4.transpose(2, 1, 0, 3).reshape(space.dim_total, space.dim_total)


def negativity(rho: DensityMatrix) -> float:
    """(|rho^G|_1 - 1)/2 from the eigenvalues of the partial transpose."""
    w = np.linalg.eigvalsh(partial_transpose_qubits(rho))
    return max(0.5 * (float(np.abs(w).sum()) - 1.0), 0.0)


def log_negativity(rho: DensityMatrix) -> float:
    """log2 |rho^G|_1; the companion measure quoted alongside negativity."""
    w = np.linalg.eigvalsh(partial_transpose_qubits(rho))
    return max(math.log2(float(np.abs(w).sum())), 0.0)


def purity(rho: DensityMatrix) -> float:
    """trace(rho^2); 1 exactly for pure states, 1/d for maximally mixed."""
    e = rho.entries
    return float(np.einsum("ij,ji->", e, e).real)


def photon_number_expectation(rho: DensityMatrix) -> float:
    if rho.part == "boson":
        n = np.arange(rho.entries.shape[0], dtype=float)
        return float(n @ rho.entries.real.diagonal())
    space = rho.space
    n = np.tile(np.arange(space.dim_boson, dtype=float), space.dim_spin)
    return float(n @ rho.entries.real.diagonal())


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """(1/2) |a - b|_1 for Hermitian a, b."""
    w = np.linalg.eigvalsh(a.entries - b.entries)
    return 0.5 * float(np.abs(w).sum())
