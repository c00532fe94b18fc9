"""Hilbert space, physical parameters, pulse envelope, and operators.

The system is N identical two-level emitters sharing one cavity mode.
Every emitter couples with the same strength and the initial states used
here are permutation symmetric, so the emitter factor never leaves the
collective-spin sector j = N/2 and the working basis is |m> (x) |n| with
m the spin projection (N+1 values) and n the photon number (n_max+1
values after truncation).  Flat index convention: boson index fastest,

    flat = m_index * (n_max + 1) + n,      m_index = m + N/2 in 0..N.

The drive multiplies the qubit-boson coupling by a triangular envelope
lam(t) that ramps 0 -> peak -> 0 over a window of duration 2/speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "ModelParams",
    "PulseShape",
    "PulseProfile",
    "HilbertSpace",
    "MatrixOperator",
    "pulse_value",
    "build_space",
    "op_boson_annihilate",
    "op_boson_create",
    "op_photon_number",
    "op_jz",
    "op_jx",
    "op_jy",
    "assemble_hamiltonian",
    "parity_operator",
    "diagonal_energies",
    "jx_ladder",
    "boson_ladder",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of one run, hbar = 1.

    omega is the cavity frequency, epsilon the emitter splitting (the
    default working point is resonance, epsilon == omega, which sets the
    time unit), n_max the Fock-space cutoff.
    """

    n_attackers: int
    omega: float = 1.0
    epsilon: float = 1.0
    n_max: int = 40

    def __post_init__(self):
        if self.n_attackers < 1:
            raise ValueError("n_attackers must be >= 1")
        if self.omega <= 0 or self.epsilon <= 0:
            raise ValueError("omega and epsilon must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")


class PulseShape(Enum):
    TRIANGULAR = "triangular"


@dataclass(frozen=True)
class PulseProfile:
    """Drive envelope: speed = inverse ramp time, total duration 2/speed.

    peak = 0 is allowed and means no drive at all (used by decay checks).
    """

    speed: float
    peak: float = 1.0
    shape: PulseShape = PulseShape.TRIANGULAR

    def __post_init__(self):
        if self.speed <= 0:
            raise ValueError("pulse speed must be positive")
        if self.peak < 0:
            raise ValueError("pulse peak must be >= 0")
        if self.shape is not PulseShape.TRIANGULAR:
            raise ValueError("only the triangular shape is implemented")

    @property
    def duration(self) -> float:
        return 2.0 / self.speed


def pulse_value(profile: PulseProfile, t):
    """Triangular envelope value lam(t).

    Rises linearly from 0 at t=0 to peak at t=1/speed, falls back to 0 at
    t=2/speed, and is exactly 0 outside the window.  Continuous in t.
    Accepts scalars or arrays.
    """
    vt = profile.speed * np.asarray(t, dtype=float)
    lam = profile.peak * np.maximum(np.minimum(vt, 2.0 - vt), 0.0)
    if lam.ndim == 0:
        return float(lam)
    return lam


@dataclass(frozen=True)
class HilbertSpace:
    """Product basis |m> (x) |n> with the flat-index bijection documented
    in the module docstring (boson index fastest)."""

    params: ModelParams

    @property
    def dim_spin(self) -> int:
        return self.params.n_attackers + 1

    @property
    def dim_boson(self) -> int:
        return self.params.n_max + 1

    @property
    def dim_total(self) -> int:
        return self.dim_spin * self.dim_boson

    @property
    def j(self) -> float:
        return self.params.n_attackers / 2.0

    def m_values(self) -> np.ndarray:
        """Spin projections m = -j .. +j, ascending, indexed by m_index."""
        return np.arange(self.dim_spin) - self.j

    def index_of(self, m_index: int, n: int) -> int:
        if not (0 <= m_index < self.dim_spin and 0 <= n < self.dim_boson):
            raise IndexError(f"basis label ({m_index}, {n}) out of range")
        return m_index * self.dim_boson + n

    def split_index(self, flat: int) -> tuple[int, int]:
        if not 0 <= flat < self.dim_total:
            raise IndexError(f"flat index {flat} out of range")
        return divmod(flat, self.dim_boson)


def build_space(params: ModelParams) -> HilbertSpace:
    """Construct the product space for the given parameters.

    Parameter validation happens in ModelParams; this is the single place
    that fixes the basis ordering for everything downstream.
    """
    return HilbertSpace(params)


@dataclass(frozen=True)
class MatrixOperator:
    """Dense operator on the product space."""

    space: HilbertSpace
    entries: np.ndarray

    @property
    def shape(self):
        return self.entries.shape


# structured pieces shared by the dense builders and the fast kernels

def diagonal_energies(space: HilbertSpace) -> np.ndarray:
    """(dim_spin, dim_boson) grid of epsilon*m + omega*n."""
    p = space.params
    return np.add.outer(p.epsilon * space.m_values(),
                        p.omega * np.arange(space.dim_boson, dtype=float))


def jx_ladder(space: HilbertSpace) -> np.ndarray:
    """Subdiagonal of J_x in the |j, m> basis, length dim_spin - 1.

    Entry i couples m_index i and i+1: 0.5*sqrt(j(j+1) - m(m+1)) at
    m = m_values[i].
    """
    j = space.j
    m = space.m_values()[:-1]
    return 0.5 * np.sqrt(j * (j + 1) - m * (m + 1))


def boson_ladder(space: HilbertSpace) -> np.ndarray:
    """sqrt(1), sqrt(2), ..., sqrt(n_max): the nonzero elements of a."""
    return np.sqrt(np.arange(1.0, space.dim_boson))


def _boson_annihilate_small(space: HilbertSpace) -> np.ndarray:
    return np.diag(boson_ladder(space), 1)


def op_boson_annihilate(space: HilbertSpace) -> MatrixOperator:
    """a (x) identity on spin; a|n> = sqrt(n)|n-1>."""
    a_b = _boson_annihilate_small(space)
    return MatrixOperator(space, np.kron(np.eye(space.dim_spin), a_b).astype(complex))


def op_boson_create(space: HilbertSpace) -> MatrixOperator:
    a = op_boson_annihilate(space)
    return MatrixOperator(space, a.entries.conj().T.copy())


def op_photon_number(space: HilbertSpace) -> MatrixOperator:
    """a+ a, consistent with the truncated ladder operators."""
    a_b = _boson_annihilate_small(space)
    return MatrixOperator(space, np.kron(np.eye(space.dim_spin), a_b.T @ a_b).astype(complex))


def op_jz(space: HilbertSpace) -> MatrixOperator:
    """Diagonal collective J_z (x) identity on the boson factor."""
    jz_s = np.diag(space.m_values())
    return MatrixOperator(space, np.kron(jz_s, np.eye(space.dim_boson)).astype(complex))


def op_jx(space: HilbertSpace) -> MatrixOperator:
    """(J+ + J-)/2 with standard ladder coefficients, (x) boson identity."""
    sub = jx_ladder(space)
    jx_s = np.diag(sub, 1) + np.diag(sub, -1)
    return MatrixOperator(space, np.kron(jx_s, np.eye(space.dim_boson)).astype(complex))


def op_jy(space: HilbertSpace) -> MatrixOperator:
    """(J+ - J-)/2i, provided for algebra checks like [Jz, Jx] = i Jy."""
    sub = jx_ladder(space)
    jy_s = 1j * (np.diag(sub, 1) - np.diag(sub, -1))
    return MatrixOperator(space, np.kron(jy_s, np.eye(space.dim_boson)))


def assemble_hamiltonian(space: HilbertSpace, lambda_now: float) -> MatrixOperator:
    """Dense H at coupling lam.

    H = omega a+a + epsilon J_z + (2 lam / sqrt(N)) (a + a+) J_x.

    The 2/sqrt(N) factor makes the per-emitter coupling lam/sqrt(N) when
    the collective operators are unfolded back into Pauli sums.  Hermitian
    by construction; the coupling term is strictly off-diagonal in n, so
    the diagonal is lam-independent.
    """
    if lambda_now < 0:
        raise ValueError("coupling must be >= 0")
    p = space.params
    num = op_photon_number(space).entries
    jz = op_jz(space).entries
    jx = op_jx(space).entries
    a = op_boson_annihilate(space).entries
    x = a + a.conj().T
    h = p.omega * num + p.epsilon * jz \
        + (2.0 * lambda_now / np.sqrt(p.n_attackers)) * (x @ jx)
    return MatrixOperator(space, h)


def parity_operator(space: HilbertSpace) -> MatrixOperator:
    """exp(i pi (a+a + J_z + N/2)): diagonal, entries (-1)**(n + m_index).

    Commutes with the Hamiltonian at every coupling, so its expectation
    is conserved along closed trajectories and makes a sharp integration
    check.
    """
    m_idx = np.arange(space.dim_spin)
    n = np.arange(space.dim_boson)
    signs = np.kron((-1.0) ** m_idx, (-1.0) ** n)
    return MatrixOperator(space, np.diag(signs).astype(complex))
