"""Self-validation suite: every library-level invariant as a runnable check.

Each check is independent, returns a measurement string, and never writes
files.  run_validation executes all of them and reports pass/fail; the
expensive shared trajectories are computed once and memoized.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .closed import (IntegratorConfig, density_from_state, evolve_closed,
                     fidelity, initial_state, parity_expectation,
                     reduce_boson, reduce_qubits, von_neumann_entropy)
from .lindblad import (DensityMatrix, OpenParams, evolve_open, lindblad_rhs,
                       negativity, photon_number_expectation, trace_distance)
from .model import (ModelParams, PulseProfile, assemble_hamiltonian,
                    build_space, op_boson_annihilate, parity_operator,
                    pulse_value)
from .sweeps import SweepGrid, _to_csv_text, sweep_fidelity

__all__ = ["CheckResult", "run_validation", "CHECK_NAMES"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


_CHECKS = []


def _check(name):
    def deco(fn):
        _CHECKS.append((name, fn))
        return fn
    return deco


# ------------------------------------------------------------- shared runs

@functools.cache
def _reference_pulse_run():
    """One mid-speed closed pulse reused by several trajectory checks."""
    space = build_space(ModelParams(n_attackers=3, n_max=40))
    psi0 = initial_state(space)
    traj = evolve_closed(psi0, PulseProfile(speed=0.25), sample_count=41)
    return space, psi0, traj


@functools.cache
def _kappa_grid_runs():
    """Open runs over the default kappa grid at fixed N, speed and times."""
    space = build_space(ModelParams(n_attackers=2, n_max=24))
    rho0 = density_from_state(initial_state(space))
    profile = PulseProfile(speed=0.25)
    config = IntegratorConfig(steps_per_unit_time=400)
    kappas = (0.0, 0.01, 0.05, 0.1, 0.2)
    samples = 17
    neg = np.empty((len(kappas), samples))
    trajs = []
    for i, kappa in enumerate(kappas):
        def observe(k, t, lam, rho, i=i):
            neg[i, k] = negativity(DensityMatrix(space, rho))
        trajs.append(evolve_open(rho0, profile, OpenParams(kappa=kappa),
                                 config, sample_count=samples,
                                 truncation_tol=None, keep_states=False,
                                 observer=observe))
    return kappas, neg, trajs


@functools.cache
def _tiny_sweep(workers):
    grid = SweepGrid(n_values=(1,), upsilon_values=np.array([1.0, 2.0, 4.0]))
    return sweep_fidelity(grid, samples=41, workers=workers, n_max_start=16)


# ------------------------------------------------------------ model checks

@_check("hamiltonian_hermitian")
def _c_herm():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        space = build_space(ModelParams(n_attackers=n, n_max=12))
        h = assemble_hamiltonian(space, float(rng.uniform(0, 1))).entries
        worst = max(worst, float(np.abs(h - h.conj().T).max()))
    return worst < 1e-12, f"max |H - H^dag| = {worst:.2e} over 100 draws"


@_check("hamiltonian_parity_commutes")
def _c_parity_comm():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 9))
        space = build_space(ModelParams(n_attackers=n, n_max=12))
        h = assemble_hamiltonian(space, float(rng.uniform(0, 1))).entries
        p = parity_operator(space).entries
        worst = max(worst, float(np.abs(h @ p - p @ h).max()))
    return worst < 1e-10, f"max |[H, Pi]| = {worst:.2e} over 20 draws"


@_check("hamiltonian_linear_in_lambda")
def _c_linear():
    space = build_space(ModelParams(n_attackers=4, n_max=10))
    h0 = assemble_hamiltonian(space, 0.0).entries
    h1 = assemble_hamiltonian(space, 1.0).entries
    worst = 0.0
    for lam in (0.3, 0.77, 0.925):
        h = assemble_hamiltonian(space, lam).entries
        worst = max(worst, float(np.abs(h - (h0 + lam * (h1 - h0))).max()))
    return worst < 1e-12, f"max nonlinearity residual = {worst:.2e}"


@_check("pulse_area")
def _c_area():
    worst = 0.0
    for speed, peak in ((0.25, 1.0), (1.7, 0.6), (40.0, 1.0)):
        profile = PulseProfile(speed=speed, peak=peak)
        t = np.linspace(0.0, profile.duration, 2 * 50000 + 1)
        area = float(np.trapezoid(pulse_value(profile, t), t))
        worst = max(worst, abs(area - peak / speed))
    return worst < 1e-10, f"max |area - peak/speed| = {worst:.2e}"


@_check("initial_state_energy")
def _c_energy():
    worst = 0.0
    for n in (1, 3, 6):
        space = build_space(ModelParams(n_attackers=n, n_max=8))
        psi = initial_state(space).amplitudes
        h0 = assemble_hamiltonian(space, 0.0).entries
        e = float(np.vdot(psi, h0 @ psi).real)
        worst = max(worst, abs(e - (-0.5 * n)))
    return worst < 1e-12, f"max |<H(0)> + N/2| = {worst:.2e}"


# ----------------------------------------------------------- closed checks

@_check("norm_preservation")
def _c_norm():
    _, _, traj = _reference_pulse_run()
    return traj.norm_drift < 1e-8, f"norm drift = {traj.norm_drift:.2e}"


@_check("schmidt_symmetry")
def _c_schmidt():
    _, _, traj = _reference_pulse_run()
    worst = 0.0
    for k in range(len(traj)):
        state = traj.state(k)
        ds = von_neumann_entropy(reduce_qubits(state))
        db = von_neumann_entropy(reduce_boson(state))
        worst = max(worst, abs(ds - db))
    return worst < 1e-6, f"max |S_spin - S_boson| = {worst:.2e}"


@_check("parity_conservation")
def _c_parity_cons():
    _, _, traj = _reference_pulse_run()
    p0 = parity_expectation(traj.state(0))
    worst = 0.0
    for k in range(1, len(traj)):
        worst = max(worst, abs(parity_expectation(traj.state(k)) - p0))
    return worst < 1e-8, f"max parity drift = {worst:.2e}"


@_check("integrator_order")
def _c_order():
    space = build_space(ModelParams(n_attackers=2, n_max=20))
    psi0 = initial_state(space)
    profile = PulseProfile(speed=0.5)

    def final(spu):
        cfg = IntegratorConfig(steps_per_unit_time=spu, norm_tolerance=1e-5)
        return evolve_closed(psi0, profile, cfg, sample_count=2,
                             truncation_tol=None).final_state.amplitudes

    ref = final(1600)
    e_h = float(np.linalg.norm(final(200) - ref))
    e_h2 = float(np.linalg.norm(final(400) - ref))
    ratio = e_h / e_h2
    return 12.0 <= ratio <= 20.0, \
        f"error ratio under step halving = {ratio:.2f} (expect ~16)"


@_check("closed_oracle")
def _c_closed_oracle():
    """Engine vs a product of dense matrix exponentials on a 64-dim space.

    The midpoint exponential product carries an O(h^2) sampling term of
    its own, so it is step-halved and Richardson-combined; what remains
    is far below the comparison tolerance.
    """
    space = build_space(ModelParams(n_attackers=3, n_max=15))
    psi0 = initial_state(space)
    profile = PulseProfile(speed=1.0)
    spu = 2000
    traj = evolve_closed(psi0, profile, IntegratorConfig(steps_per_unit_time=spu),
                         sample_count=2, truncation_tol=None)
    h0 = assemble_hamiltonian(space, 0.0).entries
    v = assemble_hamiltonian(space, 1.0).entries - h0

    def product(nsteps):
        h = profile.duration / nsteps
        psi = psi0.amplitudes.astype(complex)
        for s in range(nsteps):
            lam = pulse_value(profile, (s + 0.5) * h)
            w, vecs = np.linalg.eigh(h0 + lam * v)
            psi = vecs @ (np.exp(-1j * h * w) * (vecs.conj().T @ psi))
        return psi

    nsteps = int(round(profile.duration * spu))
    oracle = (4.0 * product(2 * nsteps) - product(nsteps)) / 3.0
    err = float(np.linalg.norm(traj.final_state.amplitudes - oracle))
    return err < 1e-6, f"|psi_engine - psi_expm| = {err:.2e}"


@_check("sudden_limit")
def _c_sudden():
    space = build_space(ModelParams(n_attackers=3, n_max=8))
    psi0 = initial_state(space)
    traj = evolve_closed(psi0, PulseProfile(speed=100.0), sample_count=2)
    f = fidelity(psi0, traj.final_state)
    return f > 0.99, f"fidelity at speed 100 = {f:.6f}"


@_check("adiabatic_limit")
def _c_adiabatic():
    space = build_space(ModelParams(n_attackers=1, n_max=12))
    psi0 = initial_state(space)
    cfg = IntegratorConfig(steps_per_unit_time=400)
    traj = evolve_closed(psi0, PulseProfile(speed=0.001), cfg, sample_count=2)
    f = fidelity(psi0, traj.final_state)
    return f > 0.99, f"fidelity at speed 0.001, N=1: {f:.6f}"


# ------------------------------------------------------------- open checks

@_check("unitary_limit")
def _c_unitary_limit():
    space = build_space(ModelParams(n_attackers=2, n_max=20))
    psi0 = initial_state(space)
    profile = PulseProfile(speed=0.5)
    closed = evolve_closed(psi0, profile, sample_count=9, truncation_tol=None)
    open_traj = evolve_open(density_from_state(psi0), profile, OpenParams(),
                            sample_count=9, truncation_tol=None)
    worst = 0.0
    for k in range(9):
        worst = max(worst, trace_distance(
            open_traj.density(k), density_from_state(closed.state(k))))
    return worst < 1e-6, f"max trace distance, kappa=0 vs closed: {worst:.2e}"


@_check("trace_preservation")
def _c_trace():
    _, _, trajs = _kappa_grid_runs()
    worst = max(t.trace_drift for t in trajs)
    return worst < 1e-8, f"max |trace - 1| over kappa grid = {worst:.2e}"


@_check("hermiticity_preservation")
def _c_herm_traj():
    _, _, trajs = _kappa_grid_runs()
    worst = max(t.herm_deviation for t in trajs)
    return worst < 1e-9, f"max |rho - rho^dag| over kappa grid = {worst:.2e}"


@_check("positivity_floor")
def _c_positivity():
    _, _, trajs = _kappa_grid_runs()
    worst = min(t.min_eigenvalue for t in trajs)
    return worst >= -1e-6, f"min eigenvalue over kappa grid = {worst:.2e}"


@_check("damping_monotonic")
def _c_damping():
    kappas, neg, _ = _kappa_grid_runs()
    worst = float((neg[1:] - neg[:-1]).max())
    return worst <= 1e-6, \
        f"max negativity increase between adjacent kappas = {worst:.2e}"


@_check("open_oracle")
def _c_open_oracle():
    """Engine vs one dense exponential of the vectorized generator on a
    16-dim space with the coupling held at zero (flat pulse)."""
    space = build_space(ModelParams(n_attackers=1, n_max=7))
    dim = space.dim_total
    rng = np.random.default_rng(3)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho0 = a @ a.conj().T
    rho0 /= np.trace(rho0).real
    profile = PulseProfile(speed=0.5, peak=0.0)
    kappa, nbar = 0.08, 0.3
    traj = evolve_open(DensityMatrix(space, rho0), profile,
                       OpenParams(kappa=kappa, nbar=nbar), sample_count=2,
                       truncation_tol=None)
    ham = assemble_hamiltonian(space, 0.0).entries
    low = op_boson_annihilate(space).entries
    eye = np.eye(dim)

    def dissipator(c):
        cd = c.conj().T
        return np.kron(c, c.conj()) - 0.5 * np.kron(cd @ c, eye) \
            - 0.5 * np.kron(eye, (cd @ c).T)

    liou = -1j * (np.kron(ham, eye) - np.kron(eye, ham.T)) \
        + 2.0 * kappa * (nbar + 1.0) * dissipator(low) \
        + 2.0 * kappa * nbar * dissipator(low.conj().T)
    final = expm(profile.duration * liou) @ rho0.reshape(-1)
    err = float(np.abs(traj.density(1).entries - final.reshape(dim, dim)).max())
    return err < 1e-7, f"max-entry |rho_engine - rho_expm| = {err:.2e}"


@_check("damped_cavity_decay")
def _c_damped_cavity():
    space = build_space(ModelParams(n_attackers=1, n_max=6))
    rho0 = np.zeros((space.dim_total, space.dim_total), dtype=complex)
    one = space.index_of(0, 1)
    rho0[one, one] = 1.0
    kappa = 0.2
    traj = evolve_open(DensityMatrix(space, rho0),
                       PulseProfile(speed=0.2, peak=0.0),
                       OpenParams(kappa=kappa), sample_count=11,
                       truncation_tol=None)
    worst = 0.0
    for k in range(11):
        n_t = photon_number_expectation(traj.density(k))
        worst = max(worst, abs(n_t - math.exp(-2.0 * kappa * traj.times[k])))
    return worst < 1e-5, f"max |<n> - exp(-2 kappa t)| = {worst:.2e}"


@_check("thermal_fixed_point")
def _c_thermal():
    space = build_space(ModelParams(n_attackers=1, n_max=25))
    rho0 = density_from_state(initial_state(space))
    kappa, nbar = 1.0, 0.5
    traj = evolve_open(rho0, PulseProfile(speed=0.2, peak=0.0),
                       OpenParams(kappa=kappa, nbar=nbar), sample_count=2,
                       truncation_tol=None)
    n_final = photon_number_expectation(traj.density(1))
    err = abs(n_final - nbar)
    return err < 1e-4, f"|<n>(t=10/kappa) - nbar| = {err:.2e}"


@_check("lindblad_traceless")
def _c_traceless():
    space = build_space(ModelParams(n_attackers=2, n_max=5))
    dim = space.dim_total
    rng = np.random.default_rng(5)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    rhs = lindblad_rhs(DensityMatrix(space, rho), 0.7,
                       OpenParams(kappa=0.3, nbar=0.2))
    tr = abs(float(np.trace(rhs.entries).real))
    return tr < 1e-12, f"|trace(rhs)| = {tr:.2e}"


# ------------------------------------------------------------ sweep checks

@_check("sweep_determinism")
def _c_determinism():
    text1 = _to_csv_text(_tiny_sweep(1))
    text2 = _to_csv_text(_tiny_sweep(2))
    same = text1 == text2
    return same, "1-worker and 2-worker sweeps byte-identical" if same \
        else "worker count changed the serialized output"


@_check("records_stamped")
def _c_stamped():
    records = _tiny_sweep(1)
    ok = all(r.n_max_used >= 16 and math.isfinite(r.truncation_tail)
             and math.isfinite(r.norm_drift) for r in records)
    return ok, f"{len(records)} records carry n_max_used and tail diagnostics"


@_check("failed_point_isolation")
def _c_failed_isolation():
    grid = SweepGrid(n_values=(3,), upsilon_values=np.array([0.25, 5.0]))
    records = sweep_fidelity(grid, samples=41, n_max_start=16, n_max_ceiling=16)
    shape_ok = (len(records) == 2
                and records[0].status.startswith("FAILED")
                and math.isnan(records[0].fidelity_final)
                and records[1].status == "OK"
                and math.isfinite(records[1].fidelity_final)
                and records[1].upsilon == 5.0)
    return shape_ok, \
        f"statuses = {[r.status for r in records]}, order preserved"


CHECK_NAMES = tuple(name for name, _ in _CHECKS)


def run_validation(progress=None) -> list:
    """Run every registered check; a crash inside a check counts as a
    failure of that check only."""
    results = []
    for name, fn in _CHECKS:
        try:
            passed, detail = fn()
        except Exception as exc:
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        result = CheckResult(name, bool(passed), detail)
        if progress is not None:
            progress(result)
        results.append(result)
    return results
