"""A single coordinated pulse, start to finish.

Three attacking qubits share a cavity mode.  Everything starts in the
ground state |m = -N/2, n = 0>.  The attackers ramp their coupling up to
lam = 1 and back down again (a triangular pulse of speed upsilon), and we
watch what the pulse does to the survival probability of the initial
state and to the qubit-cavity entanglement entropy.
"""

import numpy as np

from pulse_dicke import (ModelParams, PulseProfile, build_space,
                         evolve_closed, fidelity, initial_state,
                         qubit_entropy_series)

params = ModelParams(n_attackers=3, n_max=40)
space = build_space(params)
psi0 = initial_state(space)
print(f"Hilbert space: {space.dim_spin} spin levels x {space.dim_boson} "
      f"Fock levels = {space.dim_total} states")

# upsilon near the critical speed; the pulse lasts 2/upsilon time units
profile = PulseProfile(speed=0.25)
traj = evolve_closed(psi0, profile, sample_count=17)

print(f"pulse duration {traj.times[-1]:g}, norm drift {traj.norm_drift:.2e}, "
      f"Fock tail {traj.truncation_tail:.2e}")
print()
print(f"{'t':>7} {'lam(t)':>7} {'fidelity':>10} {'entropy':>9}")
entropy = qubit_entropy_series(traj)
for k in range(len(traj)):
    f = fidelity(psi0, traj.state(k))
    print(f"{traj.times[k]:7.2f} {traj.lambdas[k]:7.3f} {f:10.6f} "
          f"{entropy[k]:9.5f}")

print()
print("The pulse returns to lam = 0 but the state does not return: at this")
print("speed the attackers leave the register nearly orthogonal to where")
print(f"it started (final fidelity {fidelity(psi0, traj.state(-1)):.2e}).")
