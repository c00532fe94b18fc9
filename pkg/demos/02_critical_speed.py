"""Scanning pulse speed for the fidelity dip, then refining it.

Slow pulses are adiabatic (the state follows and comes back), fast pulses
are sudden (the state never moves).  In between sits a critical speed
upsilon* where the attack is most destructive.  A coarse logarithmic scan
shows the dip; find_ustar brackets and refines it.
"""

import numpy as np

from pulse_dicke import (IntegratorConfig, SweepGrid, find_ustar,
                         sweep_fidelity)

config = IntegratorConfig(steps_per_unit_time=2000)

speeds = np.logspace(np.log10(0.1), np.log10(2.0), 9)
grid = SweepGrid(n_values=(3,), upsilon_values=speeds)
print("coarse scan, N = 3")
records = sweep_fidelity(grid, config, samples=41, workers=1)

print(f"{'upsilon':>9} {'fidelity':>11}  ")
for r in records:
    bar = "#" * int(40 * r.fidelity_final)
    print(f"{r.upsilon:9.4f} {r.fidelity_final:11.3e}  {bar}")

best = min(records, key=lambda r: r.fidelity_final)
print(f"\ncoarse minimum at upsilon = {best.upsilon:.4f}")

result = find_ustar(3, (0.1, 0.6), refine_tol=1e-2, config=config,
                    coarse_points=9)
print(f"refined:  upsilon* = {result.upsilon_star:.4f}, "
      f"fidelity {result.fidelity_min:.3e} (n_max {result.n_max_used})")
print("\nAt upsilon* the pulse drives the register into a state essentially")
print("orthogonal to the initial one, a complete erasure of the stored state.")
