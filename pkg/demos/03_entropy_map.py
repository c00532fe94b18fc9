"""How much entanglement does a pulse create, and when?

For each pulse speed we record the qubit-cavity entanglement entropy along
the trajectory and keep the running maximum.  The entropy can never exceed
ln of the smaller subsystem dimension, ln(N+1) for N qubits against a big
cavity, and the most destructive speeds are also the most entangling.
"""

import numpy as np

from pulse_dicke import entropy_map

n = 3
speeds = np.logspace(np.log10(0.1), np.log10(2.0), 8)
table = entropy_map(n, speeds, samples_per_trajectory=41, workers=1)

cap = np.log(n + 1)
print(f"N = {n}, entropy cap ln(N+1) = {cap:.4f}\n")
print(f"{'upsilon':>9} {'peak entropy':>13}  ")
for u, s in zip(table.upsilon_values, table.per_upsilon_max):
    bar = "#" * int(50 * s / cap)
    print(f"{u:9.4f} {s:13.5f}  {bar}")

k = int(np.argmax(table.per_upsilon_max))
print(f"\nmost entangling speed on this grid: upsilon = "
      f"{table.upsilon_values[k]:.4f} "
      f"({table.per_upsilon_max[k] / cap:.0%} of the cap)")

# the full map also carries the time axis: rows are (upsilon, t, lam, entropy)
rows = table.rows
at_best = rows[rows[:, 0] == table.upsilon_values[k]]
print("\nentropy along that trajectory:")
for t, s in zip(at_best[:, 1][::8], at_best[:, 3][::8]):
    print(f"  t = {t:6.2f}  S = {s:.5f}")
