"""The same attack through a leaky cavity.

Photon loss at rate kappa bleeds away the qubit-cavity entanglement the
pulse creates.  We propagate the master equation for a few damping rates
and compare the negativity (an entanglement monotone that survives mixed
states) at the end of the pulse.  More attackers hold entanglement longer.
"""

import numpy as np

from pulse_dicke import IntegratorConfig, negativity_trace

config = IntegratorConfig(steps_per_unit_time=400)
kappas = (0.0, 0.05, 0.1)

# the N = 11 run propagates a 588 x 588 density matrix; expect a few minutes
for n, n_max in ((5, 32), (11, 48)):
    trace = negativity_trace(n, 0.25, kappa_values=kappas, samples=21,
                             config=config, n_max=n_max, workers=1)
    # rows: (kappa, t, lam, negativity, log_negativity, purity, trace)
    rows = trace.rows.reshape(len(kappas), -1, 7)
    lossless = rows[0, -1, 3]
    print(f"N = {n}: end-of-pulse negativity (lossless {lossless:.4f})")
    for k, kap in enumerate(kappas):
        final = rows[k, -1, 3]
        kept = final / lossless if lossless > 0 else 0.0
        print(f"  kappa = {kap:5.2f}  negativity {final:.4f}  "
              f"({kept:.1%} retained), purity {rows[k, -1, 5]:.4f}")
    print()

print("Negativity falls monotonically with kappa, but the fraction kept at")
print("a given kappa grows with the number of attackers: larger groups are")
print("harder to decohere mid-attack.")
