"""Numba inner loops for the integrators.

The Hamiltonian couples |m, n> only to |m +- 1, n +- 1| on top of a
diagonal, so applying it costs O(dim) on state vectors and O(dim^2) on
density matrices instead of dense matrix products.  Everything here is
plain IEEE arithmetic in a fixed order, so results are bit-reproducible
across runs and process counts.

Conventions shared with model.py: psi and rho are indexed by the flat
label i*db + n (spin index i slow, boson index n fast); e is the diagonal
energy, jx_sub the J_x subdiagonal, x_sub = sqrt(1..n_max), and lam_coup
the full prefactor 2*lam/sqrt(N) of (a + a+) J_x.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def apply_h(e_diag, jx_sub, x_sub, lam_coup, psi, out):
    """out = H psi on the (ds, db) grid."""
    ds, db = psi.shape
    for i in range(ds):
        for n in range(db):
            acc = e_diag[i, n] * psi[i, n]
            if i > 0:
                w = jx_sub[i - 1]
                if n > 0:
                    acc += lam_coup * w * x_sub[n - 1] * psi[i - 1, n - 1]
                if n < db - 1:
                    acc += lam_coup * w * x_sub[n] * psi[i - 1, n + 1]
            if i < ds - 1:
                w = jx_sub[i]
                if n > 0:
                    acc += lam_coup * w * x_sub[n - 1] * psi[i + 1, n - 1]
                if n < db - 1:
                    acc += lam_coup * w * x_sub[n] * psi[i + 1, n + 1]
            out[i, n] = acc


@njit(cache=True)
def rk4_closed(e_diag, jx_sub, x_sub, coup, psi, h, lam_start, lam_mid,
               snap_every, snaps):
    """Classical fixed-step RK4 for i dpsi/dt = H(lam(t)) psi, in place.

    lam_start holds lam at the step starts (length nsteps+1), lam_mid at
    the step midpoints (length nsteps).  Snapshots of psi are stored into
    snaps every snap_every steps, including the initial state, so snaps
    must have shape (nsteps/snap_every + 1, ds, db).
    """
    nsteps = lam_mid.shape[0]
    ds, db = psi.shape
    k1 = np.empty((ds, db), np.complex128)
    k2 = np.empty((ds, db), np.complex128)
    k3 = np.empty((ds, db), np.complex128)
    k4 = np.empty((ds, db), np.complex128)
    y = np.empty((ds, db), np.complex128)
    isnap = 0
    for i in range(ds):
        for n in range(db):
            snaps[isnap, i, n] = psi[i, n]
    for s in range(nsteps):
        apply_h(e_diag, jx_sub, x_sub, coup * lam_start[s], psi, k1)
        for i in range(ds):
            for n in range(db):
                y[i, n] = psi[i, n] + (-0.5j * h) * k1[i, n]
        apply_h(e_diag, jx_sub, x_sub, coup * lam_mid[s], y, k2)
        for i in range(ds):
            for n in range(db):
                y[i, n] = psi[i, n] + (-0.5j * h) * k2[i, n]
        apply_h(e_diag, jx_sub, x_sub, coup * lam_mid[s], y, k3)
        for i in range(ds):
            for n in range(db):
                y[i, n] = psi[i, n] + (-1j * h) * k3[i, n]
        apply_h(e_diag, jx_sub, x_sub, coup * lam_start[s + 1], y, k4)
        for i in range(ds):
            for n in range(db):
                psi[i, n] += (-1j * h / 6.0) * (k1[i, n] + 2.0 * k2[i, n]
                                                + 2.0 * k3[i, n] + k4[i, n])
        if (s + 1) % snap_every == 0:
            isnap += 1
            for i in range(ds):
                for n in range(db):
                    snaps[isnap, i, n] = psi[i, n]


@njit(cache=True)
def lindblad_rhs_kernel(e_flat, jx_sub, x_sub, lam_coup, g1, g2, rho, out):
    """out = -i[H, rho] + g1 D[a] rho + g2 D[a+] rho, structured stencil.

    g1 = 2 kappa (nbar + 1), g2 = 2 kappa nbar, D[O] rho = O rho O+
    - (O+O rho + rho O+O)/2.  The truncated product a a+ has a zero at the
    top Fock level and the stencil honors that, matching the dense
    truncated operators exactly.
    """
    ds = jx_sub.shape[0] + 1
    db = x_sub.shape[0] + 1
    for i in range(ds):
        for n in range(db):
            r = i * db + n
            for ip in range(ds):
                for npp in range(db):
                    c = ip * db + npp
                    hp = e_flat[r] * rho[r, c]
                    if i > 0:
                        w = jx_sub[i - 1]
                        if n > 0:
                            hp += lam_coup * w * x_sub[n - 1] * rho[r - db - 1, c]
                        if n < db - 1:
                            hp += lam_coup * w * x_sub[n] * rho[r - db + 1, c]
                    if i < ds - 1:
                        w = jx_sub[i]
                        if n > 0:
                            hp += lam_coup * w * x_sub[n - 1] * rho[r + db - 1, c]
                        if n < db - 1:
                            hp += lam_coup * w * x_sub[n] * rho[r + db + 1, c]
                    ph = e_flat[c] * rho[r, c]
                    if ip > 0:
                        w = jx_sub[ip - 1]
                        if npp > 0:
                            ph += lam_coup * w * x_sub[npp - 1] * rho[r, c - db - 1]
                        if npp < db - 1:
                            ph += lam_coup * w * x_sub[npp] * rho[r, c - db + 1]
                    if ip < ds - 1:
                        w = jx_sub[ip]
                        if npp > 0:
                            ph += lam_coup * w * x_sub[npp - 1] * rho[r, c + db - 1]
                        if npp < db - 1:
                            ph += lam_coup * w * x_sub[npp] * rho[r, c + db + 1]
                    acc = -1j * (hp - ph)
                    if g1 != 0.0:
                        if n < db - 1 and npp < db - 1:
                            acc += g1 * x_sub[n] * x_sub[npp] * rho[r + 1, c + 1]
                        acc -= g1 * 0.5 * (n + npp) * rho[r, c]
                    if g2 != 0.0:
                        if n > 0 and npp > 0:
                            acc += g2 * x_sub[n - 1] * x_sub[npp - 1] * rho[r - 1, c - 1]
                        aad_r = n + 1.0 if n < db - 1 else 0.0
                        aad_c = npp + 1.0 if npp < db - 1 else 0.0
                        acc -= g2 * 0.5 * (aad_r + aad_c) * rho[r, c]
                    out[r, c] = acc


@njit(cache=True)
def rk4_open_step(e_flat, jx_sub, x_sub, coup, g1, g2, rho, h,
                  lam0, lam_half, lam1, k1, k2, k3, k4, tmp):
    """One RK4 step of the master equation, rho updated in place.

    k1..k4 and tmp are caller-provided (dim, dim) scratch arrays so the
    step loop allocates nothing.
    """
    dim = rho.shape[0]
    lindblad_rhs_kernel(e_flat, jx_sub, x_sub, coup * lam0, g1, g2, rho, k1)
    for r in range(dim):
        for c in range(dim):
            tmp[r, c] = rho[r, c] + 0.5 * h * k1[r, c]
    lindblad_rhs_kernel(e_flat, jx_sub, x_sub, coup * lam_half, g1, g2, tmp, k2)
    for r in range(dim):
        for c in range(dim):
            tmp[r, c] = rho[r, c] + 0.5 * h * k2[r, c]
    lindblad_rhs_kernel(e_flat, jx_sub, x_sub, coup * lam_half, g1, g2, tmp, k3)
    for r in range(dim):
        for c in range(dim):
            tmp[r, c] = rho[r, c] + h * k3[r, c]
    lindblad_rhs_kernel(e_flat, jx_sub, x_sub, coup * lam1, g1, g2, tmp, k4)
    for r in range(dim):
        for c in range(dim):
            rho[r, c] += (h / 6.0) * (k1[r, c] + 2.0 * k2[r, c]
                                      + 2.0 * k3[r, c] + k4[r, c])
