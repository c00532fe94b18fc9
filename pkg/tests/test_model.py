import math

import numpy as np
import pytest

from pulse_dicke import (HilbertSpace, ModelParams, PulseProfile, PulseShape,
                         assemble_hamiltonian, build_space, op_boson_annihilate,
                         op_boson_create, op_jx, op_jy, op_jz,
                         op_photon_number, parity_operator, pulse_value)


def test_pulse_envelope_knots():
    p = PulseProfile(speed=0.5)
    assert pulse_value(p, 0.0) == 0.0
    assert pulse_value(p, 2.0) == 1.0
    assert pulse_value(p, 1.0) == 0.5
    assert pulse_value(p, 5.0) == 0.0
    assert p.duration == 4.0


def test_pulse_envelope_vectorized_and_scaled():
    p = PulseProfile(speed=2.0, peak=0.7)
    t = np.array([-1.0, 0.0, 0.25, 0.5, 0.75, 1.0, 3.0])
    lam = pulse_value(p, t)
    assert np.allclose(lam, [0.0, 0.0, 0.35, 0.7, 0.35, 0.0, 0.0])


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(n_attackers=0)
    with pytest.raises(ValueError):
        ModelParams(n_attackers=2, n_max=0)
    with pytest.raises(ValueError):
        ModelParams(n_attackers=2, omega=-1.0)
    with pytest.raises(ValueError):
        PulseProfile(speed=0.0)
    with pytest.raises(ValueError):
        PulseProfile(speed=1.0, peak=-0.5)
    assert PulseProfile(speed=1.0).shape is PulseShape.TRIANGULAR


def test_space_dimensions_and_index_bijection():
    space = build_space(ModelParams(n_attackers=3, n_max=10))
    assert space.dim_total == 44
    assert build_space(ModelParams(n_attackers=1, n_max=1)).dim_total == 4
    for m in range(space.dim_spin):
        for n in range(space.dim_boson):
            assert space.split_index(space.index_of(m, n)) == (m, n)
    assert isinstance(space, HilbertSpace)
    assert np.allclose(space.m_values(), [-1.5, -0.5, 0.5, 1.5])


def test_boson_ladder_elements():
    space = build_space(ModelParams(n_attackers=1, n_max=4))
    a = op_boson_annihilate(space).entries
    zero_one = space.index_of(0, 0), space.index_of(0, 1)
    one_two = space.index_of(0, 1), space.index_of(0, 2)
    assert a[zero_one] == 1.0
    assert abs(a[one_two] - math.sqrt(2.0)) < 1e-15
    vac = np.zeros(space.dim_total)
    vac[space.index_of(0, 0)] = 1.0
    assert np.all(a @ vac == 0.0)
    ad = op_boson_create(space).entries
    assert np.array_equal(ad, a.conj().T)
    num = op_photon_number(space).entries
    assert np.allclose(num.diagonal().real[:5], [0, 1, 2, 3, 4])


def test_collective_spin_operators():
    space = build_space(ModelParams(n_attackers=2, n_max=2))
    jz = op_jz(space).entries
    m_eigs = sorted(set(np.round(jz.diagonal().real, 12)))
    assert m_eigs == [-1.0, 0.0, 1.0]
    jx = op_jx(space).entries
    elem = jx[space.index_of(1, 0), space.index_of(0, 0)]
    assert abs(elem - math.sqrt(2.0) / 2.0) < 1e-12
    jy = op_jy(space).entries
    comm = jz @ jx - jx @ jz
    assert np.abs(comm - 1j * jy).max() < 1e-12


def test_hamiltonian_decoupled_diagonal():
    space = build_space(ModelParams(n_attackers=2, n_max=3))
    h0 = assemble_hamiltonian(space, 0.0).entries
    assert np.abs(h0 - np.diag(h0.diagonal())).max() == 0.0
    assert h0[space.index_of(0, 0), space.index_of(0, 0)].real == -1.0


def test_hamiltonian_coupling_element():
    space = build_space(ModelParams(n_attackers=2, n_max=3))
    h = assemble_hamiltonian(space, 0.3).entries
    elem = h[space.index_of(1, 1), space.index_of(0, 0)]
    assert abs(elem - 0.3) < 1e-15


def test_hamiltonian_diagonal_independent_of_lambda():
    space = build_space(ModelParams(n_attackers=3, n_max=6))
    h0 = assemble_hamiltonian(space, 0.0).entries
    for lam in (0.2, 0.9):
        h = assemble_hamiltonian(space, lam).entries
        assert np.array_equal(h.diagonal(), h0.diagonal())
        assert np.abs(h - h.conj().T).max() < 1e-12


def test_parity_squares_to_identity_and_commutes():
    space = build_space(ModelParams(n_attackers=3, n_max=6))
    p = parity_operator(space).entries
    assert np.array_equal(p @ p, np.eye(space.dim_total))
    h = assemble_hamiltonian(space, 0.6).entries
    assert np.abs(h @ p - p @ h).max() < 1e-10
