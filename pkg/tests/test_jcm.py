import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fieldrecycle.fock import FieldDensity, coherent_state, moments, number_state
from fieldrecycle.jcm import (JointState, build_blocks, evolve_joint, evolve_joint_density,
                              product_density, trace_out_atom, trace_out_field)
from fieldrecycle.optimal import PulseSpec, phi_theta

import oracles

G = np.array([1, 0], complex)
E = np.array([0, 1], complex)


def _interior(U, D):
    keep = np.r_[0:2 * D - 1]  # drop the |e, D-1> column, the truncation boundary
    return U[:, keep]


def test_block_formulas():
    b = build_blocks(0.37, 12)
    n = np.arange(12)
    assert np.allclose(b.u_gg, np.cos(0.37 * np.sqrt(n)))
    assert np.allclose(b.u_ee, np.cos(0.37 * np.sqrt(n + 1)))
    assert b.Uge.dense()[3, 2] == pytest.approx(-1j * math.sin(0.37 * math.sqrt(3)))
    assert b.Ueg.dense()[2, 3] == pytest.approx(-1j * math.sin(0.37 * math.sqrt(3)))


def test_zero_pulse_is_identity():
    b = build_blocks(0.0, 8)
    assert np.allclose(b.joint_unitary(), np.eye(16))


def test_one_photon_rabi():
    b = build_blocks(math.pi / 2, 4)
    U = b.joint_unitary()
    D = 4
    assert U[D + 0, 1] == pytest.approx(-1j)
    assert U[1, 1] == pytest.approx(0, abs=1e-16)


def test_matches_hamiltonian_exponential():
    D = 40
    U = build_blocks(0.37, D).joint_unitary()
    ref = oracles.jcm_unitary_expm(0.37, D)
    assert np.max(np.abs(_interior(U - ref, D))) < 1e-10


@given(st.floats(0.01, math.pi - 0.01))
@settings(max_examples=20, deadline=None)
def test_unitary_away_from_top(gt):
    D = 64
    U = _interior(build_blocks(gt, D).joint_unitary(), D)
    assert np.max(np.abs(U.conj().T @ U - np.eye(2 * D - 1))) < 1e-10


def test_selection_rule_structure():
    D = 10
    U = build_blocks(0.8, D).joint_unitary()
    for i in range(2 * D):
        for j in range(2 * D):
            gi, ni = divmod(i, D)
            gj, nj = divmod(j, D)
            # excitation number: photons + (1 if excited)
            if ni + gi != nj + gj:
                assert U[i, j] == 0


def test_evolve_joint_against_expm_random():
    rng = np.random.default_rng(11)
    D = 30
    for _ in range(20):
        gt = rng.uniform(0, math.pi)
        v = rng.normal(size=2 * D) + 1j * rng.normal(size=2 * D)
        v[D - 1] = v[2 * D - 1] = 0
        v /= np.linalg.norm(v)
        psi = JointState(v[:D], v[D:])
        out = evolve_joint(build_blocks(gt, D), psi).vector
        ref = oracles.jcm_unitary_expm(gt, D) @ v
        assert np.max(np.abs(out - ref)) < 1e-9


def test_identity_blocks_leave_states():
    b = build_blocks(0.0, 6)
    psi = JointState.product(G, coherent_state(0.5, 6, tail_tol=1e-3))
    assert np.allclose(evolve_joint(b, psi).vector, psi.vector)
    rho = psi.density()
    assert np.allclose(evolve_joint_density(b, rho), rho)


def test_ground_vacuum_is_dark():
    for gt in (0.2, 1.3, 2.9):
        psi = JointState.product(G, number_state(0, 5))
        assert np.allclose(evolve_joint(build_blocks(gt, 5), psi).vector, psi.vector)


def test_pi_pulse_excites_atom():
    D = 120
    b = build_blocks(math.pi / (2 * 5), D)
    out = evolve_joint(b, JointState.product(G, coherent_state(5, D)))
    p_e = np.linalg.norm(out.e_block) ** 2
    assert 0.95 < p_e < 1
    assert out.norm() == pytest.approx(1, abs=1e-10)


def test_density_evolution_consistent_with_pure():
    D = 40
    b = build_blocks(0.6, D)
    psi = JointState.product(np.array([0.6, 0.8j]), coherent_state(2, D))
    out = evolve_joint_density(b, psi.density())
    v = evolve_joint(b, psi)
    assert np.allclose(out, v.density(), atol=1e-14)
    assert np.max(np.abs(out - out.conj().T)) < 1e-12
    assert abs(np.trace(out) - 1) < 1e-12


def test_fixed_point_stays_product():
    spec = PulseSpec.for_rotation(math.pi, 25)
    phi = phi_theta(spec)
    b = spec.blocks(phi.D)
    v1 = np.array([1, 1j]) / math.sqrt(2)
    v1p = np.array([1, -1j]) / math.sqrt(2)
    out = evolve_joint_density(b, product_density(phi, np.outer(v1, v1.conj())))
    expected = product_density(phi, np.outer(v1p, v1p.conj()))
    assert np.max(np.abs(out - expected)) < 1e-12


def test_partial_traces():
    field = coherent_state(1.5, 30)
    atom = np.array([[0.3, 0.1j], [-0.1j, 0.7]])
    joint = product_density(field, atom)
    assert np.allclose(trace_out_field(joint), atom)
    assert np.allclose(trace_out_atom(joint).mat, field.projector().mat)
    # (|g,n> + |e,n-1>)/sqrt(2) leaves the atom maximally mixed
    D, n = 8, 3
    v = np.zeros(2 * D, complex)
    v[n] = v[D + n - 1] = 1 / math.sqrt(2)
    assert np.allclose(trace_out_field(np.outer(v, v.conj())), np.eye(2) / 2)


def test_post_atom_field_mean():
    D = 108
    b = build_blocks(math.pi / 10, D)
    joint = evolve_joint_density(b, product_density(coherent_state(5, D), np.diag([1, 0])))
    rho = trace_out_atom(joint)
    assert isinstance(rho, FieldDensity)
    assert moments(rho).mean_n == pytest.approx(24, abs=0.1)
    assert abs(np.trace(trace_out_field(joint)) - 1) < 1e-12
