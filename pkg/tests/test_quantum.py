from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chordwalk.quantum import (
    bloch_to_density,
    density_to_bloch,
    is_ppt,
    min_eigenvalue,
    partial_transpose,
    random_hs_density,
    su_generators,
)

PAULI = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]
BELL = np.zeros((4, 4), dtype=complex)
BELL[np.ix_([0, 3], [0, 3])] = 0.5


@pytest.mark.parametrize("N", range(2, 7))
def test_generators_orthonormal_and_traceless(N):
    basis = su_generators(N)
    G = basis.generators
    assert G.shape == (N * N - 1, N, N)
    assert np.allclose(G, np.conj(np.swapaxes(G, 1, 2)), atol=1e-12)
    assert np.max(np.abs(np.trace(G, axis1=1, axis2=2))) < 1e-12
    assert np.max(np.abs(basis.gram() - np.eye(N * N - 1))) < 1e-12


def test_su2_is_scaled_pauli():
    G = su_generators(2).generators
    for g, s in zip(G, PAULI):
        assert np.allclose(g, s / math.sqrt(2), atol=1e-15)


def test_su3_has_eight_traceless_generators():
    G = su_generators(3).generators
    assert len(G) == 8
    assert all(abs(np.trace(g)) < 1e-12 for g in G)


def test_generators_read_only():
    G = su_generators(3).generators
    with pytest.raises(ValueError):
        G[0, 0, 0] = 1.0


@pytest.mark.parametrize("N", [2, 3, 4])
def test_zero_bloch_vector_is_maximally_mixed(N):
    basis = su_generators(N)
    rho = bloch_to_density(np.zeros(N * N - 1), basis)
    assert np.allclose(rho, np.eye(N) / N, atol=1e-15)
    assert np.allclose(density_to_bloch(np.eye(N) / N, basis), 0.0, atol=1e-15)


def test_pure_state_bloch_vector():
    basis = su_generators(2)
    tau = np.array([0.0, 0.0, 1 / math.sqrt(2)])
    assert np.allclose(bloch_to_density(tau, basis), np.diag([1.0, 0.0]), atol=1e-15)
    assert np.allclose(density_to_bloch(np.diag([1.0, 0.0]).astype(complex), basis), tau, atol=1e-15)


def test_bloch_dimension_mismatch():
    with pytest.raises(ValueError):
        bloch_to_density(np.zeros(4), su_generators(2))


def test_density_to_bloch_rejects_non_hermitian():
    with pytest.raises(ValueError):
        density_to_bloch(np.array([[0.5, 1.0], [0.0, 0.5]]), su_generators(2))


@settings(max_examples=50, deadline=None)
@given(N=st.integers(2, 5), seed=st.integers(0, 2**32 - 1))
def test_bloch_round_trip(N, seed):
    basis = su_generators(N)
    tau = np.random.default_rng(seed).standard_normal(N * N - 1)
    back = density_to_bloch(bloch_to_density(tau, basis), basis)
    assert np.max(np.abs(back - tau)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(N=st.integers(2, 5), seed=st.integers(0, 2**32 - 1))
def test_bloch_norm_is_purity_excess(N, seed):
    rho = random_hs_density(N, np.random.default_rng(seed))
    tau = density_to_bloch(rho, su_generators(N))
    purity = np.trace(rho @ rho).real
    assert abs(tau @ tau - (purity - 1 / N)) < 1e-12
    # positive states lie in the ball of radius sqrt((N-1)/N)
    assert math.sqrt(tau @ tau) <= math.sqrt((N - 1) / N) + 1e-12


@pytest.mark.parametrize("N", [2, 3, 4])
def test_pure_states_saturate_bloch_radius(N, rng):
    psi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    psi /= np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    tau = density_to_bloch(rho, su_generators(N))
    R = math.sqrt((N - 1) / N)
    assert abs(math.sqrt(tau @ tau) - R) < 1e-9
    assert abs(np.trace(rho @ rho).real - 1.0) < 1e-9


def test_min_eigenvalue_examples():
    assert min_eigenvalue(np.eye(4)) == pytest.approx(1.0, abs=1e-14)
    assert min_eigenvalue(np.diag([3.0, -2.0, 0.0])) == pytest.approx(-2.0, abs=1e-14)
    assert min_eigenvalue(partial_transpose(BELL, 2)) == pytest.approx(-0.5, abs=1e-12)


def test_min_eigenvalue_rejects_non_hermitian():
    with pytest.raises(ValueError):
        min_eigenvalue(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_min_eigenvalue_stack():
    H = np.stack([np.eye(2), np.diag([1.0, -1.0])])
    assert np.allclose(min_eigenvalue(H), [1.0, -1.0])


def test_partial_transpose_index_convention(rng):
    rho = random_hs_density(9, rng)
    pt = partial_transpose(rho, 3)
    r4 = rho.reshape(3, 3, 3, 3)
    p4 = pt.reshape(3, 3, 3, 3)
    for a, b, c, d in np.ndindex(3, 3, 3, 3):
        assert p4[a, b, c, d] == r4[a, d, c, b]


def test_partial_transpose_of_product_state(rng):
    ra = random_hs_density(2, rng)
    rb = random_hs_density(2, rng)
    pt = partial_transpose(np.kron(ra, rb), 2)
    assert np.allclose(pt, np.kron(ra, rb.T), atol=1e-15)
    assert min_eigenvalue(pt) >= -1e-12
    assert is_ppt(np.kron(ra, rb), 2)


@settings(max_examples=30, deadline=None)
@given(K=st.integers(2, 3), seed=st.integers(0, 2**32 - 1))
def test_partial_transpose_involution_trace_hermitian(K, seed):
    rho = random_hs_density(K * K, np.random.default_rng(seed))
    pt = partial_transpose(rho, K)
    assert np.array_equal(partial_transpose(pt, K), rho)
    assert abs(np.trace(pt) - np.trace(rho)) < 1e-12
    assert np.allclose(pt, pt.conj().T, atol=1e-15)


def test_partial_transpose_requires_square_dimension():
    with pytest.raises(ValueError):
        partial_transpose(np.eye(5) / 5, 2)


def test_is_ppt_examples():
    assert is_ppt(np.eye(4) / 4, 2)
    assert not is_ppt(BELL, 2)


def test_random_hs_density_is_a_state(rng):
    R = random_hs_density(3, rng, size=10)
    assert R.shape == (10, 3, 3)
    assert np.allclose(np.trace(R, axis1=1, axis2=2), 1.0, atol=1e-12)
    assert np.all(min_eigenvalue(R) > -1e-12)
