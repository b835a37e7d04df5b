import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from neutrino_trotter.errors import NumericalContractError, ParameterError
from neutrino_trotter.quantum_core import (
    HermitianPropagator,
    apply_local,
    basis_state,
    check_unitary,
    embed,
    expect_z,
    expm_hermitian,
    inversion_probability,
    normalized,
    num_qubits,
    permutation_operator,
    spectral_norm,
    swap_index_map,
    z_expectations,
)

import oracles


def random_hermitian(rng, dim):
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (A + A.conj().T) / 2


def random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_basis_state_big_endian():
    v = basis_state("0011")
    assert v[3] == 1 and np.count_nonzero(v) == 1


@pytest.mark.parametrize("bad", ["", "012", "ab", None, 5])
def test_basis_state_rejects_malformed(bad):
    with pytest.raises(ParameterError):
        basis_state(bad)


def test_num_qubits():
    assert num_qubits(16) == 4
    with pytest.raises(ParameterError):
        num_qubits(12)


def test_normalized():
    np.testing.assert_allclose(np.linalg.norm(normalized([3, 4])), 1.0)
    with pytest.raises(ParameterError):
        normalized([0, 0])


@pytest.mark.parametrize("targets", [(0,), (2,), (0, 1), (2, 0), (1, 3), (3, 2)])
def test_embed_matches_kronecker(targets):
    rng = np.random.default_rng(len(targets) + sum(targets))
    n = 4
    if len(targets) == 1:
        m = random_unitary(rng, 2)
        ref = oracles.kron_site(m, targets[0], n)
    else:
        a, b = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
        m = np.kron(a, b)
        ref = oracles.kron_pair(a, targets[0], b, targets[1], n)
    np.testing.assert_allclose(embed(m, targets, n), ref, atol=1e-14)


def test_apply_local_on_state_and_operator_agree():
    rng = np.random.default_rng(3)
    m = random_unitary(rng, 4)
    psi = rng.standard_normal(8) + 0j
    full = embed(m, (2, 0), 3)
    np.testing.assert_allclose(apply_local(psi, m, (2, 0), 3), full @ psi, atol=1e-14)


def test_swap_index_map_matches_swap_operator():
    n = 4
    rng = np.random.default_rng(0)
    v = rng.standard_normal(16)
    swap = sum(oracles.kron_pair(P, 1, P, 3, n) for P in (oracles.I2, oracles.SX, oracles.SY, oracles.SZ)) / 2
    np.testing.assert_allclose(v[swap_index_map(1, 3, n)], (swap @ v).real, atol=1e-14)


def test_permutation_operator_moves_qubits():
    P = permutation_operator((1, 2, 0), 3)
    np.testing.assert_allclose(P @ basis_state("100"), basis_state("010"))
    with pytest.raises(ParameterError):
        permutation_operator((0, 0, 1), 3)


@given(st.integers(1, 4), st.floats(-20, 20), st.integers(0, 2**31 - 1))
@settings(max_examples=30, deadline=None)
def test_propagator_matches_pade_expm(n, t, seed):
    H = random_hermitian(np.random.default_rng(seed), 2**n)
    U = expm_hermitian(H, t)
    np.testing.assert_allclose(U, expm(-1j * t * H), atol=1e-10)
    check_unitary(U)


def test_propagator_group_property_and_apply():
    rng = np.random.default_rng(5)
    prop = HermitianPropagator(random_hermitian(rng, 8))
    np.testing.assert_allclose(prop.unitary(1.3) @ prop.unitary(0.7), prop.unitary(2.0), atol=1e-12)
    psi = normalized(rng.standard_normal(8))
    np.testing.assert_allclose(prop.apply(psi, 2.0), prop.unitary(2.0) @ psi, atol=1e-12)


def test_non_hermitian_generator_rejected():
    with pytest.raises(NumericalContractError):
        expm_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


def test_check_unitary_rejects():
    with pytest.raises(NumericalContractError):
        check_unitary(np.diag([1.0, 2.0]))


def test_z_expectations_against_oracle():
    rng = np.random.default_rng(9)
    psi = normalized(rng.standard_normal(16) + 1j * rng.standard_normal(16))
    z = z_expectations(psi)
    for i in range(4):
        assert z[i] == pytest.approx(oracles.z_mean(psi, i, 4), abs=1e-13)
        assert expect_z(psi, i) == pytest.approx(z[i])
    np.testing.assert_array_equal(z_expectations(basis_state("0011")), [1, 1, -1, -1])


def test_inversion_probability():
    np.testing.assert_allclose(inversion_probability([1, -1], [-1, 0]), [1.0, 0.5])


@pytest.mark.parametrize("dim", [4, 64, 300])
@pytest.mark.parametrize("method", ["auto", "svd", "power"])
def test_spectral_norm_matches_svd(dim, method):
    rng = np.random.default_rng(dim)
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    assert spectral_norm(M, method=method) == pytest.approx(oracles.opnorm(M), rel=1e-8)


def test_spectral_norm_of_unitary_difference():
    rng = np.random.default_rng(1)
    U = random_unitary(rng, 16)
    assert spectral_norm(U) == pytest.approx(1.0, abs=1e-12)
    assert spectral_norm(U - U) == 0.0
    assert spectral_norm(2 * U, method="power") == pytest.approx(2.0, rel=1e-9)


def test_spectral_norm_bad_method():
    with pytest.raises(ParameterError):
        spectral_norm(np.eye(2), method="frobenius")
