import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from neutrino_trotter.errors import CapacityError, ParameterError
from neutrino_trotter.evolution import (
    FIRST_ORDER,
    SECOND_ORDER,
    SYMMETRIZED_PAIR,
    TrotterScheme,
    evolve_exact,
    evolve_multistep,
    exact_trajectory,
    full_step,
    one_body_step,
    pair_propagator,
    symmetrized_pair_step,
    trotter1_step,
    trotter2_step,
    two_body_error,
)
from neutrino_trotter.model import CouplingModel, build_hamiltonian
from neutrino_trotter.ordering import optimal_ordering_n4, sorted_ordering
from neutrino_trotter.quantum_core import basis_state, z_expectations

import oracles


@given(st.integers(2, 4), st.floats(-10, 10), st.floats(0.01, 2.0))
@settings(max_examples=25, deadline=None)
def test_pair_propagator_matches_expm(n, dt, coupling):
    J = np.full((n, n), coupling)
    i, j = 0, n - 1
    ref = oracles.pair_unitary(i, j, dt, coupling, n)
    np.testing.assert_allclose(pair_propagator(i, j, dt, J, n), ref, atol=1e-12)


def test_pair_propagator_rejects_diagonal():
    with pytest.raises(ParameterError):
        pair_propagator(1, 1, 0.1, np.ones((3, 3)), 3)


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("dt", [0.3, 4.0])
def test_first_order_product_convention(n, dt):
    J = oracles.couplings(n)
    o = sorted_ordering(n).reversed()
    np.testing.assert_allclose(trotter1_step(dt, o, J, n), oracles.product_formula(o.pairs, dt, J, n), atol=1e-12)


def test_second_order_is_palindrome():
    n, dt = 4, 2.5
    J = oracles.couplings(n)
    o = optimal_ordering_n4()
    ref = oracles.product_formula(list(o.pairs) + list(o.pairs[::-1]), dt / 2, J, n)
    np.testing.assert_allclose(trotter2_step(dt, o, J, n), ref, atol=1e-12)


def test_one_body_step_matches_expm():
    n, dt = 3, 1.7
    b = oracles.b_vector(n)
    np.testing.assert_allclose(one_body_step(dt, b, n), expm(-1j * dt * oracles.h_one(b, n)), atol=1e-12)


def test_symmetrized_pair_step_matches_oracle():
    n, dt = 4, 0.9
    J, b = oracles.couplings(n), oracles.b_vector(n)
    o = sorted_ordering(n)
    U = np.eye(16, dtype=complex)
    for i, j in o.pairs:
        h = J[i, j] * oracles.h_pair(i, j, n)
        for a, P in enumerate((oracles.SX, oracles.SY, oracles.SZ)):
            h = h + b[a] / (n - 1) * (oracles.kron_site(P, i, n) + oracles.kron_site(P, j, n))
        U = expm(-1j * dt * h) @ U
    np.testing.assert_allclose(symmetrized_pair_step(dt, o, J, b, n), U, atol=1e-12)


def test_symmetrized_needs_two_neutrinos():
    with pytest.raises(ParameterError):
        symmetrized_pair_step(0.1, sorted_ordering(1), np.zeros((1, 1)), np.zeros(3), 1)


@pytest.mark.parametrize("kind", [FIRST_ORDER, SECOND_ORDER])
def test_full_step_separates_one_body(kind):
    ham = build_hamiltonian(CouplingModel(4))
    o = optimal_ordering_n4()
    dt = 3.0
    two = trotter1_step(dt, o, ham.J, 4) if kind == FIRST_ORDER else trotter2_step(dt, o, ham.J, 4)
    ref = two @ one_body_step(dt, ham.b, 4)
    np.testing.assert_allclose(full_step(dt, TrotterScheme(kind, o), ham), ref, atol=1e-12)


def test_errors_vanish_as_dt_shrinks():
    J = oracles.couplings(4)
    o = sorted_ordering(4)
    e1 = [two_body_error(dt, o, J, 4, 1) for dt in (0.2, 0.1)]
    e2 = [two_body_error(dt, o, J, 4, 2) for dt in (0.2, 0.1)]
    assert e1[1] / e1[0] == pytest.approx(0.25, rel=0.05)
    assert e2[1] / e2[0] == pytest.approx(0.125, rel=0.05)
    with pytest.raises(ParameterError):
        two_body_error(0.1, o, J, 4, order=3)


def test_two_body_error_matches_oracle():
    n, dt = 4, 10.0
    J = oracles.couplings(n)
    o = optimal_ordering_n4()
    ref = oracles.opnorm(oracles.product_formula(o.pairs, dt, J, n) - expm(-1j * dt * oracles.h_two(J, n)))
    assert two_body_error(dt, o, J, n) == pytest.approx(ref, abs=1e-12)


def test_exact_trajectory_matches_expm():
    ham = build_hamiltonian(CouplingModel(3))
    psi = basis_state("001")
    H = oracles.h_one(oracles.b_vector(3), 3) + oracles.h_two(oracles.couplings(3), 3)
    traj = exact_trajectory(psi, ham, [0.0, 1.0, 7.5])
    for t, state in zip([0.0, 1.0, 7.5], traj):
        np.testing.assert_allclose(state, expm(-1j * t * H) @ psi, atol=1e-12)
    np.testing.assert_allclose(evolve_exact(psi, ham, 7.5), traj[-1])


def test_multistep_matches_repeated_full_step():
    ham = build_hamiltonian(CouplingModel(4))
    scheme = TrotterScheme(FIRST_ORDER, optimal_ordering_n4(), alternate_inversion=True)
    psi = basis_state("0011")
    states = evolve_multistep(psi, 2.0, 4, scheme, ham)
    assert states.shape == (4, 16)
    ref = psi
    for k in range(1, 5):
        ref = full_step(2.0, scheme, ham, k) @ ref
        np.testing.assert_allclose(states[k - 1], ref, atol=1e-12)


def test_multistep_converges_to_exact():
    ham = build_hamiltonian(CouplingModel(4))
    psi = basis_state("0011")
    scheme = TrotterScheme(SECOND_ORDER, optimal_ordering_n4())
    approx = evolve_multistep(psi, 0.05, 100, scheme, ham)[-1]
    exact = evolve_exact(psi, ham, 5.0)
    np.testing.assert_allclose(z_expectations(approx), z_expectations(exact), atol=1e-5)


def test_symmetrized_scheme_through_full_step():
    ham = build_hamiltonian(CouplingModel(4))
    o = sorted_ordering(4)
    np.testing.assert_allclose(
        full_step(0.5, TrotterScheme(SYMMETRIZED_PAIR, o), ham),
        symmetrized_pair_step(0.5, o, ham.J, ham.b, 4),
        atol=1e-13,
    )


def test_invalid_inputs():
    ham = build_hamiltonian(CouplingModel(4))
    with pytest.raises(ParameterError):
        TrotterScheme("fourth_order", sorted_ordering(4))
    with pytest.raises(ParameterError):
        evolve_multistep(basis_state("0011"), 1.0, 0, TrotterScheme(FIRST_ORDER, sorted_ordering(4)), ham)
    with pytest.raises(ParameterError):
        evolve_multistep(basis_state("001"), 1.0, 1, TrotterScheme(FIRST_ORDER, sorted_ordering(4)), ham)
    with pytest.raises(ParameterError):
        trotter1_step(1.0, sorted_ordering(3), ham.J, 4)
    with pytest.raises(CapacityError):
        trotter1_step(1.0, sorted_ordering(13), np.zeros((13, 13)), 13)


def test_exchange_symmetry_violation():
    from neutrino_trotter.evolution import exchange_symmetry_violation
    from neutrino_trotter.ordering import round_robin_layers

    J = build_hamiltonian(CouplingModel(4)).J
    assert exchange_symmetry_violation(trotter1_step(8.0, optimal_ordering_n4(), J, 4), 4) < 1e-12
    assert exchange_symmetry_violation(trotter1_step(8.0, sorted_ordering(4), J, 4), 4) > 1e-3
    J8 = build_hamiltonian(CouplingModel(8)).J
    violation = exchange_symmetry_violation(trotter1_step(4.0, round_robin_layers(8), J8, 8), 8)
    assert 0 < violation < 2
