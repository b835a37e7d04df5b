"""Exact and product-formula propagators.

Product order convention: the first pair of an ordering acts first on the
state, so it is the rightmost factor of the matrix product. Operators are
built by applying factors to the identity, never by dense matrix products of
full-size factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, check_capacity
from .model import HamiltonianSpec
from .ordering import PairOrdering
from .quantum_core import (
    PAULIS,
    HermitianPropagator,
    _freeze,
    apply_local,
    expm_hermitian,
    num_qubits,
    spectral_norm,
    swap_index_map,
)

FIRST_ORDER = "first_order"
SECOND_ORDER = "second_order"
SYMMETRIZED_PAIR = "symmetrized_pair"
SCHEME_KINDS = (FIRST_ORDER, SECOND_ORDER, SYMMETRIZED_PAIR)


@dataclass(frozen=True)
class TrotterScheme:
    kind: str
    ordering: PairOrdering
    alternate_inversion: bool = False

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ParameterError(f"unknown scheme kind {self.kind!r}; expected one of {SCHEME_KINDS}")
        self.ordering.validate()


def _identity(n):
    return np.eye(2**n, dtype=complex)


def apply_pair(tensor, i, j, angle, n):
    """Apply exp(-i angle sigma_i . sigma_j) along the leading axis.

    Uses sigma_i . sigma_j = 2 SWAP_ij - 1, so the exponential is
    e^{i angle} (cos(2 angle) - i sin(2 angle) SWAP_ij).
    """
    perm = swap_index_map(i, j, n)
    tensor = np.asarray(tensor)
    return np.exp(1j * angle) * (np.cos(2 * angle) * tensor - 1j * np.sin(2 * angle) * tensor[perm])


def apply_pairs(tensor, pairs, dt, J, n):
    for i, j in pairs:
        tensor = apply_pair(tensor, i, j, dt * J[i, j], n)
    return tensor


def pair_propagator(i, j, dt, J, n, max_n=None) -> np.ndarray:
    """exp(-i dt J_ij (XX + YY + ZZ)) on qubits (i, j), embedded in 2**n dimensions."""
    if i == j:
        raise ParameterError("pair propagator needs two distinct neutrinos")
    check_capacity(n, max_n)
    return _freeze(apply_pair(_identity(n), i, j, dt * J[i, j], n))


def one_body_local(b, dt) -> np.ndarray:
    """2x2 exp(-i dt b . sigma)."""
    b = np.asarray(b, dtype=float)
    norm = np.linalg.norm(b)
    if norm == 0.0:
        return np.eye(2, dtype=complex)
    generator = sum(c * P for c, P in zip(b / norm, PAULIS))
    return np.cos(norm * dt) * np.eye(2) - 1j * np.sin(norm * dt) * generator


def _per_site(b, n):
    b = np.asarray(b, dtype=float)
    return np.tile(b, (n, 1)) if b.ndim == 1 else b


def apply_one_body(tensor, dt, b, n):
    for site, vec in enumerate(_per_site(b, n)):
        tensor = apply_local(tensor, one_body_local(vec, dt), (site,), n)
    return tensor


def one_body_step(dt, b, n, max_n=None) -> np.ndarray:
    """Tensor product of single-qubit exp(-i b_i . sigma dt)."""
    check_capacity(n, max_n)
    U = np.array([[1.0 + 0j]])
    for vec in _per_site(b, n):
        U = np.kron(U, one_body_local(vec, dt))
    return _freeze(U)


def _check_ordering(ordering, n):
    if ordering.n != n:
        raise ParameterError(f"ordering is for N={ordering.n}, system has N={n}")
    ordering.validate()


def trotter1_step(dt, ordering: PairOrdering, J, n, max_n=None) -> np.ndarray:
    """First order product of pair propagators in ordering sequence."""
    check_capacity(n, max_n)
    _check_ordering(ordering, n)
    return _freeze(apply_pairs(_identity(n), ordering.pairs, dt, J, n))


def trotter2_step(dt, ordering: PairOrdering, J, n, max_n=None) -> np.ndarray:
    """Forward sequence at dt/2 followed by the reversed sequence at dt/2."""
    check_capacity(n, max_n)
    _check_ordering(ordering, n)
    U = apply_pairs(_identity(n), ordering.pairs, dt / 2, J, n)
    return _freeze(apply_pairs(U, ordering.pairs[::-1], dt / 2, J, n))


def _symmetrized_pair_local(i, j, J, b, n):
    b = _per_site(b, n)
    h = np.zeros((4, 4), dtype=complex)
    for k, P in enumerate(PAULIS):
        h += (b[i][k] * np.kron(P, np.eye(2)) + b[j][k] * np.kron(np.eye(2), P)) / (n - 1)
        h += J[i, j] * np.kron(P, P)
    return h


def apply_symmetrized_pairs(tensor, pairs, dt, J, b, n):
    for i, j in pairs:
        u = expm_hermitian(_symmetrized_pair_local(i, j, J, b, n), dt)
        tensor = apply_local(tensor, u, (i, j), n)
    return tensor


def symmetrized_pair_step(dt, ordering: PairOrdering, J, b, n, max_n=None) -> np.ndarray:
    """Product of exp(-i H_ij dt), H_ij = b.(sigma_i + sigma_j)/(N-1) + J_ij sigma_i.sigma_j."""
    if n < 2:
        raise ParameterError("the symmetrized pair decomposition needs N >= 2")
    check_capacity(n, max_n)
    _check_ordering(ordering, n)
    return _freeze(apply_symmetrized_pairs(_identity(n), ordering.pairs, dt, J, b, n))


def full_step(dt, scheme: TrotterScheme, ham: HamiltonianSpec, step_index=1) -> np.ndarray:
    """Single-step operator of ``scheme``; ``step_index`` selects the inverted order on even steps."""
    return _freeze(_apply_step(_identity(ham.n), dt, scheme, ham, step_index))


def _apply_step(tensor, dt, scheme, ham, step_index):
    n = ham.n
    pairs = scheme.ordering.pairs
    if scheme.alternate_inversion and step_index % 2 == 0:
        pairs = pairs[::-1]
    if scheme.kind == SYMMETRIZED_PAIR:
        return apply_symmetrized_pairs(tensor, pairs, dt, ham.J, ham.b, n)
    tensor = apply_one_body(tensor, dt, ham.b, n)
    if scheme.kind == FIRST_ORDER:
        return apply_pairs(tensor, pairs, dt, ham.J, n)
    tensor = apply_pairs(tensor, pairs, dt / 2, ham.J, n)
    return apply_pairs(tensor, pairs[::-1], dt / 2, ham.J, n)


def two_body_error(dt, ordering: PairOrdering, J, n, order=1, exact=None) -> float:
    """Spectral-norm error ||L(dt) - exp(-i h2 dt)|| of the two-body product formula."""
    from .model import two_body_matrix

    if exact is None:
        exact = HermitianPropagator(two_body_matrix(J, n)).unitary(dt)
    if order == 1:
        approx = trotter1_step(dt, ordering, J, n)
    elif order == 2:
        approx = trotter2_step(dt, ordering, J, n)
    else:
        raise ParameterError(f"order must be 1 or 2, got {order}")
    return spectral_norm(approx - exact)


def evolve_exact(state, ham: HamiltonianSpec, t) -> np.ndarray:
    """exp(-i (h1 + h2) t) applied to ``state``."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (2**ham.n,):
        raise ParameterError(f"state has shape {state.shape}, expected ({2**ham.n},)")
    return HermitianPropagator(ham.total).apply(state, t)


def exact_trajectory(state, ham: HamiltonianSpec, times) -> np.ndarray:
    """States at each time in ``times``, shape (len(times), 2**N)."""
    prop = HermitianPropagator(ham.total)
    return np.array([prop.apply(state, t) for t in times])


def evolve_multistep(state, dt, k, scheme: TrotterScheme, ham: HamiltonianSpec) -> np.ndarray:
    """States after steps 1..k, shape (k, 2**N).

    Each step applies the one-body factor first, then the two-body product.
    With ``alternate_inversion`` the even-numbered steps use the reversed order.
    """
    if k < 1:
        raise ParameterError("step count must be >= 1")
    state = np.asarray(state, dtype=complex)
    if state.shape != (2**ham.n,):
        raise ParameterError(f"state has shape {state.shape}, expected ({2**ham.n},)")
    num_qubits(state.size)
    out = np.empty((k, state.size), dtype=complex)
    for step in range(1, k + 1):
        state = _apply_step(state, dt, scheme, ham, step)
        out[step - 1] = state
    return out


def exchange_symmetry_violation(U, n) -> float:
    """||P U P - U|| for the mirror exchange P: i <-> N-1-i.

    Zero when the operator respects the mirror symmetry of the angular grid.
    """
    from .model import exchange_operator

    P = exchange_operator(n)
    return spectral_norm(P @ U @ P - U)
