"""Two-flavor collective neutrino Hamiltonian.

H = sum_i b . sigma_i + sum_{i<j} J_ij sigma_i . sigma_j, with time measured
in units of 1/mu and the one-body scale fixed to |b| = mu / N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import NumericalContractError, ParameterError, check_capacity
from .quantum_core import PAULIS, TOL_CONSTRUCT, _freeze, permutation_operator, single_site, swap_index_map


@dataclass(frozen=True)
class CouplingModel:
    """Physical parameters of an N-neutrino system.

    Attributes:
        n_neutrinos: number of neutrinos (qubits).
        mu: interaction energy scale, in units of inverse time.
        theta_nu: vacuum mixing angle in radians.
        max_angle_cos: cosine of the largest relative angle in the grid.
        b_override: optional per-neutrino one-body vectors, shape (N, 3).
    """

    n_neutrinos: int
    mu: float = 1.0
    theta_nu: float = 0.195
    max_angle_cos: float = 0.9
    b_override: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.n_neutrinos) != self.n_neutrinos or self.n_neutrinos < 1:
            raise ParameterError(f"n_neutrinos must be a positive integer, got {self.n_neutrinos}")
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise ParameterError(f"mu must be positive, got {self.mu}")
        if not -1.0 <= self.max_angle_cos <= 1.0:
            raise ParameterError(f"max_angle_cos must lie in [-1, 1], got {self.max_angle_cos}")
        if self.b_override is not None:
            raw = np.asarray(self.b_override)
            if np.iscomplexobj(raw) and np.any(raw.imag != 0):
                raise ParameterError("b_override must be real (the one-body term must stay Hermitian)")
            arr = np.asarray(raw.real if np.iscomplexobj(raw) else raw, dtype=float)
            if not np.all(np.isfinite(arr)):
                raise ParameterError("b_override must be finite")
            if arr.shape != (self.n_neutrinos, 3):
                raise ParameterError(f"b_override must have shape ({self.n_neutrinos}, 3), got {arr.shape}")
            object.__setattr__(self, "b_override", tuple(map(tuple, arr)))

    @property
    def n(self):
        return self.n_neutrinos


def angle_grid(model: CouplingModel) -> np.ndarray:
    """Relative propagation angles theta_ij = arccos(c) |i - j| / (N - 1)."""
    n = model.n_neutrinos
    if n == 1:
        return _freeze(np.zeros((1, 1)))
    idx = np.arange(n)
    return _freeze(np.arccos(model.max_angle_cos) * np.abs(idx[:, None] - idx[None, :]) / (n - 1))


def build_couplings(model: CouplingModel) -> np.ndarray:
    """Symmetric coupling matrix J_ij = (mu/N)(1 - cos theta_ij), zero diagonal."""
    n = model.n_neutrinos
    if n == 1:
        return _freeze(np.zeros((0, 0)))
    J = model.mu / n * (1.0 - np.cos(angle_grid(model)))
    np.fill_diagonal(J, 0.0)
    return _freeze(J)


def build_b_vector(model: CouplingModel) -> np.ndarray:
    """Uniform vacuum-mixing vector (mu/N)(sin 2theta, 0, -cos 2theta)."""
    th = 2.0 * model.theta_nu
    return _freeze(model.mu / model.n_neutrinos * np.array([np.sin(th), 0.0, -np.cos(th)]))


def b_vectors(model: CouplingModel) -> np.ndarray:
    """Per-neutrino one-body vectors, shape (N, 3)."""
    if model.b_override is not None:
        return _freeze(np.array(model.b_override, dtype=float))
    return _freeze(np.tile(build_b_vector(model), (model.n_neutrinos, 1)))


def theta_max(J, mu, n) -> float:
    """Theta = max_ij (1 - cos theta_ij), recovered from the couplings."""
    J = np.asarray(J)
    if J.size == 0:
        return 0.0
    return float(J.max() * n / mu)


def one_body_matrix(b, n) -> np.ndarray:
    """Dense sum_i b_i . sigma_i; ``b`` is a 3-vector or an (n, 3) array."""
    b = np.asarray(b, dtype=float)
    if b.ndim == 1:
        b = np.tile(b, (n, 1))
    H = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n):
        local = sum(c * P for c, P in zip(b[i], PAULIS))
        H += single_site(local, i, n)
    return H


def two_body_matrix(J, n) -> np.ndarray:
    """Dense sum_{i<j} J_ij sigma_i . sigma_j using sigma_i . sigma_j = 2 SWAP_ij - 1."""
    dim = 2**n
    H = np.zeros((dim, dim), dtype=complex)
    rows = np.arange(dim)
    for i in range(n):
        for j in range(i + 1, n):
            if J[i, j] == 0.0:
                continue
            H[rows, swap_index_map(i, j, n)] += 2.0 * J[i, j]
            H[rows, rows] -= J[i, j]
    return H


@dataclass(frozen=True)
class HamiltonianSpec:
    coupling: CouplingModel
    J: np.ndarray
    b: np.ndarray
    h1: np.ndarray
    h2: np.ndarray

    @property
    def n(self):
        return self.coupling.n_neutrinos

    @property
    def total(self) -> np.ndarray:
        return self.h1 + self.h2


def build_hamiltonian(model: CouplingModel, max_n=None) -> HamiltonianSpec:
    """Dense one- and two-body Hamiltonians for ``model``.

    Raises:
        CapacityError: if N exceeds the dense-size cap.
    """
    n = model.n_neutrinos
    check_capacity(n, max_n)
    J = build_couplings(model)
    b = b_vectors(model)
    h1 = one_body_matrix(b, n)
    h2 = two_body_matrix(J, n)
    for name, H in (("h1", h1), ("h2", h2)):
        if np.max(np.abs(H - H.conj().T)) > TOL_CONSTRUCT:
            raise NumericalContractError(f"{name} is not Hermitian")
    return HamiltonianSpec(model, J, b, _freeze(h1), _freeze(h2))


def exchange_operator(n) -> np.ndarray:
    """Permutation implementing nu_k <-> nu_{N-1-k}."""
    return permutation_operator([n - 1 - k for k in range(n)], n)


def default_initial_bitstring(n) -> str:
    """First half electron flavor (0), second half heavy flavor (1)."""
    return "0" * (n // 2) + "1" * (n - n // 2)


def pair_list(n) -> Sequence[tuple]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]
