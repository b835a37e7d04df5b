"""Dense complex linear algebra on 2**N dimensional qubit registers.

Conventions used throughout the package:

* Qubit 0 is the leftmost tensor factor, so the bitstring ``"0011"`` is the
  basis index ``int("0011", 2) == 3``.
* States are 1-D complex arrays of length ``2**n``; operators are
  ``(2**n, 2**n)`` complex arrays. Functions never modify their inputs.
* Tolerances: construction invariants ``TOL_CONSTRUCT``, operator identities
  ``TOL_OPERATOR``, iterative norms ``TOL_NORM``.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalContractError, ParameterError

TOL_CONSTRUCT = 1e-12
TOL_OPERATOR = 1e-10
TOL_NORM = 1e-8

# full decomposition is used below this dimension
POWER_METHOD_MIN_DIM = 256

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (X, Y, Z)


def _freeze(a):
    a.setflags(write=False)
    return a


def num_qubits(dim):
    n = int(dim).bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise ParameterError(f"dimension {dim} is not a power of two")
    return n


def basis_state(bitstring: str) -> np.ndarray:
    """Computational basis state for ``bitstring`` (qubit 0 leftmost)."""
    if not isinstance(bitstring, str) or not bitstring or set(bitstring) - {"0", "1"}:
        raise ParameterError(f"malformed bitstring {bitstring!r}")
    state = np.zeros(2 ** len(bitstring), dtype=complex)
    state[int(bitstring, 2)] = 1.0
    return _freeze(state)


def normalized(amplitudes) -> np.ndarray:
    state = np.array(amplitudes, dtype=complex)
    norm = np.linalg.norm(state)
    if norm == 0:
        raise ParameterError("cannot normalize the zero vector")
    num_qubits(state.size)
    return _freeze(state / norm)


def apply_local(tensor, matrix, targets, n):
    """Apply a ``2**k x 2**k`` matrix on ``targets`` along the leading axis.

    ``tensor`` has shape ``(2**n, ...)``: a state, or an operator whose rows
    are transformed (i.e. the result is ``G @ tensor`` for the embedded G).
    The first target is the most significant bit of ``matrix``.
    """
    targets = tuple(targets)
    k = len(targets)
    tensor = np.asarray(tensor)
    rest = tensor.shape[1:]
    t = tensor.reshape((2,) * n + rest)
    m = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * k))
    t = np.tensordot(m, t, axes=(list(range(k, 2 * k)), list(targets)))
    t = np.moveaxis(t, list(range(k)), list(targets))
    return t.reshape((2**n,) + rest)


def embed(matrix, targets, n) -> np.ndarray:
    """Full ``2**n`` operator acting as ``matrix`` on ``targets``."""
    return apply_local(np.eye(2**n, dtype=complex), matrix, targets, n)


def single_site(matrix, site, n) -> np.ndarray:
    return embed(matrix, (site,), n)


def swap_index_map(i, j, n) -> np.ndarray:
    """Indices ``p`` with ``(SWAP_ij @ v) == v[p]``."""
    idx = np.arange(2**n)
    bi = (idx >> (n - 1 - i)) & 1
    bj = (idx >> (n - 1 - j)) & 1
    flip = bi != bj
    mask = (1 << (n - 1 - i)) | (1 << (n - 1 - j))
    return np.where(flip, idx ^ mask, idx)


def permutation_operator(perm, n) -> np.ndarray:
    """Operator moving the state of qubit ``k`` onto qubit ``perm[k]``."""
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ParameterError(f"{perm} is not a permutation of range({n})")
    idx = np.arange(2**n)
    out = np.zeros_like(idx)
    for k, target in enumerate(perm):
        bit = (idx >> (n - 1 - k)) & 1
        out |= bit << (n - 1 - target)
    P = np.zeros((2**n, 2**n), dtype=complex)
    P[out, idx] = 1.0
    return P


def is_hermitian(H, tol=TOL_OPERATOR) -> bool:
    H = np.asarray(H)
    return H.ndim == 2 and H.shape[0] == H.shape[1] and np.max(np.abs(H - H.conj().T)) <= tol


def unitarity_defect(U) -> float:
    U = np.asarray(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def check_unitary(U, tol=TOL_OPERATOR):
    defect = unitarity_defect(U)
    if defect > tol:
        raise NumericalContractError(f"matrix is not unitary: max|U^dag U - I| = {defect:.3e}")
    return U


class HermitianPropagator:
    """Caches the eigendecomposition of ``H`` so ``exp(-iHt)`` is cheap for many t."""

    def __init__(self, H, tol=TOL_OPERATOR):
        H = np.asarray(H, dtype=complex)
        if not is_hermitian(H, tol):
            raise NumericalContractError("generator is not Hermitian")
        self.energies, self.vectors = np.linalg.eigh(H)

    @property
    def dim(self):
        return self.energies.size

    def unitary(self, t) -> np.ndarray:
        phases = np.exp(-1j * self.energies * t)
        return _freeze((self.vectors * phases) @ self.vectors.conj().T)

    def apply(self, state, t) -> np.ndarray:
        coeffs = self.vectors.conj().T @ np.asarray(state, dtype=complex)
        return _freeze(self.vectors @ (np.exp(-1j * self.energies * t) * coeffs))


def expm_hermitian(H, t) -> np.ndarray:
    """Return ``exp(-iHt)`` for Hermitian ``H`` via eigendecomposition."""
    return HermitianPropagator(H).unitary(t)


def z_expectations(state) -> np.ndarray:
    """``<Z_i>`` for every qubit."""
    state = np.asarray(state)
    n = num_qubits(state.size)
    probs = (np.abs(state) ** 2).reshape((2,) * n)
    out = np.empty(n)
    for i in range(n):
        marginal = probs.sum(axis=tuple(k for k in range(n) if k != i))
        out[i] = marginal[0] - marginal[1]
    return out


def expect_z(state, i) -> float:
    state = np.asarray(state)
    n = num_qubits(state.size)
    if not 0 <= i < n:
        raise ParameterError(f"qubit index {i} out of range for N={n}")
    return float(z_expectations(state)[i])


def inversion_probability(z_initial, z_now):
    """Flavor inversion probability ``|z_initial - z_now| / 2``."""
    return np.abs(np.asarray(z_initial) - np.asarray(z_now)) / 2


def spectral_norm(M, tol=1e-12, max_iter=5000, method="auto") -> float:
    """Largest singular value of ``M``.

    ``method="auto"`` uses a full SVD below ``POWER_METHOD_MIN_DIM`` and power
    iteration on ``M^dag M`` above it, falling back to SVD if the iteration
    does not converge.
    """
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    if method not in ("auto", "svd", "power"):
        raise ParameterError(f"unknown method {method!r}")
    if method == "svd" or (method == "auto" and min(M.shape) < POWER_METHOD_MIN_DIM):
        return float(np.linalg.norm(M, 2))

    rng = np.random.default_rng(12345)
    v = rng.standard_normal(M.shape[1]) + 1j * rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = M.conj().T @ (M @ v)
        lam_new = float(np.real(np.vdot(v, w)))
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        if abs(lam_new - lam) <= tol * lam_new:
            return float(np.sqrt(lam_new))
        lam = lam_new
    return float(np.linalg.norm(M, 2))
