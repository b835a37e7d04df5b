"""Gate-level intermediate representation.

Gate kinds and their matrices:

* ``RZ(lam)``      diag(e^{-i lam/2}, e^{i lam/2})
* ``UQ(th, ph)``   [[cos th/2, -i e^{-i ph} sin th/2], [-i e^{i ph} sin th/2, cos th/2]]
* ``ZZ``           exp(-i pi/4 Z x Z)
* ``CNOT``         control = first target
* ``SWAP``
* ``U1`` / ``U2``  generic one- and two-qubit matrices

The first gate of a circuit acts first on the state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ParameterError, check_capacity
from ..quantum_core import apply_local, spectral_norm

RZ, UQ, ZZ, CNOT, SWAP, U1, U2 = "RZ", "UQ", "ZZ", "CNOT", "SWAP", "U1", "U2"
_ARITY = {RZ: 1, UQ: 1, U1: 1, ZZ: 2, CNOT: 2, SWAP: 2, U2: 2}
_NPARAMS = {RZ: 1, UQ: 2, ZZ: 0, CNOT: 0, SWAP: 0}
NATIVE_THETAS = (np.pi / 2, np.pi)


def rz_matrix(lam):
    return np.array([[np.exp(-0.5j * lam), 0], [0, np.exp(0.5j * lam)]], dtype=complex)


def uq_matrix(theta, phi):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * np.exp(-1j * phi) * s], [-1j * np.exp(1j * phi) * s, c]], dtype=complex)


ZZ_MATRIX = np.diag(np.exp(-0.25j * np.pi * np.array([1, -1, -1, 1])))
CNOT_MATRIX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP_MATRIX = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple
    params: tuple = ()
    matrix_data: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ParameterError(f"unknown gate kind {self.kind!r}")
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(targets) != _ARITY[self.kind]:
            raise ParameterError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s), got {targets}")
        if len(set(targets)) != len(targets):
            raise ParameterError(f"repeated target in {targets}")
        if self.kind in (U1, U2):
            dim = 2 ** len(targets)
            m = np.array(self.matrix_data, dtype=complex)
            if m.shape != (dim, dim):
                raise ParameterError(f"{self.kind} needs a {dim}x{dim} matrix")
            m.setflags(write=False)
            object.__setattr__(self, "matrix_data", m)
        elif len(self.params) != _NPARAMS[self.kind]:
            raise ParameterError(f"{self.kind} takes {_NPARAMS[self.kind]} parameter(s)")

    @property
    def is_single_qubit(self):
        return len(self.targets) == 1

    def matrix(self) -> np.ndarray:
        if self.kind == RZ:
            return rz_matrix(*self.params)
        if self.kind == UQ:
            return uq_matrix(*self.params)
        if self.kind == ZZ:
            return ZZ_MATRIX
        if self.kind == CNOT:
            return CNOT_MATRIX
        if self.kind == SWAP:
            return SWAP_MATRIX
        return self.matrix_data

    def to_text(self) -> str:
        if self.kind in (U1, U2):
            vals = [x for z in self.matrix_data.ravel() for x in (z.real, z.imag)]
        else:
            vals = list(self.params)
        fields = [str(t) for t in self.targets] + [format(v, ".17g") for v in vals]
        return f"{self.kind} {','.join(fields)}"

    @classmethod
    def from_text(cls, line) -> "Gate":
        try:
            kind, rest = line.strip().split(None, 1)
        except ValueError:
            kind, rest = line.strip(), ""
        if kind not in _ARITY:
            raise ParameterError(f"unknown gate kind in line {line!r}")
        fields = [f for f in rest.split(",") if f.strip()]
        arity = _ARITY[kind]
        try:
            targets = tuple(int(f) for f in fields[:arity])
            values = [float(f) for f in fields[arity:]]
        except ValueError as exc:
            raise ParameterError(f"cannot parse gate line {line!r}") from exc
        if kind in (U1, U2):
            dim = 2**arity
            if len(values) != 2 * dim * dim:
                raise ParameterError(f"{kind} needs {2 * dim * dim} matrix values")
            arr = np.array(values[0::2]) + 1j * np.array(values[1::2])
            return cls(kind, targets, (), arr.reshape(dim, dim))
        return cls(kind, targets, tuple(values))


def rz(q, lam):
    return Gate(RZ, (q,), (lam,))


def uq(q, theta, phi):
    return Gate(UQ, (q,), (theta, phi))


def ry(q, beta):
    """Y rotation as the UQ gate UQ(beta, pi/2)."""
    return Gate(UQ, (q,), (beta, np.pi / 2))


def zz(a, b):
    return Gate(ZZ, (a, b))


def cnot(control, target):
    return Gate(CNOT, (control, target))


def swap(a, b):
    return Gate(SWAP, (a, b))


def generic_1q(q, matrix):
    return Gate(U1, (q,), (), matrix)


def generic_2q(a, b, matrix):
    return Gate(U2, (a, b), (), matrix)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple = ()

    def __post_init__(self):
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        for g in gates:
            for t in g.targets:
                if not 0 <= t < self.n_qubits:
                    raise ParameterError(f"gate {g.kind} target {t} out of range for {self.n_qubits} qubits")

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ParameterError("cannot concatenate circuits of different width")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def __len__(self):
        return len(self.gates)

    def to_text(self) -> str:
        return "".join(g.to_text() + "\n" for g in self.gates)

    @classmethod
    def from_text(cls, text, n_qubits=None) -> "Circuit":
        gates = [Gate.from_text(line) for line in text.splitlines() if line.strip() and not line.startswith("#")]
        if n_qubits is None:
            n_qubits = 1 + max((t for g in gates for t in g.targets), default=0)
        return cls(n_qubits, tuple(gates))


def apply_circuit(c: Circuit, tensor) -> np.ndarray:
    for g in c.gates:
        tensor = apply_local(tensor, g.matrix(), g.targets, c.n_qubits)
    return tensor


def circuit_unitary(c: Circuit, max_n=None) -> np.ndarray:
    """Dense unitary of ``c``."""
    check_capacity(c.n_qubits, max_n)
    return apply_circuit(c, np.eye(2**c.n_qubits, dtype=complex))


def phase_invariant_distance(A, B) -> float:
    """min over global phase of ||A - e^{i phi} B||, with phi aligned by arg tr(B^dag A)."""
    A, B = np.asarray(A), np.asarray(B)
    if A.shape != B.shape:
        raise ParameterError(f"dimension mismatch {A.shape} vs {B.shape}")
    overlap = np.trace(B.conj().T @ A)
    if abs(overlap) > 1e-12 * A.shape[0]:
        return spectral_norm(A - np.exp(1j * np.angle(overlap)) * B)
    phases = np.linspace(0, 2 * np.pi, 360, endpoint=False)
    return min(spectral_norm(A - np.exp(1j * p) * B) for p in phases)


def _proportional_to_identity(m, tol=1e-12):
    return abs(m[0, 1]) <= tol and abs(m[1, 0]) <= tol and abs(m[0, 0] - m[1, 1]) <= tol


def merge_single_qubit(c: Circuit, drop_identity=True, tol=1e-12) -> Circuit:
    """Coalesce runs of single-qubit gates on each wire into one ``U1`` gate.

    A run ends when a two-qubit gate touches the wire. Runs whose product is a
    multiple of the identity are dropped when ``drop_identity`` is set.
    """
    pending = {}
    out = []

    def flush(q):
        m = pending.pop(q, None)
        if m is None or (drop_identity and _proportional_to_identity(m, tol)):
            return
        out.append(generic_1q(q, m))

    for g in c.gates:
        if g.is_single_qubit:
            q = g.targets[0]
            pending[q] = g.matrix() @ pending.get(q, np.eye(2, dtype=complex))
        else:
            for q in g.targets:
                flush(q)
            out.append(g)
    for q in sorted(pending):
        flush(q)
    return Circuit(c.n_qubits, tuple(out))


def count_gates(c: Circuit) -> dict:
    """Raw per-kind counts plus ``SU2``: single-qubit unitaries after merging."""
    counts = {k: 0 for k in (RZ, UQ, ZZ, CNOT, SWAP, U1, U2)}
    for g in c.gates:
        counts[g.kind] += 1
    counts["single_qubit"] = counts[RZ] + counts[UQ] + counts[U1]
    counts["two_qubit"] = counts[ZZ] + counts[CNOT] + counts[SWAP] + counts[U2]
    counts["SU2"] = sum(1 for g in merge_single_qubit(c).gates if g.is_single_qubit)
    return counts


def non_native_gates(c: Circuit, atol=1e-12) -> list:
    """Gates outside the trapped-ion set {RZ, UQ(theta in {pi/2, pi}), ZZ}."""
    bad = []
    for k, g in enumerate(c.gates):
        if g.kind == UQ:
            if not any(abs(g.params[0] - t) <= atol for t in NATIVE_THETAS):
                bad.append((k, g))
        elif g.kind not in (RZ, ZZ):
            bad.append((k, g))
    return bad
