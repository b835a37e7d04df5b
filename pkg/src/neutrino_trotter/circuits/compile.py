"""Compilation of pair propagators and Trotter steps into gate circuits.

Every template reproduces exp(-i dt J (XX + YY + ZZ)) up to a global phase;
the unit tests, not the gate listings below, are the authority on that.
"""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError, check_capacity
from ..evolution import one_body_local
from ..ordering import PairOrdering
from .ir import CNOT, Circuit, cnot, generic_1q, rz, ry, uq, zz

HALF_PI = np.pi / 2


def compile_pair_cnot(dt, J_ij, i=0, j=1, n=2) -> Circuit:
    """Three-CNOT template with psi = 2 dt J_ij + pi/2."""
    psi = 2.0 * dt * J_ij + HALF_PI
    gates = [
        rz(j, -HALF_PI),
        cnot(j, i),
        rz(i, psi),
        ry(j, -psi),
        cnot(i, j),
        ry(j, psi),
        cnot(j, i),
        rz(i, HALF_PI),
    ]
    return Circuit(n, tuple(gates))


def cnot_as_zz(control, target):
    """CNOT rewritten with one ZZ and native single-qubit gates (exact up to phase)."""
    return [
        uq(target, -HALF_PI, HALF_PI),
        zz(control, target),
        uq(target, HALF_PI, np.pi),
        rz(control, -HALF_PI),
        rz(target, -HALF_PI),
    ]


def cnot_to_zz(c: Circuit) -> Circuit:
    """Replace every CNOT by its ZZ-based equivalent."""
    gates = []
    for g in c.gates:
        if g.kind == CNOT:
            gates.extend(cnot_as_zz(*g.targets))
        else:
            gates.append(g)
    return Circuit(c.n_qubits, tuple(gates))


def _native_ry(q, beta):
    return [uq(q, HALF_PI, 0.0), rz(q, beta), uq(q, HALF_PI, np.pi)]


def compile_pair_native(dt, J_ij, i=0, j=1, n=2) -> Circuit:
    """Trapped-ion template: RZ, UQ with theta = pi/2, and exactly three ZZ.

    Obtained from the CNOT template by the ZZ rewrite, commuting RZ gates
    through ZZ, cancelling, and expressing Y rotations natively. Written in
    terms of alpha = -dt J_ij. Wire ``i`` carries single-qubit gates before
    the first and after the last ZZ; wire ``j`` has none there.
    """
    alpha = -dt * J_ij
    psi = HALF_PI - 2.0 * alpha
    three_half_pi = 3 * HALF_PI
    gates = [uq(i, HALF_PI, three_half_pi), zz(i, j)]
    gates += [uq(i, HALF_PI, np.pi), rz(i, psi - HALF_PI)]
    gates += [rz(j, -np.pi), *_native_ry(j, -psi), uq(j, HALF_PI, three_half_pi)]
    gates += [zz(i, j)]
    gates += [rz(i, -HALF_PI), uq(i, HALF_PI, three_half_pi)]
    gates += [uq(j, HALF_PI, np.pi), rz(j, -HALF_PI), *_native_ry(j, psi), rz(j, -HALF_PI)]
    gates += [zz(i, j), uq(i, HALF_PI, np.pi)]
    return Circuit(n, tuple(gates))


TEMPLATES = ("native", "cnot", "zz")


def compile_pair(dt, J_ij, i, j, n, template="native") -> Circuit:
    if template == "native":
        return compile_pair_native(dt, J_ij, i, j, n)
    if template == "cnot":
        return compile_pair_cnot(dt, J_ij, i, j, n)
    if template == "zz":
        return cnot_to_zz(compile_pair_cnot(dt, J_ij, i, j, n))
    raise ParameterError(f"unknown template {template!r}; expected one of {TEMPLATES}")


def one_body_layer(n, dt, b) -> Circuit:
    """One generic single-qubit gate exp(-i b_q . sigma dt) per qubit."""
    b = np.asarray(b, dtype=float)
    per_site = np.tile(b, (n, 1)) if b.ndim == 1 else b
    return Circuit(n, tuple(generic_1q(q, one_body_local(per_site[q], dt)) for q in range(n)))


def state_preparation(bitstring) -> Circuit:
    """UQ(pi, 0) (an X flip up to phase) on every qubit set to 1."""
    n = len(bitstring)
    return Circuit(n, tuple(uq(q, np.pi, 0.0) for q, bit in enumerate(bitstring) if bit == "1"))


def _pairs_circuit(n, schedule, J, template):
    gates = []
    for (i, j), duration in schedule:
        gates.extend(compile_pair(duration, J[i, j], i, j, n, template).gates)
    return Circuit(n, tuple(gates))


def compile_trotter_step(n, dt, ordering: PairOrdering, J, b, template="native", max_n=None) -> Circuit:
    """One-body layer followed by the compiled pair templates in ordering sequence."""
    check_capacity(n, max_n)
    if ordering.n != n:
        raise ParameterError(f"ordering is for N={ordering.n}, circuit has N={n}")
    schedule = [(p, dt) for p in ordering.pairs]
    return one_body_layer(n, dt, b) + _pairs_circuit(n, schedule, J, template)


def pair_schedule(ordering: PairOrdering, dt, k, alternate_inversion=False, fuse_repeated_pairs=False):
    """List of ``((i, j), duration)`` for k two-body steps.

    With ``fuse_repeated_pairs`` a pair is merged into an earlier occurrence of
    the same pair when every pair in between is disjoint from it (they commute).
    """
    schedule = []
    for step in range(1, k + 1):
        pairs = ordering.pairs[::-1] if alternate_inversion and step % 2 == 0 else ordering.pairs
        for p in pairs:
            if fuse_repeated_pairs:
                for pos in range(len(schedule) - 1, -1, -1):
                    q, duration = schedule[pos]
                    if q == p:
                        schedule[pos] = (q, duration + dt)
                        break
                    if set(q) & set(p):
                        pos = -1
                        break
                else:
                    pos = -1
                if pos >= 0:
                    continue
            schedule.append((p, dt))
    return schedule


def compile_multistep(n, dt, k, ordering: PairOrdering, J, b, template="native", alternate_inversion=False,
                      fuse_repeated_pairs=False, initial=None, max_n=None) -> Circuit:
    """k Trotter steps with all one-body factors moved to the front.

    Since the one-body term commutes with every pair term, U1(dt)^k followed by
    the k two-body blocks equals k full steps exactly.
    """
    check_capacity(n, max_n)
    if k < 1:
        raise ParameterError("step count must be >= 1")
    c = Circuit(n) if initial is None else state_preparation(initial)
    if c.n_qubits != n:
        raise ParameterError("initial bitstring length must equal N")
    for _ in range(k):
        c = c + one_body_layer(n, dt, b)
    schedule = pair_schedule(ordering, dt, k, alternate_inversion, fuse_repeated_pairs)
    return c + _pairs_circuit(n, schedule, J, template)


def swap_network_circuit(schedule, dt, J, template="cnot") -> Circuit:
    """SWAP-network realisation on a linear chain: pair template then SWAP per entry.

    The pair acting on positions (q, q+1) is looked up through the running
    qubit-to-neutrino map. The result equals the induced neutrino-order product
    followed by the permutation taking ``schedule.qubit_map`` to ``schedule.final_map``.
    """
    from .ir import swap

    n = len(schedule.qubit_map)
    pos = list(schedule.qubit_map)
    gates = []
    for layer in schedule.swap_layers:
        for q, q1 in layer:
            gates.extend(compile_pair(dt, J[pos[q], pos[q1]], q, q1, n, template).gates)
            gates.append(swap(q, q1))
            pos[q], pos[q1] = pos[q1], pos[q]
    return Circuit(n, tuple(gates))
