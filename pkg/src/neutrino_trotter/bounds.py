"""Trotter error bounds, step counts and two-qubit gate cost models.

All costs count general two-qubit SU(4) operations; multiply by three for
entangling gates (CNOT or ZZ). Qubitization numbers are asymptotic models
with unit constants, useful for scaling comparisons only.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np

from .errors import CapacityError, ParameterError, check_capacity
from .evolution import trotter1_step, trotter2_step
from .model import CouplingModel, build_couplings, theta_max, two_body_matrix
from .ordering import PairOrdering
from .quantum_core import HermitianPropagator, spectral_norm

# guards ceil() against round-off such as 320.00000000000006
_CEIL_RTOL = 1e-12


def _ceil_steps(x):
    if x <= 0:
        return 1
    return max(1, math.ceil(x * (1 - _CEIL_RTOL)))


def _check_eps(eps):
    if not eps > 0:
        raise ParameterError(f"target error must be positive, got {eps}")


def eps1_bound(n, dt, mu, theta):
    """Worst-case first order single-step error 12 dt^2 mu^2 (Theta/N)^2 C(N,3)."""
    return 12.0 * dt**2 * mu**2 * theta**2 / n**2 * comb(n, 3)


def eps1_ordered_bound(J, n, dt):
    """Coupling-resolved first order bound for the index-sorted ordering.

    4 dt^2 sum_{i<j} J_ij |sum_{l>j} (J_il - J_jl) + sum_{i<k<j} J_kj|
    """
    J = np.asarray(J, dtype=float)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            tail = sum(J[i, l] - J[j, l] for l in range(j + 1, n))
            middle = sum(J[k, j] for k in range(i + 1, j))
            total += J[i, j] * abs(tail + middle)
    return 4.0 * dt**2 * total


def eps2_bound(n, dt, mu, theta):
    """Second order single-step bound dt^3 mu^3 (Theta/N)^3 [20 C(N,3) + 56 C(N,4)]."""
    return dt**3 * mu**3 * theta**3 / n**3 * (20 * comb(n, 3) + 56 * comb(n, 4))


def r1_steps(n, T, mu, theta, eps):
    _check_eps(eps)
    return _ceil_steps(12.0 * T**2 * mu**2 * theta**2 * comb(n, 3) / (eps * n**2))


def r2_steps(n, T, mu, theta, eps):
    _check_eps(eps)
    x = (T * mu * theta) ** 1.5 / math.sqrt(eps) / n**1.5 * math.sqrt(20 * comb(n, 3) + 56 * comb(n, 4))
    return _ceil_steps(x)


def gate_costs(n, r1, r2):
    """SU(4) operation counts (c1, c2) for first and second order schemes."""
    return r1 * n * (n - 1) // 2, r2 * n * (2 * n - 3) // 2


def alpha_h(J):
    """3 (mu/N) sum_{i<j} (1 - cos theta_ij), i.e. 3 sum_{i<j} J_ij."""
    J = np.asarray(J, dtype=float)
    return 3.0 * float(np.triu(J, 1).sum())


def qubitization_cost(J, n, T, eps, mu=1.0):
    """(alpha_H, r_Q, c_Q); r_Q and c_Q use unit constants in their O(.) models."""
    _check_eps(eps)
    a = alpha_h(J)
    log_term = math.log(1.0 / eps)
    r_q = _ceil_steps(T * a + log_term)
    c_q = T * mu * n**3 + n**2 * log_term
    return a, r_q, c_q


@dataclass
class BoundReport:
    N: int
    T: float
    eps: float
    mu: float
    theta_max: float
    dt1: float
    dt2: float
    eps1_bound: float
    eps2_bound: float
    r1: int
    r2: int
    r_q: int
    c1: int
    c2: int
    c_q: float
    alpha_h: float
    gamma: int
    entangling_c1: int
    entangling_c2: int
    notes: dict = field(default_factory=lambda: {"c_q": "asymptotic model with unit constants", "r_q": "asymptotic model with unit constants"})

    def to_json(self, **kwargs):
        return json.dumps(asdict(self), **kwargs)


def bound_report(n, T, eps, model: CouplingModel = None) -> BoundReport:
    """Analytic step counts and costs for evolving to time T within error eps."""
    _check_eps(eps)
    model = CouplingModel(n) if model is None else model
    J = build_couplings(model)
    theta = theta_max(J, model.mu, n)
    r1 = r1_steps(n, T, model.mu, theta, eps)
    r2 = r2_steps(n, T, model.mu, theta, eps)
    c1, c2 = gate_costs(n, r1, r2)
    a, r_q, c_q = qubitization_cost(J, n, T, eps, model.mu)
    return BoundReport(
        N=n, T=T, eps=eps, mu=model.mu, theta_max=theta,
        dt1=T / r1, dt2=T / r2,
        eps1_bound=eps1_bound(n, T / r1, model.mu, theta),
        eps2_bound=eps2_bound(n, T / r2, model.mu, theta),
        r1=r1, r2=r2, r_q=r_q, c1=c1, c2=c2, c_q=c_q, alpha_h=a,
        gamma=n * (n - 1) // 2, entangling_c1=3 * c1, entangling_c2=3 * c2,
    )


class _ErrorCurve:
    """Accumulated Trotter error as a function of the step count r."""

    def __init__(self, n, T, order, ordering, accumulation, J):
        if order not in (1, 2):
            raise ParameterError(f"order must be 1 or 2, got {order}")
        if accumulation not in ("linear", "exact"):
            raise ParameterError(f"accumulation must be 'linear' or 'exact', got {accumulation!r}")
        self.n, self.T, self.order, self.ordering, self.J = n, T, order, ordering, J
        self.accumulation = accumulation
        self.prop = HermitianPropagator(two_body_matrix(J, n))
        self.target = self.prop.unitary(T) if accumulation == "exact" else None
        self.cache = {}

    def __call__(self, r):
        if r not in self.cache:
            dt = self.T / r
            step = (trotter1_step if self.order == 1 else trotter2_step)(dt, self.ordering, self.J, self.n)
            if self.accumulation == "linear":
                val = r * spectral_norm(step - self.prop.unitary(dt))
            else:
                val = spectral_norm(np.linalg.matrix_power(step, r) - self.target)
            self.cache[r] = val
        return self.cache[r]


def minimal_steps_empirical(n, T, eps, order=1, ordering: PairOrdering = None, accumulation="linear",
                            J=None, r_max=2**20, max_n=None):
    """Smallest r whose accumulated error is at most ``eps``.

    Doubling brackets the answer, bisection refines it. If the sampled errors
    are not nonincreasing in r the bisection is not trusted and the bracket is
    scanned linearly instead.

    Raises:
        CapacityError: if no r <= r_max meets the target.
    """
    from .ordering import sorted_ordering

    _check_eps(eps)
    check_capacity(n, max_n)
    ordering = sorted_ordering(n) if ordering is None else ordering
    J = build_couplings(CouplingModel(n)) if J is None else J
    err = _ErrorCurve(n, T, order, ordering, accumulation, J)

    r, prev = 1, err(1)
    if prev <= eps:
        return 1
    samples = [(1, prev)]
    while True:
        r_next = min(2 * r, r_max)
        val = err(r_next)
        samples.append((r_next, val))
        if val <= eps:
            lo, hi = r, r_next
            break
        if r_next == r_max:
            raise CapacityError(f"no step count r <= {r_max} reaches error {eps}")
        r = r_next

    while hi - lo > 1:
        mid = (lo + hi) // 2
        samples.append((mid, err(mid)))
        if err(mid) <= eps:
            hi = mid
        else:
            lo = mid

    samples.sort()
    monotone = all(b[1] <= a[1] * (1 + 1e-12) + 1e-15 for a, b in zip(samples, samples[1:]))
    if monotone:
        return hi
    for r in range(1, hi + 1):
        if err(r) <= eps:
            return r
    return hi
