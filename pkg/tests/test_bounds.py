import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neutrino_trotter.bounds import (
    alpha_h,
    bound_report,
    eps1_bound,
    eps1_ordered_bound,
    eps2_bound,
    gate_costs,
    minimal_steps_empirical,
    qubitization_cost,
    r1_steps,
    r2_steps,
)
from neutrino_trotter.errors import CapacityError, ParameterError
from neutrino_trotter.evolution import two_body_error
from neutrino_trotter.model import CouplingModel, build_couplings
from neutrino_trotter.ordering import optimal_ordering_n4, sorted_ordering

import oracles


def test_step_counts_for_reference_setup():
    # 12 * 40^2 * 0.1^2 * C(4,3) / (0.15 * 16) = 320 exactly; round-off must not push it to 321
    assert r1_steps(4, 40.0, 1.0, 0.1, 0.15) == 320
    raw = (4.0) ** 1.5 / math.sqrt(0.15) / 8 * math.sqrt(20 * 4 + 56)
    assert r2_steps(4, 40.0, 1.0, 0.1, 0.15) == math.ceil(raw) == 31


def test_gate_costs():
    assert gate_costs(4, 320, 31) == (1920, 310)
    assert gate_costs(2, 1, 1) == (1, 1)


def test_bound_report_fields():
    rep = bound_report(4, 40.0, 0.15)
    assert rep.theta_max == pytest.approx(0.1, abs=1e-14)
    assert (rep.r1, rep.r2, rep.c1, rep.c2) == (320, 31, 1920, 310)
    assert rep.entangling_c1 == 3 * rep.c1
    assert rep.gamma == 6
    data = json.loads(rep.to_json())
    assert data["notes"]["c_q"]


def test_single_step_bound_formulas():
    assert eps1_bound(4, 1.0, 1.0, 0.1) == pytest.approx(12 * 0.01 / 16 * 4)
    assert eps2_bound(4, 1.0, 1.0, 0.1) == pytest.approx(0.001 / 64 * (80 + 56))
    assert eps1_bound(2, 1.0, 1.0, 0.1) == 0.0


def test_ordered_bound_against_direct_sum():
    n = 5
    J = oracles.couplings(n)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            s = sum(J[i, l] - J[j, l] for l in range(j + 1, n)) + sum(J[k, j] for k in range(i + 1, j))
            total += J[i, j] * abs(s)
    assert eps1_ordered_bound(J, n, 0.5) == pytest.approx(4 * 0.25 * total)


def test_alpha_and_qubitization():
    J = oracles.couplings(4)
    assert alpha_h(J) == pytest.approx(3 * J[np.triu_indices(4, 1)].sum())
    a, r_q, c_q = qubitization_cost(J, 4, 40.0, 0.15)
    assert r_q == math.ceil(40 * a + math.log(1 / 0.15))
    assert c_q == pytest.approx(40 * 64 + 16 * math.log(1 / 0.15))


@pytest.mark.parametrize("eps", [0.0, -1.0])
def test_invalid_eps(eps):
    with pytest.raises(ParameterError):
        r1_steps(4, 1.0, 1.0, 0.1, eps)
    with pytest.raises(ParameterError):
        minimal_steps_empirical(4, 1.0, eps)


@given(st.sampled_from([3, 4, 5]), st.floats(0.05, 2.0))
@settings(max_examples=20, deadline=None)
def test_worst_case_bounds_dominate_measured_errors(n, dt):
    J = build_couplings(CouplingModel(n))
    theta = 0.1
    for o in (sorted_ordering(n), sorted_ordering(n).reversed()):
        assert two_body_error(dt, o, J, n, 1) <= eps1_bound(n, dt, 1.0, theta)
        assert two_body_error(dt, o, J, n, 2) <= eps2_bound(n, dt, 1.0, theta)


def linear_scan(n, T, eps, order, ordering, J):
    r = 1
    while True:
        if r * two_body_error(T / r, ordering, J, n, order) <= eps:
            return r
        r += 1


@pytest.mark.parametrize("n, order", [(3, 1), (4, 1), (4, 2)])
def test_empirical_steps_match_linear_scan(n, order):
    J = build_couplings(CouplingModel(n))
    o = sorted_ordering(n)
    assert minimal_steps_empirical(n, 20.0, 0.1, order, o) == linear_scan(n, 20.0, 0.1, order, o, J)


def test_exact_accumulation_needs_no_more_steps():
    lin = minimal_steps_empirical(4, 40.0, 0.15, 1, optimal_ordering_n4(), "linear")
    exact = minimal_steps_empirical(4, 40.0, 0.15, 1, optimal_ordering_n4(), "exact")
    assert exact <= lin


def test_empirical_steps_errors():
    with pytest.raises(ParameterError):
        minimal_steps_empirical(4, 40.0, 0.15, order=3)
    with pytest.raises(ParameterError):
        minimal_steps_empirical(4, 40.0, 0.15, accumulation="quadratic")
    with pytest.raises(CapacityError):
        minimal_steps_empirical(4, 40.0, 1e-9, r_max=8)


def test_step_count_of_unrestricted_sequence_optimum():
    """The best 6-pair sequence at dt = T/10 needs 10 steps; the 3-layer optimum needs 13."""
    from neutrino_trotter.ordering import exhaustive_search

    best, value = exhaustive_search(4, 4.0, mode="sequence")
    assert 10 * value <= 0.15 < 9 * two_body_error(40.0 / 9, best, build_couplings(CouplingModel(4)), 4)
    assert minimal_steps_empirical(4, 40.0, 0.15, 1, best) == 10
    assert minimal_steps_empirical(4, 40.0, 0.15, 1, optimal_ordering_n4()) == 13
