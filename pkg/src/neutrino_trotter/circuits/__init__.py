"""Circuit IR, compilation templates and shot statistics."""

from .compile import (
    cnot_to_zz,
    compile_multistep,
    compile_pair,
    compile_pair_cnot,
    compile_pair_native,
    compile_trotter_step,
    pair_schedule,
    swap_network_circuit,
)
from .ir import Circuit, Gate, circuit_unitary, count_gates, merge_single_qubit, non_native_gates, phase_invariant_distance
from .stats import ShotRecord, chi_squared, credible_interval, jeffreys_interval, sample_measurements

__all__ = [
    "Circuit",
    "Gate",
    "ShotRecord",
    "chi_squared",
    "circuit_unitary",
    "cnot_to_zz",
    "compile_multistep",
    "compile_pair",
    "compile_pair_cnot",
    "compile_pair_native",
    "compile_trotter_step",
    "count_gates",
    "credible_interval",
    "jeffreys_interval",
    "merge_single_qubit",
    "non_native_gates",
    "pair_schedule",
    "phase_invariant_distance",
    "sample_measurements",
    "swap_network_circuit",
]
