"""Trotterized time evolution of the two-flavor collective neutrino Hamiltonian."""

from .errors import CapacityError, NumericalContractError, OrderingError, ParameterError
from .model import CouplingModel, build_b_vector, build_couplings, build_hamiltonian
from .ordering import PairOrdering, optimal_ordering_n4, round_robin_layers, swap_network_ordering

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CouplingModel",
    "NumericalContractError",
    "OrderingError",
    "PairOrdering",
    "ParameterError",
    "build_b_vector",
    "build_couplings",
    "build_hamiltonian",
    "optimal_ordering_n4",
    "round_robin_layers",
    "swap_network_ordering",
]
