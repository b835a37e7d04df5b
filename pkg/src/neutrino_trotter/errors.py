"""Exception hierarchy shared by every module.

The CLI maps these onto process exit codes (see :mod:`neutrino_trotter.cli`).
"""

import os


class NeutrinoTrotterError(Exception):
    """Base class for all package errors."""


class ParameterError(NeutrinoTrotterError, ValueError):
    """Invalid physical or numerical input."""


class OrderingError(ParameterError):
    """A pair ordering is incomplete, duplicated, or malformed."""


class CapacityError(NeutrinoTrotterError):
    """Requested problem exceeds a configured size limit."""


class NumericalContractError(NeutrinoTrotterError):
    """A numerical precondition (hermiticity, unitarity, ...) was violated."""


DEFAULT_MAX_QUBITS = 12
MAX_QUBITS_ENV = "NEUTRINO_TROTTER_MAX_N"


def max_dense_qubits():
    """Dense-size cap, overridable through ``NEUTRINO_TROTTER_MAX_N``."""
    raw = os.environ.get(MAX_QUBITS_ENV)
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        value = int(raw)
    except ValueError as exc:
        raise ParameterError(f"{MAX_QUBITS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ParameterError(f"{MAX_QUBITS_ENV} must be positive, got {value}")
    return value


def check_capacity(n, max_n=None):
    cap = max_dense_qubits() if max_n is None else max_n
    if n > cap:
        raise CapacityError(
            f"N={n} exceeds the dense-size cap of {cap} qubits "
            f"(raise it with {MAX_QUBITS_ENV})"
        )
