"""Finite-shot measurement sampling and its statistical analysis."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import beta

from ..errors import ParameterError
from ..quantum_core import num_qubits


@dataclass(frozen=True)
class ShotRecord:
    shots: int
    counts: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ParameterError(f"counts sum to {sum(self.counts.values())}, expected {self.shots}")

    @property
    def n_qubits(self):
        return len(next(iter(self.counts))) if self.counts else 0

    def to_json(self, **kwargs) -> str:
        return json.dumps({"shots": self.shots, "seed": self.seed, "counts": dict(sorted(self.counts.items()))}, **kwargs)

    @classmethod
    def from_json(cls, text) -> "ShotRecord":
        data = json.loads(text)
        return cls(int(data["shots"]), {str(k): int(v) for k, v in data["counts"].items()}, int(data["seed"]))

    def ones(self, qubit) -> int:
        """Number of shots in which ``qubit`` was read out as 1."""
        return sum(c for bits, c in self.counts.items() if bits[qubit] == "1")


def sample_measurements(state, shots, seed) -> ShotRecord:
    """Multinomial computational-basis readout of ``state``."""
    if shots < 1:
        raise ParameterError("shots must be >= 1")
    state = np.asarray(state)
    n = num_qubits(state.size)
    probs = np.abs(state) ** 2
    probs = probs / probs.sum()
    draws = np.random.default_rng(seed).multinomial(shots, probs)
    counts = {format(idx, f"0{n}b"): int(c) for idx, c in enumerate(draws) if c}
    return ShotRecord(int(shots), counts, int(seed))


def jeffreys_interval(successes, trials, level):
    """Equal-tailed Jeffreys interval for a binomial proportion.

    Uses the Beta(x + 1/2, n - x + 1/2) posterior, with the usual boundary
    convention: lower = 0 when x = 0 and upper = 1 when x = n.
    """
    if not 0 < level < 1:
        raise ParameterError(f"level must lie in (0, 1), got {level}")
    if trials < 1 or not 0 <= successes <= trials:
        raise ParameterError(f"invalid counts {successes}/{trials}")
    tail = (1 - level) / 2
    a, b = successes + 0.5, trials - successes + 0.5
    lower = 0.0 if successes == 0 else float(beta.ppf(tail, a, b))
    upper = 1.0 if successes == trials else float(beta.ppf(1 - tail, a, b))
    return lower, upper


def _inversion_from_p1(p1, z_initial):
    return abs(z_initial - (1 - 2 * p1)) / 2


def credible_interval(record: ShotRecord, qubit, level=0.68, z_initial=1.0):
    """Credible interval on the inversion probability of ``qubit``.

    The interval on the probability of reading 1 is mapped through
    P = |z_initial - <Z>| / 2 with <Z> = 1 - 2 p1.
    """
    lo, hi = jeffreys_interval(record.ones(qubit), record.shots, level)
    a, b = _inversion_from_p1(lo, z_initial), _inversion_from_p1(hi, z_initial)
    lower, upper = min(a, b), max(a, b)
    # the map has a kink where <Z> crosses z_initial
    p_kink = (1 - z_initial) / 2
    if lo < p_kink < hi:
        lower = 0.0
    return lower, upper


def inversion_estimate(record: ShotRecord, qubit, z_initial=1.0):
    return _inversion_from_p1(record.ones(qubit) / record.shots, z_initial)


def chi_squared(measured, theory, delta):
    """(1/n) sum ((P - P_th) / dP)^2."""
    measured, theory, delta = (np.asarray(x, dtype=float) for x in (measured, theory, delta))
    if not measured.shape == theory.shape == delta.shape or measured.ndim != 1:
        raise ParameterError("chi_squared needs three 1-D series of equal length")
    if measured.size == 0:
        raise ParameterError("chi_squared needs at least one point")
    if np.any(delta <= 0):
        raise ParameterError("uncertainties must be strictly positive")
    return float(np.mean(((measured - theory) / delta) ** 2))
