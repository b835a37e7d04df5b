"""Pair orderings for the two-body product formula.

An ordering lists every unordered pair ``(i, j)``, ``i < j``, exactly once.
The first listed pair acts first on the state. Layered orderings additionally
group consecutive vertex-disjoint pairs into parallel layers.

Text form: layers separated by ``;``, pairs by ``,``, e.g.
``"0-1,2-3;0-2,1-3;1-2,0-3"``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError, OrderingError, ParameterError

Pair = tuple


def _norm_pair(p) -> Pair:
    i, j = int(p[0]), int(p[1])
    if i == j:
        raise OrderingError(f"degenerate pair ({i}, {j})")
    return (i, j) if i < j else (j, i)


def _disjoint(pairs) -> bool:
    seen = set()
    for i, j in pairs:
        if i in seen or j in seen:
            return False
        seen.update((i, j))
    return True


@dataclass(frozen=True)
class PairOrdering:
    n: int
    pairs: tuple
    layers: Optional[tuple] = None

    def __post_init__(self):
        pairs = tuple(_norm_pair(p) for p in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if self.layers is not None:
            layers = tuple(tuple(_norm_pair(p) for p in layer) for layer in self.layers)
            object.__setattr__(self, "layers", layers)
            if tuple(p for layer in layers for p in layer) != pairs:
                raise OrderingError("layers do not concatenate to the pair sequence")
            for layer in layers:
                if not _disjoint(layer):
                    raise OrderingError(f"layer {layer} contains overlapping pairs")
        self.validate()

    @classmethod
    def from_layers(cls, n, layers) -> "PairOrdering":
        layers = [list(layer) for layer in layers]
        return cls(n, tuple(p for layer in layers for p in layer), tuple(map(tuple, layers)))

    def validate(self):
        n = self.n
        expected = {(i, j) for i in range(n) for j in range(i + 1, n)}
        seen = set()
        for p in self.pairs:
            if not (0 <= p[0] < n and 0 <= p[1] < n):
                raise OrderingError(f"pair {p} out of range for N={n}")
            if p in seen:
                raise OrderingError(f"pair {p} appears more than once")
            seen.add(p)
        missing = expected - seen
        if missing:
            raise OrderingError(f"ordering is incomplete, missing {sorted(missing)}")

    def reversed(self) -> "PairOrdering":
        layers = None
        if self.layers is not None:
            layers = tuple(tuple(reversed(layer)) for layer in reversed(self.layers))
        return PairOrdering(self.n, tuple(reversed(self.pairs)), layers)

    def to_text(self) -> str:
        groups = self.layers if self.layers is not None else (self.pairs,)
        return ";".join(",".join(f"{i}-{j}" for i, j in g) for g in groups)

    @classmethod
    def from_text(cls, text, n=None) -> "PairOrdering":
        try:
            groups = [
                [tuple(int(x) for x in tok.strip().split("-")) for tok in grp.split(",") if tok.strip()]
                for grp in text.strip().split(";")
            ]
        except ValueError as exc:
            raise OrderingError(f"cannot parse ordering {text!r}") from exc
        if any(len(p) != 2 for g in groups for p in g):
            raise OrderingError(f"cannot parse ordering {text!r}")
        flat = [p for g in groups for p in g]
        if n is None:
            n = 1 + max((max(p) for p in flat), default=0)
        if all(_disjoint(g) for g in groups):
            return cls.from_layers(n, groups)
        if len(groups) > 1:
            raise OrderingError("multi-group orderings must have vertex-disjoint layers")
        return cls(n, tuple(flat))

    def __len__(self):
        return len(self.pairs)


def sorted_ordering(n) -> PairOrdering:
    """Index-sorted ordering (0,1), (0,2), ..., (N-2, N-1)."""
    return PairOrdering(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


@dataclass(frozen=True)
class SwapSchedule:
    """Brickwork SWAP network on a linear chain.

    Attributes:
        ordering: induced interaction order in neutrino labels.
        qubit_map: ``qubit_map[q]`` is the neutrino initially on qubit ``q``.
        swap_layers: adjacent qubit positions ``(q, q+1)`` acted on per layer;
            each entry applies the pair propagator followed by a SWAP.
        final_map: neutrino sitting on each qubit after the network.
    """

    ordering: PairOrdering
    qubit_map: tuple
    swap_layers: tuple
    final_map: tuple


def swap_network_ordering(n, qubit_map=None) -> SwapSchedule:
    """Depth-N brickwork network alternating even and odd adjacent pairs."""
    if n < 2:
        raise ParameterError("a SWAP network needs N >= 2")
    qubit_map = tuple(range(n)) if qubit_map is None else tuple(int(q) for q in qubit_map)
    if sorted(qubit_map) != list(range(n)):
        raise ParameterError(f"{qubit_map} is not a permutation of range({n})")
    pos = list(qubit_map)
    layers, order_layers = [], []
    for layer in range(n):
        gates = tuple((q, q + 1) for q in range(layer % 2, n - 1, 2))
        if not gates:
            continue
        layers.append(gates)
        order_layers.append([(pos[q], pos[q + 1]) for q, _ in gates])
        for q, _ in gates:
            pos[q], pos[q + 1] = pos[q + 1], pos[q]
    ordering = PairOrdering.from_layers(n, order_layers)
    return SwapSchedule(ordering, qubit_map, tuple(layers), tuple(pos))


def round_robin_layers(n) -> PairOrdering:
    """Circle-method 1-factorization: N-1 full layers for even N, N for odd N."""
    if n < 2:
        raise ParameterError("round robin needs N >= 2")
    m = n if n % 2 == 0 else n + 1
    ring = list(range(1, m))
    layers = []
    for r in range(m - 1):
        current = [0] + ring[r:] + ring[:r]
        layer = []
        for k in range(m // 2):
            a, b = current[k], current[m - 1 - k]
            if a < n and b < n:
                layer.append(_norm_pair((a, b)))
        layers.append(sorted(layer))
    return PairOrdering.from_layers(n, layers)


def one_factorizations(n):
    """All partitions of the complete pair graph on even ``n`` into perfect matchings.

    Yields tuples of matchings; each matching is a sorted tuple of pairs and the
    matchings are sorted, so every factorization appears exactly once.
    """
    if n % 2:
        raise ParameterError("1-factorizations need even N")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    matchings = []

    def build(remaining, acc):
        if not remaining:
            matchings.append(tuple(sorted(acc)))
            return
        a = remaining[0]
        for b in remaining[1:]:
            build([v for v in remaining if v not in (a, b)], acc + [(a, b)])

    build(list(range(n)), [])
    matchings.sort()
    index = {m: k for k, m in enumerate(matchings)}
    covers = {p: [index[m] for m in matchings if p in m] for p in pairs}

    # the matching covering the first uncovered pair is unique within a
    # factorization, so each factorization is produced exactly once
    def search(used, chosen):
        if len(used) == len(pairs):
            yield tuple(sorted(matchings[k] for k in chosen))
            return
        first_free = next(p for p in pairs if p not in used)
        for k in covers[first_free]:
            m = matchings[k]
            if not any(p in used for p in m):
                yield from search(used | set(m), chosen + [k])

    yield from search(frozenset(), [])


def layered_candidates(n):
    """Every layer order of every 1-factorization (pairs sorted inside a layer)."""
    if n % 2:
        for fact in one_factorizations(n + 1):
            trimmed = [tuple(p for p in m if n not in p) for m in fact]
            for perm in itertools.permutations(trimmed):
                yield PairOrdering.from_layers(n, perm)
        return
    for fact in one_factorizations(n):
        for perm in itertools.permutations(fact):
            yield PairOrdering.from_layers(n, perm)


# Recorded from exhaustive_search(4, 10.0) over all 3-layer orderings.
OPTIMAL_N4_TEXT = "0-2,1-3;0-1,2-3;0-3,1-2"
OPTIMAL_N4_ERROR_DT10 = 0.11663321025669407


def optimal_ordering_n4() -> PairOrdering:
    """Three-layer N=4 ordering with minimal single-step error (last layer {(1,2),(0,3)})."""
    return PairOrdering.from_text(OPTIMAL_N4_TEXT, 4)


SEQUENCE_SEARCH_MAX_N = 4
LAYERED_SEARCH_MAX_N = 6
_TIE_RTOL = 1e-9


def exhaustive_search(n, dt, objective="measured_norm", mode="layered", J=None):
    """Ordering minimizing ``objective`` at time step ``dt``.

    Args:
        n: number of neutrinos.
        dt: positive time step.
        objective: ``"measured_norm"`` (spectral error of the first order
            product) or ``"commutator_bound"``.
        mode: ``"layered"`` searches layer orders of all 1-factorizations,
            ``"sequence"`` searches all pair permutations.
        J: coupling matrix; defaults to the standard angular grid.

    Returns:
        ``(ordering, value)``. Values within a relative 1e-9 are treated as
        ties and resolved by the lexicographically smallest pair sequence.
    """
    from .evolution import two_body_error
    from .model import CouplingModel, build_couplings, two_body_matrix
    from .quantum_core import HermitianPropagator

    if dt <= 0:
        raise ParameterError("dt must be positive")
    if objective not in ("measured_norm", "commutator_bound"):
        raise ParameterError(f"unknown objective {objective!r}")
    if mode == "sequence":
        if n > SEQUENCE_SEARCH_MAX_N:
            raise CapacityError(
                f"sequence search limited to N <= {SEQUENCE_SEARCH_MAX_N}; use mode='layered'"
            )
        base = sorted_ordering(n).pairs
        candidates = (PairOrdering(n, seq) for seq in itertools.permutations(base))
    elif mode == "layered":
        if n > LAYERED_SEARCH_MAX_N:
            raise CapacityError(f"layered search limited to N <= {LAYERED_SEARCH_MAX_N}")
        candidates = layered_candidates(n)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    if n < 2:
        raise ParameterError("ordering search needs N >= 2")
    if J is None:
        J = build_couplings(CouplingModel(n))

    if objective == "measured_norm":
        exact = HermitianPropagator(two_body_matrix(J, n)).unitary(dt)

        def score(o):
            return two_body_error(dt, o, J, n, exact=exact)
    else:
        terms = _pair_terms(J, n)

        def score(o):
            return ordering_commutator_bound(o, J, dt, terms=terms)

    best, best_val = None, math.inf
    for cand in candidates:
        val = score(cand)
        if best is None or val < best_val * (1 - _TIE_RTOL):
            best, best_val = cand, val
        elif val <= best_val * (1 + _TIE_RTOL) + 1e-15 and cand.pairs < best.pairs:
            best, best_val = cand, min(val, best_val)
    return best, float(best_val)


def _pair_terms(J, n):
    from .model import two_body_matrix

    terms = {}
    for i in range(n):
        for j in range(i + 1, n):
            Jp = np.zeros_like(np.asarray(J, dtype=float))
            Jp[i, j] = Jp[j, i] = J[i, j]
            terms[(i, j)] = two_body_matrix(Jp, n)
    return terms


def ordering_commutator_bound(ordering: PairOrdering, J, dt, terms=None) -> float:
    """(dt^2 / 2) sum_K || sum_{L > K} [h_K, h_L] || in the ordering's sequence order."""
    from .quantum_core import spectral_norm

    n = ordering.n
    if terms is None:
        terms = _pair_terms(J, n)
    mats = [terms[p] for p in ordering.pairs]
    total = 0.0
    suffix = np.zeros_like(mats[0]) if mats else None
    # walk backwards so suffix = sum_{L > K} h_L
    for K in range(len(mats) - 1, -1, -1):
        if K < len(mats) - 1:
            hK = mats[K]
            total += spectral_norm(hK @ suffix - suffix @ hK)
        suffix = suffix + mats[K]
    return 0.5 * dt**2 * total


def preset_ordering(name, n) -> PairOrdering:
    """Named orderings: ``sn4``, ``oo4``, ``sn`` (identity-map SWAP network), ``rr``, ``sorted``."""
    if name == "oo4":
        if n != 4:
            raise ParameterError("preset 'oo4' is defined for N=4 only")
        return optimal_ordering_n4()
    if name == "sn4":
        if n != 4:
            raise ParameterError("preset 'sn4' is defined for N=4 only")
        return swap_network_ordering(4, (0, 2, 1, 3)).ordering
    if name == "sn":
        return swap_network_ordering(n).ordering
    if name == "rr":
        return round_robin_layers(n)
    if name == "sorted":
        return sorted_ordering(n)
    raise ParameterError(f"unknown ordering preset {name!r}")


def resolve_ordering(spec, n) -> PairOrdering:
    """Accept a preset name, serialized text, or a PairOrdering."""
    if isinstance(spec, PairOrdering):
        if spec.n != n:
            raise OrderingError(f"ordering is for N={spec.n}, expected N={n}")
        return spec
    if spec is None:
        return sorted_ordering(n)
    if any(c.isdigit() for c in spec) and "-" in spec:
        return PairOrdering.from_text(spec, n)
    return preset_ordering(spec, n)
