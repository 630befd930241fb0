"""Grover operator built from oracle calls, and randomized-iteration search.

The search draws the iteration count uniformly from ``0 .. M-1`` with
``M = ceil(2 / sqrt(epsilon))``, which finds a good labelled example with
probability at least 0.09 whenever the good set carries mass ``>= epsilon``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qpac import kernels
from qpac.concepts import Classifier, Distribution
from qpac.sim import RegisterLayout, SampleOracle, StateVector, measure

SUCCESS_FLOOR = 0.09


class SingularAngleError(ValueError):
    """The closed-form success probability is undefined at sin(2 theta) = 0."""


class GoodSubset:
    """Set of target pairs ``(x, b)``; spans the good subspace."""

    __slots__ = ("pairs",)

    def __init__(self, pairs=()):
        pairs = frozenset((int(x), int(b)) for x, b in pairs)
        if any(b not in (0, 1) or x < 0 for x, b in pairs):
            raise ValueError("good pairs must be (x >= 0, b in {0, 1})")
        self.pairs = pairs

    @classmethod
    def counterexamples(cls, h: Classifier) -> GoodSubset:
        """Pairs ``(x, 1 - h(x))``: measuring one of these refutes ``h``."""
        return cls((x, 1 - h[x]) for x in range(len(h)))

    @classmethod
    def everything(cls, n: int) -> GoodSubset:
        return cls((x, b) for x in range(n) for b in (0, 1))

    def mask(self, layout: RegisterLayout) -> np.ndarray:
        """uint8 indicator over basis positions (ancillas unconstrained)."""
        m = np.zeros(layout.dim, dtype=np.uint8)
        for x, b in self.pairs:
            if x >= layout.index_dim:
                raise ValueError(f"good pair ({x}, {b}) outside the index register")
            start = layout.position(x, b, 0)
            m[start:start + layout.ancilla_dim] = 1
        return m

    def mass(self, concept: Classifier, dist: Distribution) -> float:
        """Probability that a labelled example ``(X, c(X))`` lands in the set."""
        return float(sum(dist.probs[x] for x, b in self.pairs if concept[x] == b))

    def __contains__(self, pair):
        return tuple(pair) in self.pairs

    def __len__(self):
        return len(self.pairs)

    def __repr__(self):
        return f"GoodSubset({sorted(self.pairs)})"


@dataclass(frozen=True)
class GroverOutcome:
    x: int
    b: int
    succeeded: bool
    iterations_used: int
    oracle_calls: int


@dataclass(frozen=True)
class GroverAngles:
    theta: float
    M: int


def iteration_cap(epsilon: float) -> int:
    """``M = ceil(2 / sqrt(epsilon))``, robust to float noise at exact integers."""
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    m = 2.0 / math.sqrt(epsilon)
    r = round(m)
    return int(r) if abs(m - r) < 1e-9 else math.ceil(m)


def reflection(about, layout: RegisterLayout | None = None) -> np.ndarray:
    """``1 - 2 P`` for the span of a good subset or of a single state."""
    if isinstance(about, StateVector):
        psi = about.amplitudes
        return np.eye(psi.size, dtype=np.complex128) - 2 * np.outer(psi, psi.conj())
    if layout is None:
        raise ValueError("a layout is required to reflect about a good subset")
    return np.diag(1.0 - 2.0 * about.mask(layout)).astype(np.complex128)


def _propagate(oracle: SampleOracle, mask: np.ndarray, amps: np.ndarray, n: int) -> None:
    if oracle.axis is not None:
        kernels.axis_grover_power(amps, oracle.axis, oracle.in_index, mask, n)
    else:
        kernels.dense_grover_power(amps, oracle.matrix, oracle.in_index, mask, n)


def _good_mass_trajectory(oracle: SampleOracle, mask: np.ndarray, m: int) -> np.ndarray:
    amps = oracle.target.copy()
    if oracle.axis is not None:
        return kernels.axis_good_mass_trajectory(amps, oracle.axis, oracle.in_index, mask, m)
    return kernels.dense_good_mass_trajectory(amps, oracle.matrix, oracle.in_index, mask, m)


class GroverOperator:
    """``D = -(O R_IN O^H) R_G``; every application costs one O and one O^H call."""

    def __init__(self, oracle: SampleOracle, good: GoodSubset):
        self.oracle = oracle
        self.good = good
        self.mask = good.mask(oracle.layout)

    def apply(self, state: StateVector, times: int = 1) -> StateVector:
        if state.layout != self.oracle.layout:
            raise ValueError("state and oracle layouts differ")
        amps = state.amplitudes.copy()
        self.power_inplace(amps, times)
        return StateVector(amps, state.layout, check=False)

    def power_inplace(self, amps: np.ndarray, times: int) -> None:
        if times < 0:
            raise ValueError("cannot apply a negative number of iterations")
        _propagate(self.oracle, self.mask, amps, times)
        self.oracle.charge(forward=times, inverse=times)

    def matrix(self) -> np.ndarray:
        """Dense ``D`` assembled from the oracle matrix (no calls charged)."""
        o = self.oracle.matrix
        r_in = np.eye(o.shape[0], dtype=np.complex128)
        r_in[self.oracle.in_index, self.oracle.in_index] = -1
        return -(o @ r_in @ o.conj().T) @ np.diag(1.0 - 2.0 * self.mask)


def grover_operator(oracle: SampleOracle, good: GoodSubset) -> GroverOperator:
    return GroverOperator(oracle, good)


def grover_angles(oracle: SampleOracle, good: GoodSubset, epsilon: float) -> GroverAngles:
    mass = float(np.sum(np.abs(oracle.target[good.mask(oracle.layout).view(bool)]) ** 2))
    return GroverAngles(math.asin(math.sqrt(min(mass, 1.0))), iteration_cap(epsilon))


def grover_search(oracle: SampleOracle, good: GoodSubset, epsilon: float,
                  rng: np.random.Generator, op: GroverOperator | None = None) -> GroverOutcome:
    """Prepare the sample, apply ``D`` a uniform random number of times, measure.

    ``op`` may be passed to reuse a prebuilt operator for the same
    ``(oracle, good)`` pair.
    """
    m = iteration_cap(epsilon)
    if op is None:
        op = GroverOperator(oracle, good)
    n = int(rng.integers(m))
    amps = np.zeros(oracle.layout.dim, dtype=np.complex128)
    amps[oracle.in_index] = 1.0
    amps = oracle.act(amps)
    op.power_inplace(amps, n)
    outcome = measure(StateVector(amps, oracle.layout, check=False), rng)
    return GroverOutcome(
        x=outcome.index,
        b=outcome.label,
        succeeded=(outcome.index, outcome.label) in good,
        iterations_used=n,
        oracle_calls=1 + 2 * n,
    )


def exact_success_probability(oracle: SampleOracle, good: GoodSubset, epsilon: float) -> float:
    """Average over N < M of the good-subspace weight of ``D^N psi``.

    Pure analysis on the oracle's matrix; the call counters are untouched.
    """
    m = iteration_cap(epsilon)
    mask = good.mask(oracle.layout)
    if not np.any(oracle.target[mask.view(bool)]):
        # psi is then a fixed point of D, so no amplitude ever reaches G
        return 0.0
    return float(np.mean(_good_mass_trajectory(oracle, mask, m)))


def closed_form_ps(theta: float, M: int) -> float:
    s2 = math.sin(2 * theta)
    if abs(s2) < 1e-12:
        raise SingularAngleError(f"sin(2 theta) vanishes at theta={theta!r}")
    return 0.5 - math.sin(4 * M * theta) / (4 * M * s2)


def conditional_output_distribution(oracle: SampleOracle, good: GoodSubset,
                                    epsilon: float) -> Distribution:
    """Exact law of the measured index given that the search succeeded."""
    mask = good.mask(oracle.layout)
    if not np.any(np.abs(oracle.target[mask.view(bool)]) > 0):
        raise ValueError("good subset has zero mass; conditional law undefined")
    m = iteration_cap(epsilon)
    amps = oracle.target.copy()
    weight = np.zeros(oracle.layout.dim)
    for n in range(m):
        if n:
            _propagate(oracle, mask, amps, 1)
        weight += np.abs(amps) ** 2
    weight *= mask
    per_index = np.bincount(oracle.layout.index_of(), weights=weight,
                            minlength=oracle.layout.index_dim)
    return Distribution(per_index / per_index.sum())
