"""Equivalence-query learning with a budget of imperfect queries.

A classical equivalence-query learner (here: halving) is run with every
ideal query replaced by repeated Grover-backed imperfect queries. Once a
global budget ``R`` of imperfect queries is spent, the learner is abandoned
and the weighted majority vote of the queried hypotheses is returned, each
hypothesis weighted by how many imperfect queries it absorbed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from qpac.concepts import Classifier, ConceptClass, Distribution, distance
from qpac.grover import SUCCESS_FLOOR, GoodSubset, GroverOperator, grover_search
from qpac.sim import SampleOracle


class EqKind(enum.Enum):
    YES = "yes"
    ZERO_MASS = "zero-mass-disagreement"
    COUNTEREXAMPLE = "counterexample"
    FAILURE = "failure"


@dataclass(frozen=True)
class EqResult:
    kind: EqKind
    x: int | None = None
    label: int | None = None

    @property
    def is_yes(self) -> bool:
        # a disagreement of zero mass is indistinguishable from equality
        return self.kind in (EqKind.YES, EqKind.ZERO_MASS)

    @property
    def is_counterexample(self) -> bool:
        return self.kind is EqKind.COUNTEREXAMPLE


class VersionSpaceEmpty(RuntimeError):
    """Every concept was eliminated: the target is not in the class."""


class _BudgetExhausted(Exception):
    pass


def ideal_eq(h: Classifier, c: Classifier, dist: Distribution,
             rng: np.random.Generator) -> EqResult:
    """YES if ``h == c``; otherwise a counterexample drawn from ``dist`` on the disagreement set."""
    if len(h) != len(c) or len(c) != len(dist):
        raise ValueError("hypothesis, concept and distribution must share a domain")
    disagree = h.table != c.table
    if not disagree.any():
        return EqResult(EqKind.YES)
    p = np.where(disagree, dist.probs, 0.0)
    total = p.sum()
    if total <= 0:
        return EqResult(EqKind.ZERO_MASS)
    cdf = np.cumsum(p)
    x = min(int(np.searchsorted(cdf, rng.random() * total, side="right")), len(cdf) - 1)
    return EqResult(EqKind.COUNTEREXAMPLE, x, c[x])


def imperfect_eq(h: Classifier, oracle: SampleOracle, epsilon: float,
                 rng: np.random.Generator, op: GroverOperator | None = None) -> EqResult:
    """One Grover search for a pair ``(x, 1 - h(x))``.

    A hit is a counterexample; a miss still yields a correctly labelled
    example, reported as ``FAILURE``.
    """
    if op is None:
        op = GroverOperator(oracle, GoodSubset.counterexamples(h))
    out = grover_search(oracle, op.good, epsilon, rng, op=op)
    kind = EqKind.COUNTEREXAMPLE if out.succeeded else EqKind.FAILURE
    return EqResult(kind, out.x, out.b)


def majority_vote(table: np.ndarray) -> Classifier:
    """Pointwise unweighted majority of the rows of ``table``; ties go to 0."""
    return Classifier((2 * table.sum(axis=0, dtype=np.int64) > table.shape[0]).astype(np.uint8))


@dataclass
class HalvingResult:
    hypothesis: Classifier
    queries: list[tuple[Classifier, EqResult]] = field(default_factory=list)

    @property
    def n_queries(self) -> int:
        return len(self.queries)


def halving_query_bound(cls: ConceptClass) -> int:
    """``floor(log2 |C|) + 1``."""
    return len(cls).bit_length()


def halving_learner(cls: ConceptClass, eq) -> HalvingResult:
    """Query the majority vote of the version space until YES or one concept remains.

    ``eq`` maps a hypothesis to an :class:`EqResult`. Each counterexample
    removes the concepts that voted with the majority at that point, which
    is at least half of them.
    """
    alive = np.ones(len(cls), dtype=bool)
    result = HalvingResult(hypothesis=None)
    while True:
        version_space = cls.table[alive]
        if version_space.shape[0] == 0:
            raise VersionSpaceEmpty("counterexamples are inconsistent with every concept")
        if version_space.shape[0] == 1:
            result.hypothesis = Classifier(version_space[0])
            return result
        h = majority_vote(version_space)
        res = eq(h)
        result.queries.append((h, res))
        if res.is_yes:
            result.hypothesis = h
            return result
        if not res.is_counterexample:
            raise ValueError(f"equivalence query returned {res.kind}, expected YES or a counterexample")
        alive &= cls.table[:, res.x] == res.label


def wmv(hypotheses, weights) -> Classifier:
    """Weighted majority vote; a point whose weight splits exactly in half gets 0."""
    if len(hypotheses) == 0:
        raise ValueError("weighted majority vote of an empty set")
    w = np.asarray(weights)
    if w.shape != (len(hypotheses),) or np.any(w < 0) or not w.sum() > 0:
        raise ValueError("weights must be non-negative, one per hypothesis, with positive total")
    table = np.array([h.table for h in hypotheses], dtype=np.int64)
    if np.issubdtype(w.dtype, np.integer):
        ones = w.astype(np.int64) @ table
        return Classifier((2 * ones > w.sum()).astype(np.uint8))
    ones = (w / w.sum()) @ table
    return Classifier((ones > 0.5).astype(np.uint8))


@dataclass
class Transcript:
    hypotheses: list[Classifier] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)

    def add(self, h: Classifier) -> None:
        """Book one imperfect query against ``h``."""
        if self.hypotheses and self.hypotheses[-1] == h:
            self.counts[-1] += 1
        else:
            self.hypotheses.append(h)
            self.counts.append(1)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def time_spent(self) -> np.ndarray:
        n = np.asarray(self.counts, dtype=np.float64)
        return n / n.sum()

    def spend_split(self, c: Classifier, dist: Distribution, epsilon: float) -> tuple[int, int]:
        """(queries on hypotheses at distance >= epsilon, queries on the rest)."""
        feasible = sum(n for h, n in zip(self.hypotheses, self.counts)
                       if distance(h, c, dist) >= epsilon)
        return feasible, self.total - feasible

    def to_list(self) -> list[dict]:
        return [{"hypothesis_bits": h.bits, "n_i": n} for h, n in zip(self.hypotheses, self.counts)]


def budget(t_e: int, delta: float, p: float = SUCCESS_FLOOR) -> int:
    """``ceil(6 T_E / p + 3 ln(1/delta) / (2 p^2))``."""
    if t_e < 0 or not 0 < delta < 1 or not 0 < p <= 1:
        raise ValueError(f"invalid budget parameters T_E={t_e}, delta={delta}, p={p}")
    return math.ceil(6 * t_e / p + 3 / (2 * p * p) * math.log(1 / delta))


@dataclass(frozen=True)
class BudgetParams:
    T_E: int
    delta: float
    p: float = SUCCESS_FLOOR

    @property
    def R(self) -> int:
        return budget(self.T_E, self.delta, self.p)


@dataclass
class LearnResult:
    hypothesis: Classifier
    transcript: Transcript
    T_E: int
    R: int
    epsilon: float
    delta: float
    stopped_by: str
    oracle_calls_forward: int
    oracle_calls_inverse: int

    @property
    def oracle_calls(self) -> int:
        return self.oracle_calls_forward + self.oracle_calls_inverse

    def report(self, truth: Classifier | None = None, dist: Distribution | None = None,
               seed: int | None = None) -> dict:
        out = {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "seed": seed,
            "T_E": self.T_E,
            "R": self.R,
            "stopped_by": self.stopped_by,
            "transcript": self.transcript.to_list(),
            "output_bits": self.hypothesis.bits,
            "distance_to_truth": None,
            "oracle_calls_forward": self.oracle_calls_forward,
            "oracle_calls_inverse": self.oracle_calls_inverse,
        }
        if truth is not None and dist is not None:
            out["distance_to_truth"] = distance(self.hypothesis, truth, dist)
        return out


def learn_with_budget(cls: ConceptClass, oracle: SampleOracle, epsilon: float, delta: float,
                      rng: np.random.Generator, p: float = SUCCESS_FLOOR) -> LearnResult:
    """Halving with imperfect queries under a budget; d(h, c) <= 4 epsilon w.p. >= 1 - 2 delta."""
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise ValueError(f"epsilon and delta must lie in (0, 1), got {epsilon}, {delta}")
    t_e = halving_query_bound(cls)
    r = budget(t_e, delta, p)
    transcript = Transcript()
    f0, i0 = oracle.forward_calls, oracle.inverse_calls

    def eq(h):
        op = GroverOperator(oracle, GoodSubset.counterexamples(h))
        while True:
            if transcript.total >= r:
                raise _BudgetExhausted
            res = imperfect_eq(h, oracle, epsilon, rng, op=op)
            transcript.add(h)
            if res.is_counterexample:
                return res

    try:
        hypothesis = halving_learner(cls, eq).hypothesis
        stopped_by = "backbone"
    except _BudgetExhausted:
        hypothesis = wmv(transcript.hypotheses, transcript.counts)
        stopped_by = "budget"
    return LearnResult(
        hypothesis=hypothesis,
        transcript=transcript,
        T_E=t_e,
        R=r,
        epsilon=epsilon,
        delta=delta,
        stopped_by=stopped_by,
        oracle_calls_forward=oracle.forward_calls - f0,
        oracle_calls_inverse=oracle.inverse_calls - i0,
    )


def pac_learn(cls: ConceptClass, oracle: SampleOracle, epsilon: float, delta: float,
              rng: np.random.Generator, p: float = SUCCESS_FLOOR) -> LearnResult:
    """(epsilon, delta)-PAC learner: the budgeted learner run at (epsilon/4, delta/2).

    The returned record keeps the inner parameters; ``hypothesis`` is the
    learned classifier.
    """
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise ValueError(f"epsilon and delta must lie in (0, 1), got {epsilon}, {delta}")
    return learn_with_budget(cls, oracle, epsilon / 4, delta / 2, rng, p)
