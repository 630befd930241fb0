import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import tv
from qpac.concepts import Classifier, ConceptClass, Distribution, distance, perturbed_delta
from qpac.eqlearn import (BudgetParams, EqKind, EqResult, Transcript, VersionSpaceEmpty, budget,
                          halving_learner, halving_query_bound, ideal_eq, imperfect_eq,
                          learn_with_budget, majority_vote, pac_learn, wmv)
from qpac.grover import (SUCCESS_FLOOR, GoodSubset, conditional_output_distribution,
                         exact_success_probability, iteration_cap)
from qpac.sim import build_sample_oracle, call_report, make_rng


def test_ideal_eq_yes_and_unique_counterexample(rng):
    c = Classifier.from_bits("0110")
    dist = Distribution([0.4, 0.3, 0.2, 0.1])
    assert ideal_eq(c, c, dist, rng).kind is EqKind.YES
    h = Classifier.from_bits("0111")
    for _ in range(20):
        assert ideal_eq(h, c, dist, rng) == EqResult(EqKind.COUNTEREXAMPLE, 3, 0)


def test_ideal_eq_zero_mass_disagreement_counts_as_yes(rng):
    c = Classifier.from_bits("01")
    res = ideal_eq(Classifier.from_bits("00"), c, Distribution.delta(2, 0), rng)
    assert res.kind is EqKind.ZERO_MASS and res.is_yes and not res.is_counterexample


def test_ideal_eq_draws_from_renormalized_restriction():
    c = Classifier.from_bits("000")
    h = Classifier.from_bits("110")
    dist = Distribution([0.3, 0.1, 0.6])
    rng = make_rng(3)
    draws = 10_000
    xs = [ideal_eq(h, c, dist, rng).x for _ in range(draws)]
    frac = xs.count(0) / draws
    assert set(xs) == {0, 1}
    assert abs(frac - 0.75) <= 4 * math.sqrt(0.75 * 0.25 / draws)


def test_imperfect_eq_on_truth_always_fails(rng):
    c = Classifier.from_bits("1011")
    oracle = build_sample_oracle(c, Distribution.uniform(4))
    for _ in range(30):
        res = imperfect_eq(c, oracle, 0.1, rng)
        assert res.kind is EqKind.FAILURE
        # a failure still returns a correctly labelled example
        assert res.label == c[res.x]


def test_imperfect_eq_counterexamples_are_genuine(rng):
    c = Classifier.from_bits("10110010")
    oracle = build_sample_oracle(c, Distribution.random(8, rng))
    h = Classifier.from_bits("00110110")
    for _ in range(200):
        res = imperfect_eq(h, oracle, 0.05, rng)
        if res.is_counterexample:
            assert h[res.x] != c[res.x] == res.label


def test_imperfect_eq_promise_and_law():
    rng = np.random.default_rng(12)
    checked = 0
    while checked < 40:
        n = int(rng.integers(2, 12))
        c = Classifier(rng.integers(0, 2, n))
        h = Classifier(rng.integers(0, 2, n))
        dist = Distribution.random(n, rng)
        gap = distance(h, c, dist)
        if gap == 0:
            continue
        eps = float(rng.uniform(1e-3, gap))
        oracle = build_sample_oracle(c, dist)
        good = GoodSubset.counterexamples(h)
        assert exact_success_probability(oracle, good, eps) >= SUCCESS_FLOOR
        law = conditional_output_distribution(oracle, good, eps)
        assert tv(law.probs, dist.restricted(h.table != c.table).probs) <= 1e-9
        checked += 1


def test_majority_vote_tie_goes_to_zero():
    t = np.array([[1, 1, 0], [0, 1, 0]], dtype=np.uint8)
    assert majority_vote(t).bits == "010"


def test_halving_singleton_class_makes_no_query():
    cls = ConceptClass([[1, 0, 1]])
    res = halving_learner(cls, lambda h: pytest.fail("no query expected"))
    assert res.hypothesis.bits == "101" and res.n_queries == 0


def _adversarial_worst_case(cls, c):
    """Most EQs halving can need for target c, over every choice of counterexample."""
    worst = 0
    stack = [()]
    while stack:
        script = stack.pop()
        branches = []

        def eq(h, script=script, branches=branches):
            k = len(branches)
            options = np.flatnonzero(h.table != c.table)
            if options.size == 0:
                branches.append(0)
                return EqResult(EqKind.YES)
            branches.append(options.size)
            x = int(options[script[k]]) if k < len(script) else int(options[0])
            return EqResult(EqKind.COUNTEREXAMPLE, x, c[x])

        res = halving_learner(cls, eq)
        assert res.hypothesis == c
        worst = max(worst, res.n_queries)
        for k in range(len(script), len(branches)):
            base = script + (0,) * (k - len(script))
            stack += [base + (j,) for j in range(1, branches[k])]
    return worst


def test_halving_worst_case_on_full_class_of_three_points():
    cls = ConceptClass.full(3)
    assert halving_query_bound(cls) == 4
    assert max(_adversarial_worst_case(cls, c) for c in cls) <= 4


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 5), seed=st.integers(0, 2**32 - 1), size=st.integers(1, 20))
def test_halving_halves_version_space(n, seed, size):
    rng = np.random.default_rng(seed)
    cls = ConceptClass(rng.integers(0, 2, (size, n)))
    c = cls[int(rng.integers(len(cls)))]
    dist = Distribution.random(n, rng)
    alive = [np.ones(len(cls), bool)]

    def eq(h):
        res = ideal_eq(h, c, dist, rng)
        if res.is_counterexample:
            nxt = alive[-1] & (cls.table[:, res.x] == res.label)
            assert 2 * nxt.sum() <= alive[-1].sum()
            alive.append(nxt)
        return res

    res = halving_learner(cls, eq)
    assert distance(res.hypothesis, c, dist) == 0
    assert res.n_queries <= halving_query_bound(cls)


def test_halving_rejects_target_outside_class(rng):
    # first query is 00; its only counterexample (x=0, label 1) fits no concept
    cls = ConceptClass([[0, 0], [0, 1]])
    c = Classifier.from_bits("10")
    with pytest.raises(VersionSpaceEmpty):
        halving_learner(cls, lambda h: ideal_eq(h, c, Distribution.uniform(2), rng))


def test_wmv_examples():
    a = Classifier.from_bits("0110")
    assert wmv([a], [3]) == a
    hs = [Classifier.from_bits(b) for b in ("0011", "0101", "1001")]
    votes = np.array([h.table for h in hs]).sum(axis=0)
    assert wmv(hs, [1, 1, 1]).bits == "".join("1" if v >= 2 else "0" for v in votes)
    assert wmv(hs, [1, 1, 1]).bits == "0001"
    assert wmv([Classifier.from_bits("10"), Classifier.from_bits("01")], [5, 5]).bits == "00"
    assert wmv([Classifier.from_bits("10"), Classifier.from_bits("01")], [0.5, 0.5]).bits == "00"
    assert wmv([Classifier.from_bits("10"), Classifier.from_bits("01")], [2, 3]).bits == "01"
    with pytest.raises(ValueError):
        wmv([], [])
    with pytest.raises(ValueError):
        wmv([a], [0])


def test_transcript_merges_consecutive_queries():
    t = Transcript()
    a, b = Classifier.from_bits("01"), Classifier.from_bits("10")
    for h in (a, a, b, b, b, a):
        t.add(h)
    assert t.counts == [2, 3, 1] and t.total == 6
    np.testing.assert_allclose(t.time_spent(), [2 / 6, 3 / 6, 1 / 6])
    c = Classifier.from_bits("01")
    assert t.spend_split(c, Distribution.uniform(2), 0.5) == (3, 3)


def test_budget_values():
    assert budget(10, 0.1) == 1094
    assert math.isclose(6 * 10 / 0.09 + 3 / (2 * 0.09**2) * math.log(10), 1093.07, abs_tol=0.01)
    assert BudgetParams(9, 0.1).R == 1027
    with pytest.raises(ValueError):
        budget(3, 1.0)


def test_learn_singleton_class_uses_no_calls(rng):
    cls = ConceptClass([[1, 1, 0]])
    oracle = build_sample_oracle(cls[0], Distribution.uniform(3))
    res = pac_learn(cls, oracle, 0.1, 0.1, rng)
    assert res.hypothesis == cls[0] and res.oracle_calls == 0
    assert call_report(oracle) == (0, 0, 0)


def test_pac_learn_wraps_parameters(rng):
    cls = ConceptClass.full(4)
    c = cls[5]
    oracle = build_sample_oracle(c, Distribution.uniform(4))
    res = pac_learn(cls, oracle, 0.2, 0.3, rng)
    assert res.epsilon == pytest.approx(0.05) and res.delta == pytest.approx(0.15)
    assert 4 * res.epsilon == pytest.approx(0.2) and 2 * res.delta == pytest.approx(0.3)
    with pytest.raises(ValueError):
        pac_learn(cls, oracle, 0.0, 0.1, rng)


def test_learn_call_audit_and_worst_case():
    cls = ConceptClass.full(6)
    eps, delta = 0.08, 0.2
    for seed in range(10):
        rng = make_rng(seed)
        c = cls[int(rng.integers(len(cls)))]
        dist = perturbed_delta(range(6), 0, eps)
        oracle = build_sample_oracle(c, dist)
        res = pac_learn(cls, oracle, eps, delta, rng)
        assert res.oracle_calls == call_report(oracle).total
        assert res.oracle_calls_forward - res.oracle_calls_inverse == res.transcript.total
        assert res.transcript.total <= res.R
        assert res.oracle_calls <= (1 + 2 * (iteration_cap(eps / 4) - 1)) * res.R
        report = res.report(c, dist, seed)
        assert report["distance_to_truth"] == distance(res.hypothesis, c, dist)
        assert sum(t["n_i"] for t in report["transcript"]) == res.transcript.total


def test_learn_with_budget_exhaustion_returns_wmv():
    # the only disagreement with the first query sits on a point of negligible mass,
    # so the searches keep missing until the budget runs out
    cls = ConceptClass.full(3)
    c = Classifier.from_bits("001")
    dist = Distribution([0.5 - 5e-7, 0.5 - 5e-7, 1e-6])
    oracle = build_sample_oracle(c, dist)
    res = learn_with_budget(cls, oracle, 0.05, 0.2, make_rng(0))
    assert res.stopped_by == "budget"
    assert res.transcript.total == res.R == budget(4, 0.2)
    assert res.hypothesis == wmv(res.transcript.hypotheses, res.transcript.counts)
    assert distance(res.hypothesis, c, dist) < 4 * 0.05
