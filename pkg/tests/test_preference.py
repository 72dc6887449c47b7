"""Preference order, utility machinery, and the null-pair tests.

Derived numbers are frozen against hand computations noted inline, so a
regression in expected-utility bookkeeping cannot hide behind the same
code computing both sides.
"""

import numpy as np
import pytest

from qdtbench.audit import discriminable_support, null_probe_catalog
from qdtbench.errors import MissingUtility
from qdtbench.forge import ActForge, identity_act
from qdtbench.hilbert import StateVector
from qdtbench.preference import (BornOracle, Comparison, CountingOracle,
                                 TableOracle, UtilityTable, born_compare,
                                 elicit_utility, expected_utility,
                                 is_null_pair, is_standard_act,
                                 make_standard_act, reduce_to_standard,
                                 reward_order, standard_weight)

TOL = 1e-9


def probe_state(p, mid):
    return StateVector(p.macrostate(mid).subspace.basis[:, 0])


# -- expected utility ---------------------------------------------------------

def test_expected_utility_frozen_value(std6):
    # weights (0.2, 0.5, 0.3) on utilities (0, 0.4, 1): EU = 0.5*0.4 + 0.3
    p, util = std6.problem, std6.utility
    psi = probe_state(p, "m0")
    act = ActForge(p).weighted_act(psi, {"r0": 0.2, "rA": 0.5, "r1": 0.3})
    assert expected_utility(p, psi, act, util) == pytest.approx(0.5, abs=TOL)


def test_expected_utility_of_identity_is_own_reward(std6):
    p, util = std6.problem, std6.utility
    psi = probe_state(p, "m2")
    act = identity_act(p.macrostate("m2").subspace)
    assert expected_utility(p, psi, act, util) == pytest.approx(0.4, abs=TOL)


def test_born_compare_follows_eu_sign(std6):
    p, util = std6.problem, std6.utility
    psi = probe_state(p, "m0")
    hi = ActForge(p).weighted_act(psi, {"r1": 1.0})
    lo = ActForge(p).weighted_act(psi, {"r0": 1.0})
    assert born_compare(p, psi, hi, lo, util) is Comparison.BETTER
    assert born_compare(p, psi, lo, hi, util) is Comparison.WORSE
    assert born_compare(p, psi, hi, hi, util) is Comparison.TIE


# -- utility table ------------------------------------------------------------

def test_utility_table_anchor_gauge(std6):
    p = std6.problem
    with pytest.raises(ValueError):
        UtilityTable({"r0": 0.1, "rA": 0.4, "r1": 1.0}, problem=p)
    with pytest.raises(ValueError):
        UtilityTable({"r0": 0.0, "rA": 0.4, "r1": 0.9}, problem=p)
    with pytest.raises(MissingUtility):
        UtilityTable({"r0": 0.0, "r1": 1.0}, problem=p).of("rA")


# -- oracles ------------------------------------------------------------------

def test_counting_oracle_prefers_more_branches(std6):
    p = std6.problem
    oracle = CountingOracle(p)
    psi = probe_state(p, "m4")
    split = ActForge(p).branching_act(psi, (0.5, 0.5))
    stay = identity_act(p.macrostate("m4").subspace)
    assert oracle.compare(psi, split, stay) is Comparison.BETTER


def test_table_oracle_planted_pair_and_flip(std6):
    p, util = std6.problem, std6.utility
    a = identity_act(p.macrostate("m0").subspace).with_label("A")
    b = identity_act(p.macrostate("m0").subspace).with_label("B")
    oracle = TableOracle({("A", "B"): Comparison.BETTER},
                         BornOracle(p, util))
    psi = probe_state(p, "m0")
    assert oracle.compare(psi, a, b) is Comparison.BETTER
    assert oracle.compare(psi, b, a) is Comparison.WORSE
    # unlisted pairs fall back to the expected-utility order
    c = ActForge(p).weighted_act(psi, {"r1": 1.0}).with_label("C")
    assert oracle.compare(psi, c, a) is Comparison.BETTER


# -- standard acts ------------------------------------------------------------

@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.8, 1.0])
def test_standard_act_weight_round_trip(std6, alpha):
    p = std6.problem
    psi = probe_state(p, "m0")
    act = make_standard_act(p, psi, alpha)
    assert is_standard_act(p, psi, act)
    assert standard_weight(p, psi, act) == pytest.approx(alpha, abs=1e-12)


def test_reduce_to_standard_matches_eu(std6):
    p, util = std6.problem, std6.utility
    psi = probe_state(p, "m0")
    act = ActForge(p).weighted_act(psi, {"r0": 0.25, "rA": 0.25, "r1": 0.5})
    std = reduce_to_standard(p, psi, act, util)
    eu = expected_utility(p, psi, act, util)
    assert standard_weight(p, psi, std) == pytest.approx(eu, abs=TOL)
    cmpres = born_compare(p, psi, act, std, util)
    assert cmpres is Comparison.TIE


# -- elicitation --------------------------------------------------------------

def test_elicit_recovers_planted_table(std8):
    p = std8.problem
    planted = std8.utility
    oracle = BornOracle(p, planted)
    res = elicit_utility(p, oracle, tol=1e-6)
    for rid in p.reward_ids:
        assert res.table.of(rid) == pytest.approx(planted.of(rid), abs=2e-6)
        assert res.steps[rid] <= 40


def test_elicit_is_probe_independent(std6):
    p, util = std6.problem, std6.utility
    oracle = BornOracle(p, util)
    t1 = elicit_utility(p, oracle, tol=1e-7, probe="m0").table
    t2 = elicit_utility(p, oracle, tol=1e-7, probe="m3").table
    for rid in p.reward_ids:
        assert t1.of(rid) == pytest.approx(t2.of(rid), abs=1e-6)


def test_reward_order_tiers(std6):
    p, util = std6.problem, std6.utility
    tiers = reward_order(p, BornOracle(p, util))
    assert tiers == [["r1"], ["rA"], ["r0"]]


# -- null pairs ---------------------------------------------------------------

def test_null_criterion_on_disjoint_event(std6):
    p = std6.problem
    phi = probe_state(p, "m0")
    assert is_null_pair(p, p.event_of(["m4"]), phi, method="criterion")
    assert not is_null_pair(p, p.event_of(["m0"]), phi, method="criterion")
    assert is_null_pair(p, p.event_of([]), phi, method="criterion")


def test_null_definitional_agrees_on_single_support(std6):
    p, util = std6.problem, std6.utility
    oracle = BornOracle(p, util)
    phi = probe_state(p, "m0")
    catalog = null_probe_catalog(p, ("m0",))
    for ids in ((), ("m0",), ("m4",), ("m0", "m4")):
        event = p.event_of(list(ids))
        a = is_null_pair(p, event, phi, method="criterion")
        b = is_null_pair(p, event, phi, method="definitional",
                         catalog=catalog, oracle=oracle)
        assert a == b, ids


def test_null_regression_support_covering_best_reward(std6):
    """Support {m1, m4, m5} exhausts the best reward's members, so the
    only discriminating reroute for m1 goes to the middle reward; the
    definitional test must still see that events touching m1 are not
    null."""
    p, util = std6.problem, std6.utility
    support = ("m1", "m4", "m5")
    assert discriminable_support(p, support, util)
    labels = {a.label for a in null_probe_catalog(p, support)}
    assert "null-probe:m1->rA" in labels

    oracle = BornOracle(p, util)
    vec = np.zeros(6, dtype=complex)
    vec[1] = vec[4] = vec[5] = np.sqrt(1 / 3)
    phi = StateVector(vec)
    catalog = null_probe_catalog(p, support)
    event = p.event_of(["m1"])
    assert not is_null_pair(p, event, phi, method="criterion")
    assert not is_null_pair(p, event, phi, method="definitional",
                            catalog=catalog, oracle=oracle)


def test_support_without_discriminating_probe_is_detected(min2):
    # the full min2 support leaves no free member of a different reward
    p, util = min2.problem, min2.utility
    assert discriminable_support(p, ("m0",), util)
    assert not discriminable_support(p, ("m0", "m1"), util)


def test_comparison_flip():
    assert Comparison.BETTER.flipped() is Comparison.WORSE
    assert Comparison.TIE.flipped() is Comparison.TIE
