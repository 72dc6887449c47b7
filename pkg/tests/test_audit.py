"""Availability and rationality audits on the bundled instances.

The matrix here is the heart of the workbench: the expected-utility
oracle must come out clean on every well-formed instance, the two rigged
oracles must fail on exactly the axioms they are rigged to break, and
the rigged instances must be caught by the searches aimed at them.
"""

import json

import numpy as np
import pytest

from qdtbench.audit import (PERTURBATION_RADII, audit_rationality,
                            audit_richness, born_theorem_report, check_lemmas,
                            find_counterexample, perturb_act, act_distance)
from qdtbench.forge import ActForge
from qdtbench.hilbert import StateVector


def failures(report):
    return [r.name for r in report.results if r.status == "fail"]


# -- richness -----------------------------------------------------------------

@pytest.mark.parametrize("name", ["min2", "std6", "std8"])
def test_richness_clean_fixtures(name, request):
    inst = request.getfixturevalue(name)
    report = audit_richness(inst.problem, samples=80, seed=0)
    assert report.ok, failures(report)


def test_richness_catches_irreversible_merge(irrev6):
    report = audit_richness(irrev6.problem, samples=80, seed=0)
    assert failures(report) == ["Irrev"]
    witness = report.result("Irrev").witnesses[0]
    blob = json.dumps(witness)
    assert "m0" in blob and "m1" in blob


# -- rationality --------------------------------------------------------------

@pytest.mark.parametrize("name", ["min2", "std6", "std8"])
def test_born_oracle_is_rational(name, request):
    inst = request.getfixturevalue(name)
    report = audit_rationality(inst.problem, inst.oracle("born"),
                               samples=100, seed=0)
    assert report.ok, failures(report)


def test_counting_oracle_fails_branch_indifference(std6):
    report = audit_rationality(std6.problem, std6.oracle("counting"),
                               samples=100, seed=0)
    assert "BrIndif" in failures(report)
    witness = report.result("BrIndif").witnesses[0]
    assert witness  # replayable payload, not just a flag
    json.dumps(witness)


def test_counting_witness_is_replayable(std6):
    a = audit_rationality(std6.problem, std6.oracle("counting"),
                          samples=100, seed=5)
    b = audit_rationality(std6.problem, std6.oracle("counting"),
                          samples=100, seed=5)
    assert a.to_dict() == b.to_dict()


def test_counting_on_minimal_instance_still_fails(min2):
    # min2 admits no branchings with two or more target members, so the
    # counting oracle slips past BrIndif and is caught by the
    # perturbation probe instead
    report = audit_rationality(min2.problem, min2.oracle("counting"),
                               samples=100, seed=0)
    assert not report.ok
    assert "BrIndif" not in failures(report)
    assert "SolCont" in failures(report)


def test_planted_cycle_fails_ordering(std6):
    report = audit_rationality(std6.problem, std6.oracle("table"),
                               samples=100, seed=0)
    assert "Ord" in failures(report)
    w = report.result("Ord").witnesses[0]
    assert w["kind"] == "transitivity"
    # every reported cycle must run through the planted table entries
    assert set(w["cycle"]) & {"A", "B", "C"}


def test_cycle_detection_is_seed_independent(std6):
    for seed in (1, 2, 3):
        report = audit_rationality(std6.problem, std6.oracle("table"),
                                   samples=100, seed=seed)
        assert "Ord" in failures(report)


# -- lemma chain --------------------------------------------------------------

@pytest.mark.parametrize("name,seed", [("min2", 0), ("std6", 0), ("std6", 1),
                                       ("std8", 0), ("irrev6", 0)])
def test_lemmas_hold_on_orthogonal_fixtures(name, seed, request):
    inst = request.getfixturevalue(name)
    report = check_lemmas(inst.problem, inst.oracle("born"), inst.utility,
                          samples=120, seed=seed)
    assert report.ok, failures(report)


def test_lemmas_break_without_orthogonality(overlap2):
    # with overlapping macrostates the best reward's event spans the
    # whole space, so delivery anywhere ties and the chain collapses
    report = check_lemmas(overlap2.problem, overlap2.oracle("born"),
                          overlap2.utility, samples=60, seed=0)
    bad = failures(report)
    assert "RewardNondegeneracy" in bad
    assert "Dominance" in bad


def test_born_theorem_report_focuses_on_final_lemmas(std6):
    report = born_theorem_report(std6.problem, std6.utility,
                                 samples=80, seed=0)
    assert report.ok
    names = [r.name for r in report.results]
    assert names == ["Dominance", "StandardAct", "BornTheorem"]


# -- counterexample search ----------------------------------------------------

def test_branch_uniqueness_counterexample_on_overlap(overlap2):
    w = find_counterexample(overlap2.problem, overlap2.oracle("born"),
                            "branch-uniqueness", budget=150, seed=0)
    assert w is not None
    assert w["target"] == "branch-uniqueness"
    assert w["witness"]["norm_gap"] > 1e-6
    json.dumps(w)


def test_no_counterexample_on_clean_instance(std6):
    for target in ("branch-uniqueness", "equivalence-step"):
        w = find_counterexample(std6.problem, std6.oracle("born"),
                                target, budget=80, seed=0)
        assert w is None


def test_equivalence_step_counterexample_on_merge(irrev6):
    w = find_counterexample(irrev6.problem, irrev6.oracle("born"),
                            "equivalence-step", budget=150, seed=0)
    assert w is not None
    assert w["witness"]["weight_gap"] > 1e-6
    assert w["witness"]["act"]["label"] == "merge"


def test_rationality_target_reuses_audit(std6):
    w = find_counterexample(std6.problem, std6.oracle("table"),
                            "Ord", budget=100, seed=0)
    assert w is not None


# -- perturbation helper --------------------------------------------------

def test_perturbation_stays_close_and_isometric(std6):
    p = std6.problem
    act = ActForge(p).reward_act("m0", "r1")
    rng = np.random.default_rng(0)
    for radius in PERTURBATION_RADII:
        moved = perturb_act(act, radius, rng)
        g = moved.matrix.conj().T @ moved.matrix
        assert np.allclose(g, np.eye(moved.matrix.shape[1]), atol=1e-9)
        assert act_distance(act, moved) <= 2.0 * radius + 1e-12


# -- report shape -------------------------------------------------------------

def test_reports_serialize_to_plain_json(std6):
    for rep in (audit_richness(std6.problem, samples=40, seed=2),
                audit_rationality(std6.problem, std6.oracle("counting"),
                                  samples=40, seed=2)):
        text = json.dumps(rep.to_dict(), sort_keys=True)
        assert "np." not in text


def test_witness_cap_limits_payload(std6):
    report = audit_rationality(std6.problem, std6.oracle("counting"),
                               samples=200, seed=0)
    for r in report.results:
        assert len(r.witnesses) <= 3
