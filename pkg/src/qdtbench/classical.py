"""Classical decision theory: lotteries, expected utility, Savage-style bets.

The quantum side of the package reduces preference to expected utility;
this module provides the classical benchmarks it is measured against:
von Neumann-Morgenstern lotteries with their axiom checks and utility
elicitation, and qualitative-probability bracketing of events through
equipartition bets.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Mapping, Sequence

from .errors import (MissingUtility, NonMonotoneOracle, NotEquipartition,
                     WeightSumError)
from .preference import Comparison

PROB_TOL = 1e-12


class Lottery:
    """A finite probability mixture over reward ids.

    Stored as a merged, id-sorted mapping; probabilities must be
    nonnegative and sum to one.
    """

    __slots__ = ("probs",)

    def __init__(self, outcomes):
        probs: dict[str, float] = {}
        if isinstance(outcomes, Mapping):
            items = outcomes.items()
        else:
            items = [(rid, pr) for pr, rid in outcomes]
        for rid, pr in items:
            pr = float(pr)
            if pr < -PROB_TOL:
                raise WeightSumError(f"negative probability {pr} on {rid!r}")
            probs[str(rid)] = probs.get(str(rid), 0.0) + max(pr, 0.0)
        total = sum(probs.values())
        if abs(total - 1.0) > 1e-9:
            raise WeightSumError(f"lottery probabilities sum to {total!r}")
        self.probs = {k: probs[k] for k in sorted(probs) if probs[k] > 0.0}

    @classmethod
    def delta(cls, rid: str) -> "Lottery":
        return cls({rid: 1.0})

    def prob(self, rid: str) -> float:
        return self.probs.get(rid, 0.0)

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(self.probs)

    def allclose(self, other: "Lottery", tol: float = 1e-9) -> bool:
        keys = set(self.probs) | set(other.probs)
        return all(abs(self.prob(k) - other.prob(k)) <= tol for k in keys)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v:g}" for k, v in self.probs.items())
        return f"Lottery({{{inner}}})"


def mix(a: Lottery, b: Lottery, t: float) -> Lottery:
    """The t : (1-t) mixture of two lotteries."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"mixture weight {t} outside [0, 1]")
    keys = set(a.probs) | set(b.probs)
    return Lottery({k: t * a.prob(k) + (1.0 - t) * b.prob(k) for k in keys})


def expected_utility_classical(lottery: Lottery,
                               utility: Mapping[str, float]) -> float:
    total = 0.0
    for rid, pr in lottery.probs.items():
        if rid not in utility:
            raise MissingUtility(f"no utility for reward {rid!r}")
        total += pr * float(utility[rid])
    return total


# -- lottery oracles -------------------------------------------------------

class LotteryOracle(ABC):
    """Three-way comparator over lotteries."""

    name = "lottery-oracle"

    @abstractmethod
    def compare(self, a: Lottery, b: Lottery) -> Comparison:
        ...


class PMEUOracle(LotteryOracle):
    """Maximizes expected utility; the order every axiom check passes."""

    name = "pmeu"

    def __init__(self, utility: Mapping[str, float], tie: float = 1e-9):
        self.utility = dict(utility)
        self.tie = tie

    def compare(self, a: Lottery, b: Lottery) -> Comparison:
        ua = expected_utility_classical(a, self.utility)
        ub = expected_utility_classical(b, self.utility)
        if abs(ua - ub) <= self.tie:
            return Comparison.TIE
        return Comparison.BETTER if ua > ub else Comparison.WORSE


class LexicographicOracle(LotteryOracle):
    """Compares tracked reward probabilities in strict priority order.

    The classic continuity counterexample: no amount of the second
    priority compensates an arbitrarily small deficit in the first.
    Remaining rewards are ignored entirely.
    """

    name = "lexicographic"

    def __init__(self, priority: Sequence[str], tie: float = 1e-12):
        if not priority:
            raise ValueError("need at least one tracked reward")
        self.priority = list(priority)
        self.tie = tie

    def compare(self, a: Lottery, b: Lottery) -> Comparison:
        for rid in self.priority:
            d = a.prob(rid) - b.prob(rid)
            if abs(d) > self.tie:
                return Comparison.BETTER if d > 0 else Comparison.WORSE
        return Comparison.TIE


# -- elicitation -------------------------------------------------------------

def vnm_elicit(oracle: LotteryOracle, rewards: Sequence[str], r0: str,
               r1: str, tol: float = 1e-6, max_steps: int = 40
               ) -> dict[str, float]:
    """Utility of each reward from indifference against best/worst mixes.

    Bisects t in  t*delta(r1) + (1-t)*delta(r0)  against delta(r).
    Raises NonMonotoneOracle when the oracle contradicts the bracket.
    """
    best = Lottery.delta(r1)
    worst = Lottery.delta(r0)

    def standard(t: float) -> Lottery:
        return mix(best, worst, t)

    values: dict[str, float] = {}
    for rid in rewards:
        if rid == r0:
            values[rid] = 0.0
            continue
        if rid == r1:
            values[rid] = 1.0
            continue
        target = Lottery.delta(rid)
        c0 = oracle.compare(standard(0.0), target)
        if c0 is Comparison.BETTER:
            raise NonMonotoneOracle(
                f"the worst lottery beats {rid!r}; {r0!r} is not the floor")
        c1 = oracle.compare(standard(1.0), target)
        if c1 is Comparison.WORSE:
            raise NonMonotoneOracle(
                f"the best lottery loses to {rid!r}; {r1!r} is not the ceiling")
        if c0 is Comparison.TIE:
            values[rid] = 0.0
            continue
        if c1 is Comparison.TIE:
            values[rid] = 1.0
            continue
        lo, hi = 0.0, 1.0
        u = None
        steps = 0
        while hi - lo > tol and steps < max_steps:
            m = 0.5 * (lo + hi)
            c = oracle.compare(standard(m), target)
            steps += 1
            if c is Comparison.TIE:
                u = m
                break
            if c is Comparison.WORSE:
                lo = m
            else:
                hi = m
        values[rid] = 0.5 * (lo + hi) if u is None else u
    return values


# -- axiom checks ---------------------------------------------------------------

@dataclass
class ClassicalCheck:
    name: str
    status: str           # "pass" | "fail"
    samples: int
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "pass"


def check_vnm_axioms(lotteries: Sequence[Lottery], oracle: LotteryOracle,
                     samples: int = 50, seed: int = 0) -> list[ClassicalCheck]:
    """Sampled mixture-space axiom checks over a finite lottery set.

    Covers ordering (completeness/transitivity on the set),
    independence, the Archimedean property, substitutability,
    mixture monotonicity, and continuity (existence of a unique
    indifference mixture, located by bisection).
    """
    import numpy as np
    rng = np.random.default_rng([seed, 77])
    ls = list(lotteries)
    checks: list[ClassicalCheck] = []

    def describe(l: Lottery) -> dict:
        return {k: float(v) for k, v in l.probs.items()}

    # ordering: completeness + transitivity over the finite set
    fails = []
    n_ord = 0
    for a, b in combinations(range(len(ls)), 2):
        c_ab = oracle.compare(ls[a], ls[b])
        c_ba = oracle.compare(ls[b], ls[a])
        n_ord += 1
        if c_ab is not c_ba.flipped():
            fails.append({"kind": "asymmetry", "a": describe(ls[a]),
                          "b": describe(ls[b])})
    for a, b, c in combinations(range(len(ls)), 3):
        n_ord += 1
        cab = int(oracle.compare(ls[a], ls[b]))
        cbc = int(oracle.compare(ls[b], ls[c]))
        cac = int(oracle.compare(ls[a], ls[c]))
        if cab >= 0 and cbc >= 0 and cac < 0:
            fails.append({"kind": "transitivity",
                          "triple": [describe(ls[x]) for x in (a, b, c)]})
    checks.append(ClassicalCheck("Ordering", "fail" if fails else "pass",
                                 n_ord, fails))

    strict_pairs = [(a, b) for a, b in combinations(range(len(ls)), 2)
                    if oracle.compare(ls[a], ls[b]) is Comparison.BETTER]
    strict_pairs += [(b, a) for a, b in combinations(range(len(ls)), 2)
                     if oracle.compare(ls[a], ls[b]) is Comparison.WORSE]

    # independence: A > B  =>  tA+(1-t)C > tB+(1-t)C  for t in (0, 1]
    fails = []
    n = 0
    for _ in range(samples):
        if not strict_pairs:
            break
        a, b = strict_pairs[rng.integers(len(strict_pairs))]
        c = ls[rng.integers(len(ls))]
        t = float(rng.uniform(0.05, 1.0))
        n += 1
        got = oracle.compare(mix(ls[a], c, t), mix(ls[b], c, t))
        if got is not Comparison.BETTER:
            fails.append({"kind": "independence", "t": t,
                          "a": describe(ls[a]), "b": describe(ls[b]),
                          "c": describe(c), "got": int(got)})
    checks.append(ClassicalCheck("Independence",
                                 "fail" if fails else "pass", n, fails))

    # Archimedean: A > B > C  =>  some interior mixes straddle B
    fails = []
    n = 0
    # every 3-subset has at most one strictly descending arrangement, so
    # scanning permutations cannot skip a chain the list order hides
    chains = [(a, b, c)
              for a, b, c in permutations(range(len(ls)), 3)
              if oracle.compare(ls[a], ls[b]) is Comparison.BETTER
              and oracle.compare(ls[b], ls[c]) is Comparison.BETTER]
    for a, b, c in chains[:samples]:
        n += 1
        hi_ok = any(oracle.compare(mix(ls[a], ls[c], t), ls[b])
                    is Comparison.BETTER
                    for t in (0.9, 0.99, 0.999, 0.9999))
        lo_ok = any(oracle.compare(ls[b], mix(ls[a], ls[c], s))
                    is Comparison.BETTER
                    for s in (0.1, 0.01, 0.001, 0.0001))
        if not (hi_ok and lo_ok):
            fails.append({"kind": "archimedean",
                          "chain": [describe(ls[x]) for x in (a, b, c)],
                          "upper_witness": hi_ok, "lower_witness": lo_ok})
    checks.append(ClassicalCheck("Archimedean",
                                 "fail" if fails else "pass", n, fails))

    # substitutability: A ~ B  =>  mixes with any C stay indifferent
    fails = []
    n = 0
    tie_pairs = [(a, b) for a, b in combinations(range(len(ls)), 2)
                 if oracle.compare(ls[a], ls[b]) is Comparison.TIE]
    for _ in range(samples):
        if not tie_pairs:
            break
        a, b = tie_pairs[rng.integers(len(tie_pairs))]
        c = ls[rng.integers(len(ls))]
        t = float(rng.uniform(0.0, 1.0))
        n += 1
        got = oracle.compare(mix(ls[a], c, t), mix(ls[b], c, t))
        if got is not Comparison.TIE:
            fails.append({"kind": "substitutability", "t": t,
                          "a": describe(ls[a]), "b": describe(ls[b]),
                          "c": describe(c), "got": int(got)})
    checks.append(ClassicalCheck("Substitutability",
                                 "fail" if fails else "pass", n, fails))

    # monotonicity: A > B  =>  more A in the mix is better
    fails = []
    n = 0
    for _ in range(samples):
        if not strict_pairs:
            break
        a, b = strict_pairs[rng.integers(len(strict_pairs))]
        t_hi = float(rng.uniform(0.5, 1.0))
        t_lo = float(rng.uniform(0.0, t_hi - 0.2)) if t_hi > 0.2 else 0.0
        n += 1
        got = oracle.compare(mix(ls[a], ls[b], t_hi), mix(ls[a], ls[b], t_lo))
        if got is not Comparison.BETTER:
            fails.append({"kind": "monotonicity", "t_hi": t_hi, "t_lo": t_lo,
                          "a": describe(ls[a]), "b": describe(ls[b]),
                          "got": int(got)})
    checks.append(ClassicalCheck("Monotonicity",
                                 "fail" if fails else "pass", n, fails))

    # continuity: A > B > C  =>  a unique indifference mixture exists
    fails = []
    n = 0
    for a, b, c in chains[:samples]:
        n += 1
        lo, hi = 0.0, 1.0
        t_star = None
        for _ in range(60):
            m = 0.5 * (lo + hi)
            got = oracle.compare(mix(ls[a], ls[c], m), ls[b])
            if got is Comparison.TIE:
                t_star = m
                break
            if got is Comparison.BETTER:
                hi = m
            else:
                lo = m
        if t_star is None and hi - lo > 1e-12:
            fails.append({"kind": "continuity",
                          "chain": [describe(ls[x]) for x in (a, b, c)],
                          "bracket": [lo, hi]})
    checks.append(ClassicalCheck("Continuity",
                                 "fail" if fails else "pass", n, fails))
    return checks


# -- Savage-style bets --------------------------------------------------------

@dataclass(frozen=True)
class ClassicalAct:
    """A map from world-state ids to payoff ids, total over the state set."""
    payoffs: tuple[tuple[str, str], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> "ClassicalAct":
        return cls(tuple(sorted((str(s), str(x)) for s, x in mapping.items())))

    @classmethod
    def bet(cls, states: Iterable[str], event: Iterable[str], x: str,
            y: str) -> "ClassicalAct":
        """Pays x on the event, y elsewhere."""
        ev = set(event)
        return cls.from_mapping({s: (x if s in ev else y) for s in states})

    def payoff(self, state: str) -> str:
        for s, x in self.payoffs:
            if s == state:
                return x
        raise KeyError(state)

    @property
    def states(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.payoffs)


class ActOracle(ABC):
    """Three-way comparator over classical acts."""

    @abstractmethod
    def compare(self, f: ClassicalAct, g: ClassicalAct) -> Comparison:
        ...


class PlantedMeasureOracle(ActOracle):
    """Expected utility under a hidden probability measure on states."""

    def __init__(self, measure: Mapping[str, float],
                 utility: Mapping[str, float], tie: float = 1e-12):
        total = sum(measure.values())
        if abs(total - 1.0) > 1e-9:
            raise WeightSumError(f"state measure sums to {total!r}")
        self.measure = dict(measure)
        self.utility = dict(utility)
        self.tie = tie

    def _eu(self, f: ClassicalAct) -> float:
        total = 0.0
        for s, x in f.payoffs:
            if x not in self.utility:
                raise MissingUtility(f"no utility for payoff {x!r}")
            total += self.measure.get(s, 0.0) * self.utility[x]
        return total

    def compare(self, f: ClassicalAct, g: ClassicalAct) -> Comparison:
        d = self._eu(f) - self._eu(g)
        if abs(d) <= self.tie:
            return Comparison.TIE
        return Comparison.BETTER if d > 0 else Comparison.WORSE


def savage_probability(oracle: ActOracle, states: Sequence[str],
                       event: Iterable[str], cells: Sequence[Iterable[str]],
                       x: str, y: str) -> tuple[float, float]:
    """Bracket an event's subjective probability with equipartition bets.

    `cells` must partition the state set into n pieces the oracle ranks
    pairwise indifferent (checked via x-on-cell bets; NotEquipartition
    otherwise).  m is the least number of leading cells whose union is
    weakly preferred, as a bet, to betting on the event; the bracket is
    [(m-1)/n, m/n], clamped at zero.  Unions are scanned cumulatively in
    the given cell order, which equipartition makes representative.
    """
    states = list(states)
    cell_sets = [set(c) for c in cells]
    n = len(cell_sets)
    if n == 0:
        raise NotEquipartition("no cells supplied")
    seen: set[str] = set()
    for c in cell_sets:
        if c & seen:
            raise NotEquipartition("cells overlap")
        seen |= c
    if seen != set(states):
        raise NotEquipartition("cells do not cover the state set")
    probes = [ClassicalAct.bet(states, c, x, y) for c in cell_sets]
    for i, j in combinations(range(n), 2):
        if oracle.compare(probes[i], probes[j]) is not Comparison.TIE:
            raise NotEquipartition(
                f"cells {i} and {j} are not ranked equally likely")
    target = ClassicalAct.bet(states, event, x, y)
    union: set[str] = set()
    m = None
    for i in range(n + 1):
        probe = ClassicalAct.bet(states, union, x, y)
        if oracle.compare(probe, target) is not Comparison.WORSE:
            m = i
            break
        if i < n:
            union |= cell_sets[i]
    if m is None:
        m = n
    lo = max(0, m - 1) / n if m > 0 else 0.0
    return (lo, m / n)
