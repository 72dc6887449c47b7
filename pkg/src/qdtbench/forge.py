"""Constructive act factory.

The richness side of the theory asserts that certain acts exist: pure
reward deliveries, in-reward branchings, record erasures, and compatible
combinations of blocks on orthogonal domains.  This module actually
builds them at desk scale.  An ActForge tracks, per macrostate, how many
basis directions earlier constructions in the same session consumed, so
successive images land on fresh orthogonal directions; when a request
cannot be honoured it raises instead of silently reusing directions.

Stateless operations (identity, restriction, composition) are plain
functions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (CannotOrthogonalize, DomainMismatch,
                     InsufficientDimension, NormMismatch, NotSubevent,
                     OutsideDomain, WeightSumError, ZeroSubspace)
from .hilbert import (PartialIsometryAct, StateVector, Subspace, TOL_NORM,
                      TOL_ORTH, TOL_RANK, _orthonormal_columns)
from .problem import (Macrostate, QuantumDecisionProblem, Reward,
                      smallest_event_ids)

WEIGHT_TOL = 1e-12


def identity_act(event: Subspace) -> PartialIsometryAct:
    """The act that leaves every state of the event untouched."""
    if event.is_zero:
        raise ZeroSubspace("the identity act needs a nonzero event")
    return PartialIsometryAct(event, event.basis.copy())


def restrict_act(act: PartialIsometryAct, sub: Subspace,
                 tol: float = TOL_ORTH) -> PartialIsometryAct:
    """The same act on a subevent of its domain."""
    if not act.domain.contains_subspace(sub, tol):
        raise NotSubevent("restriction target is not inside the act's domain")
    if sub.is_zero:
        raise ZeroSubspace("cannot restrict an act to the zero subspace")
    coords = act.domain.basis.conj().T @ sub.basis
    return PartialIsometryAct(sub, act.matrix @ coords)


def compose_acts(p: QuantumDecisionProblem, outer: PartialIsometryAct,
                 inner: PartialIsometryAct,
                 tol: float = TOL_ORTH) -> PartialIsometryAct:
    """outer after inner; outer must be available on inner's smallest event."""
    event = p.event_of(sorted(smallest_event_ids(p, inner)))
    if not outer.domain.contains_subspace(event, tol):
        raise DomainMismatch(
            "outer act is not defined on the inner act's smallest event")
    coords = outer.domain.basis.conj().T @ inner.matrix
    return PartialIsometryAct(inner.domain, outer.matrix @ coords)


def _check_weights(weights: Sequence[float], *, positive: bool) -> list[float]:
    ws = [float(w) for w in weights]
    if not ws:
        raise WeightSumError("empty weight list")
    if positive and any(w <= 0 for w in ws):
        raise WeightSumError(f"weights must be strictly positive, got {ws}")
    if any(w < 0 for w in ws):
        raise WeightSumError(f"weights must be nonnegative, got {ws}")
    total = sum(ws)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise WeightSumError(f"weights sum to {total!r}, not 1")
    return ws


@dataclass(frozen=True)
class ActRequest:
    """A replayable description of a forge construction.

    kind is one of "identity", "reward", "branching", "erasure-pair",
    "weighted"; params hold the ids/weights needed to rebuild the act in
    a fresh forge.  Witnesses in audit reports carry these so a failure
    can be reconstructed without re-running the whole audit.
    """
    kind: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CompatCombined:
    """Result of a compatible combination.

    `blocks` are the per-domain acts actually embedded (equal to the
    requested ones unless a re-targeting was needed to keep images on
    distinct macrostates).
    """
    act: PartialIsometryAct
    blocks: tuple[PartialIsometryAct, ...]
    retargeted: tuple[bool, ...]


class ActForge:
    """Builds acts for one problem with fresh-direction bookkeeping.

    A forge is single-session state: acts built in one forge are
    guaranteed mutually fresh where the constructions promise it, but a
    new forge starts its cursors from zero.  Use one forge per logical
    construction (the produced acts are plain immutable values).
    """

    def __init__(self, problem: QuantumDecisionProblem):
        self.problem = problem
        self._cursor = {m.id: 0 for m in problem.macrostates}

    # -- allocation ------------------------------------------------------

    def spare(self, mid: str) -> int:
        """Unconsumed basis directions left in a macrostate."""
        return self.problem.macrostate(mid).subspace.dim - self._cursor[mid]

    def _alloc(self, mid: str, count: int) -> np.ndarray:
        if count < 0:
            raise ValueError("allocation count must be nonnegative")
        mac = self.problem.macrostate(mid)
        have = self.spare(mid)
        if count > have:
            raise CannotOrthogonalize(
                f"macrostate {mid!r} has {have} fresh direction(s) left, "
                f"{count} requested")
        start = self._cursor[mid]
        self._cursor[mid] = start + count
        return np.ascontiguousarray(mac.subspace.basis[:, start:start + count])

    # -- helpers -----------------------------------------------------------

    def _macrostate_of(self, psi: StateVector) -> Macrostate:
        unit = psi.unit()
        for m in self.problem.macrostates:
            if m.subspace.contains(unit):
                return m
        raise OutsideDomain("state does not lie inside any single macrostate")

    def _resolve_reward(self, reward) -> Reward:
        if isinstance(reward, Reward):
            return reward
        return self.problem.reward(reward)

    def _resolve_macrostate(self, mac) -> Macrostate:
        if isinstance(mac, Macrostate):
            return mac
        return self.problem.macrostate(mac)

    def _pick_member(self, reward: Reward, need: int,
                     exclude: set[str] = frozenset()) -> str:
        """Lowest-id member with room for `need` fresh directions."""
        for mid in sorted(reward.members):
            if mid in exclude:
                continue
            if self.spare(mid) >= need:
                return mid
        raise InsufficientDimension(
            f"no member of reward {reward.id!r} has {need} fresh "
            f"direction(s) available")

    def _basis_starting_at(self, mac: Macrostate,
                           psi_hat: StateVector) -> np.ndarray:
        """Orthonormal coordinate basis of the macrostate whose first
        vector is psi_hat (modified Gram-Schmidt over the stored basis)."""
        b = mac.subspace.basis
        m = mac.subspace.dim
        first = b.conj().T @ psi_hat.vec
        cols = [first / np.linalg.norm(first)]
        for j in range(m):
            v = np.zeros(m, dtype=np.complex128)
            v[j] = 1.0
            for c in cols:
                v = v - c * np.vdot(c, v)
            n = np.linalg.norm(v)
            if n > 1e-7:
                cols.append(v / n)
            if len(cols) == m:
                break
        if len(cols) != m:
            raise CannotOrthogonalize(
                "failed to complete a basis around the given state")
        return np.column_stack(cols)

    def _embed_state_first(self, psi: StateVector,
                           first_image: np.ndarray,
                           extra_pool: Sequence[str]) -> PartialIsometryAct:
        """Act on psi's macrostate sending psi/|psi| to `first_image` and
        the rest of the macrostate basis to fresh directions drawn from
        `extra_pool` (macrostate ids, scanned in order)."""
        mac = self._macrostate_of(psi)
        m = mac.subspace.dim
        q = self._basis_starting_at(mac, psi.unit())
        images = [first_image]
        needed = m - 1
        for mid in extra_pool:
            if needed == 0:
                break
            take = min(self.spare(mid), needed)
            if take > 0:
                block = self._alloc(mid, take)
                images.extend(block[:, j] for j in range(take))
                needed -= take
        if needed > 0:
            raise InsufficientDimension(
                f"{needed} more fresh direction(s) needed to embed the rest "
                f"of macrostate {mac.id!r}")
        rotated = np.column_stack(images)
        # rotated holds images of the q-basis; convert to the stored basis
        matrix = rotated @ q.conj().T
        try:
            return PartialIsometryAct(mac.subspace, matrix)
        except ValueError as exc:
            # overlapping pool members yield non-orthogonal fresh directions
            raise CannotOrthogonalize(
                f"image directions drawn from {sorted(set(extra_pool))} are "
                f"not mutually orthogonal: {exc}") from exc

    # -- constructions ----------------------------------------------------

    def reward_act(self, mac, reward, target: str | None = None) -> PartialIsometryAct:
        """Embed a whole macrostate into one member of the given reward."""
        m = self._resolve_macrostate(mac)
        r = self._resolve_reward(reward)
        need = m.subspace.dim
        if target is None:
            target = self._pick_member(r, need)
        else:
            if target not in r.members:
                raise NotSubevent(
                    f"{target!r} is not a member of reward {r.id!r}")
            if self.spare(target) < need:
                raise InsufficientDimension(
                    f"member {target!r} has no room for {need} direction(s)")
        return PartialIsometryAct(m.subspace, self._alloc(target, need))

    def branching_act(self, psi: StateVector, weights: Sequence[float],
                      targets: Sequence[str] | None = None) -> PartialIsometryAct:
        """In-reward branching with prescribed squared amplitudes.

        psi must sit inside one macrostate of some reward r; the act
        sends psi/|psi| to a superposition of fresh unit vectors, one in
        each target member of r, with squared amplitude weights[i] on
        the i-th target.  The rest of the macrostate follows into the
        same targets, so the act's image stays inside r.
        """
        ws = _check_weights(weights, positive=True)
        mac = self._macrostate_of(psi)
        r = self.problem.reward(self.problem.reward_of_macrostate(mac.id))
        if targets is None:
            targets = []
            excl: set[str] = set()
            for _ in ws:
                t = self._pick_member(r, 1, exclude=excl)
                targets.append(t)
                excl.add(t)
        else:
            targets = list(targets)
            if len(targets) != len(ws):
                raise WeightSumError("one target per weight required")
            if len(set(targets)) != len(targets):
                raise ValueError("branching targets must be pairwise distinct")
            for t in targets:
                if t not in r.members:
                    raise NotSubevent(
                        f"{t!r} is not a member of reward {r.id!r}; branching "
                        f"must stay inside the macrostate's own reward")
        first = np.zeros(self.problem.dim, dtype=np.complex128)
        for w, t in zip(ws, targets):
            first = first + np.sqrt(w) * self._alloc(t, 1)[:, 0]
        return self._embed_state_first(psi, first, extra_pool=targets)

    def weighted_act(self, psi: StateVector, reward_weights: Mapping[str, float],
                     targets: Mapping[str, str] | None = None) -> PartialIsometryAct:
        """Send psi/|psi| to a superposition across rewards.

        reward_weights maps reward id -> squared amplitude (zero entries
        are dropped; the rest must sum to one).  One fresh unit vector
        is drawn from a member of each weighted reward; the remainder of
        the macrostate follows into the same members.
        """
        items = [(rid, float(w)) for rid, w in sorted(reward_weights.items())
                 if float(w) != 0.0]
        _check_weights([w for _, w in items], positive=True)
        chosen: dict[str, str] = {}
        excl: set[str] = set()
        for rid, _ in items:
            r = self.problem.reward(rid)
            if targets is not None and rid in targets:
                t = targets[rid]
                if t not in r.members:
                    raise NotSubevent(
                        f"{t!r} is not a member of reward {rid!r}")
                if self.spare(t) < 1:
                    raise InsufficientDimension(
                        f"member {t!r} has no fresh directions left")
            else:
                t = self._pick_member(r, 1, exclude=excl)
            chosen[rid] = t
            excl.add(t)
        first = np.zeros(self.problem.dim, dtype=np.complex128)
        for rid, w in items:
            first = first + np.sqrt(w) * self._alloc(chosen[rid], 1)[:, 0]
        return self._embed_state_first(psi, first,
                                       extra_pool=[chosen[r] for r, _ in items])

    def erasure_pair(self, psi1: StateVector, psi2: StateVector
                     ) -> tuple[PartialIsometryAct, PartialIsometryAct]:
        """Two acts erasing which-macrostate records inside one reward.

        psi1 and psi2 must have equal norms and live in macrostates of
        the same reward; the returned acts map them to the *same* state
        inside the reward's erasure macrostate.
        """
        gap = abs(psi1.norm - psi2.norm)
        if gap > TOL_NORM:
            raise NormMismatch(
                f"states differ in norm by {gap:.3e} (tolerance {TOL_NORM})")
        m1 = self._macrostate_of(psi1)
        m2 = self._macrostate_of(psi2)
        r1 = self.problem.reward_of_macrostate(m1.id)
        r2 = self.problem.reward_of_macrostate(m2.id)
        if r1 != r2:
            raise DomainMismatch(
                f"states live in different rewards ({r1!r} vs {r2!r})")
        r = self.problem.reward(r1)
        width = max(m1.subspace.dim, m2.subspace.dim)
        if self.spare(r.erasure) < width:
            raise InsufficientDimension(
                f"erasure macrostate {r.erasure!r} has fewer than {width} "
                f"fresh direction(s)")
        pool = self._alloc(r.erasure, width)
        acts = []
        for mac, psi in ((m1, psi1), (m2, psi2)):
            k = mac.subspace.dim
            q = self._basis_starting_at(mac, psi.unit())
            rotated = pool[:, :k]
            acts.append(PartialIsometryAct(mac.subspace, rotated @ q.conj().T))
        return acts[0], acts[1]

    def compat_combine(self, acts: Sequence[PartialIsometryAct]) -> CompatCombined:
        """One act on the join of orthogonal domains restricting to each block.

        Blocks whose images would share a macrostate with an earlier
        block are re-targeted: the offending image components move to
        fresh directions of an untouched member of the *same* reward, so
        reward-level weights are preserved.  The result satisfies the
        no-recoherence discipline (restrictions to orthogonal subdomains
        have orthogonal smallest events).
        """
        blocks = list(acts)
        if not blocks:
            raise DomainMismatch("nothing to combine")
        p = self.problem
        for i, a in enumerate(blocks):
            for b in blocks[i + 1:]:
                if not a.domain.orthogonal_to(b.domain):
                    raise DomainMismatch(
                        "block domains are not pairwise orthogonal")
        used: set[str] = set()
        out_blocks: list[PartialIsometryAct] = []
        flags: list[bool] = []
        for act in blocks:
            ids = set(smallest_event_ids(p, act))
            conflict = sorted(ids & used)
            if not conflict:
                out_blocks.append(act)
                flags.append(False)
                used |= ids
                continue
            mat = act.matrix.copy()
            for nid in conflict:
                nmac = p.macrostate(nid)
                comp = nmac.subspace.projector() @ mat
                cbasis = _orthonormal_columns(comp, TOL_RANK)
                kn = cbasis.shape[1]
                rid = p.reward_of_macrostate(nid)
                r = p.reward(rid)
                dest = None
                for cand in sorted(r.members):
                    if cand in used or cand in ids:
                        continue
                    if self.spare(cand) >= kn:
                        dest = cand
                        break
                if dest is None:
                    raise CannotOrthogonalize(
                        f"no untouched member of reward {rid!r} can host the "
                        f"re-targeted image of macrostate {nid!r}")
                fresh = self._alloc(dest, kn)
                coeff = cbasis.conj().T @ mat
                mat = mat - cbasis @ coeff + fresh @ coeff
                ids.discard(nid)
                ids.add(dest)
            out_blocks.append(PartialIsometryAct(act.domain, mat))
            flags.append(True)
            used |= ids
        domain = Subspace(np.hstack([b.domain.basis for b in out_blocks]))
        matrix = np.hstack([b.matrix for b in out_blocks])
        return CompatCombined(PartialIsometryAct(domain, matrix),
                              tuple(out_blocks), tuple(flags))

    # -- request protocol ---------------------------------------------------

    def build(self, request: ActRequest):
        """Rebuild an act (or pair) from a replayable request."""
        kind, pr = request.kind, request.params
        if kind == "identity":
            return identity_act(self.problem.event_of(pr["event"]))
        if kind == "reward":
            return self.reward_act(pr["macrostate"], pr["reward"],
                                   target=pr.get("target"))
        if kind == "branching":
            return self.branching_act(StateVector(_decode_state(pr["state"])),
                                      pr["weights"], targets=pr.get("targets"))
        if kind == "weighted":
            return self.weighted_act(StateVector(_decode_state(pr["state"])),
                                     pr["weights"], targets=pr.get("targets"))
        if kind == "erasure-pair":
            return self.erasure_pair(StateVector(_decode_state(pr["state1"])),
                                     StateVector(_decode_state(pr["state2"])))
        raise ValueError(f"unknown act request kind {kind!r}")


def _decode_state(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs])


def encode_state(psi: StateVector) -> list[list[float]]:
    """[re, im] pair encoding used by requests and reports."""
    return [[float(z.real), float(z.imag)] for z in psi.vec]
