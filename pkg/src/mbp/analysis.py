"""Allocation diagnostics: blocking pairs, efficiency, justified envy, and
the small-market enumeration oracles (envyfree set, IA Nash outcomes)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._backend import core
from .conditions import InputTooLargeError
from .market import OUTSIDE, Allocation, Market, pack_market
from .mechanisms import ia, school_da, student_da

VACANCY = "vacancy"
PRIORITY = "priority"


@dataclass(frozen=True)
class BlockingPair:
    """A (student, school) pair violating envyfreeness.

    reason PRIORITY carries the lowest-priority occupant outranked by the
    student; reason VACANCY means the school (or the outside option, for
    an individually irrational assignment) has room.
    """

    student: int
    school: int
    reason: str
    occupant: Optional[int] = None


def _preferred_schools(market: Market, i: int, assigned: int) -> tuple[list[int], bool]:
    """Schools i strictly prefers to their assignment, plus whether i also
    prefers the outside option (true only for an unacceptable assignment)."""
    prefs = market.preferences[i]
    if assigned == OUTSIDE:
        return list(prefs), False
    if assigned in prefs:
        return list(prefs[: prefs.index(assigned)]), False
    return list(prefs), True


def blocking_pairs(market: Market, alloc: Allocation) -> list[BlockingPair]:
    """All pairs blocking the allocation, in (student, preference) order."""
    occupants: list[list[int]] = [[] for _ in range(market.m)]
    for i, s in enumerate(alloc.assignment):
        if s != OUTSIDE:
            occupants[s].append(i)
    rank = [
        {i: r for r, i in enumerate(market.priorities[s])}
        for s in range(market.m)
    ]
    pairs: list[BlockingPair] = []
    for i in range(market.n):
        preferred, prefers_outside = _preferred_schools(
            market, i, alloc.assignment[i]
        )
        for s in preferred:
            lower = [j for j in occupants[s] if rank[s].get(j, -1) > rank[s][i]]
            if lower:
                worst = max(lower, key=lambda j: rank[s][j])
                pairs.append(BlockingPair(i, s, PRIORITY, worst))
            elif len(occupants[s]) < market.capacities[s]:
                pairs.append(BlockingPair(i, s, VACANCY))
        if prefers_outside:
            pairs.append(BlockingPair(i, OUTSIDE, VACANCY))
    return pairs


def pareto_improvable_students(market: Market, alloc: Allocation) -> set[int]:
    """Students on a strict-improvement cycle or with a strictly improving
    chain to a vacant seat."""
    pm = pack_market(market)
    mask = core.pareto_improvable(
        pm.pref_data, pm.pref_ptr, pm.cap,
        np.asarray(alloc.assignment, dtype=np.int32),
    )
    return {int(i) for i in np.nonzero(mask)[0]}


def is_pareto_efficient(market: Market, alloc: Allocation) -> bool:
    return not pareto_improvable_students(market, alloc)


def justified_envy_students(market: Market, alloc: Allocation) -> set[int]:
    """Students outranking an occupant of a school they prefer (priority
    blocks only; vacancies are wastefulness, not envy)."""
    return {
        p.student for p in blocking_pairs(market, alloc) if p.reason == PRIORITY
    }


def _rank_table(market: Market) -> np.ndarray:
    """ranks[i, s] with column m for OUTSIDE; unacceptable schools rank
    below the outside option (tied at m + 1)."""
    n, m = market.n, market.m
    ranks = np.full((n, m + 1), m + 1, dtype=np.int32)
    for i, prefs in enumerate(market.preferences):
        for r, s in enumerate(prefs):
            ranks[i, s] = r
        ranks[i, m] = len(prefs)
    return ranks


def enumerate_envyfree(market: Market) -> set[Allocation]:
    """All feasible allocations with no blocking pair (exhaustive search)."""
    n, m = market.n, market.m
    if n > 6 or m > 4 or (m and max(market.capacities) > 2):
        raise InputTooLargeError(
            "enumerate_envyfree is gated to n <= 6, m <= 4, q_s <= 2 "
            f"(got n={n}, m={m})"
        )
    if n == 0:
        return {Allocation(())}
    grids = np.indices((m + 1,) * n).reshape(n, -1).T - 1  # rows over students
    A = np.asarray(grids, dtype=np.int32)
    cap = np.asarray(market.capacities, dtype=np.int32)
    counts = np.stack([(A == s).sum(axis=1) for s in range(m)], axis=1) if m else None
    if m:
        A = A[(counts <= cap[None, :]).all(axis=1)]
    ranks = _rank_table(market)
    idx = np.where(A < 0, m, A)
    R = ranks[np.arange(n)[None, :], idx]
    blocked = (R > ranks[:, m][None, :]).any(axis=1)  # outside-option blocks
    prio_rank = np.full((m, n), -1, dtype=np.int32)
    for s in range(m):
        for r, j in enumerate(market.priorities[s]):
            prio_rank[s, j] = r
    for s in range(m):
        occupied = A == s
        filled = occupied.sum(axis=1)
        vac = filled < market.capacities[s]
        worst = np.where(occupied, prio_rank[s][None, :], -1).max(axis=1)
        for i in market.priorities[s]:
            prefers = R[:, i] > ranks[i, s]
            blocked |= prefers & (vac | (worst > prio_rank[s, i]))
    return {
        Allocation(tuple(int(x) for x in row)) for row in A[~blocked]
    }


def envyfree_unique(market: Market) -> bool:
    """Fast uniqueness test via the two lattice extremes."""
    return student_da(market) == school_da(market)


def _ia_strategies(m: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for r in range(m + 1):
        out.extend(itertools.permutations(range(m), r))
    return out


def enumerate_ia_nash_outcomes(market: Market) -> set[Allocation]:
    """Outcomes of all pure Nash equilibria of the immediate-acceptance
    reporting game with ordinal payoffs under true preferences."""
    n, m = market.n, market.m
    if n > 3 or m > 3:
        raise InputTooLargeError(
            f"enumerate_ia_nash_outcomes is gated to n <= 3, m <= 3 (got n={n}, m={m})"
        )
    strategies = _ia_strategies(m)
    ranks = _rank_table(market)

    def payoff(i: int, assigned: int) -> int:
        return int(ranks[i, m if assigned == OUTSIDE else assigned])

    outcomes: dict[tuple[int, ...], tuple[int, ...]] = {}
    for profile in itertools.product(range(len(strategies)), repeat=n):
        reports = [strategies[k] for k in profile]
        outcomes[profile] = ia(market, reports).assignment
    nash: set[Allocation] = set()
    for profile, outcome in outcomes.items():
        stable = True
        for i in range(n):
            base = payoff(i, outcome[i])
            for dev in range(len(strategies)):
                if dev == profile[i]:
                    continue
                alt = profile[:i] + (dev,) + profile[i + 1 :]
                if payoff(i, outcomes[alt][i]) < base:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            nash.add(Allocation(outcome))
    return nash
