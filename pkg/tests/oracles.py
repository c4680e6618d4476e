"""Independent reference implementations used as test oracles.

Everything here is written from the definitions, deliberately avoiding the
package's kernels and data layouts, so agreement between the two is
meaningful evidence of correctness.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from mbp.market import OUTSIDE, Market

MAX32 = 2**31 - 1


def random_market(
    rng: np.random.Generator,
    n_max: int = 8,
    m_max: int = 5,
    cap_max: int = 3,
    full_lists: bool = False,
) -> Market:
    """A uniformly scrambled valid market (restricted priorities)."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    caps = tuple(int(c) for c in rng.integers(1, cap_max + 1, size=m))
    prefs = []
    for _ in range(n):
        k = m if full_lists else int(rng.integers(0, m + 1))
        prefs.append(tuple(int(s) for s in rng.permutation(m)[:k]))
    prios = []
    for s in range(m):
        listers = [i for i in range(n) if s in prefs[i]]
        order = rng.permutation(len(listers))
        prios.append(tuple(listers[j] for j in order))
    return Market(caps, tuple(prefs), tuple(prios))


def rank_of(market: Market, i: int, s: int) -> int:
    """Preference rank; OUTSIDE after the list, unlisted schools last."""
    prefs = market.preferences[i]
    if s == OUTSIDE:
        return len(prefs)
    if s in prefs:
        return prefs.index(s)
    return len(prefs) + 1


# ---------------------------------------------------------------------------
# mechanisms


def naive_student_da(market: Market) -> tuple[int, ...]:
    n, m = market.n, market.m
    prio_rank = [
        {i: r for r, i in enumerate(market.priorities[s])} for s in range(m)
    ]
    nxt = [0] * n
    held: list[list[int]] = [[] for _ in range(m)]
    assigned = [OUTSIDE] * n
    free = list(range(n))
    while free:
        i = free.pop()
        prefs = market.preferences[i]
        while nxt[i] < len(prefs):
            s = prefs[nxt[i]]
            nxt[i] += 1
            held[s].append(i)
            held[s].sort(key=prio_rank[s].__getitem__)
            if len(held[s]) <= market.capacities[s]:
                assigned[i] = s
                break
            loser = held[s].pop()
            if loser == i:
                continue
            assigned[loser] = OUTSIDE
            assigned[i] = s
            free.append(loser)
            break
    return tuple(assigned)


def naive_school_da(market: Market) -> tuple[int, ...]:
    n, m = market.n, market.m
    held = [None] * n  # school currently held by each student
    holds_count = [0] * m
    ptr = [0] * m
    changed = True
    while changed:
        changed = False
        for s in range(m):
            prios = market.priorities[s]
            while holds_count[s] < market.capacities[s] and ptr[s] < len(prios):
                j = prios[ptr[s]]
                ptr[s] += 1
                cur = held[j]
                if cur is None or rank_of(market, j, s) < rank_of(market, j, cur):
                    if cur is not None:
                        holds_count[cur] -= 1
                    held[j] = s
                    holds_count[s] += 1
                    changed = True
    return tuple(OUTSIDE if h is None else h for h in held)


def naive_ttc(market: Market) -> tuple[int, ...]:
    n, m = market.n, market.m
    rem = list(market.capacities)
    active = set(range(n))
    assignment = [OUTSIDE] * n
    while active:
        removed = [
            i for i in active
            if not any(rem[s] > 0 for s in market.preferences[i])
        ]
        for i in removed:
            active.remove(i)
        if not active:
            break
        target_student = {
            i: next(s for s in market.preferences[i] if rem[s] > 0)
            for i in active
        }
        target_school = {}
        for s in range(m):
            if rem[s] > 0:
                top = next((j for j in market.priorities[s] if j in active), None)
                if top is not None:
                    target_school[s] = top
        # walk student -> school -> student ... until a student repeats
        i = next(iter(active))
        seen: dict[int, int] = {}
        order = []
        while i not in seen:
            seen[i] = len(order)
            order.append(i)
            i = target_school[target_student[i]]
        cycle = order[seen[i]:]
        for j in cycle:
            s = target_student[j]
            assignment[j] = s
            rem[s] -= 1
            active.remove(j)
    return tuple(assignment)


def naive_ia(market: Market, reports=None) -> tuple[int, ...]:
    """Immediate acceptance; full schools are skipped within the round."""
    if reports is None:
        reports = market.preferences
    n, m = market.n, market.m
    prio_rank = [
        {i: r for r, i in enumerate(market.priorities[s])} for s in range(m)
    ]
    rem = list(market.capacities)
    assignment = [OUTSIDE] * n
    rejected: set[tuple[int, int]] = set()
    active = set(range(n))
    while active:
        proposals: dict[int, list[int]] = {}
        for i in sorted(active):
            choice = next(
                (
                    s for s in reports[i]
                    if rem[s] > 0 and (i, s) not in rejected
                ),
                None,
            )
            if choice is None:
                active.discard(i)
            else:
                proposals.setdefault(choice, []).append(i)
        for s, proposers in proposals.items():
            listed = sorted(
                (i for i in proposers if i in prio_rank[s]),
                key=prio_rank[s].__getitem__,
            )
            for i in listed[: rem[s]]:
                assignment[i] = s
                active.discard(i)
            rem[s] -= min(rem[s], len(listed))
            for i in proposers:
                if assignment[i] != s:
                    rejected.add((i, s))
    return tuple(assignment)


# ---------------------------------------------------------------------------
# allocation diagnostics


def feasible_allocations(market: Market):
    """All assignments of listed schools / OUTSIDE respecting capacities."""
    options = [
        (OUTSIDE,) + market.preferences[i] for i in range(market.n)
    ]
    for combo in itertools.product(*options):
        counts = [0] * market.m
        ok = True
        for s in combo:
            if s != OUTSIDE:
                counts[s] += 1
                if counts[s] > market.capacities[s]:
                    ok = False
                    break
        if ok:
            yield combo


def is_blocked(market: Market, assignment: tuple[int, ...]) -> bool:
    occupants: list[list[int]] = [[] for _ in range(market.m)]
    for i, s in enumerate(assignment):
        if s != OUTSIDE:
            occupants[s].append(i)
    for i in range(market.n):
        mine = rank_of(market, i, assignment[i])
        if mine > len(market.preferences[i]):
            return True  # prefers the outside option (unacceptable seat)
        for s in market.preferences[i]:
            if rank_of(market, i, s) >= mine:
                continue
            if len(occupants[s]) < market.capacities[s]:
                return True
            prio = market.priorities[s]
            if any(prio.index(j) > prio.index(i) for j in occupants[s]):
                return True
    return False


def envyfree_set(market: Market) -> set[tuple[int, ...]]:
    return {
        a for a in feasible_allocations(market) if not is_blocked(market, a)
    }


def dominates(market: Market, b, a) -> bool:
    """b Pareto-dominates a: all weakly better off, someone strictly."""
    strict = False
    for i in range(market.n):
        rb, ra = rank_of(market, i, b[i]), rank_of(market, i, a[i])
        if rb > ra:
            return False
        if rb < ra:
            strict = True
    return strict


def brute_improvable(market: Market, assignment) -> set[int]:
    """Students strictly better off in some Pareto improvement."""
    out: set[int] = set()
    for b in feasible_allocations(market):
        if all(
            rank_of(market, i, b[i]) <= rank_of(market, i, assignment[i])
            for i in range(market.n)
        ):
            out.update(
                i for i in range(market.n)
                if rank_of(market, i, b[i]) < rank_of(market, i, assignment[i])
            )
    return out


def random_feasible_allocation(
    market: Market, rng: np.random.Generator
) -> tuple[int, ...]:
    rem = list(market.capacities)
    out = []
    for i in range(market.n):
        options = [OUTSIDE] + [s for s in market.preferences[i] if rem[s] > 0]
        s = options[int(rng.integers(len(options)))]
        if s != OUTSIDE:
            rem[s] -= 1
        out.append(s)
    return tuple(out)


# ---------------------------------------------------------------------------
# conditions


def _valid_moves(market: Market, remaining: frozenset, rem: tuple):
    for i in sorted(remaining):
        available = [s for s in market.preferences[i] if rem[s] > 0]
        if not available:
            yield i, OUTSIDE
            continue
        s = available[0]
        rank = 0
        for j in market.priorities[s]:
            if j == i:
                break
            if j in remaining:
                rank += 1
        if rank < rem[s]:
            yield i, s


def seq_mbp_oracle(market: Market) -> bool:
    """Backtracking search over every possible pairing order (Def. 2)."""

    @lru_cache(maxsize=None)
    def solvable(remaining: frozenset, rem: tuple) -> bool:
        if not remaining:
            return True
        for i, s in _valid_moves(market, remaining, rem):
            nrem = rem
            if s != OUTSIDE:
                nrem = rem[:s] + (rem[s] - 1,) + rem[s + 1:]
            if solvable(remaining - {i}, nrem):
                return True
        return False

    result = solvable(frozenset(range(market.n)), tuple(market.capacities))
    solvable.cache_clear()
    return result


def seq_mbp_random_order(market: Market, rng: np.random.Generator) -> bool:
    """Greedy run taking a uniformly random valid move at each step."""
    remaining = frozenset(range(market.n))
    rem = tuple(market.capacities)
    while remaining:
        moves = list(_valid_moves(market, remaining, rem))
        if not moves:
            return False
        i, s = moves[int(rng.integers(len(moves)))]
        if s != OUTSIDE:
            rem = rem[:s] + (rem[s] - 1,) + rem[s + 1:]
        remaining = remaining - {i}
    return True


def simplify_oracle(market: Market) -> Market:
    """Iterated safe-school truncation with priority refiltering (Def. 1)."""
    prefs = [list(p) for p in market.preferences]
    while True:
        prios = [
            [i for i in market.priorities[s] if s in prefs[i]]
            for s in range(market.m)
        ]
        changed = False
        for i in range(market.n):
            for pos, s in enumerate(prefs[i]):
                if prios[s].index(i) < market.capacities[s]:
                    if pos + 1 < len(prefs[i]):
                        prefs[i] = prefs[i][: pos + 1]
                        changed = True
                    break
        if not changed:
            break
    prios = [
        tuple(i for i in market.priorities[s] if s in prefs[i])
        for s in range(market.m)
    ]
    return Market(
        market.capacities, tuple(tuple(p) for p in prefs), tuple(prios)
    )
