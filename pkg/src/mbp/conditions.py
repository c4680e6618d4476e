"""Market simplification and the mutually-best-pairs condition family.

Includes the iterated safe-school truncation, the sequential and
generalized mutually-best-pairs checks (with replayable certificates),
and the two comparison conditions used for desk-scale cross-checks:
mutually-best-pairs-everywhere and priority acyclicity.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ._backend import core
from .market import OUTSIDE, Market, pack_market, restrict_priorities


class InputTooLargeError(ValueError):
    """Raised when a brute-force check is asked to run past its size gate."""


@dataclass(frozen=True)
class SimplifiedMarket:
    """Fixed point of iterated truncation at safe schools plus refiltering."""

    market: Market
    safe_school: tuple[Optional[int], ...]
    rounds: int


@dataclass(frozen=True)
class SeqMbpCertificate:
    """Witness ordering for the sequential mutually-best-pairs condition.

    steps[k] = (student, school or OUTSIDE); remaining_capacity_trace[k]
    snapshots every school's remaining capacity just before step k.
    """

    steps: tuple[tuple[int, int], ...]
    remaining_capacity_trace: tuple[tuple[int, ...], ...]


def simplify(market: Market) -> SimplifiedMarket:
    """Truncate each preference list at the student's safe school, iterate
    with priority refiltering until nothing changes."""
    pm = pack_market(market)
    plen, safe, rounds = core.simplify_market(
        pm.pref_data, pm.pref_ptr, pm.prio_data, pm.prio_ptr, pm.cap
    )
    preferences = tuple(
        market.preferences[i][: int(plen[i])] for i in range(market.n)
    )
    priorities = restrict_priorities(market.priorities, preferences)
    simplified = Market(market.capacities, preferences, priorities)
    safe_school = tuple(None if s < 0 else int(s) for s in safe)
    return SimplifiedMarket(simplified, safe_school, int(rounds))


def check_sequential_mbp(market: Market) -> Optional[SeqMbpCertificate]:
    """Greedily match students to their best remaining-capacity school when
    their priority ranks them within that capacity; certificate iff the
    whole market can be exhausted this way."""
    pm = pack_market(market)
    steps = core.seq_mbp(
        pm.pref_data, pm.pref_ptr, pm.prio_data, pm.prio_ptr, pm.cap
    )
    if steps is None:
        return None
    rem = list(market.capacities)
    trace = []
    step_tuples = []
    for i, s in steps:
        i, s = int(i), int(s)
        trace.append(tuple(rem))
        step_tuples.append((i, s))
        if s != OUTSIDE:
            rem[s] -= 1
    return SeqMbpCertificate(tuple(step_tuples), tuple(trace))


def verify_seq_mbp_certificate(market: Market, cert: SeqMbpCertificate) -> bool:
    """Replay a certificate and check both defining clauses at every step."""
    remaining = set(range(market.n))
    rem = list(market.capacities)
    if len(cert.steps) != market.n:
        return False
    for k, (i, s) in enumerate(cert.steps):
        if i not in remaining:
            return False
        if cert.remaining_capacity_trace[k] != tuple(rem):
            return False
        available = [t for t in market.preferences[i] if rem[t] > 0]
        if s == OUTSIDE:
            if available:
                return False
        else:
            if not available or available[0] != s:
                return False
            rank = [j for j in market.priorities[s] if j in remaining].index(i)
            if rank >= rem[s]:
                return False
            rem[s] -= 1
        remaining.remove(i)
    return not remaining


def check_gmbp(
    market: Market,
) -> Optional[tuple[SimplifiedMarket, SeqMbpCertificate]]:
    """Sequential mutually-best-pairs on the simplified market."""
    simplified = simplify(market)
    cert = check_sequential_mbp(simplified.market)
    if cert is None:
        return None
    return simplified, cert


def check_mbp_everywhere(market: Market) -> bool:
    """Brute force: every nonempty submarket must contain a mutually best
    pair (students with no acceptable school in the submarket are ignored)."""
    n, m = market.n, market.m
    if n > 12 or m > 8:
        raise InputTooLargeError(
            f"check_mbp_everywhere is gated to n <= 12, m <= 8 (got n={n}, m={m})"
        )
    prefs = market.preferences
    prios = market.priorities
    cap = market.capacities
    for smask in range(1, 1 << m):
        for imask in range(1, 1 << n):
            students = [i for i in range(n) if imask >> i & 1]
            found = False
            any_active = False
            for i in students:
                best = next(
                    (s for s in prefs[i] if smask >> s & 1), None
                )
                if best is None:
                    continue
                any_active = True
                rank = 0
                for j in prios[best]:
                    if j == i:
                        break
                    if imask >> j & 1:
                        rank += 1
                if rank < cap[best]:
                    found = True
                    break
            if any_active and not found:
                return False
    return True


def check_ergin_acyclicity(market: Market) -> bool:
    """True iff no priority cycle i P_s j P_s k P_s' i exists together with
    the scarcity condition (disjoint filler sets of sizes q_s - 1 above j
    and q_s' - 1 above i). Only students on a school's priority list
    participate."""
    n, m = market.n, market.m
    if n > 200:
        raise InputTooLargeError(
            f"check_ergin_acyclicity is gated to n <= 200 (got n={n})"
        )
    pos = [
        {i: r for r, i in enumerate(market.priorities[s])} for s in range(m)
    ]
    for s in range(m):
        ps = market.priorities[s]
        qs = market.capacities[s]
        for sp in range(m):
            if sp == s:
                continue
            qsp = market.capacities[sp]
            psp = pos[sp]
            for jx, j in enumerate(ps):
                above_j = ps[:jx]
                for i in above_j:
                    if i not in psp:
                        continue
                    for k in ps[jx + 1 :]:
                        if k not in psp or psp[k] >= psp[i]:
                            continue
                        set_a = {x for x in above_j if x != i}
                        set_b = {
                            x
                            for x in market.priorities[sp][: psp[i]]
                            if x != j and x != k
                        }
                        need_a, need_b = qs - 1, qsp - 1
                        if (
                            len(set_a) >= need_a
                            and len(set_b) >= need_b
                            and len(set_a | set_b) >= need_a + need_b
                        ):
                            return False
    return True
