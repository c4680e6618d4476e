"""The four allocation mechanisms.

student_da, school_da and ttc dispatch to the selected kernel backend;
ia is pure Python (it is not on the simulation hot path).
"""
from __future__ import annotations

from typing import Sequence

from ._backend import core
from .market import Allocation, Market, pack_market

MECHANISMS = ("student-da", "school-da", "ttc", "ia")


def _run_kernel(kernel, market: Market) -> Allocation:
    pm = pack_market(market)
    out = kernel(pm.pref_data, pm.pref_ptr, pm.prio_data, pm.prio_ptr, pm.cap)
    return Allocation(tuple(int(x) for x in out))


def student_da(market: Market) -> Allocation:
    """Student-proposing deferred acceptance (student-optimal envyfree)."""
    return _run_kernel(core.student_da, market)


def school_da(market: Market) -> Allocation:
    """School-proposing deferred acceptance (student-pessimal envyfree)."""
    return _run_kernel(core.school_da, market)


def ttc(market: Market) -> Allocation:
    """Top trading cycles; efficient, may violate priorities."""
    return _run_kernel(core.ttc, market)


def ia(market: Market, reports: Sequence[Sequence[int]] | None = None) -> Allocation:
    """Immediate acceptance on the given reports (truthful by default).

    Round acceptances are final. A student proposing to a school whose
    priority list does not rank them (possible only under misreports) is
    rejected by that school.
    """
    if reports is None:
        reports = market.preferences
    if len(reports) != market.n:
        raise ValueError("one report per student required")
    n, m = market.n, market.m
    rank = [
        {i: r for r, i in enumerate(market.priorities[s])} for s in range(m)
    ]
    rem = list(market.capacities)
    assignment = [-1] * n
    ptr = [0] * n
    rejected: set[tuple[int, int]] = set()
    out = [len(rep) == 0 for rep in reports]
    while True:
        proposals: dict[int, list[int]] = {}
        for i in range(n):
            if assignment[i] != -1 or out[i]:
                continue
            rep = reports[i]
            while ptr[i] < len(rep) and (
                rem[rep[ptr[i]]] == 0 or (i, rep[ptr[i]]) in rejected
            ):
                ptr[i] += 1
            if ptr[i] == len(rep):
                out[i] = True
                continue
            proposals.setdefault(rep[ptr[i]], []).append(i)
        if not proposals:
            break
        for s, proposers in proposals.items():
            listed = sorted(
                (i for i in proposers if i in rank[s]), key=rank[s].__getitem__
            )
            accepted = listed[: rem[s]]
            for i in accepted:
                assignment[i] = s
            rem[s] -= len(accepted)
            for i in proposers:
                if assignment[i] != s:
                    rejected.add((i, s))
    return Allocation(tuple(assignment))


def run_mechanism(name: str, market: Market) -> Allocation:
    if name == "student-da":
        return student_da(market)
    if name == "school-da":
        return school_da(market)
    if name == "ttc":
        return ttc(market)
    if name == "ia":
        return ia(market)
    raise ValueError(f"unknown mechanism {name!r}; expected one of {MECHANISMS}")
