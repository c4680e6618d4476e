"""Domain types for school-choice markets.

A market holds, per student, the ordered list of acceptable schools
(most-preferred first; the outside option sits implicitly after the last
entry) and, per school, the priority ordering over exactly those students
who list it. All ids are 0-based indices.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

#: Sentinel for the outside option (being unassigned).
OUTSIDE = -1


class MarketFormatError(ValueError):
    """Raised when a market file is malformed or violates an invariant."""


@dataclass(frozen=True)
class Market:
    """An ordinal school-choice market.

    capacities[s] is the number of seats at school s (>= 1).
    preferences[i] lists student i's acceptable schools, best first.
    priorities[s] ranks exactly the students that list s, best first.
    """

    capacities: tuple[int, ...]
    preferences: tuple[tuple[int, ...], ...]
    priorities: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.preferences)

    @property
    def m(self) -> int:
        return len(self.capacities)


@dataclass(frozen=True)
class Allocation:
    """Per-student assignment: a school id or OUTSIDE."""

    assignment: tuple[int, ...]

    def assigned_to(self, school: int) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.assignment) if s == school)

    def __iter__(self):
        return iter(self.assignment)


@dataclass(frozen=True)
class CardinalMatrices:
    """Cardinal utilities u[i, s] and priority scores pi[i, s]."""

    u: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        if self.u.ndim != 2 or self.u.shape != self.pi.shape:
            raise ValueError("u and pi must be 2-D with matching shapes")


def validate_market(market: Market) -> list[str]:
    """Return a list of invariant violations (empty means the market is valid)."""
    problems: list[str] = []
    n, m = market.n, market.m
    if len(market.priorities) != m:
        problems.append(
            f"expected {m} priority lists, got {len(market.priorities)}"
        )
        return problems
    for s, q in enumerate(market.capacities):
        if q < 1:
            problems.append(f"school {s}: capacity {q} < 1")
    for i, prefs in enumerate(market.preferences):
        if len(set(prefs)) != len(prefs):
            problems.append(f"student {i}: duplicate school in preference list")
        for s in prefs:
            if not 0 <= s < m:
                problems.append(f"student {i}: school id {s} out of range")
    for s, prio in enumerate(market.priorities):
        if len(set(prio)) != len(prio):
            problems.append(f"school {s}: duplicate student in priority list")
        for i in prio:
            if not 0 <= i < n:
                problems.append(f"school {s}: student id {i} out of range")
    if problems:
        return problems
    # Priority lists must contain exactly the students that list the school.
    for s in range(m):
        listed = {i for i in range(n) if s in market.preferences[i]}
        prioritized = set(market.priorities[s])
        if listed != prioritized:
            problems.append(
                f"school {s}: priority/acceptability mismatch "
                f"(missing={sorted(listed - prioritized)}, "
                f"extra={sorted(prioritized - listed)})"
            )
    return problems


def require_valid(market: Market) -> Market:
    problems = validate_market(market)
    if problems:
        raise MarketFormatError("; ".join(problems))
    return market


def restrict_priorities(
    raw_priorities: Sequence[Sequence[int]],
    preferences: Sequence[Sequence[int]],
) -> tuple[tuple[int, ...], ...]:
    """Filter each school's full ordering to the students that list it.

    Relative order is preserved; the operation is idempotent.
    """
    listed = [set(prefs) for prefs in preferences]
    return tuple(
        tuple(i for i in raw if s in listed[i])
        for s, raw in enumerate(raw_priorities)
    )


def ordinal_from_cardinal(
    c: CardinalMatrices,
    capacities: Sequence[int],
    acceptability: str = "all",
) -> Market:
    """Build the ordinal market induced by cardinal utilities and scores.

    Students rank schools by descending u, schools rank students by
    descending pi; exact ties break toward the lower index (stable sort).
    With acceptability "all" every school is acceptable to every student.
    """
    if acceptability != "all":
        raise ValueError(f"unknown acceptability rule: {acceptability!r}")
    if not (np.isfinite(c.u).all() and np.isfinite(c.pi).all()):
        raise ValueError("cardinal matrices must be finite")
    n, m = c.u.shape
    if len(capacities) != m:
        raise ValueError("capacities length must equal number of schools")
    prefs = np.argsort(-c.u, axis=1, kind="stable")
    prios = np.argsort(-c.pi, axis=0, kind="stable")
    preferences = tuple(tuple(int(s) for s in prefs[i]) for i in range(n))
    raw = tuple(tuple(int(i) for i in prios[:, s]) for s in range(m))
    return Market(
        capacities=tuple(int(q) for q in capacities),
        preferences=preferences,
        priorities=restrict_priorities(raw, preferences),
    )


def read_market(path: str | Path) -> Market:
    """Load a market from its JSON file format (see write_market)."""
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MarketFormatError(f"not valid JSON: {exc}") from exc
    return market_from_dict(payload)


def market_from_dict(payload: dict) -> Market:
    for key in ("n", "m", "capacities", "preferences"):
        if key not in payload:
            raise MarketFormatError(f"missing field {key!r}")
    n, m = payload["n"], payload["m"]
    preferences = tuple(tuple(row) for row in payload["preferences"])
    if len(preferences) != n:
        raise MarketFormatError("preferences length disagrees with n")
    if "raw_priorities" in payload:
        raw = payload["raw_priorities"]
        if len(raw) != m:
            raise MarketFormatError("raw_priorities length disagrees with m")
        priorities = restrict_priorities(raw, preferences)
    elif "priorities" in payload:
        priorities = tuple(tuple(row) for row in payload["priorities"])
    else:
        raise MarketFormatError("missing field 'priorities' or 'raw_priorities'")
    market = Market(
        capacities=tuple(payload["capacities"]),
        preferences=preferences,
        priorities=priorities,
    )
    if market.m != m:
        raise MarketFormatError("capacities length disagrees with m")
    problems = validate_market(market)
    for i, prefs in enumerate(market.preferences):
        if len(set(prefs)) != len(prefs):
            raise MarketFormatError(f"duplicate entry in preferences of student {i}")
    if problems:
        raise MarketFormatError("; ".join(problems))
    return market


def market_to_dict(market: Market) -> dict:
    return {
        "n": market.n,
        "m": market.m,
        "capacities": list(market.capacities),
        "preferences": [list(p) for p in market.preferences],
        "priorities": [list(p) for p in market.priorities],
    }


def write_market(market: Market, path: str | Path) -> None:
    Path(path).write_text(json.dumps(market_to_dict(market), indent=1) + "\n")


class PackedMarket(NamedTuple):
    """Flat int32 (CSR-style) view of a market, the kernel calling convention."""

    pref_data: np.ndarray
    pref_ptr: np.ndarray
    prio_data: np.ndarray
    prio_ptr: np.ndarray
    cap: np.ndarray

    @property
    def n(self) -> int:
        return len(self.pref_ptr) - 1

    @property
    def m(self) -> int:
        return len(self.prio_ptr) - 1


def _pack_lists(lists: Iterable[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    lists = list(lists)
    ptr = np.zeros(len(lists) + 1, dtype=np.int32)
    for k, row in enumerate(lists):
        ptr[k + 1] = ptr[k] + len(row)
    data = np.empty(int(ptr[-1]), dtype=np.int32)
    for k, row in enumerate(lists):
        data[ptr[k] : ptr[k + 1]] = row
    return data, ptr


def pack_market(market: Market) -> PackedMarket:
    pref_data, pref_ptr = _pack_lists(market.preferences)
    prio_data, prio_ptr = _pack_lists(market.priorities)
    return PackedMarket(
        pref_data, pref_ptr, prio_data, prio_ptr,
        np.asarray(market.capacities, dtype=np.int32),
    )


def unpack_market(pm: PackedMarket) -> Market:
    prefs = tuple(
        tuple(int(s) for s in pm.pref_data[pm.pref_ptr[k] : pm.pref_ptr[k + 1]])
        for k in range(pm.n)
    )
    prios = tuple(
        tuple(int(i) for i in pm.prio_data[pm.prio_ptr[k] : pm.prio_ptr[k + 1]])
        for k in range(pm.m)
    )
    return Market(tuple(int(q) for q in pm.cap), prefs, prios)
