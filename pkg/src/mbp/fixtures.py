"""Built-in example markets with known-good outputs.

These three small markets exercise every interesting combination of the
condition verdicts and are the golden fixtures behind `mbp examples`.
"""
from __future__ import annotations

from .market import Market

#: Unit capacities; no mutually best pair exists up front, but iterated
#: truncation reduces every list to a singleton.
EXAMPLE_1 = Market(
    capacities=(1, 1, 1),
    preferences=((0, 2, 1), (1, 0), (2,)),
    priorities=((1, 0), (0, 1), (0, 2)),
)

#: Multi-seat school; students can be matched sequentially against
#: remaining capacity. Priority lists are the raw orderings filtered to
#: the students that actually list each school.
EXAMPLE_2 = Market(
    capacities=(2, 1, 1),
    preferences=((1, 0), (0,), (0, 1), (0, 1, 2)),
    priorities=((0, 1, 2, 3), (0, 3, 2), (3,)),
)

#: Unsimplifiable and fails the sequential pairing after one step, yet the
#: student-proposing outcome is efficient; the envyfree set is not unique.
EXAMPLE_3 = Market(
    capacities=(1, 1, 1),
    preferences=((2, 0), (1,), (0, 1, 2)),
    priorities=((0, 2), (1, 2), (2, 0)),
)

EXAMPLES = {1: EXAMPLE_1, 2: EXAMPLE_2, 3: EXAMPLE_3}

EXPECTED = {
    1: {
        "student_da": (0, 1, 2),
        "school_da": (0, 1, 2),
        "ttc": (0, 1, 2),
        "ia": (0, 1, 2),
        "seq_mbp": False,
        "gmbp": True,
        "da_efficient": True,
        "da_eq_ttc": True,
        "simplified_preferences": ((0,), (1,), (2,)),
        "simplified_priorities": ((0,), (1,), (2,)),
    },
    2: {
        "student_da": (1, 0, 0, 2),
        "school_da": (1, 0, 0, 2),
        "ttc": (1, 0, 0, 2),
        "ia": (1, 0, 0, 2),
        "seq_mbp": True,
        "gmbp": True,
        "da_efficient": True,
        "da_eq_ttc": True,
        "seq_steps": ((0, 1), (1, 0), (2, 0), (3, 2)),
        "simplified_preferences": ((1,), (0,), (0,), (0, 1, 2)),
        "simplified_priorities": ((1, 2, 3), (0, 3), (3,)),
    },
    3: {
        "student_da": (2, 1, 0),
        "school_da": (0, 1, 2),
        "ttc": (2, 1, 0),
        "ia": (2, 1, 0),
        "seq_mbp": False,
        "gmbp": False,
        "da_efficient": True,
        "da_eq_ttc": True,
        "simplified_preferences": EXAMPLE_3.preferences,
        "simplified_priorities": EXAMPLE_3.priorities,
    },
}
