import json

import numpy as np
import pytest

from mbp.market import (
    OUTSIDE,
    CardinalMatrices,
    Market,
    MarketFormatError,
    market_from_dict,
    ordinal_from_cardinal,
    pack_market,
    read_market,
    restrict_priorities,
    unpack_market,
    validate_market,
    write_market,
)
from oracles import random_market


def test_valid_market_has_no_problems():
    market = Market(
        capacities=(1, 2),
        preferences=((0, 1), (1,), ()),
        priorities=((0,), (0, 1)),
    )
    assert validate_market(market) == []


def test_validate_rejects_nonpositive_capacity():
    market = Market((0,), ((0,),), ((0,),))
    assert any("capacity" in p for p in validate_market(market))


def test_validate_rejects_duplicate_preference():
    market = Market((1,), ((0, 0),), ((0,),))
    assert any("duplicate" in p for p in validate_market(market))


def test_validate_rejects_out_of_range_ids():
    market = Market((1,), ((1,),), ((0,),))
    assert any("out of range" in p for p in validate_market(market))


def test_validate_rejects_priority_acceptability_mismatch():
    # student 1 does not list school 0 but appears on its priority list
    market = Market((1,), ((0,), ()), ((0, 1),))
    problems = validate_market(market)
    assert any("mismatch" in p for p in problems)


def test_restrict_priorities_filters_and_preserves_order():
    prefs = ((0,), (), (0,))
    assert restrict_priorities(((1, 2, 0),), prefs) == ((2, 0),)


def test_restrict_priorities_idempotent():
    rng = np.random.default_rng(7)
    for _ in range(50):
        market = random_market(rng)
        once = restrict_priorities(market.priorities, market.preferences)
        assert once == market.priorities  # already restricted
        assert restrict_priorities(once, market.preferences) == once


def test_ordinal_from_cardinal_orders_and_breaks_ties_low_index():
    u = np.array([[0.5, 0.5, 0.9], [0.1, 0.2, 0.3]])
    pi = np.array([[0.4, 0.7, 0.2], [0.4, 0.7, 0.8]])
    market = ordinal_from_cardinal(CardinalMatrices(u=u, pi=pi), [1, 1, 1])
    assert market.preferences[0] == (2, 0, 1)  # tie 0 vs 1 -> lower index
    assert market.preferences[1] == (2, 1, 0)
    assert market.priorities[0] == (0, 1)  # tie in pi column 0
    assert market.priorities[2] == (1, 0)


def test_ordinal_from_cardinal_rejects_nonfinite_and_bad_shapes():
    good = CardinalMatrices(u=np.zeros((2, 2)), pi=np.zeros((2, 2)))
    with pytest.raises(ValueError):
        ordinal_from_cardinal(good, [1])
    bad = CardinalMatrices(u=np.full((1, 1), np.nan), pi=np.zeros((1, 1)))
    with pytest.raises(ValueError):
        ordinal_from_cardinal(bad, [1])
    with pytest.raises(ValueError):
        CardinalMatrices(u=np.zeros((2, 2)), pi=np.zeros((2, 3)))


def test_market_json_roundtrip(tmp_path):
    rng = np.random.default_rng(11)
    for k in range(20):
        market = random_market(rng)
        path = tmp_path / f"market{k}.json"
        write_market(market, path)
        assert read_market(path) == market


def test_read_market_accepts_raw_priorities():
    payload = {
        "n": 2,
        "m": 1,
        "capacities": [1],
        "preferences": [[0], []],
        "raw_priorities": [[1, 0]],
    }
    assert market_from_dict(payload).priorities == ((0,),)


def test_read_market_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(MarketFormatError):
        read_market(path)
    with pytest.raises(MarketFormatError):
        market_from_dict({"n": 1, "m": 1})
    with pytest.raises(MarketFormatError):
        market_from_dict(
            {
                "n": 1,
                "m": 1,
                "capacities": [1],
                "preferences": [[0]],
                "priorities": [[0, 0]],
            }
        )


def test_pack_unpack_roundtrip():
    rng = np.random.default_rng(3)
    for _ in range(50):
        market = random_market(rng)
        pm = pack_market(market)
        assert pm.n == market.n and pm.m == market.m
        assert unpack_market(pm) == market


def test_allocation_outside_sentinel():
    assert OUTSIDE == -1
