"""Reproducible random market generation from the cardinal model.

Student utilities and school priority scores are convex combinations of a
shared match-quality draw, a common (vertical) component, and an
idiosyncratic component, all uniform on [0, 1]:

    u[i, s]  = lambda * (delta * d[i, s] + (1 - delta) * v[s]) + (1 - lambda) * eps[i, s]
    pi[i, s] = alpha  * (beta  * d[i, s] + (1 - beta)  * g[i]) + (1 - alpha)  * eta[i, s]

Draws come from numpy's PCG64 seeded through SeedSequence, so any (cell,
draw) of a sweep can be regenerated in isolation and results are
bit-reproducible for a given master seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .market import CardinalMatrices, Market, PackedMarket, ordinal_from_cardinal

#: Recorded in sweep output metadata; changing the generator is a breaking
#: format change.
GENERATOR_NAME = "numpy-pcg64-seedsequence"


@dataclass(frozen=True)
class CardinalParams:
    lam: float
    delta: float
    alpha: float
    beta: float
    n: int
    m: int
    q: int

    def __post_init__(self):
        for name in ("lam", "delta", "alpha", "beta"):
            w = getattr(self, name)
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"{name}={w} outside [0, 1]")
        if self.n < 1 or self.m < 1 or self.q < 1:
            raise ValueError("n, m and q must be positive")


@dataclass(frozen=True)
class MarketDraw:
    d: np.ndarray
    v: np.ndarray
    eps: np.ndarray
    g: np.ndarray
    eta: np.ndarray


def subseed(master_seed: int, cell_index: int, draw_index: int) -> np.random.SeedSequence:
    """Addressable sub-seed so any draw of any cell recomputes in isolation."""
    return np.random.SeedSequence(master_seed, spawn_key=(cell_index, draw_index))


def draw(params: CardinalParams, seed: int | np.random.SeedSequence) -> MarketDraw:
    """Sample the primitive variables, iid uniform on [0, 1]."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n, m = params.n, params.m
    return MarketDraw(
        d=rng.random((n, m)),
        v=rng.random(m),
        eps=rng.random((n, m)),
        g=rng.random(n),
        eta=rng.random((n, m)),
    )


def cardinal_matrices(params: CardinalParams, dr: MarketDraw) -> CardinalMatrices:
    lam, delta, alpha, beta = params.lam, params.delta, params.alpha, params.beta
    u = lam * (delta * dr.d + (1.0 - delta) * dr.v[None, :]) + (1.0 - lam) * dr.eps
    pi = alpha * (beta * dr.d + (1.0 - beta) * dr.g[:, None]) + (1.0 - alpha) * dr.eta
    return CardinalMatrices(u=u, pi=pi)


def build_market(params: CardinalParams, dr: MarketDraw) -> Market:
    """Ordinal market induced by the cardinal draws (all schools acceptable,
    uniform capacities)."""
    c = cardinal_matrices(params, dr)
    return ordinal_from_cardinal(c, [params.q] * params.m)


def build_packed(params: CardinalParams, dr: MarketDraw) -> PackedMarket:
    """Kernel-ready arrays without the tuple-of-tuples Market detour;
    identical ordering rules to build_market."""
    c = cardinal_matrices(params, dr)
    n, m = params.n, params.m
    prefs = np.argsort(-c.u, axis=1, kind="stable").astype(np.int32)
    prios = np.argsort(-c.pi, axis=0, kind="stable").astype(np.int32)
    pref_ptr = (np.arange(n + 1, dtype=np.int32) * m)
    prio_ptr = (np.arange(m + 1, dtype=np.int32) * n)
    return PackedMarket(
        pref_data=np.ascontiguousarray(prefs.ravel()),
        pref_ptr=pref_ptr,
        prio_data=np.ascontiguousarray(prios.T.ravel()),
        prio_ptr=prio_ptr,
        cap=np.full(m, params.q, dtype=np.int32),
    )
