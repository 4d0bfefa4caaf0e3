"""Seeded, reproducible random instance generators.

All randomness flows through ``random.Random(seed)``; the same spec always
yields byte-identical instances.  The density knob is exact at its ends:
density 1 gives a complete graph (all intervals share a point, or every
run spans all of X), density 0 gives an edgeless one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .bipartite import BipartiteConvexGraph
from .graphcore import IntervalModel

__all__ = ["GenSpec", "gen_interval", "gen_biconvex", "exhaustive_interval_models"]


@dataclass
class GenSpec:
    kind: str = "interval"      # "interval" | "biconvex"
    n: int = 8                  # interval vertex count
    nx: int = 4                 # biconvex |X|
    ny: int = 4                 # biconvex |Y|
    density: float = 0.5        # in [0, 1]
    seed: int = 0
    count: int = 1

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")
        if self.n < 0 or self.nx < 0 or self.ny < 0 or self.count < 0:
            raise ValueError("sizes must be non-negative")


def gen_interval(spec: GenSpec) -> list[IntervalModel]:
    """Random interval models: n intervals with distinct integer left ends
    on a coarse grid and a density-scaled common length."""
    rng = random.Random(spec.seed)
    grid = max(4 * spec.n * spec.n, 4)
    length = round(spec.density * grid)
    out = []
    for _ in range(spec.count):
        lefts = rng.sample(range(grid + 1), spec.n) if spec.n else []
        intervals = [(i + 1, lo, min(lo + length, grid))
                     for i, lo in enumerate(lefts)]
        out.append(IntervalModel(intervals))
    return out


def gen_biconvex(spec: GenSpec) -> list[BipartiteConvexGraph]:
    """Random biconvex graphs via monotone neighbourhood runs.

    Both the run starts and the run ends are non-decreasing along the Y
    ordering, which makes every X-neighbourhood a prefix-suffix
    intersection and hence consecutive: biconvexity holds by
    construction (and is re-validated by the constructor).
    """
    rng = random.Random(spec.seed)
    k, m = spec.nx, spec.ny
    out = []
    for _ in range(spec.count):
        x_order = [f"x{j}" for j in range(1, k + 1)]
        y_order = [f"y{i}" for i in range(1, m + 1)]
        edges = []
        if spec.density > 0 and k > 0:
            a = b = 1
            max_step = max(1, (2 * k) // max(m, 1))
            for i, y in enumerate(y_order):
                if spec.density >= 1.0:
                    a, b = 1, k
                else:
                    a = min(k, a + rng.randint(0, max_step))
                    width = 1 + round(spec.density * rng.randint(0, k - 1))
                    b = min(k, max(b, a + width - 1))
                for j in range(a, b + 1):
                    edges.append((f"x{j}", y))
        out.append(BipartiteConvexGraph(x_order, y_order, edges, "bi"))
    return out


def exhaustive_interval_models(n: int):
    """Every interval graph on n vertices together with its canonical
    ordering, one model per window vector.

    With right ends pinned at 1..n, an integer left end l_i <= i makes
    vertex i adjacent to exactly the earlier vertices l_i..i-1, and any
    choice of left ends satisfies the ordering property.  Conversely
    every ordered interval graph arises this way, so iterating all
    product(1..i) left-end vectors is an exhaustive enumeration.
    """
    def rec(i, acc):
        if i > n:
            yield IntervalModel([(j, acc[j - 1], j) for j in range(1, n + 1)])
            return
        for left in range(1, i + 1):
            acc.append(left)
            yield from rec(i + 1, acc)
            acc.pop()
    yield from rec(1, [])
