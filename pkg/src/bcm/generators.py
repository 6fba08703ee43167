"""Seeded instance families.

``random-bipartite`` and ``random-general`` draw ``m`` distinct vertex pairs
uniformly; the structured families are deterministic constructions:

* ``gap-cycle``: an even cycle on ``n`` vertices where opposite edges share
  a color, all bounds 1, unit profits.  For ``n = 4`` the LP optimum is 2
  while every feasible matching has a single edge.
* ``budget-path``: a path on ``2n`` vertices whose ``n`` odd-position edges
  form one color bounded by ``n // 2``; the remaining edges get a second
  color with a vacuous bound.
* ``greedy-adversary``: the six-vertex instance on which greedy returns one
  edge out of an optimum of three.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .instance import ColoredGraph, InstanceError

FAMILIES = ("random-bipartite", "random-general", "gap-cycle", "budget-path", "greedy-adversary")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int = 0
    m: int = 0
    k: int = 1
    seed: int = 0
    profit_range: tuple[int, int] = (1, 1)
    bound_range: tuple[int, int] = (1, 1)


def generate_instance(spec: GeneratorSpec) -> ColoredGraph:
    if spec.family not in FAMILIES:
        raise InstanceError(f"unknown family {spec.family!r}; choose from {', '.join(FAMILIES)}")
    if spec.family == "gap-cycle":
        return gap_cycle(spec.n)
    if spec.family == "budget-path":
        return budget_path(spec.n)
    if spec.family == "greedy-adversary":
        return greedy_adversary()
    return _random(spec)


def _random(spec: GeneratorSpec) -> ColoredGraph:
    n, m, k = spec.n, spec.m, spec.k
    lo, hi = spec.profit_range
    blo, bhi = spec.bound_range
    if n < 0 or m < 0:
        raise InstanceError("n and m must be nonnegative")
    if k < 1:
        raise InstanceError("random families need k >= 1")
    if not (0 <= lo <= hi) or not (1 <= blo <= bhi):
        raise InstanceError("invalid profit or bound range")
    if spec.family == "random-bipartite":
        half = n // 2
        pairs = [(u, v) for u in range(half) for v in range(half, n)]
    else:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if m > len(pairs):
        raise InstanceError(f"m={m} exceeds the {len(pairs)} available vertex pairs")
    rng = random.Random(spec.seed)
    chosen = sorted(rng.sample(pairs, m))
    edges = [(u, v, rng.randrange(k), rng.randint(lo, hi)) for u, v in chosen]
    bounds = [rng.randint(blo, bhi) for _ in range(k)]
    return ColoredGraph.build(n, bounds, edges)


def gap_cycle(n: int = 4) -> ColoredGraph:
    if n < 4 or n % 2:
        raise InstanceError("gap-cycle needs an even n >= 4")
    half = n // 2
    edges = [(i, (i + 1) % n, i % half, 1) for i in range(n)]
    return ColoredGraph.build(n, [1] * half, edges)


def budget_path(n: int = 4) -> ColoredGraph:
    if n < 2:
        raise InstanceError("budget-path needs n >= 2")
    edges = [(i, i + 1, i % 2, 1) for i in range(2 * n - 1)]
    return ColoredGraph.build(2 * n, [n // 2, n - 1], edges)


def greedy_adversary() -> ColoredGraph:
    # vertices v1, v2, v3, u1, u2, u3 -> 0..5; colors blue, red, green -> 0, 1, 2
    v1, v2, v3, u1, u2, u3 = range(6)
    edges = [(v1, u3, 0, 1), (v2, u2, 0, 1), (v1, u1, 1, 1), (v3, u3, 2, 1)]
    return ColoredGraph.build(6, [1, 1, 1], edges)


def single_edge(profit=5) -> ColoredGraph:
    return ColoredGraph.build(2, [1], [(0, 1, 0, Fraction(profit))])


def odd_cycle(n: int, k: int = 1, bound: int | None = None) -> ColoredGraph:
    """Odd cycle with edges colored round-robin; bounds default to vacuous."""
    if n < 3:
        raise InstanceError("cycle needs n >= 3")
    edges = [(i, (i + 1) % n, i % k, 1) for i in range(n)]
    w = bound if bound is not None else n
    return ColoredGraph.build(n, [w] * k, edges)
