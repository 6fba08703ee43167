"""Bounded color matching instances, matchings and feasibility checks.

An instance is a simple undirected graph whose edges carry a color and a
nonnegative rational profit, together with a positive integer bound per
color.  Vertices are dense 0-based integers and edge ids are 0-based in
file order.

Text format (``#`` starts a comment, tokens are whitespace separated)::

    bcm <n> <m> <k>
    bounds <w_0> ... <w_{k-1}>
    [sides <s_0> ... <s_{n-1}>]        # optional declared bipartition
    edge <u> <v> <color> <profit>      # m lines, profit "p" or "p/q"
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple


class InstanceError(ValueError):
    """Raised for malformed or invalid instances."""


class Edge(NamedTuple):
    id: int
    u: int
    v: int
    color: int
    profit: Fraction


def format_rational(q) -> str:
    """Canonical string for a rational: ``"5"`` or ``"7/2"``."""
    return str(Fraction(q))


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` (lowest terms, q > 0)."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        p, q = int(num), int(den)
        if q <= 0:
            raise ValueError(f"non-positive denominator in {text!r}")
        if Fraction(p, q).denominator != q:
            raise ValueError(f"rational {text!r} not in lowest terms")
        return Fraction(p, q)
    return Fraction(int(text))


@dataclass(frozen=True)
class ColoredGraph:
    n: int
    k: int
    bounds: tuple[int, ...]
    edges: tuple[Edge, ...]
    sides: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n < 0 or self.k < 0:
            raise InstanceError("negative vertex or color count")
        if len(self.bounds) != self.k:
            raise InstanceError(f"expected {self.k} bounds, got {len(self.bounds)}")
        for j, w in enumerate(self.bounds):
            if not isinstance(w, int) or w < 1:
                raise InstanceError(f"bound of color {j} must be a positive integer, got {w!r}")
        seen = set()
        for i, e in enumerate(self.edges):
            _check_edge(e, i, self.n, self.k, seen)
        if self.sides is not None:
            if len(self.sides) != self.n or any(s not in (0, 1) for s in self.sides):
                raise InstanceError("sides must give 0/1 for every vertex")
            for e in self.edges:
                if self.sides[e.u] == self.sides[e.v]:
                    raise InstanceError(f"edge {e.id} does not cross the declared bipartition")

    @classmethod
    def build(cls, n, bounds, edges, sides=None) -> "ColoredGraph":
        """Convenience constructor from ``(u, v, color, profit)`` tuples."""
        es = tuple(Edge(i, int(u), int(v), int(c), Fraction(p))
                   for i, (u, v, c, p) in enumerate(edges))
        return cls(n, len(bounds), tuple(int(w) for w in bounds), es,
                   None if sides is None else tuple(sides))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        inc = [[] for _ in range(self.n)]
        for e in self.edges:
            inc[e.u].append(e.id)
            inc[e.v].append(e.id)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def color_classes(self) -> tuple[tuple[int, ...], ...]:
        cls_ = [[] for _ in range(self.k)]
        for e in self.edges:
            cls_[e.color].append(e.id)
        return tuple(tuple(x) for x in cls_)

    @cached_property
    def bipartition(self) -> tuple[int, ...] | None:
        """A 2-coloring of the vertices, or None if the graph has an odd cycle."""
        if self.sides is not None:
            return self.sides
        side = [-1] * self.n
        for s in range(self.n):
            if side[s] != -1:
                continue
            side[s] = 0
            queue = deque([s])
            while queue:
                a = queue.popleft()
                for eid in self.incident[a]:
                    e = self.edges[eid]
                    b = e.v if e.u == a else e.u
                    if side[b] == -1:
                        side[b] = 1 - side[a]
                        queue.append(b)
                    elif side[b] == side[a]:
                        return None
        return tuple(side)

    @property
    def is_bipartite(self) -> bool:
        return self.bipartition is not None

    def other(self, eid: int, a: int) -> int:
        e = self.edges[eid]
        return e.v if e.u == a else e.u

    def is_uniform(self) -> bool:
        return len({e.profit for e in self.edges}) <= 1

    def with_unit_profits(self) -> "ColoredGraph":
        es = tuple(e._replace(profit=Fraction(1)) for e in self.edges)
        return ColoredGraph(self.n, self.k, self.bounds, es, self.sides)

    def with_bounds(self, bounds) -> "ColoredGraph":
        return ColoredGraph(self.n, self.k, tuple(bounds), self.edges, self.sides)


def _check_edge(e: Edge, i: int, n: int, k: int, seen: set) -> None:
    if e.id != i:
        raise InstanceError(f"edge ids must be 0..m-1 in order, found {e.id} at position {i}")
    if not (0 <= e.u < n and 0 <= e.v < n):
        raise InstanceError(f"edge {i} has endpoint outside [0, {n})")
    if e.u == e.v:
        raise InstanceError(f"self-loop at edge {i}")
    if not 0 <= e.color < k:
        raise InstanceError(f"edge {i} has color {e.color} >= k={k}")
    if e.profit < 0:
        raise InstanceError(f"edge {i} has negative profit")
    key = frozenset((e.u, e.v))
    if key in seen:
        raise InstanceError(f"duplicate edge {{{e.u},{e.v}}} at edge {i}")
    seen.add(key)


# -- text / JSON I/O ---------------------------------------------------------

def parse_instance(text: str) -> ColoredGraph:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if toks:
            lines.append((lineno, toks))

    def fail(lineno, msg):
        raise InstanceError(f"{msg} at line {lineno}")

    if not lines:
        raise InstanceError("empty instance file")
    lineno, toks = lines[0]
    if toks[0] != "bcm" or len(toks) != 4:
        fail(lineno, "expected header 'bcm <n> <m> <k>'")
    try:
        n, m, k = (int(t) for t in toks[1:])
    except ValueError:
        fail(lineno, "non-integer header field")
    if min(n, m, k) < 0:
        fail(lineno, "negative header field")
    if len(lines) < 2 or lines[1][1][0] != "bounds":
        fail(lines[min(1, len(lines) - 1)][0], "expected 'bounds' line")
    lineno, toks = lines[1]
    if len(toks) - 1 != k:
        fail(lineno, f"expected {k} bounds, got {len(toks) - 1}")
    try:
        bounds = tuple(int(t) for t in toks[1:])
    except ValueError:
        fail(lineno, "non-integer bound")
    for w in bounds:
        if w <= 0:
            fail(lineno, f"bound {w} must be positive")

    rest = lines[2:]
    sides = None
    if rest and rest[0][1][0] == "sides":
        lineno, toks = rest[0]
        if len(toks) - 1 != n or any(t not in ("0", "1") for t in toks[1:]):
            fail(lineno, "malformed 'sides' line")
        sides = tuple(int(t) for t in toks[1:])
        rest = rest[1:]
    if len(rest) != m:
        fail(rest[-1][0] if rest else lines[-1][0], f"expected {m} edge lines, got {len(rest)}")

    edges = []
    seen = set()
    for i, (lineno, toks) in enumerate(rest):
        if toks[0] != "edge" or len(toks) != 5:
            fail(lineno, "malformed edge line")
        try:
            u, v, c = int(toks[1]), int(toks[2]), int(toks[3])
            p = parse_rational(toks[4])
        except ValueError as exc:
            fail(lineno, f"malformed edge field ({exc})")
        if u == v:
            fail(lineno, "self-loop")
        if not (0 <= u < n and 0 <= v < n):
            fail(lineno, "vertex out of range")
        if not 0 <= c < k:
            fail(lineno, f"color {c} >= k={k}")
        if p < 0:
            fail(lineno, "negative profit")
        key = frozenset((u, v))
        if key in seen:
            fail(lineno, f"duplicate edge {{{u},{v}}}")
        seen.add(key)
        edges.append(Edge(i, u, v, c, p))
    try:
        return ColoredGraph(n, k, bounds, tuple(edges), sides)
    except InstanceError as exc:
        raise InstanceError(f"{exc} (line {rest[0][0] if rest else lines[-1][0]})") from None


def serialize_instance(g: ColoredGraph) -> str:
    out = [f"bcm {g.n} {g.m} {g.k}", " ".join(["bounds", *map(str, g.bounds)])]
    if g.sides is not None:
        out.append(" ".join(["sides", *map(str, g.sides)]))
    for e in g.edges:
        out.append(f"edge {e.u} {e.v} {e.color} {format_rational(e.profit)}")
    return "\n".join(out) + "\n"


def instance_to_dict(g: ColoredGraph) -> dict:
    d = {"n": g.n, "m": g.m, "k": g.k, "bounds": list(g.bounds),
         "edges": [{"u": e.u, "v": e.v, "color": e.color,
                    "profit": format_rational(e.profit)} for e in g.edges]}
    if g.sides is not None:
        d["sides"] = list(g.sides)
    return d


def instance_from_dict(d: dict) -> ColoredGraph:
    try:
        edges = [(e["u"], e["v"], e["color"], parse_rational(str(e["profit"])))
                 for e in d["edges"]]
        if d.get("m", len(edges)) != len(edges):
            raise InstanceError(f"m={d['m']} but {len(edges)} edges given")
        if d.get("k", len(d["bounds"])) != len(d["bounds"]):
            raise InstanceError("k does not match the number of bounds")
        g = ColoredGraph.build(d["n"], d["bounds"], edges, d.get("sides"))
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"malformed JSON instance: {exc}") from None
    return g


def load_instance(text: str, fmt: str = "auto") -> ColoredGraph:
    if fmt == "json" or (fmt == "auto" and text.lstrip().startswith("{")):
        try:
            return instance_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InstanceError(f"invalid JSON: {exc}") from None
    return parse_instance(text)


def dump_instance(g: ColoredGraph, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(instance_to_dict(g), indent=2) + "\n"
    return serialize_instance(g)


# -- matchings ---------------------------------------------------------------

@dataclass(frozen=True)
class Matching:
    edge_ids: frozenset
    per_color_count: dict = field(compare=False)
    total_profit: Fraction = field(compare=False)

    @classmethod
    def from_edges(cls, g: ColoredGraph, ids: Iterable[int]) -> "Matching":
        ids = frozenset(ids)
        for i in ids:
            if not 0 <= i < g.m:
                raise InstanceError(f"unknown edge id {i}")
        counts = {j: 0 for j in range(g.k)}
        for i in ids:
            counts[g.edges[i].color] += 1
        return cls(ids, counts, sum((g.edges[i].profit for i in ids), Fraction(0)))

    def __len__(self) -> int:
        return len(self.edge_ids)

    def sorted_ids(self) -> list[int]:
        return sorted(self.edge_ids)

    def to_dict(self) -> dict:
        return {"edge_ids": self.sorted_ids(),
                "per_color_count": {str(j): c for j, c in sorted(self.per_color_count.items())},
                "total_profit": format_rational(self.total_profit)}


@dataclass(frozen=True)
class FeasibilityReport:
    is_matching: bool
    violations: dict
    max_multiplicative_violation: Fraction

    @property
    def respects_bounds(self) -> bool:
        return all(v == 0 for v in self.violations.values())

    @property
    def feasible(self) -> bool:
        return self.is_matching and self.respects_bounds

    def to_dict(self) -> dict:
        return {"is_matching": self.is_matching,
                "violations": {str(j): v for j, v in sorted(self.violations.items())},
                "max_multiplicative_violation": format_rational(self.max_multiplicative_violation)}


def verify_matching(g: ColoredGraph, m) -> FeasibilityReport:
    if not isinstance(m, Matching):
        m = Matching.from_edges(g, m)
    for i in m.edge_ids:
        if not 0 <= i < g.m:
            raise InstanceError(f"unknown edge id {i}")
    used = set()
    is_matching = True
    for i in sorted(m.edge_ids):
        e = g.edges[i]
        if e.u in used or e.v in used:
            is_matching = False
        used.update((e.u, e.v))
    counts = {j: 0 for j in range(g.k)}
    for i in m.edge_ids:
        counts[g.edges[i].color] += 1
    violations = {j: max(0, counts[j] - g.bounds[j]) for j in range(g.k)}
    ratio = max((Fraction(counts[j], g.bounds[j]) for j in range(g.k)), default=Fraction(0))
    return FeasibilityReport(is_matching, violations, ratio)
