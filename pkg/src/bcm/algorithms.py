"""Greedy and LP-based iterative algorithms for bounded color matching.

Every LP-based algorithm re-solves the current relaxation to an optimal
vertex after each step and records one ``IterationRecord`` per solve.  The
mutable state of a run is the set of live edges, the current (possibly
fractional) color bounds and the set of relaxed rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .instance import ColoredGraph, Matching, format_rational
from .lp import DEGREE_ONLY, Formulation, LpState, VertexSolution, row_name, solve_with_cuts
from .structure import (
    ALG4_PRIORITY,
    DEGREE_TWO_VERTEX,
    HALF_PRIORITY,
    SMALL_TIGHT_COLOR,
    StructureLemmaViolated,
    find_witness,
    witness_candidates,
)

ALGORITHMS = ("greedy", "alpha", "relax", "lambda", "half")
ALIASES = {"alg1": "greedy", "alg2": "alpha", "alg3": "relax", "alg4": "lambda",
           "half-no-violation": "half"}


@dataclass(frozen=True)
class AlgoParams:
    algorithm: str
    alpha: int | None = None
    lam: Fraction | None = None
    order: str = "id"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.lam is not None and not 0 <= self.lam <= 1:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.alpha is not None and self.alpha < 1:
            raise ValueError("alpha must be a positive integer")

    def label(self) -> str:
        if self.algorithm == "alpha":
            return f"alpha={self.alpha}"
        if self.algorithm == "lambda":
            return f"lambda={format_rational(self.lam)}"
        if self.algorithm == "greedy" and self.order != "id":
            return f"order={self.order}"
        return ""

    def to_dict(self) -> dict:
        d = {}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        if self.lam is not None:
            d["lambda"] = format_rational(self.lam)
        if self.algorithm == "greedy":
            d["order"] = self.order
        return d


@dataclass
class IterationRecord:
    iteration: int
    lp_value: Fraction
    support: int
    action: str
    targets: list = field(default_factory=list)
    x_value: Fraction | None = None
    bound_updates: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"iteration": self.iteration, "lp_value": format_rational(self.lp_value),
                "support": self.support, "action": self.action,
                "targets": [str(t) for t in self.targets],
                "x_value": None if self.x_value is None else format_rational(self.x_value),
                "bound_updates": {str(j): format_rational(b)
                                  for j, b in sorted(self.bound_updates.items())}}


@dataclass
class AlgorithmRun:
    algorithm: str
    params: AlgoParams
    matching: Matching
    lp0: Fraction | None
    trace: list
    residual: tuple = ()
    solves: int = 0

    @property
    def value(self) -> Fraction:
        """Profit for weighted algorithms, cardinality for uniform ones."""
        if self.algorithm in ("alpha", "lambda", "half"):
            return Fraction(len(self.matching))
        return self.matching.total_profit


# -- greedy ------------------------------------------------------------------

def greedy(g: ColoredGraph, order="id") -> Matching:
    """Highest profit first, skipping edges that touch a used vertex or an
    exhausted color.  ``order`` breaks profit ties: ``"id"``, ``"adversarial"``
    (file order as given) or an explicit sequence of edge ids."""
    if order in ("id", "adversarial"):
        rank = {e.id: i for i, e in enumerate(g.edges)}
    else:
        seq = list(order)
        rank = {e: i for i, e in enumerate(seq)}
        rank.update({e.id: len(seq) + e.id for e in g.edges if e.id not in rank})
    edges = sorted(g.edges, key=lambda e: (-e.profit, rank[e.id]))
    used = set()
    budget = list(g.bounds)
    chosen = []
    for e in edges:
        if e.u in used or e.v in used or budget[e.color] == 0:
            continue
        chosen.append(e.id)
        used.update((e.u, e.v))
        budget[e.color] -= 1
    return Matching.from_edges(g, chosen)


# -- shared iterative machinery ----------------------------------------------------

class _Run:
    def __init__(self, g: ColoredGraph, f: Formulation, on_solve: Callable | None):
        self.g = g
        self.f = f
        self.on_solve = on_solve
        self.live = set(range(g.m))
        self.bounds = [Fraction(w) for w in g.bounds]
        self.relaxed = set()
        self.taken = []
        self.trace = []
        self.lp0 = None
        self.solves = 0

    def solve(self) -> VertexSolution:
        state = LpState(frozenset(self.live), tuple(self.bounds), frozenset(self.relaxed))
        sol = solve_with_cuts(self.g, self.f, state)
        self.solves += 1
        if self.lp0 is None:
            self.lp0 = sol.objective_value
        if self.on_solve is not None:
            self.on_solve(self.g, sol, self.f)
        self.live = set(sol.support)
        limit = self.g.m + self.g.n + self.g.k + 1
        if self.solves > limit:
            raise RuntimeError(f"no termination after {limit} solves")
        return sol

    def record(self, sol, action, targets=(), x_value=None, bound_updates=None):
        self.trace.append(IterationRecord(len(self.trace), sol.objective_value, len(sol.support),
                                          action, list(targets), x_value, bound_updates or {}))

    def drop_vertex(self, v):
        self.live.difference_update(self.g.incident[v])

    def take(self, e):
        edge = self.g.edges[e]
        self.taken.append(e)
        self.drop_vertex(edge.u)
        self.drop_vertex(edge.v)

    def charge(self, j, amount, updates: dict):
        """Lower the bound of color j; a bound reaching 0 deletes the color."""
        if ("color", j) in self.relaxed:
            return
        b = max(Fraction(0), self.bounds[j] - amount)
        self.bounds[j] = b
        updates[j] = b
        if b == 0:
            self.live.difference_update(self.g.color_classes[j])

    def constrained(self, v) -> bool:
        return ("vertex", v) not in self.relaxed

    def take_units(self, sol, units):
        updates = {}
        for e in units:
            self.take(e)
            self.charge(self.g.edges[e].color, 1, updates)
        self.record(sol, "take-unit-edge", units, Fraction(1), updates)

    def round_at_vertex(self, sol, v, lam, action):
        es = [e for e in self.g.incident[v] if e in sol.support]
        e = max(es, key=lambda e: (sol.x[e], -e))
        xe = sol.x[e]
        updates = {}
        self.take(e)
        self.charge(self.g.edges[e].color, xe + lam * (1 - xe), updates)
        self.record(sol, action, [e, f"v{v}"], xe, updates)

    def finish(self, sol, algorithm, params, original: ColoredGraph, residual=()):
        self.record(sol, "finish", list(residual))
        return AlgorithmRun(algorithm, params, Matching.from_edges(original, self.taken),
                            self.lp0, self.trace, tuple(residual), self.solves)


def _require_uniform_bounds(g: ColoredGraph):
    if any(w != 1 for w in g.bounds):
        raise ValueError("the alpha algorithm needs every color bound equal to 1")


# -- alpha: additive violation, w_j = 1 -----------------------------------------------

def iterative_alpha(g: ColoredGraph, alpha: int, *, formulation: Formulation | None = None,
                    on_solve=None) -> AlgorithmRun:
    """Iterative relaxation/zero-rounding for 1-bounded instances.

    Takes unit edges; otherwise relaxes a tight color with at most ``alpha``
    live edges; otherwise zeroes the smallest edge (< 1/alpha) of a tight
    color.  Output has at most ``alpha`` edges of each color.
    """
    _require_uniform_bounds(g)
    minimum = 3 if g.is_bipartite else 4
    if alpha < minimum:
        raise ValueError(f"alpha must be >= {minimum} on {'bipartite' if minimum == 3 else 'general'} graphs")
    f = formulation or Formulation.auto("alpha", g.is_bipartite)
    gu = g.with_unit_profits()
    run = _Run(gu, f, on_solve)
    limit = Fraction(1, alpha)
    while True:
        sol = run.solve()
        if not sol.support:
            break
        units = sol.unit_edges()
        if units:
            run.take_units(sol, units)
            continue
        tight = [key[1] for key in sol.tight_rows if key[0] == "color"]
        small = [j for j in tight
                 if sum(1 for e in gu.color_classes[j] if e in sol.support) <= alpha]
        if small:
            j = min(small)
            run.relaxed.add(("color", j))
            run.record(sol, "relax-color", [f"c{j}"])
            continue
        cands = [(sol.x[e], e) for j in tight for e in gu.color_classes[j]
                 if e in sol.support and sol.x[e] < limit]
        if not cands:
            raise RuntimeError(f"no tight color to relax or round at x = {sol.x_str()}")
        xe, e = min(cands)
        run.live.discard(e)
        run.record(sol, "round-zero", [e], xe)
    return run.finish(sol, "alpha", AlgoParams("alpha", alpha=alpha), g)


# -- relax: weighted ((1/2, 0), (0, 1)) ---------------------------------------------

def _component_sequences(g: ColoredGraph, edges) -> list:
    """Split a max-degree-2 edge set into (edge sequence, is_cycle) pieces."""
    adj = {}
    for e in edges:
        for v in (g.edges[e].u, g.edges[e].v):
            adj.setdefault(v, []).append(e)
    if any(len(es) > 2 for es in adj.values()):
        raise RuntimeError("residual graph has a vertex of degree > 2")
    seen = set()
    pieces = []
    starts = sorted(v for v, es in adj.items() if len(es) == 1)
    for s in starts:
        if adj[s][0] in seen:
            continue
        seq, v, prev = [], s, None
        while True:
            nxt = [e for e in adj[v] if e != prev]
            if not nxt:
                break
            e = nxt[0]
            seq.append(e)
            seen.add(e)
            prev, v = e, g.other(e, v)
        pieces.append((seq, False))
    for e0 in sorted(edges):
        if e0 in seen:
            continue
        # cycle: walk from the smallest edge toward its smaller-id neighbour
        u, v = g.edges[e0].u, g.edges[e0].v
        nu = [e for e in adj[u] if e != e0][0]
        nv = [e for e in adj[v] if e != e0][0]
        cur = u if nv > nu else v  # leave e0 through the endpoint whose other edge is smaller
        seq, prev = [e0], e0
        while True:
            nxt = [e for e in adj[cur] if e != prev][0]
            if nxt == e0:
                break
            seq.append(nxt)
            prev, cur = nxt, g.other(nxt, cur)
        seen.update(seq)
        pieces.append((seq, True))
    return pieces


def _path_matching(g: ColoredGraph, seq) -> tuple:
    n = len(seq)
    best = [Fraction(0)] * (n + 2)
    take = [False] * n
    for i in range(n - 1, -1, -1):
        with_i = g.edges[seq[i]].profit + best[i + 2]
        take[i] = with_i >= best[i + 1]
        best[i] = with_i if take[i] else best[i + 1]
    out, i = [], 0
    while i < n:
        if take[i]:
            out.append(seq[i])
            i += 2
        else:
            i += 1
    return best[0], out


def max_weight_matching_paths_cycles(g: ColoredGraph, edges) -> list:
    """Exact maximum-profit matching of a disjoint union of paths and cycles."""
    chosen = []
    for seq, cycle in _component_sequences(g, edges):
        if not cycle:
            chosen.extend(_path_matching(g, seq)[1])
            continue
        inner_val, inner = _path_matching(g, seq[2:-1])
        with_first = g.edges[seq[0]].profit + inner_val
        without_val, without = _path_matching(g, seq[1:])
        chosen.extend([seq[0], *inner] if with_first >= without_val else without)
    return sorted(chosen)


def relax_and_decompose(g: ColoredGraph, *, formulation: Formulation | None = None,
                        on_solve=None) -> AlgorithmRun:
    """Relax every small tight color and degree-two tight vertex until the
    solution is integral, then match each path/cycle of the residual graph
    optimally.  Unit edges whose endpoints are both still constrained are
    taken as they appear."""
    f = formulation or Formulation(DEGREE_ONLY)
    run = _Run(g, f, on_solve)
    while True:
        sol = run.solve()
        if not sol.fractional_edges():
            break
        safe = [e for e in sol.unit_edges()
                if run.constrained(g.edges[e].u) and run.constrained(g.edges[e].v)]
        if safe:
            run.take_units(sol, safe)
            continue
        cands = witness_candidates(g, sol)
        colors, verts = cands[SMALL_TIGHT_COLOR], cands[DEGREE_TWO_VERTEX]
        if not colors and not verts:
            raise StructureLemmaViolated(
                f"structure lemma violated: nothing to relax at x = {sol.x_str()}")
        run.relaxed.update(("color", j) for j in colors)
        run.relaxed.update(("vertex", v) for v in verts)
        action = ",".join(a for a, ids in (("relax-color", colors), ("relax-vertex", verts)) if ids)
        run.record(sol, action, [f"c{j}" for j in colors] + [f"v{v}" for v in verts])
    residual = tuple(sorted(run.live))
    run.taken.extend(max_weight_matching_paths_cycles(g, residual))
    return run.finish(sol, "relax", AlgoParams("relax"), g, residual)


# -- lambda: ((2/(3+lambda), 0), (2/(1+lambda), 1)) ----------------------------------

def lambda_round(g: ColoredGraph, lam, *, formulation: Formulation | None = None,
                 on_solve=None) -> AlgorithmRun:
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    f = formulation or Formulation(DEGREE_ONLY)
    gu = g.with_unit_profits()
    run = _Run(gu, f, on_solve)
    while True:
        sol = run.solve()
        if not sol.support:
            break
        units = sol.unit_edges()
        if units:
            run.take_units(sol, units[:1])  # one edge per iteration
            continue
        w = find_witness(gu, sol, ALG4_PRIORITY)
        if w.kind == SMALL_TIGHT_COLOR:
            run.relaxed.add(("color", w.ident))
            run.record(sol, "relax-color", [f"c{w.ident}"])
        else:
            run.round_at_vertex(sol, w.ident, lam, "round-up")
    return run.finish(sol, "lambda", AlgoParams("lambda", lam=lam), g)


# -- half: 1/2 without violation --------------------------------------------------

def half_no_violation(g: ColoredGraph, *, formulation: Formulation | None = None,
                      on_solve=None) -> AlgorithmRun:
    f = formulation or Formulation(DEGREE_ONLY)
    gu = g.with_unit_profits()
    run = _Run(gu, f, on_solve)
    while True:
        sol = run.solve()
        if not sol.support:
            break
        units = sol.unit_edges()
        if units:
            run.take_units(sol, units[:1])  # one edge per iteration
            continue
        w = find_witness(gu, sol, HALF_PRIORITY)
        if w.kind == DEGREE_TWO_VERTEX:
            run.round_at_vertex(sol, w.ident, Fraction(1), "round-up")
        else:
            j = w.ident
            es = [e for e in gu.color_classes[j] if e in sol.support]
            e = max(es, key=lambda e: (sol.x[e], -e))
            xe = sol.x[e]
            updates = {}
            run.take(e)
            run.charge(j, 1, updates)
            run.record(sol, "round-up-color", [e, f"c{j}"], xe, updates)
    return run.finish(sol, "half", AlgoParams("half"), g)


# -- dispatch ------------------------------------------------------------------

def run_algorithm(g: ColoredGraph, params: AlgoParams, *, formulation=None, on_solve=None):
    """Run one algorithm; greedy is wrapped into an ``AlgorithmRun`` without LP data."""
    a = params.algorithm
    if a == "greedy":
        m = greedy(g, params.order)
        return AlgorithmRun("greedy", params, m, None, [], (), 0)
    if a == "alpha":
        run = iterative_alpha(g, params.alpha, formulation=formulation, on_solve=on_solve)
    elif a == "relax":
        run = relax_and_decompose(g, formulation=formulation, on_solve=on_solve)
    elif a == "lambda":
        run = lambda_round(g, params.lam, formulation=formulation, on_solve=on_solve)
    else:
        run = half_no_violation(g, formulation=formulation, on_solve=on_solve)
    run.params = params
    return run


# -- trace checks ------------------------------------------------------------------

@dataclass(frozen=True)
class StepCheck:
    iteration: int
    action: str
    drop: Fraction
    allowed: Fraction

    @property
    def holds(self) -> bool:
        return self.drop <= self.allowed


def step_drop_checks(run: AlgorithmRun, g: ColoredGraph) -> list:
    """LP decrease between consecutive solves against the per-step loss bound."""
    out = []
    for cur, nxt in zip(run.trace, run.trace[1:]):
        drop = cur.lp_value - nxt.lp_value
        a = cur.action
        if a == "take-unit-edge":
            if run.algorithm == "relax":
                allowed = sum((g.edges[e].profit for e in cur.targets), Fraction(0))
            else:
                allowed = Fraction(len(cur.targets))
        elif a.startswith("relax"):
            allowed = Fraction(0)
        elif a == "round-zero":
            allowed = Fraction(1, run.params.alpha)
        elif a == "round-up":
            lam = run.params.lam if run.algorithm == "lambda" else Fraction(1)
            allowed = 1 + (1 - cur.x_value) * (1 + lam)
        elif a == "round-up-color":
            allowed = Fraction(2)
        else:
            continue
        out.append(StepCheck(cur.iteration, a, drop, allowed))
    return out
