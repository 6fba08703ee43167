"""LP relaxations of bounded color matching and their exact vertex solutions.

Rows are identified by keys ``("vertex", v)``, ``("color", j)`` and
``("blossom", S)`` with ``S`` a sorted tuple of vertices.  Variables are the
live edges in increasing id order; rows are ordered vertex < color <
blossom and then by id, which together with Bland's rule pins down the
vertex the solver returns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import rank
from .instance import ColoredGraph, format_rational
from .simplex import maximize

DEGREE_ONLY = "degree-only"
BLOSSOM = "degree+blossom"
KIND_ORDER = {"vertex": 0, "color": 1, "blossom": 2}
SEPARATION_CAP = 22


class SeparationCapExceeded(RuntimeError):
    """Raised when exact odd-set separation would need too many vertices."""


@dataclass(frozen=True)
class Formulation:
    kind: str = DEGREE_ONLY

    def __post_init__(self):
        if self.kind not in (DEGREE_ONLY, BLOSSOM):
            raise ValueError(f"unknown formulation {self.kind!r}")

    @classmethod
    def auto(cls, algorithm: str, bipartite: bool) -> "Formulation":
        # only the alpha algorithm needs the blossom rows, and only off bipartite graphs
        if algorithm == "alpha" and not bipartite:
            return cls(BLOSSOM)
        return cls(DEGREE_ONLY)

    @classmethod
    def parse(cls, name: str, algorithm: str, bipartite: bool) -> "Formulation":
        if name == "auto":
            return cls.auto(algorithm, bipartite)
        if name in ("blossom", BLOSSOM):
            return cls(BLOSSOM)
        return cls(name)


@dataclass(frozen=True)
class LpState:
    """The mutable part of an iterative algorithm, frozen per solve."""
    live: frozenset
    bounds: tuple
    relaxed: frozenset = frozenset()

    @classmethod
    def initial(cls, g: ColoredGraph) -> "LpState":
        return cls(frozenset(range(g.m)), tuple(Fraction(w) for w in g.bounds))


def row_sort_key(key):
    return (KIND_ORDER[key[0]], key[1])


def row_name(key) -> str:
    kind, ident = key
    if kind == "blossom":
        return "b_" + "_".join(map(str, ident))
    return f"{kind[0]}{ident}"


@dataclass(frozen=True)
class LpModel:
    variables: tuple          # live edge ids, increasing
    objective: tuple          # profit per variable
    rows: tuple               # (key, tuple of edge ids with coefficient 1, rhs)
    relaxed: frozenset

    @property
    def row_keys(self) -> tuple:
        return tuple(r[0] for r in self.rows)

    def counts(self) -> dict:
        out = {"vertex": 0, "color": 0, "blossom": 0}
        for key, _, _ in self.rows:
            out[key[0]] += 1
        return out

    def row(self, key):
        for r in self.rows:
            if r[0] == key:
                return r
        raise KeyError(key)


def build_model(g: ColoredGraph, f: Formulation, state: LpState, cuts=()) -> LpModel:
    live = sorted(state.live)
    liveset = set(live)
    rows = []
    for v in range(g.n):
        key = ("vertex", v)
        if key in state.relaxed:
            continue
        es = tuple(e for e in g.incident[v] if e in liveset)
        if es:
            rows.append((key, tuple(sorted(es)), Fraction(1)))
    for j in range(g.k):
        key = ("color", j)
        if key in state.relaxed:
            continue
        es = tuple(e for e in g.color_classes[j] if e in liveset)
        if es:
            rows.append((key, es, Fraction(state.bounds[j])))
    if f.kind == BLOSSOM:
        for S in sorted(set(tuple(sorted(S)) for S in cuts)):
            key = ("blossom", S)
            if key in state.relaxed:
                continue
            inside = set(S)
            es = tuple(e for e in live if g.edges[e].u in inside and g.edges[e].v in inside)
            if es:
                rows.append((key, es, Fraction(len(S) - 1, 2)))
    rows.sort(key=lambda r: row_sort_key(r[0]))
    return LpModel(tuple(live), tuple(g.edges[e].profit for e in live), tuple(rows),
                   frozenset(state.relaxed))


@dataclass(frozen=True)
class VertexSolution:
    model: LpModel
    x: dict                   # edge id -> Fraction, every model variable
    objective_value: Fraction
    basis: tuple              # ("x", edge) or ("slack", row key), one per row
    tight_rows: tuple
    support: frozenset
    cut_rounds: int = 0
    pivots: int = field(default=0, compare=False)

    @property
    def total(self) -> Fraction:
        """Sum of the edge values (the cardinality objective)."""
        return sum(self.x.values(), Fraction(0))

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.x.values())

    def fractional_edges(self) -> list:
        return [e for e in sorted(self.support) if self.x[e] != 1]

    def unit_edges(self) -> list:
        return [e for e in sorted(self.support) if self.x[e] == 1]

    def row_activity(self, key) -> Fraction:
        _, es, _ = self.model.row(key)
        return sum((self.x[e] for e in es), Fraction(0))

    def active_rank(self) -> int:
        """Rank of the constraints active at x (tight rows and tight box bounds)."""
        vecs = []
        tight = set(self.tight_rows)
        for key, es, _ in self.model.rows:
            if key in tight:
                vecs.append({e: 1 for e in es})
        for e, v in self.x.items():
            if v == 0 or v == 1:
                vecs.append({e: 1})
        return rank(vecs)

    def is_feasible(self) -> bool:
        if any(v < 0 or v > 1 for v in self.x.values()):
            return False
        return all(sum((self.x[e] for e in es), Fraction(0)) <= b
                   for _, es, b in self.model.rows)

    def x_str(self) -> dict:
        return {str(e): format_rational(v) for e, v in sorted(self.x.items())}


def solve_vertex(model: LpModel) -> VertexSolution:
    pos = {e: i for i, e in enumerate(model.variables)}
    rows = [{pos[e]: 1 for e in es} for _, es, _ in model.rows]
    rhs = [b for _, _, b in model.rows]
    res = maximize(model.objective, rows, rhs)
    n = len(model.variables)
    x = {e: res.x[i] for i, e in enumerate(model.variables)}
    basis = tuple(("x", model.variables[j]) if j < n else ("slack", model.rows[j - n][0])
                  for j in res.basis)
    tight = tuple(model.rows[i][0] for i, s in enumerate(res.slack) if s == 0)
    return VertexSolution(model, x, res.objective, basis, tight,
                          frozenset(e for e, v in x.items() if v > 0), pivots=res.pivots)


# -- odd-set enumeration -------------------------------------------------------

def _odd_set_table(g: ColoredGraph, x: dict, cap: int):
    """Slack table over all odd subsets of the vertices touched by support(x).

    Returns ``(verts, masks, excess, scale)`` where ``excess[i] * 1/scale`` is
    ``x(E(S)) - (|S|-1)/2`` for the subset encoded by ``masks[i]``.
    """
    supp = [e for e, v in sorted(x.items()) if v > 0]
    verts = sorted({g.edges[e].u for e in supp} | {g.edges[e].v for e in supp})
    if len(verts) > cap:
        raise SeparationCapExceeded(
            f"instance too large for exact separation: {len(verts)} vertices > cap {cap}")
    if len(verts) < 3:
        empty = np.zeros(0, dtype=np.int64)
        return verts, empty, empty, 1
    idx = {v: i for i, v in enumerate(verts)}
    scale = 1
    for e in supp:
        scale = math.lcm(scale, x[e].denominator)
    weights = [(idx[g.edges[e].u], idx[g.edges[e].v], int(x[e] * scale)) for e in supp]
    size = len(verts)
    total = 2 * scale * (len(supp) + size)
    dtype = np.int64 if total < 2 ** 60 else object
    masks = np.arange(1 << size, dtype=np.int64)
    pop = np.bitwise_count(masks).astype(np.int64)
    keep = (pop % 2 == 1) & (pop >= 3)
    masks, pop = masks[keep], pop[keep]
    sums = np.zeros(len(masks), dtype=dtype)
    for a, b, w in weights:
        both = ((masks >> a) & (masks >> b) & 1).astype(dtype)
        sums = sums + both * w
    excess = 2 * sums - (pop.astype(dtype) - 1) * scale
    return verts, masks, excess, 2 * scale


def _decode(verts, mask) -> tuple:
    mask = int(mask)
    return tuple(v for i, v in enumerate(verts) if mask >> i & 1)


def separate_blossoms(g: ColoredGraph, sol, cap: int = SEPARATION_CAP, limit=None) -> list:
    """All odd sets S (|S| >= 3) with x(E(S)) > (|S|-1)/2, most violated first.

    Only vertices touched by the support are enumerated; with all degree rows
    satisfied an odd set reaching outside them cannot be violated unless its
    trace on them is.  An empty result certifies every blossom row.
    """
    x = sol.x if isinstance(sol, VertexSolution) else sol
    verts, masks, excess, _ = _odd_set_table(g, x, cap)
    hit = np.nonzero(excess > 0)[0]
    if len(hit) == 0:
        return []
    sizes = np.bitwise_count(masks[hit])
    order = sorted(range(len(hit)),
                   key=lambda i: (-excess[hit[i]], int(sizes[i]), _decode(verts, masks[hit[i]])))
    if limit is not None:
        order = order[:limit]
    return [_decode(verts, masks[hit[i]]) for i in order]


def blossom_excess(g: ColoredGraph, x: dict, S) -> Fraction:
    inside = set(S)
    val = sum((v for e, v in x.items() if g.edges[e].u in inside and g.edges[e].v in inside),
              Fraction(0))
    return val - Fraction(len(S) - 1, 2)


def tight_odd_sets(g: ColoredGraph, sol, cap: int = SEPARATION_CAP) -> list:
    """Every odd set of support vertices whose blossom row is tight at x."""
    x = sol.x if isinstance(sol, VertexSolution) else sol
    verts, masks, excess, _ = _odd_set_table(g, x, cap)
    hit = np.nonzero(excess == 0)[0]
    return sorted(_decode(verts, masks[i]) for i in hit)


def solve_with_cuts(g: ColoredGraph, f: Formulation, state: LpState, *,
                    cap: int = SEPARATION_CAP, max_rounds: int = 200,
                    per_round: int = 5) -> VertexSolution:
    """Optimal vertex of the formulation; blossom rows are added lazily.

    A vertex of a row subset that satisfies every omitted row is a vertex of
    the full system, so the last solve is a vertex of the blossom LP.
    """
    cuts: list = []
    for rounds in range(max_rounds):
        model = build_model(g, f, state, cuts)
        sol = solve_vertex(model)
        if f.kind != BLOSSOM:
            return sol
        violated = separate_blossoms(g, sol, cap, limit=per_round)
        if not violated:
            return VertexSolution(sol.model, sol.x, sol.objective_value, sol.basis,
                                  sol.tight_rows, sol.support, rounds, sol.pivots)
        cuts.extend(violated)
    raise RuntimeError(f"cut loop did not converge in {max_rounds} rounds")


def dump_lp(model: LpModel) -> str:
    """Human-readable LP text (CPLEX LP style) with exact rational coefficients."""
    def term(coef, e):
        return f"x{e}" if coef == 1 else f"{format_rational(coef)} x{e}"

    obj = " + ".join(term(c, e) for e, c in zip(model.variables, model.objective)) or "0"
    out = ["\\ bounded color matching relaxation", "Maximize", f" obj: {obj}", "Subject To"]
    for key, es, b in model.rows:
        lhs = " + ".join(f"x{e}" for e in es)
        out.append(f" {row_name(key)}: {lhs} <= {format_rational(b)}")
    out.append("Bounds")
    out.extend(f" 0 <= x{e} <= 1" for e in model.variables)
    if model.relaxed:
        out.append("\\ relaxed: " + " ".join(row_name(k) for k in sorted(model.relaxed, key=row_sort_key)))
    out.append("End")
    return "\n".join(out) + "\n"
