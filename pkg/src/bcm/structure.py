"""Structure of vertex solutions: tight decompositions, witnesses, charging.

At a vertex ``x`` with every support coordinate positive, the tight rows
restricted to the support contain ``|support|`` linearly independent ones.
``decompose_tight`` picks such a basis greedily (vertices, then colors, then
odd sets of a maximal laminar family, then unit box rows), and the other
helpers check the counting bounds and the charging argument on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import IndependenceTracker
from .instance import ColoredGraph, format_rational
from .lp import BLOSSOM, SEPARATION_CAP, VertexSolution, tight_odd_sets

UNIT_EDGE = "unit-edge"
SMALL_TIGHT_COLOR = "small-tight-color"
DEGREE_TWO_VERTEX = "degree-two-tight-vertex"

ALG4_PRIORITY = (UNIT_EDGE, SMALL_TIGHT_COLOR, DEGREE_TWO_VERTEX)
HALF_PRIORITY = (UNIT_EDGE, DEGREE_TWO_VERTEX, SMALL_TIGHT_COLOR)


class RankDefect(RuntimeError):
    """The tight rows at a supposed vertex do not span the support."""


class StructureLemmaViolated(RuntimeError):
    """No unit edge, small tight color or degree-two tight vertex exists."""


@dataclass(frozen=True)
class TightDecomposition:
    support: tuple
    tight_vertices: tuple
    tight_colors: tuple
    laminar: tuple            # maximal laminar family of tight odd sets
    unit_edges: tuple         # support edges at their upper bound
    basis: tuple              # chosen row keys, linearly independent

    def _part(self, kind):
        return tuple(ident for k, ident in self.basis if k == kind)

    @property
    def F(self) -> tuple:
        return self._part("vertex")

    @property
    def Q(self) -> tuple:
        return self._part("color")

    @property
    def L(self) -> tuple:
        return self._part("blossom")

    @property
    def box(self) -> tuple:
        return self._part("unit")

    def to_dict(self) -> dict:
        return {"support": list(self.support), "F": list(self.F), "Q": list(self.Q),
                "L": [list(S) for S in self.L], "unit_rows": list(self.box),
                "tight_vertices": list(self.tight_vertices),
                "tight_colors": list(self.tight_colors),
                "laminar_family": [list(S) for S in self.laminar]}


def is_laminar(sets) -> bool:
    ss = [frozenset(S) for S in sets]
    for i, a in enumerate(ss):
        for b in ss[i + 1:]:
            if a & b and not (a <= b or b <= a):
                return False
    return True


def _edges_inside(g: ColoredGraph, S, support) -> list:
    inside = set(S)
    return [e for e in support if g.edges[e].u in inside and g.edges[e].v in inside]


def decompose_tight(g: ColoredGraph, sol: VertexSolution, formulation=None,
                    cap: int = SEPARATION_CAP) -> TightDecomposition:
    """Tight families and a linearly independent basis of size ``|support|``.

    Zero coordinates are dropped first, which keeps the vertex property on
    the face they span.  Raises ``RankDefect`` if the input is not a vertex.
    """
    support = tuple(sorted(sol.support))
    supp = set(support)
    tight = set(sol.tight_rows)
    blossom_mode = (formulation.kind == BLOSSOM if formulation is not None
                    else any(k[0] == "blossom" for k in sol.model.row_keys))

    vertex_rows, color_rows = [], []
    for key, es, _ in sol.model.rows:
        if key not in tight:
            continue
        vec = {e: 1 for e in es if e in supp}
        if key[0] == "vertex":
            vertex_rows.append((key, vec))
        elif key[0] == "color":
            color_rows.append((key, vec))

    laminar = []
    if blossom_mode and support:
        cands = set(tight_odd_sets(g, sol, cap))
        cands.update(k[1] for k in tight if k[0] == "blossom")
        for S in sorted(cands, key=lambda S: (S[0], len(S), S)):
            fs = frozenset(S)
            if all(not (fs & frozenset(T)) or fs <= frozenset(T) or frozenset(T) <= fs
                   for T in laminar):
                laminar.append(S)
    laminar_rows = [(("blossom", S), {e: 1 for e in _edges_inside(g, S, support)})
                    for S in laminar]
    units = tuple(e for e in support if sol.x[e] == 1)
    unit_rows = [(("unit", e), {e: 1}) for e in units]

    tracker = IndependenceTracker()
    basis = []
    for key, vec in vertex_rows + color_rows + laminar_rows + unit_rows:
        if len(basis) == len(support):
            break
        if vec and tracker.add(vec):
            basis.append(key)
    if len(basis) != len(support):
        raise RankDefect(
            f"tight rows span rank {len(basis)} < |support| = {len(support)}; "
            "input is not a vertex solution")
    return TightDecomposition(
        support=support,
        tight_vertices=tuple(k[1] for k, _ in vertex_rows),
        tight_colors=tuple(k[1] for k, _ in color_rows),
        laminar=tuple(laminar),
        unit_edges=units,
        basis=tuple(basis),
    )


# -- witnesses ---------------------------------------------------------------

@dataclass(frozen=True)
class StructureWitness:
    kind: str
    ident: int

    def to_dict(self) -> dict:
        return {"kind": self.kind, "id": self.ident}


def support_degree(g: ColoredGraph, sol: VertexSolution, v: int) -> int:
    return sum(1 for e in g.incident[v] if e in sol.support)


def color_support(g: ColoredGraph, sol: VertexSolution, j: int) -> list:
    return [e for e in g.color_classes[j] if e in sol.support]


def witness_candidates(g: ColoredGraph, sol: VertexSolution) -> dict:
    """All witnesses of each kind present at ``sol``, smallest id first."""
    out = {UNIT_EDGE: [e for e in sorted(sol.support) if sol.x[e] == 1],
           SMALL_TIGHT_COLOR: [], DEGREE_TWO_VERTEX: []}
    tight = set(sol.tight_rows)
    for key, _, rhs in sol.model.rows:
        if key not in tight:
            continue
        kind, ident = key
        if kind == "color":
            if len(color_support(g, sol, ident)) <= rhs + 1:
                out[SMALL_TIGHT_COLOR].append(ident)
        elif kind == "vertex":
            if support_degree(g, sol, ident) == 2:
                out[DEGREE_TWO_VERTEX].append(ident)
    for kind in out:
        out[kind].sort()
    return out


def find_witness(g: ColoredGraph, sol: VertexSolution, priority=ALG4_PRIORITY) -> StructureWitness:
    cands = witness_candidates(g, sol)
    for kind in priority:
        if cands[kind]:
            return StructureWitness(kind, cands[kind][0])
    raise StructureLemmaViolated(
        "structure lemma violated: no unit edge, small tight color or "
        f"degree-two tight vertex at x = {sol.x_str()}")


# -- charging ----------------------------------------------------------------

@dataclass(frozen=True)
class ChargeReport:
    edge_given: dict          # edge -> charge landing on audited objects
    received: dict            # ("vertex", v) / ("color", j) -> charge
    offered_total: Fraction   # every edge offers exactly 1
    received_total: Fraction
    wasted: Fraction
    conclusion: str           # "hypothesis-refuted" or "dependency-found"
    witness: StructureWitness | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "edge_given": {str(e): format_rational(c) for e, c in sorted(self.edge_given.items())},
            "received": {f"{k}:{i}": format_rational(c) for (k, i), c in sorted(self.received.items())},
            "offered_total": format_rational(self.offered_total),
            "received_total": format_rational(self.received_total),
            "wasted": format_rational(self.wasted),
            "conclusion": self.conclusion,
            "witness": self.witness.to_dict() if self.witness else None,
        }


def charge_audit(g: ColoredGraph, sol: VertexSolution, d: TightDecomposition) -> ChargeReport:
    """Run the fractional charging scheme against the basis of ``d``.

    Every support edge offers (1 - x_e)/2 to its color and (1 + x_e)/4 to
    each endpoint; only colors in Q and vertices in F collect.
    """
    if d.L:
        raise ValueError("charging scheme is defined for the degree+color system only")
    support = [e for e in sorted(sol.support)]
    if any(sol.x[e] >= 1 for e in support):
        raise ValueError("charge audit needs every support coordinate strictly inside (0, 1)")
    F, Q = set(d.F), set(d.Q)
    bounds = {key[1]: rhs for key, _, rhs in sol.model.rows if key[0] == "color"}

    received = {("vertex", v): Fraction(0) for v in sorted(F)}
    received.update({("color", j): Fraction(0) for j in sorted(Q)})
    given = {}
    for e in support:
        xe = sol.x[e]
        edge = g.edges[e]
        got = Fraction(0)
        if edge.color in Q:
            c = (1 - xe) / 2
            received[("color", edge.color)] += c
            got += c
        for end in (edge.u, edge.v):
            if end in F:
                c = (1 + xe) / 4
                received[("vertex", end)] += c
                got += c
        given[e] = got
    offered = Fraction(len(support))
    total = sum(received.values(), Fraction(0))

    witness = None
    for j in sorted(Q):
        if len(color_support(g, sol, j)) <= bounds[j] + 1:
            witness = StructureWitness(SMALL_TIGHT_COLOR, j)
            break
    if witness is None:
        for v in sorted(F):
            if support_degree(g, sol, v) <= 2:
                witness = StructureWitness(DEGREE_TWO_VERTEX, v)
                break
    if witness is not None:
        return ChargeReport(given, received, offered, total, offered - total,
                            "hypothesis-refuted", witness)

    # every audited object collects >= 1, so nothing may be wasted and the
    # vertex rows sum to twice the color rows on the support
    notes = []
    if any(c < 1 for c in received.values()):
        notes.append("an audited object received less than 1")
    lhs = {e: Fraction(0) for e in support}
    for v in F:
        for e in g.incident[v]:
            if e in lhs:
                lhs[e] += Fraction(1, 2)
    rhs = {e: Fraction(0) for e in support}
    for j in Q:
        for e in color_support(g, sol, j):
            rhs[e] += 1
    if lhs == rhs:
        notes.append("1/2 sum of vertex rows equals sum of color rows")
    return ChargeReport(given, received, offered, total, offered - total,
                        "dependency-found", None, notes)


# -- counting bounds -----------------------------------------------------------

@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: Fraction
    op: str
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return {"<=": self.lhs <= self.rhs, "<": self.lhs < self.rhs}[self.op]

    @property
    def margin(self) -> Fraction:
        return Fraction(self.rhs) - Fraction(self.lhs)

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": format_rational(self.lhs), "op": self.op,
                "rhs": format_rational(self.rhs), "holds": self.holds}


@dataclass(frozen=True)
class BoundReport:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def check_bounds(g: ColoredGraph, sol: VertexSolution, d: TightDecomposition,
                 bipartite: bool) -> BoundReport:
    """Support-size and laminar-family bounds, measured against ``sum(x)``."""
    opt = sol.total
    supp = Fraction(len(d.support))
    checks = []
    if bipartite:
        checks.append(BoundCheck("support < 3*opt (bipartite)", supp, "<", 3 * opt))
    else:
        checks.append(BoundCheck("support <= 4*opt (general)", supp, "<=", 4 * opt))
    if d.laminar:
        universe = set()
        for e in d.support:
            universe.update((g.edges[e].u, g.edges[e].v))
        for S in d.laminar:
            universe.update(S)
        checks.append(BoundCheck("|L| <= floor((|V|-1)/2)", Fraction(len(d.laminar)), "<=",
                                 Fraction((len(universe) - 1) // 2)))
        checks.append(BoundCheck("max |S| <= 2*opt+1", Fraction(max(map(len, d.laminar))), "<=",
                                 2 * opt + 1))
    return BoundReport(tuple(checks))


def lemma_hypotheses_hold(g: ColoredGraph, sol: VertexSolution) -> bool:
    """Whether the support-size bounds apply: a nonempty support and every
    present color row with right-hand side at least 1 (so each tight color
    row accounts for at least one unit of the objective)."""
    if not sol.support:
        return False
    return all(rhs >= 1 for key, _, rhs in sol.model.rows if key[0] == "color")
