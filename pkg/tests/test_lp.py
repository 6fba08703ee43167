import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from bcm.generators import GeneratorSpec, budget_path, gap_cycle, generate_instance, odd_cycle
from bcm.instance import ColoredGraph
from bcm.lp import (
    BLOSSOM,
    DEGREE_ONLY,
    Formulation,
    LpState,
    SeparationCapExceeded,
    build_model,
    dump_lp,
    separate_blossoms,
    solve_vertex,
    solve_with_cuts,
)
from bcm.simplex import maximize

from oracles import brute_force_violated_odd_sets, random_instance, scipy_lp_ranges, scipy_lp_value


def _solve(g, kind=DEGREE_ONLY, state=None):
    return solve_with_cuts(g, Formulation(kind), state or LpState.initial(g))


# -- simplex -------------------------------------------------------------------

def test_simplex_matches_highs_on_random_lps():
    rng = random.Random(5)
    for _ in range(120):
        n, m = rng.randint(1, 7), rng.randint(0, 6)
        c = [Fraction(rng.randint(-3, 6), rng.randint(1, 3)) for _ in range(n)]
        rows = [{j: Fraction(rng.randint(0, 3)) for j in range(n) if rng.random() < 0.6}
                for _ in range(m)]
        rhs = [Fraction(rng.randint(0, 6), rng.randint(1, 2)) for _ in range(m)]
        res = maximize(c, rows, rhs)
        A = np.array([[float(r.get(j, 0)) for j in range(n)] for r in rows]) if m else None
        ref = linprog([-float(v) for v in c], A_ub=A, b_ub=[float(b) for b in rhs] if m else None,
                      bounds=[(0, 1)] * n, method="highs")
        assert float(res.objective) == pytest.approx(-ref.fun, abs=1e-9)
        for r, b, s in zip(rows, rhs, res.slack):
            assert sum((a * res.x[j] for j, a in r.items()), Fraction(0)) + s == b
            assert s >= 0
        assert all(0 <= v <= 1 for v in res.x)


def test_simplex_rejects_negative_rhs():
    with pytest.raises(ValueError):
        maximize([1], [{0: 1}], [-1])


# -- model construction ------------------------------------------------------------

def test_single_edge_model(edge5):
    model = build_model(edge5, Formulation(), LpState.initial(edge5))
    assert model.counts() == {"vertex": 2, "color": 1, "blossom": 0}
    assert model.variables == (0,)


def test_c4gap_model(c4gap):
    model = build_model(c4gap, Formulation(), LpState.initial(c4gap))
    assert model.counts() == {"vertex": 4, "color": 2, "blossom": 0}
    assert len(model.variables) == 4
    relaxed = LpState(frozenset(range(4)), (Fraction(1),) * 2, frozenset({("color", 0)}))
    model = build_model(c4gap, Formulation(), relaxed)
    assert model.counts() == {"vertex": 4, "color": 1, "blossom": 0}
    assert ("color", 0) not in model.row_keys


def test_model_rows_follow_definition():
    g = random_instance(17, bound_range=(1, 3))
    model = build_model(g, Formulation(), LpState.initial(g))
    for key, es, rhs in model.rows:
        if key[0] == "vertex":
            assert set(es) == set(g.incident[key[1]]) and rhs == 1
        else:
            assert set(es) == set(g.color_classes[key[1]]) and rhs == g.bounds[key[1]]


def test_blossom_rows_only_from_cuts():
    g = odd_cycle(5)
    model = build_model(g, Formulation(BLOSSOM), LpState.initial(g))
    assert model.counts()["blossom"] == 0
    model = build_model(g, Formulation(BLOSSOM), LpState.initial(g), cuts=[(0, 1, 2, 3, 4)])
    assert model.row(("blossom", (0, 1, 2, 3, 4)))[2] == 2


def test_formulation_auto_rule():
    assert Formulation.auto("alpha", bipartite=False).kind == BLOSSOM
    assert Formulation.auto("alpha", bipartite=True).kind == DEGREE_ONLY
    for a in ("relax", "lambda", "half", "greedy"):
        assert Formulation.auto(a, bipartite=False).kind == DEGREE_ONLY
    with pytest.raises(ValueError):
        Formulation("cubic")


# -- vertex solutions -------------------------------------------------------------

def test_single_edge_solution(edge5):
    sol = _solve(edge5)
    assert sol.x == {0: 1} and sol.objective_value == 5


def test_c4gap_optimum_is_unique_half(c4gap):
    sol = _solve(c4gap)
    assert sol.objective_value == 2
    assert all(v == Fraction(1, 2) for v in sol.x.values())
    for lo, hi in scipy_lp_ranges(c4gap).values():
        assert lo == pytest.approx(0.5, abs=1e-9) and hi == pytest.approx(0.5, abs=1e-9)


def test_budget_path_optimum(bpath4):
    sol = _solve(bpath4)
    assert sol.objective_value == Fraction(7, 2)
    assert set(sol.x.values()) == {Fraction(1, 2)}
    for lo, hi in scipy_lp_ranges(bpath4).values():
        assert lo == pytest.approx(0.5, abs=1e-9) and hi == pytest.approx(0.5, abs=1e-9)


def test_solutions_are_feasible_optimal_vertices():
    for seed in range(80):
        g = random_instance(seed, profit_range=(0, 7), bound_range=(1, 3))
        sol = _solve(g)
        assert sol.is_feasible()
        assert sol.objective_value == sum((g.edges[e].profit * v for e, v in sol.x.items()),
                                          Fraction(0))
        assert sol.active_rank() == len(sol.x)
        assert float(sol.objective_value) == pytest.approx(scipy_lp_value(g), abs=1e-7)


def test_solve_is_deterministic():
    g = random_instance(4, bound_range=(1, 3))
    a, b = _solve(g), _solve(g)
    assert a.x == b.x and a.basis == b.basis


def test_relaxation_never_decreases_value():
    for seed in range(30):
        g = random_instance(seed, bound_range=(1, 2))
        base = _solve(g).objective_value
        for j in range(g.k):
            st = LpState(frozenset(range(g.m)), tuple(map(Fraction, g.bounds)),
                         frozenset({("color", j)}))
            assert _solve(g, state=st).objective_value >= base


def test_empty_model():
    g = ColoredGraph.build(3, [1], [])
    sol = _solve(g)
    assert sol.objective_value == 0 and sol.x == {} and not sol.support


# -- blossoms ---------------------------------------------------------------------

def test_triangle_half_solution_is_separated():
    tri = odd_cycle(3)
    x = {0: Fraction(1, 2), 1: Fraction(1, 2), 2: Fraction(1, 2)}
    assert separate_blossoms(tri, x) == [(0, 1, 2)]


def test_triangle_degree_only_vs_blossom():
    tri = odd_cycle(3)
    assert _solve(tri).objective_value == Fraction(3, 2)
    sol = _solve(tri, BLOSSOM)
    assert sol.objective_value == 1 and sol.is_integral() and sol.cut_rounds >= 1


def test_triangle_two_colors_value_one():
    tri = ColoredGraph.build(3, [1, 1], [(0, 1, 0, 1), (1, 2, 0, 1), (0, 2, 1, 1)])
    assert _solve(tri, BLOSSOM).objective_value == 1


def test_c4gap_has_no_violated_blossom(c4gap):
    assert separate_blossoms(c4gap, _solve(c4gap)) == []


def test_bipartite_solutions_never_violate_blossoms():
    for seed in range(25):
        g = random_instance(seed, family="random-bipartite", bound_range=(1, 3))
        sol = _solve(g)
        assert separate_blossoms(g, sol) == []


def test_separation_matches_brute_force():
    rng = random.Random(2)
    for seed in range(30):
        g = random_instance(seed, family="random-general", n_range=(4, 8))
        sol = _solve(g)
        found = set(separate_blossoms(g, sol))
        assert found == brute_force_violated_odd_sets(g, sol.x)
        # arbitrary degree-feasible fractional points too, not only vertices
        x = {e: Fraction(rng.randint(0, 4), 4) for e in range(g.m)}
        for v in range(g.n):
            load = sum((x[e] for e in g.incident[v]), Fraction(0))
            if load > 1:
                for e in g.incident[v]:
                    x[e] /= load
        assert set(separate_blossoms(g, x)) == brute_force_violated_odd_sets(g, x)


def test_blossom_solutions_satisfy_all_odd_sets():
    for seed in range(20):
        g = random_instance(seed, family="random-general", n_range=(5, 9), bound_range=(1, 3))
        sol = _solve(g, BLOSSOM)
        assert not brute_force_violated_odd_sets(g, sol.x)
        assert sol.active_rank() == len(sol.x)
        assert sol.cut_rounds <= 50


def test_separation_cap():
    g = odd_cycle(25)
    x = {e: Fraction(1, 2) for e in range(25)}
    with pytest.raises(SeparationCapExceeded, match="too large for exact separation"):
        separate_blossoms(g, x)


def test_dump_lp(c4gap):
    text = dump_lp(build_model(c4gap, Formulation(), LpState.initial(c4gap)))
    assert "Maximize" in text and "c0: x0 + x2 <= 1" in text and text.endswith("End\n")


# -- families ------------------------------------------------------------------------

def test_gap_cycle_structure():
    g = gap_cycle(4)
    assert [e.color for e in g.edges] == [0, 1, 0, 1] and g.bounds == (1, 1)
    with pytest.raises(ValueError):
        gap_cycle(5)


def test_budget_path_structure():
    g = budget_path(4)
    assert g.n == 8 and g.m == 7
    assert g.color_classes[0] == (0, 2, 4, 6) and g.bounds[0] == 2
    # the second color is never binding
    assert g.bounds[1] >= len(g.color_classes[1])


def test_budget_path_half_point_for_larger_n():
    # the all-1/2 point needs the budget n/2 to be exact, so n is even
    for n in (2, 6, 8):
        g = budget_path(n)
        sol = _solve(g)
        assert sol.objective_value == Fraction(2 * n - 1, 2)


def test_budget_path_integral_solutions_below_lp_when_budget_binds(bpath4):
    # any integral solution using fewer than n budgeted edges has at most n-1 edges
    from oracles import all_matchings
    lp = _solve(bpath4).objective_value
    best = max(len(M) for M in all_matchings(bpath4)
               if sum(1 for e in M if bpath4.edges[e].color == 0) < 4)
    assert best == 3 < lp


def test_random_generator_fields():
    g = generate_instance(GeneratorSpec("random-bipartite", n=8, m=10, k=3, seed=1,
                                        profit_range=(2, 4), bound_range=(1, 2)))
    assert g.is_bipartite and g.m == 10
    assert all(2 <= e.profit <= 4 for e in g.edges)
    assert all(1 <= w <= 2 for w in g.bounds)
    assert all(e.u < 4 <= e.v for e in g.edges)
