import json
from fractions import Fraction

import pytest

from bcm.algorithms import AlgoParams
from bcm.generators import gap_cycle
from bcm.instance import ColoredGraph, verify_matching
from bcm.oracle import (
    OracleCapExceeded,
    RunReport,
    check_extendibility,
    exact_opt,
    guarantee_audit,
    max_weight_matching_dp,
    minimal_exchange,
    rows_to_csv,
)

from oracles import enumerate_opt, networkx_mwm, random_instance


def test_exact_opt_adversary(adversary):
    res = exact_opt(adversary)
    assert res.opt_value == 3
    assert res.witness.sorted_ids() == [1, 2, 3]
    assert verify_matching(adversary, res.witness).feasible


def test_exact_opt_c4gap(c4gap):
    res = exact_opt(c4gap)
    assert res.opt_value == 1 and len(res.witness) == 1


def test_exact_opt_empty():
    res = exact_opt(ColoredGraph.build(0, [], []))
    assert res.opt_value == 0 and len(res.witness) == 0


def test_exact_opt_cap():
    g = gap_cycle(8)
    with pytest.raises(OracleCapExceeded, match="limited to 7"):
        exact_opt(g, cap=7)
    assert exact_opt(g).opt_value == enumerate_opt(g) == 3


def test_exact_opt_matches_enumeration():
    for seed in range(80):
        g = random_instance(seed, profit_range=(0, 6), bound_range=(1, 3))
        res = exact_opt(g)
        assert res.opt_value == enumerate_opt(g)
        rep = verify_matching(g, res.witness)
        assert rep.feasible and res.witness.total_profit == res.opt_value


def test_vacuous_budgets_agree_with_classical_matching():
    for seed in range(40):
        g0 = random_instance(seed, profit_range=(1, 9))
        g = ColoredGraph.build(g0.n, [g0.m] * g0.k,
                               [(e.u, e.v, e.color, e.profit) for e in g0.edges])
        opt = exact_opt(g).opt_value
        assert opt == max_weight_matching_dp(g) == networkx_mwm(g)


# -- extendibility ---------------------------------------------------------------------

def test_exchange_empty_when_no_conflict(adversary):
    assert minimal_exchange(adversary, [], [2], 1) == ()


def test_exchange_shared_budget(adversary):
    # (v1,u3) and (v2,u2) are both blue with budget 1
    assert minimal_exchange(adversary, [], [0], 1) == (0,)


def test_extendibility_sampling_corpus():
    total = 0
    for seed in range(10):
        g = random_instance(seed, bound_range=(1, 2))
        rep = check_extendibility(g, 30, seed=seed)
        assert rep.ok
        assert max(rep.exchange_sizes, default=0) <= 3
        total += rep.checked
    assert total > 100


def test_extendibility_is_reproducible(adversary):
    a = check_extendibility(adversary, 50, seed=3).to_dict()
    b = check_extendibility(adversary, 50, seed=3).to_dict()
    assert a == b


def test_exchange_limit_reports_counterexample():
    # the shared budget forces one removal, so limit 0 finds nothing
    g = ColoredGraph.build(4, [1], [(0, 1, 0, 1), (2, 3, 0, 1)])
    assert minimal_exchange(g, [], [0], 1, limit=0) is None
    assert minimal_exchange(g, [], [0], 1, limit=1) == (0,)


# -- audit --------------------------------------------------------------------------------

def _ineq(rep, prefix):
    (i,) = [i for i in rep.inequalities if i.name.startswith(prefix)]
    return i


def test_audit_adversary_greedy(adversary):
    rep = guarantee_audit(adversary, AlgoParams("greedy", order="adversarial"), instance="adversary")
    assert rep.sol == 1 and rep.opt == 3
    assert rep.sol / rep.opt == Fraction(1, 3)
    i = _ineq(rep, "sol >= opt/3")
    assert i.lhs == i.rhs and i.holds and rep.ok


def test_audit_c4gap_half(c4gap):
    rep = guarantee_audit(c4gap, AlgoParams("half"))
    assert (rep.sol, rep.lp0) == (1, 2)
    i = _ineq(rep, "sol >= LP0/2")
    assert i.lhs == i.rhs
    assert rep.max_violation == 0 and rep.ok


@pytest.mark.parametrize("params", [AlgoParams("greedy"), AlgoParams("relax"),
                                    AlgoParams("lambda", lam=Fraction(1, 2)),
                                    AlgoParams("half")])
def test_audit_single_edge(edge5, params):
    rep = guarantee_audit(edge5, params)
    unit = params.algorithm in ("lambda", "half")
    want = 1 if unit else 5
    assert rep.sol == rep.opt == rep.lp0 == want
    assert rep.ok


def test_report_round_trip_and_tamper(c4gap):
    rep = guarantee_audit(c4gap, AlgoParams("lambda", lam=Fraction(1, 2)), instance="c4")
    d = json.loads(rep.to_json())
    back = RunReport.from_dict(d)
    assert back.to_json() == rep.to_json()
    d["sol"] = "0"
    with pytest.raises(ValueError, match="do not match"):
        RunReport.from_dict(d)
    d = json.loads(rep.to_json())
    d["ok"] = not d["ok"]
    with pytest.raises(ValueError, match="ok flag"):
        RunReport.from_dict(d)


def test_report_json_uses_rational_strings(bpath4):
    d = guarantee_audit(bpath4, AlgoParams("relax")).to_dict()
    assert d["lp0"] == "7/2" and isinstance(d["sol"], str)
    assert "wall_time" not in d


def test_csv_projection(c4gap, adversary):
    rows = [guarantee_audit(g, AlgoParams("half"), instance=name).csv_row()
            for name, g in (("c4", c4gap), ("adversary", adversary))]
    text = rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "instance,algo,params,sol,lp,opt,max_violation,ok,error"
    assert lines[1] == "c4,half,,1,2,1,0,ok,"
    assert lines[-1] == "# summary: 2/2 ok"


def test_audit_totality_over_random_corpus():
    for seed in range(25):
        g = random_instance(seed, bound_range=(1, 3))
        for p in (AlgoParams("greedy"), AlgoParams("relax"), AlgoParams("lambda", lam=0),
                  AlgoParams("half")):
            rep = guarantee_audit(g, p)
            assert rep.is_matching
            assert rep.opt is not None
