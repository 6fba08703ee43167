"""
Where the LP and greedy fall short
==================================

Two tiny instances that pin down the weak spots: a 4-cycle whose LP value
is twice the best matching, and a six-vertex graph on which greedy picks
one edge out of a possible three.
"""

from bcm import AlgoParams, exact_opt, gap_cycle, greedy_adversary, guarantee_audit
from bcm.lp import Formulation, LpState, solve_with_cuts

# the alternating 4-cycle: every edge at 1/2, but two colors with budget 1
g = gap_cycle(4)
sol = solve_with_cuts(g, Formulation(), LpState.initial(g))
print("C4 LP point:", sol.x_str())
print("C4 LP value", sol.objective_value, "vs integral", exact_opt(g).opt_value)

# the gap grows with the cycle only when colors repeat on both halves
for n in (6, 8, 10):
    h = gap_cycle(n)
    lp = solve_with_cuts(h, Formulation(), LpState.initial(h)).objective_value
    print(f"C{n}: LP {lp}  opt {exact_opt(h).opt_value}")

# greedy with the adversarial tie-break takes (v1,u3) first and is stuck
f2 = greedy_adversary()
rep = guarantee_audit(f2, AlgoParams("greedy", order="adversarial"), instance="adversary")
print("greedy", rep.edges, "sol", rep.sol, "opt", rep.opt)
for ineq in rep.inequalities:
    print(" ", ineq.name, ineq.lhs, ineq.op, ineq.rhs, "holds" if ineq.holds else "FAILS")
