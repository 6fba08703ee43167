"""
Inside a vertex solution
========================

Decompose the tight rows of an extreme point, find the witness the rounding
algorithms act on, and split each edge's unit of charge between its color
and its endpoints.
"""

from bcm import gap_cycle
from bcm.lp import Formulation, LpState, solve_with_cuts
from bcm.structure import (
    ALG4_PRIORITY,
    HALF_PRIORITY,
    charge_audit,
    check_bounds,
    decompose_tight,
    find_witness,
)

g = gap_cycle(4)
sol = solve_with_cuts(g, Formulation(), LpState.initial(g))
d = decompose_tight(g, sol)

print("support", d.support)
print("basis", d.basis)   # as many independent tight rows as support edges
print("tight vertices", d.tight_vertices, "tight colors", d.tight_colors)

# the two algorithms look for different things first
print("lambda rounding acts on", find_witness(g, sol, ALG4_PRIORITY))
print("no-violation rounding acts on", find_witness(g, sol, HALF_PRIORITY))

rep = charge_audit(g, sol, d)
for obj, amount in sorted(rep.received.items()):
    print(f"  {obj[0]:6} {obj[1]} receives {amount}")
print("offered", rep.offered_total, "received", rep.received_total, "->", rep.conclusion)

print(check_bounds(g, sol, d, bipartite=True).to_dict())
