"""
Trading value for violation
===========================

The lambda parameter decides how much of a color's budget a rounded edge
uses up.  At 0 only the LP value is charged, so the budget survives longer
and more edges of that color slip in; at 1 the full edge is charged.
"""

from fractions import Fraction

import numpy as np

from bcm import AlgoParams, GeneratorSpec, budget_path, generate_instance, run_algorithm

LAMBDAS = [Fraction(i, 4) for i in range(5)]

# budget paths: the budgeted color has bound n/2 but n edges at 1/2 each
print("n   lambda  |M|  budgeted edges  bound  cap")
for n in (4, 8):
    g = budget_path(n)
    for lam in LAMBDAS:
        m = run_algorithm(g, AlgoParams("lambda", lam=lam)).matching
        cap = int(2 * g.bounds[0] / (1 + lam)) + 1
        print(f"{n:<3} {str(lam):6}  {len(m):3}  {m.per_color_count[0]:14}  {g.bounds[0]:5}  {cap:3}")

# a seeded corpus, summarized per lambda
corpus = [generate_instance(GeneratorSpec("random-bipartite", n=16, m=40, k=2, seed=s,
                                          bound_range=(3, 5)))
          for s in range(40)]
print("\nlambda  min ratio  total surplus  promised ratio")
for lam in LAMBDAS:
    runs = [run_algorithm(g, AlgoParams("lambda", lam=lam)) for g in corpus]
    ratios = np.array([len(r.matching) / r.lp0 for r in runs], dtype=float)
    surplus = sum(max(0, r.matching.per_color_count[j] - g.bounds[j])
                  for r, g in zip(runs, corpus) for j in range(g.k))
    print(f"{str(lam):6}  {ratios.min():9.3f}  {surplus:13d}  {float(2 / (3 + lam)):.3f}")
