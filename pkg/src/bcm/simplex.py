"""Bounded-variable primal simplex in exact rational arithmetic.

Solves ``max c.x  s.t.  A x <= b,  0 <= x <= 1`` with ``b >= 0``, so the
all-slack basis is feasible from the start and no phase one is needed.
Pivoting follows Bland's rule (smallest eligible index enters, smallest
index leaves among ratio ties), which makes the returned vertex a pure
function of the column and row order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

MAX_PIVOTS = 100_000


@dataclass(frozen=True)
class SimplexResult:
    x: tuple[Fraction, ...]          # structural values
    slack: tuple[Fraction, ...]      # row slacks b - A x
    objective: Fraction
    basis: tuple[int, ...]           # basic column per row; columns >= n are slacks
    at_upper: frozenset              # nonbasic structural columns sitting at 1
    pivots: int


def maximize(c, rows, rhs) -> SimplexResult:
    """``rows`` is a list of sparse dicts ``{column: coefficient}`` over ``len(c)`` columns."""
    n = len(c)
    mrows = len(rows)
    c = [Fraction(v) for v in c]
    rhs = [Fraction(v) for v in rhs]
    if any(b < 0 for b in rhs):
        raise ValueError("right-hand sides must be nonnegative")
    ncols = n + mrows
    upper = [Fraction(1)] * n + [None] * mrows

    tab = []
    for i, row in enumerate(rows):
        r = {j: Fraction(a) for j, a in row.items() if a}
        r[n + i] = Fraction(1)
        tab.append(r)
    basis = [n + i for i in range(mrows)]
    is_basic = [False] * n + [True] * mrows
    val = [Fraction(0)] * n + list(rhs)
    at_upper = [False] * ncols
    # reduced costs of every column: d_j = c_j - c_B B^{-1} A_j
    d = {j: c[j] for j in range(n) if c[j]}

    pivots = 0
    while True:
        q = None
        for j in sorted(d):
            if is_basic[j]:
                continue
            if (d[j] > 0 and not at_upper[j]) or (d[j] < 0 and at_upper[j]):
                q = j
                break
        if q is None:
            break
        pivots += 1
        if pivots > MAX_PIVOTS:
            raise RuntimeError("simplex pivot limit exceeded")
        s = -1 if at_upper[q] else 1

        leave = None
        best_t = None
        leave_to_upper = False
        for i in range(mrows):
            a = tab[i].get(q)
            if not a:
                continue
            a = a * s  # rate at which basic variable i decreases
            bi = basis[i]
            if a > 0:
                t, to_upper = val[bi] / a, False
            elif upper[bi] is not None:
                t, to_upper = (upper[bi] - val[bi]) / (-a), True
            else:
                continue
            if best_t is None or t < best_t or (t == best_t and bi < basis[leave]):
                best_t, leave, leave_to_upper = t, i, to_upper
        flip = upper[q]
        if flip is not None and (best_t is None or flip <= best_t):
            best_t, leave = flip, None
        if best_t is None:
            raise RuntimeError("unbounded LP (cannot happen with box bounds)")

        if best_t:
            step = best_t * s
            val[q] += step
            for i in range(mrows):
                a = tab[i].get(q)
                if a:
                    val[basis[i]] -= a * step

        if leave is None:
            at_upper[q] = not at_upper[q]
            continue

        r = leave
        out = basis[r]
        prow = tab[r]
        pv = prow[q]
        prow = {j: a / pv for j, a in prow.items()}
        tab[r] = prow
        for i in range(mrows):
            if i == r:
                continue
            f = tab[i].get(q)
            if not f:
                continue
            row = tab[i]
            for j, a in prow.items():
                nv = row.get(j, 0) - f * a
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
        f = d.get(q)
        if f:
            for j, a in prow.items():
                nv = d.get(j, 0) - f * a
                if nv:
                    d[j] = nv
                else:
                    d.pop(j, None)
        basis[r] = q
        is_basic[q] = True
        is_basic[out] = False
        at_upper[q] = False
        at_upper[out] = leave_to_upper
        if leave_to_upper:
            val[out] = upper[out]
        else:
            val[out] = Fraction(0)

    x = tuple(val[:n])
    obj = sum((c[j] * x[j] for j in range(n)), Fraction(0))
    return SimplexResult(
        x=x,
        slack=tuple(val[n:]),
        objective=obj,
        basis=tuple(basis),
        at_upper=frozenset(j for j in range(n) if at_upper[j] and not is_basic[j]),
        pivots=pivots,
    )
