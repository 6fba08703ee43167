"""Exact rank computations over the rationals."""

from __future__ import annotations

from fractions import Fraction


class IndependenceTracker:
    """Incremental Gauss-Jordan elimination over sparse rational vectors.

    Vectors are dicts mapping a column key to a coefficient.  ``add(vec)``
    keeps the vector and returns True when it is linearly independent of
    everything kept so far.
    """

    def __init__(self):
        # pivot column -> row with a 1 there and 0 in every other pivot column
        self._pivots: dict = {}

    def reduce(self, vec: dict) -> dict:
        v = {c: Fraction(a) for c, a in vec.items() if a}
        for col in [c for c in v if c in self._pivots]:
            f = v.get(col)
            if not f:
                continue
            for c, a in self._pivots[col].items():
                nv = v.get(c, 0) - f * a
                if nv:
                    v[c] = nv
                else:
                    v.pop(c, None)
        return v

    def add(self, vec: dict) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        col = min(v, key=repr)
        p = v[col]
        row = {c: a / p for c, a in v.items()}
        for other in self._pivots.values():
            f = other.get(col)
            if f:
                for c, a in row.items():
                    nv = other.get(c, 0) - f * a
                    if nv:
                        other[c] = nv
                    else:
                        other.pop(c, None)
        self._pivots[col] = row
        return True

    def __contains__(self, vec: dict) -> bool:
        return not self.reduce(vec)

    @property
    def rank(self) -> int:
        return len(self._pivots)


def rank(vectors) -> int:
    t = IndependenceTracker()
    for v in vectors:
        t.add(v)
    return t.rank
