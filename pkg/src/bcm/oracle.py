"""Ground truth at desk scale and the guarantee auditor.

``exact_opt`` is a branch-and-bound over edges in profit order.  An
independent maximum-weight matching DP over vertex subsets is kept for
cross-checking it on instances whose color bounds never bind.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .algorithms import AlgoParams, AlgorithmRun, run_algorithm, step_drop_checks
from .lp import Formulation, LpState, solve_with_cuts
from .instance import ColoredGraph, Matching, format_rational, parse_rational, verify_matching

ORACLE_CAP = 30


class OracleCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    opt_value: Fraction
    witness: Matching
    node_count: int


def exact_opt(g: ColoredGraph, cap: int = ORACLE_CAP) -> OracleResult:
    if g.m > cap:
        raise OracleCapExceeded(f"exact oracle limited to {cap} edges, instance has {g.m}")
    order = sorted(g.edges, key=lambda e: (-e.profit, e.id))
    used = [False] * g.n
    budget = list(g.bounds)
    chosen: list = []
    best_val = Fraction(-1)
    best_set: list = []
    nodes = 0

    def bound(i):
        # per-color top-b profits among still-compatible edges, and at most
        # half of the free vertices worth of edges overall
        per = {}
        for e in order[i:]:
            if used[e.u] or used[e.v] or budget[e.color] == 0:
                continue
            lst = per.setdefault(e.color, [])
            if len(lst) < budget[e.color]:
                lst.append(e.profit)
        vals = sorted((p for lst in per.values() for p in lst), reverse=True)
        free = used.count(False) // 2
        return sum(vals[:free], Fraction(0))

    def dfs(i, val):
        nonlocal best_val, best_set, nodes
        nodes += 1
        if val > best_val:
            best_val, best_set = val, list(chosen)
        if i == len(order) or val + bound(i) <= best_val:
            return
        e = order[i]
        if not used[e.u] and not used[e.v] and budget[e.color] > 0:
            used[e.u] = used[e.v] = True
            budget[e.color] -= 1
            chosen.append(e.id)
            dfs(i + 1, val + e.profit)
            chosen.pop()
            budget[e.color] += 1
            used[e.u] = used[e.v] = False
        dfs(i + 1, val)

    dfs(0, Fraction(0))
    return OracleResult(best_val, Matching.from_edges(g, best_set), nodes)


def max_weight_matching_dp(g: ColoredGraph) -> Fraction:
    """Maximum-weight matching ignoring colors, by DP over used-vertex masks."""
    if g.n > 20:
        raise OracleCapExceeded("vertex-subset DP limited to 20 vertices")
    adj = [[] for _ in range(g.n)]
    for e in g.edges:
        adj[e.u].append((e.v, e.profit))
        adj[e.v].append((e.u, e.profit))
    full = (1 << g.n) - 1

    @lru_cache(maxsize=None)
    def f(mask):
        if mask == full:
            return Fraction(0)
        v = (~mask & full).bit_length() - 1  # highest free vertex
        rest = mask | 1 << v
        best = f(rest)
        for u, p in adj[v]:
            if not rest >> u & 1:
                best = max(best, p + f(rest | 1 << u))
        return best

    return f(0)


# -- extendibility -------------------------------------------------------------

def _feasible(g: ColoredGraph, ids) -> bool:
    seen, count = set(), {}
    for e in ids:
        edge = g.edges[e]
        if edge.u in seen or edge.v in seen:
            return False
        seen.update((edge.u, edge.v))
        count[edge.color] = count.get(edge.color, 0) + 1
        if count[edge.color] > g.bounds[edge.color]:
            return False
    return True


@dataclass
class ExtendibilityReport:
    samples: int
    checked: int = 0
    skipped: int = 0
    counterexamples: list = field(default_factory=list)
    exchange_sizes: dict = field(default_factory=dict)   # |Y'| -> occurrences

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {"samples": self.samples, "checked": self.checked, "skipped": self.skipped,
                "counterexamples": self.counterexamples,
                "exchange_sizes": {str(k): v for k, v in sorted(self.exchange_sizes.items())}}


def minimal_exchange(g: ColoredGraph, M, Mp, e, limit: int = 3):
    """Smallest Y' within Mp - M (size <= limit) with (Mp - Y') + e feasible, or None."""
    pool = sorted(set(Mp) - set(M))
    for r in range(limit + 1):
        for Y in itertools.combinations(pool, r):
            if _feasible(g, (set(Mp) - set(Y)) | {e}):
                return Y
    return None


def check_extendibility(g: ColoredGraph, samples: int, seed: int = 0,
                        limit: int = 3) -> ExtendibilityReport:
    """Sample (M, M', e) with M a subset of M' both feasible and M + e feasible
    and search exhaustively for an exchange set of size at most ``limit``."""
    rng = random.Random(seed)
    rep = ExtendibilityReport(samples)
    for _ in range(samples):
        ids = list(range(g.m))
        rng.shuffle(ids)
        Mp = []
        for e in ids:
            if rng.random() < 0.7 and _feasible(g, Mp + [e]):
                Mp.append(e)
        M = [e for e in Mp if rng.random() < 0.5]
        cands = [e for e in range(g.m) if e not in Mp and _feasible(g, M + [e])]
        if not cands:
            rep.skipped += 1
            continue
        e = rng.choice(cands)
        rep.checked += 1
        Y = minimal_exchange(g, M, Mp, e, limit)
        if Y is None:
            rep.counterexamples.append({"M": sorted(M), "M_prime": sorted(Mp), "e": e})
        else:
            rep.exchange_sizes[len(Y)] = rep.exchange_sizes.get(len(Y), 0) + 1
    return rep


# -- guarantee audit -------------------------------------------------------------

@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: Fraction
    op: str
    rhs: Fraction
    enforced: bool = True

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs if self.op == ">=" else self.lhs <= self.rhs

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": format_rational(self.lhs), "op": self.op,
                "rhs": format_rational(self.rhs), "holds": self.holds, "enforced": self.enforced}


def color_cap(algorithm: str, w: int, params: AlgoParams) -> Fraction:
    if algorithm == "alpha":
        return Fraction(params.alpha)
    if algorithm == "relax":
        return Fraction(w + 1)
    if algorithm == "lambda":
        return Fraction(math.floor(2 * w / (1 + params.lam)) + 1)
    return Fraction(w)


def ratio_bound(algorithm: str, params: AlgoParams, lp0, opt, bipartite: bool):
    """(name, rhs, enforced) for the value guarantee, or None if it needs a missing opt."""
    if algorithm == "greedy":
        if opt is None:
            return None
        return "sol >= opt/3", opt / 3, True
    if algorithm == "alpha":
        a = params.alpha
        c = 3 if bipartite else 4
        return (f"sol >= LP0*(1-{c}/alpha)+1/alpha+1",
                lp0 * (1 - Fraction(c, a)) + Fraction(1, a) + 1, True)
    if algorithm == "relax":
        return "sol >= LP0/2", lp0 / 2, bipartite
    if algorithm == "lambda":
        return "sol >= 2/(3+lambda)*LP0", 2 / (3 + params.lam) * lp0, True
    return "sol >= LP0/2", lp0 / 2, True


def _inequalities(raw: dict, params: AlgoParams) -> list:
    algorithm = raw["algorithm"]
    sol, lp0, opt = raw["sol"], raw["lp0"], raw["opt"]
    out = []
    rb = ratio_bound(algorithm, params, lp0, opt, raw["bipartite"])
    if rb is not None:
        out.append(Inequality(rb[0], sol, ">=", rb[1], rb[2]))
    if algorithm == "alpha":
        # same derivation with the total loss clamped at zero; recorded only
        a, c = params.alpha, 3 if raw["bipartite"] else 4
        loss = max(Fraction(0), (c * lp0 - 1 - a) / a)
        out.append(Inequality(f"sol >= LP0-max(0,({c}*LP0-1-alpha)/alpha)", sol, ">=",
                              lp0 - loss, False))
    excess = [Fraction(c) - color_cap(algorithm, w, params)
              for c, w in zip(raw["counts"], raw["bounds"])]
    out.append(Inequality("max_j (count_j - cap_j) <= 0", max(excess, default=Fraction(0)),
                          "<=", Fraction(0)))
    if raw["steps"]:
        out.append(Inequality("max per-step LP drop excess <= 0",
                              max(d - a for _, d, a in raw["steps"]), "<=", Fraction(0)))
    if opt is not None and algorithm in ("greedy", "half"):
        out.append(Inequality("sol <= opt", sol, "<=", opt))
    return out


@dataclass
class RunReport:
    instance: str
    algorithm: str
    params: AlgoParams
    sol: Fraction
    lp0: Fraction | None
    opt: Fraction | None
    bipartite: bool
    edges: list
    counts: list
    bounds: list
    is_matching: bool
    steps: list                   # (action, drop, allowed)
    inequalities: list
    wall_time: float | None = None
    trace_path: str | None = None

    @property
    def violations(self) -> list:
        return [max(0, c - w) for c, w in zip(self.counts, self.bounds)]

    @property
    def max_violation(self) -> int:
        return max(self.violations, default=0)

    @property
    def ok(self) -> bool:
        return self.is_matching and all(i.holds for i in self.inequalities if i.enforced)

    def raw(self) -> dict:
        return {"algorithm": self.algorithm, "sol": self.sol, "lp0": self.lp0, "opt": self.opt,
                "bipartite": self.bipartite, "counts": self.counts, "bounds": self.bounds,
                "steps": self.steps}

    def to_dict(self, include_time: bool = False) -> dict:
        fr = lambda q: None if q is None else format_rational(q)
        d = {
            "instance": self.instance,
            "algorithm": self.algorithm,
            "params": self.params.to_dict(),
            "sol": fr(self.sol),
            "lp0": fr(self.lp0),
            "opt": fr(self.opt),
            "ratio_to_lp0": fr(self.sol / self.lp0) if self.lp0 else None,
            "ratio_to_opt": fr(self.sol / self.opt) if self.opt else None,
            "bipartite": self.bipartite,
            "matching": self.edges,
            "per_color_count": self.counts,
            "bounds": self.bounds,
            "violation": self.violations,
            "max_violation": self.max_violation,
            "is_matching": self.is_matching,
            "steps": [{"action": a, "drop": fr(dr), "allowed": fr(al)} for a, dr, al in self.steps],
            "inequalities": [i.to_dict() for i in self.inequalities],
            "ok": self.ok,
            "trace": self.trace_path,
        }
        if include_time:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, include_time: bool = False) -> str:
        return json.dumps(self.to_dict(include_time), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        """Load a report and re-derive every inequality from the raw values."""
        pr = lambda s: None if s is None else parse_rational(s)
        p = d["params"]
        params = AlgoParams(d["algorithm"], alpha=p.get("alpha"),
                            lam=pr(p.get("lambda")), order=p.get("order", "id"))
        rep = cls(d["instance"], d["algorithm"], params, pr(d["sol"]), pr(d["lp0"]), pr(d["opt"]),
                  d["bipartite"], list(d["matching"]), list(d["per_color_count"]),
                  list(d["bounds"]), d["is_matching"],
                  [(s["action"], pr(s["drop"]), pr(s["allowed"])) for s in d["steps"]], [],
                  d.get("wall_time"), d.get("trace"))
        rep.inequalities = _inequalities(rep.raw(), params)
        stored = {(i["name"], i["holds"]) for i in d["inequalities"]}
        derived = {(i.name, i.holds) for i in rep.inequalities}
        if stored != derived:
            raise ValueError(f"report inequalities do not match raw values: {sorted(stored ^ derived)}")
        if d.get("ok") is not None and d["ok"] != rep.ok:
            raise ValueError("report ok flag does not match its inequalities")
        return rep

    def csv_row(self) -> dict:
        fr = lambda q: "" if q is None else format_rational(q)
        return {"instance": self.instance, "algo": self.algorithm, "params": self.params.label(),
                "sol": fr(self.sol), "lp": fr(self.lp0), "opt": fr(self.opt),
                "max_violation": self.max_violation, "ok": "ok" if self.ok else "FAIL",
                "error": ""}


def guarantee_audit(g: ColoredGraph, params: AlgoParams, *, instance: str = "",
                    formulation=None, oracle_cap: int = ORACLE_CAP, on_solve=None,
                    run: AlgorithmRun | None = None) -> RunReport:
    """Run one algorithm (unless ``run`` is given) and evaluate its guarantee exactly."""
    start = time.perf_counter()
    if run is None:
        run = run_algorithm(g, params, formulation=formulation, on_solve=on_solve)
    elapsed = time.perf_counter() - start
    lp0 = run.lp0
    uniform = params.algorithm in ("alpha", "lambda", "half")
    target = g.with_unit_profits() if uniform else g
    opt = exact_opt(target).opt_value if g.m <= oracle_cap else None
    if lp0 is None:
        lp0 = solve_with_cuts(g, Formulation(), LpState.initial(g)).objective_value
    fr = verify_matching(g, run.matching)
    sol = Fraction(len(run.matching)) if uniform else run.matching.total_profit
    counts = [run.matching.per_color_count.get(j, 0) for j in range(g.k)]
    steps = [(c.action, c.drop, c.allowed) for c in step_drop_checks(run, target)]
    rep = RunReport(instance, params.algorithm, params, sol, lp0, opt, g.is_bipartite,
                    run.matching.sorted_ids(), counts, list(g.bounds), fr.is_matching, steps, [],
                    elapsed)
    rep.inequalities = _inequalities(rep.raw(), params)
    return rep


CSV_FIELDS = ["instance", "algo", "params", "sol", "lp", "opt", "max_violation", "ok", "error"]


def error_row(instance: str, algorithm: str, params: str, message: str) -> dict:
    row = dict.fromkeys(CSV_FIELDS, "")
    row.update(instance=instance, algo=algorithm, params=params, ok="ERROR", error=message)
    return row


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    good = sum(1 for r in rows if r["ok"] == "ok")
    buf.write(f"# summary: {good}/{len(rows)} ok{'' if good == len(rows) else ' - FAILURES'}\n")
    return buf.getvalue()
