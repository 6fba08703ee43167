"""Command-line entry point: ``bcm solve|generate|verify|oracle|bench``.

Exit status is 0 on success, 2 on a usage error and 1 when an enforced
guarantee inequality (or a verification) fails.  Every message goes to
standard error; data goes to standard output or the named files.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .algorithms import ALIASES, ALGORITHMS, AlgoParams, run_algorithm
from .generators import FAMILIES, GeneratorSpec, generate_instance
from .instance import (
    InstanceError,
    dump_instance,
    format_rational,
    load_instance,
    parse_rational,
    verify_matching,
)
from .lp import Formulation, LpState, build_model, dump_lp, solve_with_cuts
from .oracle import (
    ORACLE_CAP,
    OracleCapExceeded,
    check_extendibility,
    error_row,
    exact_opt,
    guarantee_audit,
    rows_to_csv,
)
from .structure import (
    RankDefect,
    charge_audit,
    check_bounds,
    decompose_tight,
    find_witness,
    StructureLemmaViolated,
)

DEFAULT_MATRIX = "greedy,alpha,relax,lambda=1/2,half"


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (InstanceError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _range(text: str) -> tuple:
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from exc
    return lo, hi


def _algorithm(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in ALGORITHMS:
        raise argparse.ArgumentTypeError(
            f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    return name


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bcm", description="Bounded color matching toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def algo_flags(sp, default="relax"):
        sp.add_argument("--algorithm", "-a", type=_algorithm, default=default)
        sp.add_argument("--alpha", type=int, help="Algorithm 'alpha' parameter (default: smallest legal)")
        sp.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1, 2),
                        help="rounding parameter in [0,1] for 'lambda', as a/b")
        sp.add_argument("--order", default="id", choices=["id", "adversarial"],
                        help="greedy tie-break order")
        sp.add_argument("--formulation", default="auto", choices=["auto", "degree-only", "blossom"])

    s = sub.add_parser("solve", help="run one algorithm on one instance")
    s.add_argument("--input", "-i", required=True)
    algo_flags(s)
    s.add_argument("--format", choices=["text", "json"], default="text")
    s.add_argument("--audit", action="store_true", help="print a RunReport with structure data")
    s.add_argument("--trace", metavar="PATH", help="write the iteration trace as JSON lines")
    s.add_argument("--dump-lp", metavar="PATH", help="write the first LP in LP text form")
    s.add_argument("--seed", type=int, default=0, help="accepted for uniformity; solving is deterministic")
    s.add_argument("--output", "-o")

    g = sub.add_parser("generate", help="write a generated instance")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int, default=0)
    g.add_argument("--m", type=int, default=0)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--profit-range", type=_range, default=(1, 1))
    g.add_argument("--bound-range", type=_range, default=(1, 1))
    g.add_argument("--format", choices=["text", "json"], default="text")
    g.add_argument("--output", "-o")

    v = sub.add_parser("verify", help="check a matching against an instance")
    v.add_argument("--input", "-i", required=True)
    v.add_argument("--matching", "-M", required=True,
                   help="inline ids like 0,2, or a file with ids or JSON with edge_ids")
    v.add_argument("--strict", action="store_true", help="also fail on any bound violation")
    v.add_argument("--format", choices=["text", "json"], default="text")

    o = sub.add_parser("oracle", help="exact optimum and exchange-property sampling")
    o.add_argument("--input", "-i", required=True)
    o.add_argument("--cap", type=int, default=ORACLE_CAP)
    o.add_argument("--extendibility", type=int, default=0, metavar="SAMPLES")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--format", choices=["text", "json"], default="text")

    b = sub.add_parser("bench", help="audit a corpus directory against an algorithm matrix")
    b.add_argument("--corpus", required=True)
    b.add_argument("--matrix", default=DEFAULT_MATRIX,
                   help="comma list of greedy, alpha[=A], relax, lambda=a/b, half")
    b.add_argument("--formulation", default="auto", choices=["auto", "degree-only", "blossom"])
    b.add_argument("--out", help="CSV output path (default stdout)")
    b.add_argument("--json", help="also write every RunReport as a JSON list")
    b.add_argument("--jobs", type=int, default=1)
    return p


# -- solve -----------------------------------------------------------------------

def _params(args, g) -> AlgoParams:
    alpha = args.alpha
    if args.algorithm == "alpha" and alpha is None:
        alpha = 3 if g.is_bipartite else 4
    lam = args.lam if args.algorithm == "lambda" else None
    return AlgoParams(args.algorithm, alpha=alpha, lam=lam, order=args.order)


def _structure_section(g, sol, f) -> dict:
    out = {}
    try:
        d = decompose_tight(g, sol, f)
    except RankDefect as exc:
        return {"error": str(exc)}
    out["decomposition"] = d.to_dict()
    out["bounds"] = check_bounds(g, sol, d, g.is_bipartite).to_dict()
    try:
        out["witness"] = find_witness(g, sol).to_dict()
    except StructureLemmaViolated as exc:
        out["witness"] = {"error": str(exc)}
    fractional = sol.support and all(sol.x[e] < 1 for e in sol.support)
    if fractional and not d.L:
        out["charge"] = charge_audit(g, sol, d).to_dict()
    return out


def cmd_solve(args) -> int:
    g = load_instance(_read(args.input))
    params = _params(args, g)
    f = Formulation.parse(args.formulation, params.algorithm, g.is_bipartite)
    uniform = params.algorithm in ("alpha", "lambda", "half")
    first = {}

    def hook(gg, sol, ff):
        first.setdefault("sol", sol)
        first.setdefault("g", gg)

    run = run_algorithm(g, params, formulation=f, on_solve=hook)
    if args.dump_lp:
        target = g.with_unit_profits() if uniform else g
        model = first["sol"].model if "sol" in first else build_model(target, f, LpState.initial(target))
        Path(args.dump_lp).write_text(dump_lp(model), encoding="utf-8")
    if args.trace:
        lines = [json.dumps(r.to_dict(), sort_keys=True) for r in run.trace]
        Path(args.trace).write_text("".join(line + "\n" for line in lines), encoding="utf-8")

    if args.audit:
        rep = guarantee_audit(g, params, instance=args.input, formulation=f, run=run)
        rep.trace_path = args.trace
        d = rep.to_dict()
        if "sol" not in first:
            target = g.with_unit_profits() if uniform else g
            first["g"], first["sol"] = target, solve_with_cuts(target, f, LpState.initial(target))
        d["structure"] = _structure_section(first["g"], first["sol"], f)
        d["formulation"] = f.kind
        _write(args.output, json.dumps(d, indent=2, sort_keys=True) + "\n")
        if not rep.ok:
            print(f"bcm: guarantee failed for {args.input}: " + "; ".join(
                i.name for i in rep.inequalities if i.enforced and not i.holds), file=sys.stderr)
            return 1
        return 0

    report = verify_matching(g, run.matching)
    if args.format == "json":
        d = {"algorithm": params.algorithm, "params": params.to_dict(),
             "matching": run.matching.to_dict(), "feasibility": report.to_dict(),
             "lp0": None if run.lp0 is None else format_rational(run.lp0)}
        _write(args.output, json.dumps(d, indent=2, sort_keys=True) + "\n")
    else:
        lines = [f"algorithm {params.algorithm} {params.label()}".rstrip(),
                 "edges " + " ".join(map(str, run.matching.sorted_ids())),
                 f"size {len(run.matching)}",
                 f"profit {format_rational(run.matching.total_profit)}"]
        if run.lp0 is not None:
            lines.append(f"lp0 {format_rational(run.lp0)}")
        lines.append("per-color " + " ".join(str(run.matching.per_color_count.get(j, 0))
                                             for j in range(g.k)))
        lines.append("violations " + " ".join(str(report.violations.get(j, 0)) for j in range(g.k)))
        _write(args.output, "\n".join(lines) + "\n")
    return 0


# -- generate / verify / oracle -------------------------------------------------------

def cmd_generate(args) -> int:
    spec = GeneratorSpec(args.family, args.n, args.m, args.k, args.seed,
                         args.profit_range, args.bound_range)
    _write(args.output, dump_instance(generate_instance(spec), args.format))
    return 0


def _read_matching(text: str) -> list:
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        data = json.loads(text)
        if isinstance(data, dict):
            data = data.get("edge_ids", data.get("matching", {}).get("edge_ids") if
                            isinstance(data.get("matching"), dict) else data.get("matching"))
        return [int(e) for e in data]
    return [int(t) for t in text.replace(",", " ").split()]


def cmd_verify(args) -> int:
    g = load_instance(_read(args.input))
    try:
        inline = re.fullmatch(r"[\d,\s]*", args.matching)
        ids = _read_matching(args.matching if inline else _read(args.matching))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cannot read matching: {exc}") from exc
    rep = verify_matching(g, ids)
    if args.format == "json":
        sys.stdout.write(json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n")
    else:
        print(f"is_matching {str(rep.is_matching).lower()}")
        print("violations " + " ".join(str(rep.violations.get(j, 0)) for j in range(g.k)))
        print(f"max_multiplicative_violation {format_rational(rep.max_multiplicative_violation)}")
    if not rep.is_matching or (args.strict and not rep.respects_bounds):
        return 1
    return 0


def cmd_oracle(args) -> int:
    g = load_instance(_read(args.input))
    try:
        res = exact_opt(g, args.cap)
    except OracleCapExceeded as exc:
        raise UsageError(str(exc)) from exc
    out = {"opt": format_rational(res.opt_value), "witness": res.witness.sorted_ids(),
           "nodes": res.node_count}
    status = 0
    if args.extendibility:
        ext = check_extendibility(g, args.extendibility, args.seed)
        out["extendibility"] = ext.to_dict()
        status = 0 if ext.ok else 1
    if args.format == "json":
        sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    else:
        print(f"opt {out['opt']}")
        print("witness " + " ".join(map(str, out["witness"])))
        print(f"nodes {out['nodes']}")
        if args.extendibility:
            e = out["extendibility"]
            print(f"extendibility checked {e['checked']} skipped {e['skipped']} "
                  f"counterexamples {len(e['counterexamples'])}")
    return status


# -- bench ---------------------------------------------------------------------------

def parse_matrix(text: str) -> list:
    """``greedy,alpha=4,lambda=1/2`` or ``alg4(0)`` -> [(algorithm, alpha, lambda), ...]."""
    out = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        m = re.fullmatch(r"([\w-]+)(?:=(\S+)|\((\S+)\))?", item)
        if not m:
            raise UsageError(f"bad matrix entry {item!r}")
        val = m.group(2) or m.group(3) or ""
        try:
            name = _algorithm(m.group(1))
            alpha = lam = None
            if name == "alpha" and val:
                alpha = int(val)
            elif name == "lambda":
                lam = parse_rational(val or "1/2")
                if not 0 <= lam <= 1:
                    raise UsageError(f"lambda out of range in matrix entry {item!r}")
            elif val:
                raise UsageError(f"{name} takes no parameter ({item!r})")
        except (argparse.ArgumentTypeError, InstanceError, ValueError) as exc:
            raise UsageError(f"bad matrix entry {item!r}: {exc}") from exc
        out.append((name, alpha, lam))
    if not out:
        raise UsageError("empty algorithm matrix")
    return out


def _bench_one(task):
    path, rel, entry, formulation = task
    name, alpha, lam = entry
    label = (f"alpha={alpha}" if alpha else "alpha") if name == "alpha" else (
        f"lambda={format_rational(lam)}" if name == "lambda" else "")
    try:
        g = load_instance(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, InstanceError, ValueError) as exc:
        return error_row(rel, name, label, f"unreadable instance: {exc}"), None
    if name == "alpha":
        if any(w != 1 for w in g.bounds):
            row = error_row(rel, name, label, "precondition: all color bounds must be 1")
            row["ok"] = "n/a"
            return row, None
        alpha = alpha or (3 if g.is_bipartite else 4)
    params = AlgoParams(name, alpha=alpha, lam=lam)
    try:
        f = Formulation.parse(formulation, name, g.is_bipartite)
        rep = guarantee_audit(g, params, instance=rel, formulation=f)
    except Exception as exc:  # recorded as a failed row; the run continues
        return error_row(rel, name, params.label(), f"{type(exc).__name__}: {exc}"), None
    return rep.csv_row(), rep.to_dict()


def cmd_bench(args) -> int:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise UsageError(f"corpus directory not found: {corpus}")
    matrix = parse_matrix(args.matrix)
    files = sorted(p for p in corpus.iterdir() if p.is_file() and p.suffix in (".bcm", ".json"))
    tasks = [(str(p), p.name, entry, args.formulation) for p in files for entry in matrix]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_bench_one, tasks))
    else:
        results = [_bench_one(t) for t in tasks]
    order = sorted(range(len(tasks)), key=lambda i: (tasks[i][1], results[i][0]["algo"],
                                                       results[i][0]["params"]))
    rows = [results[i][0] for i in order]
    _write(args.out, rows_to_csv(rows))
    if args.json:
        reports = [results[i][1] or results[i][0] for i in order]
        Path(args.json).write_text(json.dumps(reports, indent=2, sort_keys=True) + "\n",
                                   encoding="utf-8")
    bad = [r for r in rows if r["ok"] not in ("ok", "n/a")]
    for r in bad:
        print(f"bcm: {r['instance']} {r['algo']} {r['params']}: {r['ok']} {r['error']}".rstrip(),
              file=sys.stderr)
    return 1 if bad else 0


COMMANDS = {"solve": cmd_solve, "generate": cmd_generate, "verify": cmd_verify,
            "oracle": cmd_oracle, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "lam", None) is not None and not 0 <= args.lam <= 1:
            raise UsageError(f"--lambda must lie in [0, 1], got {format_rational(args.lam)}")
        if getattr(args, "alpha", None) is not None and args.alpha < 1:
            raise UsageError("--alpha must be a positive integer")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"bcm: {exc}", file=sys.stderr)
        return 2
    except (InstanceError, OSError) as exc:
        print(f"bcm: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # algorithm preconditions (e.g. alpha too small, bounds not 1)
        print(f"bcm: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
