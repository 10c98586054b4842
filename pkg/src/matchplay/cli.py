"""Command-line front end: ``matchplay <command> ...``.

Exit codes: 0 success (or a property that holds on the samples), 1 a
property check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from decimal import InvalidOperation
from pathlib import Path

from .analysis import (
    check_fairness,
    check_futility,
    check_honesty,
    check_rounds_honesty,
    check_symmetry,
    discrete_map_polytope,
    standard_samples,
)
from .core import P_STAR, MatchMatrix, as_fraction, fraction_str, is_doubly_monotonic
from .engine import DepthBoundExceeded, StateLimitExceeded, exact_win_vector, simulate
from .polytope import (
    Digraph,
    arc_flow_membership,
    corner_sequences,
    corner_table,
    enumerate_digraphs,
    graph_vector,
    hull_membership,
    sigma_to_digraph,
)
from .zoo import build, make_rounds_example, zoo_names


class UsageError(Exception):
    pass


def _load_json_arg(value: str):
    if value.lstrip().startswith("{"):
        return json.loads(value)
    path = Path(value)
    if not path.exists():
        raise UsageError(f"no such file: {value}")
    return json.loads(path.read_text())


def _matrix(value: str | None) -> MatchMatrix | None:
    if value is None:
        return None
    if value == "pstar":
        return P_STAR
    if value.startswith("uniform:"):
        return MatchMatrix.uniform(int(value.split(":", 1)[1]))
    return MatchMatrix.from_json(_load_json_arg(value))


def _vector(text: str) -> list:
    try:
        return [as_fraction(part.strip()) for part in text.split(",")]
    except (ValueError, TypeError, InvalidOperation) as exc:
        raise UsageError(f"cannot read vector {text!r}: {exc}") from exc


def _tournament(args):
    digraph = Digraph.from_json(_load_json_arg(args.digraph)) if getattr(args, "digraph", None) else None
    p_param = _matrix(getattr(args, "p_param", None))
    return build(args.tournament, args.n, args.N, digraph=digraph, p_param=p_param,
                 seed=args.seed if args.seed is not None else 0)


def _emit(args, payload, rows=None):
    if args.format == "csv":
        if rows is None:
            raise UsageError(f"{args.command} has no CSV form")
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _vec_row(v) -> list:
    return [fraction_str(x) for x in v]


def cmd_eval(args):
    T = _tournament(args)
    P = _matrix(args.matrix)
    if P is None:
        raise UsageError("eval needs --matrix")
    rep = exact_win_vector(T, P)
    payload = {"command": "eval", "tournament": T.name, "matrix": P.to_json(), **rep.to_json()}
    _emit(args, payload, [["player", "pi"]] + [[k, x] for k, x in enumerate(_vec_row(rep.win_vector), 1)])
    return 0


def cmd_simulate(args):
    if args.seed is None:
        raise UsageError("simulate needs --seed")
    T = _tournament(args)
    P = _matrix(args.matrix)
    if P is None:
        raise UsageError("simulate needs --matrix")
    rep = simulate(T, P, args.trials, args.seed, workers=args.workers)
    payload = {"command": "simulate", "tournament": T.name, "matrix": P.to_json(), **rep.to_json()}
    rows = [["player", "count", "frequency", "standard_error"]]
    rows += [[k + 1, c, f, e] for k, (c, f, e) in
             enumerate(zip(rep.counts, rep.empirical, rep.standard_errors))]
    _emit(args, payload, rows)
    return 0


def cmd_corners(args):
    seqs = corner_sequences(args.n)
    items = []
    seen = set()
    for s in seqs:
        v = graph_vector(sigma_to_digraph(s, args.n))
        if v not in seen:
            seen.add(v)
            items.append((s, v))
    payload = {"command": "corners", "n": args.n, "count": len(items),
               "corners": [{"sequence": list(s), "vector": v.to_json()} for s, v in items]}
    rows = [["sequence"] + [f"x{k}" for k in range(1, args.n + 1)]]
    rows += [[" ".join(map(str, s))] + _vec_row(v) for s, v in items]
    _emit(args, payload, rows)
    return 0


def cmd_digraphs(args):
    gs = enumerate_digraphs(args.n)
    payload = {"command": "digraphs", "n": args.n, "count": len(gs),
               "digraphs": [dict(G.to_json(), vector=graph_vector(G).to_json()) for G in gs]}
    rows = [["arcs"] + [f"v{k}" for k in range(1, args.n + 1)]]
    rows += [[" ".join(f"{i}->{j}x{m}" for i, j, m in G.arcs())] + _vec_row(graph_vector(G)) for G in gs]
    _emit(args, payload, rows)
    return 0


def cmd_member(args):
    x = _vector(args.x)
    if args.n is not None and len(x) != args.n:
        raise UsageError(f"--x has {len(x)} entries but --n is {args.n}")
    if any(c < 0 for c in x) or sum(x) != 1:
        raise UsageError("--x must be a probability vector")
    ok_flow, wit_flow = arc_flow_membership(x)
    ok_hull, wit_hull = hull_membership(x)
    payload = {"command": "member", "x": _vec_row(x), "member": ok_flow,
               "hull_member": ok_hull, "methods_agree": ok_flow == ok_hull}
    if ok_flow:
        payload["arc_flow"] = [_vec_row(r) for r in wit_flow.m]
        payload["convex_combination"] = [{"corner": c.to_json(), "weight": fraction_str(w)}
                                         for c, w in wit_hull.items()]
    else:
        payload["farkas"] = {"y_eq": _vec_row(wit_flow.y_eq), "y_le": _vec_row(wit_flow.y_le)}
    _emit(args, payload, [["member"], [str(ok_flow).lower()]])
    return 0


CHECKS = {
    "symmetry": lambda T, S: check_symmetry(T, S),
    "honesty": lambda T, S: check_honesty(T, S),
    "strict-honesty": lambda T, S: check_honesty(T, S, strict=True),
    "futility": lambda T, S: check_futility(T, S),
    "fairness": lambda T, S: check_fairness(T, [P for P in S if is_doubly_monotonic(P)]),
}


def cmd_check(args):
    P = _matrix(args.matrix)
    if args.property == "rounds-honesty":
        if args.tournament != "rounds-example":
            raise UsageError("rounds-honesty applies to rounds-example only")
        T = make_rounds_example()
    else:
        T = _tournament(args)
    if P is None:
        if args.seed is None:
            raise UsageError("check without --matrix draws seeded samples; pass --seed")
        samples = standard_samples(T.n, args.seed)
    else:
        samples = [P]
    if args.property == "rounds-honesty":
        rep = check_rounds_honesty(T, samples)
    else:
        if args.property == "fairness" and not any(is_doubly_monotonic(S) for S in samples):
            raise UsageError("fairness needs a doubly monotonic matrix")
        rep = CHECKS[args.property](T, samples)
    payload = {"command": "check", "tournament": T.name, "seed": args.seed,
               "samples": [S.to_json() for S in samples], **rep.to_json()}
    _emit(args, payload, [["property", "verdict"], [rep.name, rep.verdict]])
    return 0 if rep.passed else 1


def cmd_probe_map(args):
    P = _matrix(args.matrix)
    if P is None:
        raise UsageError("probe-map needs --matrix")
    c = _vector(args.objective)
    if len(c) != P.n:
        raise UsageError(f"objective has {len(c)} entries for an {P.n}-player matrix")
    poly = discrete_map_polytope(P)
    value, f = poly.optimize(c, maximize=not args.minimize)
    payload = {"command": "probe-map", "matrix": P.to_json(), "objective": _vec_row(c),
               "sense": "min" if args.minimize else "max", "value": fraction_str(value),
               "optimal_f_at_P": f(P).to_json(), "orbit_variables": poly.orbits}
    _emit(args, payload, [["value"] + [f"f{k}" for k in range(1, P.n + 1)],
                          [fraction_str(value)] + _vec_row(f(P))])
    return 0


def cmd_table1(args):
    if args.n is None:
        raise UsageError("table1 needs --n")
    rows = corner_table(args.n)
    payload = {"command": "table1", "n": args.n, "rows": [
        {"sigmas": [list(s) for s in r["sigmas"]], "arcs": [list(a) for a in r["arcs"]],
         "vector": r["vector"].to_json()} for r in rows]}
    table = [["sigma", "arcs", "vector"]]
    for r in rows:
        table.append([" or ".join("(" + ",".join(map(str, s)) + ")" for s in r["sigmas"]),
                      " ".join(f"{i}->{j}x{m}" for i, j, m in r["arcs"]),
                      " ".join(_vec_row(r["vector"]))])
    _emit(args, payload, table)
    return 0


COMMANDS = {
    "eval": cmd_eval, "simulate": cmd_simulate, "corners": cmd_corners, "digraphs": cmd_digraphs,
    "member": cmd_member, "check": cmd_check, "probe-map": cmd_probe_map, "table1": cmd_table1,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="matchplay", description="Matchplay tournaments: exact evaluation, "
                "simulation, property checks and the polytope of win vectors.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, tournament=False, needs_n=False):
        sp.add_argument("--n", type=int, required=needs_n)
        sp.add_argument("--N", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--output")
        if tournament:
            sp.add_argument("--tournament", required=True, choices=zoo_names())
            sp.add_argument("--matrix", help="matrix JSON file or inline JSON; 'pstar'; 'uniform:<n>'")
            sp.add_argument("--digraph", help="digraph JSON for --tournament graph")
            sp.add_argument("--p-param", dest="p_param", help="rule matrix for --tournament graph")

    common(sub.add_parser("eval", help="exact win vector"), tournament=True)
    sp = sub.add_parser("simulate", help="Monte Carlo win frequencies")
    common(sp, tournament=True)
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--workers", type=int, default=1)
    common(sub.add_parser("corners", help="corners of the polytope"), needs_n=True)
    common(sub.add_parser("digraphs", help="all digraphs of the family"), needs_n=True)
    sp = sub.add_parser("member", help="polytope membership of a vector")
    common(sp)
    sp.add_argument("--x", required=True, help='comma separated, e.g. "1/3,1/2,1/6"')
    sp = sub.add_parser("check", help="property check")
    common(sp, tournament=True)
    sp.add_argument("--property", required=True, choices=sorted(CHECKS) + ["rounds-honesty"])
    sp = sub.add_parser("probe-map", help="optimize over symmetric honest maps on a grid")
    common(sp)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--objective", required=True, help='coefficients of f(P), e.g. "0,1,0"')
    sp.add_argument("--minimize", action="store_true")
    common(sub.add_parser("table1", help="sigma classes, digraphs and vectors"))
    return p


def run(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("missing command; try --help")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"matchplay: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, InvalidOperation, StateLimitExceeded, DepthBoundExceeded) as exc:
        print(f"matchplay: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
