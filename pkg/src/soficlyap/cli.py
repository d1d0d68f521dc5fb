"""Command-line entry point (``soficlyap``).

Exit codes: 0 success, 2 invalid input, 3 infeasible / no certificate,
4 inconclusive.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time

import numpy as np

from . import emit as E
from .debruijn import de_bruijn, verify_covering
from .errors import InvalidCertificateError, InvalidInputError, SoficLyapError
from .experiments import ExperimentConfig, run_table1, run_venn
from .jsr import best_cycle, rho_lower, simulate
from .shift import graph_predicates, language, shift_from_spec
from .solver.bisect import DEFAULT_TOL, rho_upper
from .system import load_system
from .templates import Template, TemplateKind, dualize, validate_certificate

_GRAPH = re.compile(r"^debruijn:(\d+),(\d+)$")


def _load_json_or_name(value: str):
    if value.endswith(".json"):
        try:
            with open(value, encoding="utf-8") as fh:
                return json.load(fh)
        except OSError as exc:
            raise InvalidInputError(f"cannot read {value}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{value} is not valid JSON: {exc}") from None
    return value


def _shift(value: str):
    return shift_from_spec(_load_json_or_name(value))


def _system(value: str):
    try:
        return load_system(value)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {value}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{value} is not valid JSON: {exc}") from None


def _graph(system, spec: str):
    """``debruijn:K,k`` or ``presentation``."""
    if spec == "presentation":
        return system.shift.presentation, "presentation"
    m = _GRAPH.match(spec)
    if not m:
        raise InvalidInputError(f"graph spec must be 'debruijn:K,k' or 'presentation', got {spec!r}")
    db = de_bruijn(system.shift, int(m.group(1)), int(m.group(2)))
    return db.graph, db.graph_id


def _certificate(path: str, graph):
    data = _load_json_or_name(path)
    if not isinstance(data, dict):
        raise InvalidCertificateError("certificate must be a JSON file")
    if "certificate" in data and "params" not in data:
        data = data["certificate"]
    return E.certificate_from_dict(data, graph)


def _out(args, text: str):
    if args.out:
        try:
            E.write_text(args.out, text)
        except OSError as exc:
            raise InvalidInputError(f"cannot write {args.out}: {exc}") from None
    else:
        sys.stdout.write(text)


# --- commands --------------------------------------------------------------

def cmd_shift(args):
    shift = _shift(args.shift)
    g = shift.presentation
    preds = graph_predicates(g)
    data = {
        "name": shift.name,
        "finite_type_order": shift.finite_type_order,
        "forbidden_words": None if shift.forbidden_words is None
        else [shift.alphabet.format_word(w) for w in shift.forbidden_words],
        "presentation": E.graph_to_dict(g),
        "predicates": E.to_jsonable(preds),
        "language_sizes": {str(n): len(language(shift, n)) for n in range(args.horizon + 1)},
        "language": [shift.alphabet.format_word(w) for w in language(shift, args.horizon)],
    }
    if args.format == "dot":
        _out(args, E.dumps_dot(g, shift.name or "shift"))
    else:
        _out(args, E.dumps_json(data))
    return 0


def cmd_debruijn(args):
    db = de_bruijn(_shift(args.shift), args.order, args.position)
    fmt = args.emit or args.format or "dot"
    if fmt == "dot":
        _out(args, E.dumps_dot(db))
        return 0
    data = E.to_jsonable(db)
    data["predicates"] = E.to_jsonable(graph_predicates(db.graph))
    data["covering"] = {db.graph.node_name(s): [c.start, c.end] for s, c in db.covering().classes.items()}
    if args.verify_horizon:
        rep = verify_covering(db, args.verify_horizon)
        data["verify"] = {"ok": rep.ok, "horizon": rep.horizon, "violations": len(rep.violations)}
    _out(args, E.dumps_json(data))
    return 0


def cmd_rho(args):
    system = _system(args.system)
    graph, gid = _graph(system, args.graph)
    template = Template(TemplateKind.parse(args.template), system.dimension)
    rep = rho_upper(system, graph, template, tol=args.tol, graph_id=gid, lower_len=args.max_len)
    if args.format == "text":
        _out(args, f"{rep.graph_id} {rep.template} rho_upper={rep.rho_upper:.6f} rho_lower={rep.rho_lower:.6f}\n")
    else:
        _out(args, E.dumps_json(E.report_to_dict(rep, graph)))
    return 0


def cmd_lower(args):
    system = _system(args.system)
    word, rate = best_cycle(system, args.max_len)
    data = {"rho_lower": rho_lower(system, args.max_len), "max_len": args.max_len,
            "cycle": system.alphabet.format_word(word)}
    if args.format == "text":
        _out(args, f"rho_lower={data['rho_lower']:.6f} cycle={data['cycle']}\n")
    else:
        _out(args, E.dumps_json(data))
    return 0


def cmd_simulate(args):
    system = _system(args.system)
    if args.x0:
        x0 = np.array([float(v) for v in args.x0.split(",")])
        if x0.shape != (system.dimension,):
            raise InvalidInputError(f"x0 must have {system.dimension} components")
    else:
        x0 = np.ones(system.dimension)
    tr = simulate(system, x0, args.steps, seed=args.seed)
    cert = db = None
    if args.certificate:
        data = _load_json_or_name(args.certificate)
        if isinstance(data, dict) and "certificate" in data and "params" not in data:
            data = data["certificate"]
        m = _GRAPH.match((data or {}).get("graph_id") or "")
        if not m:
            raise InvalidCertificateError("trajectory values need a certificate on a De Bruijn graph")
        db = de_bruijn(system.shift, int(m.group(1)), int(m.group(2)))
        cert = E.certificate_from_dict(data, db.graph)
    fmt = args.emit or args.format or "csv"
    if fmt == "csv":
        _out(args, E.trajectory_csv(tr, system, cert, db))
    else:
        g = system.shift.presentation
        _out(args, E.dumps_json({"word": system.alphabet.format_word(tr.word),
                                 "nodes": [g.node_name(s) for s in tr.nodes],
                                 "states": tr.states}))
    return 0


def cmd_table1(args):
    t0 = time.perf_counter()
    rows = run_table1(args.tol)
    elapsed = time.perf_counter() - t0
    if args.format == "json":
        _out(args, E.dumps_json(rows))
    elif args.format == "csv":
        _out(args, E.table1_csv(rows))
    else:
        lines = [f"{r.label:8s} {r.rho_upper:.5f}" for r in rows]
        lines.append(f"# {elapsed:.2f} s")
        _out(args, "\n".join(lines) + "\n")
    return 0


def cmd_venn(args):
    cfg = ExperimentConfig(seed=args.seed if args.seed is not None else 1, sample_count=args.samples,
                           tolerance=args.tol, tie_tolerance=args.tie_tol)
    rep = run_venn(cfg, workers=args.workers)
    if args.raw:
        E.write_text(args.raw, E.venn_samples_csv(rep))
    if args.format == "json":
        _out(args, E.dumps_json(rep))
    else:
        _out(args, E.venn_counts_csv(rep))
    return 0


def cmd_dualize(args):
    system = _system(args.system)
    graph, gid = _graph(system, args.graph)
    cert = _certificate(args.certificate, graph)
    report = validate_certificate(system, graph, cert, mode="exact")
    if not report.ok:
        raise InvalidCertificateError(f"input certificate fails validation (worst slack {report.worst_slack:.3g})")
    dsys, dgraph, dcert = dualize(system, graph, cert)
    check = validate_certificate(dsys, dgraph, dcert, mode="exact")
    data = {"system": dsys.to_spec(), "graph": E.graph_to_dict(dgraph),
            "certificate": E.certificate_to_dict(dcert, dgraph),
            "validation": {"ok": check.ok, "worst_slack": check.worst_slack}}
    _out(args, E.dumps_json(data))
    return 0 if check.ok else 3


def cmd_validate(args):
    system = _system(args.system)
    graph, gid = _graph(system, args.graph)
    cert = _certificate(args.certificate, graph)
    if args.gamma is not None:
        cert = cert.with_gamma(args.gamma)
    rep = validate_certificate(system, graph, cert, mode=args.mode, samples=args.samples,
                               seed=args.seed or 0)
    data = {"ok": rep.ok, "mode": rep.mode, "gamma": rep.gamma, "worst_slack": rep.worst_slack,
            "violations": [[graph.node_name(e[0]), graph.node_name(e[1]), e[2], s] for e, s in rep.violations]}
    _out(args, E.dumps_json(data))
    return 0 if rep.ok else 3


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="RNG seed")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="bisection tolerance")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file (default stdout)")
    common.add_argument("--format", choices=["json", "csv", "dot", "text"], default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="soficlyap", parents=[common],
                                description="Graph-based Lyapunov certificates for constrained switched systems.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("shift", parents=[common], help="describe a shift and its language")
    s.add_argument("--shift", required=True, help="built-in name or JSON spec file")
    s.add_argument("--horizon", type=int, default=3)
    s.set_defaults(func=cmd_shift)

    s = sub.add_parser("debruijn", parents=[common], help="build G_{K,k}")
    s.add_argument("--shift", required=True)
    s.add_argument("--order", "-K", type=int, required=True)
    s.add_argument("--position", "-k", type=int, required=True)
    s.add_argument("--emit", choices=["dot", "json"])
    s.add_argument("--verify-horizon", type=int, default=0)
    s.set_defaults(func=cmd_debruijn)

    s = sub.add_parser("rho", parents=[common], help="certified upper bound by bisection")
    s.add_argument("--system", required=True, help="built-in name or JSON system file")
    s.add_argument("--graph", default="debruijn:1,0")
    s.add_argument("--template", default="copositive-linear")
    s.add_argument("--max-len", type=int, default=8, help="cycle length for the lower end of the bracket")
    s.set_defaults(func=cmd_rho)

    s = sub.add_parser("lower", parents=[common], help="cycle lower bound")
    s.add_argument("--system", required=True)
    s.add_argument("--max-len", type=int, default=8)
    s.set_defaults(func=cmd_lower)

    s = sub.add_parser("simulate", parents=[common], help="random admissible trajectory")
    s.add_argument("--system", required=True)
    s.add_argument("--steps", type=int, default=50)
    s.add_argument("--x0", help="comma-separated initial state (default all ones)")
    s.add_argument("--certificate", help="certificate JSON for the V column")
    s.add_argument("--emit", choices=["csv", "json"])
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("table1", parents=[common], help="bounds for the positive golden-mean benchmark")
    s.set_defaults(func=cmd_table1)

    s = sub.add_parser("venn", parents=[common], help="compare G_{2,0}, G_{2,1}, G_{2,2} on random pairs")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--tie-tol", type=float, default=1e-3)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--raw", help="write per-sample CSV here")
    s.set_defaults(func=cmd_venn)

    for name, func, helptext in (("dualize", cmd_dualize, "dual certificate on the transposed graph"),
                                 ("validate", cmd_validate, "re-check a certificate")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--system", required=True)
        s.add_argument("--graph", required=True)
        s.add_argument("--certificate", required=True)
        if name == "validate":
            s.add_argument("--mode", choices=["exact", "sampled"], default="exact")
            s.add_argument("--samples", type=int, default=1000)
            s.add_argument("--gamma", type=float, help="override the certificate's decay rate")
        s.set_defaults(func=func)
    return p


_DEFAULTS = {"seed": None, "tol": DEFAULT_TOL, "out": None, "format": None, "verbose": False}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in _DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    if args.seed is None and args.command == "simulate":
        args.seed = 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SoficLyapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
