"""Byte-stable JSON, CSV and DOT output.

JSON is written with sorted keys and ``repr`` floats, so a report
round-trips losslessly and identical inputs give identical bytes.  CSV uses
``.`` decimals, ``\\n`` line ends and UTF-8.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math
from typing import Mapping, Optional

import numpy as np

from .debruijn import DeBruijnGraph, to_dot
from .errors import InvalidCertificateError, InvalidInputError
from .experiments import Table1Row, VennReport
from .jsr import Trajectory
from .shift import LabeledGraph
from .solver.bisect import BisectionReport
from .templates import Certificate, Template, TemplateKind


def _node_name(graph: Optional[LabeledGraph], node) -> str:
    if graph is not None:
        return graph.node_name(node)
    if isinstance(node, tuple):
        return ".".join(node) if any(len(s) != 1 for s in node) else ("".join(node) or "ε")
    return str(node)


def certificate_to_dict(cert: Certificate, graph: Optional[LabeledGraph] = None) -> dict:
    nodes = graph.nodes if graph is not None else list(cert.params)
    return {
        "template": cert.template.kind.value,
        "dimension": cert.template.dimension,
        "gamma": cert.gamma,
        "graph_id": cert.graph_id,
        "margins": [float(m) for m in cert.margins],
        "params": {_node_name(graph, s): np.asarray(cert.params[s]).tolist() for s in nodes},
    }


def certificate_from_dict(data: Mapping, graph: LabeledGraph) -> Certificate:
    try:
        template = Template(TemplateKind.parse(data["template"]), int(data["dimension"]))
        names = {graph.node_name(s): s for s in graph.nodes}
        params = {}
        for name, value in data["params"].items():
            if name not in names:
                raise InvalidCertificateError(f"certificate node {name!r} is not in the graph")
            params[names[name]] = np.array(value, dtype=float)
        return Certificate(template, params, float(data["gamma"]), data.get("graph_id"))
    except KeyError as exc:
        raise InvalidCertificateError(f"certificate is missing {exc.args[0]!r}") from None


def graph_to_dict(graph: LabeledGraph) -> dict:
    return {
        "alphabet": list(graph.alphabet),
        "nodes": [graph.node_name(s) for s in graph.nodes],
        "edges": [[graph.node_name(s), graph.node_name(q), h] for s, q, h in graph.edges],
    }


def report_to_dict(rep: BisectionReport, graph: Optional[LabeledGraph] = None) -> dict:
    return {
        "graph_id": rep.graph_id,
        "template": rep.template,
        "rho_upper": rep.rho_upper,
        "rho_lower": rep.rho_lower,
        "iterations": rep.iterations,
        "tolerance": rep.tolerance,
        "inconclusive": rep.inconclusive,
        "trace": [[g, status] for g, status in rep.trace],
        "certificate": certificate_to_dict(rep.certificate, graph),
    }


def venn_to_dict(rep: VennReport) -> dict:
    cfg = dataclasses.asdict(rep.config)
    return {"config": cfg, "counts": dict(rep.counts), "total": rep.total}


def to_jsonable(obj):
    if isinstance(obj, BisectionReport):
        return report_to_dict(obj)
    if isinstance(obj, Certificate):
        return certificate_to_dict(obj)
    if isinstance(obj, VennReport):
        return venn_to_dict(obj)
    if isinstance(obj, DeBruijnGraph):
        d = graph_to_dict(obj.graph)
        d.update(graph_id=obj.graph_id, order=obj.order, position=obj.position)
        return d
    if isinstance(obj, LabeledGraph):
        return graph_to_dict(obj)
    if isinstance(obj, Table1Row):
        return {"graph": obj.label, "graph_id": obj.graph_id, "rho_upper": obj.rho_upper}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    return obj


def _scrub(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _scrub(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_scrub(v) for v in obj]
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_scrub(to_jsonable(obj)), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def venn_counts_csv(rep: VennReport) -> str:
    return _csv_text(["region", "count"], rep.counts.items())


def venn_samples_csv(rep: VennReport) -> str:
    names = [f"rho_G{K}{k}" for K, k in rep.config.graphs]
    rows = [[s.index, s.rho_lower, *s.bounds, s.region] for s in rep.samples]
    return _csv_text(["index", "rho_lower", *names, "region"], rows)


def table1_csv(rows) -> str:
    return _csv_text(["graph", "graph_id", "rho_upper"], [[r.label, r.graph_id, r.rho_upper] for r in rows])


def trajectory_csv(tr: Trajectory, system, cert: Optional[Certificate] = None,
                   db: Optional[DeBruijnGraph] = None) -> str:
    """Columns ``t, symbol, node, x1..xn`` and ``V`` when a certificate is given.

    ``symbol`` is the symbol applied at time ``t`` (empty on the last row).
    With a certificate, ``V`` is the value at the window class of time
    ``t`` and is left empty where the window leaves the recorded word.
    """
    from .jsr import _window_spec, window_class

    n = tr.states.shape[1]
    header = ["t", "symbol", "node", *[f"x{i + 1}" for i in range(n)]]
    K = k = None
    if cert is not None:
        header.append("V")
        K, k = _window_spec(cert, db)
    g = system.shift.presentation
    rows = []
    for t in range(tr.steps + 1):
        sym = tr.word[t] if t < tr.steps else ""
        node = g.node_name(tr.nodes[t]) if tr.nodes else ""
        row = [t, sym, node, *tr.states[t]]
        if cert is not None:
            c = window_class(tr.word, t, K, k)
            row.append(cert.value(c, tr.states[t]) if c is not None else "")
        rows.append(row)
    return _csv_text(header, rows)


def dumps_dot(graph, name: Optional[str] = None) -> str:
    if isinstance(graph, DeBruijnGraph):
        return to_dot(graph.graph, name or graph.graph_id)
    if isinstance(graph, LabeledGraph):
        return to_dot(graph, name or "G")
    raise InvalidInputError("only graphs can be emitted as DOT")


def emit(obj, fmt: str = "json", path: Optional[str] = None) -> str:
    """Render ``obj`` in ``fmt`` and write it to ``path`` (if given)."""
    if fmt == "json":
        text = dumps_json(obj)
    elif fmt == "dot":
        text = dumps_dot(obj)
    elif fmt == "csv":
        if isinstance(obj, VennReport):
            text = venn_counts_csv(obj)
        elif isinstance(obj, list) and obj and isinstance(obj[0], Table1Row):
            text = table1_csv(obj)
        else:
            raise InvalidInputError(f"no CSV layout for {type(obj).__name__}")
    else:
        raise InvalidInputError(f"unknown format {fmt!r}")
    if path is not None:
        write_text(path, text)
    return text


def write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
