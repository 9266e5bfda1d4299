"""Model files, reports, DOT export, and the command-line surface.

The model format is a small versioned JSON document:

    {
      "format_version": "1",
      "variables": [
        {"name": "Drought", "levels": ["yes", "no"]}
      ],
      "cpts": [
        {"child": "Drought", "parents": [], "rows": [[0.25, 0.75]]}
      ]
    }

Rows are indexed by parent configuration with the first parent most
significant, exactly as Cpt stores them.  Serialization is canonical:
fixed key order, two-space indentation, probabilities printed with 17
significant digits so every float round-trips to the same bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

from .advisors import (
    EdgeReport,
    amalgamate_levels,
    amalgamation_suggest,
    delete_edge,
    edge_deletion_report,
)
from .bn_model import BayesNet, Variable, validate
from .bounds import path_impact
from .errors import DomainError, ParseError, ResourceLimitError
from .jtree import (
    JunctionTree,
    build_junction_tree,
    donor_target_path,
    donor_target_reduction,
    moralize,
    triangulate,
)
from .tv_core import Cpt, ProbVec, diameter

FORMAT_VERSION = "1"


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def _f6(x: float) -> str:
    return format(float(x), ".6g")


def _f3(x: float) -> str:
    return format(float(x), ".3f")


# ---------------------------------------------------------------------------
# parsing


def _expect(condition: bool, message: str, location: str):
    if not condition:
        raise ParseError(message, location=location)


def _field(obj: dict, key: str, kind, location: str):
    _expect(key in obj, f"missing field {key!r}", location)
    value = obj[key]
    _expect(isinstance(value, kind) and not isinstance(value, bool),
            f"field {key!r} has the wrong type", f"{location}.{key}")
    return value


def _no_extras(obj: dict, allowed, location: str):
    extras = [k for k in obj if k not in allowed]
    _expect(not extras, "unexpected field(s) " + ", ".join(map(repr, extras)),
            location)


def parse_model(text: str, strict: bool = True):
    """Read a model document into a BayesNet.

    With ``strict`` (the default) a net that fails validation raises a
    ParseError; with ``strict=False`` the pair (net, violations) comes
    back instead so a caller can report the violations itself.
    Structural problems (bad JSON, unknown names, wrong shapes) raise
    either way, with the offending location in the message.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, location=f"line {e.lineno}, column {e.colno}")
    _expect(isinstance(doc, dict), "top level must be an object", "document")
    _no_extras(doc, ("format_version", "variables", "cpts"), "document")
    version = _field(doc, "format_version", str, "document")
    _expect(version == FORMAT_VERSION,
            f"unsupported format_version {version!r}", "format_version")

    raw_vars = _field(doc, "variables", list, "document")
    _expect(len(raw_vars) > 0, "empty variables list", "variables")
    variables = []
    by_name: dict[str, Variable] = {}
    for i, entry in enumerate(raw_vars):
        loc = f"variables[{i}]"
        _expect(isinstance(entry, dict), "variable must be an object", loc)
        _no_extras(entry, ("name", "levels"), loc)
        name = _field(entry, "name", str, loc)
        levels = _field(entry, "levels", list, loc)
        _expect(len(levels) > 0, f"variable {name!r} has no levels",
                f"{loc}.levels")
        for j, lv in enumerate(levels):
            _expect(isinstance(lv, str), "level must be a string",
                    f"{loc}.levels[{j}]")
        _expect(name not in by_name, f"duplicate variable {name!r}",
                f"{loc}.name")
        var = Variable(name, tuple(levels))
        variables.append(var)
        by_name[name] = var

    raw_cpts = _field(doc, "cpts", list, "document")
    table_for: dict[str, Cpt] = {}
    for i, entry in enumerate(raw_cpts):
        loc = f"cpts[{i}]"
        _expect(isinstance(entry, dict), "cpt must be an object", loc)
        _no_extras(entry, ("child", "parents", "rows"), loc)
        child = _field(entry, "child", str, loc)
        _expect(child in by_name, f"unknown variable {child!r}",
                f"{loc}.child")
        _expect(child not in table_for, f"duplicate cpt for {child!r}",
                f"{loc}.child")
        parents = _field(entry, "parents", list, loc)
        parent_levels = []
        for j, p in enumerate(parents):
            ploc = f"{loc}.parents[{j}]"
            _expect(isinstance(p, str), "parent must be a string", ploc)
            _expect(p in by_name, f"unknown variable {p!r}", ploc)
            parent_levels.append(by_name[p].levels)
        raw_rows = _field(entry, "rows", list, loc)
        rows = []
        for k, raw in enumerate(raw_rows):
            rloc = f"{loc}.rows[{k}]"
            _expect(isinstance(raw, list), "row must be an array", rloc)
            for m, x in enumerate(raw):
                _expect(isinstance(x, (int, float))
                        and not isinstance(x, bool),
                        "probability must be a number", f"{rloc}[{m}]")
            rows.append(ProbVec(by_name[child].levels,
                                tuple(float(x) for x in raw)))
        table_for[child] = Cpt(child, by_name[child].levels, tuple(parents),
                               tuple(parent_levels), tuple(rows))

    missing = [v.name for v in variables if v.name not in table_for]
    _expect(not missing, "missing cpt for " + ", ".join(map(repr, missing)),
            "cpts")

    net = BayesNet(tuple(variables),
                   tuple(table_for[v.name] for v in variables))
    violations = validate(net)
    if strict:
        if violations:
            raise ParseError("model failed validation: "
                             + "; ".join(violations))
        return net
    return net, violations


# ---------------------------------------------------------------------------
# serialization


def model_document(net: BayesNet) -> dict:
    """The model as the plain document structure the serializer writes."""
    return {
        "format_version": FORMAT_VERSION,
        "variables": [
            {"name": v.name, "levels": list(v.levels)}
            for v in net.variables
        ],
        "cpts": [
            {
                "child": t.child,
                "parents": list(t.parents),
                "rows": [[float(x) for x in row.mass] for row in t.rows],
            }
            for t in net.cpts
        ],
    }


def serialize_model(net: BayesNet) -> str:
    """Canonical text for a net; byte-stable and exactly re-parseable."""
    out = ["{"]
    out.append(f'  "format_version": {json.dumps(FORMAT_VERSION)},')
    out.append('  "variables": [')
    for i, v in enumerate(net.variables):
        comma = "," if i + 1 < len(net.variables) else ""
        levels = ", ".join(json.dumps(lv) for lv in v.levels)
        out.append(f'    {{"name": {json.dumps(v.name)}, '
                   f'"levels": [{levels}]}}{comma}')
    out.append("  ],")
    out.append('  "cpts": [')
    for i, t in enumerate(net.cpts):
        comma = "," if i + 1 < len(net.cpts) else ""
        parents = ", ".join(json.dumps(p) for p in t.parents)
        out.append("    {")
        out.append(f'      "child": {json.dumps(t.child)},')
        out.append(f'      "parents": [{parents}],')
        out.append('      "rows": [')
        for k, row in enumerate(t.rows):
            rcomma = "," if k + 1 < len(t.rows) else ""
            cells = ", ".join(_f17(x) for x in row.mass)
            out.append(f"        [{cells}]{rcomma}")
        out.append("      ]")
        out.append(f"    }}{comma}")
    out.append("  ]")
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# DOT export


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _brace_set(names) -> str:
    return "{" + ", ".join(names) + "}"


def emit_dot(net: BayesNet, annotations) -> str:
    """Annotated DOT text for a net.

    An EdgeReport renders the DAG with deletion costs on the edges; a
    JunctionTree renders the clique tree with separator labels.  The
    annotation must cover exactly this net.
    """
    if isinstance(annotations, EdgeReport):
        recorded = {(r.parent, r.child): r.delta for r in annotations.records}
        if set(recorded) != set(net.edges()) or \
                len(annotations.records) != len(net.edges()):
            raise DomainError(
                "edge report does not cover exactly this network's edges")
        lines = ["digraph model {"]
        for v in net.variables:
            lines.append(f'  "{_dot_escape(v.name)}";')
        for p, c in net.edges():
            lines.append(f'  "{_dot_escape(p)}" -> "{_dot_escape(c)}" '
                         f'[label="{_f3(recorded[(p, c)])}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    if isinstance(annotations, JunctionTree):
        members = {v for c in annotations.cliques for v in c}
        if members != set(net.names()):
            raise DomainError(
                "junction tree does not cover exactly this network's "
                "variables")
        lines = ["digraph junction_tree {"]
        for i, c in enumerate(annotations.cliques):
            lines.append(f'  c{i} [label="{_dot_escape(_brace_set(c))}"];')
        for i, j, s in annotations.tree_edges:
            lines.append(f'  c{i} -> c{j} '
                         f'[dir=none, label="{_dot_escape(_brace_set(s))}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise DomainError("annotations must be an EdgeReport or a JunctionTree")


# ---------------------------------------------------------------------------
# command implementations


def _read_text(path: str) -> str:
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        raise ParseError("model file is not valid UTF-8", location=path)


def _load(path: str) -> BayesNet:
    return parse_model(_read_text(path))


def _emit_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _columns(header, rows, indent: str = "") -> list[str]:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = []
    for row in [header] + rows:
        cells = [cell.ljust(widths[i]) for i, cell in enumerate(row)]
        lines.append((indent + "  ".join(cells)).rstrip())
    return lines


def _split_names(raw: str) -> list[str]:
    return [token.strip() for token in raw.split(",") if token.strip()]


def _cmd_validate(args) -> tuple[str, int]:
    net, violations = parse_model(_read_text(args.model), strict=False)
    ok = not violations
    if args.json:
        doc = {
            "command": "validate",
            "model": args.model,
            "ok": ok,
            "violations": violations,
        }
        return _emit_json(doc), 0 if ok else 1
    if ok:
        return f"{args.model}: ok\n", 0
    lines = [f"{args.model}: {len(violations)} violation(s)"]
    for v in violations:
        lines.append(f"  - {v}")
    return "\n".join(lines) + "\n", 1


def _diameter_rows(net: BayesNet):
    return [(v.name, diameter(net.cpt(v.name))) for v in net.variables]


def _cmd_diameters(args) -> tuple[str, int]:
    net = _load(args.model)
    pairs = _diameter_rows(net)
    if args.json:
        doc = {
            "command": "diameters",
            "model": args.model,
            "diameters": [
                {"variable": name, "value": value} for name, value in pairs
            ],
        }
        return _emit_json(doc), 0
    lines = _columns(("variable", "diameter"),
                     [(name, _f3(value)) for name, value in pairs])
    return "\n".join(lines) + "\n", 0


def _cmd_edges(args) -> tuple[str, int]:
    net = _load(args.model)
    report = edge_deletion_report(net)
    if args.dot:
        return emit_dot(net, report), 0
    if args.json:
        doc = {
            "command": "edges",
            "model": args.model,
            "edges": [
                {"parent": r.parent, "child": r.child, "delta": r.delta}
                for r in report.records
            ],
        }
        return _emit_json(doc), 0
    lines = _columns(
        ("parent", "child", "delta"),
        [(r.parent, r.child, _f3(r.delta)) for r in report.records],
    )
    return "\n".join(lines) + "\n", 0


def _path_doc(path) -> dict:
    return {
        "cliques": [list(c) for c in path.cliques],
        "separators": [list(s) for s in path.separators],
    }


def _cmd_impact(args) -> tuple[str, int]:
    net = _load(args.model)
    donor = _split_names(args.donor)
    target = _split_names(args.target)
    if args.mode == "exact":
        reduced, _, path = donor_target_reduction(net, donor, target,
                                                  args.limit)
        result = path_impact(reduced, path, "exact", args.limit)
    else:
        _, path = donor_target_path(net, donor, target)
        result = path_impact(net, path, "bound")
    if args.json:
        doc = {
            "command": "impact",
            "model": args.model,
            "donor": donor,
            "target": target,
            "mode": result.mode,
            "value": result.value,
            "factors": [
                {
                    "table": f.table,
                    "value": f.value,
                    "provenance": f.provenance,
                    "terms": list(f.terms),
                }
                for f in result.certificate
            ],
            "path": _path_doc(path),
        }
        return _emit_json(doc), 0
    lines = [
        f"impact of {_brace_set(donor)} on {_brace_set(target)} "
        f"({result.mode} mode): {_f6(result.value)}"
    ]
    lines.append("path:")
    for i, c in enumerate(path.cliques):
        lines.append(f"  {_brace_set(c)}")
        if i < len(path.separators):
            lines.append(f"    | {_brace_set(path.separators[i])}")
    lines.append("factors:")
    for f in result.certificate:
        lines.append(f"  {f.table} = {_f6(f.value)} [{f.provenance}]")
        for term in f.terms:
            lines.append(f"    {term}")
    return "\n".join(lines) + "\n", 0


def _cmd_path(args) -> tuple[str, int]:
    net = _load(args.model)
    donor = _split_names(args.donor)
    target = _split_names(args.target)
    _, path = donor_target_path(net, donor, target)
    if args.json:
        doc = {
            "command": "path",
            "model": args.model,
            "donor": donor,
            "target": target,
        }
        doc.update(_path_doc(path))
        return _emit_json(doc), 0
    lines = ["cliques:"]
    for c in path.cliques:
        lines.append(f"  {_brace_set(c)}")
    lines.append("separators:")
    if path.separators:
        for s in path.separators:
            lines.append(f"  {_brace_set(s)}")
    else:
        lines.append("  (none)")
    return "\n".join(lines) + "\n", 0


def _cmd_amalgamate(args) -> tuple[str, int]:
    net = _load(args.model)
    if args.group is None:
        candidates = amalgamation_suggest(net, args.variable)
        if args.json:
            doc = {
                "command": "amalgamate",
                "model": args.model,
                "variable": args.variable,
                "candidates": [
                    {"levels": list(pair), "cost": cost}
                    for pair, cost in candidates
                ],
            }
            return _emit_json(doc), 0
        lines = [f"merge candidates for {args.variable}:"]
        for pair, cost in candidates:
            lines.append(f"  {pair[0]} + {pair[1]}: {_f6(cost)}")
        return "\n".join(lines) + "\n", 0

    group = [token.strip() for token in args.group.split(",")]
    merged, costs = amalgamate_levels(net, args.variable, group,
                                      allow_nonconsecutive=args.nominal)
    merged_level = "+".join(group)
    if args.json:
        doc = {
            "command": "amalgamate",
            "model": args.model,
            "variable": args.variable,
            "group": group,
            "merged_level": merged_level,
            "costs": {child: cost for child, cost in sorted(costs.items())},
            "model_after": model_document(merged),
        }
        return _emit_json(doc), 0
    lines = [f"merged levels of {args.variable} into {merged_level!r}"]
    lines.append("costs:")
    if costs:
        for child in sorted(costs):
            lines.append(f"  {child}: {_f6(costs[child])}")
    else:
        lines.append("  (no affected tables)")
    return "\n".join(lines) + "\n", 0


def _rows_block(t: Cpt, indent: str = "  ") -> list[str]:
    lines = []
    for i, row in enumerate(t.rows):
        label = ", ".join(t.parent_config(i))
        cells = " ".join(_f6(x) for x in row.mass)
        lines.append(f"{indent}({label}): {cells}")
    return lines


def _cmd_delete_edge(args) -> tuple[str, int]:
    net = _load(args.model)
    merged, cost = delete_edge(net, args.donor, args.target)
    t = merged.cpt(args.target)
    if args.json:
        doc = {
            "command": "delete-edge",
            "model": args.model,
            "parent": args.donor,
            "child": args.target,
            "cost": cost,
            "model_after": model_document(merged),
        }
        return _emit_json(doc), 0
    lines = [f"removed {args.donor} -> {args.target} (cost {_f6(cost)})"]
    if t.parents:
        lines.append(f"rows of {t.child} | {', '.join(t.parents)}:")
    else:
        lines.append(f"rows of {t.child}:")
    lines.extend(_rows_block(t))
    return "\n".join(lines) + "\n", 0


def _cmd_report(args) -> tuple[str, int]:
    net = _load(args.model)
    jt = build_junction_tree(triangulate(moralize(net)))
    if args.dot:
        return emit_dot(net, jt), 0
    pairs = _diameter_rows(net)
    report = edge_deletion_report(net)
    if args.json:
        doc = {
            "command": "report",
            "model": args.model,
            "ok": True,
            "diameters": [
                {"variable": name, "value": value} for name, value in pairs
            ],
            "edges": [
                {"parent": r.parent, "child": r.child, "delta": r.delta}
                for r in report.records
            ],
            "junction_tree": {
                "cliques": [list(c) for c in jt.cliques],
                "edges": [
                    {"between": [i, j], "separator": list(s)}
                    for i, j, s in jt.tree_edges
                ],
                "rip_order": list(jt.rip_order),
            },
            "warnings": [],
        }
        return _emit_json(doc), 0
    lines = [f"model: {args.model}"]
    lines.append(f"variables: {len(net.variables)}")
    lines.append("validation: ok")
    lines.append("diameters:")
    lines.extend(_columns(("variable", "diameter"),
                          [(n, _f3(v)) for n, v in pairs], indent="  "))
    lines.append("edge deletion costs:")
    if report.records:
        lines.extend(_columns(
            ("parent", "child", "delta"),
            [(r.parent, r.child, _f3(r.delta)) for r in report.records],
            indent="  "))
    else:
        lines.append("  (none)")
    lines.append("junction tree:")
    lines.append("  cliques:")
    for i, c in enumerate(jt.cliques):
        lines.append(f"    c{i} = {_brace_set(c)}")
    lines.append("  edges:")
    if jt.tree_edges:
        for i, j, s in jt.tree_edges:
            lines.append(f"    c{i} - c{j}: {_brace_set(s)}")
    else:
        lines.append("    (none)")
    lines.append("  rip order: "
                 + " ".join(f"c{i}" for i in jt.rip_order))
    return "\n".join(lines) + "\n", 0


_HANDLERS = {
    "validate": _cmd_validate,
    "diameters": _cmd_diameters,
    "edges": _cmd_edges,
    "impact": _cmd_impact,
    "path": _cmd_path,
    "amalgamate": _cmd_amalgamate,
    "delete-edge": _cmd_delete_edge,
    "report": _cmd_report,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tvrobust",
        description="Robustness analysis for discrete Bayesian networks "
                    "in total variation distance.",
    )
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command")

    def add(name: str, help_: str):
        p = sub.add_parser(name, help=help_)
        p.add_argument("model", help="path to a model file")
        p.add_argument("--json", action="store_true",
                       help="emit a machine-readable report")
        return p

    add("validate", "check a model file and list any violations")
    add("diameters", "per-table diameters")
    p = add("edges", "edge deletion costs, largest first")
    p.add_argument("--dot", action="store_true",
                   help="emit the annotated DAG as DOT")
    p = add("impact", "impact product from donor variables to targets")
    p.add_argument("--from", dest="donor", required=True, metavar="VARS",
                   help="comma-separated donor variables")
    p.add_argument("--to", dest="target", required=True, metavar="VARS",
                   help="comma-separated target variables")
    p.add_argument("--mode", choices=("exact", "bound"), default="exact",
                   help="oracle factor tables or elicited-diameter bounds")
    p.add_argument("--limit", type=int, default=None, metavar="N",
                   help="state-space cap for the oracle")
    p = add("path", "clique path between donor and target variables")
    p.add_argument("--from", dest="donor", required=True, metavar="VARS",
                   help="comma-separated donor variables")
    p.add_argument("--to", dest="target", required=True, metavar="VARS",
                   help="comma-separated target variables")
    p = add("amalgamate", "suggest level merges, or apply one group")
    p.add_argument("variable", help="variable whose levels to merge")
    p.add_argument("--group", metavar="LEVELS", default=None,
                   help="comma-separated levels to merge (omit to rank "
                        "candidate pairs)")
    p.add_argument("--nominal", action="store_true",
                   help="allow a group that is not consecutive")
    p = add("delete-edge", "delete one edge, averaging the child's rows")
    p.add_argument("--from", dest="donor", required=True, metavar="PARENT",
                   help="parent end of the edge")
    p.add_argument("--to", dest="target", required=True, metavar="CHILD",
                   help="child end of the edge")
    p = add("report", "validation, diameters, edges, and the junction tree")
    p.add_argument("--dot", action="store_true",
                   help="emit the junction tree as DOT")
    return parser


def run_cli(argv=None) -> int:
    """Run one command line; returns the process exit code.

    0 on success, 1 on a domain or input problem, 2 on a usage error.
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if isinstance(e.code, int):
            return e.code
        return 0 if e.code is None else 2
    try:
        text, code = _HANDLERS[args.command](args)
    except (DomainError, ResourceLimitError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    sys.stdout.write(text)
    return code


def main() -> None:
    raise SystemExit(run_cli())
