"""Decision support: edge deletion, level amalgamation, elicitation order.

Every transform returns a new net; nothing is mutated.  Replacement
rows always use plain uniform averages, which need no information
beyond the tables already elicited.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bn_model import BayesNet, Variable, validate
from .bounds import path_impact
from .errors import DomainError
from .jtree import donor_target_path
from .tv_core import (
    Cpt,
    ProbVec,
    collapse_parent,
    mix,
    parent_diameter,
    parent_index,
    tv_distance,
)


@dataclass(frozen=True)
class EdgeRecord:
    parent: str
    child: str
    delta: float


@dataclass(frozen=True)
class EdgeReport:
    """Every DAG edge with its deletion cost, largest first."""

    records: tuple[EdgeRecord, ...]


def _rank_key(x: float) -> float:
    """Quantize a cost for ordering so float noise cannot break a tie.

    Costs that agree to nine decimals are treated as equal; reported
    values keep full precision, only the ordering collapses them.
    """
    return round(x, 9)


def edge_deletion_report(net: BayesNet) -> EdgeReport:
    problems = validate(net)
    if problems:
        raise DomainError("invalid network: " + "; ".join(problems))
    records = []
    order = []
    for v, t in zip(net.variables, net.cpts):
        for j, p in enumerate(t.parents):
            records.append(EdgeRecord(p, v.name, parent_diameter(t, j)))
            order.append(len(order))
    ranked = sorted(zip(records, order),
                    key=lambda ro: (-_rank_key(ro[0].delta), ro[1]))
    return EdgeReport(tuple(r for r, _ in ranked))


def delete_edge(net: BayesNet, parent: str, child: str):
    """Remove one edge, averaging the child's rows over the lost parent.

    Returns (new net, cost), where cost is the largest TV between any
    original row and the merged row that replaces it.
    """
    t = net.cpt(child)
    j = parent_index(t, parent)
    merged = collapse_parent(t, j)
    cost = 0.0
    for i, row in enumerate(t.rows):
        config = t.parent_config(i)
        reduced_config = tuple(
            label for k, label in enumerate(config) if k != j
        )
        counterpart = merged.rows[merged.row_index(reduced_config)]
        cost = max(cost, tv_distance(row, counterpart))
    cpts = tuple(merged if x.child == child else x for x in net.cpts)
    return BayesNet(net.variables, cpts), cost


def _merged_levels(levels, group):
    """New level tuple with a consecutive group fused, plus the mapping."""
    group = tuple(group)
    if not group:
        raise DomainError("empty group")
    try:
        start = levels.index(group[0])
    except ValueError:
        raise DomainError(f"unknown level {group[0]!r}")
    if tuple(levels[start:start + len(group)]) != group:
        raise DomainError(
            f"group {list(group)} is not a consecutive run of {list(levels)}"
        )
    merged_name = "+".join(group)
    new_levels = levels[:start] + (merged_name,) + levels[start + len(group):]
    to_new = {}
    for i, lv in enumerate(levels):
        if start <= i < start + len(group):
            to_new[lv] = merged_name
        else:
            to_new[lv] = lv
    return new_levels, to_new


def counterpart_cost(original: Cpt, merged: Cpt, variable: str, group) -> float:
    """Row-matched TV between a CPT and its level-merged version.

    Each original row (over the variable's full level set as a parent)
    is compared to the merged row it collapses into.  This is how a
    table with more rows is priced against its amalgamated replacement.
    """
    j = parent_index(original, variable)
    _, to_new = _merged_levels(original.parent_levels[j], group)
    cost = 0.0
    for i, row in enumerate(original.rows):
        config = list(original.parent_config(i))
        config[j] = to_new[config[j]]
        counterpart = merged.rows[merged.row_index(config)]
        if row.levels != counterpart.levels:
            raise DomainError("child levels differ between the tables")
        cost = max(cost, tv_distance(row, counterpart))
    return cost


def amalgamate_levels(net: BayesNet, variable: str, group,
                      allow_nonconsecutive: bool = False):
    """Merge a run of levels of one variable across the whole net.

    The variable's own CPT has the grouped columns summed; every CPT
    with the variable as a parent has the grouped rows averaged
    uniformly.  Returns (new net, costs) where costs maps each child
    whose CPT had rows averaged to its row-matched TV cost.  The group
    must be consecutive in the declared level order unless
    ``allow_nonconsecutive`` is set (meant for nominal scales).
    """
    var = net.variable(variable)
    group = tuple(group)
    if allow_nonconsecutive:
        ordered = tuple(lv for lv in var.levels if lv in set(group))
        if set(ordered) != set(group) or len(ordered) != len(group):
            raise DomainError("group contains unknown or repeated levels")
        reordered = ordered
        new_levels, to_new = _merged_levels_any(var.levels, reordered)
    else:
        new_levels, to_new = _merged_levels(var.levels, group)

    variables = tuple(
        Variable(v.name, new_levels) if v.name == variable else v
        for v in net.variables
    )
    costs: dict[str, float] = {}
    new_cpts = []
    for v, t in zip(net.variables, net.cpts):
        if v.name == variable:
            rows = []
            for row in t.rows:
                acc: dict[str, float] = {lv: 0.0 for lv in new_levels}
                for lv, x in zip(row.levels, row.mass):
                    acc[to_new[lv]] += x
                rows.append(ProbVec(new_levels,
                                    tuple(acc[lv] for lv in new_levels)))
            new_cpts.append(Cpt(t.child, new_levels, t.parents,
                                t.parent_levels, tuple(rows)))
        elif variable in t.parents:
            j = parent_index(t, variable)
            merged = _merge_parent_rows(t, j, new_levels, to_new)
            costs[v.name] = counterpart_cost_from_map(t, merged, j, to_new)
            new_cpts.append(merged)
        else:
            new_cpts.append(t)
    return BayesNet(variables, tuple(new_cpts)), costs


def _merged_levels_any(levels, group):
    merged_name = "+".join(group)
    first = min(levels.index(lv) for lv in group)
    new_levels = []
    for i, lv in enumerate(levels):
        if lv in group:
            if i == first:
                new_levels.append(merged_name)
        else:
            new_levels.append(lv)
    to_new = {lv: (merged_name if lv in group else lv) for lv in levels}
    return tuple(new_levels), to_new


def _merge_parent_rows(t: Cpt, j: int, new_levels, to_new) -> Cpt:
    """Average rows of ``t`` across grouped levels of parent ``j``."""
    parent_levels = list(t.parent_levels)
    parent_levels[j] = new_levels
    shell = Cpt(t.child, t.child_levels, t.parents, tuple(parent_levels), ())
    rows = []
    for r in range(shell.n_rows):
        config = shell.parent_config(r)
        sources = []
        for lv in t.parent_levels[j]:
            if to_new[lv] != config[j]:
                continue
            src = list(config)
            src[j] = lv
            sources.append(t.rows[t.row_index(src)])
        rows.append(mix([1.0 / len(sources)] * len(sources), sources))
    return Cpt(t.child, t.child_levels, t.parents, tuple(parent_levels),
               tuple(rows))


def counterpart_cost_from_map(original: Cpt, merged: Cpt, j: int,
                              to_new) -> float:
    cost = 0.0
    for i, row in enumerate(original.rows):
        config = list(original.parent_config(i))
        config[j] = to_new[config[j]]
        counterpart = merged.rows[merged.row_index(config)]
        cost = max(cost, tv_distance(row, counterpart))
    return cost


def amalgamation_suggest(net: BayesNet, variable: str):
    """Consecutive level pairs of a variable, cheapest merge first.

    The cost of a pair is the largest TV between rows that differ only
    in that pair, across every CPT where the variable is a parent.
    Ties keep the earlier pair first.
    """
    var = net.variable(variable)
    if len(var.levels) < 2:
        raise DomainError(f"{variable!r} has fewer than two levels")
    candidates = []
    for k in range(len(var.levels) - 1):
        pair = (var.levels[k], var.levels[k + 1])
        cost = 0.0
        for v, t in zip(net.variables, net.cpts):
            if variable not in t.parents:
                continue
            j = parent_index(t, variable)
            for i, row in enumerate(t.rows):
                config = list(t.parent_config(i))
                if config[j] != pair[0]:
                    continue
                other = list(config)
                other[j] = pair[1]
                cost = max(cost, tv_distance(
                    row, t.rows[t.row_index(other)]))
        candidates.append((pair, cost))
    candidates.sort(key=lambda pc: _rank_key(pc[1]))
    return candidates


@dataclass(frozen=True)
class PriorityRecord:
    variable: str
    score: float | None
    note: str


def elicitation_priority(net: BayesNet, targets) -> tuple[PriorityRecord, ...]:
    """Rank every CPT by its worst-case influence on the target margin.

    For each variable, the clique holding its family (itself plus its
    parents) is connected to the clique holding the targets through the
    junction tree of their common ancestral graph, and the score is the
    impact product along that path assembled from elicited CPT
    diameters alone.  Families sharing the target clique score 1;
    disconnected families score 0; a family whose path cannot be priced
    without fresh elicitation gets a note instead of a score, as does
    one the reduction itself rejects.  Records are sorted by descending
    score, declaration order on ties; scoreless entries sort last.
    """
    problems = validate(net)
    if problems:
        raise DomainError("invalid network: " + "; ".join(problems))
    targets = set(targets)
    for t in targets:
        net.position(t)
    records = []
    order = []
    for v, t in zip(net.variables, net.cpts):
        family = {v.name} | set(t.parents)
        try:
            _, path = donor_target_path(net, family, targets)
            result = path_impact(net, path, mode="bound")
        except DomainError as e:
            records.append(PriorityRecord(v.name, None, str(e)))
            order.append(len(order))
            continue
        note = ""
        if len(path.cliques) == 1:
            note = "family shares the target clique"
        elif result.value == 0.0:
            note = "no influence path to the target"
        records.append(PriorityRecord(v.name, result.value, note))
        order.append(len(order))
    ranked = sorted(
        zip(records, order),
        key=lambda ro: (-(_rank_key(ro[0].score)
                          if ro[0].score is not None else -1.0),
                        ro[1]),
    )
    return tuple(r for r, _ in ranked)
