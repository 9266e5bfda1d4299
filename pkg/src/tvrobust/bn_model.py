"""Discrete Bayesian network structure: variables, DAG, attached CPTs.

A net holds one CPT per variable, aligned with the variable list; the
edge set is derived from the CPT parent lists.  Values are immutable
after construction.  Direct construction performs no checking so that
``validate`` can report problems as data; use :meth:`BayesNet.of` to
construct with checking.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .tv_core import Cpt


@dataclass(frozen=True)
class Variable:
    name: str
    levels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))


@dataclass(frozen=True)
class BayesNet:
    variables: tuple[Variable, ...]
    cpts: tuple[Cpt, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "cpts", tuple(self.cpts))

    @classmethod
    def of(cls, variables, cpts) -> "BayesNet":
        net = cls(tuple(variables), tuple(cpts))
        problems = validate(net)
        if problems:
            raise DomainError("invalid network: " + "; ".join(problems))
        return net

    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def position(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise DomainError(f"unknown variable {name!r}")

    def variable(self, name: str) -> Variable:
        return self.variables[self.position(name)]

    def cpt(self, name: str) -> Cpt:
        return self.cpts[self.position(name)]

    def parents_of(self, name: str) -> tuple[str, ...]:
        return self.cpt(name).parents

    def children_of(self, name: str) -> tuple[str, ...]:
        self.position(name)
        return tuple(v.name for v in self.variables
                     if name in self.cpt(v.name).parents)

    def edges(self) -> tuple[tuple[str, str], ...]:
        """All (parent, child) pairs, children in declaration order."""
        out = []
        for v, t in zip(self.variables, self.cpts):
            for p in t.parents:
                out.append((p, v.name))
        return tuple(out)

    def sorted_by_position(self, names) -> tuple[str, ...]:
        return tuple(sorted(names, key=self.position))


def validate(net: BayesNet) -> list[str]:
    """Check every structural invariant; violations are data, not errors."""
    problems: list[str] = []
    names = [v.name for v in net.variables]
    if len(set(names)) != len(names):
        problems.append("duplicate variable names")
        return problems
    for v in net.variables:
        if not v.name:
            problems.append("empty variable name")
        if len(v.levels) < 1:
            problems.append(f"{v.name}: no levels")
        if len(set(v.levels)) != len(v.levels):
            problems.append(f"{v.name}: duplicate levels")
    if len(net.cpts) != len(net.variables):
        problems.append(
            f"{len(net.cpts)} CPTs for {len(net.variables)} variables"
        )
        return problems
    by_name = {v.name: v for v in net.variables}
    for v, t in zip(net.variables, net.cpts):
        if t.child != v.name:
            problems.append(f"CPT for {t.child!r} attached to {v.name!r}")
            continue
        if t.child_levels != v.levels:
            problems.append(f"{v.name}: CPT levels disagree with variable")
        for j, p in enumerate(t.parents):
            if p not in by_name:
                problems.append(f"{v.name}: unknown parent {p!r}")
            elif (j < len(t.parent_levels)
                  and t.parent_levels[j] != by_name[p].levels):
                problems.append(f"{v.name}: parent {p!r} levels disagree")
        problems.extend(t.violations())
    try:
        topological_order(net)
    except DomainError as e:
        problems.append(str(e))
    return problems


def topological_order(net: BayesNet) -> tuple[str, ...]:
    """Parents before children; ties broken by declaration order."""
    names = [v.name for v in net.variables]
    known = set(names)
    pending = {
        v.name: [p for p in t.parents if p in known]
        for v, t in zip(net.variables, net.cpts)
    }
    order = []
    placed = set()
    while len(order) < len(names):
        progressed = False
        for n in names:
            if n in placed:
                continue
            if all(p in placed for p in pending[n]):
                order.append(n)
                placed.add(n)
                progressed = True
                break
        if not progressed:
            stuck = [n for n in names if n not in placed]
            raise DomainError("cycle detected involving " + ", ".join(stuck))
    return tuple(order)


def ancestral_set(net: BayesNet, targets) -> set[str]:
    """Targets plus all their ancestors, closed under the parent relation."""
    result = set()
    frontier = list(targets)
    for t in frontier:
        net.position(t)
    while frontier:
        n = frontier.pop()
        if n in result:
            continue
        result.add(n)
        frontier.extend(net.parents_of(n))
    return result


def descendants_map(net: BayesNet) -> dict[str, set[str]]:
    """Strict descendants of every variable."""
    order = topological_order(net)
    desc: dict[str, set[str]] = {n: set() for n in order}
    for n in reversed(order):
        for c in net.children_of(n):
            desc[n].add(c)
            desc[n] |= desc[c]
    return desc
