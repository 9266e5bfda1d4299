"""Brute-force exact inference on small networks.

Dense enumeration only.  The joint is materialized as a flat numpy
array over the mixed-radix product space, first declared variable most
significant, then marginals and conditional tables are read off it.
Deliberately no variable elimination and no message passing: this code
is the trusted oracle the bounds are verified against, so it stays as
simple as possible.  A configurable state-space cap (default 2^22,
overridable with the TVROBUST_LIMIT environment variable) guards
memory; exceeding it is a hard error, never a silent truncation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .bn_model import BayesNet, validate
from .errors import DomainError, ResourceLimitError
from .tv_core import Cpt, ProbVec

DEFAULT_STATE_LIMIT = 2 ** 22
_ENV_LIMIT = "TVROBUST_LIMIT"


def state_limit(explicit: int | None = None) -> int:
    """Resolve the state-space cap: argument, environment, default."""
    if explicit is not None:
        if explicit < 1:
            raise DomainError(f"state limit must be positive, got {explicit}")
        return explicit
    raw = os.environ.get(_ENV_LIMIT)
    if raw is not None:
        try:
            value = int(raw)
        except ValueError:
            raise DomainError(f"{_ENV_LIMIT} must be an integer, got {raw!r}")
        if value < 1:
            raise DomainError(f"{_ENV_LIMIT} must be positive, got {value}")
        return value
    return DEFAULT_STATE_LIMIT


@dataclass(frozen=True)
class JointTable:
    """Dense mass function over an ordered variable scope.

    ``mass`` is flat, indexed in mixed radix with the first scope
    variable most significant (C order of the reshaped array).
    """

    scope: tuple[str, ...]
    cards: tuple[int, ...]
    mass: np.ndarray

    def grid(self) -> np.ndarray:
        return self.mass.reshape(self.cards)

    def total(self) -> float:
        return float(self.mass.sum())


def joint_mass(net: BayesNet, limit: int | None = None) -> JointTable:
    """Full joint of a validated net by multiplying broadcast CPT factors."""
    problems = validate(net)
    if problems:
        raise DomainError("invalid network: " + "; ".join(problems))
    names = net.names()
    cards = tuple(len(v.levels) for v in net.variables)
    size = 1
    for c in cards:
        size *= c
    cap = state_limit(limit)
    if size > cap:
        raise ResourceLimitError(
            f"state space has {size} configurations, limit is {cap}"
        )
    pos = {n: i for i, n in enumerate(names)}
    n = len(names)
    full = np.ones(cards, dtype=np.float64)
    for v, t in zip(net.variables, net.cpts):
        axes = [pos[p] for p in t.parents] + [pos[v.name]]
        table = np.array([row.mass for row in t.rows], dtype=np.float64)
        shape = [len(levels) for levels in t.parent_levels] + [len(v.levels)]
        factor = table.reshape(shape)
        # put the factor's axes at their positions in the full array
        order = np.argsort(axes)
        factor = factor.transpose(order)
        target_shape = [1] * n
        for a in axes:
            target_shape[a] = cards[a]
        full = full * factor.reshape(target_shape)
    return JointTable(names, cards, full.reshape(-1))


def marginal_of(joint: JointTable, A) -> JointTable:
    """Marginal of an existing joint over a nonempty subset of its scope."""
    keep = [n for n in joint.scope if n in set(A)]
    for a in A:
        if a not in joint.scope:
            raise DomainError(f"unknown variable {a!r}")
    if not keep:
        raise DomainError("empty marginal scope")
    drop = tuple(i for i, name in enumerate(joint.scope) if name not in keep)
    grid = joint.grid()
    if drop:
        grid = grid.sum(axis=drop)
    cards = tuple(joint.cards[joint.scope.index(name)] for name in keep)
    return JointTable(tuple(keep), cards, grid.reshape(-1))


def marginal(net: BayesNet, A, limit: int | None = None) -> JointTable:
    """Marginal over ``A``, scope ordered by declaration."""
    return marginal_of(joint_mass(net, limit), A)


def table_tv(a: JointTable, b: JointTable) -> float:
    """TV distance between two joints over the same scope."""
    if a.scope != b.scope or a.cards != b.cards:
        raise DomainError(
            f"scope mismatch: {list(a.scope)} vs {list(b.scope)}"
        )
    return 0.5 * float(np.abs(a.mass - b.mass).sum())


def _config_labels(net: BayesNet, names) -> list[tuple[str, ...]]:
    """All level configurations of ``names``, first name most significant."""
    configs: list[tuple[str, ...]] = [()]
    for n in names:
        levels = net.variable(n).levels
        configs = [c + (lv,) for c in configs for lv in levels]
    return configs


def transition_table(net: BayesNet, outputs, given,
                     limit: int | None = None) -> Cpt:
    """Stochastic table P(outputs | given), both in declaration order.

    Unlike :func:`conditional_table` the two sets may overlap; a column
    whose values disagree with the row on shared variables gets mass 0.
    ``given`` may be empty, producing a single-row table of the marginal.
    Rows conditioned on a zero-probability configuration are an error.
    """
    outs = net.sorted_by_position(set(outputs))
    conds = net.sorted_by_position(set(given))
    if not outs:
        raise DomainError("empty output set")
    union = net.sorted_by_position(set(outs) | set(conds))
    m = marginal(net, union, limit)
    upos = {name: i for i, name in enumerate(union)}
    grid = m.grid()

    out_configs = _config_labels(net, outs)
    cond_configs = _config_labels(net, conds)
    out_idx = {name: outs.index(name) for name in outs}

    rows = []
    col_labels = tuple(",".join(c) for c in out_configs)
    for cond in cond_configs:
        fixed = dict(zip(conds, cond))
        sel: list[object] = [slice(None)] * len(union)
        for name, lv in fixed.items():
            sel[upos[name]] = net.variable(name).levels.index(lv)
        block = grid[tuple(sel)]
        denom = float(block.sum())
        if denom <= 0.0:
            raise DomainError(
                "conditioning configuration has zero probability: "
                + ", ".join(f"{n}={v}" for n, v in zip(conds, cond))
            )
        mass = []
        free = [name for name in union if name not in fixed]
        for oc in out_configs:
            want = dict(zip(outs, oc))
            if any(want[n] != fixed[n] for n in want if n in fixed):
                mass.append(0.0)
                continue
            pick: list[object] = [slice(None)] * len(free)
            for k, name in enumerate(free):
                if name in want:
                    pick[k] = net.variable(name).levels.index(want[name])
            mass.append(float(np.asarray(block[tuple(pick)]).sum()) / denom)
        rows.append(ProbVec(col_labels, tuple(mass)))
    if len(outs) == 1:
        col_labels = net.variable(outs[0]).levels
        rows = [ProbVec(col_labels, r.mass) for r in rows]
    return Cpt(
        child=",".join(outs),
        child_levels=col_labels,
        parents=conds,
        parent_levels=tuple(net.variable(n).levels for n in conds),
        rows=tuple(rows),
    )


def conditional_table(net: BayesNet, A, B, limit: int | None = None) -> Cpt:
    """Conditional table of X_A given X_B for disjoint nonempty sets."""
    a, b = set(A), set(B)
    if not a:
        raise DomainError("empty output set")
    if not b:
        raise DomainError("empty conditioning set")
    if a & b:
        raise DomainError(
            "output and conditioning sets overlap: "
            + ", ".join(sorted(a & b))
        )
    return transition_table(net, a, b, limit)
