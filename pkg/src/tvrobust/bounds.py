"""Propagation and composition bounds built on TV diameters.

Two ways to price a clique path: the exact mode computes each factor
table with the oracle and takes its true diameter; the bound mode never
touches the oracle and assembles an upper bound for each factor from
the diameters of the model's own CPTs.  The exact value never exceeds
the assembled bound, and both are certified factor by factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bn_model import BayesNet, descendants_map, topological_order
from .errors import DomainError
from .exact_oracle import transition_table
from .jtree import CliquePath, path_factor_specs
from .tv_core import (
    Cpt,
    ProbVec,
    cpt_superbound,
    cpt_tv_plus,
    diameter,
    parent_diameter,
    tv_distance,
)


@dataclass(frozen=True)
class Factor:
    """One certified factor of a path impact product."""

    table: str
    value: float
    provenance: str
    terms: tuple[str, ...] = field(default=())


@dataclass(frozen=True)
class BoundResult:
    value: float
    mode: str
    certificate: tuple[Factor, ...]


@dataclass(frozen=True)
class OverlapDecomposition:
    """Mixture form of two vectors over their common mass.

    Both inputs reconstruct as beta * common + (1 - beta) * residual_i,
    and 1 - beta equals their TV distance exactly.
    """

    beta: float
    common: ProbVec
    residual_1: ProbVec
    residual_2: ProbVec


def overlap_decompose(p1: ProbVec, p2: ProbVec) -> OverlapDecomposition:
    if p1.levels != p2.levels:
        raise DomainError("level mismatch")
    d = tv_distance(p1, p2)
    beta = 1.0 - d
    floor = tuple(min(a, b) for a, b in zip(p1.mass, p2.mass))
    if beta <= 0.0:
        # disjoint supports: no common mass, residuals are the inputs
        n = len(p1.levels)
        common = ProbVec.of(p1.levels, (1.0 / n,) * n)
        return OverlapDecomposition(0.0, common, p1, p2)
    common = ProbVec.of(p1.levels, tuple(x / beta for x in floor))
    if d == 0.0:
        return OverlapDecomposition(1.0, common, common, common)
    r1 = ProbVec.of(p1.levels,
                    tuple((a - m) / d for a, m in zip(p1.mass, floor)))
    r2 = ProbVec.of(p2.levels,
                    tuple((b - m) / d for b, m in zip(p2.mass, floor)))
    return OverlapDecomposition(beta, common, r1, r2)


def propagate_bound(d_pi: float, P: Cpt) -> float:
    """Worst-case TV of induced margins for inputs at TV distance d_pi."""
    if not 0.0 <= d_pi <= 1.0:
        raise DomainError(f"TV distance out of range: {d_pi}")
    return diameter(P) * d_pi


def joint_perturb_bound(d_pi: float, P1: Cpt, P2: Cpt) -> float:
    """Margin TV bound when the table itself is also perturbed.

    Takes the tightest of the two available forms (the superbound form
    and the diameter form) clamped to 1.
    """
    if not 0.0 <= d_pi <= 1.0:
        raise DomainError(f"TV distance out of range: {d_pi}")
    dvp = cpt_tv_plus(P1, P2)
    star_form = dvp + d_pi * cpt_superbound(P1, P2)
    diam_form = (1.0 + d_pi) * dvp + d_pi * max(diameter(P1), diameter(P2))
    return min(1.0, star_form, diam_form)


def joint_tv_bound(dv_marginal: float, sup_conditional_tv: float) -> float:
    """TV between two joints from a margin TV and a conditional TV cap."""
    for x in (dv_marginal, sup_conditional_tv):
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"TV distance out of range: {x}")
    return min(1.0, dv_marginal + sup_conditional_tv)


def chain_diameter_bound(d1: float, d2: float) -> float:
    """Diameter bound for a two-block conditional via the chain sum."""
    for x in (d1, d2):
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"diameter out of range: {x}")
    return min(1.0, d1 + d2)


def diameter_sum_bound(P: Cpt) -> float:
    """Sum of per-parent diameters, clamped to 1; at least the diameter."""
    total = 0.0
    for j in range(len(P.parents)):
        total += parent_diameter(P, j)
    return min(1.0, total)


def _factor_name(outputs, given) -> str:
    left = ", ".join(outputs) if outputs else "()"
    right = ", ".join(given) if given else "()"
    return f"P({left} | {right})"


def _bound_factor(net: BayesNet, outputs, given, topo_rank, desc) -> Factor:
    """Upper-bound one path factor from model CPT diameters alone.

    Output variables are handled in topological order.  A variable that
    already appears in the conditioning set is an identity column and
    contributes 1.  Otherwise its contribution is its own CPT diameter,
    which is sound when the conditioning set holds no descendant of the
    variable (extra non-descendant conditioning beyond the parents adds
    nothing, and absent parents only average rows together).  A
    conditioning set containing a descendant cannot be bounded this way
    and is reported as a gap.
    """
    z = list(given)
    terms = []
    total = 0.0
    for w in sorted(outputs, key=topo_rank.get):
        if w in z:
            total += 1.0
            terms.append(f"{w}: 1 (fixed by conditioning set)")
            continue
        blockers = desc[w] & set(z)
        if blockers:
            raise DomainError(
                f"cannot bound {_factor_name(outputs, given)}: "
                f"conditioning set of {w} contains descendant(s) "
                + ", ".join(sorted(blockers))
            )
        d = diameter(net.cpt(w))
        missing = [p for p in net.parents_of(w) if p not in z]
        note = " (absent parents averaged)" if missing else ""
        total += d
        terms.append(f"{w}: {d!r} from its CPT diameter{note}")
        z.append(w)
    value = min(1.0, total)
    return Factor(
        table=_factor_name(outputs, given),
        value=value,
        provenance="cpt-bound",
        terms=tuple(terms),
    )


def path_impact(net: BayesNet, path: CliquePath, mode: str = "exact",
                limit: int | None = None) -> BoundResult:
    """Impact product along a clique path.

    ``mode`` is "exact" (oracle factor tables, true diameters) or
    "bound" (assembled from model CPT diameters, no oracle).  The value
    is the product of the factor values; a single-clique path carries
    no attenuation and has value 1.  An empty separator on the path
    means the endpoints live in disconnected components, so the factor
    and the whole product are 0.
    """
    if mode not in ("exact", "bound"):
        raise DomainError(f"unknown mode {mode!r}")
    specs = path_factor_specs(path)
    if not specs:
        return BoundResult(
            1.0, mode,
            (Factor("(donor and target share a clique)", 1.0, "convention"),),
        )
    factors = []
    if mode == "exact":
        for outputs, given in specs:
            if not outputs:
                factors.append(Factor(_factor_name(outputs, given), 0.0,
                                      "empty separator"))
                continue
            t = transition_table(net, outputs, given, limit)
            factors.append(Factor(_factor_name(outputs, given),
                                  diameter(t), "oracle"))
    else:
        topo_rank = {n: i for i, n in enumerate(topological_order(net))}
        desc = descendants_map(net)
        for outputs, given in specs:
            if not outputs:
                factors.append(Factor(_factor_name(outputs, given), 0.0,
                                      "empty separator"))
                continue
            factors.append(_bound_factor(net, outputs, given, topo_rank, desc))
    value = 1.0
    for f in factors:
        value *= f.value
    return BoundResult(min(1.0, value), mode, tuple(factors))
