"""Moralization, triangulation, junction trees, and clique paths.

Vertex order everywhere is the net's declaration order, and every
tie-break resolves to the lowest position, so identical inputs always
produce identical cliques, trees, and paths.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .bn_model import BayesNet, Variable, ancestral_set
from .errors import DomainError
from .exact_oracle import transition_table
from .tv_core import Cpt


@dataclass(frozen=True)
class UGraph:
    """Undirected graph over named vertices (no self-loops)."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        pos = {v: i for i, v in enumerate(self.vertices)}
        fixed = []
        for a, b in self.edges:
            if a not in pos or b not in pos:
                raise DomainError(f"edge ({a!r}, {b!r}) references unknown vertex")
            if a == b:
                raise DomainError(f"self-loop on {a!r}")
            if pos[a] > pos[b]:
                a, b = b, a
            fixed.append((a, b))
        fixed = sorted(set(fixed), key=lambda e: (pos[e[0]], pos[e[1]]))
        object.__setattr__(self, "edges", tuple(fixed))

    def neighbors(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def position(self, v: str) -> int:
        return self.vertices.index(v)


@dataclass(frozen=True)
class JunctionTree:
    """Cliques, spanning tree edges with separators, and a RIP ordering.

    Cliques are tuples of vertex names in declaration order, listed in a
    canonical order (lexicographic by vertex positions).  ``tree_edges``
    holds (clique index, clique index, separator) triples.  ``rip_order``
    is a permutation of clique indices whose running intersections each
    sit inside a single earlier clique.
    """

    cliques: tuple[tuple[str, ...], ...]
    tree_edges: tuple[tuple[int, int, tuple[str, ...]], ...]
    rip_order: tuple[int, ...]

    def clique_index(self, members) -> int:
        want = frozenset(members)
        for i, c in enumerate(self.cliques):
            if frozenset(c) == want:
                return i
        raise DomainError(f"no clique with members {sorted(want)}")

    def neighbors(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {i: [] for i in range(len(self.cliques))}
        for i, j, _ in self.tree_edges:
            adj[i].append(j)
            adj[j].append(i)
        return {i: sorted(v) for i, v in adj.items()}

    def separator(self, i: int, j: int) -> tuple[str, ...]:
        for a, b, s in self.tree_edges:
            if (a, b) in ((i, j), (j, i)):
                return s
        raise DomainError(f"cliques {i} and {j} are not adjacent")


@dataclass(frozen=True)
class CliquePath:
    """A repeat-free clique sequence with the separators between steps."""

    cliques: tuple[tuple[str, ...], ...]
    separators: tuple[tuple[str, ...], ...]


def moralize(net: BayesNet) -> UGraph:
    """Undirected skeleton plus marriage edges between co-parents."""
    names = net.names()
    edges = set()
    for parent, child in net.edges():
        edges.add((parent, child))
    for v in names:
        ps = net.parents_of(v)
        for a, b in itertools.combinations(ps, 2):
            edges.add((a, b))
    return UGraph(names, tuple(edges))


def subgraph(g: UGraph, keep) -> UGraph:
    keep = set(keep)
    verts = tuple(v for v in g.vertices if v in keep)
    edges = tuple((a, b) for a, b in g.edges if a in keep and b in keep)
    return UGraph(verts, edges)


def ancestral_graph(net: BayesNet, targets) -> UGraph:
    """Moral graph restricted to the ancestral set of the targets."""
    keep = ancestral_set(net, targets)
    return subgraph(moralize(net), keep)


def triangulate(g: UGraph, order_hint=None) -> UGraph:
    """Chordal supergraph via min-fill elimination.

    Ties are broken by position in ``order_hint`` when given, otherwise
    by declaration order, so the result is deterministic.
    """
    if order_hint is not None:
        rank = {v: i for i, v in enumerate(order_hint)}
        for v in g.vertices:
            if v not in rank:
                raise DomainError(f"order hint is missing {v!r}")
    else:
        rank = {v: i for i, v in enumerate(g.vertices)}
    adj = {v: set(ns) for v, ns in g.neighbors().items()}
    fill: set[tuple[str, str]] = set()
    remaining = sorted(adj, key=rank.get)
    while remaining:
        best_v, best_cost = None, None
        for v in remaining:
            ns = [u for u in adj[v]]
            cost = 0
            for a, b in itertools.combinations(ns, 2):
                if b not in adj[a]:
                    cost += 1
            if best_cost is None or cost < best_cost:
                best_v, best_cost = v, cost
        ns = list(adj[best_v])
        for a, b in itertools.combinations(ns, 2):
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
                fill.add((a, b))
        for u in adj[best_v]:
            adj[u].discard(best_v)
        del adj[best_v]
        remaining.remove(best_v)
    return UGraph(g.vertices, g.edges + tuple(fill))


def _mcs_order(g: UGraph) -> list[str]:
    """Maximum cardinality search visit order, lowest position on ties."""
    adj = g.neighbors()
    weight = {v: 0 for v in g.vertices}
    visited: list[str] = []
    seen = set()
    for _ in range(len(g.vertices)):
        best = None
        for v in g.vertices:
            if v in seen:
                continue
            if best is None or weight[v] > weight[best]:
                best = v
        visited.append(best)
        seen.add(best)
        for u in adj[best]:
            if u not in seen:
                weight[u] += 1
    return visited


def is_chordal(g: UGraph) -> bool:
    adj = g.neighbors()
    order = _mcs_order(g)
    earlier: set[str] = set()
    for v in order:
        madj = adj[v] & earlier
        for a, b in itertools.combinations(sorted(madj, key=g.position), 2):
            if b not in adj[a]:
                return False
        earlier.add(v)
    return True


def maximal_cliques(g: UGraph) -> tuple[tuple[str, ...], ...]:
    """Maximal cliques of a chordal graph, in canonical order."""
    if not is_chordal(g):
        raise DomainError("graph is not chordal")
    adj = g.neighbors()
    order = _mcs_order(g)
    earlier: set[str] = set()
    candidates: list[frozenset[str]] = []
    for v in order:
        candidates.append(frozenset({v} | (adj[v] & earlier)))
        earlier.add(v)
    keep: list[frozenset[str]] = []
    for c in candidates:
        if not any(c < other for other in candidates):
            keep.append(c)
    unique = set(keep)
    ordered = [tuple(sorted(c, key=g.position)) for c in unique]
    ordered.sort(key=lambda c: tuple(g.position(v) for v in c))
    return tuple(ordered)


def verify_running_intersection(cliques, order) -> bool:
    """Independent check that an ordering has the running intersection
    property: each clique's overlap with the union of its predecessors
    sits inside a single predecessor."""
    sets = [frozenset(c) for c in cliques]
    if sorted(order) != list(range(len(sets))):
        return False
    union: set[str] = set()
    for k, idx in enumerate(order):
        sep = sets[idx] & union
        if k > 0 and sep and not any(
                sep <= sets[order[j]] for j in range(k)):
            return False
        union |= sets[idx]
    return True


def build_junction_tree(g: UGraph) -> JunctionTree:
    """Junction tree of a chordal graph.

    Maximum separator-cardinality spanning tree, ties resolved toward
    the lowest clique indices; disconnected graphs are spanned with
    empty separators.  The RIP ordering is produced greedily from the
    first clique and then verified by the independent checker.
    """
    cliques = maximal_cliques(g)
    sets = [frozenset(c) for c in cliques]
    m = len(cliques)
    pos = {v: g.position(v) for v in g.vertices}

    candidates = []
    for i in range(m):
        for j in range(i + 1, m):
            w = len(sets[i] & sets[j])
            candidates.append((-w, i, j))
    candidates.sort()
    parent = list(range(m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree_edges = []
    for negw, i, j in candidates:
        ri, rj = find(i), find(j)
        if ri == rj:
            continue
        parent[ri] = rj
        sep = tuple(sorted(sets[i] & sets[j], key=pos.get))
        tree_edges.append((i, j, sep))
    tree_edges.sort(key=lambda e: (e[0], e[1]))

    adj: dict[int, list[int]] = {i: [] for i in range(m)}
    for i, j, _ in tree_edges:
        adj[i].append(j)
        adj[j].append(i)
    rip: list[int] = []
    placed = set()
    while len(rip) < m:
        if not rip:
            pick = 0
        else:
            frontier = sorted(
                j for i in rip for j in adj[i] if j not in placed
            )
            pick = frontier[0] if frontier else min(
                i for i in range(m) if i not in placed
            )
        rip.append(pick)
        placed.add(pick)

    jt = JunctionTree(cliques, tuple(tree_edges), tuple(rip))
    if not verify_running_intersection(cliques, jt.rip_order):
        raise DomainError("running intersection verification failed")
    return jt


def junction_property_holds(jt: JunctionTree) -> bool:
    """Each variable's cliques must form a connected subtree."""
    adj = jt.neighbors()
    variables = sorted({v for c in jt.cliques for v in c})
    for v in variables:
        holding = [i for i, c in enumerate(jt.cliques) if v in c]
        if not holding:
            continue
        seen = {holding[0]}
        stack = [holding[0]]
        while stack:
            i = stack.pop()
            for j in adj[i]:
                if j not in seen and v in jt.cliques[j]:
                    seen.add(j)
                    stack.append(j)
        if set(holding) != seen:
            return False
    return True


def simple_path(jt: JunctionTree, donor, target) -> CliquePath:
    """The unique repeat-free clique sequence between two cliques."""
    start = jt.clique_index(donor)
    goal = jt.clique_index(target)
    adj = jt.neighbors()
    prev: dict[int, int] = {start: start}
    queue = [start]
    while queue:
        i = queue.pop(0)
        if i == goal:
            break
        for j in adj[i]:
            if j not in prev:
                prev[j] = i
                queue.append(j)
    if goal not in prev:
        raise DomainError("cliques are not connected in the tree")
    chain = [goal]
    while chain[-1] != start:
        chain.append(prev[chain[-1]])
    chain.reverse()
    cliques = tuple(jt.cliques[i] for i in chain)
    seps = tuple(
        jt.separator(chain[k], chain[k + 1]) for k in range(len(chain) - 1)
    )
    return CliquePath(cliques, seps)


def donor_target_path(net: BayesNet, donor, target):
    """Clique path of the donor-to-target recipe, graph work only.

    Builds the moral graph of the ancestral set of both variable sets,
    triangulates it, builds its junction tree, locates the lowest-index
    clique containing the donor, then the clique containing the target
    nearest to it on the tree, and takes the simple path between them.
    Ending at the nearest hosting clique keeps the chain of factors as
    short as possible and, for a single-variable target, guarantees the
    target sits among the final clique's fresh variables rather than
    inside the last separator, so the impact product prices its margin.
    Returns (junction tree, clique path); no probabilities are touched.
    """
    donor = set(donor)
    target = set(target)
    if not donor or not target:
        raise DomainError("donor and target sets must be nonempty")
    keep = ancestral_set(net, donor | target)
    tri = triangulate(subgraph(moralize(net), keep))
    jt = build_junction_tree(tri)

    def candidates(members, label: str) -> list[int]:
        found = [i for i, c in enumerate(jt.cliques)
                 if members <= frozenset(c)]
        if not found:
            raise DomainError(
                f"{label} set {sorted(members)} spans multiple cliques; "
                "split it into per-clique subsets"
            )
        return found

    c_donor = candidates(donor, "donor")[0]
    hosts = candidates(target, "target")
    dist = {c_donor: 0}
    frontier = [c_donor]
    adj = jt.neighbors()
    while frontier:
        i = frontier.pop(0)
        for j in adj[i]:
            if j not in dist:
                dist[j] = dist[i] + 1
                frontier.append(j)
    c_target = min(hosts, key=lambda i: (dist[i], i))
    path = simple_path(jt, jt.cliques[c_donor], jt.cliques[c_target])
    return jt, path


def donor_target_reduction(net: BayesNet, donor, target,
                           limit: int | None = None):
    """Ancestral-graph recipe from a donor variable set to a target set.

    Takes the clique path from donor_target_path and rebuilds a reduced
    net over the path variables whose joint equals the original margin
    over those variables exactly.  Returns (reduced net, junction tree,
    clique path).
    """
    jt, path = donor_target_path(net, donor, target)
    keep = ancestral_set(net, set(donor) | set(target))
    sub_vars = tuple(v for v in net.variables if v.name in keep)
    sub_cpts = tuple(net.cpt(v.name) for v in sub_vars)
    subnet = BayesNet(sub_vars, sub_cpts)

    kept = sorted({v for c in path.cliques for v in c}, key=net.position)
    variables = []
    cpts = []
    for k, name in enumerate(kept):
        var = net.variable(name)
        variables.append(Variable(var.name, var.levels))
        t = transition_table(subnet, [name], kept[:k], limit)
        cpts.append(Cpt(name, var.levels, t.parents, t.parent_levels, t.rows))
    reduced = BayesNet(tuple(variables), tuple(cpts))
    return reduced, jt, path


def path_factor_specs(path: CliquePath) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """(outputs, given) pairs of the Markov-chain factors along a path.

    For a path C1..Ck: (S2, C1 minus S2), then (S_{i+1}, S_i) for the
    interior steps, then (Ck minus Sk, Sk).  Empty for a single clique.
    """
    k = len(path.cliques)
    if k != len(path.separators) + 1:
        raise DomainError("separator count does not match path length")
    if k <= 1:
        return []
    specs = []
    first = tuple(v for v in path.cliques[0] if v not in set(path.separators[0]))
    specs.append((path.separators[0], first))
    for i in range(len(path.separators) - 1):
        specs.append((path.separators[i + 1], path.separators[i]))
    last = tuple(v for v in path.cliques[-1] if v not in set(path.separators[-1]))
    specs.append((last, path.separators[-1]))
    return specs


def path_tables(net: BayesNet, path: CliquePath,
                limit: int | None = None) -> list[Cpt]:
    """Markov-chain factor tables along a clique path.

    For a path C1..Ck the tables are P(S2 | C1 minus S2), then
    P(S_{i+1} | S_i) for the interior steps, then P(Ck minus Sk | Sk),
    all computed with the exact oracle.  A single-clique path has no
    tables.  Shared variables between consecutive separators stay in
    the conditioning set; their columns are consistency indicators.
    An empty separator (a path crossing disconnected components) has
    no factor table and is an error here; the bound machinery treats
    such factors as zero influence without calling the oracle.
    """
    tables = []
    for outputs, given in path_factor_specs(path):
        if not outputs:
            raise DomainError(
                "path crosses an empty separator; the factorization "
                "does not apply across disconnected components"
            )
        tables.append(transition_table(net, outputs, given, limit))
    return tables
