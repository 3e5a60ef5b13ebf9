"""Primal graphs, tree detection, rooted trees, and pseudo trees.

The primal graph connects two variables iff they co-occur in a clause.
The solver only handles theories whose primal graph is a forest; the
pseudo tree fixes the instantiation order.  Two strategies:

* "rooted": the primal tree itself, rooted per component at a vertex of
  minimum height (ties broken by name).  Pseudo-tree edges coincide with
  primal edges, so the ancestor condition holds trivially.
* "balanced": centroid decomposition, giving height O(log n).  Whenever a
  primal edge is first separated by a chosen centroid, the centroid is one
  of its endpoints, so the other endpoint ends up in its subtree -- the
  ancestor condition again.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Tuple

from treemi.theory import Theory, clause_vars


class NonTreeError(ValueError):
    """The primal graph contains a cycle; carries one offending cycle."""

    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__(
            "primal graph is not a forest; cycle: " + " - ".join(self.cycle)
        )


@dataclass(frozen=True)
class PrimalGraph:
    vertices: Tuple[str, ...]
    edges: FrozenSet[Tuple[str, str]]

    def neighbors(self, v: str) -> List[str]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return sorted(out)

    def adjacency(self) -> Dict[str, List[str]]:
        adj = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return {v: sorted(ns) for v, ns in adj.items()}


def primal_graph(theory: Theory) -> PrimalGraph:
    edges = set()
    for clause in theory.clauses:
        cv = sorted(clause_vars(clause))
        for i in range(len(cv)):
            for j in range(i + 1, len(cv)):
                edges.add((cv[i], cv[j]))
    return PrimalGraph(tuple(sorted(theory.variables)), frozenset(edges))


def components(g: PrimalGraph) -> List[Tuple[str, ...]]:
    """Connected components, each sorted, listed by smallest vertex."""
    adj = g.adjacency()
    seen = set()
    comps = []
    for v in g.vertices:
        if v in seen:
            continue
        stack = [v]
        comp = []
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(tuple(sorted(comp)))
    return sorted(comps)


def find_cycle(g: PrimalGraph):
    """Some cycle if one exists, else None.

    Iterative DFS; in an undirected graph every non-tree edge met during
    DFS closes a cycle with the parent chain.
    """
    adj = g.adjacency()
    parent: Dict[str, str] = {}
    for start in g.vertices:
        if start in parent:
            continue
        parent[start] = None
        stack = [(start, iter(adj[start]))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if w == parent[v]:
                    continue
                if w in parent:
                    chain = [v]
                    cur = v
                    while cur != w:
                        cur = parent[cur]
                        if cur is None:
                            return (v, w)
                        chain.append(cur)
                    return tuple(reversed(chain))
                parent[w] = v
                stack.append((w, iter(adj[w])))
                break
            else:
                stack.pop()
    return None


def is_tree(g: PrimalGraph) -> bool:
    """True iff every connected component is acyclic."""
    adj = g.adjacency()
    seen = set()
    for start in g.vertices:
        if start in seen:
            continue
        n_vertices = 0
        n_edge_ends = 0
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            n_vertices += 1
            n_edge_ends += len(adj[v])
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if n_edge_ends != 2 * (n_vertices - 1):
            return False
    return True


def rooted_tree(g: PrimalGraph, root: str, vertices=None) -> Dict[str, Tuple[str, ...]]:
    """Children map of the primal tree rooted at `root` (one component).

    Raises NonTreeError if BFS meets a cross edge.  When `vertices` is
    given it must be exactly the component of `root`.
    """
    adj = g.adjacency()
    allowed = set(vertices) if vertices is not None else None
    children: Dict[str, Tuple[str, ...]] = {}
    parent = {root: None}
    order = [root]
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        kids = []
        for w in adj[v]:
            if allowed is not None and w not in allowed:
                continue
            if w == parent[v]:
                continue
            if w in parent:
                raise NonTreeError((v, w))
            parent[w] = v
            kids.append(w)
            order.append(w)
        children[v] = tuple(sorted(kids))
    return children


def tree_height(children: Mapping[str, Tuple[str, ...]], root: str) -> int:
    best = 0
    stack = [(root, 0)]
    while stack:
        v, d = stack.pop()
        if d > best:
            best = d
        for c in children[v]:
            stack.append((c, d + 1))
    return best


def subtree_vars(children: Mapping[str, Tuple[str, ...]], root: str) -> FrozenSet[str]:
    out = set()
    stack = [root]
    while stack:
        v = stack.pop()
        out.add(v)
        stack.extend(children[v])
    return frozenset(out)


@dataclass(frozen=True)
class PseudoTree:
    """Rooted forest over all variables guiding the instantiation order."""

    roots: Tuple[str, ...]
    parent: Mapping[str, str]          # absent for roots
    children: Mapping[str, Tuple[str, ...]]
    height: int
    leaf_count: int

    def descendants(self, v: str) -> FrozenSet[str]:
        return subtree_vars(self.children, v)


def _min_height_root(g: PrimalGraph, comp: Tuple[str, ...]) -> str:
    best = None
    for cand in comp:
        children = rooted_tree(g, cand, comp)
        h = tree_height(children, cand)
        key = (h, cand)
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def _centroid_order(g: PrimalGraph, comp: Tuple[str, ...], children_map, pseudo_parent):
    """Centroid decomposition of one component; fills the pseudo maps."""
    adj = g.adjacency()

    def decompose(vertices, pparent):
        vs = set(vertices)
        # subtree sizes via DFS from an arbitrary vertex
        start = min(vs)
        order = [start]
        par = {start: None}
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for w in adj[v]:
                if w in vs and w != par[v]:
                    par[w] = v
                    order.append(w)
        size = {v: 1 for v in vs}
        for v in reversed(order[1:]):
            size[par[v]] += size[v]
        total = len(vs)
        # centroid: max component after removal is <= total // 2
        centroid = None
        for v in sorted(vs):
            worst = total - size[v]
            for w in adj[v]:
                if w in vs and par.get(w) == v:
                    worst = max(worst, size[w])
            if worst <= total // 2:
                centroid = v
                break
        assert centroid is not None
        pseudo_parent[centroid] = pparent
        if pparent is not None:
            children_map.setdefault(pparent, []).append(centroid)
        children_map.setdefault(centroid, [])
        remaining = vs - {centroid}
        # split into components after removing the centroid
        seen = set()
        for v in sorted(remaining):
            if v in seen:
                continue
            stack = [v]
            seen.add(v)
            sub = []
            while stack:
                u = stack.pop()
                sub.append(u)
                for w in adj[u]:
                    if w in remaining and w not in seen:
                        seen.add(w)
                        stack.append(w)
            decompose(sorted(sub), centroid)
        return centroid

    return decompose(comp, None)


def build_pseudo_tree(g: PrimalGraph, strategy: str = "rooted") -> PseudoTree:
    """Pseudo tree (forest) for a forest-shaped primal graph."""
    if strategy not in ("rooted", "balanced"):
        raise ValueError(f"unknown pseudo tree strategy {strategy!r}")
    if not is_tree(g):
        raise NonTreeError(find_cycle(g) or ())
    roots = []
    parent: Dict[str, str] = {}
    children: Dict[str, List[str]] = {}
    for comp in components(g):
        if strategy == "rooted":
            root = _min_height_root(g, comp)
            cmap = rooted_tree(g, root, comp)
            for v, kids in cmap.items():
                children.setdefault(v, []).extend(kids)
                for k in kids:
                    parent[k] = v
            roots.append(root)
        else:
            pseudo_parent: Dict[str, str] = {}
            root = _centroid_order(g, comp, children, pseudo_parent)
            for v, p in pseudo_parent.items():
                if p is not None:
                    parent[v] = p
            roots.append(root)
    children_t = {v: tuple(sorted(children.get(v, ()))) for v in g.vertices}
    height = 0
    leaves = 0
    for r in roots:
        height = max(height, tree_height(children_t, r))
    for v in g.vertices:
        if not children_t[v]:
            leaves += 1
    return PseudoTree(
        roots=tuple(sorted(roots)),
        parent=parent,
        children=children_t,
        height=height,
        leaf_count=leaves,
    )


def ancestor_condition_holds(g: PrimalGraph, pt: PseudoTree) -> bool:
    """Every primal edge connects a vertex to one of its pseudo ancestors."""
    ancestors: Dict[str, set] = {}

    def anc(v):
        if v not in ancestors:
            chain = set()
            cur = pt.parent.get(v)
            while cur is not None:
                chain.add(cur)
                cur = pt.parent.get(cur)
            ancestors[v] = chain
        return ancestors[v]

    for a, b in g.edges:
        if a not in anc(b) and b not in anc(a):
            return False
    return True


class ClauseSpansSubtrees(AssertionError):
    """A clause spans two child subtrees: impossible for tree primal graphs."""

    def __init__(self, clause):
        super().__init__(f"clause spans multiple child subtrees: {clause}")


def partition(theory: Theory, root: str, children: Mapping[str, Tuple[str, ...]]):
    """Split a tree theory around `root` per the rooted children map.

    Returns (edge_theories, subtree_theories, root_unary) where for every
    child c: edge_theories[c] holds the clauses over exactly {root, c}
    plus replicated unary root clauses, and subtree_theories[c] holds the
    clauses strictly inside c's subtree.  root_unary is the Theory of the
    unary clauses over root alone.
    """
    kids = children[root]
    sub_sets = {c: subtree_vars(children, c) for c in kids}
    owner = {}
    for c, vs in sub_sets.items():
        for v in vs:
            owner[v] = c
    edge_clauses = {c: [] for c in kids}
    sub_clauses = {c: [] for c in kids}
    root_unary = []
    for clause in theory.clauses:
        cv = clause_vars(clause)
        if cv == {root}:
            root_unary.append(clause)
        elif root in cv:
            rest = {owner.get(v) for v in cv if v != root}
            if len(rest) != 1 or None in rest:
                raise ClauseSpansSubtrees(clause)
            edge_clauses[rest.pop()].append(clause)
        else:
            rest = {owner.get(v) for v in cv}
            if len(rest) != 1 or None in rest:
                raise ClauseSpansSubtrees(clause)
            sub_clauses[rest.pop()].append(clause)
    edge_theories = {}
    sub_theories = {}
    for c in kids:
        edge_vars = {
            n: v for n, v in theory.variables.items() if n in (root, c)
        }
        edge_theories[c] = Theory(edge_vars, edge_clauses[c] + root_unary)
        svars = {n: v for n, v in theory.variables.items() if n in sub_sets[c]}
        sub_theories[c] = Theory(svars, sub_clauses[c])
    root_theory = Theory(
        {root: theory.variables[root]}, root_unary
    )
    return edge_theories, sub_theories, root_theory
