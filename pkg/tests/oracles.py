"""Independent reference computations used to check the library.

Nothing here imports the code paths under test beyond the plain data model.
"""

from __future__ import annotations

from itertools import combinations, product

from vucfm_kit.model import FeatureKind, FeaturePath, Group, RelationKind, VariabilityModel, walk

CLOSURE = {RelationKind.INCLUDE, RelationKind.EXTEND, RelationKind.COMPOSED_BY, RelationKind.IS_A}


def tree_paths(model: VariabilityModel) -> list[FeaturePath]:
    """Every path by an explicit stack walk."""
    out = []
    stack = [((model.root.name,), model.root)]
    while stack:
        segs, node = stack.pop()
        out.append(FeaturePath(segs))
        for c in node.children:
            stack.append((segs + (c.name,), c))
    return out


def string_prefixes(path: str) -> set[str]:
    parts = path.split(".")
    return {".".join(parts[:i]) for i in range(1, len(parts) + 1)}


def reachability_closure(model: VariabilityModel, seeds) -> set[FeaturePath]:
    """Closure via a boolean transitive-closure matrix (Warshall).

    Edge u -> x for every relation u -> t and every x in subtree(t),
    ancestors(t) or t itself.
    """
    paths = tree_paths(model)
    idx = {p: i for i, p in enumerate(paths)}
    n = len(paths)
    reach = [[False] * n for _ in range(n)]
    for r in model.relations:
        if r.kind not in CLOSURE or r.source not in idx or r.target not in idx:
            continue
        for x in paths:
            t = r.target.segments
            if x.segments[: len(t)] == t or t[: len(x.segments)] == x.segments:
                reach[idx[r.source]][idx[x]] = True
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    seeds = {FeaturePath.of(s) for s in seeds}
    out = set(seeds)
    for s in seeds:
        out |= {paths[j] for j in range(n) if reach[idx[s]][j]}
    return out


def reachable(graph: dict, v) -> set:
    """Nodes reachable from v by one or more edges (self-loops ignored)."""
    seen = set()
    frontier = [w for w in graph.get(v, ()) if w != v]
    while frontier:
        u = frontier.pop()
        if u in seen:
            continue
        seen.add(u)
        frontier.extend(w for w in graph.get(u, ()) if w != u)
    return seen


def cycle_nodes(graph: dict) -> set:
    """Nodes lying on a cycle of length >= 2: v reaches v without self-loops."""
    nodes = set(graph) | {w for ws in graph.values() for w in ws}
    return {v for v in nodes if v in reachable(graph, v)}


def _group(node) -> Group:
    if node.kind in (FeatureKind.USECASE, FeatureKind.VERSION):
        return Group.XOR
    return node.group


def group_shape(model: VariabilityModel) -> dict:
    """Path -> (effective group, child paths), computed once per model."""
    return {p: (_group(n), [p.child(c.name) for c in n.children]) for p, n in walk(model.root)}


def is_configuration(model: VariabilityModel, selected: set[FeaturePath], shape=None) -> bool:
    root = FeaturePath((model.root.name,))
    if root not in selected:
        return False
    if shape is None:
        shape = group_shape(model)
    for p in selected:
        if p not in shape:
            return False
        if p.parent is not None and p.parent not in selected:
            return False
        g, kids = shape[p]
        if not kids:
            continue
        chosen = sum(1 for k in kids if k in selected)
        if g is Group.AND and chosen != len(kids):
            return False
        if g is Group.OR and chosen < 1:
            return False
        if g is Group.XOR and chosen != 1:
            return False
    return True


def brute_force_configurations(model: VariabilityModel) -> set[frozenset[FeaturePath]]:
    """Filter every subset of non-root nodes; only for small trees."""
    paths = tree_paths(model)
    root, rest = paths[0], paths[1:]
    assert len(rest) <= 18, "too many nodes for subset enumeration"
    shape = group_shape(model)
    out = set()
    for mask in range(1 << len(rest)):
        sel = {root} | {p for i, p in enumerate(rest) if mask >> i & 1}
        if is_configuration(model, sel, shape):
            out.add(frozenset(sel))
    return out


def recursive_configurations(model: VariabilityModel) -> set[frozenset[FeaturePath]]:
    """Exhaustive recursion choosing child subsets with combinations()."""

    def go(node, segs):
        here = frozenset({FeaturePath(segs)})
        if not node.children:
            return [here]
        kids = [(c, go(c, segs + (c.name,))) for c in node.children]
        g = _group(node)
        n = len(kids)
        if g is Group.AND:
            sizes = [n]
        elif g is Group.OR:
            sizes = range(1, n + 1)
        else:
            sizes = [1]
        results = []
        for k in sizes:
            for subset in combinations(kids, k):
                for parts in product(*(opts for _, opts in subset)):
                    results.append(here.union(*parts))
        return results

    return set(go(model.root, (model.root.name,)))
