"""Semantic checks that the grammar cannot express."""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping, Optional, Sequence, TypeVar

from vucfm_kit.diagnostics import Diagnostic, sort_diagnostics
from vucfm_kit.model import (
    FeatureKind,
    FeaturePath,
    Group,
    LevelKind,
    ModelLevel,
    RelationKind,
    VariabilityModel,
    resolve,
    walk,
)

N = TypeVar("N", bound=Hashable)

# (code, relation kinds whose union must stay acyclic)
CYCLE_CHECKS: Sequence[tuple[str, frozenset[RelationKind]]] = (
    ("V007", frozenset({RelationKind.IS_A})),
    ("V008", frozenset({RelationKind.COMPOSED_BY})),
    ("V009", frozenset({RelationKind.INCLUDE, RelationKind.EXTEND})),
    ("V010", frozenset({RelationKind.IMPORT})),
)
FEATURE_FEATURE_KINDS = frozenset(
    {RelationKind.IS_A, RelationKind.INCLUDE, RelationKind.EXTEND, RelationKind.COMPOSED_BY}
)

_PARENT_KIND = {
    FeatureKind.VERSION: FeatureKind.USECASE,
    FeatureKind.REVISION: FeatureKind.VERSION,
}


def find_cycles(graph: Mapping[N, Iterable[N]]) -> list[list[N]]:
    """One concrete cycle per strongly connected component that has one.

    Self-loops are ignored. Nodes are visited in sorted order so the result
    is deterministic. Iterative Tarjan, so deep graphs do not hit the
    recursion limit.
    """
    succ = {v: sorted(set(ws) - {v}) for v, ws in graph.items()}
    for ws in list(succ.values()):
        for w in ws:
            succ.setdefault(w, [])
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    sccs: list[list] = []
    counter = 0
    for root in sorted(succ):
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1:
                    sccs.append(comp)
    return [_cycle_in(succ, set(comp)) for comp in sorted(sccs, key=min)]


def _cycle_in(succ: Mapping, comp: set) -> list:
    """Walk inside a strongly connected component until a node repeats."""
    start = min(comp)
    path = [start]
    seen = {start: 0}
    v = start
    while True:
        v = next(w for w in succ[v] if w in comp)
        if v in seen:
            return path[seen[v]:]
        seen[v] = len(path)
        path.append(v)


def validate(model: VariabilityModel) -> list[Diagnostic]:
    """All semantic diagnostics, ordered by position then code."""
    diags: list[Diagnostic] = []
    _check_tree(model, diags)
    _check_actors(model, diags)
    _check_relations(model, diags)
    _check_cycles(model, diags)
    if model.level.kind is LevelKind.SPECIFIC:
        _check_specific(model, diags)
    return sort_diagnostics(diags)


def _check_tree(model: VariabilityModel, diags: list[Diagnostic]) -> None:
    parents: dict[FeaturePath, FeatureKind] = {}
    for path, node in walk(model.root):
        parent = path.parent
        pkind = parents.get(parent) if parent is not None else None
        parents[path] = node.kind
        expected_parent = _PARENT_KIND.get(node.kind)
        if expected_parent is not None and pkind is not expected_parent:
            diags.append(Diagnostic.error(
                "V015", f"{node.kind.value} {path} must be a child of a {expected_parent.value}", node.pos))
        elif node.kind is FeatureKind.USECASE and parent != FeaturePath((model.root.name,)):
            diags.append(Diagnostic.error("V015", f"use case {path} must be a top-level feature", node.pos))
        elif node.kind is FeatureKind.PLAIN and pkind in (FeatureKind.USECASE, FeatureKind.VERSION):
            diags.append(Diagnostic.error(
                "V015", f"feature {path} cannot be a direct child of a {pkind.value}", node.pos))
        if path.parent is None and node.kind is not FeatureKind.PLAIN:
            diags.append(Diagnostic.error("V015", f"root {path} must be a plain feature", node.pos))

        names = [c.name for c in node.children]
        for dup in sorted({n for n in names if names.count(n) > 1}):
            diags.append(Diagnostic.error("V016", f"duplicate child name '{dup}' under {path}", node.pos))
        attr_names = [a.name for a in node.attributes]
        if len(set(attr_names)) != len(attr_names):
            diags.append(Diagnostic.error("V016", f"duplicate attribute name on {path}", node.pos))

        if node.kind is FeatureKind.USECASE and not any(c.kind is FeatureKind.VERSION for c in node.children):
            diags.append(Diagnostic.error("V001", f"use case {path} has no version", node.pos))
        if node.kind is FeatureKind.VERSION and not any(c.kind is FeatureKind.REVISION for c in node.children):
            diags.append(Diagnostic.error("V002", f"version {path} has no revision", node.pos))
        if node.group in (Group.OR, Group.XOR) and len(node.children) < 2:
            diags.append(Diagnostic.warning(
                "V013", f"{node.group.value} group on {path} has {len(node.children)} child(ren)", node.pos))


def _check_actors(model: VariabilityModel, diags: list[Diagnostic]) -> None:
    seen: set[str] = set()
    for actor in model.actors:
        if actor.name in seen:
            diags.append(Diagnostic.error("V014", f"duplicate actor '{actor.name}'", actor.pos))
        seen.add(actor.name)
        if actor.name == model.root.name:
            diags.append(Diagnostic.error(
                "V014", f"actor '{actor.name}' clashes with the root feature name", actor.pos))
        attr_names = [a.name for a in actor.attributes]
        if len(set(attr_names)) != len(attr_names):
            diags.append(Diagnostic.error("V016", f"duplicate attribute name on actor {actor.name}", actor.pos))


def _endpoint(model: VariabilityModel, p: FeaturePath) -> tuple[str, Optional[FeatureKind]]:
    if model.is_actor_endpoint(p):
        return "actor", None
    node = resolve(model, p)
    if node is None:
        return "missing", None
    return "feature", node.kind


def _check_relations(model: VariabilityModel, diags: list[Diagnostic]) -> None:
    for rel in model.relations:
        if rel.source == rel.target:
            diags.append(Diagnostic.error("V011", f"self-relation: {rel}", rel.pos))
            continue
        (skind, snode), (tkind, tnode) = _endpoint(model, rel.source), _endpoint(model, rel.target)
        missing = [str(p) for p, k in ((rel.source, skind), (rel.target, tkind)) if k == "missing"]
        if missing:
            diags.append(Diagnostic.error(
                "V003", f"unresolved endpoint {', '.join(missing)} in relation {rel}", rel.pos))
            continue
        if rel.kind.is_interact:
            if sorted((skind, tkind)) != ["actor", "feature"]:
                diags.append(Diagnostic.error(
                    "V004", f"{rel.kind.value} must join one actor and one feature: {rel}", rel.pos))
        elif rel.kind in FEATURE_FEATURE_KINDS:
            if skind != "feature" or tkind != "feature":
                diags.append(Diagnostic.error(
                    "V005", f"{rel.kind.value} must join two features: {rel}", rel.pos))
        elif rel.kind is RelationKind.IMPORT:
            if snode is not FeatureKind.REVISION or tnode not in (FeatureKind.VERSION, FeatureKind.REVISION):
                diags.append(Diagnostic.error(
                    "V006", f"import must go from a revision to a version or revision: {rel}", rel.pos))


def _check_cycles(model: VariabilityModel, diags: list[Diagnostic]) -> None:
    for code, kinds in CYCLE_CHECKS:
        graph: dict[FeaturePath, set[FeaturePath]] = {}
        first_pos: dict[FeaturePath, object] = {}
        for rel in model.relations:
            if rel.kind in kinds:
                graph.setdefault(rel.source, set()).add(rel.target)
                first_pos.setdefault(rel.source, rel.pos)
        label = "/".join(sorted(k.value for k in kinds))
        for cycle in find_cycles(graph):
            text = " -> ".join(str(p) for p in cycle + [cycle[0]])
            diags.append(Diagnostic.error(code, f"{label} cycle: {text}", first_pos.get(cycle[0])))


def _check_specific(model: VariabilityModel, diags: list[Diagnostic]) -> None:
    for path, node in walk(model.root):
        if node.kind is not FeatureKind.USECASE:
            continue
        versions = [c for c in node.children if c.kind is FeatureKind.VERSION]
        revisions = [r for v in versions for r in v.children if r.kind is FeatureKind.REVISION]
        if len(versions) != 1 or len(revisions) != 1:
            diags.append(Diagnostic.error(
                "V012",
                f"specific model must fix one version and one revision of {path}; "
                f"found {len(versions)} version(s), {len(revisions)} revision(s)",
                node.pos,
            ))


def assert_level(model: VariabilityModel, expected: LevelKind | ModelLevel) -> Optional[Diagnostic]:
    """``None`` when the level tag matches, else a V020 diagnostic."""
    kind = expected.kind if isinstance(expected, ModelLevel) else expected
    if model.level.kind is kind:
        return None
    return Diagnostic.error(
        "V020", f"model {model.name} is at level '{model.level}', expected '{kind.value}'", model.pos)
