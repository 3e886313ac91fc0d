"""UML use-case diagrams from specific-level models, rendered as DOT or PlantUML.

Use cases are the features that interact with an actor. Composition is
not drawn; pass ``clusters=True`` to a renderer to group use cases by
their parent feature instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from vucfm_kit.diagnostics import Diagnostic, DiagnosticError
from vucfm_kit.model import FeaturePath, LevelKind, RelationKind, VariabilityModel, resolve

EDGE_KINDS = ("in", "out", "inout", "include", "extend", "is-a")
_ACTOR_EDGE = {
    RelationKind.IN_INTERACT: "in",
    RelationKind.OUT_INTERACT: "out",
    RelationKind.INOUT_INTERACT: "inout",
}
_USECASE_EDGE = {
    RelationKind.INCLUDE: "include",
    RelationKind.EXTEND: "extend",
    RelationKind.IS_A: "is-a",
}


class ExportError(DiagnosticError):
    pass


@dataclass(frozen=True)
class DiagramActor:
    id: str
    name: str


@dataclass(frozen=True)
class DiagramUseCase:
    id: str
    name: str
    group: Optional[str] = None  # display name of the parent feature


@dataclass(frozen=True)
class DiagramEdge:
    source: str
    target: str
    kind: str


@dataclass
class UseCaseDiagram:
    actors: list[DiagramActor] = field(default_factory=list)
    usecases: list[DiagramUseCase] = field(default_factory=list)
    edges: list[DiagramEdge] = field(default_factory=list)
    warnings: list[Diagnostic] = field(default_factory=list, compare=False)

    def node_ids(self) -> set[str]:
        return {a.id for a in self.actors} | {u.id for u in self.usecases}


def sanitize(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "_", text)


def _unique_ids(raw: dict, prefix: str) -> dict:
    """Map keys to sanitized ids, suffixing a counter when sanitizing collides."""
    out: dict = {}
    taken: set[str] = set()
    for key in sorted(raw, key=str):
        base = prefix + sanitize(str(raw[key]))
        ident, n = base, 2
        while ident in taken:
            ident, n = f"{base}_{n}", n + 1
        taken.add(ident)
        out[key] = ident
    return out


def to_usecase_diagram(specific: VariabilityModel) -> UseCaseDiagram:
    if specific.level.kind is not LevelKind.SPECIFIC:
        raise ExportError([Diagnostic.error(
            "V020", f"only specific models convert to use case diagrams; {specific.name} is '{specific.level}'")])

    actor_names: set[str] = set()
    features: set[FeaturePath] = set()
    interactions: list[tuple[str, FeaturePath, str]] = []
    for rel in specific.relations:
        if not rel.kind.is_interact:
            continue
        for a, f in ((rel.source, rel.target), (rel.target, rel.source)):
            if specific.is_actor_endpoint(a) and resolve(specific, f) is not None:
                actor_names.add(a.leaf)
                features.add(f)
                interactions.append((a.leaf, f, _ACTOR_EDGE[rel.kind]))
                break

    leaves: dict[str, int] = {}
    for f in features:
        leaves[f.leaf] = leaves.get(f.leaf, 0) + 1

    def display(f: FeaturePath) -> str:
        if leaves[f.leaf] > 1 and f.parent is not None:
            return f"{f.leaf} ({f.parent.leaf})"
        return f.leaf

    actor_ids = _unique_ids({n: n for n in actor_names}, "actor_")
    uc_ids = _unique_ids({f: f for f in features}, "uc_")

    diagram = UseCaseDiagram()
    diagram.actors = sorted((DiagramActor(actor_ids[n], n) for n in actor_names), key=lambda a: a.id)
    diagram.usecases = sorted(
        (DiagramUseCase(uc_ids[f], display(f), f.parent.leaf if f.parent else None) for f in features),
        key=lambda u: u.id,
    )
    edges = {DiagramEdge(actor_ids[a], uc_ids[f], kind) for a, f, kind in interactions}
    for rel in specific.relations:
        kind = _USECASE_EDGE.get(rel.kind)
        if kind and rel.source in uc_ids and rel.target in uc_ids:
            edges.add(DiagramEdge(uc_ids[rel.source], uc_ids[rel.target], kind))
    diagram.edges = sorted(edges, key=lambda e: (e.source, e.target, e.kind))
    if not diagram.usecases:
        diagram.warnings.append(Diagnostic.warning(
            "X001", f"model {specific.name} has no feature interacting with an actor; diagram is empty"))
    return diagram


def _dq(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


_DOT_EDGE_ATTRS = {
    "in": "",
    "out": "",
    "inout": " [dir=both]",
    "include": ' [style=dashed, label="<<include>>"]',
    "extend": ' [style=dashed, label="<<extend>>"]',
    "is-a": " [arrowhead=empty]",
}


def _groups(d: UseCaseDiagram) -> dict[str, list[DiagramUseCase]]:
    groups: dict[str, list[DiagramUseCase]] = {}
    for u in d.usecases:
        groups.setdefault(u.group or "", []).append(u)
    return dict(sorted(groups.items()))


def render_dot(d: UseCaseDiagram, clusters: bool = False) -> str:
    lines = ["digraph usecase {"]
    for a in sorted(d.actors, key=lambda a: a.id):
        lines.append(f"  {_dq(a.id)} [label={_dq(a.name)}, shape=box];")

    def uc_line(u: DiagramUseCase, pad: str) -> str:
        return f"{pad}{_dq(u.id)} [label={_dq(u.name)}, shape=ellipse];"

    if clusters:
        for i, (group, members) in enumerate(_groups(d).items(), 1):
            if not group:
                lines.extend(uc_line(u, "  ") for u in members)
                continue
            lines.append(f"  subgraph cluster_{i} {{")
            lines.append(f"    label={_dq(group)};")
            lines.extend(uc_line(u, "    ") for u in members)
            lines.append("  }")
    else:
        lines.extend(uc_line(u, "  ") for u in sorted(d.usecases, key=lambda u: u.id))

    for e in sorted(d.edges, key=lambda e: (e.source, e.target, e.kind)):
        src, dst = (e.target, e.source) if e.kind == "out" else (e.source, e.target)
        lines.append(f"  {_dq(src)} -> {_dq(dst)}{_DOT_EDGE_ATTRS[e.kind]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_PUML_ARROW = {"in": "-->", "out": "<--", "inout": "<-->", "is-a": "--|>"}


def render_plantuml(d: UseCaseDiagram, clusters: bool = False) -> str:
    lines = ["@startuml"]
    alias: dict[str, str] = {}
    for i, a in enumerate(sorted(d.actors, key=lambda a: a.id), 1):
        alias[a.id] = f"A{i}"
        lines.append(f"actor {_dq(a.name)} as A{i}")
    usecases = sorted(d.usecases, key=lambda u: u.id)
    for i, u in enumerate(usecases, 1):
        alias[u.id] = f"UC{i}"

    if clusters:
        for group, members in _groups(d).items():
            pad = "  " if group else ""
            if group:
                lines.append(f"package {_dq(group)} {{")
            lines.extend(f"{pad}usecase {_dq(u.name)} as {alias[u.id]}" for u in members)
            if group:
                lines.append("}")
    else:
        lines.extend(f"usecase {_dq(u.name)} as {alias[u.id]}" for u in usecases)

    for e in sorted(d.edges, key=lambda e: (e.source, e.target, e.kind)):
        src, dst = alias[e.source], alias[e.target]
        if e.kind in ("include", "extend"):
            lines.append(f"{src} ..> {dst} : <<{e.kind}>>")
        else:
            lines.append(f"{src} {_PUML_ARROW[e.kind]} {dst}")
    lines.append("@enduml")
    return "\n".join(lines) + "\n"
