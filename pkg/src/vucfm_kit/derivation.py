"""Family and specific model derivation.

Both selections take a feature F and keep the root-to-F spine (each spine
node keeping only its on-path child), the whole subtree of F, and whatever
F's selection pulls in through include / extend / composed-by / is-a.
"""

from __future__ import annotations

import re
from dataclasses import replace
from typing import Iterable, Optional

from vucfm_kit.diagnostics import Diagnostic, DiagnosticError, has_errors
from vucfm_kit.model import (
    CLOSURE_KINDS,
    CrossRelation,
    FeatureKind,
    FeaturePath,
    LevelKind,
    ModelLevel,
    PathLike,
    RelationKind,
    VariabilityModel,
    ancestors,
    prune,
    resolve,
    subtree,
)
from vucfm_kit.validator import validate


class DerivationError(DiagnosticError):
    """A selection algorithm rejected its input (D-series codes)."""

    @property
    def diagnostic(self) -> Diagnostic:
        return self.diagnostics[0]


def _error(code: str, message: str) -> DerivationError:
    return DerivationError([Diagnostic.error(code, message)])


def relation_closure(model: VariabilityModel, seeds: Iterable[PathLike]) -> set[FeaturePath]:
    """Least fixpoint of the seeds under source->target closure relations.

    Each pulled-in target brings its full subtree and its ancestors. Seeds
    themselves are not expanded.
    """
    selected: set[FeaturePath] = set()
    for s in seeds:
        p = FeaturePath.of(s)
        if resolve(model, p) is None:
            raise _error("D002", f"feature {p} not found in model {model.name}")
        selected.add(p)

    outgoing: dict[FeaturePath, list[FeaturePath]] = {}
    for rel in model.relations:
        if rel.kind in CLOSURE_KINDS and resolve(model, rel.target) is not None:
            outgoing.setdefault(rel.source, []).append(rel.target)

    work = sorted(selected)
    while work:
        p = work.pop()
        for target in outgoing.get(p, ()):
            added = subtree(model, target) | set(target.prefixes())
            fresh = added - selected
            selected |= fresh
            work.extend(fresh)
    return selected


_NUMBERED = {FeatureKind.VERSION: "Version", FeatureKind.REVISION: "Revision"}


def derived_name(model: VariabilityModel, feature: FeaturePath, base: Optional[str] = None) -> str:
    """Output model name in the ``Version2-Stack`` style.

    A version or revision named like ``V2``/``R2`` is spelled out and suffixed
    with ``base`` (default: its parent's name).
    """
    node = resolve(model, feature)
    leaf = feature.leaf
    prefix = _NUMBERED.get(node.kind) if node is not None else None
    if prefix is None:
        return leaf
    m = re.fullmatch(r"[A-Za-z](\d+)", leaf)
    word = f"{prefix}{m.group(1)}" if m else leaf
    if base is None:
        base = feature.parent.leaf if feature.parent is not None else model.name
    return f"{word}-{base}"


def _select(
    model: VariabilityModel, feature: FeaturePath, name: str, level: ModelLevel
) -> tuple[VariabilityModel, list[Diagnostic]]:
    spine = set(ancestors(model, feature))
    selected = relation_closure(model, spine | subtree(model, feature))

    def kept(endpoint: FeaturePath) -> bool:
        return endpoint in selected or (model.is_actor_endpoint(endpoint) and endpoint.leaf in actor_names)

    actor_names: set[str] = set()
    for rel in model.relations:
        if rel.kind.is_interact:
            for a, f in ((rel.source, rel.target), (rel.target, rel.source)):
                if model.is_actor_endpoint(a) and f in selected:
                    actor_names.add(a.leaf)

    warnings: list[Diagnostic] = []
    relations: list[CrossRelation] = []
    for rel in model.relations:
        if kept(rel.source) and kept(rel.target):
            relations.append(rel)
        elif rel.kind is RelationKind.IMPORT and rel.source in selected:
            warnings.append(Diagnostic.warning(
                "D006", f"import {rel.target} of {rel.source} dropped: target not selected", rel.pos))

    out = VariabilityModel(
        name=name,
        level=level,
        root=prune(model.root, selected),
        actors=tuple(a for a in model.actors if a.name in actor_names),
        relations=tuple(relations),
        pos=model.pos,
    )
    return out, warnings


def derive_family(
    domain: VariabilityModel, feature: PathLike, *, check_level: bool = True
) -> tuple[VariabilityModel, list[Diagnostic]]:
    """Family selection; returns the model plus any D-series warnings."""
    if check_level and domain.level.kind is not LevelKind.DOMAIN:
        raise _error("D003", f"family derivation needs a domain model; {domain.name} is '{domain.level}'")
    path = FeaturePath.of(feature)
    node = resolve(domain, path)
    if node is None:
        raise _error("D002", f"feature {path} not found in model {domain.name}")
    if node.kind is FeatureKind.REVISION:
        raise _error("D001", f"feature {path} is a revision; a family is selected by use case, version or feature")
    return _select(domain, path, derived_name(domain, path), ModelLevel.family(domain.name))


def derive_specific(
    family: VariabilityModel, revision: PathLike, *, check_level: bool = True
) -> tuple[VariabilityModel, list[Diagnostic]]:
    """Specific selection; returns the model plus any D-series warnings."""
    if check_level and family.level.kind is not LevelKind.FAMILY:
        raise _error("D005", f"specific derivation needs a family model; {family.name} is '{family.level}'")
    path = FeaturePath.of(revision)
    node = resolve(family, path)
    if node is None:
        raise _error("D002", f"feature {path} not found in model {family.name}")
    if node.kind is not FeatureKind.REVISION:
        raise _error("D004", f"feature {path} is a {node.kind.value}, not a revision")
    out, warnings = _select(family, path, derived_name(family, path, family.name), ModelLevel.specific(family.name))
    conflicts = [d for d in validate(out) if d.code == "V012"]
    if conflicts:
        # closure pulled in a second version/revision of some use case
        raise DerivationError(
            [Diagnostic.error("D007", f"selection of {path} is not a single product: {d.message}") for d in conflicts]
        )
    return out, warnings


def select_vaucfm(domain: VariabilityModel, feature: PathLike, *, check_level: bool = True) -> VariabilityModel:
    return derive_family(domain, feature, check_level=check_level)[0]


def select_sucfm(family: VariabilityModel, revision: PathLike, *, check_level: bool = True) -> VariabilityModel:
    return derive_specific(family, revision, check_level=check_level)[0]


def retag(model: VariabilityModel, level: ModelLevel, name: Optional[str] = None) -> VariabilityModel:
    return replace(model, level=level, name=name if name is not None else model.name)


def is_clean(model: VariabilityModel) -> bool:
    return not has_errors(validate(model))
