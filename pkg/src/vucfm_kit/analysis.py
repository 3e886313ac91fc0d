"""Configuration-space semantics of and/or/xor groups.

A configuration is a set of selected features containing the root, closed
under parenthood, and satisfying the group of every selected node. For a
realized product, use case -> version and version -> revision edges behave
as xor. Cross-tree relations place no constraint on configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Optional

from vucfm_kit.diagnostics import DiagnosticError, has_errors
from vucfm_kit.model import FeatureKind, FeatureNode, FeaturePath, Group, VariabilityModel
from vucfm_kit.validator import validate


class InvalidModelError(DiagnosticError):
    """The model has validation errors and cannot be analysed."""


@dataclass(frozen=True)
class Configuration:
    selected: frozenset[FeaturePath]

    def sorted_paths(self) -> list[str]:
        return sorted(str(p) for p in self.selected)

    def __str__(self) -> str:
        return ",".join(self.sorted_paths())


def effective_group(node: FeatureNode) -> Group:
    if node.kind in (FeatureKind.USECASE, FeatureKind.VERSION):
        return Group.XOR
    return node.group


def _check(model: VariabilityModel) -> None:
    diags = validate(model)
    if has_errors(diags):
        raise InvalidModelError([d for d in diags if d.is_error])


def _count(node: FeatureNode) -> int:
    if not node.children:
        return 1
    counts = [_count(c) for c in node.children]
    group = effective_group(node)
    if group is Group.AND:
        return math.prod(counts)
    if group is Group.OR:
        return math.prod(c + 1 for c in counts) - 1
    return sum(counts)


def count_configurations(model: VariabilityModel) -> int:
    _check(model)
    return _count(model.root)


def _configs(node: FeatureNode, path: FeaturePath, rank: dict[FeaturePath, int]) -> list[frozenset[int]]:
    here = rank[path]
    if not node.children:
        return [frozenset({here})]
    per_child = [_configs(c, path.child(c.name), rank) for c in node.children]
    group = effective_group(node)
    out: list[frozenset[int]] = []
    if group is Group.XOR:
        for options in per_child:
            out.extend(options)
    else:
        # each child either absent (None) or one of its configurations
        choices = [opts if group is Group.AND else [None, *opts] for opts in per_child]
        for combo in product(*choices):
            parts = [c for c in combo if c is not None]
            if parts:
                out.append(frozenset().union(*parts))
    return [c | {here} for c in out]


def enumerate_configurations(model: VariabilityModel, limit: Optional[int] = None) -> list[Configuration]:
    """All configurations, ordered by their sorted path lists, truncated at ``limit``."""
    if limit is not None and limit < 1:
        raise ValueError("limit must be positive")
    _check(model)
    # ranks follow path text order, so sorted rank tuples compare like sorted path lists
    ordered = sorted(model.index, key=str)
    rank = {p: i for i, p in enumerate(ordered)}
    raw = _configs(model.root, FeaturePath((model.root.name,)), rank)
    raw.sort(key=sorted)
    if limit is not None:
        raw = raw[:limit]
    return [Configuration(frozenset(ordered[i] for i in c)) for c in raw]
