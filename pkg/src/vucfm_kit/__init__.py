"""Toolchain for variable use-case feature models with versions and revisions.

Parse the ``.vucfm`` language, validate models, derive applications-family
and specific-application models, and export use case diagrams.
"""

from vucfm_kit.analysis import Configuration, count_configurations, enumerate_configurations
from vucfm_kit.derivation import (
    DerivationError,
    derive_family,
    derive_specific,
    relation_closure,
    select_sucfm,
    select_vaucfm,
)
from vucfm_kit.diagnostics import Diagnostic, Severity, SourcePosition
from vucfm_kit.dsl import ParseError, parse, parse_file, serialize
from vucfm_kit.export import UseCaseDiagram, render_dot, render_plantuml, to_usecase_diagram
from vucfm_kit.model import (
    Actor,
    Attribute,
    CrossRelation,
    FeatureKind,
    FeatureNode,
    FeaturePath,
    Group,
    LevelKind,
    ModelLevel,
    RelationKind,
    VariabilityModel,
    ancestors,
    model_equal,
    resolve,
    subtree,
)
from vucfm_kit.validator import assert_level, validate

__version__ = "0.1.0"

__all__ = [
    "Actor", "Attribute", "Configuration", "CrossRelation", "DerivationError", "Diagnostic",
    "FeatureKind", "FeatureNode", "FeaturePath", "Group", "LevelKind", "ModelLevel", "ParseError",
    "RelationKind", "Severity", "SourcePosition", "UseCaseDiagram", "VariabilityModel",
    "ancestors", "assert_level", "count_configurations", "derive_family", "derive_specific",
    "enumerate_configurations", "model_equal", "parse", "parse_file", "relation_closure",
    "render_dot", "render_plantuml", "resolve", "select_sucfm", "select_vaucfm", "serialize",
    "subtree", "to_usecase_diagram", "validate",
]
