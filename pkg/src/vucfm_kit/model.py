"""In-memory representation of variable use-case feature models.

A model is one feature tree (root, use cases, versions, revisions, plain
features) plus a flat list of actors and typed cross-tree relations.
Everything here is immutable once built; derivations produce new models.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Optional, Union

from vucfm_kit.diagnostics import SourcePosition


class FeatureKind(enum.Enum):
    USECASE = "usecase"
    VERSION = "version"
    REVISION = "revision"
    PLAIN = "feature"


class Group(enum.Enum):
    """Decomposition group of a node's direct children."""

    AND = "and"
    OR = "or"
    XOR = "xor"


class RelationKind(enum.Enum):
    IS_A = "is-a"
    INCLUDE = "include"
    EXTEND = "extend"
    COMPOSED_BY = "composed-by"
    IN_INTERACT = "in-interact"
    OUT_INTERACT = "out-interact"
    INOUT_INTERACT = "inout-interact"
    IMPORT = "import"

    @property
    def is_interact(self) -> bool:
        return self in INTERACT_KINDS


INTERACT_KINDS = frozenset(
    {RelationKind.IN_INTERACT, RelationKind.OUT_INTERACT, RelationKind.INOUT_INTERACT}
)
# Relations that pull their target into a derived model.
CLOSURE_KINDS = frozenset(
    {RelationKind.INCLUDE, RelationKind.EXTEND, RelationKind.COMPOSED_BY, RelationKind.IS_A}
)


class LevelKind(enum.Enum):
    DOMAIN = "domain"
    FAMILY = "family"
    SPECIFIC = "specific"


@dataclass(frozen=True)
class ModelLevel:
    kind: LevelKind
    of: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.kind is LevelKind.DOMAIN) != (self.of is None):
            raise ValueError("only family/specific levels name the model they derive from")

    @classmethod
    def domain(cls) -> ModelLevel:
        return cls(LevelKind.DOMAIN)

    @classmethod
    def family(cls, of: str) -> ModelLevel:
        return cls(LevelKind.FAMILY, of)

    @classmethod
    def specific(cls, of: str) -> ModelLevel:
        return cls(LevelKind.SPECIFIC, of)

    def __str__(self) -> str:
        if self.of is None:
            return self.kind.value
        return f"{self.kind.value} of {self.of}"


@dataclass(frozen=True, order=True)
class FeaturePath:
    """Absolute, root-anchored path; textual form is dot-joined."""

    segments: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.segments or any(not s or "." in s for s in self.segments):
            raise ValueError(f"malformed feature path: {self.segments!r}")
        # paths are hashed constantly during derivation and enumeration
        object.__setattr__(self, "_hash", hash(self.segments))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def parse(cls, text: str) -> FeaturePath:
        return cls(tuple(text.split(".")))

    @classmethod
    def of(cls, value: PathLike) -> FeaturePath:
        if isinstance(value, FeaturePath):
            return value
        return cls.parse(value)

    def __str__(self) -> str:
        return ".".join(self.segments)

    def __repr__(self) -> str:
        return f"FeaturePath({str(self)!r})"

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def leaf(self) -> str:
        return self.segments[-1]

    @property
    def parent(self) -> Optional[FeaturePath]:
        if len(self.segments) == 1:
            return None
        return FeaturePath(self.segments[:-1])

    def child(self, name: str) -> FeaturePath:
        return FeaturePath(self.segments + (name,))

    def prefixes(self) -> list[FeaturePath]:
        """All proper prefixes, root first."""
        return [FeaturePath(self.segments[:i]) for i in range(1, len(self.segments))]

    def is_prefix_of(self, other: FeaturePath) -> bool:
        return other.segments[: len(self.segments)] == self.segments


PathLike = Union[FeaturePath, str]


@dataclass(frozen=True)
class Attribute:
    name: str
    value: str


@dataclass(frozen=True)
class FeatureNode:
    name: str
    kind: FeatureKind = FeatureKind.PLAIN
    attributes: tuple[Attribute, ...] = ()
    group: Group = Group.AND
    children: tuple[FeatureNode, ...] = ()
    pos: Optional[SourcePosition] = field(default=None, compare=False, repr=False)

    def child(self, name: str) -> Optional[FeatureNode]:
        for c in self.children:
            if c.name == name:
                return c
        return None

    def attribute(self, name: str) -> Optional[str]:
        for a in self.attributes:
            if a.name == name:
                return a.value
        return None


@dataclass(frozen=True)
class Actor:
    name: str
    attributes: tuple[Attribute, ...] = ()
    pos: Optional[SourcePosition] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class CrossRelation:
    """Typed edge between two endpoints.

    Endpoints are feature paths; an actor endpoint is a one-segment path
    naming the actor.
    """

    source: FeaturePath
    kind: RelationKind
    target: FeaturePath
    pos: Optional[SourcePosition] = field(default=None, compare=False, repr=False)

    def sort_key(self) -> tuple:
        return (self.source, self.kind.value, self.target)

    def __str__(self) -> str:
        return f"{self.source} {self.kind.value} {self.target}"


@dataclass(frozen=True)
class VariabilityModel:
    name: str
    level: ModelLevel
    root: FeatureNode
    actors: tuple[Actor, ...] = ()
    relations: tuple[CrossRelation, ...] = ()
    pos: Optional[SourcePosition] = field(default=None, compare=False, repr=False)

    @cached_property
    def index(self) -> dict[FeaturePath, FeatureNode]:
        """Every feature path in pre-order, mapped to its node."""
        out: dict[FeaturePath, FeatureNode] = {}
        for path, node in walk(self.root):
            out.setdefault(path, node)
        return out

    @cached_property
    def actor_names(self) -> frozenset[str]:
        return frozenset(a.name for a in self.actors)

    def actor(self, name: str) -> Optional[Actor]:
        for a in self.actors:
            if a.name == name:
                return a
        return None

    def is_actor_endpoint(self, endpoint: FeaturePath) -> bool:
        return len(endpoint) == 1 and endpoint.leaf in self.actor_names and endpoint.leaf != self.root.name

    def paths(self, kind: Optional[FeatureKind] = None) -> list[FeaturePath]:
        return [p for p, n in self.index.items() if kind is None or n.kind is kind]

    def kind_of(self, path: PathLike) -> Optional[FeatureKind]:
        node = resolve(self, path)
        return node.kind if node is not None else None


class PathError(LookupError):
    """A feature path did not resolve in the model."""

    def __init__(self, path: PathLike, model: str) -> None:
        super().__init__(f"path {path} does not resolve in model {model}")
        self.path = FeaturePath.of(path)


def walk(node: FeatureNode, prefix: Optional[FeaturePath] = None) -> Iterator[tuple[FeaturePath, FeatureNode]]:
    """Pre-order traversal yielding (path, node)."""
    path = prefix.child(node.name) if prefix is not None else FeaturePath((node.name,))
    yield path, node
    for c in node.children:
        yield from walk(c, path)


def resolve(model: VariabilityModel, path: PathLike) -> Optional[FeatureNode]:
    try:
        path = FeaturePath.of(path)
    except ValueError:
        return None
    if path.segments[0] != model.root.name:
        return None
    node: Optional[FeatureNode] = model.root
    for seg in path.segments[1:]:
        node = node.child(seg)
        if node is None:
            return None
    return node


def _require(model: VariabilityModel, path: PathLike) -> tuple[FeaturePath, FeatureNode]:
    p = FeaturePath.of(path)
    node = resolve(model, p)
    if node is None:
        raise PathError(p, model.name)
    return p, node


def subtree(model: VariabilityModel, path: PathLike) -> set[FeaturePath]:
    """The path itself and all its transitive descendants."""
    p, node = _require(model, path)
    return {q for q, _ in walk(node, p.parent)}


def ancestors(model: VariabilityModel, path: PathLike) -> list[FeaturePath]:
    """Root-to-parent chain, excluding the path itself."""
    p, _ = _require(model, path)
    return p.prefixes()


def endpoint_resolves(model: VariabilityModel, endpoint: FeaturePath) -> bool:
    return model.is_actor_endpoint(endpoint) or resolve(model, endpoint) is not None


def _canonical_node(node: FeatureNode) -> tuple:
    return (
        node.name,
        node.kind,
        node.group,
        frozenset(node.attributes),
        frozenset(_canonical_node(c) for c in node.children),
    )


def canonical_form(model: VariabilityModel) -> tuple:
    """Order-insensitive structural key; equal keys mean model_equal."""
    return (
        model.name,
        model.level,
        _canonical_node(model.root),
        frozenset((a.name, frozenset(a.attributes)) for a in model.actors),
        frozenset(model.relations),
    )


def model_equal(a: VariabilityModel, b: VariabilityModel) -> bool:
    return canonical_form(a) == canonical_form(b)


def prune(node: FeatureNode, keep: set[FeaturePath], prefix: Optional[FeaturePath] = None) -> FeatureNode:
    """Copy of ``node`` keeping only descendants whose paths are in ``keep``.

    ``keep`` must be closed under parenthood for the result to be meaningful.
    """
    path = prefix.child(node.name) if prefix is not None else FeaturePath((node.name,))
    kids = tuple(prune(c, keep, path) for c in node.children if path.child(c.name) in keep)
    return replace(node, children=kids)


def iter_relations(model: VariabilityModel, kinds: Iterable[RelationKind]) -> Iterator[CrossRelation]:
    wanted = set(kinds)
    return (r for r in model.relations if r.kind in wanted)
