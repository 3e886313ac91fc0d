"""Textual model language: lexer, recursive-descent parser, serializer.

Grammar (terminals quoted)::

    model      = "vucfm" ident "level" level ["root" ident] "{" element* "}" ;
    level      = "domain" | "family" "of" ident | "specific" "of" ident ;
    element    = usecase | actorDecl | feature | relation ;
    usecase    = "usecase" ident attrs? "{" (version | relation)* "}" ;
    version    = "version" ident attrs? "{" (revision | relation)* "}" ;
    revision   = "revision" ident attrs? "{" (importDecl | feature | relation)* "}" ;
    importDecl = "import" path ";" ;
    feature    = "feature" ident attrs? groupKw? ( "{" (feature | relation)* "}" | ";" ) ;
    groupKw    = "and" | "or" | "xor" ;
    actorDecl  = "actor" ident attrs? ";" ;
    relation   = path relkind path ";" ;
    attrs      = "[" attr ("," attr)* "]" ;
    attr       = ident "=" string ;
    path       = ident ("." ident)* ;

A use case needs at least one version and a version at least one revision.
The optional ``root`` clause names the tree root when it differs from the
model name (derived models keep the domain's root).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from vucfm_kit.diagnostics import Diagnostic, DiagnosticError, SourcePosition, sort_diagnostics
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
    resolve,
)

__all__ = ["ParseError", "parse", "parse_file", "serialize", "KEYWORDS"]

RELATION_KEYWORDS = {k.value: k for k in RelationKind if k is not RelationKind.IMPORT}
GROUP_KEYWORDS = {g.value: g for g in Group}
KEYWORDS = frozenset(
    {
        "vucfm", "level", "domain", "family", "specific", "of", "root",
        "usecase", "version", "revision", "import", "feature", "actor",
    }
    | set(GROUP_KEYWORDS)
    | set(RELATION_KEYWORDS)
)

IDENT, KEYWORD, STRING, PUNCT, EOF = "identifier", "keyword", "string", "punct", "end of input"
_PUNCT = set("{}[],=;.")


class ParseError(DiagnosticError):
    """Raised by :func:`parse`; ``diagnostics`` holds every error found."""


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    pos: SourcePosition

    def describe(self) -> str:
        if self.kind == EOF:
            return "end of input"
        if self.kind == STRING:
            return "string literal"
        return f"'{self.value}'"


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha()


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_-"


class _Lexer:
    def __init__(self, text: str) -> None:
        self.text = text
        self.i = 0
        self.byte = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []
        self.diagnostics: list[Diagnostic] = []

    def position(self) -> SourcePosition:
        return SourcePosition(self.byte, self.line, self.col)

    def _peek(self, ahead: int = 0) -> str:
        j = self.i + ahead
        return self.text[j] if j < len(self.text) else ""

    def _advance(self) -> str:
        ch = self.text[self.i]
        self.i += 1
        self.byte += len(ch.encode("utf-8", "surrogatepass"))
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def run(self) -> list[Token]:
        while self.i < len(self.text):
            ch = self._peek()
            if ch in " \t\r\n\ufeff":
                self._advance()
            elif ch == "/" and self._peek(1) == "/":
                while self.i < len(self.text) and self._peek() != "\n":
                    self._advance()
            elif ch == "/" and self._peek(1) == "*":
                start = self.position()
                self._advance()
                self._advance()
                while self.i < len(self.text) and not (self._peek() == "*" and self._peek(1) == "/"):
                    self._advance()
                if self.i >= len(self.text):
                    self.diagnostics.append(Diagnostic.error("P002", "unterminated block comment", start))
                    break
                self._advance()
                self._advance()
            elif ch == '"':
                if not self._string():
                    break
            elif _is_ident_start(ch):
                start = self.position()
                j = self.i
                while self.i < len(self.text) and _is_ident_char(self._peek()):
                    self._advance()
                word = self.text[j : self.i]
                self.tokens.append(Token(KEYWORD if word in KEYWORDS else IDENT, word, start))
            elif ch in _PUNCT:
                self.tokens.append(Token(PUNCT, ch, self.position()))
                self._advance()
            else:
                self.diagnostics.append(Diagnostic.error("P001", f"unexpected character {ch!r}", self.position()))
                self._advance()
        self.tokens.append(Token(EOF, "", self.position()))
        return self.tokens

    def _string(self) -> bool:
        start = self.position()
        self._advance()
        chars: list[str] = []
        while self.i < len(self.text):
            ch = self._advance()
            if ch == '"':
                self.tokens.append(Token(STRING, "".join(chars), start))
                return True
            if ch == "\\":
                nxt = self._peek()
                if nxt in ('"', "\\"):
                    chars.append(self._advance())
                    continue
                if not nxt:
                    break
                self.diagnostics.append(
                    Diagnostic.error("P001", f"invalid escape sequence '\\{nxt}'", self.position())
                )
                chars.append(self._advance())
                continue
            chars.append(ch)
        self.diagnostics.append(Diagnostic.error("P002", "unterminated string literal", start))
        return False


class _Sync(Exception):
    """Internal: abandon the current construct and resynchronize."""


_ELEMENT_KEYWORDS = {"usecase", "version", "revision", "feature", "actor", "import"}


class _Parser:
    def __init__(self, tokens: list[Token], diagnostics: list[Diagnostic]) -> None:
        self.toks = tokens
        self.i = 0
        self.diags = diagnostics
        self.relations: list[CrossRelation] = []
        self.actors: list[Actor] = []

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != EOF:
            self.i += 1
        return t

    def at(self, value: str) -> bool:
        t = self.tok
        return t.kind in (PUNCT, KEYWORD) and t.value == value

    def fail(self, code: str, message: str, tok: Optional[Token] = None) -> _Sync:
        tok = tok or self.tok
        # nested constructs hitting the same token report once
        if not any(d.position == tok.pos for d in self.diags):
            self.diags.append(Diagnostic.error(code, message, tok.pos))
        return _Sync()

    def expect(self, value: str) -> Token:
        if not self.at(value):
            raise self.fail("P001", f"expected '{value}' but found {self.tok.describe()}")
        return self.advance()

    def ident(self, what: str) -> Token:
        t = self.tok
        if t.kind == IDENT:
            return self.advance()
        if t.kind == KEYWORD:
            raise self.fail("P003", f"keyword '{t.value}' cannot be used as {what}")
        raise self.fail("P001", f"expected {what} but found {t.describe()}")

    def synchronize(self, start: int) -> None:
        """Skip to a plausible restart point: after ';', before '}', or past a block."""
        if self.i == start:
            self.advance()
        depth = 0
        while self.tok.kind != EOF:
            t = self.tok
            if t.kind == PUNCT:
                if t.value == ";" and depth == 0:
                    self.advance()
                    return
                if t.value == "{":
                    depth += 1
                elif t.value == "}":
                    if depth == 0:
                        return
                    depth -= 1
                    if depth == 0:
                        self.advance()
                        return
            elif t.kind == KEYWORD and t.value in _ELEMENT_KEYWORDS and depth == 0:
                return
            self.advance()

    # grammar

    def model(self) -> Optional[VariabilityModel]:
        try:
            start = self.expect("vucfm")
            name = self.ident("a model name").value
            self.expect("level")
            level = self.level()
            root_name = name
            if self.at("root"):
                self.advance()
                root_name = self.ident("a root feature name").value
            self.expect("{")
        except _Sync:
            return None
        root_path = FeaturePath((root_name,))
        children = self.block(root_path, "model", {"usecase", "feature", "actor"})
        if self.tok.kind == EOF:
            self.fail("P001", "expected '}' but found end of input")  # no-op if already reported
        else:
            self.advance()
            if self.tok.kind != EOF:
                self.fail("P001", f"unexpected {self.tok.describe()} after end of model")
        root = FeatureNode(root_name, FeatureKind.PLAIN, children=tuple(children), pos=start.pos)
        return VariabilityModel(name, level, root, tuple(self.actors), tuple(self.relations), pos=start.pos)

    def level(self) -> ModelLevel:
        t = self.tok
        if self.at("domain"):
            self.advance()
            return ModelLevel.domain()
        for word, kind in (("family", LevelKind.FAMILY), ("specific", LevelKind.SPECIFIC)):
            if self.at(word):
                self.advance()
                self.expect("of")
                return ModelLevel(kind, self.ident("a model name").value)
        raise self.fail("P001", f"expected 'domain', 'family' or 'specific' but found {t.describe()}")

    def block(self, path: FeaturePath, context: str, allowed: set[str]) -> list[FeatureNode]:
        """Parse element* up to (not including) the closing '}'."""
        children: list[FeatureNode] = []
        names: set[str] = set()
        while not self.at("}") and self.tok.kind != EOF:
            start = self.i
            try:
                t = self.tok
                if t.kind == IDENT:
                    self.relation()
                elif t.kind == KEYWORD and t.value in allowed:
                    node = self.element(t.value, path)
                    if node is None:
                        continue
                    if node.name in names:
                        self.diags.append(
                            Diagnostic.error("P004", f"duplicate name '{node.name}' under {path}", node.pos)
                        )
                    else:
                        names.add(node.name)
                        children.append(node)
                else:
                    expected = ", ".join(f"'{k}'" for k in sorted(allowed))
                    raise self.fail("P001", f"unexpected {t.describe()} in {context}; expected {expected} or a relation")
            except _Sync:
                self.synchronize(start)
        return children

    def element(self, keyword: str, parent: FeaturePath) -> Optional[FeatureNode]:
        if keyword == "actor":
            self.actor()
            return None
        if keyword == "import":
            self.import_decl(parent)
            return None
        if keyword == "feature":
            return self.feature(parent)
        return self.container(keyword, parent)

    def attrs(self) -> tuple[Attribute, ...]:
        if not self.at("["):
            return ()
        self.advance()
        out: list[Attribute] = []
        seen: set[str] = set()
        while True:
            name = self.ident("an attribute name")
            self.expect("=")
            if self.tok.kind != STRING:
                raise self.fail("P001", f"expected string literal but found {self.tok.describe()}")
            value = self.advance().value
            if name.value in seen:
                self.diags.append(Diagnostic.error("P004", f"duplicate attribute '{name.value}'", name.pos))
            else:
                seen.add(name.value)
                out.append(Attribute(name.value, value))
            if self.at(","):
                self.advance()
                continue
            self.expect("]")
            return tuple(out)

    # usecase / version / revision share a shape
    _CONTAINERS = {
        "usecase": (FeatureKind.USECASE, "version", {"version"}),
        "version": (FeatureKind.VERSION, "revision", {"revision"}),
        "revision": (FeatureKind.REVISION, None, {"import", "feature"}),
    }

    def container(self, keyword: str, parent: FeaturePath) -> FeatureNode:
        kind, required, allowed = self._CONTAINERS[keyword]
        self.advance()
        name = self.ident(f"a {keyword} name")
        attributes = self.attrs()
        self.expect("{")
        path = parent.child(name.value)
        children = self.block(path, f"{keyword} {name.value}", allowed)
        close = self.expect("}")
        if required and not children:
            self.diags.append(
                Diagnostic.error("P001", f"expected '{required}' before '}}': {keyword} {path} needs at least one {required}", close.pos)
            )
        return FeatureNode(name.value, kind, attributes, Group.AND, tuple(children), pos=name.pos)

    def feature(self, parent: FeaturePath) -> FeatureNode:
        self.advance()
        name = self.ident("a feature name")
        attributes = self.attrs()
        group = Group.AND
        if self.tok.kind == KEYWORD and self.tok.value in GROUP_KEYWORDS:
            group = GROUP_KEYWORDS[self.advance().value]
        children: list[FeatureNode] = []
        if self.at("{"):
            self.advance()
            children = self.block(parent.child(name.value), f"feature {name.value}", {"feature"})
            self.expect("}")
        else:
            self.expect(";")
        return FeatureNode(name.value, FeatureKind.PLAIN, attributes, group, tuple(children), pos=name.pos)

    def actor(self) -> None:
        self.advance()
        name = self.ident("an actor name")
        attributes = self.attrs()
        self.expect(";")
        if any(a.name == name.value for a in self.actors):
            self.diags.append(Diagnostic.error("P004", f"duplicate actor '{name.value}'", name.pos))
            return
        self.actors.append(Actor(name.value, attributes, pos=name.pos))

    def import_decl(self, revision: FeaturePath) -> None:
        kw = self.advance()
        target, _ = self.path()
        self.expect(";")
        self.relations.append(CrossRelation(revision, RelationKind.IMPORT, target, pos=kw.pos))

    def relation(self) -> None:
        source, pos = self.path()
        t = self.tok
        if t.kind != KEYWORD or t.value not in RELATION_KEYWORDS:
            raise self.fail("P001", f"expected a relation kind but found {t.describe()}")
        kind = RELATION_KEYWORDS[self.advance().value]
        target, _ = self.path()
        self.expect(";")
        self.relations.append(CrossRelation(source, kind, target, pos=pos))

    def path(self) -> tuple[FeaturePath, SourcePosition]:
        first = self.ident("a feature path")
        segments = [first.value]
        while self.at("."):
            self.advance()
            if self.tok.kind != IDENT:
                raise self.fail("P005", f"malformed path '{'.'.join(segments)}.': expected identifier after '.'")
            segments.append(self.advance().value)
        return FeaturePath(tuple(segments)), first.pos


def parse(text: str) -> VariabilityModel:
    """Parse model text; raise :class:`ParseError` listing every error found."""
    lexer = _Lexer(text)
    tokens = lexer.run()
    diags = list(lexer.diagnostics)
    parser = _Parser(tokens, diags)
    model = parser.model()
    if diags or model is None:
        raise ParseError(sort_diagnostics(diags))
    return model


def parse_file(path: str) -> VariabilityModel:
    with open(path, "rb") as fh:
        data = fh.read()
    return parse(data.decode("utf-8"))


# serialization

INDENT = "  "


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _attrs(attributes: tuple[Attribute, ...]) -> str:
    if not attributes:
        return ""
    return " [" + ", ".join(f"{a.name}={_quote(a.value)}" for a in attributes) + "]"


def serialize(model: VariabilityModel) -> str:
    """Canonical text: 2-space indent, stored sibling order, sorted relations."""
    imports: dict[FeaturePath, list[FeaturePath]] = {}
    plain: set[CrossRelation] = set()
    for r in model.relations:
        if r.kind is RelationKind.IMPORT:
            src = resolve(model, r.source)
            if src is None or src.kind is not FeatureKind.REVISION:
                raise ValueError(f"import source {r.source} is not a revision; cannot serialize")
            imports.setdefault(r.source, []).append(r.target)
        else:
            plain.add(r)

    header = f"vucfm {model.name} level {model.level}"
    if model.root.name != model.name:
        header += f" root {model.root.name}"
    out = [header + " {"]
    for a in model.actors:
        out.append(f"{INDENT}actor {a.name}{_attrs(a.attributes)};")
    root_path = FeaturePath((model.root.name,))
    for child in model.root.children:
        _emit(child, root_path.child(child.name), 1, imports, out)
    rels = sorted(plain, key=CrossRelation.sort_key)
    if rels and len(out) > 1:
        out.append("")
    for r in rels:
        out.append(f"{INDENT}{r.source} {r.kind.value} {r.target};")
    out.append("}")
    return "\n".join(out) + "\n"


def _emit(node: FeatureNode, path: FeaturePath, depth: int, imports: dict, out: list[str]) -> None:
    pad = INDENT * depth
    head = f"{pad}{node.kind.value} {node.name}{_attrs(node.attributes)}"
    if node.kind is FeatureKind.PLAIN:
        if node.group is not Group.AND:
            head += f" {node.group.value}"
        if not node.children:
            out.append(head + ";")
            return
    body_imports = sorted(set(imports.get(path, ())))
    if not node.children and not body_imports:
        out.append(head + " {}")
        return
    out.append(head + " {")
    for target in body_imports:
        out.append(f"{pad}{INDENT}import {target};")
    for c in node.children:
        _emit(c, path.child(c.name), depth + 1, imports, out)
    out.append(pad + "}")
