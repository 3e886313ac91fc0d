"""``vucfm-kit`` command line: check, derive family/specific, export, configs, list.

Exit status: 0 success, 1 validation errors, 2 parse errors, 3 derivation
error, 4 usage error. Warnings never change the status.
"""

from __future__ import annotations

import argparse
import sys
from typing import Iterable, Optional, Sequence, TextIO

from vucfm_kit.analysis import count_configurations, enumerate_configurations
from vucfm_kit.derivation import DerivationError, derive_family, derive_specific
from vucfm_kit.diagnostics import Diagnostic, DiagnosticError
from vucfm_kit.dsl import ParseError, parse, serialize
from vucfm_kit.export import ExportError, render_dot, render_plantuml, to_usecase_diagram
from vucfm_kit.model import FeatureKind, VariabilityModel
from vucfm_kit.validator import validate

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_DERIVE, EXIT_USAGE = 0, 1, 2, 3, 4

LIST_KINDS = {
    "usecase": FeatureKind.USECASE,
    "version": FeatureKind.VERSION,
    "revision": FeatureKind.REVISION,
    "feature": FeatureKind.PLAIN,
    "actor": None,
}
RENDERERS = {"dot": render_dot, "puml": render_plantuml}


class Exit(Exception):
    def __init__(self, code: int) -> None:
        super().__init__(code)
        self.code = code


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Runner:
    def __init__(self, out: TextIO, err: TextIO) -> None:
        self.out = out
        self.err = err

    def report(self, filename: str, diagnostics: Iterable[Diagnostic]) -> None:
        for d in diagnostics:
            print(d.format(filename), file=self.err)

    def load(self, filename: str) -> VariabilityModel:
        """Parse and validate, exiting with 4/2/1 as appropriate."""
        try:
            with open(filename, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            print(f"vucfm-kit: cannot read {filename}: {exc.strerror or exc}", file=self.err)
            raise Exit(EXIT_USAGE)
        try:
            model = parse(data.decode("utf-8"))
        except UnicodeDecodeError as exc:
            print(f"{filename}: error[P001]: input is not valid UTF-8 (byte {exc.start})", file=self.err)
            raise Exit(EXIT_PARSE)
        except ParseError as exc:
            self.report(filename, exc.diagnostics)
            raise Exit(EXIT_PARSE)
        diags = validate(model)
        self.report(filename, diags)
        if any(d.is_error for d in diags):
            raise Exit(EXIT_INVALID)
        return model

    def write(self, target: str, text: str) -> None:
        if target == "-":
            self.out.write(text)
            return
        try:
            with open(target, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"vucfm-kit: cannot write {target}: {exc.strerror or exc}", file=self.err)
            raise Exit(EXIT_USAGE)
        print(f"wrote {target}", file=self.out)

    def derivation_failed(self, filename: str, exc: DiagnosticError) -> Exit:
        self.report(filename, exc.diagnostics)
        return Exit(EXIT_DERIVE)

    # commands

    def check(self, args: argparse.Namespace) -> int:
        model = self.load(args.file)
        print(f"OK: {model.name} ({model.level})", file=self.out)
        return EXIT_OK

    def derive(self, args: argparse.Namespace) -> int:
        model = self.load(args.file)
        try:
            if args.stage == "family":
                result, warnings = derive_family(model, args.feature)
            else:
                result, warnings = derive_specific(model, args.revision)
        except DerivationError as exc:
            raise self.derivation_failed(args.file, exc)
        self.report(args.file, warnings)
        self.write(args.output or f"{result.name}.{args.stage}.vucfm", serialize(result))
        return EXIT_OK

    def export(self, args: argparse.Namespace) -> int:
        model = self.load(args.file)
        try:
            diagram = to_usecase_diagram(model)
        except ExportError as exc:
            raise self.derivation_failed(args.file, exc)
        self.report(args.file, diagram.warnings)
        self.write(args.output, RENDERERS[args.format](diagram, clusters=args.clusters))
        return EXIT_OK

    def configs(self, args: argparse.Namespace) -> int:
        model = self.load(args.file)
        if args.list:
            for config in enumerate_configurations(model, args.limit):
                print(config, file=self.out)
        else:
            print(count_configurations(model), file=self.out)
        return EXIT_OK

    def list(self, args: argparse.Namespace) -> int:
        model = self.load(args.file)
        kind = LIST_KINDS[args.kind]
        if kind is None:
            names = sorted(a.name for a in model.actors)
        else:
            names = sorted(str(p) for p in model.paths(kind) if len(p) > 1)
        for name in names:
            print(name, file=self.out)
        return EXIT_OK


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="vucfm-kit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("check", help="parse and validate a model")
    p.add_argument("file")
    p.set_defaults(handler="check")

    derive = sub.add_parser("derive", help="derive a family or specific model")
    stages = derive.add_subparsers(dest="stage", required=True, metavar="STAGE")
    p = stages.add_parser("family", help="select an applications family from a domain model")
    p.add_argument("file")
    p.add_argument("--feature", required=True, metavar="PATH")
    p.add_argument("-o", "--output", metavar="OUT", help="default: <name>.family.vucfm; '-' for stdout")
    p.set_defaults(handler="derive")
    p = stages.add_parser("specific", help="select a specific application from a family model")
    p.add_argument("file")
    p.add_argument("--revision", required=True, metavar="PATH")
    p.add_argument("-o", "--output", metavar="OUT", help="default: <name>.specific.vucfm; '-' for stdout")
    p.set_defaults(handler="derive")

    p = sub.add_parser("export", help="render a specific model as a use case diagram")
    p.add_argument("file")
    p.add_argument("--format", required=True, choices=sorted(RENDERERS))
    p.add_argument("-o", "--output", default="-", metavar="OUT")
    p.add_argument("--clusters", action="store_true", help="group use cases by parent feature")
    p.set_defaults(handler="export")

    p = sub.add_parser("configs", help="count or list configurations")
    p.add_argument("file")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--count", action="store_true", help="print the number of configurations (default)")
    mode.add_argument("--list", action="store_true", help="print one configuration per line")
    p.add_argument("--limit", type=_positive, default=100, metavar="N")
    p.set_defaults(handler="configs")

    p = sub.add_parser("list", help="list feature paths or actors of one kind")
    p.add_argument("file")
    p.add_argument("--kind", required=True, choices=list(LIST_KINDS))
    p.set_defaults(handler="list")
    return parser


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    runner = _Runner(out, err)
    try:
        return getattr(runner, args.handler)(args)
    except Exit as exc:
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
