"""Command-line front end.

Every subcommand reads one or two documents, runs a pipeline and prints a
barcode, one ``<degree> <birth> <death|inf>`` line per bar. Exit codes:
0 on success, 2 on a parse error, 3 on any other library error.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import TextIO

from prescomplex.config.logging import (
    bind_run_context,
    clear_run_context,
    configure_logging,
    get_logger,
)
from prescomplex.config.settings import get_settings
from prescomplex.core.barcode import Barcode
from prescomplex.core.complexify import complexify_pair
from prescomplex.core.formats import (
    format_barcode,
    parse_annmat,
    parse_cosheaf,
    parse_poset,
    parse_rawcplx,
    parse_rawmod,
    parse_sheaf,
    parse_tower,
    read_document,
    write_annmat,
)
from prescomplex.core.homology import pres_hom
from prescomplex.core.presentation import pres_pers_mod
from prescomplex.core.validator import ParseError, PresentationError
from prescomplex.pipelines.poset import poset_cohomology
from prescomplex.pipelines.sheaf import persistent_sheaf_cohomology
from prescomplex.pipelines.tower import cosheaf_tower_homology, tower_homology
from prescomplex.utils.oracle import pointwise_homology_barcode

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_PARSE_ERROR = 2
EXIT_INVARIANT_VIOLATION = 3


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--field", type=int, default=None, metavar="P",
        help="prime field characteristic (must agree with a header prime)",
    )
    common.add_argument(
        "--keep-empty", action="store_true", default=None,
        help="report zero-length bars",
    )
    common.add_argument(
        "--threads", type=int, default=None, metavar="N",
        help="parallel width of the sheaf pipeline",
    )
    common.add_argument("--output", type=Path, default=None, help="write to a file")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    common.add_argument("--log-format", choices=["json", "pretty"], default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per pipeline."""
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="prescomplex",
        description="Barcodes of complexes of persistence modules via presentations.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    preshom = commands.add_parser(
        "preshom", parents=[common], help="homology of a complex of presentations"
    )
    preshom.add_argument("f0", type=Path, help="ANNMAT presentation of L -> M")
    preshom.add_argument("g0", type=Path, help="ANNMAT presentation of M -> N")
    preshom.add_argument("--deg", type=int, default=1, help="degree label of the bars")
    preshom.add_argument(
        "--complexify", action="store_true",
        help="first turn a pair of presentations of a complex into a complex",
    )

    present = commands.add_parser(
        "present", parents=[common], help="present a pointwise morphism (prints ANNMAT)"
    )
    present.add_argument("input", type=Path, help="RAWMOD document")

    for name, what in (("tower", "TOWER"), ("cosheaf", "COSHEAF")):
        command = commands.add_parser(
            name, parents=[common], help=f"persistent homology of a {what} document"
        )
        command.add_argument("input", type=Path, help=f"{what} document")
        command.add_argument(
            "--dim", type=int, action="append", default=None, metavar="K",
            help="homology degree (repeatable; all degrees if omitted)",
        )

    sheaf = commands.add_parser(
        "sheaf", parents=[common], help="persistent sheaf cohomology"
    )
    sheaf.add_argument("input", type=Path, help="SHEAF document")
    sheaf.add_argument("--deg", type=int, required=True, help="cohomology degree")
    sheaf.add_argument("--method", choices=["global", "local"], default=None)

    poset = commands.add_parser(
        "poset", parents=[common], help="persistent sheaf cohomology on a poset"
    )
    poset.add_argument("input", type=Path, help="POSET document")
    poset.add_argument("--deg", type=int, required=True, help="cohomology degree")
    poset.add_argument(
        "--route", choices=["auto", "order_complex", "zigzag"], default="auto"
    )
    poset.add_argument("--method", choices=["global", "local"], default=None)

    oracle = commands.add_parser(
        "oracle", parents=[common], help="pointwise homology of a RAWCPLX document"
    )
    oracle.add_argument("input", type=Path, help="RAWCPLX document")
    oracle.add_argument("--deg", type=int, default=1, help="degree label of the bars")
    return parser


def _preshom(args: argparse.Namespace) -> str:
    f0 = read_document(args.f0, parse_annmat, args.field)
    g0 = read_document(args.g0, parse_annmat, args.field)
    if args.complexify:
        f0, g0 = complexify_pair(f0, g0)
    return format_barcode(pres_hom(f0, g0, degree_label=args.deg, keep_empty=args.keep_empty))


def _present(args: argparse.Namespace) -> str:
    raw = read_document(args.input, parse_rawmod, args.field)
    return write_annmat(pres_pers_mod(raw))


def _tower(args: argparse.Namespace) -> str:
    script = read_document(args.input, parse_tower, args.field)
    if not script.events:
        raise ParseError("a tower needs at least one event", path=str(args.input))
    return format_barcode(tower_homology(script, args.dim, keep_empty=args.keep_empty))


def _cosheaf(args: argparse.Namespace) -> str:
    script, cosheaf = read_document(args.input, parse_cosheaf, args.field)
    if not script.events:
        raise ParseError("a tower needs at least one event", path=str(args.input))
    return format_barcode(
        cosheaf_tower_homology(script, cosheaf, args.dim, keep_empty=args.keep_empty)
    )


def _sheaf(args: argparse.Namespace) -> str:
    sheaf = read_document(args.input, parse_sheaf, args.field)
    barcode = persistent_sheaf_cohomology(
        sheaf, args.deg, method=args.method, threads=args.threads, keep_empty=args.keep_empty
    )
    return format_barcode(barcode)


def _poset(args: argparse.Namespace) -> str:
    sheaf = read_document(args.input, parse_poset, args.field)
    barcode = poset_cohomology(
        sheaf,
        args.deg,
        route=args.route,
        method=args.method,
        threads=args.threads,
        keep_empty=args.keep_empty,
    )
    return format_barcode(barcode)


def _oracle(args: argparse.Namespace) -> str:
    raw = read_document(args.input, parse_rawcplx, args.field)
    barcode: Barcode = pointwise_homology_barcode(
        raw, degree=args.deg, keep_empty=bool(args.keep_empty)
    )
    return format_barcode(barcode)


COMMANDS: dict[str, Callable[[argparse.Namespace], str]] = {
    "preshom": _preshom,
    "present": _present,
    "tower": _tower,
    "cosheaf": _cosheaf,
    "sheaf": _sheaf,
    "poset": _poset,
    "oracle": _oracle,
}


def _describe(error: PresentationError, args: argparse.Namespace) -> str:
    if isinstance(error, ParseError):
        return error.located()
    source = getattr(args, "input", None) or getattr(args, "f0", None)
    message = f"{source}: {error}" if source else str(error)
    if error.entity is not None:
        message += f" (at {error.entity!r})"
    return message


def run(
    argv: Sequence[str] | None = None,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """Run one CLI invocation.

    Args:
        argv: Arguments without the program name; ``sys.argv[1:]`` if omitted
        stdout: Stream for the result; ``sys.stdout`` if omitted
        stderr: Stream for diagnostics; ``sys.stderr`` if omitted

    Returns:
        Process exit code
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)

    settings = get_settings()
    configure_logging(
        log_level=args.log_level or settings.log_level,
        log_format=args.log_format or settings.log_format,
        service_name=settings.service_name,
    )
    if args.threads is not None and args.threads < 1:
        print(f"--threads must be at least 1, got {args.threads}", file=stderr)
        return EXIT_PARSE_ERROR

    bind_run_context(command=args.command)
    try:
        return _execute(args, stdout, stderr)
    finally:
        clear_run_context("command")


def _execute(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    logger.info("command_started")
    try:
        text = COMMANDS[args.command](args)
    except ParseError as exc:
        logger.warning("command_failed", reason="parse")
        print(_describe(exc, args), file=stderr)
        return EXIT_PARSE_ERROR
    except PresentationError as exc:
        logger.warning("command_failed", reason=type(exc).__name__)
        print(_describe(exc, args), file=stderr)
        return EXIT_INVARIANT_VIOLATION

    if args.output is not None:
        args.output.write_text(text, encoding="utf-8", newline="\n")
    else:
        stdout.write(text)
    logger.info("command_finished", lines=text.count("\n"))
    return EXIT_OK


def main() -> None:
    sys.exit(run())
