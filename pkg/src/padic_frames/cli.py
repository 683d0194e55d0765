"""``padic-frames build | verify | render``.

Exit codes: 0 ok, 1 verification failure, 2 infeasible tree, 3 bad input,
4 I/O or schema problem.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .document import (
    DocumentError,
    coset_from_json,
    document_to_frame,
    dumps_document,
    frame_to_document,
    load_document,
    tree_literal_from_json,
)
from .errors import InfeasibleTreeError, PadicFramesError
from .frames import check_theorem31, construct_frame
from .qp import GroupParams
from .render import WHAT, render_ascii, render_svg
from .tree import tree_from_literal
from .verify import verify_frame

EXIT_OK, EXIT_VERIFY, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3, 4
SEED_ENV = "PADIC_FRAMES_SEED"


class BadInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _transform(text: str) -> tuple[str, int]:
    kind, sep, arg = text.partition(":")
    if not sep or kind not in ("i", "ii"):
        raise argparse.ArgumentTypeError(f"expected i:J or ii:L, got {text!r}")
    try:
        return kind, int(arg)
    except ValueError:
        raise argparse.ArgumentTypeError(f"transform argument must be an integer, got {arg!r}") from None


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if text in ("", "none"):
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="padic-frames", description="Tight wavelet frames on the p-adic numbers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="construct a frame and write a frame document")
    b.add_argument("--p", type=int, help="prime")
    b.add_argument("--N", type=int, help="support level; M = N")
    b.add_argument("--tree", type=Path, help="tree literal JSON instead of the initial tree")
    b.add_argument("--transform", type=_transform, action="append", default=[], metavar="i:J|ii:L")
    b.add_argument(
        "--j-partition",
        type=_int_list,
        default=[],
        metavar="J,...",
        help="level-one indices whose wavelet is split into p finer pieces (n = 1 only)",
    )
    b.add_argument("--padding", type=_int_list, default=None, metavar="M,...", help="explicit padding nodes")
    b.add_argument("--pieces", type=Path, help="JSON list of {E, t} replacing the automatic wavelets")
    b.add_argument("--out", type=Path, help="output file (default stdout)")

    v = sub.add_parser("verify", help="check a frame document by brute force")
    v.add_argument("--in", dest="infile", type=Path, required=True)
    v.add_argument("--tests", type=int, default=50)
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--seed", type=int, default=0, help=f"overridden by ${SEED_ENV}")
    v.add_argument("--out", type=Path, help="report file (default stdout)")

    r = sub.add_parser("render", help="draw a frame document on the Monna line")
    r.add_argument("--in", dest="infile", type=Path, required=True)
    r.add_argument("--what", choices=WHAT, default="phi-hat")
    r.add_argument("--format", choices=("svg", "ascii"), default="ascii")
    r.add_argument("--out", type=Path, help="output file (default stdout)")
    return parser


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _read_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadInput(f"{path} is not valid JSON: {exc}") from exc


def _build(args) -> int:
    literal = None
    tree = None
    if args.tree is not None:
        obj = _read_json(args.tree)
        if not isinstance(obj, dict) or "tree" not in obj:
            raise BadInput("tree file must be an object with p, N, M and tree")
        try:
            p, N = int(obj["p"]), int(obj["N"])
            M = int(obj.get("M", N))
        except (KeyError, TypeError, ValueError) as exc:
            raise BadInput(f"tree file parameters: {exc}") from exc
        for flag, val in (("--p", args.p), ("--N", args.N)):
            if val is not None and val != {"--p": p, "--N": N}[flag]:
                raise BadInput(f"{flag} {val} disagrees with the tree file")
        try:
            params = GroupParams(p, N, M)
            literal = tree_literal_from_json(obj["tree"])
            tree = tree_from_literal(params, literal)
        except ValueError as exc:
            raise BadInput(str(exc)) from exc
    else:
        if args.p is None or args.N is None:
            raise BadInput("--p and --N are required without --tree")
        try:
            params = GroupParams(args.p, args.N, args.N)
        except ValueError as exc:
            raise BadInput(str(exc)) from exc
    pieces = None
    if args.pieces is not None:
        raw = _read_json(args.pieces)
        try:
            pieces = [(coset_from_json(params.p, e["E"]), int(e["t"])) for e in raw]
        except (TypeError, KeyError, ValueError, DocumentError) as exc:
            raise BadInput(f"pieces file: {exc}") from exc
    fs = construct_frame(
        params,
        transforms=args.transform,
        tree=tree,
        split=args.j_partition,
        padding=args.padding,
        pieces=pieces,
    )
    doc = frame_to_document(
        fs,
        tree_literal=literal,
        transforms=args.transform,
        split=args.j_partition,
        pieces=pieces,
        padding=args.padding,
    )
    _emit(dumps_document(doc), args.out)
    report = check_theorem31(fs)
    for failure in report.failures:
        print(f"check failed: {failure}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY


def _seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return args.seed
    try:
        return int(env)
    except ValueError:
        raise BadInput(f"${SEED_ENV} must be an integer, got {env!r}") from None


def _verify(args) -> int:
    seed = _seed(args)
    if args.tests < 0:
        raise BadInput("--tests must be non-negative")
    fs = document_to_frame(load_document(args.infile))
    report = verify_frame(fs, tests=args.tests, seed=seed, tol=args.tol)
    _emit(json.dumps(report, sort_keys=True, indent=1, default=_json_default) + "\n", args.out)
    for failure in report["failures"]:
        print(f"verification failed: {failure}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _render(args) -> int:
    fs = document_to_frame(load_document(args.infile))
    text = render_svg(fs, args.what) if args.format == "svg" else render_ascii(fs, args.what)
    _emit(text, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"build": _build, "verify": _verify, "render": _render}[args.command]
    try:
        return handler(args)
    except InfeasibleTreeError as exc:
        print(f"infeasible tree: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DocumentError as exc:
        print(f"document error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (BadInput, PadicFramesError, ValueError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
