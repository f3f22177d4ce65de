"""
skewsketch command line.

    skewsketch gen --d 10000 --updates 100000 --seed 7 --out stream.txt
    skewsketch sketch stream.txt --alpha 0.5 --k 400 --out s.sk
    skewsketch estimate s.sk --method op
    skewsketch exact stream.txt --alpha 0.5

CSV goes to --out or stdout; diagnostics go to stderr.
"""
from argparse import ArgumentParser, Namespace
from typing import List, Optional, Sequence
import logging
import sys

from ..core.interfaces.base import Method
from ..core.schema.result import Failure, StreamParseError
from ..sketch.stream import Distribution
from .commands import COMMANDS, default_alpha_grid

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAILURE = 3

DEFAULT_EPSILONS = [0.1, 0.2, 0.5, 1.0]
TAIL_METHODS = [Method.GM.value, Method.HM.value, Method.MLE05.value]


def _methods() -> List[str]:
    return [method.value for method in Method]


def _add_out(parser: ArgumentParser, required: bool = False) -> None:
    parser.add_argument(
        "--out", required=required, default=None, help="output path, '-' for stdout"
    )


def _add_experiment(parser: ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=100, help="samples per estimate")
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1, help="threads for trial chunks")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="skewsketch",
        description="Frequency moments of Turnstile streams via skewed stable projections",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="write a synthetic Turnstile stream")
    gen.add_argument("--d", type=int, default=10_000, help="index range 1..D")
    gen.add_argument("--updates", type=int, default=100_000)
    gen.add_argument(
        "--distribution",
        choices=[d.value for d in Distribution],
        default=Distribution.ZIPF.value,
    )
    gen.add_argument("--zipf-s", type=float, default=1.1)
    gen.add_argument("--deletion-fraction", type=float, default=0.0)
    gen.add_argument("--seed", type=int, default=0)
    _add_out(gen)

    sketch = commands.add_parser("sketch", help="sketch a stream file")
    sketch.add_argument("stream", help="stream file, '-' for stdin")
    sketch.add_argument("--alpha", type=float, required=True)
    sketch.add_argument("--k", type=int, required=True)
    sketch.add_argument("--seed", type=int, default=0)
    sketch.add_argument(
        "--compensated", action="store_true", help="compensated (Neumaier) accumulation"
    )
    _add_out(sketch, required=True)

    merge = commands.add_parser("merge", help="sum sketches sharing (alpha, k, seed)")
    merge.add_argument("sketches", nargs="+")
    _add_out(merge, required=True)

    estimate = commands.add_parser("estimate", help="estimate F_(alpha) from a sketch")
    estimate.add_argument("sketch")
    estimate.add_argument("--method", choices=_methods(), default=Method.GM.value)
    estimate.add_argument(
        "--uncorrected", action="store_true", help="skip the hm/mle05 bias correction"
    )
    _add_out(estimate)

    exact = commands.add_parser("exact", help="exact F_(alpha) of a stream file")
    exact.add_argument("stream")
    exact.add_argument("--alpha", type=float, required=True)
    _add_out(exact)

    variance = commands.add_parser(
        "experiment-variance", help="empirical against analytic variance factors"
    )
    variance.add_argument("--alpha", type=float, nargs="+", required=True)
    variance.add_argument("--method", choices=_methods(), nargs="*", default=None)
    variance.add_argument("--beta", type=float, default=None, help="skewness for gm-beta")
    _add_experiment(variance)
    _add_out(variance)

    tails = commands.add_parser(
        "experiment-tails", help="empirical tail frequencies against Chernoff bounds"
    )
    tails.add_argument("--alpha", type=float, nargs="+", required=True)
    tails.add_argument("--method", choices=TAIL_METHODS, default=Method.GM.value)
    tails.add_argument("--epsilon", type=float, nargs="+", default=DEFAULT_EPSILONS)
    _add_experiment(tails)
    _add_out(tails)

    table = commands.add_parser("bounds-table", help="tail bound constants G")
    table.add_argument("--mode", choices=["alpha", "delta"], default="alpha")
    table.add_argument("--alpha", type=float, nargs="+", default=default_alpha_grid())
    table.add_argument("--delta", type=float, nargs="+", default=None, help="offsets |alpha - 1|")
    table.add_argument("--epsilon", type=float, nargs="+", default=DEFAULT_EPSILONS)
    table.add_argument("--method", choices=TAIL_METHODS, default=Method.GM.value)
    table.add_argument(
        "--delta-prob", type=float, default=None, help="failure probability for the k column"
    )
    _add_out(table)

    curves = commands.add_parser("curves", help="variance factors and lambda* over alpha")
    curves.add_argument("--alpha", type=float, nargs="+", default=default_alpha_grid())
    _add_out(curves)

    power = commands.add_parser("lambda", help="optimal-power variance factor over lambda")
    power.add_argument("--alpha", type=float, nargs="+", required=True)
    power.add_argument("--lo", type=float, default=-5.0)
    power.add_argument("--hi", type=float, default=0.49)
    power.add_argument("--points", type=int, default=100)
    _add_out(power)

    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
    )


def run(args: Namespace) -> int:
    try:
        return COMMANDS[args.command](args)
    except StreamParseError as error:
        logger.error("%s", error.message)
        return EXIT_USAGE
    except OSError as error:
        logger.error("%s", error)
        return EXIT_USAGE
    except Failure as error:
        logger.error("%s: %s", error.name, error.message)
        logger.debug("%s", error.to_json())
        return EXIT_FAILURE


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return EXIT_USAGE if stop.code else EXIT_OK
    configure_logging(args.verbose)
    return run(args)
