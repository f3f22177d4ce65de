"""
Subcommand implementations. Each takes the parsed argparse namespace and
returns a process exit code; output goes to --out or stdout.
"""
from argparse import Namespace
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence
import logging

import numpy as np

from ..core import bounds, estimators
from ..core.interfaces.base import ALPHA, Method, Side, TailBoundSpec
from ..core.schema.result import DomainError, Failure, NumericError
from ..core.schema.schema import array, field as read_field, integer, number
from ..sketch import codec
from ..sketch.sketch import SkewedSketch
from ..sketch.stream import Distribution, exact_moment, generate, read_stream, write_stream
from .experiments import ExperimentOptions, tail_rows, variance_rows
from .output import open_input, open_output, write_csv, write_experiment_rows

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    "estimate",
    "method",
    "k",
    "asymptotic_variance_factor",
    "alpha",
    "degenerate",
    "standard_error",
]
BOUNDS_COLUMNS = [
    "alpha",
    "delta",
    "epsilon",
    "estimator",
    "G_right",
    "G_left",
    "G",
    "inner_right",
    "inner_left",
    "asymptote",
    "k",
]
CURVE_COLUMNS = ["alpha", "V_gm", "V_hm", "V_op", "lambda_star", "V_symmetric"]
LAMBDA_COLUMNS = ["alpha", "lambda", "g"]

ALPHA_GRID = array(ALPHA.excluding(1.0))
EPSILON_GRID = array(bounds.EPSILON)
DELTA_GRID = array(number().within(0.0, 1.0, lo_open=True, hi_open=True))
GRID_POINTS = integer().positive()
FINITE = number().finite()


@dataclass(frozen=True)
class GenOptions:
    """Workload generator settings"""

    d: int
    n_updates: int
    distribution: Distribution = Distribution.ZIPF
    zipf_s: float = 1.1
    deletion_fraction: float = 0.0
    seed: int = 0

    @classmethod
    def from_args(cls, args: Namespace) -> "GenOptions":
        return cls(
            d=args.d,
            n_updates=args.updates,
            distribution=Distribution(args.distribution),
            zipf_s=args.zipf_s,
            deletion_fraction=args.deletion_fraction,
            seed=args.seed,
        )


@dataclass(frozen=True)
class SketchOptions:
    """Sketch identity and accumulation mode"""

    alpha: float
    k: int
    seed: int = 0
    compensated: bool = False

    @classmethod
    def from_args(cls, args: Namespace) -> "SketchOptions":
        return cls(args.alpha, args.k, args.seed, args.compensated)


def cmd_gen(args: Namespace) -> int:
    options = GenOptions.from_args(args)
    updates = generate(
        options.d,
        options.n_updates,
        options.distribution,
        options.zipf_s,
        options.deletion_fraction,
        options.seed,
    )
    with open_output(args.out) as out:
        out.write(
            f"# gen D={options.d} updates={options.n_updates} "
            f"distribution={options.distribution.value} seed={options.seed}\n"
        )
        count = write_stream(updates, out)
    logger.info("wrote %d updates", count)
    return 0


def cmd_sketch(args: Namespace) -> int:
    options = SketchOptions.from_args(args)
    sketch = SkewedSketch.empty(options.alpha, options.k, options.seed, options.compensated)
    with open_input(args.stream) as stream:
        sketch.update_many(read_stream(stream))
    codec.dump(sketch, args.out)
    logger.info("sketched %d updates into %s", sketch.update_count, args.out)
    return 0


def cmd_merge(args: Namespace) -> int:
    sketches = [codec.load(path) for path in args.sketches]
    merged = sketches[0]
    for other in sketches[1:]:
        merged = merged.merge(other)
    codec.dump(merged, args.out)
    logger.info("merged %d sketches into %s", len(sketches), args.out)
    return 0


def cmd_estimate(args: Namespace) -> int:
    sketch = codec.load(args.sketch)
    report = sketch.estimate(Method(args.method), corrected=not args.uncorrected)
    row = [
        report.estimate,
        report.method,
        report.k,
        report.asymptotic_variance_factor,
        report.alpha,
        report.degenerate,
        report.standard_error,
    ]
    with open_output(args.out) as out:
        write_csv(REPORT_COLUMNS, [row], out)
    return 0


def cmd_exact(args: Namespace) -> int:
    with open_input(args.stream) as stream:
        value = exact_moment(read_stream(stream), args.alpha)
    with open_output(args.out) as out:
        out.write("%.10g\n" % value)
    return 0


def _experiment_options(args: Namespace) -> ExperimentOptions:
    return ExperimentOptions(k=args.k, trials=args.trials, seed=args.seed, workers=args.workers)


def cmd_experiment_variance(args: Namespace) -> int:
    options = _experiment_options(args)
    alphas = read_field("alpha", ALPHA_GRID, args.alpha)
    methods = [Method(m) for m in args.method] if args.method else None
    with open_output(args.out) as out:
        rows = (
            row
            for alpha in alphas
            for row in variance_rows(alpha, options, methods, args.beta)
        )
        write_experiment_rows(rows, out)
    return 0


def cmd_experiment_tails(args: Namespace) -> int:
    options = _experiment_options(args)
    alphas = read_field("alpha", ALPHA_GRID, args.alpha)
    epsilons = read_field("epsilon", EPSILON_GRID, args.epsilon)
    with open_output(args.out) as out:
        rows = (
            row
            for alpha in alphas
            for row in tail_rows(alpha, Method(args.method), epsilons, options)
        )
        write_experiment_rows(rows, out)
    return 0


def _side_rate(
    rate: Callable[[], TailBoundSpec], alpha: float, epsilon: float, side: Side
) -> Optional[TailBoundSpec]:
    try:
        return rate()
    except NumericError as error:
        logger.warning(
            "alpha=%r epsilon=%r: no %s bound (%s)", alpha, epsilon, side.value, error.message
        )
        return None


def _bounds_row(
    alpha: float,
    offset: Optional[float],
    epsilon: float,
    method: Method,
    delta_prob: Optional[float],
) -> List[object]:
    right = _side_rate(
        lambda: bounds.right_rate(method, alpha, epsilon), alpha, epsilon, Side.RIGHT
    )
    left = None
    if epsilon < 1.0:
        left = _side_rate(
            lambda: bounds.left_rate(method, alpha, epsilon), alpha, epsilon, Side.LEFT
        )
    constants = [spec.G for spec in (right, left) if spec is not None]
    asymptote = None
    if offset is not None and method is Method.GM:
        asymptote = _optional(lambda: bounds.gm_right_constant_asymptote(offset, epsilon))
    k = None
    if delta_prob is not None:
        k = _optional(lambda: bounds.sample_complexity(alpha, epsilon, delta_prob, method).k)
    return [
        alpha,
        offset,
        epsilon,
        method,
        right.G if right else None,
        left.G if left else None,
        max(constants) if constants else None,
        right.inner_constant if right else None,
        left.inner_constant if left else None,
        asymptote,
        k,
    ]


def _has_bound(method: Method, alpha: float) -> bool:
    if method is Method.HM:
        return alpha < 1.0
    if method is Method.MLE05:
        return alpha == 0.5
    return True


def _bounds_grid(args: Namespace) -> Iterator[List[object]]:
    method = Method(args.method)
    epsilons = read_field("epsilon", EPSILON_GRID, args.epsilon)
    if args.mode == "delta":
        for offset in read_field("delta", DELTA_GRID, args.delta):
            for alpha in (1.0 - offset, 1.0 + offset):
                for epsilon in epsilons:
                    yield _bounds_row(alpha, offset, epsilon, method, args.delta_prob)
    else:
        for alpha in read_field("alpha", ALPHA_GRID, args.alpha):
            if not _has_bound(method, alpha):
                continue
            for epsilon in epsilons:
                yield _bounds_row(alpha, None, epsilon, method, args.delta_prob)


def cmd_bounds_table(args: Namespace) -> int:
    if args.mode == "delta" and not args.delta:
        raise DomainError("delta mode needs --delta values")
    with open_output(args.out) as out:
        write_csv(BOUNDS_COLUMNS, _bounds_grid(args), out)
    return 0


def _optional(f: Callable[[], float]) -> Optional[float]:
    try:
        return f()
    except Failure:
        return None


def cmd_curves(args: Namespace) -> int:
    def row(alpha: float) -> List[object]:
        power = estimators.solve_optimal_lambda(alpha)
        return [
            alpha,
            estimators.gm_variance_factor(alpha),
            _optional(lambda: estimators.hm_variance_factor(alpha)),
            power.g_min,
            power.lambda_star,
            bounds.symmetric_gm_reference_variance(alpha),
        ]

    alphas = [a for a in args.alpha if a != 1.0]
    with open_output(args.out) as out:
        write_csv(CURVE_COLUMNS, (row(alpha) for alpha in alphas), out)
    return 0


def cmd_lambda(args: Namespace) -> int:
    points = read_field("points", GRID_POINTS, args.points)
    lo = read_field("lo", FINITE, args.lo)
    hi = read_field("hi", FINITE, args.hi)
    grid: Sequence[float] = np.linspace(lo, hi, points).tolist()
    rows = (
        [alpha, lam, _optional(lambda: estimators.power_variance_factor(lam, alpha))]
        for alpha in args.alpha
        for lam in grid
    )
    with open_output(args.out) as out:
        write_csv(LAMBDA_COLUMNS, rows, out)
    return 0


COMMANDS: Dict[str, Callable[[Namespace], int]] = {
    "gen": cmd_gen,
    "sketch": cmd_sketch,
    "merge": cmd_merge,
    "estimate": cmd_estimate,
    "exact": cmd_exact,
    "experiment-variance": cmd_experiment_variance,
    "experiment-tails": cmd_experiment_tails,
    "bounds-table": cmd_bounds_table,
    "curves": cmd_curves,
    "lambda": cmd_lambda,
}


def default_alpha_grid() -> List[float]:
    """0.05, 0.10, ..., 1.95 without alpha = 1"""
    return [round(0.05 * i, 10) for i in range(1, 40) if i != 20]
