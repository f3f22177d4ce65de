from dataclasses import dataclass, fields
from enum import Enum
from typing import List, Optional
import math

from ..schema.schema import field as read_field, integer, number


class Method(str, Enum):
    """Scale estimators for k samples of S(alpha, 1, F)"""

    GM = "gm"
    GM_BETA = "gm-beta"
    HM = "hm"
    MLE05 = "mle05"
    OP = "op"


class Side(str, Enum):
    """Tail of a deviation bound"""

    RIGHT = "right"
    LEFT = "left"


ALPHA = number().finite().within(0.0, 2.0, lo_open=True)
BETA = number().finite().within(-1.0, 1.0)
SCALE = number().finite().positive()
INDEX = integer().positive()
SEED = integer().within(0, 2**64 - 1)


@dataclass(frozen=True)
class StableParams:
    """(alpha, beta, F) of a skewed stable law S(alpha, beta, F)"""

    alpha: float
    beta: float = 1.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", read_field("alpha", ALPHA, self.alpha))
        object.__setattr__(self, "beta", read_field("beta", BETA, self.beta))
        object.__setattr__(self, "scale", read_field("scale", SCALE, self.scale))

    @property
    def fully_skewed(self) -> bool:
        return self.beta == 1.0

    def with_scale(self, scale: float) -> "StableParams":
        return StableParams(self.alpha, self.beta, scale)


@dataclass(frozen=True)
class StreamUpdate:
    """One Turnstile tuple (i, I_t)"""

    index: int
    increment: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", read_field("index", INDEX, self.index))


@dataclass(frozen=True)
class EstimateReport:
    """Point estimate of F_(alpha) plus its asymptotic variance factor V"""

    estimate: float
    method: Method
    k: int
    asymptotic_variance_factor: float
    alpha: float
    degenerate: bool = False

    @property
    def standard_error(self) -> float:
        """sqrt(V / k) * estimate, the first-order standard deviation"""
        return self.estimate * math.sqrt(self.asymptotic_variance_factor / self.k)


@dataclass(frozen=True)
class OptimalPower:
    """Minimizer lambda* of g(lambda; alpha) and the minimized factor"""

    alpha: float
    lambda_star: float
    g_min: float


@dataclass(frozen=True)
class TailBoundSpec:
    """Chernoff exponent: Pr(deviation of at least epsilon * F) <= exp(-k * rate)"""

    alpha: float
    epsilon: float
    side: Side
    estimator: Method
    rate: float
    inner_constant: float
    k0: Optional[int] = None
    residual: float = 0.0

    @property
    def G(self) -> float:  # noqa: N802
        return self.epsilon**2 / self.rate

    def bound(self, k: int) -> float:
        return math.exp(-k * self.rate)


@dataclass(frozen=True)
class ComplexityResult:
    """k = ceil(G * log(2 / delta) / epsilon^2), at least 2"""

    k: int
    G: float
    epsilon: float
    delta: float


@dataclass
class ExperimentRow:
    """One CSV row of a Monte Carlo experiment"""

    alpha: float
    estimator: str
    k: int
    trials: int
    empirical_mean: Optional[float] = None
    empirical_V: Optional[float] = None
    theoretical_V: Optional[float] = None
    epsilon: Optional[float] = None
    side: Optional[str] = None
    empirical_tail: Optional[float] = None
    bound_tail: Optional[float] = None

    @classmethod
    def columns(cls) -> List[str]:
        return [f.name for f in fields(cls)]
