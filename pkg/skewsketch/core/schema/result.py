from typing import Any, Dict
import json


class Failure(Exception):
    """
    Base class for every error raised by skewsketch.
    """

    @property
    def message(self) -> str:
        """Returns the failure message."""
        return self.__str__()

    @property
    def name(self) -> str:
        return self.__class__.__name__

    def details(self) -> Dict[str, Any]:
        """Extra structured fields carried by the failure."""
        return {}

    def to_json(self) -> str:
        """
        Returns a JSON representation of the failure.
        """
        return json.dumps({"name": self.name, "message": self.message, **self.details()})


class DomainError(Failure, ValueError):
    """An argument lies outside the domain of a formula (poles, ranges)."""


class NumericError(Failure, ArithmeticError):
    """A computation produced a non-finite value or failed to converge."""


class BracketError(NumericError):
    """The target function does not change sign across a bracket."""

    def __init__(self, lo: float, hi: float, f_lo: float, f_hi: float) -> None:
        self.lo, self.hi, self.f_lo, self.f_hi = lo, hi, f_lo, f_hi
        super().__init__(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={f_lo!r}, f(hi)={f_hi!r}"
        )

    def details(self) -> Dict[str, Any]:
        return {"lo": self.lo, "hi": self.hi}


class ConfigurationError(Failure, ValueError):
    """An estimator was requested for an alpha it does not support."""


class IncompatibleSketchError(Failure, ValueError):
    """Two sketches do not share (alpha, k, seed)."""


class SketchFormatError(Failure, ValueError):
    """Serialized sketch bytes are malformed."""


class InputError(Failure, ValueError):
    """A stream update carries an unusable value."""


class StreamParseError(Failure, ValueError):
    """A stream file line could not be parsed."""

    def __init__(self, line_number: int, reason: str) -> None:
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")

    def details(self) -> Dict[str, Any]:
        return {"line_number": self.line_number}


class PreconditionError(Failure, ValueError):
    """The aggregated signal is negative at evaluation time."""

    def __init__(self, index: int, value: float) -> None:
        self.index = index
        self.value = value
        super().__init__(
            f"A[{index}] = {value!r} < 0; the signal must be non-negative "
            "at evaluation time"
        )

    def details(self) -> Dict[str, Any]:
        return {"index": self.index, "value": self.value}
