"""
Composable value readers used to validate parameters and parse stream text.

A schema's `read` never raises; it returns a `Result` carrying either the
converted value or a `SchemaError`. `from_value` raises the error instead.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Generic, List, Optional, TypeVar
import math
import numbers

from .result import DomainError

T = TypeVar("T")
I = TypeVar("I")  # noqa: E741
Settings = TypeVar("Settings")


@dataclass
class Result(Generic[T]):
    """Represents a validation result"""

    ok: Optional[T] = None
    error: Optional["SchemaError"] = None


class SchemaError(DomainError):
    """Base class for schema validation errors"""

    def __init__(self, message: str = "") -> None:
        super().__init__(message)


class API(ABC, Generic[T, I, Settings]):
    """Base class for all schema validators"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings

    def __str__(self) -> str:
        return f"new {self.__class__.__name__}()"

    @abstractmethod
    def read_with(self, input_value: I, settings: Any) -> Result[T]:
        """Validate input with settings"""

    def read(self, input_value: I) -> Result[T]:
        """Validate input value"""
        return self.read_with(input_value, self.settings)

    def is_valid(self, value: Any) -> bool:
        """Check if value matches schema"""
        return self.read(value).error is None

    def from_value(self, value: Any) -> T:
        """Convert value to schema type"""
        result = self.read(value)
        if result.error:
            raise result.error
        return result.ok  # type: ignore[return-value]

    def refine(self, predicate: Callable[[T], bool], expect: str) -> "Refined[T, I]":
        """Narrow the schema with a predicate on the converted value"""
        return Refined(self, predicate, expect)

    def finite(self) -> "Refined[T, I]":
        return self.refine(lambda v: math.isfinite(v), "finite number")  # type: ignore

    def positive(self) -> "Refined[T, I]":
        return self.refine(lambda v: v > 0, "positive number")  # type: ignore

    def within(
        self,
        lo: float,
        hi: float,
        lo_open: bool = False,
        hi_open: bool = False,
    ) -> "Refined[T, I]":
        """Restrict to an interval; each end may be open or closed"""
        left = "(" if lo_open else "["
        right = ")" if hi_open else "]"

        def inside(v: Any) -> bool:
            above = v > lo if lo_open else v >= lo
            below = v < hi if hi_open else v <= hi
            return bool(above and below)

        return self.refine(inside, f"number in {left}{lo}, {hi}{right}")

    def excluding(self, value: float) -> "Refined[T, I]":
        return self.refine(lambda v: v != value, f"number other than {value}")


class Refined(API[T, I, None]):
    """Schema narrowed by a predicate"""

    def __init__(self, base: API, predicate: Callable[[T], bool], expect: str):
        super().__init__(None)
        self.base = base
        self.predicate = predicate
        self.expect = expect

    def read_with(self, input_value: I, settings: None) -> Result[T]:
        result = self.base.read(input_value)
        if result.error:
            return result
        if not self.predicate(result.ok):  # type: ignore[arg-type]
            return Result(error=TypeError_(self.expect, result.ok))
        return result

    def __str__(self) -> str:
        return f"{self.base}.refine({self.expect})"


class ArrayOf(API[List[T], Any, API[T, Any, Any]]):
    """Schema for arrays"""

    def read_with(self, input_value: Any, schema: API[T, Any, Any]) -> Result[List[T]]:
        if isinstance(input_value, (str, bytes)) or not hasattr(input_value, "__iter__"):
            return Result(error=TypeError_("array", input_value))

        results = []
        for index, value in enumerate(input_value):
            result = schema.read(value)
            if result.error:
                return Result(error=ElementError(index, result.error))
            results.append(result.ok)
        return Result(ok=results)

    @property
    def element(self) -> API:
        return self.settings  # type: ignore[return-value]

    def __str__(self) -> str:
        return f"array({self.element})"


class TypeError_(SchemaError):
    """Type mismatch error"""

    def __init__(self, expect: str, actual: Any):
        self.expect = expect
        self.actual = actual
        super().__init__(
            f"Expected value of type {expect} instead got {to_string(actual)}"
        )


class ElementError(SchemaError):
    """Array element error"""

    def __init__(self, index: int, cause: SchemaError):
        self.index = index
        self.cause = cause
        super().__init__(
            f"Array contains invalid element at {index}:\n  - {cause.message}"
        )


class FieldError(SchemaError):
    """Named field error"""

    def __init__(self, key: str, cause: SchemaError):
        self.key = key
        self.cause = cause
        super().__init__(f"Invalid field '{key}':\n  - {cause.message}")


def to_string(value: Any) -> str:
    """Convert value to string representation"""
    if value is None:
        return "null"
    elif isinstance(value, bool):
        return str(value).lower()
    elif isinstance(value, numbers.Number):
        return repr(value)
    elif isinstance(value, str):
        return f'"{value}"'
    elif isinstance(value, (list, tuple)):
        return "array"
    else:
        return type(value).__name__


class Number(API[float, Any, None]):
    """Real number schema validator"""

    def read_with(self, input_value: Any, settings: None) -> Result[float]:
        if isinstance(input_value, numbers.Real) and not isinstance(input_value, bool):
            return Result(ok=float(input_value))
        return Result(error=TypeError_("number", input_value))


class Integer(API[int, Any, None]):
    """Integer schema validator"""

    def read_with(self, input_value: Any, settings: None) -> Result[int]:
        if isinstance(input_value, numbers.Integral) and not isinstance(
            input_value, bool
        ):
            return Result(ok=int(input_value))
        return Result(error=TypeError_("integer", input_value))


class NumberText(API[float, str, None]):
    """Decimal real written as text"""

    def read_with(self, input_value: str, settings: None) -> Result[float]:
        try:
            return Result(ok=float(input_value))
        except (TypeError, ValueError):
            return Result(error=TypeError_("decimal number", input_value))


class IntegerText(API[int, str, None]):
    """Decimal integer written as text"""

    def read_with(self, input_value: str, settings: None) -> Result[int]:
        if isinstance(input_value, str) and input_value.strip().lstrip("+-").isdigit():
            return Result(ok=int(input_value))
        return Result(error=TypeError_("decimal integer", input_value))


# Factory functions for basic types
def number() -> Number:
    return Number()


def integer() -> Integer:
    return Integer()


def number_text() -> NumberText:
    return NumberText()


def integer_text() -> IntegerText:
    return IntegerText()


def array(schema: API[T, Any, Any]) -> ArrayOf[T]:
    return ArrayOf(schema)


def field(key: str, schema: API[T, Any, Any], value: Any) -> T:
    """Read one named value, wrapping failures in a FieldError"""
    result = schema.read(value)
    if result.error:
        raise FieldError(key, result.error)
    return result.ok  # type: ignore[return-value]
