"""Nonnegative reals stored by their natural logarithm.

Nested moduli such as ``Psi^N(eps)`` leave the double-precision range after a
handful of compositions, so the bound evaluator does all of its arithmetic on
``LogReal`` values.  A ``LogReal`` may wrap a scalar or a numpy array of logs;
arithmetic is elementwise in the array case.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError

_LN10 = math.log(10.0)
_TWO_53 = 2.0**53


def _is_array(x):
    return isinstance(x, np.ndarray) and x.ndim > 0


class LogReal:
    """A nonnegative real ``x`` represented as ``log(x)``; zero is ``log = -inf``."""

    __slots__ = ("log",)

    def __init__(self, log_value):
        if _is_array(log_value):
            self.log = np.asarray(log_value, dtype=float)
        else:
            self.log = float(log_value)

    # construction -----------------------------------------------------

    @classmethod
    def from_real(cls, x) -> "LogReal":
        if isinstance(x, LogReal):
            return x
        if _is_array(x):
            arr = np.asarray(x, dtype=float)
            if np.any(arr < 0) or np.any(np.isnan(arr)):
                raise InvalidInputError("LogReal holds nonnegative reals only")
            with np.errstate(divide="ignore"):
                return cls(np.log(arr))
        x = float(x)
        if x < 0 or math.isnan(x):
            raise InvalidInputError(f"LogReal holds nonnegative reals only, got {x}")
        if x == 0.0:
            return cls(-math.inf)
        if math.isinf(x):
            return cls(math.inf)
        return cls(math.log(x))

    @classmethod
    def zero(cls) -> "LogReal":
        return cls(-math.inf)

    @classmethod
    def from_log10(cls, value) -> "LogReal":
        return cls(value * _LN10)

    # conversion -------------------------------------------------------

    def to_real(self):
        """Exponentiate back; underflows to 0.0 / overflows to inf like floats do."""
        if _is_array(self.log):
            with np.errstate(over="ignore", under="ignore"):
                return np.exp(self.log)
        try:
            return math.exp(self.log)
        except OverflowError:
            return math.inf

    def __float__(self):
        return float(self.to_real())

    def log10(self):
        return self.log / _LN10

    def is_zero(self):
        if _is_array(self.log):
            return np.isneginf(self.log)
        return self.log == -math.inf

    def ceil_to_integer_if_representable(self):
        """Exact ``ceil`` as a Python int when the value is below 2**53, else ``None``.

        The value is only known to within a few ulps after exponentiation, so a
        result within 8 ulps of an integer is snapped to it before the ceiling.
        """
        if _is_array(self.log):
            raise InvalidInputError("ceil is defined for scalar LogReal values only")
        if self.log >= math.log(_TWO_53):
            return None
        x = self.to_real()
        nearest = round(x)
        if abs(x - nearest) <= 8 * math.ulp(max(x, 1.0)):
            return int(nearest)
        return int(math.ceil(x))

    # arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "LogReal":
        if isinstance(other, LogReal):
            return other
        return LogReal.from_real(other)

    def mul(self, other) -> "LogReal":
        other = self._coerce(other)
        return LogReal(self.log + other.log)

    def div(self, other) -> "LogReal":
        other = self._coerce(other)
        if not _is_array(other.log) and other.log == -math.inf:
            raise ZeroDivisionError("LogReal division by zero")
        return LogReal(self.log - other.log)

    def pow(self, k) -> "LogReal":
        if _is_array(k):
            raise InvalidInputError("LogReal exponent must be a scalar")
        k = float(k)
        zero = self.is_zero()
        if k <= 0 and np.any(zero):
            raise InvalidInputError("zero raised to a nonpositive power")
        if k == 0:
            return LogReal(self.log * 0.0)
        return LogReal(self.log * k)

    def add(self, other) -> "LogReal":
        other = self._coerce(other)
        if _is_array(self.log) or _is_array(other.log):
            return LogReal(np.logaddexp(self.log, other.log))
        a, b = self.log, other.log
        if a < b:
            a, b = b, a
        if b == -math.inf:
            return LogReal(a)
        return LogReal(a + math.log1p(math.exp(b - a)))

    def compare(self, other):
        """-1, 0 or 1 (elementwise for arrays)."""
        other = self._coerce(other)
        return np.sign(self.log - other.log) if _is_array(self.log - other.log) else (
            (self.log > other.log) - (self.log < other.log)
        )

    __mul__ = mul
    __truediv__ = div
    __add__ = add
    __pow__ = pow

    def __rmul__(self, other):
        return self.mul(other)

    def __radd__(self, other):
        return self.add(other)

    def __rtruediv__(self, other):
        return self._coerce(other).div(self)

    def __lt__(self, other):
        return self.log < self._coerce(other).log

    def __le__(self, other):
        return self.log <= self._coerce(other).log

    def __gt__(self, other):
        return self.log > self._coerce(other).log

    def __ge__(self, other):
        return self.log >= self._coerce(other).log

    def __eq__(self, other):
        try:
            return self.log == self._coerce(other).log
        except (InvalidInputError, TypeError):
            return NotImplemented

    __hash__ = None

    def __repr__(self):
        if _is_array(self.log):
            return f"LogReal(log10={self.log10()!r})"
        return f"LogReal(log10={self.log10():.12g})"


def lr_minimum(a, b):
    """Elementwise minimum that understands ``LogReal`` operands."""
    if isinstance(a, LogReal) or isinstance(b, LogReal):
        a, b = LogReal._coerce(a), LogReal._coerce(b)
        return LogReal(np.minimum(a.log, b.log))
    return np.minimum(a, b)


def as_logreal(x) -> LogReal:
    return LogReal.from_real(x)
