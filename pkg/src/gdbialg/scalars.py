"""Exact coefficient fields: the rationals and prime fields F_p with p > 2.

Raw values are plain Python numbers: ``int``/``Fraction`` over Q, ``int`` in
``[0, p)`` over F_p.  Hot code (elements, products) works on raw values through
a :class:`Field`; :class:`Scalar` is the checked, user-facing wrapper.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache


class FieldError(ValueError):
    """Invalid field specification (non-prime or p = 2)."""


class FieldMismatch(TypeError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


class NegativeUpperIndex(ValueError):
    pass


class ScalarParseError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


_SCALAR_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class Field:
    """Either Q (``p is None``) or the prime field F_p."""

    __slots__ = ("p",)

    def __init__(self, p: int | None = None):
        if p is not None:
            if not isinstance(p, int) or not _is_prime(p):
                raise FieldError(f"characteristic must be prime, got {p!r}")
            if p == 2:
                raise FieldError("characteristic 2 is not supported (need p > 2)")
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"

    @property
    def is_rational(self) -> bool:
        return self.p is None

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    @property
    def tag(self) -> str:
        return "Q" if self.p is None else f"F{self.p}"

    @classmethod
    def from_tag(cls, tag) -> "Field":
        if isinstance(tag, int):
            return cls(tag)
        if tag in ("Q", "QQ"):
            return cls(None)
        m = re.fullmatch(r"(?:F|GF)\(?(\d+)\)?", str(tag).strip())
        if not m:
            raise FieldError(f"unknown field tag {tag!r}")
        return cls(int(m.group(1)))

    # raw arithmetic -------------------------------------------------------

    def coerce(self, x):
        """Bring an int, Fraction, Scalar or text literal into canonical raw form."""
        if isinstance(x, Scalar):
            if x.field != self:
                raise FieldMismatch(f"{x.field!r} scalar used in {self!r}")
            return x.value
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return x if self.p is None else x % self.p
        if isinstance(x, Fraction):
            if self.p is None:
                return x.numerator if x.denominator == 1 else x
            if x.denominator % self.p == 0:
                raise DivisionByZero(f"denominator of {x} vanishes mod {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        raise TypeError(f"cannot coerce {type(x).__name__} into {self!r}")

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else (a * b) % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self.p is None:
            r = Fraction(1) / a
            return r.numerator if r.denominator == 1 else r
        return pow(a, -1, self.p)

    def div(self, a, b):
        return self.normalize(self.mul(a, self.inv(b)))

    def normalize(self, a):
        if self.p is None and isinstance(a, Fraction) and a.denominator == 1:
            return a.numerator
        return a

    def parse(self, text: str):
        m = _SCALAR_RE.match(text)
        if not m:
            raise ScalarParseError(f"not a scalar literal: {text!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise DivisionByZero(f"zero denominator in {text!r}")
        if self.p is not None and m.group(2) and den % self.p == 0:
            raise ScalarParseError(f"denominator of {text!r} is not invertible mod {self.p}")
        return self.coerce(Fraction(num, den))

    def render(self, a) -> str:
        if self.p is None:
            a = Fraction(a)
            if a.denominator == 1:
                return str(a.numerator)
            return f"{a.numerator}/{a.denominator}"
        return str(a % self.p)

    def __call__(self, x) -> "Scalar":
        return Scalar(self, self.coerce(x))

    def elements(self):
        """All elements of a prime field, in increasing residue order."""
        if self.p is None:
            raise ValueError("Q is infinite")
        return range(self.p)

    def binomial(self, n: int, k: int):
        return self.coerce(binomial(n, k))


QQ = Field(None)


def GF(p: int) -> Field:
    return Field(p)


@lru_cache(maxsize=None)
def binomial(n: int, k: int) -> int:
    """Integer binomial coefficient with C(n, k) = 0 for k < 0 or k > n.

    Callers reduce into F_p themselves; a negative upper index is a caller bug.
    """
    if n < 0:
        raise NegativeUpperIndex(f"binomial({n}, {k}) has negative upper index")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


class Scalar:
    """An exact field element carrying its field; mixing fields raises."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", field.normalize(value))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        return Scalar(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return Scalar(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return Scalar(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Scalar(self.field, self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return Scalar(self.field, self.field.div(self._other(other), self.value))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def inverse(self) -> "Scalar":
        return Scalar(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return self.value == other.value
        try:
            return self.value == self.field.coerce(other)
        except (TypeError, ScalarParseError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return self.value != 0

    def __str__(self):
        return self.field.render(self.value)

    def __repr__(self):
        return f"{self.field!r}({self})"


def scalar_arith(op: str, a: Scalar, b: Scalar | None = None):
    """Dispatch one of add/sub/mul/div/neg/inv/eq on checked scalars."""
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    if b is None:
        raise TypeError(f"{op} needs two operands")
    if op == "eq":
        return a == b
    return {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}[op](b)
