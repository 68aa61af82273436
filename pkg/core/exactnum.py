"""
Exact arithmetic in the quadratic field Q[sqrt2]

Every coordinate, length and measure in the toolkit is a QuadNum. Values are
stored as an integer triple (a, b, d) meaning (a + b*sqrt2)/d with d > 0 and
gcd(a, b, d) = 1, so the representation is canonical and equality is
component equality.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering
from typing import Any, Dict, Union

from pydantic import GetCoreSchemaHandler, GetJsonSchemaHandler
from pydantic_core import core_schema

Rational = Union[int, Fraction]
QuadLike = Union["QuadNum", int, Fraction]

_SQRT2_TOKENS = ("sqrt(2)", "sqrt2", "√2", "alpha")


def _sign_of(a: int, b: int) -> int:
    """Sign of a + b*sqrt2 decided by rational squaring."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    # Opposite signs: the larger square wins
    if a * a > 2 * b * b:
        return 1 if a > 0 else -1
    return 1 if b > 0 else -1


@total_ordering
class QuadNum:
    __slots__ = ("_a", "_b", "_d", "_hash")

    def __init__(self, rat: Any = 0, irr: Any = 0) -> None:
        rat = Fraction(rat)
        irr = Fraction(irr)
        d = rat.denominator * irr.denominator // math.gcd(rat.denominator, irr.denominator)
        self._set(rat.numerator * (d // rat.denominator), irr.numerator * (d // irr.denominator), d)

    def _set(self, a: int, b: int, d: int) -> None:
        if d < 0:
            a, b, d = -a, -b, -d
        g = math.gcd(math.gcd(a, b), d)
        if g > 1:
            a, b, d = a // g, b // g, d // g
        self._a = a
        self._b = b
        self._d = d
        self._hash = None

    @classmethod
    def _make(cls, a: int, b: int, d: int) -> QuadNum:
        obj = cls.__new__(cls)
        obj._set(a, b, d)
        return obj

    # ============================================
    # Constructors
    # ============================================

    @classmethod
    def from_int(cls, x: int) -> QuadNum:
        return cls._make(x, 0, 1)

    @classmethod
    def from_fraction(cls, x: Rational) -> QuadNum:
        x = Fraction(x)
        return cls._make(x.numerator, 0, x.denominator)

    @classmethod
    def coerce(cls, x: QuadLike) -> QuadNum:
        if isinstance(x, QuadNum):
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not a number here")
        if isinstance(x, (int, Fraction)):
            return cls.from_fraction(x)
        if isinstance(x, str):
            return cls.parse(x)
        raise TypeError(f"cannot convert {type(x).__name__} to QuadNum")

    @classmethod
    def parse(cls, text: str) -> QuadNum:
        """
        Parse a human form such as "3", "2.12", "1/2+1/2*sqrt2", "1+√2" or "-alpha"

        Raises:
            ValueError: If the text is not a sum of rational and rational*sqrt2 terms
        """
        s = text.strip().replace(" ", "")
        for token in _SQRT2_TOKENS:
            s = s.replace(token, "s")
        if not s:
            raise ValueError(f"empty number: {text!r}")
        rat = Fraction(0)
        irr = Fraction(0)
        terms = re.findall(r"[+-]?[^+-]+", s)
        if "".join(terms) != s:
            raise ValueError(f"malformed number: {text!r}")
        try:
            for term in terms:
                if term.endswith("s"):
                    coef = term[:-1].rstrip("*")
                    if coef in ("", "+"):
                        irr += 1
                    elif coef == "-":
                        irr -= 1
                    else:
                        irr += Fraction(coef)
                else:
                    rat += Fraction(term)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"malformed number: {text!r}") from e
        return cls(rat, irr)

    # ============================================
    # Components
    # ============================================

    @property
    def rat(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def irr(self) -> Fraction:
        return Fraction(self._b, self._d)

    def is_rational(self) -> bool:
        return self._b == 0

    def is_integer(self) -> bool:
        return self._b == 0 and self._d == 1

    def integer_components(self) -> tuple[int, int] | None:
        """(m1, m2) when self = m1 + m2*sqrt2 with integers, else None."""
        if self._d != 1:
            return None
        return self._a, self._b

    def conjugate(self) -> QuadNum:
        return QuadNum._make(self._a, -self._b, self._d)

    def norm(self) -> Fraction:
        return Fraction(self._a * self._a - 2 * self._b * self._b, self._d * self._d)

    # ============================================
    # Ordering and hashing
    # ============================================

    def sign(self) -> int:
        return _sign_of(self._a, self._b)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QuadNum):
            return self._a == other._a and self._b == other._b and self._d == other._d
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self == QuadNum.from_fraction(other)
        return NotImplemented

    def __lt__(self, other: QuadLike) -> bool:
        try:
            other = QuadNum.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self) -> int:
        if self._hash is None:
            if self._b == 0:
                # Agree with hash(Fraction) so rational QuadNums mix in sets
                self._hash = hash(Fraction(self._a, self._d))
            else:
                self._hash = hash((self._a, self._b, self._d))
        return self._hash

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    # ============================================
    # Field arithmetic
    # ============================================

    def __add__(self, other: QuadLike) -> QuadNum:
        if not isinstance(other, QuadNum):
            try:
                other = QuadNum.coerce(other)
            except TypeError:
                return NotImplemented
        if self._d == other._d:
            return QuadNum._make(self._a + other._a, self._b + other._b, self._d)
        return QuadNum._make(
            self._a * other._d + other._a * self._d,
            self._b * other._d + other._b * self._d,
            self._d * other._d,
        )

    def __radd__(self, other: QuadLike) -> QuadNum:
        return self + other

    def __neg__(self) -> QuadNum:
        return QuadNum._make(-self._a, -self._b, self._d)

    def __pos__(self) -> QuadNum:
        return self

    def __sub__(self, other: QuadLike) -> QuadNum:
        if not isinstance(other, QuadNum):
            try:
                other = QuadNum.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other: QuadLike) -> QuadNum:
        return (-self) + other

    def __mul__(self, other: QuadLike) -> QuadNum:
        if not isinstance(other, QuadNum):
            try:
                other = QuadNum.coerce(other)
            except TypeError:
                return NotImplemented
        return QuadNum._make(
            self._a * other._a + 2 * self._b * other._b,
            self._a * other._b + self._b * other._a,
            self._d * other._d,
        )

    def __rmul__(self, other: QuadLike) -> QuadNum:
        return self * other

    def inverse(self) -> QuadNum:
        n = self._a * self._a - 2 * self._b * self._b
        if n == 0:
            raise ZeroDivisionError("QuadNum division by zero")
        return QuadNum._make(self._d * self._a, -self._d * self._b, n)

    def __truediv__(self, other: QuadLike) -> QuadNum:
        if not isinstance(other, QuadNum):
            try:
                other = QuadNum.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: QuadLike) -> QuadNum:
        return QuadNum.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> QuadNum:
        if n < 0:
            return self.inverse() ** -n
        result = QuadNum._make(1, 0, 1)
        base = self
        while n > 0:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self) -> QuadNum:
        return -self if self.sign() < 0 else self

    def __floor__(self) -> int:
        if self._b == 0:
            return self._a // self._d
        r = math.isqrt(2 * self._b * self._b)
        t = r if self._b > 0 else -r - 1
        return (self._a + t) // self._d

    def __ceil__(self) -> int:
        return -math.floor(-self)

    def __round__(self, ndigits: None = None) -> int:
        # Halves round up
        return math.floor(self + Fraction(1, 2))

    # ============================================
    # Views
    # ============================================

    def to_float(self) -> float:
        return float(Fraction(self._a, self._d)) + float(Fraction(self._b, self._d)) * math.sqrt(2)

    def __float__(self) -> float:
        return self.to_float()

    def to_json(self) -> Dict[str, list]:
        rat, irr = self.rat, self.irr
        return {
            "rat": [str(rat.numerator), str(rat.denominator)],
            "irr": [str(irr.numerator), str(irr.denominator)],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> QuadNum:
        try:
            rat = Fraction(int(data["rat"][0]), int(data["rat"][1]))
            irr = Fraction(int(data.get("irr", [0, 1])[0]), int(data.get("irr", [0, 1])[1]))
        except (KeyError, IndexError, TypeError, ValueError, ZeroDivisionError) as e:
            raise ValueError(f"invalid QuadNum JSON: {data!r}") from e
        return cls(rat, irr)

    def __repr__(self) -> str:
        return f"QuadNum({self.rat}, {self.irr})"

    def __str__(self) -> str:
        rat, irr = self.rat, self.irr
        if irr == 0:
            return str(rat)
        if rat == 0:
            return f"{irr}√2"
        return f"{rat}{'+' if irr > 0 else '-'}{abs(irr)}√2"

    # ============================================
    # Pydantic integration
    # ============================================

    @classmethod
    def _validate(cls, value: Any) -> QuadNum:
        if isinstance(value, dict):
            return cls.from_json(value)
        if isinstance(value, float):
            raise ValueError("floats are not exact; pass a string such as '2.12'")
        try:
            return cls.coerce(value)
        except TypeError as e:
            raise ValueError(str(e)) from e

    @classmethod
    def __get_pydantic_core_schema__(cls, source_type: Any, handler: GetCoreSchemaHandler) -> core_schema.CoreSchema:
        return core_schema.no_info_plain_validator_function(
            cls._validate,
            serialization=core_schema.plain_serializer_function_ser_schema(
                lambda v: v.to_json(), when_used="json"
            ),
        )

    @classmethod
    def __get_pydantic_json_schema__(cls, schema: core_schema.CoreSchema, handler: GetJsonSchemaHandler) -> Dict[str, Any]:
        pair = {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}
        return {
            "type": "object",
            "properties": {"rat": pair, "irr": pair},
            "required": ["rat", "irr"],
            "description": "rat + irr*sqrt2 with decimal-string numerator/denominator pairs",
        }


ZERO = QuadNum.from_int(0)
ONE = QuadNum.from_int(1)
ALPHA = QuadNum(0, 1)
KAPPA = ONE + ALPHA


def q(value: Any) -> QuadNum:
    """Shorthand coercion used throughout services and tests."""
    return QuadNum.coerce(value)


def dyadic(k: int) -> QuadNum:
    """2^-k as a QuadNum."""
    return QuadNum._make(1, 0, 1 << k) if k >= 0 else QuadNum._make(1 << -k, 0, 1)
