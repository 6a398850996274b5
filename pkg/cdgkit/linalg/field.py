from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any

from sympy import Rational, isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.domains.domain import Domain

Scalar = Any
"""An element of a sympy ground domain (``QQ`` or ``GF(p)``)."""


@lru_cache(maxsize=None)
def _finite_domain(p: int) -> Domain:
    return GF(p, symmetric=False)


@dataclass(frozen=True)
class Field:
    """An exact ground field: the rationals (characteristic 0) or F_p.

    Elements are sympy domain elements. F_p elements use canonical
    representatives in [0, p).
    """

    characteristic: int = 0

    def __post_init__(self) -> None:
        p = self.characteristic
        if p != 0 and (p >= 2**31 or not isprime(p)):
            raise ValueError(f"characteristic must be 0 or a prime below 2**31, got {p}")

    @classmethod
    def rationals(cls) -> Field:
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> Field:
        return cls(p)

    @classmethod
    def parse(cls, text: str | int) -> Field:
        """Accept ``QQ``, ``GF(p)``, ``F_p`` or a bare prime."""
        if isinstance(text, int):
            return cls(text)
        raw = text.strip().upper().replace(" ", "")
        if raw in {"QQ", "Q", "0"}:
            return cls(0)
        for prefix in ("GF(", "F_", "F"):
            if raw.startswith(prefix):
                raw = raw[len(prefix) :].rstrip(")")
                break
        try:
            return cls(int(raw))
        except ValueError as e:
            raise ValueError(f"cannot parse field {text!r}") from e

    @cached_property
    def domain(self) -> Domain:
        return QQ if self.characteristic == 0 else _finite_domain(self.characteristic)

    @property
    def name(self) -> str:
        return "QQ" if self.characteristic == 0 else f"GF({self.characteristic})"

    @property
    def is_finite(self) -> bool:
        return self.characteristic != 0

    @property
    def zero(self) -> Scalar:
        return self.domain.zero

    @property
    def one(self) -> Scalar:
        return self.domain.one

    def __call__(self, value: Any) -> Scalar:
        return self.convert(value)

    def convert(self, value: Any) -> Scalar:
        K = self.domain
        if K.of_type(value):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not field elements")
        if isinstance(value, int):
            return K(value) if self.is_finite else QQ(value, 1)
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, Rational):
            value = Fraction(int(value.p), int(value.q))
        if isinstance(value, Fraction):
            if self.is_finite:
                den = K(value.denominator)
                if not den:
                    raise ZeroDivisionError(f"{value} has no image in {self.name}")
                return K(value.numerator) / den
            return QQ(value.numerator, value.denominator)
        # elements of another sympy domain, e.g. ZZ
        return K.convert(value)

    def to_int(self, x: Scalar) -> int:
        if self.is_finite:
            return int(x) % self.characteristic
        frac = self.to_fraction(x)
        if frac.denominator != 1:
            raise ValueError(f"{x} is not an integer")
        return frac.numerator

    def to_fraction(self, x: Scalar) -> Fraction:
        if self.is_finite:
            return Fraction(self.to_int(x))
        return Fraction(int(x.numerator), int(x.denominator))

    def to_text(self, x: Scalar) -> str:
        if self.is_finite:
            return str(self.to_int(x))
        frac = self.to_fraction(x)
        return str(frac.numerator) if frac.denominator == 1 else f"{frac.numerator}/{frac.denominator}"

    def signed(self, x: Scalar, exponent: int) -> Scalar:
        """Return (-1)^exponent * x."""
        return -x if exponent % 2 else x

    def sign(self, exponent: int) -> Scalar:
        return self.signed(self.one, exponent)

    def elements(self) -> list[Scalar]:
        if not self.is_finite:
            raise ValueError("the rationals cannot be enumerated")
        return [self.domain(i) for i in range(self.characteristic)]

    def __str__(self) -> str:
        return self.name
