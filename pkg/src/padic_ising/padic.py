"""Fixed-precision p-adic numbers.

A nonzero value is stored in the canonical form ``p**v * u`` where ``u`` is a
unit known modulo ``p**precision`` (``precision`` counts relative digits).
Zero is a separate state that remembers how many absolute digits are known
(``O(p**k)``), or ``None`` when the zero is exact.

Addition tracks cancellation: the absolute precision of a sum is the minimum
of the operands' absolute precisions, so when leading digits cancel the
relative precision of the result shrinks accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Union

from sympy import isprime

from .errors import (
    DivisionByZero,
    PrecisionExceeded,
    PrecisionUnderflow,
    ZeroHasNoDigits,
)

Rational = Union[int, Fraction]


def vp(n: int, p: int) -> int:
    """Exponent of ``p`` in the nonzero integer ``n``."""
    if n == 0:
        raise ValueError("v_p(0) is undefined")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicContext:
    prime: int
    working_precision: int = 32
    precision_floor: int = 8

    def __post_init__(self) -> None:
        if not isprime(self.prime):
            raise ValueError(f"{self.prime} is not prime")
        if not self.working_precision >= self.precision_floor >= 1:
            raise ValueError(
                "need working_precision >= precision_floor >= 1, got "
                f"{self.working_precision} and {self.precision_floor}"
            )

    def __call__(self, value: Rational, denominator: int = 1) -> PadicNumber:
        if isinstance(value, Fraction):
            return from_rational(value.numerator, value.denominator * denominator, self)
        return from_rational(value, denominator, self)

    def zero(self, absolute_precision: int | None = None) -> PadicNumber:
        return PadicNumber(self, None, 0, absolute_precision)

    def one(self) -> PadicNumber:
        return PadicNumber(self, 0, 1, self.working_precision)

    def with_precision(self, working_precision: int) -> PadicContext:
        return replace(self, working_precision=working_precision)


@total_ordering
@dataclass(frozen=True)
class Norm:
    """Exact p-adic absolute value ``prime**exponent``; ``exponent=None`` is 0."""

    prime: int
    exponent: int | None

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def _key(self) -> float:
        return -math.inf if self.exponent is None else self.exponent

    def _check(self, other: Norm) -> None:
        if not isinstance(other, Norm):
            raise TypeError(f"cannot compare Norm with {type(other).__name__}")
        if other.prime != self.prime:
            raise ValueError("norms over different primes")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Norm):
            return NotImplemented
        return self.prime == other.prime and self.exponent == other.exponent

    def __hash__(self) -> int:
        return hash((self.prime, self.exponent))

    def __lt__(self, other: Norm) -> bool:
        self._check(other)
        return self._key() < other._key()

    def __mul__(self, other: Norm) -> Norm:
        self._check(other)
        if self.is_zero or other.is_zero:
            return Norm(self.prime, None)
        return Norm(self.prime, self.exponent + other.exponent)

    def __truediv__(self, other: Norm) -> Norm:
        self._check(other)
        if other.is_zero:
            raise DivisionByZero("division by the zero norm")
        if self.is_zero:
            return self
        return Norm(self.prime, self.exponent - other.exponent)

    def __pow__(self, n: int) -> Norm:
        if self.is_zero:
            if n <= 0:
                raise DivisionByZero("non-positive power of the zero norm")
            return self
        return Norm(self.prime, self.exponent * n)

    def as_fraction(self) -> Fraction:
        if self.exponent is None:
            return Fraction(0)
        return Fraction(self.prime) ** self.exponent

    def __str__(self) -> str:
        return "0" if self.exponent is None else f"{self.prime}^{self.exponent}"


@dataclass(frozen=True, eq=False)
class PadicNumber:
    """A p-adic value ``p**valuation * unit + O(p**(valuation + precision))``.

    For zero, ``valuation`` is ``None``, ``unit`` is 0 and ``precision`` holds
    the absolute number of known digits (``None`` for an exact zero).
    """

    ctx: PadicContext
    valuation: int | None
    unit: int
    precision: int | None

    @property
    def prime(self) -> int:
        return self.ctx.prime

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    @property
    def absolute_precision(self) -> float:
        """Largest ``k`` such that the value is known modulo ``p**k``."""
        if self.is_zero:
            return math.inf if self.precision is None else self.precision
        return self.valuation + self.precision

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> PadicNumber:
        if isinstance(other, PadicNumber):
            if other.ctx.prime != self.ctx.prime:
                raise ValueError(
                    f"mixing primes {self.ctx.prime} and {other.ctx.prime}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx(other)
        return NotImplemented

    def __add__(self, other) -> PadicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return psum((self, other), self.ctx)

    __radd__ = __add__

    def __sub__(self, other) -> PadicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return psum((self, -other), self.ctx)

    def __rsub__(self, other) -> PadicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return psum((other, -self), self.ctx)

    def __neg__(self) -> PadicNumber:
        if self.is_zero:
            return self
        mod = self.prime**self.precision
        return PadicNumber(self.ctx, self.valuation, -self.unit % mod, self.precision)

    def __pos__(self) -> PadicNumber:
        return self

    def __mul__(self, other) -> PadicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero or other.is_zero:
            return _zero_product(self, other)
        prec = min(self.precision, other.precision)
        mod = self.prime**prec
        return PadicNumber(
            self.ctx,
            self.valuation + other.valuation,
            self.unit * other.unit % mod,
            prec,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> PadicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero:
            raise DivisionByZero("division by a p-adic zero")
        if self.is_zero:
            if self.precision is None:
                return self
            return self.ctx.zero(self.precision - other.valuation)
        prec = min(self.precision, other.precision)
        mod = self.prime**prec
        return PadicNumber(
            self.ctx,
            self.valuation - other.valuation,
            self.unit * pow(other.unit, -1, mod) % mod,
            prec,
        )

    def __rtruediv__(self, other) -> PadicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n: int) -> PadicNumber:
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return self.ctx.one()
        if self.is_zero:
            if n < 0:
                raise DivisionByZero("negative power of a p-adic zero")
            if self.precision is None:
                return self
            return self.ctx.zero(self.precision * n)
        mod = self.prime**self.precision
        return PadicNumber(
            self.ctx, self.valuation * n, pow(self.unit, n, mod), self.precision
        )

    def inverse(self) -> PadicNumber:
        return self**-1

    # -- comparison -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        """Agreement at the precision both sides carry."""
        if isinstance(other, (int, Fraction)):
            other = self.ctx(other)
        if not isinstance(other, PadicNumber):
            return NotImplemented
        if other.prime != self.prime:
            return False
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if self.valuation != other.valuation:
            return False
        mod = self.prime ** min(self.precision, other.precision)
        return (self.unit - other.unit) % mod == 0

    def __hash__(self) -> int:
        if self.is_zero:
            return hash((self.prime, None))
        floor = self.prime**self.ctx.precision_floor
        return hash((self.prime, self.valuation, self.unit % floor))

    # -- display ----------------------------------------------------------

    def __repr__(self) -> str:
        p = self.prime
        if self.is_zero:
            tail = "" if self.precision is None else f" + O({p}^{self.precision})"
            return f"PadicNumber(0{tail})"
        shown = digits(self, min(self.precision, 6))
        body = " + ".join(f"{d}*{p}^{j}" for j, d in enumerate(shown) if d)
        return (
            f"PadicNumber({p}^{self.valuation} * ({body} + ...)"
            f" + O({p}^{self.absolute_precision}))"
        )

    def representative(self) -> Fraction:
        """The rational ``p**valuation * unit`` (exact when the value is)."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.prime) ** self.valuation * self.unit


def _zero_product(x: PadicNumber, y: PadicNumber) -> PadicNumber:
    ctx = x.ctx
    if (x.is_zero and x.precision is None) or (y.is_zero and y.precision is None):
        return ctx.zero()
    if x.is_zero and y.is_zero:
        return ctx.zero(x.precision + y.precision)
    z, nz = (x, y) if x.is_zero else (y, x)
    return ctx.zero(z.precision + nz.valuation)


def _from_scaled(ctx: PadicContext, s: int, shift: int, absprec: float) -> PadicNumber:
    """Build ``s * p**shift`` known modulo ``p**absprec``."""
    p = ctx.prime
    if absprec != math.inf:
        width = absprec - shift
        if width <= 0:
            return ctx.zero(absprec)
        s %= p**width
    if s == 0:
        return ctx.zero(None if absprec == math.inf else absprec)
    t = vp(s, p)
    v = shift + t
    prec = ctx.working_precision
    if absprec != math.inf:
        prec = min(prec, absprec - v)
    if prec < ctx.precision_floor:
        raise PrecisionUnderflow(
            f"only {prec} guaranteed digits left (floor {ctx.precision_floor})"
        )
    mod = p**prec
    return PadicNumber(ctx, v, (s // p**t) % mod, prec)


def psum(terms: Iterable[PadicNumber], ctx: PadicContext | None = None) -> PadicNumber:
    """Sum of many p-adic values, normalized once at the end.

    Intermediate partial sums never materialize, so a transient near-cancellation
    inside a long sum cannot trip the precision floor.
    """
    terms = list(terms)
    if ctx is None:
        if not terms:
            raise ValueError("psum of no terms needs a context")
        ctx = terms[0].ctx
    absprec = min((t.absolute_precision for t in terms), default=math.inf)
    live = [t for t in terms if not t.is_zero and t.valuation < absprec]
    if not live:
        return ctx.zero(None if absprec == math.inf else absprec)
    p = ctx.prime
    shift = min(t.valuation for t in live)
    s = sum(t.unit * p ** (t.valuation - shift) for t in live)
    return _from_scaled(ctx, s, shift, absprec)


def from_rational(numerator: int, denominator: int, ctx: PadicContext) -> PadicNumber:
    if denominator == 0:
        raise DivisionByZero("zero denominator")
    if numerator == 0:
        return ctx.zero()
    p = ctx.prime
    vn, vd = vp(numerator, p), vp(denominator, p)
    n, d = numerator // p**vn, denominator // p**vd
    mod = p**ctx.working_precision
    return PadicNumber(ctx, vn - vd, n * pow(d, -1, mod) % mod, ctx.working_precision)


def norm(x: PadicNumber) -> Norm:
    if x.is_zero:
        return Norm(x.prime, None)
    return Norm(x.prime, -x.valuation)


def digits(x: PadicNumber, count: int) -> list[int]:
    """Base-p digits x_0, x_1, ... of the unit part, least significant first."""
    if x.is_zero:
        raise ZeroHasNoDigits("zero has no canonical digit expansion")
    if count > x.precision:
        raise PrecisionExceeded(f"asked for {count} digits, only {x.precision} known")
    p, u, out = x.prime, x.unit, []
    for _ in range(count):
        u, d = divmod(u, p)
        out.append(d)
    return out


def eq_mod(x: PadicNumber, y: PadicNumber, k: int) -> bool:
    """True iff ``|x - y|_p <= p**-k``; ``k`` is an absolute digit count."""
    if x.prime != y.prime:
        raise ValueError("mixing primes")
    known = min(x.absolute_precision, y.absolute_precision)
    if k > known:
        raise PrecisionExceeded(f"k={k} exceeds the {known} known absolute digits")
    p = x.prime
    x_live = not x.is_zero and x.valuation < k
    y_live = not y.is_zero and y.valuation < k
    if not (x_live or y_live):
        return True
    shift = min(t.valuation for t, live in ((x, x_live), (y, y_live)) if live)
    s = 0
    if x_live:
        s += x.unit * p ** (x.valuation - shift)
    if y_live:
        s -= y.unit * p ** (y.valuation - shift)
    return s % p ** (k - shift) == 0
