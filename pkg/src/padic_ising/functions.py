"""Exponential, logarithm and square roots on Q_p."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NotAResidue, NotASquare, OutOfDomain, ZeroInput
from .padic import PadicContext, PadicNumber, norm, vp

_SCAN_LIMIT = 100


def exp_radius(p: int) -> int:
    """Largest integer ``e`` with ``p**-e`` outside the exp convergence ball.

    The ball ``|x| < p**(-1/(p-1))`` at integer radii is ``|x| <= p**-1`` for
    odd ``p`` and ``|x| <= 2**-2`` for ``p = 2``.
    """
    return 2 if p == 2 else 1


@dataclass(frozen=True)
class DomainBall:
    """``{x : |x - center| <= p**-radius_exponent}`` (``<`` when strict)."""

    center: PadicNumber
    radius_exponent: int
    strict: bool = False

    def __contains__(self, x: PadicNumber) -> bool:
        d = x - self.center
        if d.is_zero:
            return True
        if self.strict:
            return d.valuation > self.radius_exponent
        return d.valuation >= self.radius_exponent


def exp_domain(ctx: PadicContext) -> DomainBall:
    return DomainBall(ctx.zero(), exp_radius(ctx.prime))


def log_domain(ctx: PadicContext) -> DomainBall:
    return DomainBall(ctx.one(), 0, strict=True)


def ep_ball(ctx: PadicContext) -> DomainBall:
    return DomainBall(ctx.one(), exp_radius(ctx.prime))


def exp_p(x: PadicNumber) -> PadicNumber:
    ctx = x.ctx
    p = ctx.prime
    if x.is_zero:
        return ctx.one()
    v = x.valuation
    if v < exp_radius(p):
        raise OutOfDomain(f"exp_p needs |x|_{p} <= {p}^-{exp_radius(p)}, got {norm(x)}")
    # result is a unit; its absolute precision is capped by the input's
    target = min(ctx.working_precision, x.absolute_precision)
    mod = p**target
    # term n is p**(n*v - v_p(n!)) * u**n / (n! / p**v_p(n!)); v_p(n!) <= (n-1)/(p-1)
    total = 1
    num, den, fact_v = 1, 1, 0
    n = 0
    while True:
        n += 1
        if n * v - (n - 1) / (p - 1) >= target:
            break
        num = num * x.unit % mod
        m = n
        while m % p == 0:
            m //= p
            fact_v += 1
        den = den * m % mod
        e = n * v - fact_v
        if e < target:
            total += p**e * num * pow(den, -1, mod)
    return PadicNumber(ctx, 0, total % mod, target)


def log_p(x: PadicNumber) -> PadicNumber:
    """Logarithm via the series of ``log(1 + y)`` with coefficients ``1/n``."""
    ctx = x.ctx
    p = ctx.prime
    if x.is_zero or x not in log_domain(ctx):
        raise OutOfDomain(f"log_p needs |x - 1|_{p} < 1")
    y = x - 1
    if y.is_zero:
        return ctx.zero(y.precision)
    v = y.valuation
    target = min(int(y.absolute_precision), ctx.working_precision + v)
    mod = p**target
    total = 0
    num = 1
    n = 0
    while True:
        n += 1
        if n * v - math.floor(math.log(n, p) + 1e-9) >= target:
            break
        num = num * y.unit
        vn = vp(n, p)
        e = n * v - vn
        if e < target:
            term = p**e * num * pow(n // p**vn, -1, mod)
            total += term if n % 2 else -term
        num %= mod
    # target is absolute; dividing out the valuation happens in the rebuild
    return _rebuild(ctx, total, target)


def _rebuild(ctx: PadicContext, s: int, absprec: int) -> PadicNumber:
    from .padic import _from_scaled

    return _from_scaled(ctx, s, 0, absprec)


def mod_sqrt(a0: int, p: int) -> int:
    """Square root of ``a0`` modulo an odd prime, normalized to ``r <= (p-1)/2``."""
    if p == 2:
        raise ValueError("mod_sqrt needs an odd prime")
    a0 %= p
    if a0 == 0:
        raise ValueError("a0 must be coprime to p")
    if pow(a0, (p - 1) // 2, p) != 1:
        raise NotAResidue(f"{a0} is not a quadratic residue mod {p}")
    if p < _SCAN_LIMIT:
        r = next(r for r in range(1, p) if r * r % p == a0)
    else:
        r = _tonelli_shanks(a0, p)
    return min(r, p - r)


def _tonelli_shanks(a: int, p: int) -> int:
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def is_square(a: PadicNumber) -> bool:
    if a.is_zero:
        raise ZeroInput("is_square is undefined for 0")
    if a.valuation % 2:
        return False
    p = a.prime
    if p == 2:
        # a_1 = a_2 = 0, i.e. the unit is 1 mod 8
        return a.unit % 8 == 1
    return pow(a.unit % p, (p - 1) // 2, p) == 1


def sqrt(a: PadicNumber) -> tuple[PadicNumber, PadicNumber]:
    """Both square roots ``(r, -r)``; ``r`` is the canonical one.

    For odd ``p`` the canonical root has leading digit in ``[1, (p-1)/2]``;
    for ``p = 2`` it is the root congruent to 1 mod 4.
    """
    if a.is_zero:
        raise ZeroInput("sqrt of 0 is not handled")
    if not is_square(a):
        raise NotASquare(f"{a!r} is not a square in Q_{a.prime}")
    ctx, p, u = a.ctx, a.prime, a.unit
    if p == 2:
        r, prec = _sqrt_unit_2(u, a.precision)
    else:
        prec = a.precision
        r, k = mod_sqrt(u % p, p), 1
        while k < prec:
            k = min(2 * k, prec)
            mod = p**k
            # Newton step r <- (r + u/r) / 2
            r = (r + u * pow(r, -1, mod)) * pow(2, -1, mod) % mod
    root = PadicNumber(ctx, a.valuation // 2, r, prec)
    return root, -root


def _sqrt_unit_2(u: int, prec: int) -> tuple[int, int]:
    # roots of a 2-adic unit known mod 2**prec are determined mod 2**(prec-1)
    out = prec - 1
    mod = 2 ** (prec + 1)
    r, k = 1, 3
    while k < prec:
        k = min(2 * k - 2, prec)
        r = (r + u * pow(r, -1, mod)) // 2 % mod
    r %= 2**out
    if r % 4 != 1:
        r = -r % 2**out
    return r, out


def in_ep(x: PadicNumber) -> bool:
    """Membership in E_p, the image of exp_p."""
    if x.is_zero:
        return False
    return x in ep_ball(x.ctx)
