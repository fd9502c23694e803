import math
from fractions import Fraction

import pytest
from sympy import primerange

from conftest import random_padic
from padic_ising import PadicContext, eq_mod, exp_p, in_ep, is_square, log_p, mod_sqrt, norm, sqrt
from padic_ising.errors import NotAResidue, NotASquare, OutOfDomain, ZeroInput
from padic_ising.functions import ep_ball, exp_domain


def series_exp(x: Fraction, terms: int) -> Fraction:
    total, term = Fraction(1), Fraction(1)
    for n in range(1, terms):
        term = term * x / n
        total += term
    return total


def series_log1p(y: Fraction, terms: int) -> Fraction:
    return sum(Fraction((-1) ** (n + 1)) * y**n / n for n in range(1, terms))


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13])
def test_exp_against_rational_series(p):
    ctx = PadicContext(p, 20)
    x = Fraction(p * p if p == 2 else p, 1) * Fraction(3, 7 if p != 7 else 5)
    assert eq_mod(exp_p(ctx(x)), ctx(series_exp(x, 120)), 20)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13])
def test_log_against_rational_series(p):
    ctx = PadicContext(p, 20)
    y = Fraction(p, 1) * Fraction(2, 9 if p != 3 else 5)
    assert eq_mod(log_p(ctx(1 + y)), ctx(series_log1p(y, 200)), 19)


def test_exp_domain():
    ctx = PadicContext(5)
    with pytest.raises(OutOfDomain):
        exp_p(ctx(1))
    with pytest.raises(OutOfDomain):
        exp_p(PadicContext(2)(2))
    assert exp_p(PadicContext(2)(4)) in ep_ball(PadicContext(2))
    assert exp_p(ctx.zero()) == ctx.one()


def test_log_domain():
    ctx = PadicContext(5)
    with pytest.raises(OutOfDomain):
        log_p(ctx(2))
    with pytest.raises(OutOfDomain):
        log_p(ctx.zero())
    assert log_p(ctx.one()).is_zero


def test_exp_log_round_trips(ctx, rng):
    p = ctx.prime
    r = 2 if p == 2 else 1
    for _ in range(50):
        x = random_padic(ctx, rng, r, r + 4)
        e = exp_p(x)
        assert e in ep_ball(ctx)
        back = log_p(e)
        assert eq_mod(back, x, int(min(back.absolute_precision, x.absolute_precision)) - 2)
        assert eq_mod(exp_p(log_p(e)), e, ctx.working_precision - 2)


def test_exp_is_a_homomorphism(ctx, rng):
    r = 2 if ctx.prime == 2 else 1
    for _ in range(50):
        x, y = (random_padic(ctx, rng, r, r + 3) for _ in range(2))
        assert eq_mod(exp_p(x + y), exp_p(x) * exp_p(y), ctx.working_precision - 2)


def test_ep_group_laws(ctx, rng):
    ball = ep_ball(ctx)
    r = 2 if ctx.prime == 2 else 1
    for _ in range(100):
        a = 1 + random_padic(ctx, rng, r, r + 5)
        b = 1 + random_padic(ctx, rng, r, r + 5)
        assert in_ep(a) and in_ep(b)
        assert norm(a).exponent == 0
        assert a * b in ball
        assert a.inverse() in ball
        assert a / b in ball


def test_ep_excludes_outside_points():
    ctx = PadicContext(3)
    assert not in_ep(ctx(2))
    assert not in_ep(ctx(5))  # |5 - 1|_3 = 1
    assert in_ep(ctx(7))  # |7 - 1|_3 = 1/3
    assert not in_ep(ctx.zero())


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 101, 1009, 7919])
def test_mod_sqrt(p):
    residues = {x * x % p for x in range(1, p)}
    for a in list(residues)[:200]:
        r = mod_sqrt(a, p)
        assert r * r % p == a
        assert 1 <= r <= (p - 1) // 2
    non = next(a for a in range(2, p) if a not in residues)
    with pytest.raises(NotAResidue):
        mod_sqrt(non, p)


def test_is_square_odd():
    ctx = PadicContext(7)
    assert is_square(ctx(2))  # 3^2 = 9 = 2 mod 7
    assert not is_square(ctx(3))
    assert not is_square(ctx(7 * 2))
    assert is_square(ctx(Fraction(2, 49)))
    with pytest.raises(ZeroInput):
        is_square(ctx.zero())


def test_is_square_two():
    ctx = PadicContext(2)
    assert is_square(ctx(17))
    assert is_square(ctx(-7))
    assert not is_square(ctx(5))
    assert not is_square(ctx(3))
    assert not is_square(ctx(2))
    assert is_square(ctx(4 * 17))


def test_minus_one_square_iff_1_mod_4():
    for p in primerange(2, 500):
        assert is_square(PadicContext(int(p))(-1)) == (p % 4 == 1)


def test_sqrt_round_trip(ctx, rng):
    done = 0
    while done < 40:
        a = random_padic(ctx, rng, -4, 4)
        if not is_square(a):
            with pytest.raises(NotASquare):
                sqrt(a)
            continue
        r, s = sqrt(a)
        assert s == -r
        assert eq_mod(r * r, a, int(a.absolute_precision) - 2)
        done += 1


def test_sqrt_canonical_choice():
    r, _ = sqrt(PadicContext(5)(-1))
    assert r.unit % 5 == 2
    r2, _ = sqrt(PadicContext(2)(17))
    assert r2.unit % 4 == 1
    assert r2.precision == 31


def test_exp_domain_ball_sizes():
    assert PadicContext(2)(4) in exp_domain(PadicContext(2))
    assert PadicContext(2)(2) not in exp_domain(PadicContext(2))
    assert PadicContext(3)(3) in exp_domain(PadicContext(3))
    assert math.isinf(PadicContext(3).zero().absolute_precision)
