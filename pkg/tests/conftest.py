import random

import pytest
from hypothesis import settings

from padic_ising import PadicContext

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

SMALL_PRIMES = (2, 3, 5, 7, 13)


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture(params=SMALL_PRIMES)
def ctx(request):
    return PadicContext(request.param, 32)


def random_padic(ctx, rng, vmin=-3, vmax=6):
    """Random nonzero number with a full-precision unit part."""
    p = ctx.prime
    v = rng.randint(vmin, vmax)
    u = rng.randrange(1, p**ctx.working_precision)
    while u % p == 0:
        u = rng.randrange(1, p**ctx.working_precision)
    from fractions import Fraction

    return ctx(Fraction(u) * Fraction(p) ** v)


# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
