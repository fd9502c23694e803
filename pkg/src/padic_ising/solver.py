"""Translation-invariant solutions of the Ising boundary-field equation.

A constant field ``h`` is consistent on the order-``k`` tree iff

    h**2 == ((theta*h**2 + 1) / (h**2 + theta)) ** k,   theta = exp_p(2J).

For ``k = 3`` the substitution ``z = h**2`` factors this as
``(z**2 - 1) * (z**2 + (3*theta - theta**3)*z + 1) = 0``; for ``k = 2`` the
nontrivial roots are ``(theta - 1 +- sqrt((theta - 3)(theta + 1))) / 2``.
Everything here works at the precision of the supplied context; counts and
verdicts are cross-checked against the congruence classes of ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    CouplingOutOfRange,
    DeltaNotSquare,
    RootDoesNotExist,
    WrongOrder,
)
from .functions import exp_domain, exp_p, exp_radius, in_ep, is_square, sqrt
from .padic import Norm, PadicContext, PadicNumber, norm

BOUNDED = "bounded"
UNBOUNDED = "unbounded"

UNIQUE = "unique"
PHASE_TRANSITION = "phase_transition"
STRONG_PHASE_TRANSITION = "strong_phase_transition"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class ModelParams:
    prime: int
    coupling: Fraction
    theta: PadicNumber
    order: int

    @property
    def ctx(self) -> PadicContext:
        return self.theta.ctx

    def with_order(self, k: int) -> ModelParams:
        return ModelParams(self.prime, self.coupling, self.theta, k)


def canonical_coupling(p: int) -> Fraction:
    """Default coupling ``J = p`` used for census runs."""
    return Fraction(p)


def make_params(p: int, J, k: int, ctx: PadicContext | None = None) -> ModelParams:
    """Validate the coupling and compute ``theta = exp_p(2J)``.

    Admissibility is the convergence of ``exp_p(2J)``.  For odd ``p`` this is
    exactly ``|J|_p <= 1/p``.  For ``p = 2`` it admits ``|J|_2 <= 1/2``; the
    stricter bound needed to exponentiate every Hamiltonian value is enforced
    where Hamiltonians are exponentiated (see :func:`hamiltonian_admissible`).
    """
    ctx = ctx or PadicContext(p)
    if ctx.prime != p:
        raise ValueError(f"context prime {ctx.prime} does not match p={p}")
    if k < 1:
        raise ValueError("tree order must be >= 1")
    J = Fraction(J)
    if J == 0:
        raise CouplingOutOfRange("J = 0 gives theta = 1, a degenerate model")
    two_j = ctx(2 * J)
    if two_j not in exp_domain(ctx):
        raise CouplingOutOfRange(
            f"|2J|_{p} = {norm(two_j)} lies outside the exp_p convergence ball"
        )
    theta = exp_p(two_j)
    if not in_ep(theta):
        raise CouplingOutOfRange("theta is not in E_p")
    return ModelParams(p, J, theta, k)


def hamiltonian_admissible(params: ModelParams) -> bool:
    """``|J|_p < p**(-1/(p-1))``, which makes ``exp_p(H)`` converge."""
    J = params.ctx(params.coupling)
    return J.valuation >= exp_radius(params.prime)


def ti_residual(h: PadicNumber, params: ModelParams) -> PadicNumber:
    theta, k = params.theta, params.order
    z = h * h
    return z - ((theta * z + 1) / (z + theta)) ** k


@dataclass(frozen=True)
class TiSolutionSet:
    """Translation-invariant solutions, one canonical ``h`` per sign class.

    ``roots`` is keyed by root index: 1..4 for ``k = 3`` (``h_i**2 = z_i``)
    and 0..2 for ``k = 2``.  ``discriminant`` is ``theta**2 - 4`` for ``k = 3``
    and ``(theta - 3)(theta + 1)`` for ``k = 2``.
    """

    params: ModelParams
    roots: dict[int, PadicNumber]
    z_roots: dict[int, PadicNumber]
    discriminant: PadicNumber
    sqrt_discriminant_exists: bool
    sqrt_z3_exists: bool | None = None

    @property
    def delta(self) -> PadicNumber:
        theta = self.params.theta
        return theta * theta - 4

    @property
    def representatives(self) -> list[PadicNumber]:
        return list(self.roots.values())

    @property
    def h_roots(self) -> list[PadicNumber]:
        reps = self.representatives
        return reps + [-h for h in reps]

    @property
    def n_solutions(self) -> int:
        return len(self.h_roots)

    @property
    def n_measures(self) -> int:
        return len(self.roots)

    def root(self, i: int) -> PadicNumber:
        try:
            return self.roots[i]
        except KeyError:
            raise RootDoesNotExist(
                f"root {i} does not exist for p={self.params.prime}"
            ) from None


def solve_k2(params: ModelParams) -> TiSolutionSet:
    if params.order != 2:
        raise WrongOrder(f"solve_k2 needs k=2, got k={params.order}")
    theta = params.theta
    one = params.ctx.one()
    disc = (theta - 3) * (theta + 1)
    roots = {0: one}
    exists = is_square(disc)
    if exists:
        s, _ = sqrt(disc)
        roots[1] = (theta - 1 + s) / 2
        roots[2] = (theta - 1 - s) / 2
    z_roots = {i: h * h for i, h in roots.items()}
    return TiSolutionSet(params, roots, z_roots, disc, exists)


def _z34(params: ModelParams) -> tuple[PadicNumber, PadicNumber] | None:
    theta = params.theta
    delta = theta * theta - 4
    if not is_square(delta):
        return None
    s, _ = sqrt(delta)
    a = theta**3 - 3 * theta
    b = (theta * theta - 1) * s
    return (a + b) / 2, (a - b) / 2


def solve_k3(params: ModelParams) -> TiSolutionSet:
    if params.order != 3:
        raise WrongOrder(f"solve_k3 needs k=3, got k={params.order}")
    ctx = params.ctx
    z = {1: ctx.one(), 2: ctx(-1)}
    z34 = _z34(params)
    if z34 is not None:
        z[3], z[4] = z34
    roots = {i: sqrt(zi)[0] for i, zi in z.items() if is_square(zi)}
    theta = params.theta
    return TiSolutionSet(
        params,
        roots,
        z,
        theta * theta - 4,
        z34 is not None,
        None if z34 is None else is_square(z[3]),
    )


def solve_ti(params: ModelParams) -> TiSolutionSet:
    if params.order == 2:
        return solve_k2(params)
    if params.order == 3:
        return solve_k3(params)
    raise WrongOrder(f"translation-invariant solver covers k=2 and k=3, not k={params.order}")


def sqrt_delta_exists(params: ModelParams) -> bool:
    if params.order != 3:
        raise WrongOrder("sqrt_delta_exists is defined for k=3")
    theta = params.theta
    return is_square(theta * theta - 4)


def sqrt_z3_exists(params: ModelParams) -> bool:
    if params.order != 3:
        raise WrongOrder("sqrt_z3_exists is defined for k=3")
    z34 = _z34(params)
    if z34 is None:
        raise DeltaNotSquare(f"theta^2 - 4 is not a square in Q_{params.prime}")
    z3 = z34[0]
    shifted = z3 + 1
    if not shifted.is_zero and shifted.valuation < 1:
        raise ArithmeticError(f"|z_3 + 1|_p = {norm(shifted)} is not < 1")
    return is_square(z3)


# -- congruence side ------------------------------------------------------

def residues(p: int) -> dict[int, int]:
    return {m: p % m for m in (4, 3, 6, 12)}


def expected_solution_count(p: int) -> int:
    """Number of TI solutions ``h`` on the order-3 tree, from ``p`` alone."""
    if p % 4 != 1:
        return 2
    if p % 3 != 1:
        return 4
    return 8


def expected_measure_count(p: int) -> int:
    if p % 4 != 1:
        return 1
    if p % 3 == 2:
        return 2
    return 4


# -- normalizing constants ------------------------------------------------

def recursion_base(h: PadicNumber, params: ModelParams) -> PadicNumber:
    """``(theta*h**2 + 1)(h**2 + theta) / (theta*h**2)``."""
    theta = params.theta
    z = h * h
    return (theta * z + 1) * (z + theta) / (theta * z)


def z_recursion_factor(n: int, h: PadicNumber, params: ModelParams) -> PadicNumber:
    """``A_{n,h}`` with ``Z_{n+1,h} = A_{n,h} * Z_{n,h}``."""
    if n < 1:
        raise ValueError("n >= 1")
    return recursion_base(h, params) ** (2 ** (n - 1))


def z_closed_form(n: int, h: PadicNumber, params: ModelParams) -> PadicNumber:
    """Telescoped normalizer ``B**(2**(n-1) - 1)`` (so ``Z_1 = 1``)."""
    if n < 1:
        raise ValueError("n >= 1")
    return recursion_base(h, params) ** (2 ** (n - 1) - 1)


@dataclass(frozen=True)
class ZNorm:
    n: int
    root: int
    norm: Norm
    bound: Norm | None = None

    @property
    def exponent(self) -> int | None:
        return self.norm.exponent

    @property
    def is_bound(self) -> bool:
        return self.bound is not None

    @property
    def within_bound(self) -> bool:
        return self.bound is None or self.norm <= self.bound


def z_norm(n: int, i: int, params: ModelParams, solutions: TiSolutionSet | None = None) -> ZNorm:
    """Norm of the telescoped normalizer for the translation-invariant root ``h_i``.

    Index convention: the value is ``|B_i|**(2**(n-1) - 1)``, which for
    ``i = 1`` equals 1 (odd p) or ``2**(-2**n + 2)`` (p = 2), and for
    ``i = 2`` equals ``|theta - 1|**(2**n - 2)``.  For ``i = 3, 4`` the exact
    norm is returned together with the bound ``|theta - 1|**(2**n - 2)``.
    """
    if n < 1:
        raise ValueError("n >= 1")
    solutions = solutions or solve_ti(params)
    h = solutions.root(i)
    base = norm(recursion_base(h, params))
    value = base ** (2 ** (n - 1) - 1)
    bound = None
    if params.order == 3 and i >= 3:
        bound = norm(params.theta - 1) ** (2**n - 2)
    return ZNorm(n, i, value, bound)


def measure_norm(n: int, i: int, params: ModelParams, solutions: TiSolutionSet | None = None) -> Norm:
    """``|mu_{h_i}^{(n)}(sigma)|_p`` for every ``sigma``: ``1 / |Z_n|``.

    Valid because ``|h_i|_p = 1`` and ``exp_p`` of a Hamiltonian is a unit.
    """
    solutions = solutions or solve_k3(params)
    h = solutions.root(i)
    if norm(h).exponent != 0:
        raise ArithmeticError(f"|h_{i}|_p != 1")
    return Norm(params.prime, 0) / z_norm(n, i, params, solutions).norm


def boundedness(i: int, params: ModelParams, solutions: TiSolutionSet | None = None) -> str:
    """Bounded iff ``|mu^{(n)}|`` stays 1, i.e. the recursion base has norm 1.

    ``|mu^{(n)}(sigma)|_p = |B|**-(2**(n-1) - 1)`` exactly, so the sequence is
    constant when ``|B| = 1`` and grows without bound when ``|B| < 1``.
    """
    solutions = solutions or solve_k3(params)
    h = solutions.root(i)
    base = norm(recursion_base(h, params))
    if base.exponent is None or base.exponent > 0:
        raise ArithmeticError(f"unexpected recursion base norm {base}")
    if norm(h).exponent != 0:
        raise ArithmeticError(f"|h_{i}|_p != 1")
    return BOUNDED if base.exponent == 0 else UNBOUNDED


# -- classification -------------------------------------------------------

@dataclass(frozen=True)
class MeasureClassification:
    prime: int
    coupling: Fraction
    residues: dict[int, int]
    n_solutions: int
    tipggm_count: int
    boundedness: dict[int, str]
    verdict: str
    congruence_count: int
    direct_count: int | None = None
    direct_solutions: int | None = None
    roots: tuple[int, ...] = field(default=())

    @property
    def crosscheck(self) -> str:
        if self.direct_count is None:
            return "skipped"
        if self.direct_count == self.congruence_count:
            return "agree"
        return f"congruence={self.congruence_count};direct={self.direct_count}"

    @property
    def agrees(self) -> bool:
        return self.direct_count is None or self.direct_count == self.congruence_count


def _verdict_from(flags: list[str]) -> str:
    if len(flags) < 2:
        return UNIQUE
    if BOUNDED in flags and UNBOUNDED in flags:
        return STRONG_PHASE_TRANSITION
    return PHASE_TRANSITION


def classify(p: int, J=None, ctx: PadicContext | None = None, crosscheck: bool = True) -> MeasureClassification:
    """Translation-invariant measures on the order-3 tree for prime ``p``."""
    J = canonical_coupling(p) if J is None else Fraction(J)
    params = make_params(p, J, 3, ctx)
    expected = expected_measure_count(p)
    expected_solutions = expected_solution_count(p)
    if crosscheck:
        sol = solve_k3(params)
        direct = sol.n_measures
        flags = {i: boundedness(i, params, sol) for i in sol.roots}
        n_solutions = sol.n_solutions
        roots = tuple(sol.roots)
    else:
        sol = None
        direct = None
        roots = tuple(range(1, expected + 1))
        flags = {i: (BOUNDED if i == 1 and p != 2 else UNBOUNDED) for i in roots}
        n_solutions = expected_solutions
    tipggm = direct if direct is not None else expected
    return MeasureClassification(
        prime=p,
        coupling=J,
        residues=residues(p),
        n_solutions=n_solutions,
        tipggm_count=tipggm,
        boundedness=flags,
        verdict=_verdict_from(list(flags.values())),
        congruence_count=expected,
        direct_count=direct,
        direct_solutions=None if sol is None else sol.n_solutions,
        roots=roots,
    )


@dataclass(frozen=True)
class Verdict:
    kind: str
    min_measures: int
    order: int
    basis: str


def phase_transition_verdict(p: int, J=None, k: int = 3, ctx: PadicContext | None = None) -> Verdict:
    J = canonical_coupling(p) if J is None else Fraction(J)
    if k == 3:
        c = classify(p, J, ctx)
        return Verdict(c.verdict, c.tipggm_count, 3, "translation-invariant classification")
    if k == 2:
        sol = solve_k2(make_params(p, J, 2, ctx))
        kind = UNIQUE if sol.n_measures == 1 else PHASE_TRANSITION
        return Verdict(kind, sol.n_measures, 2, "translation-invariant solutions")
    params = make_params(p, J, k, ctx)
    if k > 3 and solve_k2(params.with_order(2)).sqrt_discriminant_exists:
        return Verdict(PHASE_TRANSITION, 3, k, "constant field 1 plus two embedded order-2 fields")
    return Verdict(UNDETERMINED, 1, k, "only the constant field 1 is known")
