from fractions import Fraction

import pytest
from sympy import primerange

from padic_ising import (
    PadicContext,
    boundedness,
    classify,
    expected_measure_count,
    expected_solution_count,
    make_params,
    measure_norm,
    norm,
    phase_transition_verdict,
    solve_k2,
    solve_k3,
    solve_ti,
    sqrt_delta_exists,
    sqrt_z3_exists,
    z_norm,
)
from padic_ising.errors import CouplingOutOfRange, DeltaNotSquare, RootDoesNotExist, WrongOrder
from padic_ising.solver import (
    BOUNDED,
    PHASE_TRANSITION,
    STRONG_PHASE_TRANSITION,
    UNBOUNDED,
    UNDETERMINED,
    UNIQUE,
    hamiltonian_admissible,
    recursion_base,
    ti_residual,
    z_closed_form,
    z_recursion_factor,
)


def fixed_point_polynomial(h, params):
    """``h**2 (h**2 + theta)**k - (theta h**2 + 1)**k``, cleared of denominators."""
    t, z, k = params.theta, h * h, params.order
    return z * (z + t) ** k - (t * z + 1) ** k


def test_make_params_rejects_bad_couplings():
    with pytest.raises(ValueError):
        make_params(5, 0, 3)
    with pytest.raises(CouplingOutOfRange):
        make_params(3, 1, 3)
    with pytest.raises(CouplingOutOfRange):
        make_params(2, 1, 3)
    p2 = make_params(2, 2, 3)
    assert not hamiltonian_admissible(p2)
    assert hamiltonian_admissible(make_params(2, 4, 3))


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13, 17, 37, 61, 73, 97])
def test_k3_roots_are_fixed_points(p):
    params = make_params(p, p, 3, PadicContext(p, 48))
    sol = solve_k3(params)
    assert sol.n_solutions == expected_solution_count(p)
    assert sol.n_measures == expected_measure_count(p)
    hs = sol.h_roots
    assert len(hs) == sol.n_solutions
    for i, h in enumerate(hs):
        assert norm(h).exponent == 0
        r = fixed_point_polynomial(h, params)
        assert r.is_zero or r.valuation >= 40
        for g in hs[i + 1:]:
            assert h != g


@pytest.mark.parametrize("p", [5, 13, 17, 29, 3, 7])
def test_k2_roots(p):
    params = make_params(p, p, 2)
    sol = solve_k2(params)
    assert sol.n_measures == (3 if p % 4 == 1 else 1)
    assert sol.roots[0] == params.ctx.one()
    for h in sol.roots.values():
        r = ti_residual(h, params)
        assert r.is_zero or r.valuation >= 28


def test_solve_ti_dispatch():
    assert solve_ti(make_params(5, 5, 2)).params.order == 2
    with pytest.raises(WrongOrder):
        solve_ti(make_params(5, 5, 4))


def test_root_lookup():
    sol = solve_k3(make_params(7, 7, 3))
    assert sol.root(1) == sol.params.ctx.one()
    with pytest.raises(RootDoesNotExist):
        sol.root(2)


def test_discriminant_conditions():
    for p in primerange(3, 300):
        params = make_params(int(p), p, 3)
        assert sqrt_delta_exists(params) == (p % 6 == 1)
        if p % 6 == 1:
            assert sqrt_z3_exists(params) == (p % 12 == 1)
        else:
            with pytest.raises(DeltaNotSquare):
                sqrt_z3_exists(params)


def test_explicit_coupling_gives_same_counts():
    for p in (5, 7, 13, 17):
        for J in (Fraction(p), Fraction(2 * p, 3), Fraction(p**2)):
            sol = solve_k3(make_params(p, J, 3))
            assert sol.n_measures == expected_measure_count(p)


def test_znorm_values():
    p2 = make_params(2, 2, 3)
    assert [z_norm(n, 1, p2).exponent for n in range(1, 5)] == [0, -2, -6, -14]
    p13 = make_params(13, 13, 3)
    assert z_norm(3, 2, p13).exponent == -6
    for n in range(1, 7):
        assert z_norm(n, 1, p13).exponent == 0
        z3 = z_norm(n, 3, p13)
        assert z3.is_bound and z3.within_bound
        assert z3.bound.exponent == -(2**n - 2)


def test_closed_form_telescopes():
    params = make_params(13, 13, 3)
    h = solve_k3(params).root(2)
    for n in range(1, 5):
        assert z_closed_form(n + 1, h, params) == z_closed_form(n, h, params) * z_recursion_factor(n, h, params)
    assert z_closed_form(1, h, params) == params.ctx.one()
    assert norm(recursion_base(h, params)).exponent == -2


def test_measure_norm_grows_for_unbounded_root():
    params = make_params(13, 13, 3)
    growth = [measure_norm(n, 2, params).exponent for n in range(1, 8)]
    assert growth == [2**n - 2 for n in range(1, 8)]
    assert {measure_norm(n, 1, params).exponent for n in range(1, 8)} == {0}
    assert boundedness(1, params) == BOUNDED
    assert boundedness(2, params) == UNBOUNDED


def test_classify_rows():
    c2 = classify(2)
    assert c2.tipggm_count == 1 and c2.boundedness == {1: UNBOUNDED} and c2.verdict == UNIQUE
    c13 = classify(13)
    assert c13.n_solutions == 8 and c13.verdict == STRONG_PHASE_TRANSITION
    assert c13.crosscheck == "agree"
    quick = classify(13, crosscheck=False)
    assert quick.crosscheck == "skipped"
    assert quick.boundedness == c13.boundedness


def test_phase_transition_verdicts():
    assert phase_transition_verdict(5).kind == STRONG_PHASE_TRANSITION
    assert phase_transition_verdict(7).kind == UNIQUE
    assert phase_transition_verdict(5, k=2).kind == PHASE_TRANSITION
    v = phase_transition_verdict(5, k=4)
    assert v.kind == PHASE_TRANSITION and v.min_measures == 3
    assert phase_transition_verdict(7, k=4).kind == UNDETERMINED
