import itertools

import numpy as np
import pytest

from padic_ising import (
    BoundaryField,
    Configuration,
    Norm,
    PadicContext,
    build_tree,
    check_consistency,
    check_consistency_escalating,
    exp_p,
    make_params,
    measure,
    norm,
    partition_function,
    psum,
    solve_ti,
)
from padic_ising import kernels
from padic_ising.errors import CouplingOutOfRange, MissingChildren, RegionMismatch, TooLarge
from padic_ising.solver import z_recursion_factor
from padic_ising.tree import (
    FAIL,
    PASS,
    configurations,
    edge_sum,
    extend_config,
    fixed_point_residual,
    measures,
    ratio_check,
    transfer_ratio,
    weight,
)


def naive_partition(tree, n, field):
    """Direct sum over spin tuples, no kernel and no histogram."""
    params = field.params
    a = exp_p(params.ctx(params.coupling))
    ainv = a.inverse()
    ball = tree.ball(n)
    terms = []
    for spins in itertools.product((-1, 1), repeat=len(ball)):
        w = params.ctx.one()
        for x, y in tree.edges(n):
            w = w * (a if spins[x] == spins[y] else ainv)
        for x in tree.sphere(n):
            w = w * (field[x] if spins[x] == 1 else field[x].inverse())
        terms.append(w)
    return psum(terms, params.ctx)


def test_tree_shape():
    t = build_tree(3, 3)
    assert [len(t.sphere(m)) for m in range(4)] == [1, 4, 12, 36]
    assert t.n_vertices == 53
    assert len(t.successors(0)) == 4
    assert all(len(t.successors(x)) == 3 for x in t.sphere(1))
    assert t.distance(5, 6) == 2
    assert t.distance(4, 5) == 3
    assert t.distance(5, 17) == 1
    assert t.distance(0, 52) == 3
    assert set(t.neighbours(1)) == {0, *t.successors(1)}
    assert len(t.edges(2)) == 16
    with pytest.raises(TooLarge):
        build_tree(3, 20)


def test_configurations():
    t = build_tree(2, 2)
    region = t.ball(1)
    assert len(list(configurations(region))) == 16
    s = Configuration.from_spins(region, [1, -1, 1, -1])
    assert s.spins() == [1, -1, 1, -1]
    assert s.flipped().spins() == [-1, 1, -1, 1]
    assert s.restrict(t.ball(0)).spins() == [1]
    phi = Configuration.constant(t.sphere(2), -1)
    full = extend_config(t, s, phi)
    assert full.spins()[: len(region)] == s.spins()
    assert edge_sum(t, full) == sum(full.spin(x) * full.spin(y) for x, y in t.edges(2))
    with pytest.raises(RegionMismatch):
        extend_config(t, s, Configuration.constant(t.sphere(1)))
    with pytest.raises(RegionMismatch):
        s.spin(30)


@pytest.mark.parametrize("p,k,n", [(5, 2, 2), (13, 3, 1), (7, 2, 1), (3, 2, 2)])
def test_partition_function_matches_naive_oracle(p, k, n):
    params = make_params(p, p, k)
    t = build_tree(k, n)
    ctx = params.ctx
    field = BoundaryField.from_function(t, lambda x: ctx(x + 2 if (x + 2) % p else x + 3), params)
    assert partition_function(n, field) == naive_partition(t, n, field)


def test_weight_matches_measure_sum():
    params = make_params(5, 5, 2)
    t = build_tree(2, 2)
    h = solve_ti(params).root(1)
    field = BoundaryField.constant(t, h, params)
    ws = [weight(s, field) for s in configurations(t.ball(2))]
    assert psum(ws) == partition_function(2, field)
    mus = measures(2, field)
    assert psum(mus) == params.ctx.one()
    s = Configuration(t.ball(2), 123)
    assert measure(s, field) == mus[123]


@pytest.mark.parametrize("seed", range(5))
def test_kernel_backends_agree(seed):
    if kernels.BACKEND != "cython":
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 15))
    edges = [(int(rng.integers(0, v)), v) for v in range(1, n)]
    leaves = sorted(rng.choice(n, size=min(4, n), replace=False).tolist())
    strides = [1, 2, 2, 6][: len(leaves)]
    n_keys = 18
    gb = int(rng.integers(0, 4))
    a = kernels.histogram(n, edges, leaves, strides, n_keys, gb, backend="python")
    b = kernels.histogram(n, edges, leaves, strides, n_keys, gb, backend="cython")
    assert a.shape == (2**gb, len(edges) + 1, n_keys)
    assert np.array_equal(a, b)
    assert a.sum() == 2**n


def _ti_field_builder(p, k, n, i):
    tree = build_tree(k, n)

    def build(ctx):
        params = make_params(p, p, k, ctx)
        return BoundaryField.constant(tree, solve_ti(params).roots[i], params)

    return build


@pytest.mark.parametrize("p,k", [(5, 2), (13, 2), (5, 3), (13, 3)])
def test_translation_invariant_fields_are_consistent(p, k):
    ctx = PadicContext(p, 32)
    for i in solve_ti(make_params(p, p, k, ctx)).roots:
        report = check_consistency_escalating(2, _ti_field_builder(p, k, 2, i), ctx)
        assert report.status == PASS, (i, report)
        assert report.max_residual.exponent is None or report.max_residual.exponent <= -26


def test_consistency_implies_fixed_point_equation():
    """A field that breaks the functional equation at one vertex is inconsistent."""
    params = make_params(5, 5, 2, PadicContext(5, 64))
    t = build_tree(2, 2)
    h = solve_ti(params).root(1)
    good = BoundaryField.constant(t, h, params)
    assert check_consistency(2, good, 26).status == PASS
    bad = good.replace(5, h * (1 + params.ctx(5)))
    assert fixed_point_residual(bad, 1).valuation < 5
    assert check_consistency(2, bad, 26).status == FAIL


def test_nonconstant_solution_is_consistent():
    """The planted field on the order-3 tree solves the equation and is consistent."""
    from padic_ising import build_art_field

    ctx = PadicContext(5, 64)
    params = make_params(5, 5, 3, ctx)
    art = build_art_field(1, params, depth=2)
    assert check_consistency(2, art.field, 26).status == PASS


def test_perturbed_field_fails():
    ctx = PadicContext(5, 32)
    params = make_params(5, 5, 3, ctx)
    t = build_tree(3, 2)
    bad = BoundaryField.constant(t, ctx(1 + 5), params)
    report = check_consistency(2, bad)
    assert report.status == FAIL
    assert report.max_residual >= Norm(5, -3)


def test_flip_symmetries():
    params = make_params(13, 13, 2, PadicContext(13, 48))
    t = build_tree(2, 2)
    h = solve_ti(params).root(1)
    f = BoundaryField.constant(t, h, params)
    base = measures(2, f)
    neg = measures(2, f.negated())
    inv = measures(2, f.inverted())
    full = (1 << len(t.ball(2))) - 1
    for bits in range(full + 1):
        assert neg[bits] == base[bits]
        assert inv[bits] == base[bits ^ full]


def test_transfer_ratio_matches_enumeration_not_stated_recursion():
    params = make_params(13, 13, 2, PadicContext(13, 96))
    t = build_tree(2, 3)
    h = solve_ti(params).root(1)
    f = BoundaryField.constant(t, h, params)
    for n in (1, 2):
        enumerated = ratio_check(n, f)
        assert enumerated == transfer_ratio(n, h, params, t)
        assert norm(enumerated) != norm(z_recursion_factor(n, h, params))


def test_enumeration_guards():
    params = make_params(5, 5, 3)
    t = build_tree(3, 3)
    with pytest.raises(TooLarge):
        partition_function(3, BoundaryField.constant(t, params.ctx.one(), params))
    with pytest.raises(MissingChildren):
        fixed_point_residual(BoundaryField.constant(t, params.ctx.one(), params), 20)
    with pytest.raises(ValueError):
        fixed_point_residual(BoundaryField.constant(t, params.ctx.one(), params), 0)
    p2 = make_params(2, 2, 2)
    t2 = build_tree(2, 1)
    with pytest.raises(CouplingOutOfRange):
        partition_function(1, BoundaryField.constant(t2, p2.ctx.one(), p2))
    with pytest.raises(ValueError):
        BoundaryField.constant(t2, p2.ctx.zero(), p2)
