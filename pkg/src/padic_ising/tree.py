"""Finite Cayley trees, spin configurations and finite-volume p-adic measures.

Vertices are integers in breadth-first (level) order: the root is 0, it has
``k + 1`` children, every other vertex has ``k``.  Consequently ``V_n`` is
``range(|V_n|)`` and ``W_n`` is a contiguous range too, so a configuration on
either region is a bit vector (bit ``i`` set means spin ``+1`` at the
``i``-th vertex of the region).

Partition functions and consistency sums are exact enumerations over every
configuration.  The enumeration itself is done by :mod:`.kernels`, which
returns how many configurations share each (edge-disagreement count,
boundary-spin pattern); the p-adic weights are then summed per bin.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from . import kernels
from .errors import (
    CouplingOutOfRange,
    DegenerateNormalizer,
    MissingChildren,
    PrecisionUnderflow,
    RegionMismatch,
    TooLarge,
)
from .functions import exp_p
from .padic import Norm, PadicContext, PadicNumber, norm, psum
from .solver import ModelParams, hamiltonian_admissible

ENUMERATION_CAP = 22
MAX_VERTICES = 2_000_000


@dataclass(frozen=True, eq=False)
class FiniteTree:
    order: int
    depth: int
    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    labels: tuple[tuple[int, ...], ...]
    offsets: tuple[int, ...]

    @property
    def root(self) -> int:
        return 0

    @property
    def n_vertices(self) -> int:
        return self.offsets[-1]

    def ball(self, m: int) -> range:
        """``V_m``."""
        self._check_level(m)
        return range(self.offsets[m + 1])

    def sphere(self, m: int) -> range:
        """``W_m``."""
        self._check_level(m)
        return range(self.offsets[m], self.offsets[m + 1])

    def edges(self, m: int | None = None) -> list[tuple[int, int]]:
        """``L_m`` as (parent, child) pairs."""
        m = self.depth if m is None else m
        return [(self.parent[v], v) for v in self.ball(m)[1:]]

    def level(self, x: int) -> int:
        return len(self.labels[x])

    def successors(self, x: int) -> tuple[int, ...]:
        return self.children[x]

    def neighbours(self, x: int) -> tuple[int, ...]:
        up = () if x == 0 else (self.parent[x],)
        return up + self.children[x]

    def distance(self, x: int, y: int) -> int:
        a, b = self.labels[x], self.labels[y]
        common = 0
        for s, t in zip(a, b):
            if s != t:
                break
            common += 1
        return len(a) + len(b) - 2 * common

    def _check_level(self, m: int) -> None:
        if not 0 <= m <= self.depth:
            raise ValueError(f"level {m} outside 0..{self.depth}")


def build_tree(k: int, n: int, max_vertices: int = MAX_VERTICES) -> FiniteTree:
    if k < 1 or n < 0:
        raise ValueError("need k >= 1 and n >= 0")
    size = 1 + sum((k + 1) * k ** (m - 1) for m in range(1, n + 1))
    if size > max_vertices:
        raise TooLarge(f"V_{n} of the order-{k} tree has {size} vertices")
    parent, labels, children = [-1], [()], [[]]
    offsets = [0, 1]
    frontier = [0]
    for _ in range(n):
        nxt = []
        for x in frontier:
            width = k + 1 if x == 0 else k
            for j in range(width):
                v = len(parent)
                parent.append(x)
                labels.append(labels[x] + (j,))
                children.append([])
                children[x].append(v)
                nxt.append(v)
        frontier = nxt
        offsets.append(len(parent))
    return FiniteTree(
        k, n, tuple(parent), tuple(tuple(c) for c in children), tuple(labels), tuple(offsets)
    )


# -- configurations -------------------------------------------------------

@dataclass(frozen=True)
class Configuration:
    region: range
    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> len(self.region):
            raise ValueError("bit vector does not fit the region")

    @classmethod
    def from_spins(cls, region: range, spins) -> Configuration:
        spins = list(spins)
        if len(spins) != len(region) or any(s not in (-1, 1) for s in spins):
            raise ValueError("need one spin in {-1, +1} per vertex")
        return cls(region, sum(1 << i for i, s in enumerate(spins) if s == 1))

    @classmethod
    def constant(cls, region: range, spin: int = 1) -> Configuration:
        return cls(region, (1 << len(region)) - 1 if spin == 1 else 0)

    def spin(self, x: int) -> int:
        if x not in self.region:
            raise RegionMismatch(f"vertex {x} outside the configuration's region")
        return 1 if self.bits >> (x - self.region.start) & 1 else -1

    def spins(self) -> list[int]:
        return [self.spin(x) for x in self.region]

    def flipped(self) -> Configuration:
        return Configuration(self.region, self.bits ^ ((1 << len(self.region)) - 1))

    def restrict(self, region: range) -> Configuration:
        if region.start < self.region.start or region.stop > self.region.stop:
            raise RegionMismatch("restriction target is not a sub-region")
        shift = region.start - self.region.start
        return Configuration(region, (self.bits >> shift) & ((1 << len(region)) - 1))


def configurations(region: range) -> Iterator[Configuration]:
    """All ``2**|region|`` configurations, in bit-vector order."""
    for bits in range(1 << len(region)):
        yield Configuration(region, bits)


def extend_config(tree: FiniteTree, sigma: Configuration, phi: Configuration) -> Configuration:
    """``sigma_{n-1} v phi^{(n)}`` on ``V_n``."""
    n = _ball_depth(tree, sigma.region) + 1
    if n > tree.depth or phi.region != tree.sphere(n):
        raise RegionMismatch("phi must live on the sphere just outside sigma's ball")
    return Configuration(tree.ball(n), sigma.bits | phi.bits << len(sigma.region))


def _ball_depth(tree: FiniteTree, region: range) -> int:
    for m in range(tree.depth + 1):
        if region == tree.ball(m):
            return m
    raise RegionMismatch(f"{region} is not a ball V_m of this tree")


def edge_sum(tree: FiniteTree, sigma: Configuration) -> int:
    n = _ball_depth(tree, sigma.region)
    return sum(sigma.spin(x) * sigma.spin(y) for x, y in tree.edges(n))


def hamiltonian(tree: FiniteTree, sigma: Configuration, params: ModelParams) -> PadicNumber:
    """``J * sum over edges of sigma(x) sigma(y)``."""
    return params.ctx(params.coupling * edge_sum(tree, sigma))


# -- boundary fields ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BoundaryField:
    tree: FiniteTree
    values: tuple[PadicNumber, ...]
    params: ModelParams

    def __post_init__(self) -> None:
        if len(self.values) != self.tree.n_vertices:
            raise ValueError("one field value per vertex is required")
        if any(h.is_zero for h in self.values):
            raise ValueError("boundary field values must be nonzero")

    @classmethod
    def constant(cls, tree: FiniteTree, h: PadicNumber, params: ModelParams) -> BoundaryField:
        return cls(tree, (h,) * tree.n_vertices, params)

    @classmethod
    def from_function(cls, tree: FiniteTree, f: Callable[[int], PadicNumber], params: ModelParams) -> BoundaryField:
        return cls(tree, tuple(f(x) for x in range(tree.n_vertices)), params)

    def __getitem__(self, x: int) -> PadicNumber:
        return self.values[x]

    def negated(self) -> BoundaryField:
        return BoundaryField(self.tree, tuple(-h for h in self.values), self.params)

    def inverted(self) -> BoundaryField:
        return BoundaryField(self.tree, tuple(h.inverse() for h in self.values), self.params)

    def replace(self, x: int, h: PadicNumber) -> BoundaryField:
        vals = list(self.values)
        vals[x] = h
        return BoundaryField(self.tree, tuple(vals), self.params)

    def same_as(self, other: BoundaryField) -> bool:
        return len(self.values) == len(other.values) and all(
            a == b for a, b in zip(self.values, other.values)
        )


def fixed_point_residual(field: BoundaryField, x: int) -> PadicNumber:
    """``h_x**2 - prod_{y in S(x)} (theta h_y**2 + 1) / (h_y**2 + theta)``."""
    tree = field.tree
    if x == tree.root:
        raise ValueError("the fixed-point equation is not imposed at the root")
    if tree.level(x) >= tree.depth:
        raise MissingChildren(f"vertex {x} has no successors inside V_{tree.depth}")
    theta = field.params.theta
    prod = field.params.ctx.one()
    for y in tree.successors(x):
        z = field[y] * field[y]
        prod = prod * ((theta * z + 1) / (z + theta))
    return field[x] * field[x] - prod


# -- enumeration ----------------------------------------------------------

def _exp_weights(params: ModelParams, n_edges: int) -> list[PadicNumber]:
    """``exp_p(J*m)`` indexed by the number of disagreeing edges ``d``."""
    if not hamiltonian_admissible(params):
        raise CouplingOutOfRange(
            f"exp_p(H) needs |J|_p < p^(-1/(p-1)); J={params.coupling} at p={params.prime}"
        )
    ctx = params.ctx
    return [exp_p(ctx(params.coupling * (n_edges - 2 * d))) for d in range(n_edges + 1)]


def _leaf_classes(field: BoundaryField, leaves: range):
    # identical stored values share a class
    index: dict[tuple, int] = {}
    reps: list[PadicNumber] = []
    cls = []
    for x in leaves:
        h = field[x]
        key = (h.valuation, h.unit, h.precision)
        if key not in index:
            index[key] = len(reps)
            reps.append(h)
        cls.append(index[key])
    return reps, cls


def _group_sums(field: BoundaryField, n: int, group_bits: int) -> list[PadicNumber]:
    """``sum of exp_p(H_n) prod_{W_n} h^sigma`` over configurations of ``V_n``,
    grouped by the low ``group_bits`` bits (a configuration on ``V_m``)."""
    tree = field.tree
    if n > tree.depth:
        raise RegionMismatch(f"field lives on V_{tree.depth}, asked for n={n}")
    ball = tree.ball(n)
    if len(ball) > ENUMERATION_CAP:
        raise TooLarge(f"|V_{n}| = {len(ball)} exceeds the enumeration cap {ENUMERATION_CAP}")
    edges = tree.edges(n)
    leaves = tree.sphere(n)
    reps, cls = _leaf_classes(field, leaves)
    sizes = [cls.count(c) for c in range(len(reps))]
    strides = [1]
    for s in sizes[:-1]:
        strides.append(strides[-1] * (s + 1))
    n_keys = strides[-1] * (sizes[-1] + 1)
    counts = kernels.histogram(
        len(ball),
        edges,
        list(leaves),
        [strides[c] for c in cls],
        n_keys,
        group_bits,
    )
    weights = _exp_weights(field.params, len(edges))
    powers = [{j: h**j for j in range(-s, s + 1, 2)} for h, s in zip(reps, sizes)]
    ctx = field.params.ctx
    out = []
    for g in range(counts.shape[0]):
        terms = []
        for d, key in zip(*np.nonzero(counts[g])):
            term = weights[d] * int(counts[g, d, key])
            for c, (stride, size) in enumerate(zip(strides, sizes)):
                plus = int(key) // stride % (size + 1)
                term = term * powers[c][2 * plus - size]
            terms.append(term)
        out.append(psum(terms, ctx))
    return out


@lru_cache(maxsize=64)
def partition_function(n: int, field: BoundaryField) -> PadicNumber:
    """``Z_{n,h}``: exact sum over every configuration of ``V_n``."""
    (z,) = _group_sums(field, n, 0)
    return z


def weight(sigma: Configuration, field: BoundaryField) -> PadicNumber:
    """Unnormalized weight ``exp_p(H_n(sigma)) prod_{x in W_n} h_x**sigma(x)``."""
    tree = field.tree
    n = _ball_depth(tree, sigma.region)
    params = field.params
    if not hamiltonian_admissible(params):
        raise CouplingOutOfRange("exp_p(H) does not converge for this coupling")
    w = exp_p(hamiltonian(tree, sigma, params))
    for x in tree.sphere(n):
        w = w * field[x] ** sigma.spin(x)
    return w


def measure(sigma: Configuration, field: BoundaryField) -> PadicNumber:
    """``mu_h^{(n)}(sigma) = weight(sigma) / Z_{n,h}``."""
    n = _ball_depth(field.tree, sigma.region)
    z = partition_function(n, field)
    if z.is_zero:
        raise DegenerateNormalizer(f"Z_{n} is zero to {z.precision} digits")
    return weight(sigma, field) / z


def measures(n: int, field: BoundaryField) -> list[PadicNumber]:
    """``mu^{(n)}`` for every configuration of ``V_n`` in bit-vector order."""
    per_config = _group_sums(field, n, len(field.tree.ball(n)))
    z = psum(per_config, field.params.ctx)
    if z.is_zero:
        raise DegenerateNormalizer(f"Z_{n} is zero to {z.precision} digits")
    return [w / z for w in per_config]


# -- consistency ----------------------------------------------------------

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass(frozen=True)
class ConsistencyReport:
    n: int
    status: str
    required_digits: int
    max_residual: Norm
    working_precision: int
    failures: int = 0
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS


def _residual_bound(r: PadicNumber) -> Norm:
    # certified upper bound on |r|_p
    if r.is_zero:
        if r.precision is None:
            return Norm(r.prime, None)
        return Norm(r.prime, -r.precision)
    return norm(r)


def check_consistency(n: int, field: BoundaryField, required_digits: int | None = None) -> ConsistencyReport:
    """Check that summing ``mu^{(n)}`` over ``W_n`` reproduces ``mu^{(n-1)}``.

    Every configuration of ``V_n`` is enumerated.  A residual is certified
    small when it is zero to at least ``required_digits`` absolute digits
    (default ``N - 6``).  If cancellation leaves too few known digits the
    report is ``inconclusive`` rather than a pass or a fail.
    """
    if n < 1:
        raise ValueError("consistency relates levels n-1 and n, so n >= 1")
    ctx = field.params.ctx
    p = ctx.prime
    if required_digits is None:
        required_digits = ctx.working_precision - 6
    threshold = Norm(p, -required_digits)
    prev_bits = len(field.tree.ball(n - 1))
    try:
        sums = _group_sums(field, n, prev_bits)
        prev = _group_sums(field, n - 1, prev_bits)
        z_n = psum(sums, ctx)
        z_prev = psum(prev, ctx)
        if z_n.is_zero or z_prev.is_zero:
            raise DegenerateNormalizer("normalizer not certified nonzero")
        residuals = [s / z_n - w / z_prev for s, w in zip(sums, prev)]
    except (DegenerateNormalizer, PrecisionUnderflow) as exc:
        return ConsistencyReport(
            n, INCONCLUSIVE, required_digits, Norm(p, 0), ctx.working_precision, reason=str(exc)
        )
    bounds = [_residual_bound(r) for r in residuals]
    worst = max(bounds)
    failures = sum(1 for r, b in zip(residuals, bounds) if not r.is_zero and b > threshold)
    if worst <= threshold:
        status = PASS
    elif failures:
        status = FAIL
    else:
        status = INCONCLUSIVE
    return ConsistencyReport(n, status, required_digits, worst, ctx.working_precision, failures)


def check_consistency_escalating(
    n: int,
    build_field: Callable[[PadicContext], BoundaryField],
    ctx: PadicContext,
    required_digits: int | None = None,
    max_precision: int = 1024,
) -> ConsistencyReport:
    """Run :func:`check_consistency`, doubling the working precision while inconclusive.

    ``build_field`` must rebuild the field from scratch in the given context so
    that the extra digits are genuine.  The acceptance threshold stays tied to
    the precision originally requested.
    """
    if required_digits is None:
        required_digits = ctx.working_precision - 6
    prec = ctx.working_precision
    while True:
        report = check_consistency(n, build_field(ctx.with_precision(prec)), required_digits)
        if report.status != INCONCLUSIVE:
            return report
        if prec * 2 > max_precision:
            return report
        prec *= 2


def transfer_ratio(n: int, h: PadicNumber, params: ModelParams, tree: FiniteTree) -> PadicNumber:
    """``Z_{n+1} / Z_n`` for a consistent constant field, by summing out ``W_{n+1}``.

    Each vertex of ``W_n`` with spin ``s`` contributes
    ``prod over its k children of (a**s h + a**-s / h)`` with ``a = exp_p(J)``;
    consistency makes this ``c * h**s`` with
    ``c = ((theta h**2 + 1) / (a h))**k / h``, hence the ratio ``c**|W_n|``.
    """
    a = exp_p(params.ctx(params.coupling))
    k = params.order
    c = ((params.theta * h * h + 1) / (a * h)) ** k / h
    return c ** len(tree.sphere(n))


def ratio_check(n: int, field: BoundaryField) -> PadicNumber:
    """``Z_{n+1} / Z_n`` from two independent enumerations."""
    z0 = partition_function(n, field)
    if z0.is_zero:
        raise DegenerateNormalizer(f"Z_{n} is zero at this precision")
    return partition_function(n + 1, field) / z0


__all__ = [
    "ENUMERATION_CAP",
    "BoundaryField",
    "Configuration",
    "ConsistencyReport",
    "FiniteTree",
    "build_tree",
    "check_consistency",
    "check_consistency_escalating",
    "configurations",
    "edge_sum",
    "extend_config",
    "fixed_point_residual",
    "hamiltonian",
    "measure",
    "measures",
    "partition_function",
    "ratio_check",
    "transfer_ratio",
    "weight",
]
