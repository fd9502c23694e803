"""Boundary fields on order-k trees (k >= 3) built from the order-2 solutions.

The order-2 tree is planted inside the order-k tree: the root keeps its
first three children, every other planted vertex keeps its first two.
Planted vertices carry a nontrivial constant order-2 solution, all others
carry 1.  A planted vertex then sees two planted children (the order-2
equation) and ``k - 2`` children contributing factor 1; an unplanted
vertex only has unplanted children.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NoSolution, OrderTooSmall
from .padic import Norm, norm
from .solver import ModelParams, solve_k2
from .tree import BoundaryField, FiniteTree, build_tree, fixed_point_residual

DEFAULT_DEPTH = 4


def embed_v2(tree: FiniteTree) -> tuple[bool, ...]:
    """Marks of the embedded order-2 tree, one flag per vertex."""
    if tree.order < 3:
        raise OrderTooSmall(f"embedding needs k >= 3, got k={tree.order}")
    marked = [False] * tree.n_vertices
    marked[tree.root] = True
    for x in range(tree.n_vertices):
        if not marked[x]:
            continue
        keep = 3 if x == tree.root else 2
        for y in tree.successors(x)[:keep]:
            marked[y] = True
    return tuple(marked)


@dataclass(frozen=True, eq=False)
class ArtField:
    order: int
    depth: int
    index: int
    marked: tuple[bool, ...]
    field: BoundaryField


def build_art_field(i: int, params: ModelParams, depth: int = DEFAULT_DEPTH) -> ArtField:
    if i not in (1, 2):
        raise ValueError("the planted order-2 root index is 1 or 2")
    if params.order < 3:
        raise OrderTooSmall(f"need k >= 3, got k={params.order}")
    sol = solve_k2(params.with_order(2))
    if not sol.sqrt_discriminant_exists:
        raise NoSolution(
            f"the order-2 equation has only h = 1 at p={params.prime} (needs p = 1 mod 4)"
        )
    h = sol.roots[i]
    one = params.ctx.one()
    tree = build_tree(params.order, depth)
    marked = embed_v2(tree)
    field = BoundaryField(tree, tuple(h if m else one for m in marked), params)
    return ArtField(params.order, depth, i, marked, field)


@dataclass(frozen=True)
class ArtReport:
    order: int
    depth: int
    index: int
    checked: int
    max_residual: Norm
    required_digits: int
    failures: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_art(art: ArtField | BoundaryField, required_digits: int | None = None) -> ArtReport:
    """Fixed-point residual at every non-root vertex that has successors."""
    field = art.field if isinstance(art, ArtField) else art
    tree = field.tree
    ctx = field.params.ctx
    if required_digits is None:
        required_digits = ctx.working_precision - 4
    threshold = Norm(ctx.prime, -required_digits)
    worst = Norm(ctx.prime, None)
    failures = []
    interior = range(1, tree.offsets[tree.depth])
    for x in interior:
        r = fixed_point_residual(field, x)
        if r.is_zero:
            bound = Norm(ctx.prime, None if r.precision is None else -r.precision)
        else:
            bound = norm(r)
        worst = max(worst, bound)
        if bound > threshold:
            failures.append(x)
    return ArtReport(
        tree.order,
        tree.depth,
        getattr(art, "index", 0),
        len(interior),
        worst,
        required_digits,
        tuple(failures),
    )


def three_fields(params: ModelParams, depth: int = DEFAULT_DEPTH) -> tuple[BoundaryField, ArtField, ArtField]:
    """The constant field 1 and both planted fields on the same tree shape."""
    art1 = build_art_field(1, params, depth)
    art2 = build_art_field(2, params, depth)
    ones = BoundaryField.constant(art1.field.tree, params.ctx.one(), params)
    return ones, art1, art2
