"""p-adic Ising model on Cayley trees: arithmetic, translation-invariant
solutions, finite-volume measures and their verification."""

from .art import ArtField, ArtReport, build_art_field, embed_v2, three_fields, verify_art
from .errors import *  # noqa: F401,F403
from .functions import (
    exp_domain,
    exp_p,
    in_ep,
    is_square,
    log_domain,
    log_p,
    mod_sqrt,
    sqrt,
)
from .padic import Norm, PadicContext, PadicNumber, digits, eq_mod, from_rational, norm, psum
from .solver import (
    ModelParams,
    TiSolutionSet,
    boundedness,
    canonical_coupling,
    classify,
    expected_measure_count,
    expected_solution_count,
    make_params,
    measure_norm,
    phase_transition_verdict,
    solve_k2,
    solve_k3,
    solve_ti,
    sqrt_delta_exists,
    sqrt_z3_exists,
    z_norm,
)
from .tree import (
    BoundaryField,
    Configuration,
    build_tree,
    check_consistency,
    check_consistency_escalating,
    measure,
    partition_function,
)

__version__ = "0.1.0"
