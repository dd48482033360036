"""Exact toolkit for GKZ systems of block-structured A-matrices.

Integer normal forms, lattice polytopes, box and Euler operators, truncated
Gamma-series (with logarithmic completion at resonant exponents) and
combinatorial rank predictions.
"""

__version__ = "0.1.0"

from .linalg import LatticeBasis, NoSolutionError, hnf, kernel_lattice, lattice_index, snf, solve_rational
from .polytope import (
    HullDescription,
    PointSet,
    Triangulation,
    cone_facets,
    contains_strict_interior,
    convex_hull,
    lattice_points,
    minkowski_sum,
    normalized_volume,
    placing_triangulation,
)
from .gkz import (
    AConfig,
    BoxOperator,
    EulerOperator,
    GkzSystem,
    InvalidConfigError,
    Verdict,
    beta_standard,
    box_operators,
    build_config,
    check_homogeneous,
    check_hypothesis,
    check_property_star,
    check_semi_nonresonant_sufficient,
    euler_operators,
    gkz_system,
    normalize_basis,
)
from .series import (
    FormalSeries,
    LogSeries,
    SeriesFamily,
    apply_box,
    apply_euler,
    count_independent,
    gamma_family,
    gamma_series,
    initial_exponents,
    verify_annihilation,
)
from .rank import RankReport, predicted_rank_generic, rank_one_point, verify_main
