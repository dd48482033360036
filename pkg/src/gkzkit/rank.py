"""Combinatorial rank predictions and the series-count cross-check."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg, polytope
from .gkz import (
    AConfig,
    InvalidConfigError,
    Verdict,
    beta_standard,
    check_hypothesis,
    check_property_star,
    check_semi_nonresonant_sufficient,
)
from .series import SeriesFamily, count_independent, find_gamma_family

GENERIC_VOLUME = "generic-volume"
RANK_ONE_POINT = "rank-one-point"

_REASONS = {
    GENERIC_VOLUME: (
        "generic coefficients: rank H_n(U_a, U_a & D) equals the normalized volume of "
        "conv(columns) measured in the lattice generated by the columns"
    ),
    RANK_ONE_POINT: (
        "constant sections only: U_a = T, the torus, and H_n(T) has rank 1"
    ),
}


@dataclass(frozen=True)
class RankReport:
    predicted_rank: int
    justification: str
    hypothesis_ok: bool
    semi_nonresonance: Verdict
    lattice_index_used: int

    @property
    def reason(self) -> str:
        return _REASONS[self.justification]


def _column_index(c: AConfig) -> int:
    idx = linalg.lattice_index(c.column_lattice(), c.r + c.n)
    # rank r+n is an AConfig invariant, so the index is finite
    return int(idx)


def predicted_rank_generic(c: AConfig, beta: Sequence | None = None) -> RankReport:
    """Normalized volume of ``conv(columns)`` in the column lattice."""
    beta = beta if beta is not None else beta_standard(c.r, c.n)
    vol = polytope.normalized_volume(c.columns, c.column_lattice())
    return RankReport(
        predicted_rank=vol,
        justification=GENERIC_VOLUME,
        hypothesis_ok=check_hypothesis(c),
        semi_nonresonance=check_semi_nonresonant_sufficient(c, beta),
        lattice_index_used=_column_index(c),
    )


def rank_one_point(c: AConfig, beta: Sequence | None = None) -> tuple[tuple[int, ...], RankReport]:
    """Coefficient vector selecting one constant section per block.

    The lowest-index column with zero torus weight is chosen in each block.
    """
    if not check_property_star(c):
        raise InvalidConfigError("property (*) fails: some block has no zero-weight column")
    beta = beta if beta is not None else beta_standard(c.r, c.n)
    zero = (0,) * c.n
    a = [0] * c.N
    for block in c.blocks():
        a[next(j for j in block if c.w_part(j) == zero)] = 1
    report = RankReport(
        predicted_rank=1,
        justification=RANK_ONE_POINT,
        hypothesis_ok=check_hypothesis(c),
        semi_nonresonance=check_semi_nonresonant_sufficient(c, beta),
        lattice_index_used=_column_index(c),
    )
    return tuple(a), report


@dataclass
class MainCheck:
    """Outcome of comparing the Gamma-series count with the predicted rank.

    ``conditional`` is set when semi-nonresonance could not be confirmed,
    in which case a match is not a verification of the rank identity.
    """

    series_count: int
    predicted_rank: int
    report: RankReport
    family: SeriesFamily
    attempts: list = field(default_factory=list)

    @property
    def matches(self) -> bool:
        return self.series_count == self.predicted_rank

    @property
    def conditional(self) -> bool:
        return self.report.semi_nonresonance is not Verdict.PASS

    @property
    def verified(self) -> bool:
        return self.matches and not self.conditional

    @property
    def all_members_pass(self) -> bool:
        return all(m.verdict.passed for m in self.family.members)


def verify_main(
    c: AConfig,
    beta: Sequence | None = None,
    order: int = 6,
    degree_bound: int = 6,
    simplices: Sequence[Sequence[int]] | None = None,
    *,
    search: bool = True,
) -> MainCheck:
    """Count independent Gamma-series solutions and compare with the volume.

    Without explicit ``simplices`` the lexicographic placing triangulation is
    used; with ``search`` further placing orders are tried until one reaches
    the predicted rank.
    """
    beta = tuple(Fraction(b) for b in beta) if beta is not None else beta_standard(c.r, c.n)
    report = predicted_rank_generic(c, beta)
    limit = 200 if search else 0
    if simplices is None and not search:
        t = polytope.placing_triangulation(c.columns)
        simplices = t.simplices
    fam, attempts = find_gamma_family(
        c, beta, report.predicted_rank, order, degree_bound, simplices, limit=limit
    )
    return MainCheck(count_independent(fam), report.predicted_rank, report, fam, attempts)
