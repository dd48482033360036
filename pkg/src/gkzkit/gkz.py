"""Block-structured A-matrices and the operators of their GKZ systems."""

from __future__ import annotations

import enum
import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg, polytope
from .linalg import LatticeBasis
from .polytope import PointSet


class InvalidConfigError(ValueError):
    """The matrix or polytope family does not define a valid configuration."""


@dataclass(frozen=True)
class AConfig:
    """An ``(r+n) x N`` integer matrix with columns grouped into ``r`` blocks.

    Column ``j`` splits as ``(a_j, w_j)`` with ``a_j`` in ``Z^r`` and the
    torus weight ``w_j`` in ``Z^n``. The full matrix must have rank ``r+n``.
    """

    r: int
    n: int
    block_sizes: tuple[int, ...]
    columns: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "block_sizes", tuple(self.block_sizes))
        object.__setattr__(self, "columns", tuple(tuple(int(x) for x in c) for c in self.columns))
        if len(self.block_sizes) != self.r:
            raise InvalidConfigError(f"expected {self.r} block sizes, got {len(self.block_sizes)}")
        if sum(self.block_sizes) != len(self.columns):
            raise InvalidConfigError("block sizes do not add up to the number of columns")
        if any(len(c) != self.r + self.n for c in self.columns):
            raise InvalidConfigError(f"every column needs {self.r + self.n} entries")
        if linalg.rank(self.matrix) != self.r + self.n:
            raise InvalidConfigError(f"matrix does not have full rank r+n = {self.r + self.n}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], r: int, block_sizes: Sequence[int]) -> "AConfig":
        return cls(r, len(rows) - r, tuple(block_sizes), tuple(zip(*rows)))

    @property
    def N(self) -> int:
        return len(self.columns)

    @property
    def matrix(self) -> list[list[int]]:
        return [list(row) for row in zip(*self.columns)] if self.columns else []

    def a_part(self, j: int) -> tuple[int, ...]:
        return self.columns[j][: self.r]

    def w_part(self, j: int) -> tuple[int, ...]:
        return self.columns[j][self.r:]

    def blocks(self) -> list[range]:
        out, start = [], 0
        for size in self.block_sizes:
            out.append(range(start, start + size))
            start += size
        return out

    def block_of(self, j: int) -> int:
        return next(i for i, b in enumerate(self.blocks()) if j in b)

    def kernel(self) -> LatticeBasis:
        return linalg.kernel_lattice(self.matrix, self.N)

    def column_lattice(self) -> LatticeBasis:
        return linalg.lattice_from_generators(self.columns, self.r + self.n)


def build_config(deltas: Sequence) -> AConfig:
    """Configuration from lattice polytopes ``Delta_1, ..., Delta_r``.

    Block ``i`` gets one column ``(e_i, w)`` per lattice point ``w`` of
    ``Delta_i``, in lexicographic order.
    """
    if not deltas:
        raise InvalidConfigError("need at least one polytope")
    sets = [d if isinstance(d, PointSet) else PointSet(d) for d in deltas]
    n = sets[0].dim
    if any(s.dim != n for s in sets):
        raise InvalidConfigError("polytopes live in different dimensions")
    r = len(sets)
    cols, sizes = [], []
    for i, s in enumerate(sets):
        pts = sorted(polytope.lattice_points(polytope.convex_hull(s)).points)
        e = tuple(int(k == i) for k in range(r))
        cols.extend(e + p for p in pts)
        sizes.append(len(pts))
    return AConfig(r, n, tuple(sizes), tuple(cols))


def check_homogeneous(c: AConfig) -> bool:
    for i, block in enumerate(c.blocks()):
        e = tuple(int(k == i) for k in range(c.r))
        if any(c.a_part(j) != e for j in block):
            return False
    return True


def hypothesis_point(c: AConfig) -> tuple[Fraction, ...]:
    return tuple([Fraction(1, c.r)] * c.r + [Fraction(0)] * c.n)


def check_hypothesis(c: AConfig) -> bool:
    """Is ``(1/r, ..., 1/r, 0, ..., 0)`` in the relative interior of conv(columns)?"""
    hull = polytope.convex_hull(c.columns)
    return polytope.contains_strict_interior(hull, hypothesis_point(c))


def check_property_star(c: AConfig) -> bool:
    """Every block has a column with zero torus weight."""
    zero = (0,) * c.n
    return all(any(c.w_part(j) == zero for j in block) for block in c.blocks())


def beta_standard(r: int, n: int) -> tuple[Fraction, ...]:
    return tuple([Fraction(-1)] * r + [Fraction(0)] * n)


@dataclass(frozen=True)
class BoxOperator:
    """``d^nu_plus - d^nu_minus`` with ``A nu_plus == A nu_minus``."""

    nu_plus: tuple[int, ...]
    nu_minus: tuple[int, ...]

    @property
    def degree(self) -> int:
        return max(sum(self.nu_plus), sum(self.nu_minus))

    @property
    def direction(self) -> tuple[int, ...]:
        return tuple(p - m for p, m in zip(self.nu_plus, self.nu_minus))

    @classmethod
    def from_kernel_vector(cls, u: Sequence[int]) -> "BoxOperator":
        return cls(tuple(max(x, 0) for x in u), tuple(max(-x, 0) for x in u))

    def __str__(self):
        def mono(nu):
            parts = [f"d{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(nu) if e]
            return "*".join(parts) or "1"

        return f"{mono(self.nu_plus)} - {mono(self.nu_minus)}"


@dataclass(frozen=True)
class EulerOperator:
    """``sum_j weights[j] x_j d_j - beta_l``."""

    weights: tuple[int, ...]
    level: int
    beta_l: Fraction


@dataclass(frozen=True)
class GkzSystem:
    config: AConfig
    beta: tuple[Fraction, ...]
    boxes: tuple[BoxOperator, ...]
    eulers: tuple[EulerOperator, ...]


def lattice_vectors(L: LatticeBasis, radius: int) -> list[tuple[int, ...]]:
    """All vectors of ``L`` with l1-norm at most ``radius``, sorted by (norm, vector)."""
    N = L.ambient_dim
    if L.rank == 0:
        return [(0,) * N]
    K = L.as_matrix()
    # coefficients are recovered from pivot coordinates, which bounds them
    _, pivots = linalg._row_echelon(K, N)
    sub = [[row[p] for p in pivots] for row in K]
    inv = linalg.inverse(linalg.transpose(sub))
    bounds = [math.floor(radius * max(abs(x) for x in row)) for row in inv]
    out = []
    for coeffs in itertools.product(*(range(-b, b + 1) for b in bounds)):
        u = tuple(sum(c * row[j] for c, row in zip(coeffs, K)) for j in range(N))
        if sum(abs(x) for x in u) <= radius:
            out.append(u)
    out.sort(key=lambda u: (sum(abs(x) for x in u), u))
    return out


def box_operators(c: AConfig, degree_bound: int) -> list[BoxOperator]:
    """Box operators from every kernel vector whose positive and negative
    parts both have degree at most ``degree_bound``.

    ``u`` and ``-u`` give the same operator up to sign; the representative
    whose first nonzero entry is negative is kept.
    """
    if degree_bound < 1:
        raise ValueError("degree_bound must be at least 1")
    L = c.kernel()
    ops = []
    for u in lattice_vectors(L, 2 * degree_bound):
        if not any(u) or next(x for x in u if x) > 0:
            continue
        op = BoxOperator.from_kernel_vector(u)
        if op.degree <= degree_bound:
            ops.append(op)
    ops.sort(key=lambda b: (b.degree, b.direction))
    if L.rank and not ops:
        warnings.warn(f"degree bound {degree_bound} admits no box operator", stacklevel=2)
    return ops


def euler_operators(c: AConfig, beta: Sequence) -> list[EulerOperator]:
    if len(beta) != c.r + c.n:
        raise ValueError(f"beta must have {c.r + c.n} entries")
    return [
        EulerOperator(tuple(row), l, Fraction(beta[l])) for l, row in enumerate(c.matrix)
    ]


def gkz_system(c: AConfig, beta: Sequence | None = None, degree_bound: int = 6) -> GkzSystem:
    beta = tuple(Fraction(b) for b in beta) if beta is not None else beta_standard(c.r, c.n)
    return GkzSystem(c, beta, tuple(box_operators(c, degree_bound)), tuple(euler_operators(c, beta)))


def _size_reduce(basis: list[list[int]]) -> list[list[int]]:
    """Gram-Schmidt size reduction, rounding mu to the nearest integer (halves up)."""
    b = [list(v) for v in basis]
    gs: list[list[Fraction]] = []
    for i in range(len(b)):
        for j in reversed(range(i)):
            mu = Fraction(sum(x * y for x, y in zip(b[i], gs[j])), sum(y * y for y in gs[j]))
            q = math.floor(mu + Fraction(1, 2))
            if q:
                b[i] = [x - q * y for x, y in zip(b[i], b[j])]
        v = [Fraction(x) for x in b[i]]
        for g in gs:
            mu = sum(x * y for x, y in zip(b[i], g)) / sum(y * y for y in g)
            v = [x - mu * y for x, y in zip(v, g)]
        gs.append(v)
    return b


def torus_basis(c: AConfig) -> list[list[int]]:
    """Canonical basis of the lattice spanned by the torus weights.

    HNF basis, then size reduced; for the Hesse matrix this is
    ``(1, 1), (-2, 1)``.
    """
    W = linalg.lattice_from_generators([c.w_part(j) for j in range(c.N)], c.n)
    if W.rank < c.n:
        raise InvalidConfigError("torus weights do not span Q^n")
    return _size_reduce(W.as_matrix())


@dataclass(frozen=True)
class Normalization:
    R: list[list[Fraction]]
    B: list[list[Fraction]]
    B_inv: list[list[int]]
    config: AConfig


def normalize_basis(c: AConfig) -> Normalization:
    """Rescale the torus rows so the weights generate ``Z^n``.

    ``B_inv`` has the canonical torus basis as columns and ``B`` is its
    inverse; ``R = diag(I_r, B)`` and the new configuration is ``R A``.
    """
    if not check_property_star(c):
        raise InvalidConfigError("property (*) fails: some block has no zero-weight column")
    basis = torus_basis(c)
    B_inv = linalg.transpose(basis)
    B = linalg.inverse(B_inv)
    size = c.r + c.n
    R = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    for i in range(c.n):
        for j in range(c.n):
            R[c.r + i][c.r + j] = B[i][j]
    new_cols = []
    for col in c.columns:
        image = linalg.matvec(R, col)
        assert all(x.denominator == 1 for x in image)
        new_cols.append(tuple(int(x) for x in image))
    return Normalization(R, B, B_inv, AConfig(c.r, c.n, c.block_sizes, tuple(new_cols)))


class Verdict(enum.Enum):
    PASS = "pass"
    INDETERMINATE = "indeterminate"


def check_semi_nonresonant_sufficient(c: AConfig, beta: Sequence) -> Verdict:
    """Sound facet test: PASS if every facet functional of the cone is negative on beta.

    Any element of ``(Z^d & Q_{>=0} A) + C F`` for a proper face ``F`` is
    nonnegative under the facet functional containing ``F``, so PASS implies
    semi-nonresonance. Anything else is left undecided.
    """
    cone = polytope.cone_facets(c.columns)
    if cone.equations or not cone.normals:
        return Verdict.INDETERMINATE
    for phi in cone.normals:
        if sum(Fraction(a) * b for a, b in zip(phi, beta)) >= 0:
            return Verdict.INDETERMINATE
    return Verdict.PASS
