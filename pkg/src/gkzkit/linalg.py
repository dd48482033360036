"""Exact integer and rational linear algebra.

Matrices are plain lists of rows holding Python ints (or Fractions where
noted). Nothing here touches floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list[int]]


class NoSolutionError(ValueError):
    """Raised by :func:`solve_rational` for an inconsistent system."""


@dataclass(frozen=True)
class LatticeBasis:
    """A sublattice of ``Z^ambient_dim`` given by linearly independent rows."""

    ambient_dim: int
    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for v in self.basis:
            if len(v) != self.ambient_dim:
                raise ValueError("basis vector length does not match ambient_dim")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def as_matrix(self) -> Matrix:
        return [list(v) for v in self.basis]

    def contains(self, x: Sequence[int]) -> bool:
        """True if the integer vector ``x`` lies in the lattice."""
        if self.rank == 0:
            return all(c == 0 for c in x)
        try:
            coeffs = solve_rational(transpose(self.as_matrix(), self.rank), list(x))
        except NoSolutionError:
            return False
        return all(c.denominator == 1 for c in coeffs)


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*M)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], x: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _elim(a: int, b: int) -> tuple[int, int, int, int]:
    """Unimodular ``[[x, y], [s, t]]`` sending ``(a, b)`` to ``(g, 0)``.

    Plain elimination when ``a`` divides ``b``, so row ``a`` is left alone.
    """
    if a and b % a == 0:
        return 1, 0, -(b // a), 1
    g, x, y = xgcd(a, b)
    return x, y, -b // g, a // g


def det(M: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(row) for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _row_echelon(M: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    A = [[Fraction(x) for x in row] for row in M]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A, pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    return len(_row_echelon(M, len(M[0]))[1])


def inverse(M: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact inverse over Q; raises ``ValueError`` for singular input."""
    n = len(M)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    R, pivots = _row_echelon(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in R[:n]]


def hnf(M: Sequence[Sequence[int]], ncols: int | None = None) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form.

    Returns ``(H, U)`` with ``U @ M == H``, ``U`` unimodular, ``H`` in row
    echelon form with positive pivots and the entries above each pivot
    reduced into ``[0, pivot)``. Zero rows of ``H`` come last.
    """
    m = len(M)
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    H = [list(row) for row in M]
    U = identity(m)
    pr = 0
    for col in range(n):
        if pr == m:
            break
        for i in range(pr + 1, m):
            b = H[i][col]
            if b == 0:
                continue
            a = H[pr][col]
            g, x, y = xgcd(a, b)
            s, t = -b // g, a // g
            for X in (H, U):
                top, bot = X[pr], X[i]
                X[pr] = [x * p + y * q for p, q in zip(top, bot)]
                X[i] = [s * p + t * q for p, q in zip(top, bot)]
        p = H[pr][col]
        if p == 0:
            continue
        if p < 0:
            H[pr] = [-v for v in H[pr]]
            U[pr] = [-v for v in U[pr]]
            p = -p
        for i in range(pr):
            q = H[i][col] // p
            if q:
                H[i] = [u - q * v for u, v in zip(H[i], H[pr])]
                U[i] = [u - q * v for u, v in zip(U[i], U[pr])]
        pr += 1
    return H, U


def snf(M: Sequence[Sequence[int]], ncols: int | None = None) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``(S, U, V)`` with ``U @ M @ V == S``.

    ``S`` is diagonal with nonnegative entries ``d_1 | d_2 | ...``.
    """
    m = len(M)
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    S = [list(row) for row in M]
    U = identity(m)
    V = identity(n)

    def row_combine(i, j, x, y, s, t):
        for X in (S, U):
            a, b = X[i], X[j]
            X[i] = [x * p + y * q for p, q in zip(a, b)]
            X[j] = [s * p + t * q for p, q in zip(a, b)]

    def col_combine(i, j, x, y, s, t):
        for X in (S, V):
            for row in X:
                a, b = row[i], row[j]
                row[i] = x * a + y * b
                row[j] = s * a + t * b

    for k in range(min(m, n)):
        nz = [(abs(S[i][j]), i, j) for i in range(k, m) for j in range(k, n) if S[i][j]]
        if not nz:
            break
        _, i0, j0 = min(nz)
        S[k], S[i0] = S[i0], S[k]
        U[k], U[i0] = U[i0], U[k]
        for X in (S, V):
            for row in X:
                row[k], row[j0] = row[j0], row[k]
        while True:
            for i in range(k + 1, m):
                b = S[i][k]
                if b:
                    row_combine(k, i, *_elim(S[k][k], b))
            for j in range(k + 1, n):
                b = S[k][j]
                if b:
                    col_combine(k, j, *_elim(S[k][k], b))
            if any(S[i][k] for i in range(k + 1, m)):
                continue
            d = S[k][k]
            bad = next(
                (i for i in range(k + 1, m) for j in range(k + 1, n) if S[i][j] % d),
                None,
            )
            if bad is None:
                break
            # fold the offending row in so the next gcd step shrinks the pivot
            S[k] = [p + q for p, q in zip(S[k], S[bad])]
            U[k] = [p + q for p, q in zip(U[k], U[bad])]
        if S[k][k] < 0:
            S[k] = [-v for v in S[k]]
            U[k] = [-v for v in U[k]]
    return S, U, V


def invariant_factors(M: Sequence[Sequence[int]], ncols: int | None = None) -> list[int]:
    S, _, _ = snf(M, ncols)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0)) if S[i][i]]


def kernel_lattice(A: Sequence[Sequence[int]], ncols: int | None = None) -> LatticeBasis:
    """Saturated basis of ``{u in Z^N : A u = 0}``, canonicalized by HNF."""
    N = ncols if ncols is not None else (len(A[0]) if A else 0)
    At = transpose(A, N)
    H, U = hnf(At, len(A))
    kern = [U[i] for i in range(N) if not any(H[i])]
    if not kern:
        return LatticeBasis(N, ())
    K, _ = hnf(kern, N)
    return LatticeBasis(N, tuple(tuple(row) for row in K if any(row)))


def lattice_index(sub: LatticeBasis, dim: int) -> int | float:
    """Index ``[Z^dim : sub]``; ``math.inf`` when ``sub`` is not of full rank."""
    if sub.ambient_dim != dim:
        raise ValueError("sublattice lives in a different ambient dimension")
    if dim == 0:
        return 1
    if rank(sub.as_matrix()) < dim:
        return math.inf
    return math.prod(invariant_factors(sub.as_matrix(), dim))


def lattice_from_generators(gens: Sequence[Sequence[int]], dim: int) -> LatticeBasis:
    """HNF basis of the lattice spanned by arbitrary integer generators."""
    if not gens:
        return LatticeBasis(dim, ())
    H, _ = hnf(gens, dim)
    return LatticeBasis(dim, tuple(tuple(r) for r in H if any(r)))


def solve_rational(M: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Exact solution of ``M x = b`` over Q.

    Free variables, if any, are set to zero. Raises :class:`NoSolutionError`
    when the system is inconsistent.
    """
    ncols = len(M[0]) if M else 0
    aug = [list(row) + [b[i]] for i, row in enumerate(M)]
    R, pivots = _row_echelon(aug, ncols + 1)
    if ncols in pivots:
        raise NoSolutionError("inconsistent linear system")
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = R[r][ncols]
    return x
