import itertools
import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import invariant_factors as sympy_invariants

from gkzkit import linalg
from gkzkit.linalg import LatticeBasis, NoSolutionError

from strategies import int_matrices

HESSE = [[1, 1, 1, 1], [0, 2, -1, -1], [0, -1, 2, -1]]


def is_row_hnf(H):
    last = -1
    seen_zero = False
    for i, row in enumerate(H):
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            seen_zero = True
            continue
        assert not seen_zero, "zero rows must come last"
        p = nz[0]
        assert p > last and row[p] > 0
        for k in range(i):
            assert 0 <= H[k][p] < row[p]
        last = p
    return True


def same_row_lattice(M, H, ncols):
    a = linalg.lattice_from_generators(M, ncols)
    b = linalg.lattice_from_generators(H, ncols)
    return a == b and all(a.contains(r) for r in M)


def test_xgcd():
    for a, b in itertools.product(range(-12, 13), repeat=2):
        g, x, y = linalg.xgcd(a, b)
        assert g == math.gcd(a, b) and x * a + y * b == g


def test_hnf_identity():
    H, U = linalg.hnf([[1, 0], [0, 1]])
    assert H == [[1, 0], [0, 1]] and U == [[1, 0], [0, 1]]


def test_hnf_small_example():
    M = [[2, 4], [1, 3]]
    H, U = linalg.hnf(M)
    assert linalg.matmul(U, M) == H
    assert abs(linalg.det(U)) == 1
    # canonical form with entries above the pivot reduced into [0, pivot)
    assert H == [[1, 1], [0, 2]]


def test_hnf_brute_force_oracle():
    # every unimodular 2x2 with small entries applied to M gives the same HNF
    M = [[2, 4], [1, 3]]
    target, _ = linalg.hnf(M)
    for a, b, c, d in itertools.product(range(-2, 3), repeat=4):
        if abs(a * d - b * c) == 1:
            H, _ = linalg.hnf(linalg.matmul([[a, b], [c, d]], M))
            assert H == target


def test_hnf_hesse_rank_three():
    H, U = linalg.hnf(HESSE)
    assert sum(1 for r in H if any(r)) == 3
    assert linalg.matmul(U, HESSE) == H


def test_snf_examples():
    S, U, V = linalg.snf([[1, 0], [0, 1]])
    assert S == [[1, 0], [0, 1]]
    S, U, V = linalg.snf([[2, 0], [0, 3]])
    assert S == [[1, 0], [0, 6]]
    assert linalg.matmul(linalg.matmul(U, [[2, 0], [0, 3]]), V) == S


def test_snf_hesse_torus_rows():
    assert linalg.invariant_factors(HESSE[1:]) == [1, 3]


def test_kernel_hesse():
    L = linalg.kernel_lattice(HESSE)
    assert L.basis in (((3, -1, -1, -1),), ((-3, 1, 1, 1),))


def test_kernel_brute_force_hesse():
    L = linalg.kernel_lattice(HESSE)
    for u in itertools.product(range(-3, 4), repeat=4):
        if linalg.matvec(HESSE, u) == [0, 0, 0]:
            assert L.contains(u)


def test_kernel_identity_empty():
    assert linalg.kernel_lattice([[1, 0], [0, 1]]).basis == ()


def test_kernel_r2():
    A = [[1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1], [-1, 0, 1, -1, 0, 1]]
    L = linalg.kernel_lattice(A)
    assert L.rank == 3
    for u in L.basis:
        assert linalg.matvec(A, u) == [0, 0, 0]
    assert linalg.invariant_factors(L.as_matrix()) == [1, 1, 1]


def test_lattice_index():
    assert linalg.lattice_index(LatticeBasis(2, ((1, 0), (0, 1))), 2) == 1
    W = linalg.lattice_from_generators([(0, 0), (2, -1), (-1, 2), (-1, -1)], 2)
    assert linalg.lattice_index(W, 2) == 3
    assert linalg.lattice_index(LatticeBasis(2, ((1, 2),)), 2) == math.inf


def test_solve_rational():
    assert linalg.solve_rational([[1, 0], [0, 1]], [3, 4]) == [3, 4]
    A_sigma = [[1, 1, 1], [0, 0, 1], [0, -1, 1]]
    v = linalg.solve_rational(A_sigma, [-1, 0, 0])
    # Cramer's rule oracle
    d = linalg.det(A_sigma)
    for i in range(3):
        Ai = [row[:i] + [b] + row[i + 1:] for row, b in zip(A_sigma, [-1, 0, 0])]
        assert v[i] == Fraction(linalg.det(Ai), d)
    with pytest.raises(NoSolutionError):
        linalg.solve_rational([[1, 0], [0, 1], [1, 1]], [1, 1, 3])


def test_inverse_and_det_against_sympy():
    M = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]
    assert linalg.det(M) == sympy.Matrix(M).det()
    inv = linalg.inverse(M)
    assert sympy.Matrix(inv) == sympy.Matrix(M).inv()


@settings(max_examples=80, deadline=None)
@given(int_matrices())
def test_hnf_properties(M):
    n = len(M[0])
    H, U = linalg.hnf(M, n)
    assert linalg.matmul(U, M) == H
    assert abs(linalg.det(U)) == 1
    assert is_row_hnf(H)
    assert same_row_lattice(M, H, n)
    assert sum(1 for r in H if any(r)) == sympy.Matrix(M).rank()


@settings(max_examples=80, deadline=None)
@given(int_matrices())
def test_snf_properties(M):
    S, U, V = linalg.snf(M)
    assert linalg.matmul(linalg.matmul(U, M), V) == S
    assert abs(linalg.det(U)) == 1 and abs(linalg.det(V)) == 1
    diag = [S[i][i] for i in range(min(len(S), len(S[0])))]
    assert all(S[i][j] == 0 for i in range(len(S)) for j in range(len(S[0])) if i != j)
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert nz == [int(x) for x in sympy_invariants(sympy.Matrix(M), domain=sympy.ZZ) if x]


@settings(max_examples=80, deadline=None)
@given(int_matrices())
def test_kernel_properties(M):
    n = len(M[0])
    L = linalg.kernel_lattice(M, n)
    assert L.rank == n - sympy.Matrix(M).rank()
    for u in L.basis:
        assert linalg.matvec(M, u) == [0] * len(M)
    if L.rank:
        assert linalg.invariant_factors(L.as_matrix(), n) == [1] * L.rank


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=2, max_size=5),
       st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)))
def test_lattice_index_unimodular_invariance(gens, u):
    a, b, c, d = u
    if a * d - b * c not in (1, -1):
        return
    L = linalg.lattice_from_generators(gens, 2)
    if L.rank < 2:
        assert linalg.lattice_index(L, 2) == math.inf
        return
    moved = linalg.lattice_from_generators(linalg.matmul([[a, b], [c, d]], L.as_matrix()), 2)
    assert linalg.lattice_index(moved, 2) == linalg.lattice_index(L, 2) == abs(linalg.det(L.as_matrix()))


@settings(max_examples=60, deadline=None)
@given(int_matrices(max_rows=4, max_cols=4, lo=-5, hi=5), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_solve_rational_consistent(M, x):
    n = len(M[0])
    b = linalg.matvec(M, x[:n])
    sol = linalg.solve_rational(M, b)
    assert linalg.matvec(M, sol) == b
