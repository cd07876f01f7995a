"""Exact integer linear algebra: Smith form, invariants, mod-p kernels."""

import math
import random
from itertools import combinations

import pytest

from fptower import (IntMatrix, determinant, smith_normal_form,
                     exponent_matrix, abelian_invariants, mod_p_rank,
                     mod_p_nullspace, lattice_index, parse_presentation)
from fptower.intmat import AbelianInvariants


def _random_matrix(rng, max_dim=6, max_entry=9):
    m = rng.randrange(1, max_dim + 1)
    n = rng.randrange(1, max_dim + 1)
    return [[rng.randrange(-max_entry, max_entry + 1) for _ in range(n)]
            for _ in range(m)]


def _minor_gcds(dense, m, n, upto):
    """gcd of all k x k minors for k = 1..upto (0 when all minors vanish)."""
    out = []
    for k in range(1, upto + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                sub = IntMatrix.from_rows(
                    [[dense[i][j] for j in cols] for i in rows])
                g = math.gcd(g, abs(determinant(sub)))
        out.append(g)
    return out


def test_snf_properties_1000_random():
    rng = random.Random(1)
    for _ in range(1000):
        dense = _random_matrix(rng)
        A = IntMatrix.from_rows(dense)
        res = smith_normal_form(A, transforms=True)
        # divisibility chain of positive invariant factors
        assert all(d > 0 for d in res.diagonal)
        for a, b in zip(res.diagonal, res.diagonal[1:]):
            assert b % a == 0
        # U A V = D with unimodular transforms
        assert res.U.matmul(A).matmul(res.V) == res.D()
        assert abs(determinant(res.U)) == 1
        assert abs(determinant(res.V)) == 1
        # the sparse path agrees with the dense path
        assert smith_normal_form(A).diagonal == res.diagonal
        # invariance under row/column permutation and transpose
        perm = list(range(len(dense)))
        rng.shuffle(perm)
        B = IntMatrix.from_rows([dense[i] for i in perm])
        assert smith_normal_form(B).diagonal == res.diagonal
        assert smith_normal_form(A.transpose()).diagonal == res.diagonal


def test_snf_against_minor_gcd_oracle():
    """d_1 * ... * d_k = gcd of all k x k minors (independent derivation)."""
    rng = random.Random(2)
    for _ in range(60):
        dense = _random_matrix(rng, max_dim=4, max_entry=6)
        A = IntMatrix.from_rows(dense)
        diag = smith_normal_form(A).diagonal
        gcds = _minor_gcds(dense, A.nrows, A.ncols, min(A.nrows, A.ncols))
        prod = 1
        for k, d in enumerate(diag):
            prod *= d
            assert gcds[k] == prod
        for k in range(len(diag), len(gcds)):
            assert gcds[k] == 0


def test_determinant_examples():
    assert determinant(IntMatrix.from_rows([[2, 1], [1, 2]])) == 3
    assert determinant(IntMatrix.from_rows([[1, 2], [2, 4]])) == 0
    assert determinant(IntMatrix.identity(5)) == 1


def test_determinant_multiplicative_random():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randrange(1, 5)
        A = IntMatrix.from_rows(
            [[rng.randrange(-4, 5) for _ in range(n)] for _ in range(n)])
        B = IntMatrix.from_rows(
            [[rng.randrange(-4, 5) for _ in range(n)] for _ in range(n)])
        assert determinant(A.matmul(B)) == determinant(A) * determinant(B)


def test_abelian_invariants_examples():
    # SNF of [[3,0],[0,3],[6,6]] has invariant factors (3, 3)
    diag = smith_normal_form(IntMatrix.from_rows([[3, 0], [0, 3], [6, 6]]))
    assert diag.diagonal == [3, 3]
    cases = {
        "<x, y | x^3, y^3, (x*y)^3*(y*x)^3>": "[3,3]",
        "<x, y |>": "[0,0]",
        "<x | x^12>": "[12]",
        "<x, y | x^2, y^2>": "[2,2]",
        "<x, y | x^6, y^15, (x, y)>": "[3,30]",
    }
    for text, expected in cases.items():
        assert str(abelian_invariants(parse_presentation(text))) == expected


def test_abelian_invariants_bracket_round_trip():
    inv = AbelianInvariants((3, 21), 2)
    assert inv.brackets() == [3, 21, 0, 0]
    assert str(inv) == "[3,21,0,0]"
    assert inv.order() is None
    assert AbelianInvariants.from_brackets([3, 21, 0, 0]) == inv
    assert AbelianInvariants((2, 4), 0).order() == 8


def test_exponent_matrix():
    p = parse_presentation("<x, y | x^3, (x, y), x*y^-2>")
    # the commutator relator contributes an all-zero exponent row
    assert exponent_matrix(p).to_dense() == [[3, 0], [0, 0], [1, -2]]


def test_mod_p_rank_and_nullspace():
    A = IntMatrix.from_rows([[1, 2, 0], [0, 3, 3], [1, 5, 3]])
    # mod 3 the three rows are (1,2,0), (0,0,0), (1,2,0): rank 1
    assert mod_p_rank(A, 3) == 1
    # mod 2 the rows are (1,0,0), (0,1,1), (1,1,1): rank 2
    assert mod_p_rank(A, 2) == 2
    basis = mod_p_nullspace(A, 3)
    assert len(basis) == 2
    dense = A.to_dense()
    for v in basis:
        for row in dense:
            assert sum(r * x for r, x in zip(row, v)) % 3 == 0


def test_mod_p_nullspace_dimension_random():
    rng = random.Random(4)
    for _ in range(200):
        dense = _random_matrix(rng, max_dim=5, max_entry=7)
        A = IntMatrix.from_rows(dense)
        for p in (2, 3, 5):
            basis = mod_p_nullspace(A, p)
            assert len(basis) == A.ncols - mod_p_rank(A, p)
            for v in basis:
                for row in dense:
                    assert sum(r * x for r, x in zip(row, v)) % p == 0


def test_lattice_index():
    assert lattice_index([(1, 0), (0, 1)], 2) == 1
    assert lattice_index([(2, 0), (0, 2)], 2) == 4
    assert lattice_index([(1, 1), (1, -1)], 2) == 2
    assert lattice_index([(1, 0)], 2) == 0               # not full rank
    assert lattice_index([(1, 0), (0, 1), (5, 7)], 2) == 1


def test_sparse_round_trip(tmp_path):
    A = IntMatrix.from_rows([[0, 2, 0], [1, 0, -3]])
    path = tmp_path / "m.txt"
    with open(path, "w") as f:
        A.write_triplets(f)
    with open(path) as f:
        B = IntMatrix.read_triplets(f)
    assert B == A
