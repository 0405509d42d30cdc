import random

import pytest
from hypothesis import given, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from stabkit.exact_linalg import (
    ChainComplex,
    IntMatrix,
    InvariantFactors,
    homology,
    rank_rational,
    smith_invariant_factors,
)


def sympy_factors(dense):
    if not dense or not dense[0]:
        return []
    d = smith_normal_form(Matrix(dense), domain=ZZ)
    out = [abs(int(d[i, i])) for i in range(min(d.shape))]
    return [x for x in out if x]


def test_zero_matrix_has_no_factors():
    assert smith_invariant_factors(IntMatrix.zero(2, 3)).factors == ()


def test_identity_factors():
    assert list(smith_invariant_factors(IntMatrix.identity(3)).factors) == [1, 1, 1]


def test_rank_one_with_gcd_two():
    assert list(smith_invariant_factors(IntMatrix.from_dense([[2, 4], [4, 8]])).factors) == [2]


def test_factors_need_divisibility_chain():
    with pytest.raises(ValueError):
        InvariantFactors((2, 3))


def test_torsion_drops_units():
    assert InvariantFactors((1, 1, 2, 6)).torsion == [2, 6]


def test_rational_rank_examples():
    assert rank_rational(IntMatrix.identity(3)) == 3
    assert rank_rational(IntMatrix.zero(4, 2)) == 0
    assert rank_rational(IntMatrix.from_dense([[1, 2], [2, 4]])) == 1


def test_empty_shapes():
    assert smith_invariant_factors(IntMatrix.zero(0, 3)).factors == ()
    assert rank_rational(IntMatrix.zero(3, 0)) == 0


def test_zero_entries_are_dropped():
    m = IntMatrix(2, 2, {(0, 0): 0, (1, 1): 5})
    assert m.nnz == 1


dense_matrices = st.integers(1, 7).flatmap(
    lambda r: st.integers(1, 7).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


@given(dense_matrices)
def test_snf_matches_sympy(dense):
    assert list(smith_invariant_factors(IntMatrix.from_dense(dense)).factors) == sympy_factors(dense)


@given(dense_matrices)
def test_rank_matches_sympy(dense):
    assert rank_rational(IntMatrix.from_dense(dense)) == Matrix(dense).rank()


@given(dense_matrices, st.integers(0, 10**6))
def test_unimodular_invariance(dense, seed):
    rng = random.Random(seed)
    m = IntMatrix.from_dense(dense)

    def unimodular(n):
        a = [[int(i == j) for j in range(n)] for i in range(n)]
        for _ in range(6):
            if n < 2:
                break
            i, j = rng.sample(range(n), 2)
            f = rng.choice([-3, -1, 1, 2])
            a[i] = [x + f * y for x, y in zip(a[i], a[j])]
        return IntMatrix.from_dense(a, n)

    u, v = unimodular(m.rows), unimodular(m.cols)
    assert smith_invariant_factors(u @ m @ v) == smith_invariant_factors(m)


@given(dense_matrices)
def test_transpose_has_same_factors(dense):
    m = IntMatrix.from_dense(dense)
    assert smith_invariant_factors(m.transpose()) == smith_invariant_factors(m)


def circle():
    # vertices 0,1,2; edges 01, 02, 12
    d1 = IntMatrix.from_dense([[-1, -1, 0], [1, 0, -1], [0, 1, 1]])
    return ChainComplex((3, 3), (d1,))


def test_circle_homology():
    h = homology(circle())
    assert h.betti == {0: 1, 1: 1}
    assert h.torsion == {0: [], 1: []}


def test_disk_homology():
    d1 = IntMatrix.from_dense([[-1, -1, 0], [1, 0, -1], [0, 1, 1]])
    d2 = IntMatrix.from_dense([[1], [-1], [1]])
    h = homology(ChainComplex((3, 3, 1), (d1, d2)))
    assert h.betti == {0: 1, 1: 0, 2: 0}


def test_boundary_squared_checked():
    d1 = IntMatrix.from_dense([[1, 1]])
    d2 = IntMatrix.from_dense([[1], [0]])
    with pytest.raises(ValueError):
        ChainComplex((1, 2, 1), (d1, d2))


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        ChainComplex((2, 2), (IntMatrix.zero(3, 2),))


def test_degree_out_of_range():
    with pytest.raises(ValueError, match="degree out of range"):
        homology(circle(), [2])


def test_truncated_top_degree_not_valid():
    c = ChainComplex((3, 3), (IntMatrix.from_dense([[-1, -1, 0], [1, 0, -1], [0, 1, 1]]),),
                     truncated=True)
    assert list(c.valid_degrees()) == [0]
    with pytest.raises(ValueError, match="degree out of range"):
        homology(c, [1])


def test_rational_fast_path_drops_torsion():
    c = ChainComplex((1, 1), (IntMatrix.from_dense([[2]]),))
    assert homology(c, over="Z").torsion[0] == [2]
    h = homology(c, over="Q")
    assert h.betti[0] == 0 and h.torsion[0] == []


def test_unknown_ring_rejected():
    with pytest.raises(ValueError):
        homology(circle(), over="F2")
