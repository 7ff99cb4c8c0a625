import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from homlab.linalg import Mat, Subspace, kernel_basis, rref, solve
from homlab.errors import HomlabError


def M(rows, p=2):
    return Mat(rows, p)


class TestRref:
    def test_duplicate_rows_f2(self):
        r, rank, pivots = rref(M([[1, 1], [1, 1]]))
        assert r.a.tolist() == [[1, 1], [0, 0]]
        assert rank == 1 and pivots == (0,)

    def test_identity_fixed(self):
        for n in (1, 2, 5):
            r, rank, _ = rref(Mat.identity(n, 3))
            assert r == Mat.identity(n, 3)
            assert rank == n

    def test_nilpotent_action_matrix(self):
        # hand row-reduction: swap rows, so [[0,0],[1,0]] -> [[1,0],[0,0]]
        r, rank, _ = rref(M([[0, 0], [1, 0]]))
        assert r.a.tolist() == [[1, 0], [0, 0]]
        assert rank == 1

    def test_idempotent(self):
        a = M([[2, 4, 1], [3, 0, 2], [1, 1, 1]], p=5)
        r1, _, _ = rref(a)
        r2, _, _ = rref(r1)
        assert r1 == r2


class TestKernel:
    def test_invertible_matrix_trivial_kernel(self):
        assert kernel_basis(M([[1, 1], [0, 1]])).dim == 0

    def test_rank_one_symmetric(self):
        ker = kernel_basis(M([[1, 1]]))
        assert ker.dim == 1
        assert ker.basis.a.tolist() == [[1, 1]]

    def test_direct_solve(self):
        ker = kernel_basis(M([[0, 0], [1, 0]]))
        assert ker.dim == 1
        assert ker.basis.a.tolist() == [[0, 1]]


class TestSolve:
    def test_identity(self):
        x = solve(Mat.identity(3, 7), [4, 5, 6])
        assert x.tolist() == [4, 5, 6]

    def test_no_solution(self):
        # (1,0) is outside span{(1,1)}
        assert solve(M([[1, 1], [1, 1]]), [1, 0]) is None

    def test_zero_system(self):
        x = solve(Mat.zeros(2, 2, 2), [0, 0])
        assert x.tolist() == [0, 0]


class TestSubspace:
    def test_equality_from_two_spanning_sets(self):
        s1 = Subspace.from_rows([[1, 0, 1], [0, 1, 1]], 2)
        s2 = Subspace.from_rows([[1, 1, 0], [0, 1, 1], [1, 0, 1]], 2)
        assert s1 == s2

    def test_containment_and_coordinates(self):
        s = Subspace.from_rows([[1, 0, 1], [0, 1, 1]], 2)
        assert s.contains([1, 1, 0])
        assert not s.contains([0, 0, 1])
        assert s.coordinates([1, 1, 0]).tolist() == [1, 1]
        assert s.coordinates([0, 0, 1]) is None

    def test_modulus_must_be_prime(self):
        with pytest.raises(HomlabError):
            Mat([[1]], 4)
        with pytest.raises(HomlabError):
            Mat([[1]], 1 << 17)


small_primes = st.sampled_from([2, 3, 5])


@st.composite
def random_matrix(draw, max_dim=5):
    p = draw(small_primes)
    rows = draw(st.integers(0, max_dim))
    cols = draw(st.integers(1, max_dim))
    entries = draw(
        st.lists(
            st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
    return Mat(np.array(entries, dtype=np.int64).reshape(rows, cols), p)


@settings(max_examples=60, deadline=None)
@given(random_matrix())
def test_rref_idempotent_property(a):
    r1, rank1, piv1 = rref(a)
    r2, rank2, piv2 = rref(r1)
    assert r1 == r2 and rank1 == rank2 and piv1 == piv2


@settings(max_examples=60, deadline=None)
@given(random_matrix())
def test_rank_nullity(a):
    assert kernel_basis(a).dim + a.rank() == a.cols


@settings(max_examples=60, deadline=None)
@given(random_matrix(), st.randoms(use_true_random=False))
def test_solve_is_exact(a, rnd):
    if a.rows == 0:
        return
    x0 = np.array([rnd.randrange(a.p) for _ in range(a.cols)], dtype=np.int64)
    b = (a.a @ x0) % a.p
    x = solve(a, b)
    assert x is not None
    assert ((a.a @ x) % a.p == b).all()


@settings(max_examples=60, deadline=None)
@given(random_matrix(), st.randoms(use_true_random=False))
def test_subspace_canonical_under_row_operations(a, rnd):
    if a.rows == 0:
        return
    s1 = Subspace.from_rows(a.a, a.p)
    mixed = a.a.copy()
    for _ in range(6):
        i = rnd.randrange(a.rows)
        j = rnd.randrange(a.rows)
        c = rnd.randrange(1, a.p)
        if i != j:
            mixed[i] = (mixed[i] + c * mixed[j]) % a.p
    rnd.shuffle(list(range(a.rows)))
    s2 = Subspace.from_rows(mixed, a.p)
    assert s1 == s2
