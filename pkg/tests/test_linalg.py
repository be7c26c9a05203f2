import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from dlngl.errors import DimensionMismatch, InvalidArgument, SingularMatrix, SolverFailure
from dlngl.linalg import ComplexCsr, csr_from_triplets, matvec, solve


def random_sparse(rng, n, density=0.05, dominant=False):
    A = sp.random(n, n, density=density, random_state=rng, format="coo")
    B = sp.random(n, n, density=density, random_state=rng, format="coo")
    M = (A + 1j * B).tocsr()
    if dominant:
        rowsum = np.asarray(abs(M).sum(axis=1)).ravel()
        M = M + sp.diags(rowsum + 1.0 + 1j)
    return ComplexCsr.from_scipy(M)


def test_single_entry():
    A = csr_from_triplets(1, 1, [(0, 0, 1 + 0j)])
    assert A.to_dense().tolist() == [[1 + 0j]]
    assert A.nnz == 1


def test_duplicates_are_summed():
    A = csr_from_triplets(1, 1, [(0, 0, 1), (0, 0, 2)])
    assert A.nnz == 1 and A.values[0] == 3


def test_random_triplets_match_dense_oracle():
    rng = np.random.default_rng(0)
    n, m = 50, 400
    rows, cols = rng.integers(0, n, m), rng.integers(0, n, m)
    vals = rng.normal(size=m) + 1j * rng.normal(size=m)
    dense = np.zeros((n, n), dtype=complex)
    for r, c, v in zip(rows, cols, vals):
        dense[r, c] += v
    A = csr_from_triplets(n, n, zip(rows, cols, vals))
    assert np.allclose(A.to_dense(), dense, atol=1e-14)


def test_out_of_range_triplet():
    with pytest.raises(InvalidArgument):
        csr_from_triplets(2, 2, [(2, 0, 1.0)])


def test_arrays_immutable():
    A = csr_from_triplets(2, 2, [(0, 0, 1.0)])
    with pytest.raises(ValueError):
        A.values[0] = 2.0


def test_matvec_examples():
    I3 = ComplexCsr.from_scipy(sp.identity(3))
    x = np.array([1 + 2j, -3, 0.5j])
    assert np.array_equal(matvec(I3, x), x)
    A = csr_from_triplets(2, 2, [(0, 0, 1), (0, 1, 1j), (1, 0, -1j), (1, 1, 2)])
    assert np.allclose(A @ np.ones(2), [1 + 1j, 2 - 1j])
    assert np.array_equal(A @ np.zeros(2), np.zeros(2))


def test_matvec_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        matvec(csr_from_triplets(2, 3, []), np.ones(2))


def test_solve_examples():
    I1 = csr_from_triplets(1, 1, [(0, 0, 1)])
    assert np.allclose(solve(I1, np.array([3 + 4j])), [3 + 4j])
    A = csr_from_triplets(2, 2, [(0, 0, 2), (1, 1, 1 + 1j)])
    assert np.allclose(solve(A, np.array([2, 2])), [1, 1 - 1j], atol=1e-14)


def test_solve_dominant_100():
    rng = np.random.default_rng(3)
    A = random_sparse(rng, 100, dominant=True)
    b = rng.normal(size=100) + 1j * rng.normal(size=100)
    x = solve(A, b, 1e-10)
    assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_solve_zero_rhs():
    A = csr_from_triplets(2, 2, [(0, 0, 2), (1, 1, 3)])
    assert np.array_equal(solve(A, np.zeros(2)), np.zeros(2))


def test_singular_matrix():
    A = csr_from_triplets(2, 2, [(0, 0, 1.0)])
    with pytest.raises(SolverFailure):
        solve(A, np.ones(2))


def test_singular_is_solver_failure():
    assert issubclass(SingularMatrix, SolverFailure)


def test_solve_shape_errors():
    with pytest.raises(DimensionMismatch):
        solve(csr_from_triplets(2, 3, []), np.ones(2))
    with pytest.raises(DimensionMismatch):
        solve(csr_from_triplets(2, 2, [(0, 0, 1), (1, 1, 1)]), np.ones(3))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(5, 120))
def test_solve_then_matvec_reproduces_rhs(seed, n):
    rng = np.random.default_rng(seed)
    A = random_sparse(rng, n, density=0.1, dominant=True)
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    x = solve(A, b, 1e-10)
    assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(b)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 200))
def test_matvec_matches_dense(seed, n):
    rng = np.random.default_rng(seed)
    A = random_sparse(rng, n, density=0.1)
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    ref = A.to_dense() @ x
    assert np.linalg.norm(A @ x - ref) <= 1e-13 * max(np.linalg.norm(ref), 1.0)
