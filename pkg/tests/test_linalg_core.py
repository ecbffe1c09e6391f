import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opmod.errors import InvalidInputError, InvalidParameterError
from opmod.linalg_core import (as_hermitian, dumps_matrix, hermitian_eig, jacobi_eigh, kyfan_norm,
                               loads_matrix, matrix_from_dict, matrix_to_dict, opnorm,
                               optimal_s1l_split, random_complex, random_hermitian, random_unitary,
                               read_matrix, schatten_norm, singular_values, split_cost, write_matrix)


# ---------------------------------------------------------------------------
# Eigendecomposition
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_2x2_characteristic_polynomial(method):
    e = hermitian_eig([[2, 1], [1, 2]], method=method)
    np.testing.assert_allclose(e.eigenvalues, [3, 1], atol=1e-14)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_diagonal_gives_permutation(method):
    e = hermitian_eig(np.diag([5.0, -1.0, 0.0]), method=method)
    np.testing.assert_allclose(e.eigenvalues, [5, 0, -1], atol=1e-14)
    P = np.abs(e.vectors)
    np.testing.assert_allclose(P, [[1, 0, 0], [0, 0, 1], [0, 1, 0]], atol=1e-14)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
@pytest.mark.parametrize("seed", range(5))
def test_eig_reconstruction_residual(method, seed):
    A = random_hermitian(8, np.random.default_rng(seed), 3.0)
    e = hermitian_eig(A, method=method)
    assert np.max(np.abs(A - e.reconstruct())) <= 1e-10
    assert np.all(np.diff(e.eigenvalues) <= 0)
    np.testing.assert_allclose(e.vectors.conj().T @ e.vectors, np.eye(8), atol=1e-12)


def test_jacobi_matches_lapack_eigenvalues():
    A = random_hermitian(12, np.random.default_rng(3))
    w, _ = jacobi_eigh(A)
    np.testing.assert_allclose(np.sort(w), np.linalg.eigvalsh(A), atol=1e-12)


def test_eig_phase_convention_is_deterministic():
    A = random_hermitian(6, np.random.default_rng(9))
    e1 = hermitian_eig(A)
    e2 = hermitian_eig(A, method="jacobi")
    np.testing.assert_allclose(e1.vectors, e2.vectors, atol=1e-8)


def test_eig_result_is_read_only():
    e = hermitian_eig(np.eye(2))
    with pytest.raises(ValueError):
        e.eigenvalues[0] = 2.0


def test_non_hermitian_rejected():
    with pytest.raises(InvalidInputError):
        hermitian_eig([[1, 2], [0, 1]])
    with pytest.raises(InvalidInputError):
        hermitian_eig(np.ones((2, 3)))
    with pytest.raises(InvalidInputError):
        hermitian_eig([[np.nan, 0], [0, 1]])


def test_as_hermitian_symmetrizes_roundoff():
    A = np.array([[1.0, 2.0 + 1e-15], [2.0, 1.0]])
    H = as_hermitian(A)
    assert np.array_equal(H, H.conj().T)


def test_unknown_method():
    with pytest.raises(InvalidParameterError):
        hermitian_eig(np.eye(2), method="qr")


# ---------------------------------------------------------------------------
# Singular values and norms
# ---------------------------------------------------------------------------

def test_singular_values_diagonal():
    np.testing.assert_allclose(singular_values(np.diag([3.0, -4.0])), [4, 3])


def test_singular_values_rank_one():
    rng = np.random.default_rng(1)
    u, v = random_complex(5, 1, rng), random_complex(4, 1, rng)
    s = singular_values(u @ v.conj().T)
    assert s[0] == pytest.approx(np.linalg.norm(u) * np.linalg.norm(v), rel=1e-12)
    assert np.all(s[1:] == 0)


def test_singular_values_eckart_young():
    rng = np.random.default_rng(2)
    T = random_complex(6, 5, rng)
    s = singular_values(T)
    U, _, Vh = np.linalg.svd(T)
    for j in range(5):
        best = (U[:, :j] * s[:j]) @ Vh[:j]
        assert opnorm(T - best) == pytest.approx(s[j], rel=1e-12)
        # any other rank-j matrix does no better
        for k in range(5):
            X = random_complex(6, j, np.random.default_rng([j, k])) @ random_complex(j, 5, rng)
            assert opnorm(T - X) >= s[j] - 1e-12


def test_schatten_examples():
    assert schatten_norm(np.eye(4), 2) == pytest.approx(2.0)
    assert schatten_norm(np.diag([3.0, -4.0]), np.inf) == 4.0
    assert schatten_norm(np.diag([3.0, -4.0]), 1) == pytest.approx(7.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6), st.integers(1, 6))
def test_schatten_monotone_in_p(seed, r, c):
    T = random_complex(r, c, np.random.default_rng(seed))
    vals = [schatten_norm(T, p) for p in (1, 2, 3, np.inf)]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


def test_schatten_rejects_bad_p():
    with pytest.raises(InvalidParameterError):
        schatten_norm(np.eye(2), 0)


def test_kyfan_examples():
    assert kyfan_norm(np.diag([3.0, 2.0, 1.0]), 1, 1) == pytest.approx(5.0)
    T = random_complex(4, 3, np.random.default_rng(4))
    for p in (1, 2, 3):
        assert kyfan_norm(T, p, 2) == pytest.approx(schatten_norm(T, p))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_kyfan_sandwich(seed, p):
    T = random_complex(5, 5, np.random.default_rng(seed))
    for l in range(5):
        v = kyfan_norm(T, p, l)
        assert opnorm(T) <= v + 1e-12
        assert v <= (l + 1) ** (1 / p) * opnorm(T) + 1e-12
        assert v <= schatten_norm(T, p) + 1e-12


def test_kyfan_index_validation():
    with pytest.raises(InvalidParameterError):
        kyfan_norm(np.eye(3), 1, 3)
    with pytest.raises(InvalidParameterError):
        kyfan_norm(np.eye(3), 0.5, 1)


# ---------------------------------------------------------------------------
# Optimal S_1^l split
# ---------------------------------------------------------------------------

def test_split_diag_example():
    T1, T2 = optimal_s1l_split(np.diag([3.0, 1.0]), 0)
    np.testing.assert_allclose(T1, np.diag([2.0, 0.0]), atol=1e-14)
    np.testing.assert_allclose(T2, np.diag([1.0, 1.0]), atol=1e-14)
    assert split_cost(T1, T2, 0) == pytest.approx(3.0)
    assert kyfan_norm(np.diag([3.0, 1.0]), 1, 0) == pytest.approx(3.0)


def test_split_diag_matches_enumeration():
    # enumerate diagonal splits T2 = diag(c, c') and compare with the optimum
    T = np.diag([3.0, 1.0])
    grid = np.linspace(0, 3, 301)
    best = min(abs(3 - a) + abs(1 - b) + max(abs(a), abs(b)) for a in grid for b in grid)
    assert best == pytest.approx(split_cost(*optimal_s1l_split(T, 0), 0))


def test_split_last_index_is_trivial():
    T = random_complex(4, 3, np.random.default_rng(0))
    T1, T2 = optimal_s1l_split(T, 2)
    np.testing.assert_allclose(T1, T, atol=1e-12)
    assert opnorm(T2) <= 1e-12


def test_split_random_6x6():
    rng = np.random.default_rng(5)
    T = random_complex(6, 6, rng)
    T1, T2 = optimal_s1l_split(T, 2)
    cost = split_cost(T1, T2, 2)
    assert cost == pytest.approx(kyfan_norm(T, 1, 2), abs=1e-9)
    for _ in range(100):
        S = random_complex(6, 6, rng) * rng.exponential()
        assert split_cost(S, T - S, 2) >= cost - 1e-9


# ---------------------------------------------------------------------------
# Random instances and I/O
# ---------------------------------------------------------------------------

def test_random_instances():
    rng = np.random.default_rng(0)
    U = random_unitary(7, rng)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(7), atol=1e-12)
    H = random_hermitian(5, rng, 2.5)
    assert np.array_equal(H, H.conj().T)
    assert opnorm(H) == pytest.approx(2.5)


def test_matrix_roundtrip(tmp_path):
    T = random_complex(3, 2, np.random.default_rng(1))
    assert np.array_equal(matrix_from_dict(json.loads(json.dumps(matrix_to_dict(T)))), T)
    assert np.array_equal(loads_matrix(dumps_matrix(T)), T)
    write_matrix(tmp_path / "m.json", T)
    assert np.array_equal(read_matrix(tmp_path / "m.json"), T)


def test_matrix_document_errors():
    with pytest.raises(InvalidInputError):
        matrix_from_dict({"rows": 2, "cols": 2, "re": [1, 2, 3]})
    with pytest.raises(InvalidInputError):
        loads_matrix('{"rows": 1, "cols": 1, "re": [NaN], "im": [0]}')
    with pytest.raises(InvalidInputError):
        matrix_from_dict({"cols": 1})
