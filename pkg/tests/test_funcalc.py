import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opmod.bernstein import BandLimitedFunction, TrigPolynomial
from opmod.besov import ModulusFunction, SampledFunction, build_kernel_bank, omega_star, smooth_step
from opmod.errors import (AliasingError, BranchAmbiguityWarning, CoincidentNodeError,
                          InvalidInputError, InvalidParameterError)
from opmod.funcalc import (Atom, AtomicMeasure, ScalarFunction, abs_function, affine, apply_function,
                           apply_trig_polynomial, atomic_operator, divided_difference_matrix, exp_i,
                           finite_difference, identity, litpaley_finite_difference, normal_eig,
                           parse_function, power_function, quasicommutator, split_finite_difference,
                           unitary_log_arg)
from opmod.linalg_core import opnorm, random_complex, random_hermitian, random_unitary

square = ScalarFunction(lambda t: t ** 2, lambda t: 2 * t, "square")


# ---------------------------------------------------------------------------
# Functional calculus
# ---------------------------------------------------------------------------

def test_identity_function():
    A = random_hermitian(6, np.random.default_rng(0))
    assert np.max(np.abs(apply_function(identity(), A) - A)) <= 1e-10


def test_square_of_diagonal():
    np.testing.assert_allclose(apply_function(square, np.diag([1.0, 2.0])), np.diag([1.0, 4.0]), atol=1e-14)


def test_square_matches_matrix_product():
    A = random_hermitian(7, np.random.default_rng(1))
    np.testing.assert_allclose(apply_function(square, A), A @ A, atol=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_exponential_is_unitary(seed):
    A = random_hermitian(8, np.random.default_rng(seed), 10.0)
    U = apply_function(exp_i(1.0), A)
    assert np.max(np.abs(U.conj().T @ U - np.eye(8))) <= 1e-9


def test_nonfinite_function_values_rejected():
    bad = ScalarFunction(lambda t: np.where(t == 0, np.inf, t), None, "pole")
    with pytest.raises(InvalidInputError):
        apply_function(bad, np.diag([0.0, 1.0]))


# ---------------------------------------------------------------------------
# Finite differences and quasicommutators
# ---------------------------------------------------------------------------

def test_first_difference():
    rng = np.random.default_rng(2)
    A, K = random_hermitian(5, rng), random_hermitian(5, rng)
    f = exp_i(1.3)
    np.testing.assert_allclose(finite_difference(f, A, K, 1),
                               apply_function(f, A + K) - apply_function(f, A), atol=1e-13)


def test_scalar_second_difference():
    f = exp_i(0.7)
    a, k = 0.3, 1.1
    expected = f(a + 2 * k) - 2 * f(a + k) + f(a)
    assert finite_difference(f, [[a]], [[k]], 2)[0, 0] == pytest.approx(complex(expected), abs=1e-14)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_commuting_diagonal_differences(m):
    rng = np.random.default_rng(m)
    a, k = rng.uniform(-2, 2, 6), rng.uniform(-1, 1, 6)
    f = power_function(1.5)
    D = finite_difference(f, np.diag(a), np.diag(k), m)
    direct = sum((-1) ** (m - j) * math.comb(m, j) * np.abs(a + j * k) ** 1.5 for j in range(m + 1))
    np.testing.assert_allclose(np.diag(D), direct, atol=1e-12)
    assert np.max(np.abs(D - np.diag(np.diag(D)))) <= 1e-12


def test_difference_order_validated():
    with pytest.raises(InvalidParameterError):
        finite_difference(exp_i(1), np.eye(2), np.eye(2), 0)


def test_quasicommutator_examples():
    rng = np.random.default_rng(3)
    A, K = random_hermitian(4, rng), random_hermitian(4, rng)
    f = exp_i(2.0)
    lhs, rhs = quasicommutator(f, A, A, np.eye(4))
    assert np.max(np.abs(lhs)) <= 1e-13 and np.max(np.abs(rhs)) <= 1e-13
    lhs, rhs = quasicommutator(f, A, A + K, np.eye(4))
    np.testing.assert_allclose(lhs, apply_function(f, A) - apply_function(f, A + K), atol=1e-13)
    np.testing.assert_allclose(rhs, -K, atol=1e-14)
    B = random_hermitian(3, rng)
    R = random_complex(4, 3, rng)
    lhs, rhs = quasicommutator(identity(), A, B, R)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_quasicommutator_shape_check():
    with pytest.raises(InvalidInputError):
        quasicommutator(exp_i(1), np.eye(2), np.eye(3), np.eye(2))


# ---------------------------------------------------------------------------
# Divided differences
# ---------------------------------------------------------------------------

def test_divided_difference_square():
    M = divided_difference_matrix(square, [1.0, 2.0], [3.0])
    np.testing.assert_allclose(M[:, 0], [4.0, 5.0])


def test_divided_difference_identity_all_ones():
    M = divided_difference_matrix(identity(), [1.0, 2.0, -5.0], [0.5, 2.0])
    np.testing.assert_allclose(M, np.ones((3, 2)))


def test_divided_difference_abs_opposite_signs():
    lam = np.array([1.0, 3.0, 10.0])
    mu = np.array([-2.0, -0.5])
    M = divided_difference_matrix(abs_function(), lam, mu)
    np.testing.assert_allclose(M, (lam[:, None] + mu[None, :]) / (lam[:, None] - mu[None, :]))


def test_divided_difference_coincident_nodes():
    M = divided_difference_matrix(square, [1.0, 2.0], [1.0, 2.0])
    np.testing.assert_allclose(M, [[2, 3], [3, 4]])
    with pytest.raises(CoincidentNodeError):
        divided_difference_matrix(ScalarFunction(np.abs), [1.0], [1.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_divided_difference_turns_commutator_into_quasicommutator(seed):
    rng = np.random.default_rng(seed)
    A, B = random_hermitian(4, rng), random_hermitian(3, rng)
    R = random_complex(4, 3, rng)
    f = exp_i(1.7)
    wa, Ua = np.linalg.eigh(A)
    wb, Ub = np.linalg.eigh(B)
    M = divided_difference_matrix(f, wa, wb)
    lhs, rhs = quasicommutator(f, A, B, R)
    recon = Ua @ (M * (Ua.conj().T @ rhs @ Ub)) @ Ub.conj().T
    np.testing.assert_allclose(recon, lhs, atol=1e-10)


# ---------------------------------------------------------------------------
# Dyadic series definitions
# ---------------------------------------------------------------------------

def test_single_block_active_for_pure_frequency():
    bank = build_kernel_bank()
    rng = np.random.default_rng(4)
    A, K = random_hermitian(4, rng), random_hermitian(4, rng, 0.3)
    f = BandLimitedFunction.exponential(2.0 ** 3 * 0.75)        # tau in (2^2, 2^3)
    tau = f.freqs[0]
    value, norms = litpaley_finite_difference(f, A, K, 1, bank, range(-3, 8))
    nonzero = [n for n, v in zip(range(-3, 8), norms) if v > 1e-14]
    # tau in (2^2, 2^3) lies in the supports of blocks 2 and 3 only
    assert set(nonzero) <= {2, 3}
    assert nonzero
    weight = sum(bank.w(tau / 2.0 ** n) for n in nonzero)
    assert weight == pytest.approx(1.0)


def test_single_block_for_exact_power_of_two():
    f = BandLimitedFunction.exponential(8.0)
    rng = np.random.default_rng(5)
    A, K = random_hermitian(3, rng), random_hermitian(3, rng)
    _, norms = litpaley_finite_difference(f, A, K, 1, n_range=range(0, 6))
    assert [n for n, v in zip(range(0, 6), norms) if v > 1e-14] == [3]


@pytest.mark.parametrize("seed", range(6))
def test_series_matches_direct_difference(seed):
    rng = np.random.default_rng([6, seed])
    f = BandLimitedFunction.random(rng, 5, float(rng.uniform(0.3, 5)))
    A, K = random_hermitian(6, rng, 2.0), random_hermitian(6, rng, 0.7)
    m = seed % 4 + 1
    direct = finite_difference(f, A, K, m)
    series, _ = litpaley_finite_difference(f, A, K, m)
    assert opnorm(series - direct) <= 1e-6 * max(1.0, opnorm(direct))


def test_split_without_tail_for_bandlimited():
    rng = np.random.default_rng(7)
    f = BandLimitedFunction.random(rng, 4, 3.0)
    A, K = random_hermitian(5, rng), random_hermitian(5, rng, 0.5)
    series, _ = litpaley_finite_difference(f, A, K, 2)
    np.testing.assert_allclose(split_finite_difference(f, A, K, 2, N=2), series, atol=1e-12)


def test_split_independent_of_N_on_sampled_function():
    L, N = 8.0, 2 ** 12
    g = SampledFunction.from_function(lambda x: np.minimum(2.0, 2.0 * np.abs(np.sin(x))) *
                                      (1 - smooth_step((np.abs(x) - 4.0) / 3.0)), L, N)
    rng = np.random.default_rng(8)
    A, K = random_hermitian(5, rng, 2.0), random_hermitian(5, rng, 0.2)
    vals = [split_finite_difference(g, A, K, 1, N=n) for n in range(-2, 8)]
    assert max(opnorm(v - vals[0]) for v in vals) <= 1e-6


def test_split_bound_by_omega_star():
    """||(Delta_K f)(A)|| / omega_*(||K||) stays bounded for a smoothed |t|."""
    L, N = 8.0, 2 ** 12
    g = SampledFunction.from_function(lambda x: np.abs(x) * (1 - smooth_step((np.abs(x) - 3.0) / 3.0)), L, N)
    om = ModulusFunction.power(0.9, 1)
    ratios = []
    for k in range(1, 8):
        rng = np.random.default_rng([9, k])
        A = random_hermitian(6, rng)
        K = random_hermitian(6, rng, 2.0 ** -k)
        ratios.append(opnorm(split_finite_difference(g, A, K, 1, N=3)) / omega_star(om, 1, 2.0 ** -k))
    assert max(ratios) < 5.0


def test_series_rejects_spectrum_outside_window():
    g = SampledFunction.from_function(np.cos, 2.0, 64)
    with pytest.raises(AliasingError):
        litpaley_finite_difference(g, 3.0 * np.eye(2), np.eye(2), 1)


def test_series_needs_spectrum():
    with pytest.raises(InvalidInputError):
        litpaley_finite_difference(abs_function(), np.eye(2), np.eye(2), 1)


# ---------------------------------------------------------------------------
# Atomic operators
# ---------------------------------------------------------------------------

def test_atom_collapses_to_difference():
    rng = np.random.default_rng(10)
    A, K = random_hermitian(4, rng), random_hermitian(4, rng)
    f = exp_i(0.9)
    for m in (1, 2, 3):
        np.testing.assert_allclose(atomic_operator(f, A, K, AtomicMeasure([Atom(0.0, 1.0, m, 1.0)])),
                                   finite_difference(f, A, K, m), atol=1e-12)


def test_atom_scalar_reduction():
    f = exp_i(1.4)
    a, h, x, k = 0.4, 0.7, 0.2, 1.3
    val = atomic_operator(f, [[x]], [[k]], AtomicMeasure([Atom(a, h, 1, 1.0)]))[0, 0]
    assert val == pytest.approx(complex(f(x - a * k + h * k) - f(x - a * k)), abs=1e-14)


def test_atom_linearity():
    rng = np.random.default_rng(11)
    A, K = random_hermitian(3, rng), random_hermitian(3, rng)
    f = exp_i(2.0)
    a1, a2 = Atom(0.3, 0.5, 2, 1.0), Atom(-1.0, 0.25, 1, 1.0)
    l1, l2 = 0.7 - 0.2j, -1.5
    both = atomic_operator(f, A, K, AtomicMeasure([Atom(a1.a, a1.h, a1.m, l1), Atom(a2.a, a2.h, a2.m, l2)]))
    sep = l1 * atomic_operator(f, A, K, AtomicMeasure([a1])) + l2 * atomic_operator(f, A, K, AtomicMeasure([a2]))
    np.testing.assert_allclose(both, sep, atol=1e-12)


def test_atom_validation():
    with pytest.raises(InvalidParameterError):
        Atom(0.0, 0.0, 1)
    with pytest.raises(InvalidParameterError):
        Atom(0.0, 1.0, 0)


# ---------------------------------------------------------------------------
# Unitary functional calculus
# ---------------------------------------------------------------------------

def test_trig_polynomial_selecting_first_power():
    U = random_unitary(4, np.random.default_rng(12))
    np.testing.assert_allclose(apply_trig_polynomial([0, 0, 0, 1, 0], U), U, atol=1e-14)


def test_trig_polynomial_power_scalar():
    th = 0.83
    d = 4
    c = np.zeros(2 * d + 1)
    c[-1] = 1
    assert apply_trig_polynomial(c, [[np.exp(1j * th)]])[0, 0] == pytest.approx(np.exp(1j * d * th))


@pytest.mark.parametrize("seed", range(3))
def test_trig_polynomial_matches_diagonalization(seed):
    rng = np.random.default_rng([13, seed])
    U = random_unitary(6, rng)
    c = random_complex(7, 1, rng)[:, 0]
    z, Z = normal_eig(U)
    spectral = (Z * sum(c[k + 3] * z ** k for k in range(-3, 4))) @ Z.conj().T
    assert np.max(np.abs(apply_trig_polynomial(c, U) - spectral)) <= 1e-8


def test_trig_polynomial_even_length_rejected():
    with pytest.raises(InvalidParameterError):
        apply_trig_polynomial([1, 2], np.eye(2))


def test_log_arg_same_unitary():
    U = random_unitary(3, np.random.default_rng(14))
    assert np.max(np.abs(unitary_log_arg(U, U))) <= 1e-12


@pytest.mark.parametrize("theta", [0.3, -1.2, 3.0, -3.1])
def test_log_arg_scalar_rotation(theta):
    V = np.exp(1j * theta) * np.eye(2)
    A = unitary_log_arg(np.eye(2), V)
    np.testing.assert_allclose(A, theta * np.eye(2), atol=1e-12)
    assert 2 * math.sin(abs(theta) / 2) == pytest.approx(opnorm(np.eye(2) - V))


@pytest.mark.parametrize("seed", range(5))
def test_log_arg_identities(seed):
    rng = np.random.default_rng([15, seed])
    U, V = random_unitary(5, rng), random_unitary(5, rng)
    A = unitary_log_arg(U, V)
    assert np.max(np.abs(A - A.conj().T)) <= 1e-14
    w, Q = np.linalg.eigh(A)
    assert np.max(np.abs((Q * np.exp(1j * w)) @ Q.conj().T @ U - V)) <= 1e-8
    assert abs(2 * math.sin(opnorm(A) / 2) - opnorm(U - V)) <= 1e-8


def test_log_arg_branch_cut_warns():
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        A = unitary_log_arg(np.eye(1), -np.eye(1))
    assert any(issubclass(w.category, BranchAmbiguityWarning) for w in rec)
    assert A[0, 0] == pytest.approx(-np.pi)


def test_log_arg_rejects_non_unitary():
    with pytest.raises(InvalidInputError):
        unitary_log_arg(2 * np.eye(2), np.eye(2))


# ---------------------------------------------------------------------------
# Descriptors
# ---------------------------------------------------------------------------

def test_parse_function_grammar():
    x = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(parse_function("abs")(x), np.abs(x))
    np.testing.assert_allclose(parse_function("power:0.5")(x), np.abs(x) ** 0.5)
    np.testing.assert_allclose(parse_function("affine:2:-1")(x), 2 * x - 1)
    np.testing.assert_allclose(parse_function("exp_i:3")(x), np.exp(3j * x))
    e = parse_function("expsum:2:1:0.5:-1")
    np.testing.assert_allclose(e(x), np.exp(2j * x) + 0.5 * np.exp(-2j * x) - 1)
    t = parse_function("trig:1:0,0,1")
    assert isinstance(t, TrigPolynomial) and t.degree == 1
    assert parse_function("smoothstep")(0.5) == pytest.approx(0.5)


@pytest.mark.parametrize("bad", ["", "foo", "power:-1", "exp_i", "affine:1", "trig:x:1"])
def test_parse_function_errors(bad):
    with pytest.raises(InvalidParameterError):
        parse_function(bad)


def test_builtin_derivatives_consistent():
    for f in (exp_i(1.5), abs_function(), power_function(1.5), affine(2.0, 1.0), square):
        assert f.check_derivative()
