"""Functional calculus for Hermitian and unitary matrices.

``f(A) = U f(Lambda) U^*`` for Hermitian ``A``, order-``m`` operator differences
``(Delta_K^m f)(A) = sum_j (-1)^(m-j) C(m, j) f(A + jK)``, quasicommutators
``f(A)R - Rf(B)``, divided-difference matrices, and two alternative
constructions of ``(Delta_K^m f)(A)`` through Littlewood-Paley pieces of ``f``:

* :func:`litpaley_finite_difference` sums the differences of the dyadic pieces
  ``f_n = f*W_n + f*W_n^#``;
* :func:`split_finite_difference` sums the pieces up to ``N`` and adds the
  difference of the high-frequency remainder ``f - f*V_N``.

For functions with a discrete spectrum (anything with a ``spectrum()`` method
returning ``(freqs, coeffs)``) all three constructions coincide.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .besov import LPKernelBank, build_kernel_bank, smooth_step
from .errors import (AliasingError, BranchAmbiguityWarning, CoincidentNodeError,
                     InvalidInputError, InvalidParameterError)
from .linalg_core import (as_hermitian, as_matrix, as_unitary, hermitian_eig, opnorm,
                          same_shape)


# ---------------------------------------------------------------------------
# Scalar functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarFunction:
    """A complex-valued function of a real variable with an optional derivative.

    ``evaluate`` must accept a float array and return an array of the same
    shape.  It is called from worker threads by the CLI, so it has to be
    safe to call concurrently (pure numpy lambdas are).
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    tag: str = "f"

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(self.evaluate(x), dtype=np.complex128)
        if not np.all(np.isfinite(y)):
            raise InvalidInputError(f"function '{self.tag}' is not finite at some queried point")
        return y

    def check_derivative(self, rng: np.random.Generator | None = None, points: int = 10,
                         scale: float = 2.0, rtol: float = 1e-6) -> bool:
        """Compare the derivative field with a central difference at random points."""
        if self.derivative is None:
            return True
        rng = rng or np.random.default_rng(0)
        x = rng.uniform(-scale, scale, points)
        h = 1e-5 * np.maximum(1.0, np.abs(x))
        fd = (self(x + h) - self(x - h)) / (2 * h)
        d = np.asarray(self.derivative(x), dtype=np.complex128)
        return bool(np.all(np.abs(fd - d) <= rtol * np.maximum(1.0, np.abs(d)) + 1e-6))


def exp_i(sigma: float) -> ScalarFunction:
    return ScalarFunction(lambda t: np.exp(1j * sigma * t),
                          lambda t: 1j * sigma * np.exp(1j * sigma * t), f"exp_i:{sigma:g}")


def abs_function() -> ScalarFunction:
    return ScalarFunction(np.abs, np.sign, "abs")


def power_function(alpha: float) -> ScalarFunction:
    """``|t|^alpha``; derivative ``alpha |t|^(alpha-1) sgn t`` (0 at the origin)."""
    def deriv(t):
        t = np.asarray(t, float)
        out = np.zeros_like(t)
        nz = t != 0
        out[nz] = alpha * np.abs(t[nz]) ** (alpha - 1) * np.sign(t[nz])
        return out
    return ScalarFunction(lambda t: np.abs(t) ** alpha, deriv, f"power:{alpha:g}")


def affine(a: float, b: float) -> ScalarFunction:
    return ScalarFunction(lambda t: a * t + b + 0 * t, lambda t: a + 0 * np.asarray(t), f"affine:{a:g}:{b:g}")


def identity() -> ScalarFunction:
    return affine(1.0, 0.0)


def parse_function(descriptor: str):
    """Build a function from a CLI descriptor.

    Grammar (fields separated by ``:``; numbers are Python floats)::

        abs                          |t|
        power:ALPHA                  |t|^ALPHA
        exp_i:SIGMA                  exp(i SIGMA t)
        trig:D:c_-D,...,c_D          sum_k c_k exp(i k t); c_k may be 'a+bj'
        smoothstep                   the C-infinity step used by the kernel bank
        affine:A:B                   A t + B
        expsum:SIGMA:C1:C2:C3        C1 exp(i SIGMA t) + C2 exp(-i SIGMA t) + C3

    ``exp_i``, ``trig`` and ``expsum`` return a band-limited function object
    (see :mod:`opmod.bernstein`), the rest a :class:`ScalarFunction`.
    """
    from . import bernstein  # local import: bernstein depends on this module

    if not isinstance(descriptor, str) or not descriptor:
        raise InvalidParameterError(f"empty function descriptor {descriptor!r}")
    head, *rest = descriptor.strip().split(":")
    try:
        if head == "abs" and not rest:
            return abs_function()
        if head == "smoothstep" and not rest:
            return ScalarFunction(smooth_step, None, "smoothstep")
        if head == "power" and len(rest) == 1:
            alpha = float(rest[0])
            if not alpha > 0:
                raise InvalidParameterError("power exponent must be positive")
            return power_function(alpha)
        if head == "affine" and len(rest) == 2:
            return affine(float(rest[0]), float(rest[1]))
        if head == "exp_i" and len(rest) == 1:
            sigma = float(rest[0])
            return bernstein.BandLimitedFunction.exponential(sigma)
        if head == "expsum" and len(rest) == 4:
            sigma = float(rest[0])
            c1, c2, c3 = (complex(c) for c in rest[1:])
            return bernstein.BandLimitedFunction([sigma, -sigma, 0.0], [c1, c2, c3], abs(sigma))
        if head == "trig" and len(rest) == 2:
            d = int(rest[0])
            coeffs = [complex(c) for c in rest[1].split(",")]
            return bernstein.TrigPolynomial(d, coeffs)
    except ValueError as exc:
        raise InvalidParameterError(f"bad function descriptor '{descriptor}': {exc}") from exc
    raise InvalidParameterError(f"unknown function descriptor '{descriptor}'")


# ---------------------------------------------------------------------------
# Functional calculus
# ---------------------------------------------------------------------------

def apply_function(f: Callable, A) -> np.ndarray:
    """``f(A) = U f(Lambda) U^*`` for a Hermitian matrix ``A``."""
    e = hermitian_eig(A)
    return e.apply(np.asarray(f(e.eigenvalues), dtype=np.complex128))


def finite_difference(f: Callable, A, K, m: int) -> np.ndarray:
    """Order-``m`` operator difference ``sum_j (-1)^(m-j) C(m, j) f(A + jK)``."""
    A = as_hermitian(A, "A")
    K = as_hermitian(K, "K")
    same_shape(A, K, names=("A", "K"))
    if m < 1:
        raise InvalidParameterError(f"order m must be >= 1, got {m}")
    out = np.zeros_like(A)
    for j in range(m + 1):
        out += (-1) ** (m - j) * math.comb(m, j) * apply_function(f, A + j * K)
    return out


def quasicommutator(f: Callable, A, B, R):
    """Return the pair ``(f(A)R - Rf(B), AR - RB)``."""
    A = as_hermitian(A, "A")
    B = as_hermitian(B, "B")
    R = as_matrix(R, "R")
    if R.shape != (A.shape[0], B.shape[0]):
        raise InvalidInputError(f"R has shape {R.shape}, expected {(A.shape[0], B.shape[0])}")
    lhs = apply_function(f, A) @ R - R @ apply_function(f, B)
    rhs = A @ R - R @ B
    return lhs, rhs


def divided_difference_matrix(f: Callable, lam, mu, coincidence_rtol: float = 1e-13) -> np.ndarray:
    """Matrix of divided differences ``(f(lam_j) - f(mu_k)) / (lam_j - mu_k)``.

    Where ``lam_j`` and ``mu_k`` coincide (to ``coincidence_rtol``) the
    derivative field of ``f`` is used at their midpoint.

    Raises
    ------
    CoincidentNodeError
        If some nodes coincide and ``f`` carries no derivative.
    """
    lam = np.asarray(lam, dtype=float).reshape(-1)
    mu = np.asarray(mu, dtype=float).reshape(-1)
    if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(mu))):
        raise InvalidInputError("divided-difference nodes must be finite")
    D = lam[:, None] - mu[None, :]
    tol = coincidence_rtol * (1.0 + np.maximum(np.abs(lam)[:, None], np.abs(mu)[None, :]))
    same = np.abs(D) <= tol
    fl, fm = f(lam), f(mu)
    with np.errstate(divide="ignore", invalid="ignore"):
        M = (fl[:, None] - fm[None, :]) / np.where(same, 1.0, D)
    if np.any(same):
        deriv = getattr(f, "derivative", None)
        if deriv is None:
            raise CoincidentNodeError("coincident divided-difference nodes and no derivative available")
        mid = 0.5 * (lam[:, None] + mu[None, :])
        M = np.where(same, np.asarray(deriv(mid), dtype=np.complex128), M)
    return M.astype(np.complex128)


# ---------------------------------------------------------------------------
# Littlewood-Paley constructions
# ---------------------------------------------------------------------------

def _spectral_data(f):
    spectrum = getattr(f, "spectrum", None)
    if spectrum is None:
        raise InvalidInputError("f must expose spectrum() -> (freqs, coeffs) for the series constructions")
    freqs, coeffs = spectrum()
    return np.asarray(freqs, dtype=float), np.asarray(coeffs, dtype=np.complex128)


def _shifted_spectra(f, A, K, m):
    """Eigendecompositions of ``A + jK`` and the exponentials ``exp(i lambda xi)``."""
    A = as_hermitian(A, "A")
    K = as_hermitian(K, "K")
    same_shape(A, K, names=("A", "K"))
    if m < 1:
        raise InvalidParameterError(f"order m must be >= 1, got {m}")
    freqs, coeffs = _spectral_data(f)
    window = getattr(f, "window", None)
    out = []
    for j in range(m + 1):
        e = hermitian_eig(A + j * K)
        if window is not None:
            lo, hi = window
            if e.eigenvalues.size and (e.eigenvalues.min() < lo or e.eigenvalues.max() > hi):
                raise AliasingError(
                    f"spectrum of A+{j}K leaves the sampling window [{lo:g}, {hi:g}); "
                    "the periodic extension would alias")
        out.append((e, np.exp(1j * np.multiply.outer(e.eigenvalues, freqs))))
    return freqs, coeffs, out


def _difference_with_multipliers(freqs, coeffs, spectra, m, mult: np.ndarray):
    """Operator differences of the functions with spectra ``coeffs * mult[:, b]``."""
    weighted = coeffs[:, None] * mult                  # (nfreq, nblocks)
    n = spectra[0][0].size
    out = np.zeros((mult.shape[1], n, n), dtype=np.complex128)
    for j, (e, E) in enumerate(spectra):
        c = (-1) ** (m - j) * math.comb(m, j)
        G = E @ weighted                              # (n, nblocks) values at eigenvalues
        U = e.vectors
        out += c * np.einsum("ik,kb,jk->bij", U, G, U.conj())
    return out


def litpaley_finite_difference(f, A, K, m: int, kernels: LPKernelBank | None = None,
                               n_range: Sequence[int] | None = None):
    """Order-``m`` difference assembled from the dyadic pieces of ``f``.

    Parameters
    ----------
    f : object with ``spectrum()``
        Band-limited or sampled function.
    A, K : Hermitian matrices of equal size.
    m : int
        Difference order.
    kernels : LPKernelBank, optional
    n_range : iterable of int, optional
        Dyadic indices to sum; defaults to every block meeting the spectrum.

    Returns
    -------
    value : ndarray
        Partial sum of ``(Delta_K^m f_n)(A)`` over ``n_range``.
    term_norms : list of float
        Operator norms of the individual terms, in ``n_range`` order.
    """
    kernels = kernels or build_kernel_bank()
    freqs, coeffs, spectra = _shifted_spectra(f, A, K, m)
    blocks = list(kernels.active_blocks(freqs) if n_range is None else n_range)
    if not blocks:
        n = spectra[0][0].size
        return np.zeros((n, n), dtype=np.complex128), []
    mult = np.stack([kernels.block_multiplier(freqs, n) for n in blocks], axis=1)
    terms = _difference_with_multipliers(freqs, coeffs, spectra, m, mult)
    norms = [opnorm(T) for T in terms]
    return terms.sum(axis=0), norms


def split_finite_difference(f, A, K, m: int, kernels: LPKernelBank | None = None,
                            N: int = 0) -> np.ndarray:
    """Order-``m`` difference as low blocks ``n <= N`` plus the remainder ``f - f*V_N``."""
    kernels = kernels or build_kernel_bank()
    freqs, coeffs, spectra = _shifted_spectra(f, A, K, m)
    active = kernels.active_blocks(freqs)
    blocks = [n for n in active if n <= N]
    cols = [kernels.block_multiplier(freqs, n) for n in blocks]
    cols.append(np.where(freqs == 0, 0.0, 1.0 - kernels.lowpass_multiplier(freqs, N)))
    terms = _difference_with_multipliers(freqs, coeffs, spectra, m, np.stack(cols, axis=1))
    return terms.sum(axis=0)


# ---------------------------------------------------------------------------
# Atomic measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    a: float
    h: float
    m: int
    weight: complex = 1.0

    def __post_init__(self):
        if not self.h > 0:
            raise InvalidParameterError(f"atom step h must be positive, got {self.h}")
        if int(self.m) != self.m or self.m < 1:
            raise InvalidParameterError(f"atom order must be a positive integer, got {self.m}")


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite combination ``sum_j weight_j Delta_{h_j}^{m_j} delta_{a_j}``."""

    atoms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(a if isinstance(a, Atom) else Atom(*a) for a in self.atoms))


def atomic_operator(f: Callable, A, K, g: AtomicMeasure) -> np.ndarray:
    """``sum_atoms weight * sum_j (-1)^(m-j) C(m,j) f(A - aK + j h K)``."""
    A = as_hermitian(A, "A")
    K = as_hermitian(K, "K")
    same_shape(A, K, names=("A", "K"))
    out = np.zeros_like(A)
    for atom in g.atoms:
        for j in range(atom.m + 1):
            c = (-1) ** (atom.m - j) * math.comb(atom.m, j)
            out += atom.weight * c * apply_function(f, A - atom.a * K + j * atom.h * K)
    return out


# ---------------------------------------------------------------------------
# Unitary matrices
# ---------------------------------------------------------------------------

def apply_trig_polynomial(c, U) -> np.ndarray:
    """``sum_{k=-d}^{d} c_k U^k`` by repeated multiplication (``U^-1 = U^*``)."""
    U = as_unitary(U)
    c = np.asarray(c, dtype=np.complex128).reshape(-1)
    if c.size % 2 != 1:
        raise InvalidParameterError("coefficient list must have odd length 2d+1")
    d = c.size // 2
    n = U.shape[0]
    out = c[d] * np.eye(n, dtype=np.complex128)
    P = np.eye(n, dtype=np.complex128)
    Q = np.eye(n, dtype=np.complex128)
    Ustar = U.conj().T
    for k in range(1, d + 1):
        P = P @ U
        Q = Q @ Ustar
        out += c[d + k] * P + c[d - k] * Q
    return out


def normal_eig(W):
    """Eigenvalues and unitary eigenvectors of a normal matrix via complex Schur form."""
    T, Z = scipy.linalg.schur(as_matrix(W), output="complex")
    return np.diagonal(T).copy(), Z


def unitary_log_arg(U, V, branch_atol: float = 1e-10) -> np.ndarray:
    """Hermitian ``A`` with ``exp(iA) U = V`` and spectrum in ``[-pi, pi)``.

    ``A = arg(V U^*)``; it satisfies ``2 sin(||A|| / 2) = ||U - V||``.  When an
    eigenvalue of ``V U^*`` lies within ``branch_atol`` of ``-1`` a
    :class:`BranchAmbiguityWarning` is emitted and the value ``-pi`` is used.
    """
    U = as_unitary(U, "U")
    V = as_unitary(V, "V")
    same_shape(U, V, names=("U", "V"))
    W = V @ U.conj().T
    z, Z = normal_eig(W)
    theta = np.angle(z)
    near = np.abs(z + 1.0) <= branch_atol
    if np.any(near):
        warnings.warn("eigenvalue of V U^* on the branch cut at -1; using arg = -pi",
                      BranchAmbiguityWarning, stacklevel=2)
        theta = np.where(near, -np.pi, theta)
    theta = np.where(theta >= np.pi, theta - 2 * np.pi, theta)
    A = (Z * theta) @ Z.conj().T
    return 0.5 * (A + A.conj().T)
