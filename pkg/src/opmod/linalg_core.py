"""Dense complex linear algebra.

Hermitian eigendecomposition (LAPACK or a cyclic Jacobi solver), singular
values, operator / Schatten / Ky Fan norms, the optimal splitting that
realises the Ky Fan norm ``S_1^l`` as an infimal convolution, and JSON
serialization of complex matrices.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  All
functions are pure: inputs are never modified.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from numbers import Integral

import numpy as np

from .errors import InvalidInputError, InvalidParameterError

HERMITIAN_RTOL = 1e-12
RANK_RTOL = 1e-12
UNITARY_ATOL = 1e-9


# ---------------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------------

def as_matrix(T, name: str = "T") -> np.ndarray:
    """Return ``T`` as a finite 2-D complex array (a copy is made only if needed)."""
    M = np.asarray(T)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise InvalidInputError(f"{name} must be two-dimensional, got shape {M.shape}")
    M = M.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return M


def is_hermitian(A, rtol: float = HERMITIAN_RTOL) -> bool:
    M = np.asarray(A)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    if M.size == 0:
        return True
    scale = 1.0 + np.max(np.abs(M))
    return bool(np.max(np.abs(M - M.conj().T)) <= rtol * scale)


def as_hermitian(A, name: str = "A") -> np.ndarray:
    """Validate a Hermitian matrix and return its exactly symmetrized copy."""
    M = as_matrix(A, name)
    if M.shape[0] != M.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {M.shape}")
    if not is_hermitian(M):
        raise InvalidInputError(f"{name} is not Hermitian")
    return 0.5 * (M + M.conj().T)


def is_unitary(U, atol: float = UNITARY_ATOL) -> bool:
    M = np.asarray(U)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    if M.size == 0:
        return True
    return bool(np.max(np.abs(M.conj().T @ M - np.eye(M.shape[0]))) <= atol)


def as_unitary(U, name: str = "U") -> np.ndarray:
    M = as_matrix(U, name)
    if not is_unitary(M):
        raise InvalidInputError(f"{name} is not unitary (tolerance {UNITARY_ATOL:g})")
    return M


def same_shape(*mats, names=None) -> None:
    shapes = [np.shape(m) for m in mats]
    if len(set(shapes)) > 1:
        label = ", ".join(names) if names else "arguments"
        raise InvalidInputError(f"size mismatch between {label}: {shapes}")


# ---------------------------------------------------------------------------
# Eigendecomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral data ``A = U diag(eigenvalues) U^*`` of a Hermitian matrix.

    ``eigenvalues`` are sorted nonincreasingly; column ``j`` of ``vectors`` is
    the matching unit eigenvector with its largest-modulus entry real positive.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.vectors.setflags(write=False)

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        U = self.vectors
        return (U * self.eigenvalues) @ U.conj().T

    def apply(self, values) -> np.ndarray:
        """Return ``U diag(values) U^*`` for values attached to the eigenvalues."""
        U = self.vectors
        return (U * np.asarray(values)) @ U.conj().T


def jacobi_eigh(A, tol: float = 1e-14, max_sweeps: int = 64):
    """Cyclic Jacobi eigensolver for complex Hermitian matrices.

    Each rotation first removes the phase of the pivot ``a_pq`` and then
    applies the classical real Jacobi rotation, so the iteration annihilates
    one off-diagonal pair at a time.  Sweeps continue until the off-diagonal
    Frobenius mass falls below ``tol * ||A||_F``.

    Returns
    -------
    (w, V) : eigenvalues (unsorted) and eigenvector columns.
    """
    a = as_hermitian(A).copy()
    n = a.shape[0]
    V = np.eye(n, dtype=np.complex128)
    if n <= 1:
        return a.diagonal().real.copy(), V
    target = tol * np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                J = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ J
                a[idx, :] = J.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                V[:, idx] = V[:, idx] @ J
    return a.diagonal().real.copy(), V


def _normalize_phases(V: np.ndarray) -> np.ndarray:
    if V.size == 0:
        return V
    idx = np.argmax(np.abs(V), axis=0)
    pivots = V[idx, np.arange(V.shape[1])]
    return V * (np.abs(pivots) / pivots)


def hermitian_eig(A, method: str = "lapack") -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    A : array_like
        Hermitian matrix (checked to relative tolerance 1e-12).
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls :func:`numpy.linalg.eigh`; ``"jacobi"`` runs the
        in-package cyclic Jacobi solver.  Both are post-processed identically.

    Returns
    -------
    EigenDecomposition
        Eigenvalues nonincreasing, eigenvector phases normalized.
    """
    H = as_hermitian(A)
    if method == "lapack":
        w, V = np.linalg.eigh(H)
    elif method == "jacobi":
        w, V = jacobi_eigh(H)
    else:
        raise InvalidParameterError(f"unknown eigensolver '{method}'")
    order = np.argsort(-w, kind="stable")
    w = np.ascontiguousarray(w[order])
    V = _normalize_phases(np.ascontiguousarray(V[:, order]))
    return EigenDecomposition(w, V)


# ---------------------------------------------------------------------------
# Singular values and norms
# ---------------------------------------------------------------------------

def _clip_small(s: np.ndarray) -> np.ndarray:
    if s.size and s[0] > 0:
        s = np.where(s < RANK_RTOL * s[0], 0.0, s)
    return s


def singular_values(T) -> np.ndarray:
    """Singular values ``s_0 >= s_1 >= ... >= 0`` (``min(rows, cols)`` of them).

    Values below ``1e-12 * s_0`` are reported as exact zeros.
    """
    M = as_matrix(T)
    if M.size == 0:
        return np.zeros(0)
    return _clip_small(np.linalg.svd(M, compute_uv=False))


def svd(T):
    """Thin SVD ``T = U diag(s) Vh`` with the same zero clipping as :func:`singular_values`."""
    M = as_matrix(T)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    return U, _clip_small(s), Vh


def opnorm(T) -> float:
    """Operator (spectral) norm."""
    M = as_matrix(T)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def _check_p(p) -> float:
    p = float(p)
    if not p > 0:
        raise InvalidParameterError(f"Schatten index p must be positive, got {p}")
    return p


def _schatten_from_values(s: np.ndarray, p: float) -> float:
    if s.size == 0:
        return 0.0
    if np.isinf(p):
        return float(s[0])
    top = s[0]
    if top == 0:
        return 0.0
    # scale to avoid overflow/underflow for large or tiny p
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def schatten_norm(T, p) -> float:
    """Schatten ``S_p`` (quasi-)norm ``(sum s_j^p)^(1/p)``; ``p = inf`` is the operator norm."""
    p = _check_p(p)
    return _schatten_from_values(singular_values(T), p)


def _check_l(M: np.ndarray, l) -> int:
    if not isinstance(l, Integral) or isinstance(l, bool):
        raise InvalidParameterError(f"truncation index l must be an integer, got {l!r}")
    k = min(M.shape)
    if not 0 <= l < k:
        raise InvalidParameterError(f"truncation index l={l} outside [0, {k - 1}]")
    return int(l)


def kyfan_norm(T, p, l) -> float:
    """Ky Fan type norm ``(sum_{j<=l} s_j^p)^(1/p)`` for ``p >= 1``."""
    M = as_matrix(T)
    p = _check_p(p)
    if p < 1:
        raise InvalidParameterError(f"Ky Fan norms need p >= 1, got {p}")
    l = _check_l(M, l)
    return _schatten_from_values(singular_values(M)[: l + 1], p)


def optimal_s1l_split(T, l):
    """Split ``T = T1 + T2`` minimizing ``||T1||_{S_1} + (l+1)||T2||``.

    The minimum equals the Ky Fan norm ``kyfan_norm(T, 1, l)``.  It is attained
    by clipping the singular values at level ``s_{l+1}`` (zero when ``l`` is the
    last index): ``T2`` carries ``min(s_j, s_{l+1})`` and ``T1 = T - T2`` the
    excess, both on the singular vectors of ``T``.  Any level in
    ``[s_{l+1}, s_l]`` is optimal; the lowest one keeps ``T2`` smallest.
    """
    M = as_matrix(T)
    l = _check_l(M, l)
    U, s, Vh = svd(M)
    level = s[l + 1] if l + 1 < s.size else 0.0
    T2 = (U * np.minimum(s, level)) @ Vh
    T1 = M - T2
    return T1, T2


def split_cost(T1, T2, l: int) -> float:
    return schatten_norm(T1, 1) + (l + 1) * opnorm(T2)


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------

def random_complex(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random Hermitian matrix (GUE-like) rescaled to operator norm ``scale``."""
    G = random_complex(n, n, rng)
    H = 0.5 * (G + G.conj().T)
    nrm = opnorm(H)
    return H * (scale / nrm) if nrm > 0 else H


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase correction."""
    Q, R = np.linalg.qr(random_complex(n, n, rng))
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def _reject_constant(token):
    raise InvalidInputError(f"non-finite number '{token}' in matrix document")


def matrix_to_dict(T) -> dict:
    M = as_matrix(T)
    flat = M.reshape(-1)
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]),
            "re": flat.real.tolist(), "im": flat.imag.tolist()}


def matrix_from_dict(doc) -> np.ndarray:
    try:
        rows, cols = int(doc["rows"]), int(doc["cols"])
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", [0.0] * len(doc["re"])), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed matrix document: {exc}") from exc
    if rows < 0 or cols < 0 or re.shape != (rows * cols,) or im.shape != re.shape:
        raise InvalidInputError("matrix document: entry count does not match rows*cols")
    M = (re + 1j * im).reshape(rows, cols)
    return as_matrix(M)


def dumps_matrix(T) -> str:
    return json.dumps(matrix_to_dict(T), allow_nan=False)


def loads_matrix(text: str) -> np.ndarray:
    return matrix_from_dict(json.loads(text, parse_constant=_reject_constant))


def read_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return loads_matrix(fh.read())


def write_matrix(path, T) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_matrix(T))
