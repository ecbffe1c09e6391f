"""Schur (entrywise) products and Schur-multiplier norm estimates.

The multiplier norm ``||M||_mult = sup{||M * C|| : ||C|| = 1}`` is not
computable in general, so this module only produces *certified lower
bounds*: every :class:`MultiplierEstimate` stores the matrix ``C`` that
attains it, and the bound can be recomputed from that witness.  Upper bounds
are available in structurally solvable cases (rank one, absolutely summable
entries).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .linalg_core import as_matrix, opnorm, random_complex, schatten_norm


def schur_product(C, D) -> np.ndarray:
    """Entrywise product ``C * D``."""
    C = as_matrix(C, "C")
    D = as_matrix(D, "D")
    if C.shape != D.shape:
        raise InvalidInputError(f"size mismatch: {C.shape} vs {D.shape}")
    return C * D


def sign_matrix(n: int) -> np.ndarray:
    """``{sgn(j - k - 1/2)}``: ``+1`` strictly below the diagonal, ``-1`` elsewhere."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    j = np.arange(n)
    return np.where(j[:, None] > j[None, :], 1.0, -1.0).astype(np.complex128)


def hilbert_toeplitz(rows: int, cols: int | None = None) -> np.ndarray:
    """Toeplitz matrix ``1 / (j - k + 1/2)``, a near-extremal input for triangular truncation."""
    cols = rows if cols is None else cols
    j = np.arange(rows)[:, None]
    k = np.arange(cols)[None, :]
    return (1.0 / (j - k + 0.5)).astype(np.complex128)


@dataclass(frozen=True)
class MultiplierEstimate:
    """Certified lower bound ``||M * witness|| / ||witness||`` for the multiplier norm."""

    lower_bound: float
    witness: np.ndarray
    method: str

    def recompute(self, M) -> float:
        M = as_matrix(M)
        return opnorm(M * self.witness) / opnorm(self.witness)


def _ratio(M: np.ndarray, C: np.ndarray) -> float:
    n = opnorm(C)
    return opnorm(M * C) / n if n > 0 else 0.0


def _polar(H: np.ndarray) -> np.ndarray:
    """Closest partial isometry ``U V^*`` to ``H`` (the norm-one maximizer of Re tr(H^* C))."""
    U, _, Vh = np.linalg.svd(H, full_matrices=False)
    return U @ Vh


def _ascent(M: np.ndarray, C: np.ndarray, steps: int = 200, stall: float = 1e-10):
    """Alternating maximization over the top singular pair of ``M * C``.

    With ``(y, x)`` the top singular vectors of ``M * C``, the linear functional
    ``C -> y^* (M * C) x`` is maximized over the unit ball by the polar factor
    of ``conj(M) * (y x^*)``; each step therefore never decreases the ratio.
    """
    C = C / opnorm(C)
    value = opnorm(M * C)
    for _ in range(steps):
        U, s, Vh = np.linalg.svd(M * C)
        y, x = U[:, 0], Vh[0].conj()
        H = np.conj(M) * np.outer(y, x.conj())
        C_new = _polar(H)
        new = opnorm(M * C_new) / opnorm(C_new)
        if new <= value * (1 + stall):
            if new > value:
                C, value = C_new, new
            break
        C, value = C_new, new
    return C, value


def multiplier_norm_lower(M, budget: int = 32, seed: int = 0, ascent_steps: int = 200) -> MultiplierEstimate:
    """Lower bound for the Schur multiplier norm of ``M``.

    Candidates: the matrix unit at the largest entry, the all-ones matrix,
    the Hilbert-Toeplitz matrix, ``budget`` random unit-norm ``C`` and
    ``budget`` random rank-one ``C = u v^*``.  The best few candidates are
    refined by alternating ascent.  Trial ``i`` draws from the stream
    ``(seed, i)``; ties go to the lowest trial index.
    """
    M = as_matrix(M, "M")
    rows, cols = M.shape
    if M.size == 0:
        return MultiplierEstimate(0.0, np.zeros_like(M), "empty")
    cands = []
    E = np.zeros_like(M)
    E[np.unravel_index(np.argmax(np.abs(M)), M.shape)] = 1.0
    cands.append((E, "matrix-unit"))
    cands.append((np.ones_like(M), "all-ones"))
    cands.append((hilbert_toeplitz(rows, cols), "hilbert"))
    for i in range(budget):
        rng = np.random.default_rng([seed, i])
        cands.append((random_complex(rows, cols, rng), "random"))
        u = random_complex(rows, 1, rng)
        v = random_complex(cols, 1, rng)
        cands.append((u @ v.conj().T, "rank-one"))
    scored = [(_ratio(M, C), idx) for idx, (C, _) in enumerate(cands)]
    scored.sort(key=lambda t: (-t[0], t[1]))
    best_value, best_idx = scored[0]
    best_C, best_tag = cands[best_idx]
    for value, idx in scored[: min(4, len(scored))]:
        C, tag = cands[idx]
        C2, v2 = _ascent(M, C, ascent_steps)
        if v2 > best_value:
            best_value, best_C, best_tag = v2, C2, tag + "+ascent"
    best_C = best_C / opnorm(best_C)
    return MultiplierEstimate(_ratio(M, best_C), best_C, best_tag)


def rank_one_multiplier_norm(a, b) -> float:
    """Exact multiplier norm of ``a b^*``: ``max|a_j| * max|b_k|``."""
    return float(np.max(np.abs(a)) * np.max(np.abs(b)))


def abs_sum_upper(M) -> float:
    """Upper bound ``sum |m_jk|`` for the multiplier norm (triangle inequality over matrix units)."""
    return float(np.sum(np.abs(as_matrix(M))))


def multiplier_contraction_check(M, p=np.inf, trials: int = 64, seed: int = 0) -> float:
    """Worst ``||M * C||_p / ||C||_p`` over random ``C`` and the matrix unit at the largest entry."""
    p = float(p)
    if p not in (1.0, 2.0, np.inf):
        raise InvalidParameterError(f"p must be 1, 2 or inf, got {p}")
    M = as_matrix(M, "M")
    if M.size == 0:
        return 0.0
    E = np.zeros_like(M)
    E[np.unravel_index(np.argmax(np.abs(M)), M.shape)] = 1.0
    worst = schatten_norm(M * E, p) / schatten_norm(E, p)
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        if i % 2:
            C = random_complex(M.shape[0], 1, rng) @ random_complex(1, M.shape[1], rng)
        else:
            C = random_complex(*M.shape, rng)
        worst = max(worst, schatten_norm(M * C, p) / schatten_norm(C, p))
    return worst
