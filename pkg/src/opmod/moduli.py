"""Operator moduli of continuity.

For a function ``f`` and ``delta > 0`` the module estimates, from below,

* ``pair``: ``sup ||f(A) - f(B)||`` over Hermitian ``A, B`` with ``||A - B|| < delta``;
* ``c1``:   ``sup ||f(A)R - Rf(A)||`` over Hermitian ``A``, Hermitian ``R``,
  ``||R|| = 1`` and ``||AR - RA|| < delta``;
* ``c2``:   the same with arbitrary ``R``;
* ``c3``:   ``sup ||f(A)R - Rf(B)||`` over Hermitian ``A, B``, ``||R|| <= 1``,
  ``||AR - RB|| < delta``.

Every lower bound carries a :class:`Witness` from which it can be recomputed.
The module also contains two explicit constructions: a commutator instance
built from a smoothed triangle wave that beats the pair modulus of
``exp(i sigma t)`` (see :func:`phi_shift_instance` and :func:`gap_demo`) and a
two-sided geometric spectrum on which ``|t|`` has growing quasicommutator
ratios (:func:`geometric_diag_instance`).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .bernstein import beta
from .errors import InstanceOverflowError, InvalidInputError, InvalidParameterError, ResolutionError
from .funcalc import apply_function
from .linalg_core import as_hermitian, as_matrix, opnorm, random_complex, random_hermitian
from .schur import hilbert_toeplitz

FLAVORS = ("pair", "c1", "c2", "c3")
DELTA_MARGIN = 1e-9       # witnesses are placed at delta * (1 - DELTA_MARGIN)
R_NORM_ATOL = 1e-12


def _check_flavor(flavor: str) -> str:
    if flavor not in FLAVORS:
        raise InvalidParameterError(f"unknown flavor '{flavor}', expected one of {FLAVORS}")
    return flavor


# ---------------------------------------------------------------------------
# Witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """An instance certifying a lower bound at a given ``delta``.

    ``B`` is used by the ``pair`` and ``c3`` flavors, ``R`` by ``c1``-``c3``.
    """

    flavor: str
    delta: float
    value: float
    A: np.ndarray
    B: np.ndarray | None = None
    R: np.ndarray | None = None

    def constraint(self) -> float:
        """The constrained quantity (``||A-B||``, ``||AR-RA||`` or ``||AR-RB||``)."""
        A, B, R = self.A, self.B, self.R
        if self.flavor == "pair":
            return opnorm(A - B)
        if self.flavor in ("c1", "c2"):
            return opnorm(A @ R - R @ A)
        return opnorm(A @ R - R @ B)

    def evaluate(self, f: Callable) -> float:
        """Recompute the certified value for ``f``."""
        return _value(f, self.flavor, self.A, self.B, self.R)

    def violations(self) -> list:
        """Reasons why the witness is not admissible (empty when valid)."""
        out = []
        A = self.A
        try:
            as_hermitian(A, "A")
            if self.B is not None:
                as_hermitian(self.B, "B")
        except InvalidInputError as exc:
            out.append(str(exc))
        if self.flavor != "pair":
            rn = opnorm(self.R)
            if rn > 1 + R_NORM_ATOL:
                out.append(f"||R|| = {rn!r} exceeds 1")
            if self.flavor in ("c1", "c2") and rn < 1 - 1e-9:
                out.append(f"||R|| = {rn!r} is not 1")
            if self.flavor == "c1" and np.max(np.abs(self.R - self.R.conj().T)) > 1e-12:
                out.append("R is not Hermitian")
        c = self.constraint()
        if not c < self.delta:
            out.append(f"constraint {c!r} is not below delta {self.delta!r}")
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def as_flavor(self, flavor: str) -> "Witness":
        """Reinterpret as a witness of a weaker flavor (pair -> c3 with R = I, c1 -> c2)."""
        if flavor == self.flavor:
            return self
        n = self.A.shape[0]
        if self.flavor == "pair" and flavor == "c3":
            return Witness("c3", self.delta, self.value, self.A, self.B, np.eye(n, dtype=np.complex128))
        if self.flavor == "c1" and flavor == "c2":
            return replace(self, flavor="c2")
        if self.flavor in ("c1", "c2") and flavor == "c3":
            return Witness("c3", self.delta, self.value, self.A, self.A, self.R)
        raise InvalidParameterError(f"a {self.flavor} witness is not a {flavor} witness")


def _value(f, flavor, A, B, R) -> float:
    if flavor == "pair":
        return opnorm(apply_function(f, A) - apply_function(f, B))
    fA = apply_function(f, A)
    if flavor in ("c1", "c2"):
        return opnorm(fA @ R - R @ fA)
    return opnorm(fA @ R - R @ apply_function(f, B))


@dataclass(frozen=True)
class ModulusEstimate:
    """Certified lower bounds of an operator modulus on a grid of ``delta`` values."""

    flavor: str
    delta_grid: np.ndarray
    lower_bounds: np.ndarray
    witnesses: tuple
    evaluations: int = 0
    f_tag: str = "f"

    def check(self, f, atol: float = 1e-8) -> list:
        """Problems found when re-evaluating every witness (empty when consistent)."""
        out = []
        for d, b, w in zip(self.delta_grid, self.lower_bounds, self.witnesses):
            if w is None:
                if b != 0:
                    out.append(f"delta={d}: bound {b} without witness")
                continue
            for v in w.violations():
                out.append(f"delta={d}: {v}")
            val = w.evaluate(f)
            if abs(val - b) > atol:
                out.append(f"delta={d}: witness gives {val}, stored {b}")
        return out


# ---------------------------------------------------------------------------
# Random search
# ---------------------------------------------------------------------------

def _random_R(flavor: str, n: int, rng) -> np.ndarray:
    R = random_hermitian(n, rng) if flavor == "c1" else random_complex(n, n, rng)
    return R / opnorm(R)


def _project(flavor: str, delta: float, A, B, R):
    """Scale an instance into the admissible set (constraint below ``delta``)."""
    target = delta * (1 - DELTA_MARGIN)
    if flavor == "pair":
        K = B - A
        c = opnorm(K)
        if c >= target:
            B = A + K * (target / c)
        return A, B, R
    rn = opnorm(R)
    if rn == 0:
        return None
    if flavor in ("c1", "c2"):
        R = R / rn
        c = opnorm(A @ R - R @ A)
        if c >= target:
            A = A * (target / c)
        return A, B, R
    if rn > 1:
        R = R / rn
    c = opnorm(A @ R - R @ B)
    if c >= target:
        A, B = A * (target / c), B * (target / c)
    return A, B, R


def _random_instance(flavor: str, delta: float, n: int, rng):
    scale = delta * math.exp(rng.uniform(math.log(0.25), math.log(16.0)))
    A = random_hermitian(n, rng, scale)
    B = R = None
    if flavor == "pair":
        K = random_hermitian(n, rng, delta * rng.choice([1.0, rng.uniform(0.2, 1.0)]))
        B = A + K
    else:
        R = _random_R(flavor, n, rng)
        if flavor == "c3":
            B = A + random_hermitian(n, rng, scale * rng.uniform(0.0, 1.0))
            if rng.random() < 0.5:
                R = R / opnorm(R)
            else:
                R = R * rng.uniform(0.5, 1.0) / opnorm(R)
        A = A * 1.0
        # start on the constraint boundary
        c = opnorm(A @ R - R @ (A if flavor != "c3" else B))
        if c > 0:
            s = delta * (1 - DELTA_MARGIN) / c * rng.choice([1.0, rng.uniform(0.3, 1.0)])
            A = A * s
            if B is not None:
                B = B * s
    return _project(flavor, delta, A, B, R)


def _perturb(flavor: str, inst, eta: float, rng):
    A, B, R = inst
    n = A.shape[0]
    sA = max(opnorm(A), 1e-3)
    A = A + eta * sA * random_hermitian(n, rng)
    if B is not None:
        B = B + eta * max(opnorm(B), 1e-3) * random_hermitian(n, rng)
    if R is not None:
        R = R + eta * (random_hermitian(n, rng) if flavor == "c1" else random_complex(n, n, rng) / 2)
    return A, B, R


def _ascend(f, flavor, delta, inst, value, steps, rng):
    eta = 0.05
    evals = 0
    for _ in range(steps):
        cand = _project(flavor, delta, *_perturb(flavor, inst, eta, rng))
        if cand is None:
            continue
        v = _value(f, flavor, *cand)
        evals += 1
        if v > value:
            inst, value = cand, v
            eta = min(eta * 1.5, 0.5)
        else:
            eta = max(eta * 0.85, 1e-5)
    return inst, value, evals


def _search_one(f, flavor, delta, budget, rng, sizes, ascent_steps, starts):
    best = []
    evals = 0
    for start in starts:
        best.append((_value(f, flavor, *start), start))
        evals += 1
    for _ in range(budget):
        n = int(rng.choice(sizes))
        inst = _random_instance(flavor, delta, n, rng)
        if inst is None:
            continue
        best.append((_value(f, flavor, *inst), inst))
        evals += 1
    if not best:
        return 0.0, None, evals
    best.sort(key=lambda t: -t[0])
    top_value, top = best[0]
    for value, inst in best[:3]:
        inst2, v2, e = _ascend(f, flavor, delta, inst, value, ascent_steps, rng)
        evals += e
        if v2 > top_value:
            top_value, top = v2, inst2
    return top_value, top, evals


def estimate_modulus(f: Callable, flavor: str, delta_grid: Sequence[float], budget: int = 24,
                     seed: int = 0, sizes: Sequence[int] = (1, 2, 3, 4, 6, 8, 12, 16),
                     ascent_steps: int = 200, seeds: "ModulusEstimate | None" = None,
                     workers: int = 1) -> ModulusEstimate:
    """Certified lower bounds of an operator modulus of ``f``.

    Parameters
    ----------
    f : callable
        Scalar function applied through the Hermitian functional calculus.
    flavor : {"pair", "c1", "c2", "c3"}
    delta_grid : sequence of float
    budget : int
        Random instances per ``delta``; the three best are refined by
        adaptive random-direction hill climbing for ``ascent_steps`` steps.
    seed : int
        The search at ``delta_grid[i]`` uses the stream ``(seed, i)``.
    sizes : sequence of int
        Matrix sizes drawn for the random instances.
    seeds : ModulusEstimate, optional
        Witnesses of a stronger flavor (pair or c1) imported as starting
        points, so that chain inequalities hold at the level of lower bounds.
    workers : int
        Thread count; results do not depend on it.
    """
    _check_flavor(flavor)
    deltas = np.asarray(delta_grid, dtype=float).reshape(-1)
    if deltas.size == 0 or np.any(deltas <= 0):
        raise InvalidParameterError("delta grid must be nonempty and positive")
    imported = [None] * deltas.size
    if seeds is not None:
        for i, d in enumerate(deltas):
            hits = [w for dd, w in zip(seeds.delta_grid, seeds.witnesses) if w is not None and dd == d]
            if hits:
                w = hits[0].as_flavor(flavor)
                imported[i] = (w.A, w.B, w.R)

    def job(i):
        rng = np.random.default_rng([seed, i])
        starts = [imported[i]] if imported[i] is not None else []
        return _search_one(f, flavor, float(deltas[i]), budget, rng, tuple(sizes), ascent_steps, starts)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(deltas.size)))
    else:
        results = [job(i) for i in range(deltas.size)]
    bounds, witnesses, evals = [], [], 0
    for d, (value, inst, e) in zip(deltas, results):
        evals += e
        if inst is None:
            bounds.append(0.0)
            witnesses.append(None)
            continue
        A, B, R = inst
        bounds.append(value)
        witnesses.append(Witness(flavor, float(d), value, A, B, R))
    return ModulusEstimate(flavor, deltas, np.asarray(bounds), tuple(witnesses), evals,
                           getattr(f, "tag", "f"))


# ---------------------------------------------------------------------------
# Monotonicity of delta^{-1} * (commutator modulus)
# ---------------------------------------------------------------------------

def _unit_shift(R: np.ndarray, tau: float) -> np.ndarray:
    """``tau R + lam I`` with ``lam >= 0`` chosen so that the norm is exactly 1."""
    n = R.shape[0]
    I = np.eye(n, dtype=np.complex128)
    S = tau * R
    if opnorm(S) >= 1:
        return S / opnorm(S)
    if np.allclose(R, R.conj().T, atol=1e-12):
        w = np.linalg.eigvalsh(0.5 * (S + S.conj().T))
        return S + (1.0 - w[-1]) * I
    lo, hi = 0.0, 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if opnorm(S + mid * I) < 1:
            lo = mid
        else:
            hi = mid
    return S + hi * I


@dataclass(frozen=True)
class Refinement:
    source_delta: float
    target_delta: float
    scaled_value: float
    valid: bool
    improves: bool


@dataclass(frozen=True)
class MonotonicityReport:
    flavor: str
    delta_grid: np.ndarray
    bounds: np.ndarray
    refined_bounds: np.ndarray
    refinements: tuple

    @property
    def normalized(self) -> np.ndarray:
        return self.refined_bounds / self.delta_grid

    @property
    def nonincreasing(self) -> bool:
        q = self.normalized
        return bool(np.all(np.diff(q) <= 1e-12 * np.maximum(1.0, np.abs(q[1:]))))

    @property
    def all_valid(self) -> bool:
        return all(r.valid for r in self.refinements)


def scale_witness(w: Witness, tau: float) -> Witness:
    """Transport a commutator witness from ``delta`` to ``tau * delta`` (``0 < tau <= 1``).

    ``R`` becomes ``tau R`` (shifted by a multiple of the identity to keep
    norm one for ``c1``/``c2``), which multiplies both the constraint and the
    value by ``tau``.
    """
    if w.flavor == "pair":
        raise InvalidParameterError("pair witnesses admit no delta rescaling")
    if not 0 < tau <= 1:
        raise InvalidParameterError(f"tau must be in (0, 1], got {tau}")
    R = _unit_shift(w.R, tau) if w.flavor in ("c1", "c2") else tau * w.R
    return Witness(w.flavor, w.delta * tau, w.value * tau, w.A, w.B, R)


def monotonicity_check(f: Callable, flavor: str, delta_grid: Sequence[float],
                       estimates: ModulusEstimate) -> MonotonicityReport:
    """Use the rescaling argument to propagate lower bounds to smaller ``delta``.

    For ``d1 < d2`` the witness at ``d2`` rescaled by ``tau = d1/d2`` is a
    valid ``d1`` witness of value ``tau * bound(d2)``.  The refined bounds
    ``max(bound(d1), max_{d2 > d1} (d1/d2) bound(d2))`` make
    ``delta^{-1} * bound`` nonincreasing on the grid.
    """
    _check_flavor(flavor)
    if flavor == "pair":
        raise InvalidParameterError("monotonicity of delta^{-1} Omega is not available for pairs")
    deltas = np.asarray(delta_grid, dtype=float)
    if not np.array_equal(deltas, estimates.delta_grid):
        raise InvalidParameterError("estimates were produced on a different delta grid")
    bounds = np.asarray(estimates.lower_bounds, dtype=float)
    refined = bounds.copy()
    refinements = []
    order = np.argsort(deltas)
    for a_pos, i in enumerate(order):
        for j in order[a_pos + 1:]:
            w = estimates.witnesses[j]
            if w is None or deltas[j] <= deltas[i]:
                continue
            sw = scale_witness(w, deltas[i] / deltas[j])
            sw = replace(sw, delta=float(deltas[i]))
            val = sw.evaluate(f)
            ok = sw.is_valid()
            better = ok and val > refined[i]
            if better:
                refined[i] = val
            refinements.append(Refinement(float(deltas[j]), float(deltas[i]), val, ok, bool(better)))
    return MonotonicityReport(flavor, deltas, bounds, refined, tuple(refinements))


# ---------------------------------------------------------------------------
# Smoothed triangle wave: commutators that beat the pair modulus
# ---------------------------------------------------------------------------

def _bump_transform(eps: float, omega: np.ndarray) -> np.ndarray:
    """Fourier transform at ``omega`` of the unit-mass C-infinity bump on ``(-eps, eps)``."""
    if eps == 0:
        return np.ones_like(omega)
    x, wts = np.polynomial.legendre.leggauss(400)
    psi = np.exp(-1.0 / (1.0 - x ** 2))
    psi /= np.sum(wts * psi)
    return np.cos(np.multiply.outer(omega * eps, x)) @ (wts * psi)


@dataclass(frozen=True)
class PhiShiftInstance:
    """Commutator instance built from a smoothed triangle wave ``phi``.

    ``phi`` has period 2 and ``phi(t + 1) = -phi(t)``; its unsmoothed form is
    ``1 - 2 * integral_0^t sgn sin(pi s) ds``.  On ``N`` Fourier modes of a
    circle of length ``P = N / q``, the derivative ``-i d/dt`` is diagonal and
    multiplication by ``phi`` compresses to a Toeplitz matrix supported on
    mode differences that are odd multiples of ``P/2``.  That matrix splits
    into ``P/2`` identical ``2q x 2q`` blocks, each coupling the modes
    ``j pi`` (``j = -q .. q-1``).  One block is stored:

    * ``A = diag(pi j) / sigma`` (the derivative, rescaled for type ``sigma``);
    * ``T`` = the block of ``phi``'s multiplication operator (Hermitian, ``||T|| <= 1``).

    Because ``phi(t+1) = -phi(t)``, ``exp(i sigma A)`` anticommutes with
    ``T`` and ``||f(A)T - Tf(A)|| = 2||T||`` for ``f = exp(i sigma t)``.
    """

    N: int
    q: int
    eps: float
    sigma: float
    A: np.ndarray
    T: np.ndarray
    symbol: np.ndarray          # phi coefficients at frequencies pi*d, d = 0..2q-1
    eta: float                  # ||phi'|| = 2 (1 + eta)

    @property
    def size(self) -> int:
        return self.A.shape[0]

    def phi(self, t) -> np.ndarray:
        """The normalized smoothed wave, evaluated from its Fourier series (first 4096 harmonics)."""
        r = np.arange(1, 8192, 2)
        c = 8.0 / (np.pi ** 2 * r ** 2) * _bump_transform(self.eps, np.pi * r)
        return (np.cos(np.pi * np.multiply.outer(np.asarray(t, float), r)) @ c) / _phi_peak(self.eps)

    def commutator(self) -> np.ndarray:
        return self.A @ self.T - self.T @ self.A

    def commutator_norm(self) -> float:
        return opnorm(self.commutator())

    def T_norm(self) -> float:
        return opnorm(self.T)

    def exp_commutator_norm(self) -> float:
        """``||f(A)T - Tf(A)||`` for ``f = exp(i sigma t)``, from the dense block."""
        fA = np.diag(np.exp(1j * self.sigma * np.diag(self.A).real))
        return opnorm(fA @ self.T - self.T @ fA)

    def witness(self, delta: float, f_value: Callable | None = None) -> Witness:
        """A ``c1`` witness at ``delta``: ``R = tau T + lam I`` with ``||R|| = 1``."""
        c = self.commutator_norm()
        tau = min(1.0, delta * (1 - DELTA_MARGIN) / c)
        w = np.linalg.eigvalsh(self.T)
        R = tau * self.T + (1.0 - tau * w[-1]) * np.eye(self.size)
        f = f_value or (lambda t: np.exp(1j * self.sigma * t))
        value = _value(f, "c1", self.A, None, R)
        return Witness("c1", float(delta), value, self.A, None, R)

    def omega_flat_lower(self, delta: float) -> float:
        return self.witness(delta).value

    def full_matrices(self):
        """Dense ``(A, T)`` on all ``N`` modes (only for modest ``N``; used to check the block reduction)."""
        if self.N > 2048:
            raise InvalidParameterError("full matrices are only built for N <= 2048")
        P = self.N // self.q
        k = np.arange(-self.N // 2, self.N // 2)
        A = np.diag(2 * np.pi * k / P) / self.sigma
        d = k[:, None] - k[None, :]
        half = P // 2
        odd = (d % half == 0) & ((d // half) % 2 != 0)
        idx = np.abs(d // half) if half else d
        T = np.where(odd, self.symbol_at(idx), 0.0)
        return A.astype(np.complex128), T.astype(np.complex128)

    def symbol_at(self, j) -> np.ndarray:
        j = np.abs(np.asarray(j))
        out = np.zeros(j.shape)
        inside = j < self.symbol.size
        out[inside] = self.symbol[j[inside]]
        return out

    def to_dict(self) -> dict:
        return {"N": self.N, "q": self.q, "eps": self.eps, "sigma": self.sigma,
                "symbol": self.symbol.tolist(), "eta": self.eta}


def _phi_peak(eps: float) -> float:
    """``max |phi_smoothed| = phi_smoothed(0)`` before normalization."""
    if eps == 0:
        return 1.0
    r = np.arange(1, 8192, 2)
    return float(np.sum(8.0 / (np.pi ** 2 * r ** 2) * _bump_transform(eps, np.pi * r)))


def phi_shift_instance(N: int = 4096, eps: float = 0.05, q: int = 64,
                       delta_target: float | None = None, sigma: float = 1.0) -> PhiShiftInstance:
    """Build the smoothed-triangle-wave commutator instance.

    Parameters
    ----------
    N : int
        Number of Fourier modes; ``N / q`` must be an even integer.
    eps : float
        Half-width of the C-infinity bump convolved with ``phi'``
        (0 keeps the sharp triangle wave).
    q : int
        Modes per unit frequency band; at least 16.
    delta_target : float, optional
        If given, ``R`` in the returned witness is calibrated to this ``delta``
        (see :meth:`PhiShiftInstance.witness`).
    sigma : float
        Type of the exponential ``exp(i sigma t)`` the instance is aimed at.
    """
    if q < 16:
        raise ResolutionError(f"q={q} is too coarse; need at least 16 modes per band")
    if not 0 <= eps < 0.5:
        raise InvalidParameterError(f"eps must lie in [0, 1/2), got {eps}")
    if N % q or (N // q) % 2:
        raise InvalidParameterError(f"N={N} must be an even multiple of q={q}")
    if not sigma > 0:
        raise InvalidParameterError("sigma must be positive")
    size = 2 * q
    d = np.arange(size)
    symbol = np.zeros(size)
    odd = d % 2 == 1
    peak = _phi_peak(eps)
    symbol[odd] = 4.0 / (np.pi ** 2 * d[odd] ** 2) * _bump_transform(eps, np.pi * d[odd]) / peak
    j = np.arange(-q, q)
    A = np.diag(np.pi * j / sigma).astype(np.complex128)
    diff = np.abs(j[:, None] - j[None, :])
    T = symbol[diff].astype(np.complex128)
    inst = PhiShiftInstance(int(N), int(q), float(eps), float(sigma), A, T, symbol, 1.0 / peak - 1.0)
    return inst


# ---------------------------------------------------------------------------
# Gap table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapRow:
    delta: float
    omega_lower_pair: float
    omega_upper_pair: float
    flat_lower: float
    flat_exact: float


@dataclass(frozen=True)
class GapDemo:
    sigma: float
    rows: tuple
    pair_estimate: ModulusEstimate
    instance: PhiShiftInstance
    flat_witnesses: tuple

    COLUMNS = ("delta", "omega_lower_pair", "omega_upper_pair", "flat_lower", "flat_exact")

    def table(self) -> list:
        return [(r.delta, r.omega_lower_pair, r.omega_upper_pair, r.flat_lower, r.flat_exact)
                for r in self.rows]


def gap_demo(sigma: float = 1.0, delta_grid: Sequence[float] = (0.25, 0.5, 1.0, 1.5, 2.0, 2.5),
             N: int = 4096, eps: float = 0.05, q: int = 64, budget: int = 24, seed: int = 0,
             ascent_steps: int = 200, workers: int = 1) -> GapDemo:
    """Compare pair and commutator moduli of ``exp(i sigma t)`` on a delta grid.

    Columns: searched pair lower bound, the exact pair value
    ``2 sin(sigma delta / 2)``, the commutator lower bound certified by the
    smoothed-triangle-wave instance, and the exact commutator value
    ``min(2, sigma delta)``.
    """
    deltas = np.asarray(delta_grid, dtype=float)
    if np.any(deltas <= 0) or np.any(deltas >= np.pi / sigma):
        raise InvalidParameterError("gap table needs 0 < delta < pi/sigma")
    f = lambda t: np.exp(1j * sigma * t)
    pair = estimate_modulus(f, "pair", deltas, budget=budget, seed=seed,
                            ascent_steps=ascent_steps, workers=workers)
    inst = phi_shift_instance(N, eps, q, sigma=sigma)
    witnesses = tuple(inst.witness(float(d)) for d in deltas)
    rows = tuple(GapRow(float(d), float(lo), float(beta(sigma, d)), w.value, float(min(2.0, sigma * d)))
                 for d, lo, w in zip(deltas, pair.lower_bounds, witnesses))
    return GapDemo(float(sigma), rows, pair, inst, witnesses)


# ---------------------------------------------------------------------------
# Two-sided geometric spectrum for |t|
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeometricDiagInstance:
    """Diagonal ``A = diag(lam)``, ``B = diag(mu)`` with ``lam_j = 2^a_j``, ``mu_j = -2^b_j``.

    ``lam_0 = 1``, ``mu_j = -2^(j+2) lam_j`` and ``lam_{j+1} = 2^(j+3) |mu_j|``,
    so that ``|t|`` has divided differences
    ``m_jk = (lam_j - |mu_k|)/(lam_j - mu_k) = tanh((a_j - b_k) ln 2 / 2)``,
    within ``4 * 2^-max(j,k)`` of ``sgn(j - k - 1/2)``.  With
    ``R_jk = t_jk / (lam_j - mu_k)`` one has ``AR - RB = t`` and
    ``|A|R - R|B| = M * t``.  Exponents are kept as integers; ``lam``/``mu``
    overflow double precision beyond ``n = 30``.
    """

    n: int
    a: np.ndarray
    b: np.ndarray
    t: np.ndarray

    @property
    def lam(self) -> np.ndarray:
        return self._pow2(self.a, 1.0)

    @property
    def mu(self) -> np.ndarray:
        return self._pow2(self.b, -1.0)

    @staticmethod
    def _pow2(e, sign):
        if np.max(e) > 1023:
            raise InstanceOverflowError(f"2^{int(np.max(e))} exceeds the double range")
        return sign * np.ldexp(1.0, e.astype(int))

    def R(self) -> np.ndarray:
        lam, mu = self.lam, self.mu
        R = self.t / (lam[:, None] - mu[None, :])
        if np.any((R == 0) & (self.t != 0)):
            raise InstanceOverflowError("entries of R underflow")
        return R.astype(np.complex128)

    def divided_differences(self) -> np.ndarray:
        return np.tanh((self.a[:, None] - self.b[None, :]) * math.log(2.0) / 2.0)

    def gap_conditions(self) -> bool:
        """``2^(j+1) |lam_j| < |mu_j|`` and ``2^(j+2) |mu_j| < |lam_{j+1}|`` for all ``j``."""
        j = np.arange(self.n)
        ok1 = np.all(j + 1 + self.a < self.b)
        ok2 = np.all(j[:-1] + 2 + self.b[:-1] < self.a[1:])
        return bool(ok1 and ok2)

    def quasicommutators(self):
        """``(|A|R - R|B|, AR - RB) = (M * t, t)``."""
        return self.divided_differences() * self.t, self.t.astype(np.complex128)

    def ratio(self) -> float:
        lhs, rhs = self.quasicommutators()
        return opnorm(lhs) / opnorm(rhs)


def geometric_diag_instance(n: int, pattern: str = "hilbert") -> GeometricDiagInstance:
    """Geometric instance with ``n`` positive and ``n`` negative eigenvalues.

    ``pattern`` picks ``t = AR - RB``: ``"hilbert"`` uses ``1/(j - k + 1/2)``,
    ``"lower"`` the lower-triangular all-ones matrix.
    """
    if n < 2:
        raise InvalidParameterError(f"need n >= 2, got {n}")
    a = np.zeros(n, dtype=np.int64)
    b = np.zeros(n, dtype=np.int64)
    for j in range(n):
        b[j] = a[j] + j + 2
        if j + 1 < n:
            a[j + 1] = b[j] + j + 3
    if pattern == "hilbert":
        t = hilbert_toeplitz(n).real
    elif pattern == "lower":
        t = np.tril(np.ones((n, n)))
    else:
        raise InvalidParameterError(f"unknown pattern '{pattern}'")
    return GeometricDiagInstance(int(n), a, b, t)
