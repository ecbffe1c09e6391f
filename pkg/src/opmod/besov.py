"""FFT-based Littlewood-Paley analysis on a periodic sampling window.

A :class:`SampledFunction` holds samples of ``f`` on ``x_j = -L + 2Lj/N``.
Its discrete spectrum lives on the frequencies ``xi_k = pi k / L`` with
``f(x) = sum_k a_k exp(i xi_k x)``; every spectral operation (dyadic blocks,
low-pass approximation, trigonometric interpolation) is a multiplication of
the coefficients ``a_k`` by a Fourier multiplier.

The kernel bank fixes the smooth bump ``w`` on ``[1/2, 2]`` with
``w(x) + w(x/2) = 1`` on ``[1, 2]`` and the low-pass cutoff ``v``; the
dyadic pieces are ``f*W_n`` (multiplier ``w(xi/2^n)``) and ``f*W_n^#``
(multiplier ``w(-xi/2^n)``).  The module also measures scalar moduli of
continuity, Hoelder-Zygmund and ``Lambda_omega`` seminorms, and evaluates the
tail integral ``omega_*``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import AliasingError, InvalidInputError, InvalidParameterError

ALIAS_RTOL = 1e-4


# ---------------------------------------------------------------------------
# Smooth steps and the kernel bank
# ---------------------------------------------------------------------------

def smooth_step(t) -> np.ndarray:
    """C-infinity step ``g(t) = h(t) / (h(t) + h(1-t))`` with ``h(t) = exp(-1/t)``.

    ``g = 0`` for ``t <= 0`` and ``g = 1`` for ``t >= 1``.
    """
    t = np.asarray(t, dtype=float)
    out = np.where(t >= 1.0, 1.0, 0.0)
    mid = (t > 0.0) & (t < 1.0)
    if np.any(mid):
        s = t[mid]
        # h(s)/(h(s)+h(1-s)) = 1/(1+exp(1/s - 1/(1-s)))
        e = 1.0 / s - 1.0 / (1.0 - s)
        out = out.astype(float)
        out[mid] = 0.5 * (1.0 - np.tanh(0.5 * e))
    return out


def cosine_step(t) -> np.ndarray:
    """``sin^2(pi t / 2)`` clipped to ``[0, 1]``; a C^1 alternative step."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return np.sin(0.5 * np.pi * t) ** 2


_STEPS = {"smoothstep": smooth_step, "cosine": cosine_step}


@dataclass(frozen=True)
class LPKernelBank:
    """Littlewood-Paley bump ``w`` and cutoff ``v`` built from a monotone step.

    ``w(x) = g(2x - 1)`` on ``[1/2, 1]``, ``w(x) = 1 - g(x - 1)`` on ``[1, 2]``,
    zero elsewhere; ``v = 1`` on ``[-1, 1]`` and ``v(x) = w(|x|)`` outside.
    """

    variant: str = "smoothstep"

    def __post_init__(self):
        if self.variant not in _STEPS:
            raise InvalidParameterError(f"unknown kernel variant '{self.variant}'")

    @property
    def step(self) -> Callable:
        return _STEPS[self.variant]

    def w(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g = self.step
        rising = (x >= 0.5) & (x <= 1.0)
        falling = (x > 1.0) & (x < 2.0)
        return np.where(rising, g(2.0 * x - 1.0), 0.0) + np.where(falling, 1.0 - g(x - 1.0), 0.0)

    def v(self, x) -> np.ndarray:
        a = np.abs(np.asarray(x, dtype=float))
        return np.where(a <= 1.0, 1.0, self.w(a))

    def block_multiplier(self, xi, n: int, side: str = "both") -> np.ndarray:
        """Multiplier of ``f*W_n`` (``side="pos"``), ``f*W_n^#`` (``"neg"``) or their sum."""
        s = np.asarray(xi, dtype=float) / 2.0 ** n
        if side == "pos":
            return self.w(s)
        if side == "neg":
            return self.w(-s)
        return self.w(s) + self.w(-s)

    def lowpass_multiplier(self, xi, n: int) -> np.ndarray:
        """Multiplier of ``f*V_n``."""
        return self.v(np.asarray(xi, dtype=float) / 2.0 ** n)

    def active_blocks(self, xi) -> range:
        """Smallest range of block indices whose supports cover every nonzero ``|xi|``."""
        a = np.abs(np.asarray(xi, dtype=float))
        a = a[a > 0]
        if a.size == 0:
            return range(0)
        lo = math.floor(math.log2(a.min())) - 1
        hi = math.ceil(math.log2(a.max())) + 1
        return range(lo, hi + 1)


def build_kernel_bank(variant: str = "smoothstep") -> LPKernelBank:
    """Return the concrete Littlewood-Paley kernel bank (``"smoothstep"`` or ``"cosine"``)."""
    return LPKernelBank(variant)


# ---------------------------------------------------------------------------
# Sampled functions
# ---------------------------------------------------------------------------

def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SampledFunction:
    """Samples of a function on the periodic grid ``x_j = -L + 2Lj/N``."""

    L: float
    N: int
    values: np.ndarray

    def __post_init__(self):
        if not self.L > 0:
            raise InvalidParameterError(f"half-width L must be positive, got {self.L}")
        if not _is_pow2(int(self.N)):
            raise InvalidParameterError(f"N must be a power of two, got {self.N}")
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.N,):
            raise InvalidInputError(f"expected {self.N} samples, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("sampled values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    # construction -------------------------------------------------------
    @classmethod
    def from_function(cls, f: Callable, L: float, N: int) -> "SampledFunction":
        x = -L + 2.0 * L * np.arange(N) / N
        return cls(float(L), int(N), np.asarray(f(x), dtype=np.complex128))

    @classmethod
    def from_coefficients(cls, L: float, N: int, coeffs) -> "SampledFunction":
        k = np.fft.fftfreq(N, d=1.0 / N)
        V = np.asarray(coeffs) * N * np.cos(np.pi * k)
        return cls(float(L), int(N), np.fft.ifft(V))

    # grid data -----------------------------------------------------------
    @property
    def grid(self) -> np.ndarray:
        return -self.L + 2.0 * self.L * np.arange(self.N) / self.N

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def freqs(self) -> np.ndarray:
        """Angular frequencies ``pi k / L`` in FFT order (Nyquist bin negative)."""
        return np.pi * np.fft.fftfreq(self.N, d=1.0 / self.N) / self.L

    @property
    def nyquist(self) -> float:
        return np.pi * self.N / (2.0 * self.L)

    @property
    def window(self) -> tuple:
        return (-self.L, self.L)

    def coefficients(self) -> np.ndarray:
        """Coefficients ``a_k`` with ``f(x_j) = sum_k a_k exp(i xi_k x_j)``."""
        k = np.fft.fftfreq(self.N, d=1.0 / self.N)
        # exp(i xi_k x_j) = (-1)^k exp(2 pi i jk/N)
        return np.fft.fft(self.values) * np.cos(np.pi * k) / self.N

    def spectrum(self, check_alias: bool = True):
        """Return ``(freqs, coeffs)``; optionally refuse spectra that reach the Nyquist bin."""
        a = self.coefficients()
        if check_alias and self.N > 1:
            peak = np.max(np.abs(a))
            nyq = abs(a[self.N // 2])
            if peak > 0 and nyq > ALIAS_RTOL * peak:
                raise AliasingError(
                    f"Nyquist coefficient carries {nyq / peak:.2e} of the peak spectral mass "
                    f"(N={self.N}, L={self.L}); refine the grid")
        return self.freqs, a

    def with_multiplier(self, mult) -> "SampledFunction":
        a = self.coefficients() * mult
        return SampledFunction.from_coefficients(self.L, self.N, a)

    def __call__(self, x) -> np.ndarray:
        """Trigonometric interpolant evaluated at arbitrary real points."""
        x = np.asarray(x, dtype=float)
        xi, a = self.freqs, self.coefficients()
        return np.exp(1j * np.multiply.outer(x, xi)) @ a

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.N else 0.0

    # serialization ---------------------------------------------------------
    def to_dict(self) -> dict:
        return {"L": self.L, "N": self.N, "re": self.values.real.tolist(),
                "im": self.values.imag.tolist()}

    @classmethod
    def from_dict(cls, doc) -> "SampledFunction":
        try:
            vals = np.asarray(doc["re"], float) + 1j * np.asarray(doc.get("im", [0.0] * len(doc["re"])), float)
            return cls(float(doc["L"]), int(doc["N"]), vals)
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed sampled-function document: {exc}") from exc


# ---------------------------------------------------------------------------
# Dyadic decomposition
# ---------------------------------------------------------------------------

def dyadic_block(f: SampledFunction, n: int, bank: LPKernelBank):
    """Positive and negative frequency blocks ``(f*W_n, f*W_n^#)``.

    Raises
    ------
    AliasingError
        If the block support ``[2^(n-1), 2^(n+1)]`` lies entirely above the
        grid Nyquist frequency, i.e. the grid cannot represent it at all.
    """
    if 2.0 ** (n - 1) >= f.nyquist:
        raise AliasingError(f"block n={n} starts at {2.0 ** (n - 1):g}, above the grid "
                            f"Nyquist frequency {f.nyquist:g}")
    xi = f.freqs
    pos = f.with_multiplier(bank.block_multiplier(xi, n, "pos"))
    neg = f.with_multiplier(bank.block_multiplier(xi, n, "neg"))
    return pos, neg


def resolved_blocks(f: SampledFunction) -> range:
    """Block indices that touch at least one nonzero grid frequency."""
    lo = math.floor(math.log2(np.pi / f.L)) - 1
    hi = math.ceil(math.log2(f.nyquist))
    return range(lo, hi + 1)


def vn_approx(f: SampledFunction, n: int, bank: LPKernelBank) -> SampledFunction:
    """Low-pass approximation ``f*V_n`` (multiplier ``v(xi/2^n)``)."""
    return f.with_multiplier(bank.lowpass_multiplier(f.freqs, n))


def reconstruct(f: SampledFunction, bank: LPKernelBank) -> SampledFunction:
    """Mean plus the sum of all resolved dyadic blocks; equals ``f`` up to rounding."""
    a = f.coefficients()
    xi = f.freqs
    total = np.where(xi == 0, a, 0)
    for n in resolved_blocks(f):
        total = total + a * bank.block_multiplier(xi, n)
    return SampledFunction.from_coefficients(f.L, f.N, total)


def dyadic_table(f: SampledFunction, alpha: float, bank: LPKernelBank):
    """Rows ``(n, ||f*W_n||, 2^(n alpha) ||f*W_n||)`` over the resolved blocks."""
    rows = []
    for n in resolved_blocks(f):
        pos, _ = dyadic_block(f, n, bank)
        s = pos.sup_norm()
        rows.append((n, s, 2.0 ** (n * alpha) * s))
    return rows


def write_dyadic_csv(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "block_sup", "weighted"])
        for n, s, ws in rows:
            w.writerow([n, f"{s:.17g}", f"{ws:.17g}"])


# ---------------------------------------------------------------------------
# Differences and moduli of continuity
# ---------------------------------------------------------------------------

def _shifted(values: np.ndarray, grid: np.ndarray, shift: float) -> np.ndarray:
    """Linear interpolation of the samples at ``grid + shift`` (no wrap)."""
    x = grid + shift
    return np.interp(x, grid, values.real) + 1j * np.interp(x, grid, values.imag)


def difference_sup(f: SampledFunction, h: float, m: int) -> float:
    """``max_x |Delta_h^m f(x)|`` over grid points ``x`` with ``x + m h`` inside the window."""
    grid, vals = f.grid, f.values
    valid = grid + m * h <= grid[-1] + 1e-12 * f.L
    if not np.any(valid):
        return 0.0
    k = h / f.dx
    acc = np.zeros(int(valid.sum()), dtype=np.complex128)
    for j in range(m + 1):
        c = (-1) ** (m - j) * math.comb(m, j)
        shift = j * h
        if abs(j * k - round(j * k)) < 1e-9:
            s = int(round(j * k))
            acc += c * vals[s: s + acc.size]
        else:
            acc += c * _shifted(vals, grid, shift)[valid]
    return float(np.max(np.abs(acc)))


def difference_values(f: SampledFunction, s: int, m: int) -> np.ndarray:
    """``Delta_h^m f`` at grid points for a grid-exact step ``h = s dx`` (no wrap)."""
    vals = f.values
    count = f.N - m * s
    if count <= 0:
        return np.zeros(0, dtype=np.complex128)
    acc = np.zeros(count, dtype=np.complex128)
    for j in range(m + 1):
        acc += (-1) ** (m - j) * math.comb(m, j) * vals[j * s: j * s + count]
    return acc


def modulus_of_continuity(f: SampledFunction, m: int, x: float, n_h: int = 256) -> float:
    """Order-``m`` modulus ``sup_{0 <= h <= x} ||Delta_h^m f||``.

    The supremum runs over grid-multiple steps up to ``x`` (thinned to ``n_h``
    values) plus ``h = x`` itself, and over every grid point where the
    difference stays inside the window.
    """
    if m < 1:
        raise InvalidParameterError(f"order m must be >= 1, got {m}")
    if not x > 0:
        raise InvalidParameterError(f"x must be positive, got {x}")
    if x > 2.0 * f.L / (m + 1) * (1 + 1e-12):
        raise InvalidParameterError(f"x={x} exceeds window/(m+1) = {2 * f.L / (m + 1)}")
    kmax = int(math.floor(x / f.dx + 1e-9))
    steps = np.arange(1, kmax + 1)
    if steps.size > n_h:
        steps = np.unique(np.linspace(1, kmax, n_h).round().astype(int))
    hs = np.concatenate([steps * f.dx, [x]])
    return max(difference_sup(f, h, m) for h in hs)


def difference_seminorm(f: SampledFunction, alpha: float, m: int | None = None,
                        n_t: int = 160) -> float:
    """``sup_t ||Delta_t^m f|| / t^alpha`` with ``m = floor(alpha) + 1`` by default."""
    if m is None:
        m = int(math.floor(alpha)) + 1
    tmax = 2.0 * f.L / (m + 1)
    smax = int(math.floor(tmax / f.dx))
    steps = np.unique(np.geomspace(1, max(smax, 1), n_t).round().astype(int))
    best = 0.0
    for s in steps:
        d = difference_values(f, int(s), m)
        if d.size:
            best = max(best, float(np.max(np.abs(d))) / (s * f.dx) ** alpha)
    return best


def dyadic_seminorm(f: SampledFunction, alpha: float, bank: LPKernelBank) -> float:
    """``sup_n 2^(n alpha) (||f*W_n|| + ||f*W_n^#||)`` over resolved blocks."""
    best = 0.0
    for n in resolved_blocks(f):
        pos, neg = dyadic_block(f, n, bank)
        best = max(best, 2.0 ** (n * alpha) * (pos.sup_norm() + neg.sup_norm()))
    return best


@dataclass(frozen=True)
class HolderSeminorms:
    difference: float
    dyadic: float

    @property
    def ratio(self) -> float:
        if self.dyadic == 0:
            return 1.0 if self.difference == 0 else math.inf
        return self.difference / self.dyadic


def holder_zygmund_norm(f: SampledFunction, alpha: float,
                        bank: LPKernelBank | None = None) -> HolderSeminorms:
    """Difference-based and dyadic Hoelder-Zygmund seminorms of order ``alpha``."""
    if not alpha > 0:
        raise InvalidParameterError(f"alpha must be positive, got {alpha}")
    bank = bank or build_kernel_bank()
    return HolderSeminorms(difference_seminorm(f, alpha), dyadic_seminorm(f, alpha, bank))


# ---------------------------------------------------------------------------
# Moduli functions and Lambda_omega
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModulusFunction:
    """A modulus of continuity ``omega`` of order ``m`` (``omega(2x) <= 2^m omega(x)``)."""

    evaluate: Callable[[np.ndarray], np.ndarray]
    order: int = 1
    tag: str = "omega"

    def __call__(self, x):
        return np.asarray(self.evaluate(np.asarray(x, dtype=float)), dtype=float)

    @classmethod
    def power(cls, alpha: float, order: int | None = None) -> "ModulusFunction":
        if order is None:
            order = int(math.floor(alpha)) + 1
        return cls(lambda t, a=alpha: np.power(t, a), order, f"t^{alpha:g}")

    def violations(self, lo: float = 1e-8, hi: float = 1e8, points: int = 1000) -> list:
        """List the failed structural checks on a log grid (empty when valid)."""
        x = np.geomspace(lo, hi, points)
        y = self(x)
        out = []
        if not np.all(np.isfinite(y)) or np.any(y <= 0):
            out.append("values must be positive and finite")
        if np.any(np.diff(y) < -1e-12 * np.abs(y[1:])):
            out.append("not nondecreasing")
        if np.any(self(2 * x) > 2.0 ** self.order * y * (1 + 1e-12)):
            out.append(f"doubling bound omega(2x) <= 2^{self.order} omega(x) fails")
        if not y[0] < 1e-3 * y[-1]:
            out.append("omega does not decay towards 0")
        return out

    def validate(self) -> "ModulusFunction":
        bad = self.violations()
        if bad:
            raise InvalidParameterError(f"invalid modulus {self.tag}: " + "; ".join(bad))
        return self


def lambda_omega_norm(f: SampledFunction, omega: ModulusFunction, max_shifts: int = 2048) -> float:
    """Grid supremum of ``||Delta_t^m f|| / omega(t)`` with ``m = omega.order``.

    For ``m = 1`` this is ``sup |f(x) - f(y)| / omega(|x - y|)`` over grid pairs.
    Steps are grid multiples; at most ``max_shifts`` of them are used (all of
    them when the grid allows).
    """
    m = omega.order
    smax = (f.N - 1) // m
    steps = np.arange(1, smax + 1)
    if steps.size > max_shifts:
        steps = np.unique(np.geomspace(1, smax, max_shifts).round().astype(int))
    best = 0.0
    for s in steps:
        d = difference_values(f, int(s), m)
        if d.size:
            best = max(best, float(np.max(np.abs(d)) / omega(s * f.dx)))
    return best


# ---------------------------------------------------------------------------
# The omega_* tail integral
# ---------------------------------------------------------------------------

def _adaptive_simpson(g, a: float, b: float, rtol: float, depth: int = 48) -> float:
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = g(lm), g(rm)
        left, right = simpson(fa, flm, fm, a, m), simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (rec(a, m, fa, flm, fm, left, tol / 2, depth - 1)
                + rec(m, b, fm, frm, fb, right, tol / 2, depth - 1))

    fa, fb, fm = g(a), g(b), g(0.5 * (a + b))
    whole = simpson(fa, fm, fb, a, b)
    # absolute tolerance from a coarse magnitude estimate
    scale = abs(whole) if whole != 0 else 1.0
    return rec(a, b, fa, fm, fb, whole, rtol * scale, depth)


def omega_star(omega: ModulusFunction, m: int, x: float, rtol: float = 1e-9,
               span_log2: int = 20) -> float:
    """``x^m * integral_x^inf omega(t) / t^(m+1) dt``; ``math.inf`` when divergent.

    Substituting ``t = x e^s`` gives ``integral_0^inf omega(x e^s) e^(-m s) ds``.
    The range ``t <= 2^20 x`` is integrated by adaptive Simpson; beyond it
    ``omega`` is extended as a power law whose exponent ``gamma`` is read off
    from ``omega`` on ``[X, 4X]``.  The tail is then exactly
    ``omega(X) (x/X)^m / (m - gamma)`` and the integral diverges when
    ``gamma >= m``.
    """
    if not x > 0:
        raise InvalidParameterError(f"x must be positive, got {x}")
    if m < 1:
        raise InvalidParameterError(f"order m must be >= 1, got {m}")
    S = span_log2 * math.log(2.0)
    X = x * math.exp(S)
    wX = float(omega(X))
    gamma = math.log(float(omega(4 * X)) / wX) / math.log(4.0) if wX > 0 else 0.0
    if gamma >= m - 1e-9:
        return math.inf
    body = _adaptive_simpson(lambda s: float(omega(x * math.exp(s))) * math.exp(-m * s), 0.0, S, rtol)
    tail = wX * math.exp(-m * S) / (m - gamma)
    return body + tail
