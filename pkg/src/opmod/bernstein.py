"""Band-limited functions and Bernstein-type inequalities.

A :class:`BandLimitedFunction` is a finite exponential sum
``f(x) = sum_k c_k exp(i t_k x)`` with ``|t_k| <= sigma``.  The sharp
Bernstein modulus ``beta_sigma(delta) = 2 sin(sigma delta / 2)`` (capped at
2) controls scalar differences, and by their operator versions also
``||f(A) - f(B)||``, higher differences ``(Delta_K^m f)(A)`` and
quasicommutators in Schatten norms.  Harness functions return the two sides
of each inequality so callers can assert them with their own slack.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InvalidInputError, InvalidParameterError
from .funcalc import apply_function, apply_trig_polynomial, finite_difference, quasicommutator
from .linalg_core import as_hermitian, as_unitary, opnorm, same_shape, schatten_norm


def beta(sigma, delta):
    """Sharp Bernstein modulus: ``2 sin(sigma delta / 2)`` up to ``delta = pi/sigma``, then 2."""
    sigma = np.asarray(sigma, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(sigma <= 0):
        raise InvalidParameterError("beta needs sigma > 0")
    if np.any(delta < 0):
        raise InvalidParameterError("beta needs delta >= 0")
    x = sigma * delta
    out = np.where(x <= np.pi, 2.0 * np.sin(0.5 * np.minimum(x, np.pi)), 2.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Band-limited functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BandLimitedFunction:
    """Finite exponential sum of exponential type ``sigma``."""

    freqs: np.ndarray
    coeffs: np.ndarray
    sigma: float

    def __post_init__(self):
        t = np.asarray(self.freqs, dtype=float).reshape(-1)
        c = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1)
        if t.shape != c.shape or t.size == 0:
            raise InvalidInputError("need matching, nonempty frequency and coefficient lists")
        if not self.sigma > 0:
            raise InvalidParameterError(f"type sigma must be positive, got {self.sigma}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(c))):
            raise InvalidInputError("frequencies and coefficients must be finite")
        if np.any(np.abs(t) > self.sigma * (1 + 1e-12)):
            raise InvalidParameterError(f"frequency outside [-{self.sigma}, {self.sigma}]")
        t.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "freqs", t)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "sigma", float(self.sigma))

    @classmethod
    def exponential(cls, sigma: float, c: complex = 1.0) -> "BandLimitedFunction":
        return cls([sigma], [c], abs(sigma))

    @classmethod
    def random(cls, rng: np.random.Generator, terms: int, sigma: float,
               lattice: int = 12) -> "BandLimitedFunction":
        """Random sum with frequencies on the lattice ``sigma * j / lattice``.

        Lattice frequencies make ``f`` periodic, so :func:`sup_norm` is
        evaluated over an exact period.
        """
        j = rng.integers(-lattice, lattice + 1, size=terms)
        j[rng.integers(terms)] = lattice * rng.choice([-1, 1])   # attain the type
        c = rng.standard_normal(terms) + 1j * rng.standard_normal(terms)
        return cls(sigma * j / lattice, c, sigma)

    @property
    def tag(self) -> str:
        return f"bandlimited[{self.freqs.size} terms, sigma={self.sigma:g}]"

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x)
        return np.exp(1j * np.multiply.outer(x, self.freqs)) @ self.coeffs

    def derivative(self, x) -> np.ndarray:
        x = np.asarray(x)
        return np.exp(1j * np.multiply.outer(x, self.freqs)) @ (1j * self.freqs * self.coeffs)

    def spectrum(self):
        return self.freqs, self.coeffs

    def difference(self, h: float, m: int = 1) -> "BandLimitedFunction":
        """``Delta_h^m f`` as a band-limited function of the same type."""
        return BandLimitedFunction(self.freqs, self.coeffs * (np.exp(1j * self.freqs * h) - 1.0) ** m,
                                   self.sigma)

    def scaled(self, factor: complex) -> "BandLimitedFunction":
        return BandLimitedFunction(self.freqs, self.coeffs * factor, self.sigma)

    def to_dict(self) -> dict:
        return {"sigma": self.sigma,
                "terms": [{"freq": float(t), "re": float(c.real), "im": float(c.imag)}
                          for t, c in zip(self.freqs, self.coeffs)]}

    @classmethod
    def from_dict(cls, doc) -> "BandLimitedFunction":
        try:
            terms = doc["terms"]
            return cls([float(t["freq"]) for t in terms],
                       [complex(float(t["re"]), float(t.get("im", 0.0))) for t in terms],
                       float(doc["sigma"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed band-limited function document: {exc}") from exc


def _common_period(freqs: np.ndarray, max_den: int = 4096):
    """Period of ``sum c_k exp(i t_k x)`` if the frequencies are commensurable, else ``None``."""
    nz = np.abs(freqs[freqs != 0])
    if nz.size == 0:
        return None
    base = nz.max()
    fracs = []
    for t in freqs / base:
        fr = Fraction(float(t)).limit_denominator(max_den)
        if abs(float(fr) - t) > 1e-12:
            return None
        fracs.append(fr)
    den = math.lcm(*(fr.denominator for fr in fracs))
    nums = [abs(fr.numerator * (den // fr.denominator)) for fr in fracs]
    g = math.gcd(*nums)
    # t_k = base * n_k / den, common period 2 pi den / (base g)
    return 2.0 * np.pi * den / (base * g)


def sup_norm(f: BandLimitedFunction, max_points: int = 1 << 20) -> float:
    """``sup_x |f(x)|`` of an exponential sum.

    A grid with step ``pi / (16 sigma_eff)`` over one period (or a long
    quasi-period window for incommensurable frequencies) is refined by
    bounded scalar minimization around the best grid points.  By Bernstein's
    derivative bound the grid maximum already lies within ~1% of the supremum.
    """
    freqs, coeffs = f.freqs, f.coeffs
    nz = freqs != 0
    if not np.any(nz):
        return float(abs(coeffs.sum()))
    if nz.sum() == 1 and np.sum(~nz) == 0:
        return float(abs(coeffs.sum()))
    s_eff = np.abs(freqs).max()
    step = np.pi / (16.0 * s_eff)
    period = _common_period(freqs)
    if period is None:
        diffs = np.diff(np.unique(freqs))
        gap = diffs.min() if diffs.size else s_eff
        period = 64.0 * np.pi / gap
    npts = int(min(max_points, math.ceil(period / step) + 1))
    x = np.linspace(0.0, period, npts, endpoint=False)
    best = 0.0
    vals = np.empty(npts)
    chunk = 1 << 14
    for s in range(0, npts, chunk):
        vals[s:s + chunk] = np.abs(f(x[s:s + chunk]))
    h = x[1] - x[0] if npts > 1 else step
    top = np.argsort(vals)[-8:]
    best = float(vals.max())
    for i in top:
        res = minimize_scalar(lambda t: -abs(f(t)), bounds=(x[i] - h, x[i] + h),
                              method="bounded", options={"xatol": 1e-13 / s_eff + 1e-15})
        best = max(best, -float(res.fun))
    return best


def verify_scalar_bernstein(f: BandLimitedFunction, m: int, h_grid) -> float:
    """Worst ratio ``||Delta_h^m f|| / (beta_sigma(|h|)^m ||f||)`` over ``h_grid``."""
    if m < 1:
        raise InvalidParameterError(f"order m must be >= 1, got {m}")
    norm_f = sup_norm(f)
    if norm_f == 0:
        raise InvalidInputError("f must be nonzero")
    worst = 0.0
    for h in np.asarray(h_grid, dtype=float).reshape(-1):
        b = beta(f.sigma, abs(h)) ** m
        if b == 0:
            continue
        worst = max(worst, sup_norm(f.difference(h, m)) / (b * norm_f))
    return worst


def exponential_growth_ratio(f: BandLimitedFunction, x, y) -> float:
    """Max of ``|f(x+iy)| / (exp(sigma |y|) ||f||)`` over the given grid."""
    z = np.add.outer(np.asarray(x, float), 1j * np.asarray(y, float))
    vals = np.abs(f(z))
    bound = np.exp(f.sigma * np.abs(z.imag)) * sup_norm(f)
    return float(np.max(vals / bound))


# ---------------------------------------------------------------------------
# Cardinal series
# ---------------------------------------------------------------------------

def cardinal_basis(k: int, z):
    """``cos z / (z - pi/2 - k pi)``; its sample at ``pi/2 + k pi`` is ``-(-1)^k``."""
    z = np.asarray(z, dtype=np.complex128)
    node = 0.5 * np.pi + k * np.pi
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.cos(z) / (z - node)
    return np.where(np.abs(z - node) <= 1e-12, -((-1) ** k), out)


def cardinal_reconstruct(samples: Mapping[int, complex], K: int, z: complex) -> complex:
    """Truncated cardinal series ``sum_{|k|<=K} (-1)^(k+1) F(pi/2+k pi) cos z / (z - pi/2 - k pi)``.

    At a node (within 1e-12) the stored sample is returned directly.
    """
    if K < 0:
        raise InvalidParameterError("truncation K must be nonnegative")
    z = complex(z)
    for k in range(-K, K + 1):
        if abs(z - (0.5 * np.pi + k * np.pi)) <= 1e-12:
            return complex(samples.get(k, 0.0))
    total = 0.0 + 0.0j
    cz = np.cos(z)
    for k in range(-K, K + 1):
        s = samples.get(k, 0.0)
        if s != 0:
            total += (-1) ** (k + 1) * s * cz / (z - 0.5 * np.pi - k * np.pi)
    return complex(total)


# ---------------------------------------------------------------------------
# Operator harnesses
# ---------------------------------------------------------------------------

def verify_operator_bernstein(f: BandLimitedFunction, A, B, norm_f: float | None = None):
    """``(||f(A) - f(B)||, beta_sigma(||A - B||) ||f||)``."""
    A = as_hermitian(A, "A")
    B = as_hermitian(B, "B")
    same_shape(A, B, names=("A", "B"))
    norm_f = sup_norm(f) if norm_f is None else norm_f
    lhs = opnorm(apply_function(f, A) - apply_function(f, B))
    return lhs, beta(f.sigma, opnorm(A - B)) * norm_f


def verify_operator_bernstein_difference(f: BandLimitedFunction, A, K, m: int,
                                         norm_f: float | None = None):
    """``(||(Delta_K^m f)(A)||, beta_sigma(||K||)^m ||f||)``."""
    norm_f = sup_norm(f) if norm_f is None else norm_f
    lhs = opnorm(finite_difference(f, A, K, m))
    return lhs, beta(f.sigma, opnorm(K)) ** m * norm_f


def verify_quasicommutator_bernstein(f: BandLimitedFunction, A, B, R, p=np.inf,
                                     norm_f: float | None = None):
    """``(||f(A)R - Rf(B)||_p, sigma ||f|| ||AR - RB||_p)`` in the Schatten ``p`` norm."""
    norm_f = sup_norm(f) if norm_f is None else norm_f
    lhs, rhs = quasicommutator(f, A, B, R)
    return schatten_norm(lhs, p), f.sigma * norm_f * schatten_norm(rhs, p)


@dataclass(frozen=True)
class TrigPolynomial:
    """``f(z) = sum_{k=-d}^{d} c_k z^k`` on the unit circle."""

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1)
        if int(self.degree) != self.degree or self.degree < 0:
            raise InvalidParameterError(f"degree must be a nonnegative integer, got {self.degree}")
        if c.size != 2 * self.degree + 1:
            raise InvalidParameterError(f"expected {2 * self.degree + 1} coefficients, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "degree", int(self.degree))

    @classmethod
    def random(cls, rng: np.random.Generator, d: int) -> "TrigPolynomial":
        c = rng.standard_normal(2 * d + 1) + 1j * rng.standard_normal(2 * d + 1)
        return cls(d, c).normalized()

    @property
    def tag(self) -> str:
        return f"trig[d={self.degree}]"

    def on_angle(self, theta) -> np.ndarray:
        """Value at ``exp(i theta)``."""
        k = np.arange(-self.degree, self.degree + 1)
        return np.exp(1j * np.multiply.outer(np.asarray(theta, float), k)) @ self.coeffs

    def __call__(self, t) -> np.ndarray:
        """Real-line view ``t -> f(exp(i t))`` (a band-limited function of type ``d``)."""
        return self.on_angle(t)

    def as_bandlimited(self) -> BandLimitedFunction:
        return BandLimitedFunction(np.arange(-self.degree, self.degree + 1), self.coeffs,
                                   max(self.degree, 1))

    def circle_sup(self, points: int = 4096) -> float:
        """Max of ``|f|`` on the circle: 4096-point grid plus local refinement."""
        theta = 2 * np.pi * np.arange(points) / points
        vals = np.abs(self.on_angle(theta))
        best = float(vals.max())
        h = 2 * np.pi / points
        for i in np.argsort(vals)[-8:]:
            res = minimize_scalar(lambda t: -abs(self.on_angle(t)), bounds=(theta[i] - h, theta[i] + h),
                                  method="bounded", options={"xatol": 1e-13})
            best = max(best, -float(res.fun))
        return best

    def normalized(self) -> "TrigPolynomial":
        s = self.circle_sup()
        return TrigPolynomial(self.degree, self.coeffs / s) if s > 0 else self

    def of_unitary(self, U) -> np.ndarray:
        return apply_trig_polynomial(self.coeffs, U)

    def to_dict(self) -> dict:
        return {"d": self.degree, "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}

    @classmethod
    def from_dict(cls, doc) -> "TrigPolynomial":
        try:
            raw = doc["coeffs"]
            coeffs = [complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c) for c in raw]
            return cls(int(doc["d"]), coeffs)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InvalidInputError(f"malformed trig polynomial document: {exc}") from exc


def verify_unitary_bernstein(f: TrigPolynomial, U, V, check_normalized: bool = True):
    """``(||f(U) - f(V)||, d ||U - V||, beta_d(2 arcsin(||U - V|| / 2)))``."""
    U = as_unitary(U, "U")
    V = as_unitary(V, "V")
    same_shape(U, V, names=("U", "V"))
    if check_normalized and f.circle_sup() > 1 + 1e-9:
        raise InvalidParameterError("trig polynomial must be normalized to sup <= 1 on the circle")
    lhs = opnorm(f.of_unitary(U) - f.of_unitary(V))
    dist = opnorm(U - V)
    d = f.degree
    rhs_linear = d * dist
    if d == 0:
        return lhs, 0.0, 0.0
    arc = 2.0 * math.asin(min(dist / 2.0, 1.0))
    return lhs, rhs_linear, beta(d, arc)
