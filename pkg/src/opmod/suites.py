"""Verification suites driven by :class:`SuiteConfig` documents.

Each suite runs one family of checks, records pass/fail assertions, measured
constants and worst ratios in a :class:`RunReport`, and returns CSV tables
plus a witness bundle.  Instance ``i`` of a suite always draws from the
random stream ``(seed, salt, i)``, so results do not depend on the number of
worker threads.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import bundle as bnd
from .bernstein import (BandLimitedFunction, TrigPolynomial, beta, sup_norm,
                        verify_operator_bernstein, verify_operator_bernstein_difference,
                        verify_quasicommutator_bernstein, verify_scalar_bernstein,
                        verify_unitary_bernstein)
from .besov import (ModulusFunction, SampledFunction, build_kernel_bank, difference_values,
                    dyadic_block, lambda_omega_norm, omega_star, reconstruct, resolved_blocks,
                    smooth_step, vn_approx)
from .errors import ConfigError
from .funcalc import (finite_difference, litpaley_finite_difference, parse_function,
                      power_function, unitary_log_arg)
from .linalg_core import (kyfan_norm, opnorm, optimal_s1l_split, random_complex, random_hermitian,
                          random_unitary, schatten_norm, split_cost)
from .moduli import (estimate_modulus, gap_demo, geometric_diag_instance, monotonicity_check)
from .schur import multiplier_norm_lower, sign_matrix

REPORT_SCHEMA = "opmod-report/1"
SUITES = ("bernstein-scalar", "bernstein-operator", "bernstein-unitary", "schatten-ideal", "schur",
          "besov", "holder", "moduli-gap", "lipschitz-failure")
SLACK = 1e-6


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteConfig:
    """Parameters of one suite run.  ``None`` fields take suite defaults."""

    suite: str
    seed: int
    instances: int | None = None
    max_size: int = 12
    sigma_grid: tuple | None = None
    delta_grid: tuple | None = None
    h_grid: tuple | None = None
    orders: tuple | None = None
    functions: tuple | None = None
    out: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite '{self.suite}' (choose from {', '.join(SUITES)})", "suite")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer", "seed")
        if self.instances is not None and (not isinstance(self.instances, int) or self.instances < 0):
            raise ConfigError("instances must be a nonnegative integer", "instances")
        if not isinstance(self.max_size, int) or self.max_size < 1:
            raise ConfigError("max_size must be a positive integer", "max_size")
        for name in ("sigma_grid", "delta_grid", "h_grid"):
            grid = getattr(self, name)
            if grid is None:
                continue
            if (not isinstance(grid, (list, tuple)) or not grid
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                               and math.isfinite(v) and v > 0 for v in grid)):
                raise ConfigError(f"{name} must be a nonempty list of positive numbers", name)
            object.__setattr__(self, name, tuple(float(v) for v in grid))
        if self.orders is not None:
            if not self.orders or not all(isinstance(m, int) and m >= 1 for m in self.orders):
                raise ConfigError("orders must be a nonempty list of positive integers", "orders")
            object.__setattr__(self, "orders", tuple(self.orders))
        if self.functions is not None:
            if not all(isinstance(s, str) for s in self.functions):
                raise ConfigError("functions must be descriptor strings", "functions")
            for s in self.functions:
                try:
                    parse_function(s)
                except ValueError as exc:
                    raise ConfigError(str(exc), "functions") from exc
            object.__setattr__(self, "functions", tuple(self.functions))
        if not isinstance(self.options, dict):
            raise ConfigError("options must be an object", "options")


_FIELDS = {f for f in SuiteConfig.__dataclass_fields__}


def _line_of(text: str, key: str) -> int | None:
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def parse_config(text: str, overrides: dict | None = None) -> SuiteConfig:
    """Parse a JSON suite configuration; errors name the field and line."""
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object", line=1)
    for key in doc:
        if key not in _FIELDS:
            raise ConfigError(f"unknown field '{key}'", key, _line_of(text, key))
    for key, value in (overrides or {}).items():
        if value is not None:
            doc[key] = value
    if "suite" not in doc:
        raise ConfigError("missing suite name", "suite")
    if "seed" not in doc:
        raise ConfigError("a seed is required (determinism is mandatory)", "seed")
    try:
        return SuiteConfig(**doc)
    except ConfigError as exc:
        if exc.line is None and exc.field is not None:
            raise ConfigError(str(exc).split(" (field")[0], exc.field, _line_of(text, exc.field)) from None
        raise


def load_config(path, overrides: dict | None = None) -> SuiteConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), overrides)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class Assertion:
    name: str
    passed: bool
    detail: str = ""
    witness: int | None = None      # index into the witness bundle


@dataclass
class RunReport:
    suite: str
    seed: int | None
    assertions: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    worst_ratios: dict = field(default_factory=dict)
    bundles: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    wall_time: float = 0.0
    schema: str = REPORT_SCHEMA

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def check(self, name: str, passed: bool, detail: str = "", witness: int | None = None) -> bool:
        self.assertions.append(Assertion(name, bool(passed), detail, witness))
        return bool(passed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def summary_lines(self) -> list:
        lines = [f"{'PASS' if a.passed else 'FAIL'}  {a.name}  {a.detail}".rstrip() for a in self.assertions]
        lines.append(f"{self.suite}: {sum(a.passed for a in self.assertions)}/{len(self.assertions)} "
                     f"assertions passed in {self.wall_time:.2f}s")
        return lines


@dataclass
class SuiteResult:
    report: RunReport
    tables: dict = field(default_factory=dict)      # name -> (columns, rows)
    entries: list = field(default_factory=list)     # witness bundle entries

    def add_entry(self, entry: dict) -> int:
        self.entries.append(entry)
        return len(self.entries) - 1


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("OPMOD_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn: Callable, items) -> list:
    items = list(items)
    n = _threads()
    if n <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _rng(cfg: SuiteConfig, salt: int, i: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, salt, i])


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def _configured_functions(cfg: SuiteConfig, kind: type):
    """Functions named in ``cfg.functions``, or ``None`` to draw random ones.

    Instance ``i`` uses entry ``i mod len(functions)``.  Every descriptor must
    parse to ``kind`` (band-limited sums or trigonometric polynomials).
    """
    if cfg.functions is None:
        return None
    fs = [parse_function(d) for d in cfg.functions]
    for d, f in zip(cfg.functions, fs):
        if not isinstance(f, kind):
            raise ConfigError(f"suite {cfg.suite} needs {kind.__name__} descriptors, got '{d}'",
                              "functions")
    if kind is TrigPolynomial:
        fs = [f.normalized() for f in fs]
    return fs


def _suite_bernstein_scalar(cfg: SuiteConfig, res: SuiteResult) -> None:
    rep = res.report
    sigmas = cfg.sigma_grid or (1.0, 3.0)
    orders = cfg.orders or (1, 2, 3)
    count = 100 if cfg.instances is None else cfg.instances
    sharp_rows = []
    for s in sigmas:
        hs = np.array(cfg.h_grid) if cfg.h_grid else np.linspace(np.pi / s / 40, np.pi / s, 40)
        hs = hs[(hs > 0) & (hs <= np.pi / s)]
        f = BandLimitedFunction.exponential(s)
        for m in orders:
            ratios = [sup_norm(f.difference(h, m)) / beta(s, h) ** m for h in hs]
            lo, hi = min(ratios), max(ratios)
            sharp_rows.append((s, m, lo, hi))
            rep.check(f"sharpness[sigma={s:g},m={m}]", abs(lo - 1) <= 1e-9 and abs(hi - 1) <= 1e-9,
                      f"ratios in [{lo:.17g}, {hi:.17g}]")
    res.tables["sharpness"] = (("sigma", "m", "min_ratio", "max_ratio"), sharp_rows)
    fixed = _configured_functions(cfg, BandLimitedFunction)

    def one(i):
        rng = _rng(cfg, 1, i)
        s = float(rng.uniform(0.5, 4.0))
        f = BandLimitedFunction.random(rng, 5, s) if fixed is None else fixed[i % len(fixed)]
        s = f.sigma
        m = int(rng.choice(orders))
        hs = rng.uniform(0, np.pi / s, 8)
        ratios = [verify_scalar_bernstein(f, m, [h]) for h in hs]
        k = int(np.argmax(ratios))
        return f, m, float(hs[k]), float(ratios[k])

    rows = _pmap(one, range(count))
    if rows:
        worst = max(range(len(rows)), key=lambda i: rows[i][3])
        f, m, h, r = rows[worst]
        ok = r <= 1 + SLACK
        idx = res.add_entry(bnd.scalar_entry(f, m, h, r, ok))
        rep.worst_ratios["scalar_random"] = r
        rep.check("random-bandlimited-bound", ok, f"worst ratio {r:.12g} over {count} functions", idx)
        res.tables["random"] = (("index", "sigma", "m", "h", "ratio"),
                                [(i, f.sigma, m, h, r) for i, (f, m, h, r) in enumerate(rows)])


def _random_pair(rng, max_size):
    n = int(rng.integers(1, max_size + 1))
    A = random_hermitian(n, rng, float(rng.uniform(0.1, 4.0)))
    B = A + random_hermitian(n, rng, float(rng.exponential(0.7)))
    s = float(rng.uniform(0.25, 4.0))
    return n, A, B, s


def _suite_bernstein_operator(cfg: SuiteConfig, res: SuiteResult) -> None:
    rep = res.report
    count = 200 if cfg.instances is None else cfg.instances
    if count == 0:
        return
    fixed = _configured_functions(cfg, BandLimitedFunction)

    def pair_job(i):
        rng = _rng(cfg, 2, i)
        n, A, B, s = _random_pair(rng, cfg.max_size)
        f = BandLimitedFunction.random(rng, 5, s) if fixed is None else fixed[i % len(fixed)]
        nf = sup_norm(f)
        lhs, rhs = verify_operator_bernstein(f, A, B, nf)
        return f, A, B, lhs, rhs

    rows = _pmap(pair_job, range(count))
    ratios = [lhs / rhs if rhs > 0 else 0.0 for (_, _, _, lhs, rhs) in rows]
    k = int(np.argmax(ratios))
    f, A, B, lhs, rhs = rows[k]
    ok = all(l <= r * (1 + SLACK) + 1e-12 for (_, _, _, l, r) in rows)
    idx = res.add_entry(bnd.pair_entry(f, A, B, lhs, rhs, lhs <= rhs * (1 + SLACK) + 1e-12))
    rep.worst_ratios["operator_pair"] = ratios[k]
    rep.check("operator-bernstein", ok, f"worst lhs/rhs {ratios[k]:.12g} over {count} pairs", idx)

    # scalar instances reach equality for the exponential
    worst = 0.0
    for i in range(20):
        rng = _rng(cfg, 3, i)
        s = float(rng.uniform(0.25, 4.0))
        a = float(rng.uniform(-3, 3))
        b = a + float(rng.uniform(-np.pi / s, np.pi / s))
        lhs, rhs = verify_operator_bernstein(BandLimitedFunction.exponential(s), [[a]], [[b]])
        worst = max(worst, abs(lhs - rhs))
    rep.check("scalar-equality", worst <= 1e-9, f"max |lhs - rhs| = {worst:.3g}")

    def diff_job(i):
        rng = _rng(cfg, 4, i)
        n, A, B, s = _random_pair(rng, cfg.max_size)
        m = int(rng.integers(1, 5))
        f = BandLimitedFunction.random(rng, 5, s) if fixed is None else fixed[i % len(fixed)]
        lhs, rhs = verify_operator_bernstein_difference(f, A, B - A, m, sup_norm(f))
        return f, A, B - A, m, lhs, rhs

    drows = _pmap(diff_job, range(max(count // 2, 1)))
    dr = [l / r if r > 0 else 0.0 for (*_, l, r) in drows]
    k = int(np.argmax(dr))
    f, A, K, m, lhs, rhs = drows[k]
    ok = all(l <= r * (1 + SLACK) + 1e-12 for (*_, l, r) in drows)
    idx = res.add_entry(bnd.difference_entry(f, A, K, m, lhs, rhs, lhs <= rhs * (1 + SLACK) + 1e-12))
    rep.worst_ratios["higher_difference"] = dr[k]
    rep.check("higher-differences", ok, f"worst lhs/rhs {dr[k]:.12g} over {len(drows)} instances", idx)

    for p in (1.0, 2.0, 3.0, math.inf):
        def qc_job(i, p=p):
            rng = _rng(cfg, 5, i)
            n, A, B, s = _random_pair(rng, cfg.max_size)
            R = random_complex(n, n, rng)
            f = BandLimitedFunction.random(rng, 5, s) if fixed is None else fixed[i % len(fixed)]
            lhs, rhs = verify_quasicommutator_bernstein(f, A, B, R, p, sup_norm(f))
            return f, A, B, R, lhs, rhs

        qrows = _pmap(qc_job, range(max(count // 2, 1)))
        qr = [l / r if r > 0 else 0.0 for (*_, l, r) in qrows]
        k = int(np.argmax(qr))
        f, A, B, R, lhs, rhs = qrows[k]
        ok = all(l <= r * (1 + SLACK) + 1e-12 for (*_, l, r) in qrows)
        idx = res.add_entry(bnd.quasicommutator_entry(f, A, B, R, p, lhs, rhs,
                                                      lhs <= rhs * (1 + SLACK) + 1e-12))
        label = "inf" if math.isinf(p) else f"{p:g}"
        rep.worst_ratios[f"quasicommutator_S{label}"] = qr[k]
        rep.check(f"quasicommutator[S_{label}]", ok, f"worst lhs/rhs {qr[k]:.12g} over {len(qrows)} instances", idx)


def random_unitary_pair(rng, max_size):
    n = int(rng.integers(1, max_size + 1))
    U = random_unitary(n, rng)
    if rng.random() < 0.5:
        V = random_unitary(n, rng)
    else:
        H = random_hermitian(n, rng, float(rng.uniform(0.01, np.pi)))
        w, Q = np.linalg.eigh(H)
        V = (Q * np.exp(1j * w)) @ Q.conj().T @ U
    return U, V


def _suite_bernstein_unitary(cfg: SuiteConfig, res: SuiteResult) -> None:
    rep = res.report
    count = 100 if cfg.instances is None else cfg.instances
    if count == 0:
        return
    dmax = int(cfg.options.get("max_degree", 5))
    fixed = _configured_functions(cfg, TrigPolynomial)

    def job(i):
        rng = _rng(cfg, 6, i)
        U, V = random_unitary_pair(rng, cfg.max_size)
        f = TrigPolynomial.random(rng, int(rng.integers(1, dmax + 1)))
        if fixed is not None:
            f = fixed[i % len(fixed)]
        lhs, lin, sharp = verify_unitary_bernstein(f, U, V)
        A = unitary_log_arg(U, V)
        w, Q = np.linalg.eigh(A)
        eA = (Q * np.exp(1j * w)) @ Q.conj().T
        e1 = float(np.max(np.abs(eA @ U - V)))
        e2 = abs(2 * math.sin(opnorm(A) / 2) - opnorm(U - V))
        return f, U, V, lhs, lin, sharp, e1, e2, opnorm(A)

    rows = _pmap(job, range(count))
    r = [l / s if s > 0 else 0.0 for (_, _, _, l, _, s, *_) in rows]
    k = int(np.argmax(r))
    f, U, V, lhs, lin, sharp, *_ = rows[k]
    ok = all(l <= s * (1 + SLACK) + 1e-12 for (_, _, _, l, _, s, *_) in rows)
    chain = all(s <= li * (1 + SLACK) + 1e-12 for (_, _, _, _, li, s, *_) in rows)
    idx = res.add_entry(bnd.unitary_entry(f, U, V, lhs, lin, sharp, ok and chain))
    rep.worst_ratios["unitary_sharp"] = r[k]
    rep.check("unitary-sharp-bound", ok, f"worst lhs/sharp {r[k]:.12g}", idx)
    rep.check("unitary-chain", chain, "sharp bound <= d ||U - V||", idx)
    e1 = max(row[6] for row in rows)
    e2 = max(row[7] for row in rows)
    rep.check("log-arg-reconstruction", e1 <= 1e-8, f"max |e^(iA)U - V| = {e1:.3g}")
    rep.check("log-arg-chord", e2 <= 1e-8, f"max |2 sin(||A||/2) - ||U-V||| = {e2:.3g}")
    rep.check("log-arg-branch", max(row[8] for row in rows) <= np.pi + 1e-12, "||A|| <= pi")


def _suite_schatten(cfg: SuiteConfig, res: SuiteResult) -> None:
    rep = res.report
    count = 50 if cfg.instances is None else cfg.instances
    if count == 0:
        return
    splits = int(cfg.options.get("random_splits", 100))

    def job(i):
        rng = _rng(cfg, 7, i)
        rows_, cols_ = (int(x) for x in rng.integers(1, cfg.max_size + 1, 2))
        T = random_complex(rows_, cols_, rng) * float(rng.uniform(0.1, 5))
        out = []
        for l in range(min(T.shape)):
            T1, T2 = optimal_s1l_split(T, l)
            cost = split_cost(T1, T2, l)
            ky = kyfan_norm(T, 1, l)
            exact = float(np.max(np.abs(T1 + T2 - T)))
            worst_gap = math.inf
            for _ in range(splits):
                if rng.random() < 0.5:
                    S = random_complex(*T.shape, rng) * float(rng.exponential(1.0))
                else:
                    S = T1 + random_complex(*T.shape, rng) * float(rng.exponential(0.05))
                worst_gap = min(worst_gap, split_cost(S, T - S, l) - cost)
            out.append((T, l, T1, T2, cost, ky, exact, worst_gap))
        U, V = random_unitary(T.shape[0], rng), random_unitary(T.shape[1], rng)
        inv = max(abs(schatten_norm(U @ T @ V, p) - schatten_norm(T, p)) / max(1.0, schatten_norm(T, p))
                  for p in (1.0, 2.0, 3.0, math.inf))
        return out, inv

    results = _pmap(job, range(count))
    flat = [row for out, _ in results for row in out]
    err = [abs(c - k) / max(1.0, k) for (_, _, _, _, c, k, _, _) in flat]
    k = int(np.argmax(err))
    T, l, T1, T2, cost, ky, exact, _ = flat[k]
    ok = max(err) <= 1e-9 and all(row[6] <= 1e-12 * max(1.0, opnorm(row[0])) for row in flat)
    idx = res.add_entry(bnd.split_entry(T, l, T1, T2, cost, ky, ok))
    res.tables["splits"] = (("rows", "cols", "l", "cost", "kyfan", "best_random_gap"),
                            [(r[0].shape[0], r[0].shape[1], r[1], r[4], r[5], r[7]) for r in flat])
    rep.check("kyfan-split-attains", ok, f"max relative |cost - kyfan| = {max(err):.3g} over {len(flat)} (T, l)", idx)
    gap = min(row[7] for row in flat)
    rep.check("kyfan-split-optimal", gap >= -1e-9, f"min (random cost - optimal) = {gap:.3g}")
    inv = max(v for _, v in results)
    rep.check("unitary-invariance", inv <= 1e-9, f"max relative deviation {inv:.3g}")


def _suite_schur(cfg: SuiteConfig, res: SuiteResult) -> None:
    rep = res.report
    sizes = tuple(cfg.options.get("sizes", (4, 8, 16, 32, 64)))
    rows = []
    for i, n in enumerate(sizes):
        est = multiplier_norm_lower(sign_matrix(n), seed=cfg.seed)
        S = sign_matrix(n)
        idx = res.add_entry(bnd.ratio_entry(f"sign[{n}]", S * est.witness, est.witness, est.lower_bound))
        rows.append((n, est.lower_bound, math.log(n), idx))
    res.tables["sign_matrix"] = (("n", "lower_bound", "log_n"), [r[:3] for r in rows])
    lbs = [r[1] for r in rows]
    rep.check("sign-matrix-growth", all(b > a for a, b in zip(lbs, lbs[1:])),
              "lower bounds " + ", ".join(f"{b:.4f}" for b in lbs), rows[-1][3] if rows else None)
    if len(rows) >= 2:
        slope = np.polyfit([r[2] for r in rows], lbs, 1)[0]
        rep.constants["sign_matrix_log_slope"] = float(slope)
    worst = 0.0
    for i in range(8 if cfg.instances is None else cfg.instances):
        rng = _rng(cfg, 8, i)
        a = random_complex(int(rng.integers(1, 9)), 1, rng)[:, 0]
        b = random_complex(int(rng.integers(1, 9)), 1, rng)[:, 0]
        M = np.outer(a, b.conj())
        exact = float(np.max(np.abs(a)) * np.max(np.abs(b)))
        est = multiplier_norm_lower(M, seed=cfg.seed)
        worst = max(worst, abs(est.lower_bound - exact) / exact)
    rep.check("rank-one-exact", worst <= 1e-6, f"max relative error {worst:.3g}")


def _corpus(L: float, N: int):
    return [
        ("sqrt_abs_sin", SampledFunction.from_function(lambda x: np.abs(np.sin(x)) ** 0.5, L, N),
         ModulusFunction.power(0.5, 1)),
        ("abs_sin", SampledFunction.from_function(lambda x: np.abs(np.sin(x)), L, N),
         ModulusFunction.power(1.0, 2)),
        ("abs_sin_1.5", SampledFunction.from_function(lambda x: np.abs(np.sin(x)) ** 1.5, L, N),
         ModulusFunction.power(1.5, 2)),
        ("sin_3x", SampledFunction.from_function(lambda x: np.sin(3 * x), L, N),
         ModulusFunction.power(0.7, 1)),
        ("triangle", SampledFunction.from_function(lambda x: np.abs((x / np.pi) % 2 - 1), L, N),
         ModulusFunction.power(1.0, 2)),
    ]


def besov_constants(L: float = 4 * np.pi, N: int = 4096, n_range=range(-2, 9)):
    """Measured constants of the low-pass approximation and dyadic block bounds on the corpus."""
    bank = build_kernel_bank()
    out = []
    for name, f, om in _corpus(L, N):
        norm = lambda_omega_norm(f, om)
        c_app = c_blk = 0.0
        for n in n_range:
            scale = om(2.0 ** -n) * norm
            c_app = max(c_app, np.max(np.abs(f.values - vn_approx(f, n, bank).values)) / scale)
            pos, neg = dyadic_block(f, n, bank)
            c_blk = max(c_blk, max(pos.sup_norm(), neg.sup_norm()) / scale)
        out.append((name, om.order, float(norm), float(c_app), float(c_blk)))
    return out


def _suite_besov(cfg: SuiteConfig, res: SuiteResult) -> None:
    rep = res.report
    bank = build_kernel_bank()
    x = np.geomspace(2.0 ** -18, 2.0 ** 18, 20001)
    pou = float(np.max(np.abs(sum(bank.w(x / 2.0 ** n) for n in range(-20, 21)) - 1)))
    rep.check("partition-of-unity", pou <= 1e-12, f"max deviation {pou:.3g}")
    L, N = 4 * np.pi, int(cfg.options.get("N", 4096))
    worst_rec = worst_id = 0.0
    for i in range(5 if cfg.instances is None else cfg.instances):
        rng = _rng(cfg, 9, i)
        f = SampledFunction(L, N, random_complex(N, 1, rng)[:, 0])
        worst_rec = max(worst_rec, float(np.max(np.abs(reconstruct(f, bank).values - f.values))))
        g = SampledFunction.from_function(lambda t: np.abs(np.sin(t + rng.uniform())) ** 0.5, L, N)
        for m in (1, 2, 3):
            for s in (1, 3, 17):
                lhs = difference_values(g, 2 * s, m)
                rhs = sum(math.comb(m, j) * difference_values(g, s, m)[j * s: j * s + lhs.size]
                          for j in range(m + 1))
                worst_id = max(worst_id, float(np.max(np.abs(lhs - rhs))))
    rep.check("reconstruction", worst_rec <= 1e-8, f"max error {worst_rec:.3g}")
    rep.check("double-step-identity", worst_id <= 1e-10, f"max error {worst_id:.3g}")
    rows = besov_constants(L, N)
    res.tables["constants"] = (("function", "order", "lambda_omega_norm", "c_lowpass", "c_block"), rows)
    c_app = max(r[3] for r in rows)
    c_blk = max(r[4] for r in rows)
    rep.constants["c_lowpass"] = c_app
    rep.constants["c_block"] = c_blk
    rep.check("lowpass-constant", c_app <= 50, f"measured c = {c_app:.4g}")
    rep.check("block-constant", c_blk <= 50, f"measured c = {c_blk:.4g}")
    err = 0.0
    for alpha, m in ((0.25, 1), (0.5, 1), (0.9, 1), (1.5, 2), (2.5, 3)):
        for xx in (1e-3, 0.1, 1.0, 7.0):
            v = omega_star(ModulusFunction.power(alpha, m), m, xx)
            err = max(err, abs(v - xx ** alpha / (m - alpha)))
    rep.check("omega-star-closed-form", err <= 1e-8, f"max error {err:.3g}")


def holder_experiment(seed: int, count: int = 20, n: int = 12, L: float = 8.0, N: int = 2 ** 13,
                      exponents=range(1, 9)):
    """Differences of ``|t|^(1/2)`` and dyadic term sums over ``K = 2^-k K_0``.

    Returns per instance ``(slope, c)``: the log-log slope of
    ``||f(A+K) - f(A)||`` against ``||K||`` and ``max_k sum_n ||Delta f_n|| / ||K||^(1/2)``.
    """
    cut = lambda x: 1 - smooth_step((np.abs(x) - 3.0) / 3.0)
    fs = SampledFunction.from_function(lambda x: np.sqrt(np.abs(x)) * cut(x), L, N)
    p = power_function(0.5)
    bank = build_kernel_bank()
    ts = 2.0 ** -np.asarray(list(exponents), dtype=float)

    def job(i):
        rng = np.random.default_rng([seed, 10, i])
        lam = np.concatenate([[0.0], rng.uniform(-1, 1, n - 1)])
        U = random_unitary(n, rng)
        A = (U * lam) @ U.conj().T
        A = 0.5 * (A + A.conj().T)
        K0 = random_hermitian(n, rng)
        d = np.array([opnorm(finite_difference(p, A, t * K0, 1)) for t in ts])
        s = np.array([sum(litpaley_finite_difference(fs, A, t * K0, 1, bank)[1]) for t in ts])
        slope = float(np.polyfit(np.log(ts), np.log(d), 1)[0])
        return slope, float(np.max(s / np.sqrt(ts)))

    return _pmap(job, range(count))


def _suite_holder(cfg: SuiteConfig, res: SuiteResult) -> None:
    rep = res.report
    count = 20 if cfg.instances is None else cfg.instances
    if count == 0:
        return
    rows = holder_experiment(cfg.seed, count, min(cfg.max_size, 12))
    slopes = [r[0] for r in rows]
    cs = np.array([r[1] for r in rows])
    med = float(np.median(cs))
    spread = (float(cs.min() / med), float(cs.max() / med))
    rep.constants["holder_c_median"] = med
    rep.constants["holder_c_spread"] = list(spread)
    res.tables["holder"] = (("instance", "slope", "c"), [(i, s, c) for i, (s, c) in enumerate(rows)])
    rep.check("holder-slope", min(slopes) >= 0.45, f"min slope {min(slopes):.4f}")
    rep.check("holder-constant-stable", 0.8 <= spread[0] and spread[1] <= 1.2,
              f"c/median in [{spread[0]:.3f}, {spread[1]:.3f}], median {med:.4f}")


def _suite_moduli_gap(cfg: SuiteConfig, res: SuiteResult) -> None:
    rep = res.report
    sigma = (cfg.sigma_grid or (1.0,))[0]
    deltas = cfg.delta_grid or tuple(np.array([0.25, 0.5, 1.0, 1.5, 2.0, 2.5]) / sigma)
    if cfg.instances == 0:
        return
    budget = 24 if cfg.instances is None else cfg.instances
    o = cfg.options
    demo = gap_demo(sigma, deltas, N=int(o.get("N", 4096)), eps=float(o.get("eps", 0.05)),
                    q=int(o.get("q", 64)), budget=budget, seed=cfg.seed, workers=_threads())
    res.tables["gap"] = (demo.COLUMNS, demo.table())
    desc = f"exp_i:{sigma!r}"
    f = parse_function(desc)
    for w in demo.pair_estimate.witnesses:
        res.add_entry(bnd.modulus_entry(w, desc))
    flat_idx = [res.add_entry(bnd.modulus_entry(w, desc)) for w in demo.flat_witnesses]
    excess = max(r.omega_lower_pair - r.omega_upper_pair for r in demo.rows)
    rep.worst_ratios["pair_excess"] = excess
    rep.check("pair-below-sine-bound", excess <= 1e-6, f"max(lower - 2 sin(sigma delta/2)) = {excess:.3g}")
    bad = [v for w in demo.flat_witnesses for v in w.violations()]
    bad += demo.pair_estimate.check(f)
    rep.check("witnesses-valid", not bad, "; ".join(bad[:3]))
    k = int(np.argmin(np.abs(np.asarray(deltas) * sigma - 2.0)))
    row = demo.rows[k]
    gap = row.flat_lower - row.omega_upper_pair
    rep.constants["commutator_lower_at_2"] = row.flat_lower
    rep.check("commutator-beats-pair", row.flat_lower >= 1.80 and gap >= 0.11,
              f"delta={row.delta:g}: commutator lower {row.flat_lower:.6f}, pair value "
              f"{row.omega_upper_pair:.6f}, gap {gap:.4f}", flat_idx[k])
    over = max(r.flat_lower - r.flat_exact for r in demo.rows)
    rep.check("commutator-below-exact", over <= 1e-6, f"max(lower - min(2, sigma delta)) = {over:.3g}")
    c1 = estimate_modulus(f, "c1", deltas, budget=max(budget // 2, 1), seed=cfg.seed, workers=_threads())
    over1 = max(float(b) - min(2.0, sigma * d) for b, d in zip(c1.lower_bounds, deltas))
    rep.check("c1-search-below-exact", over1 <= 1e-6, f"max excess {over1:.3g}")
    mono = monotonicity_check(f, "c1", deltas, c1)
    rep.check("rescaled-witnesses-valid", mono.all_valid and mono.nonincreasing,
              f"{len(mono.refinements)} rescalings, {sum(r.improves for r in mono.refinements)} improvements")


def _suite_lipschitz_failure(cfg: SuiteConfig, res: SuiteResult) -> None:
    rep = res.report
    sizes = tuple(cfg.options.get("sizes", (4, 8, 16, 32)))
    rows = []
    ok_gap = ok_dd = True
    for n in sizes:
        inst = geometric_diag_instance(n)
        lhs, rhs = inst.quasicommutators()
        r = inst.ratio()
        idx = res.add_entry(bnd.ratio_entry(f"geometric[{n}]", lhs, rhs, r))
        rows.append((n, r, idx))
        ok_gap &= inst.gap_conditions()
        j = np.arange(n)
        bound = 4.0 * 2.0 ** -np.maximum.outer(j, j)
        ok_dd &= bool(np.all(np.abs(inst.divided_differences() - sign_matrix(n).real) <= bound))
    res.tables["geometric"] = (("n", "ratio"), [r[:2] for r in rows])
    rep.check("gap-conditions", ok_gap, "")
    rep.check("divided-differences-near-sign", ok_dd, "|m_jk - sgn| <= 4 * 2^-max(j,k)")
    ratio = {n: r for n, r, _ in rows}
    if 8 in ratio and 32 in ratio:
        rep.constants["geometric_ratio_32"] = ratio[32]
        rep.check("ratio-grows", ratio[32] > ratio[8] and ratio[32] > 1.5,
                  f"n=8: {ratio[8]:.6f}, n=32: {ratio[32]:.6f}", rows[sizes.index(32)][2])


_RUNNERS = {
    "bernstein-scalar": _suite_bernstein_scalar,
    "bernstein-operator": _suite_bernstein_operator,
    "bernstein-unitary": _suite_bernstein_unitary,
    "schatten-ideal": _suite_schatten,
    "schur": _suite_schur,
    "besov": _suite_besov,
    "holder": _suite_holder,
    "moduli-gap": _suite_moduli_gap,
    "lipschitz-failure": _suite_lipschitz_failure,
}


def run_suite(cfg: SuiteConfig) -> SuiteResult:
    """Run a suite; an explicit ``instances: 0`` yields an empty, passing report."""
    res = SuiteResult(RunReport(cfg.suite, cfg.seed))
    t0 = time.perf_counter()
    if cfg.instances != 0:
        _RUNNERS[cfg.suite](cfg, res)
    res.report.wall_time = time.perf_counter() - t0
    return res


def replay_bundle(doc: dict) -> RunReport:
    """Recompute every entry of a witness bundle."""
    rep = RunReport("replay", doc.get("seed"))
    t0 = time.perf_counter()
    for i, entry in enumerate(doc.get("entries", [])):
        r = bnd.replay_entry(i, entry)
        status = "" if r.holds is None else (" [inequality holds]" if r.holds else " [inequality fails]")
        rep.check(f"entry[{i}] {r.kind}", r.reproduced, r.detail + status, i)
    rep.wall_time = time.perf_counter() - t0
    return rep
