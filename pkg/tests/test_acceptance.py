"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line; run with
``pytest -m acceptance -s`` to see them.
"""
import numpy as np
import pytest

from opmod.bernstein import BandLimitedFunction
from opmod.funcalc import finite_difference, litpaley_finite_difference, split_finite_difference
from opmod.linalg_core import opnorm, random_hermitian
from opmod.moduli import geometric_diag_instance
from opmod.suites import SuiteConfig, run_suite

pytestmark = pytest.mark.acceptance

SEED = 20241015


def _verdict(number, title, checks):
    """Print one line for the criterion and fail the test on any failed check."""
    failed = [(name, detail) for name, ok, detail in checks if not ok]
    status = "PASS" if not failed else "FAIL"
    detail = "; ".join(f"{n}: {d}" for n, _, d in checks if d)
    print(f"\n{status} criterion {number}: {title} -- {detail}")
    assert not failed, failed


def _suite_checks(suite, names=None, **kw):
    report = run_suite(SuiteConfig(suite, SEED, **kw)).report
    checks = [(a.name, a.passed, a.detail) for a in report.assertions
              if names is None or any(a.name.startswith(n) for n in names)]
    assert checks, f"suite {suite} produced no matching assertions"
    return checks


def test_criterion_01_scalar_bernstein():
    _verdict(1, "scalar Bernstein sharpness and random band-limited bound",
             _suite_checks("bernstein-scalar", instances=100))


def test_criterion_02_operator_bernstein():
    checks = _suite_checks("bernstein-operator", ["operator-bernstein", "scalar-equality"],
                           instances=200, max_size=12)
    _verdict(2, "operator Bernstein on 200 Hermitian pairs", checks)


# The operator suite runs ``instances // 2`` higher-difference and quasicommutator
# instances, so 200 pairs give the 100 instances of criteria 3 and 4.
def test_criterion_03_higher_differences():
    checks = _suite_checks("bernstein-operator", ["higher-differences"], instances=200, max_size=12)
    _verdict(3, "higher-order operator differences", checks)


def test_criterion_04_quasicommutators():
    checks = _suite_checks("bernstein-operator", ["quasicommutator"], instances=200, max_size=12)
    assert len(checks) == 4
    _verdict(4, "quasicommutator bound in S_1, S_2, S_3, S_inf", checks)


def test_criterion_05_unitary_bernstein():
    _verdict(5, "unitary Bernstein and logarithm identities",
             _suite_checks("bernstein-unitary", instances=100))


def test_criterion_06_kyfan_split():
    _verdict(6, "Ky Fan split attains the S_1^l norm",
             _suite_checks("schatten-ideal", ["kyfan-split"], instances=50,
                           options={"random_splits": 100}))


def test_criterion_07_modulus_gap():
    checks = _suite_checks("moduli-gap", ["pair-below-sine-bound", "commutator-beats-pair",
                                          "witnesses-valid"],
                           sigma_grid=[1.0], delta_grid=[0.5, 1.0, 2.0],
                           options={"N": 4096, "eps": 0.05})
    _verdict(7, "pair modulus below 2 sin 1, commutator construction above 1.80", checks)


def test_criterion_08_lipschitz_failure():
    r8 = geometric_diag_instance(8).ratio()
    r32 = geometric_diag_instance(32).ratio()
    _verdict(8, "|t| quasicommutator ratio grows with n",
             [("ratio", r32 > r8 and r32 > 1.5, f"n=8 {r8:.6f}, n=32 {r32:.6f}")])


def test_criterion_09_holder_scaling():
    _verdict(9, "Hoelder scaling for |t|^(1/2)", _suite_checks("holder", instances=20))


def test_criterion_10_besov_machinery():
    _verdict(10, "Littlewood-Paley and Besov machinery", _suite_checks("besov"))


def test_criterion_11_definition_consistency():
    rng = np.random.default_rng([SEED, 11])
    worst_lp, worst_split, worst_n = 0.0, 0.0, 0.0
    for _ in range(50):
        n = int(rng.integers(1, 9))
        sigma = float(rng.uniform(0.5, 8.0))
        f = BandLimitedFunction.random(rng, 5, sigma)
        A = random_hermitian(n, rng, float(rng.uniform(0.5, 4.0)))
        K = random_hermitian(n, rng, float(rng.uniform(0.05, 1.0)))
        m = int(rng.integers(1, 5))
        direct = finite_difference(f, A, K, m)
        series, _ = litpaley_finite_difference(f, A, K, m)
        splits = [split_finite_difference(f, A, K, m, N=N) for N in range(-3, 7)]
        worst_lp = max(worst_lp, opnorm(series - direct))
        worst_split = max(worst_split, opnorm(splits[-1] - series))
        worst_n = max(worst_n, max(opnorm(s - splits[0]) for s in splits))
    _verdict(11, "difference definitions agree on 50 band-limited instances", [
        ("direct-vs-series", worst_lp <= 1e-6, f"{worst_lp:.3g}"),
        ("series-vs-split", worst_split <= 1e-6, f"{worst_split:.3g}"),
        ("split-N-independent", worst_n <= 1e-6, f"{worst_n:.3g}"),
    ])
