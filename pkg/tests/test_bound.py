import math
from fractions import Fraction

import gmpy2
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lionman.bound import RateParams, choose_eps, choose_N, compute_omega, psi_iterate
from lionman.errors import InvalidInputError
from lionman.logreal import LogReal
from lionman.moduli import ModuliBundle, theta_from_phi

import oracles


@pytest.mark.parametrize("D, b, N", [(1, 1, 3), (0.1, 2, 31), (10, 1, 1), (0.5, 0.5, 4), (0.3, 0.9, 7)])
def test_choose_N_examples(D, b, N):
    assert choose_N(D, b) == N
    assert choose_N(D, b) == oracles.smallest_N(D, b)


@given(st.floats(min_value=0.01, max_value=5.0), st.floats(min_value=0.01, max_value=10.0))
def test_choose_N_is_smallest(D, b):
    assert choose_N(D, b) == oracles.smallest_N(D, b)


def test_choose_eps_examples():
    assert choose_eps(1, 4, 3) == pytest.approx(1 / 3, rel=1e-15)
    assert choose_eps(31, 0.1, 0.01) == 0.01 / 3
    assert choose_eps(31, 0.1, 1e300) == min(1 / 93, 0.025)


def test_rate_params_validation():
    with pytest.raises(InvalidInputError):
        RateParams(D=0.1, b=2, N=30, alpha=0.01, eps=1e-3)  # 30 * 0.1 = 3 is not > 3
    with pytest.raises(InvalidInputError):
        RateParams(D=0.1, b=2, N=31, alpha=0.01, eps=0.1)
    with pytest.raises(InvalidInputError):
        RateParams.extremal(1.0, 0.5, 0.1)
    p = RateParams.extremal(0.1, 2, 0.01)
    assert (p.N, p.eps) == (31, 0.01 / 3)


def test_psi_iterate_trivial_cases():
    bundle = ModuliBundle.from_family("lp:2", 2.0)
    assert psi_iterate(bundle, 0.3, 0).to_real() == pytest.approx(0.3, rel=1e-15)
    assert psi_iterate(bundle, 0.3, 1).to_real() == pytest.approx(bundle.psi(0.3), rel=1e-13)
    with pytest.raises(InvalidInputError):
        psi_iterate(bundle, 0.3, -1)


def test_psi_iterate_matches_exact_rationals():
    bundle = ModuliBundle.from_family("lp:2", 2.0)
    got = psi_iterate(bundle, 1 / 300, 5).log10()
    exact = oracles.mpq_log10(oracles.psi_iterate_exact(2, Fraction(1, 300), 2, 5))
    assert got == pytest.approx(exact, rel=1e-6)


def test_psi_iterate_strictly_decreasing_in_N():
    bundle = ModuliBundle.from_family("lp:3", 1.0)
    logs = [psi_iterate(bundle, 0.05, n).log for n in range(8)]
    assert all(a > b for a, b in zip(logs, logs[1:]))


def test_compute_omega_small_case_exact():
    bundle = ModuliBundle.from_family("lp:2", 1.0)
    result = compute_omega(bundle, 1, 1, 1)
    N, eps, gamma = oracles.gamma_exact(2, 1, 1, 1)
    assert result.N == N == 3
    assert result.log10_gamma == pytest.approx(oracles.mpq_log10(gmpy2.mpq(gamma)), rel=1e-6)
    assert result.ceiling_approximated


def test_compute_omega_exact_when_representable():
    # a linear toy modulus keeps the quotient below 2**53 so the ceiling is exact
    phi = lambda e, b: e / 1.25
    theta = lambda e, a, b: theta_from_phi(phi, e, a, b)
    bundle = ModuliBundle(phi=phi, theta=theta, b=4.0)
    result = compute_omega(bundle, 4.0, 4.0, 100.0)
    assert result.N == 2 and result.eps == 1 / 6
    assert not result.ceiling_approximated
    e = Fraction(1, 6)
    for _ in range(2):

        e = oracle_toy_psi(e)
    expected = 2 + 2 * math.ceil(Fraction(4) / (e / Fraction(5, 4)))
    assert result.exact_omega == expected
    assert (result.exact_omega - result.N) % result.N == 0


def oracle_toy_psi(e):
    phi = lambda x: x / Fraction(5, 4)
    inner = phi(phi(e / 2) / 2)
    theta = min(e, phi(e / 24 * inner)) / 2
    return phi(theta) / 2


def test_compute_omega_headline_against_high_precision_oracle():
    bundle = ModuliBundle.from_family("lp:2", 2.0)
    result = compute_omega(bundle, 0.1, 2, 0.01)
    N, eps, log_gamma, log_omega = oracles.omega_mpmath(2, 0.1, 2, 0.01)
    assert (result.N, result.eps) == (31, 0.01 / 3)
    assert float(eps) == pytest.approx(1 / 300, rel=1e-15)
    assert result.log10_omega == pytest.approx(log_omega, rel=1e-6)
    assert result.log10_gamma == pytest.approx(log_gamma, rel=1e-6)
    again = compute_omega(ModuliBundle.from_family("lp:2", 2.0), 0.1, 2, 0.01)
    assert again.omega.log == result.omega.log
    assert again.to_dict() == result.to_dict()


def test_compute_omega_degenerate_domain():
    bundle = ModuliBundle.from_family("lp:2", 0.5)
    result = compute_omega(bundle, 0.5, 0.5, 100.0)
    assert result.N == choose_N(0.5, 0.5)
    assert math.isfinite(result.log10_omega)


def test_compute_omega_rejects_bad_parameters():
    with pytest.raises(InvalidInputError):
        compute_omega(ModuliBundle.from_family("lp:2", 0.05), 0.1, 0.05, 0.01)
    with pytest.raises(InvalidInputError):
        compute_omega(ModuliBundle.from_family("lp:2", 3.0), 0.1, 2, 0.01)
    with pytest.raises(InvalidInputError):
        compute_omega(ModuliBundle.from_family("lp:2", 2.0), 0.1, 2, 0.0)


@pytest.mark.parametrize("family", ["lp:2", "lp:1.5", "lp:3", "hilbert"])
def test_omega_monotone_in_alpha(family):
    bundle = ModuliBundle.from_family(family, 2.0)
    alphas = np.geomspace(1.0, 1e-4, 12)
    logs = [compute_omega(bundle, 0.5, 2.0, a).omega.log for a in alphas]
    assert all(b >= a for a, b in zip(logs, logs[1:]))


@given(st.floats(min_value=0.05, max_value=1.0), st.floats(min_value=1.0, max_value=3.0),
       st.floats(min_value=1e-3, max_value=1.0))
def test_omega_at_least_N(D, b, alpha):
    result = compute_omega(ModuliBundle.from_family("lp:2", b), D, b, alpha)
    assert result.omega >= LogReal.from_real(result.N)
    assert result.covers(result.N)
    assert (result.omega.log - (result.gamma + result.N).log) == 0
