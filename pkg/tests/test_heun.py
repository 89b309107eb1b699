import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monopole_qes.heun import (
    RadialParameters,
    angular_index,
    assemble_wavefunction,
    exponents,
    heun_parameters,
    kappa_to_constraint,
    radial_parameters,
    recurrence_step,
    select_kappa_root,
    seed_coefficient,
    series_coefficients,
    truncated_solution,
    truncation_kappa_roots,
    truncation_polynomial,
)
from monopole_qes.model import (
    ConfigurationError,
    DefectGeometry,
    FluxField,
    NonPhysicalError,
    PotentialSpec,
    UnsupportedRegimeError,
)
from monopole_qes.oracle import count_nodes


def test_radial_parameters_flat_zero_offset():
    spec = PotentialSpec.mie_oscillator(beta=0.5, v0=0.3)
    rp = radial_parameters(spec, DefectGeometry(), 0, FluxField(), energy=0.3)
    assert rp.lam == 0.0
    assert rp.gamma2 == 1.0
    assert rp.gamma_m2 == 0.0


def test_radial_parameters_curved_coupling():
    spec = PotentialSpec.mie_oscillator(beta=1.0, beta_m2=1.0)
    rp = radial_parameters(spec, DefectGeometry(0.75), 1, FluxField(0.75))
    # (0.25 * 1.25 + 2) / 0.5625
    assert rp.gamma_m2 == pytest.approx((0.3125 + 2.0) / 0.5625, rel=1e-14)
    assert rp.gamma_m2 == pytest.approx(4.11111, abs=1e-5)


def test_radial_parameters_linear_term():
    spec = PotentialSpec.general(beta=1.0, beta1=1.0)
    assert radial_parameters(spec, DefectGeometry(), 0, FluxField()).gamma1 == 2.0


def test_radial_parameters_requires_confinement():
    with pytest.raises(UnsupportedRegimeError):
        radial_parameters(PotentialSpec.general(beta=0.0), DefectGeometry(), 0, FluxField())


def test_heun_parameters_examples():
    # s-wave flat space
    hp = heun_parameters(RadialParameters(0.0, 1.0, 0.0, 0.0, 0.0))
    assert hp.j == 0.5
    assert hp.chi == 0.0
    # flat Coulomb with eta_c = 1, omega = 1
    spec = PotentialSpec.coulomb(1.0, omega=1.0)
    hp = heun_parameters(radial_parameters(spec, DefectGeometry(), 0, FluxField()))
    assert hp.kappa == -2.0


def test_angular_index_complex():
    assert angular_index(-0.25) == 0.0
    with pytest.raises(NonPhysicalError):
        angular_index(-0.3)


def test_exponents():
    ex = exponents(1.5, 0.8)
    assert (ex.a, ex.b, ex.c) == (2.0, 0.5, 0.4)
    assert exponents(0.5).c == 0.0


def test_recurrence_n1_example():
    j, kappa = 0.5, 2.0
    d1 = seed_coefficient(j, kappa)
    assert d1 == 1.0
    d2 = recurrence_step(j, kappa, 0.0, 2.0, 1.0, d1, 0)
    # (kappa d1 - 2 d0) / (4 (1 + j))
    assert d2 == pytest.approx((kappa * d1 - 2.0) / (4.0 * (1.0 + j)), abs=1e-15)
    assert d2 == 0.0


def test_recurrence_n2_example():
    d = series_coefficients(0.5, 2.0 * math.sqrt(5.0), 0.0, 4.0, 4)
    assert abs(d[3]) < 1e-14 * max(abs(c) for c in d)


@settings(max_examples=30, deadline=None)
@given(j=st.floats(0.0, 8.0), trunc=st.sampled_from([2.0, 4.0, 6.0, 3.3]))
def test_parity_of_series(j, trunc):
    d = series_coefficients(j, 0.0, 0.0, trunc, 12)
    assert all(c == 0.0 for c in d[1::2])


def test_truncation_polynomial_degree():
    for n in range(1, 6):
        assert truncation_polynomial(n, 0.7).degree() == n + 1
    with pytest.raises(ConfigurationError):
        truncation_polynomial(0, 0.5)


@pytest.mark.parametrize(
    "n, j, expected",
    [
        (1, 0.5, [-2.0, 2.0]),
        (2, 0.5, [-2.0 * math.sqrt(5.0), 2.0 * math.sqrt(5.0)]),
    ],
)
def test_kappa_roots_low_orders(n, j, expected):
    np.testing.assert_allclose(truncation_kappa_roots(n, j), expected, rtol=1e-13)


def test_kappa_roots_with_linear_term():
    # d2 = 0 with chi = 1, j = 1/2 reduces to kappa^2 + 3 kappa - 2 = 0
    roots = truncation_kappa_roots(1, 0.5, 1.0)
    np.testing.assert_allclose(roots, sorted(np.roots([1.0, 3.0, -2.0]).real), rtol=1e-13)


@settings(max_examples=40, deadline=None)
@given(j=st.floats(0.0, 6.0), chi=st.floats(-3.0, 3.0))
def test_kappa_roots_n1_quadratic(j, chi):
    # (kappa + chi (j + 3/2)) (kappa + chi (j + 1/2)) = 2 (1 + 2 j), expanded by hand
    coeffs = [1.0, chi * (2.0 * j + 2.0), chi**2 * (j + 1.5) * (j + 0.5) - 2.0 * (1.0 + 2.0 * j)]
    expected = sorted(np.roots(coeffs).real)
    np.testing.assert_allclose(truncation_kappa_roots(1, j, chi), expected, rtol=1e-11, atol=1e-12)


def test_kappa_roots_zero_root_handling():
    assert 0.0 not in truncation_kappa_roots(2, 0.5)
    assert 0.0 in truncation_kappa_roots(2, 0.5, include_zero=True)
    assert len(truncation_kappa_roots(4, 1.0)) == 4


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 5), j=st.floats(0.0, 10.0), chi=st.sampled_from([0.0, 0.5, -1.2]))
def test_roots_come_in_pairs_without_linear_term(n, j, chi):
    roots = truncation_kappa_roots(n, j, chi)
    assert len(roots) >= 1
    if chi == 0.0:
        np.testing.assert_allclose(roots, [-r for r in reversed(roots)], rtol=1e-10, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 5), j=st.floats(0.0, 10.0), chi=st.sampled_from([0.0, 0.7, -0.4]))
def test_truncation_certificate(n, j, chi):
    for kappa in truncation_kappa_roots(n, j, chi):
        sol = truncated_solution(n, j, kappa, chi)
        assert sol.certificate() <= 1e-10
        assert all(math.isfinite(c) for c in sol.coeffs)
        assert sol.coeffs[0] == 1.0


def test_select_kappa_root():
    roots = [-3.0, -1.0, 0.5, 2.0]
    assert select_kappa_root(roots, 1.0) == 2.0
    assert select_kappa_root(roots, -1.0) == -3.0
    with pytest.raises(NonPhysicalError):
        select_kappa_root([-1.0], 1.0)
    with pytest.raises(ConfigurationError):
        select_kappa_root(roots, 0.0)


def test_kappa_to_constraint_mie():
    spec = PotentialSpec.mie_oscillator(beta=9.0, beta_m1=1.0)
    beta = kappa_to_constraint(2.0, "beta", spec, DefectGeometry())
    # M^3 beta_m1^4 / (2 alpha^6 (j + 1/2)^2) at j = 1/2
    assert beta == pytest.approx(0.5, rel=1e-14)


def test_kappa_to_constraint_kratzer():
    spec = PotentialSpec.kratzer(1.0, 1.0)
    varsigma = 1.5  # sqrt(2 + 1/4)
    omega = kappa_to_constraint(-2.0 * math.sqrt(varsigma + 0.5), "omega", spec, DefectGeometry())
    assert omega == pytest.approx(4.0 / (1.5 + 0.5), rel=1e-13)


def test_kappa_to_constraint_coulomb():
    spec = PotentialSpec.coulomb(1.0)
    omega = kappa_to_constraint(-2.0, "omega", spec, DefectGeometry())
    assert omega == pytest.approx(1.0, rel=1e-14)


def test_kappa_to_constraint_beta_m1():
    spec = PotentialSpec.general(beta=0.5, beta1=1.0)
    # gamma2 = 1, k = 2
    assert kappa_to_constraint(-1.3, "beta_m1", spec, DefectGeometry()) == pytest.approx(-0.65)


@pytest.mark.parametrize(
    "spec, kappa, tag",
    [
        (PotentialSpec.mie_oscillator(1.0, beta_m1=0.0), 2.0, "beta"),
        (PotentialSpec.mie_oscillator(1.0, beta_m1=1.0), -2.0, "beta"),
        (PotentialSpec.mie_oscillator(1.0, beta_m1=1.0), 2.0, "gamma"),
    ],
)
def test_kappa_to_constraint_errors(spec, kappa, tag):
    with pytest.raises(ConfigurationError):
        kappa_to_constraint(kappa, tag, spec, DefectGeometry())


def _flat_rp():
    return RadialParameters(0.0, 1.0, 0.0, 0.0, 0.0)


def test_wavefunction_attractive_branch_has_node():
    sol = truncated_solution(1, 0.5, -2.0)
    assert sol.coeffs == (1.0, -1.0)
    psi = assemble_wavefunction(sol, _flat_rp())
    x = np.linspace(1e-3, 8.0, 4001)
    np.testing.assert_allclose(psi(x), x * np.exp(-x * x / 2) * (1 - x), atol=1e-15)
    assert count_nodes(psi(x)) == 1
    assert psi(1.0) == pytest.approx(0.0, abs=1e-15)


def test_wavefunction_repulsive_branch_nodeless():
    sol = truncated_solution(1, 0.5, 2.0)
    # d1 = d0 / sqrt(j + 1/2) at j = 1/2
    assert sol.coeffs[1] == pytest.approx(1.0 / math.sqrt(1.0))
    psi = assemble_wavefunction(sol, _flat_rp())
    assert count_nodes(psi(np.linspace(1e-3, 8.0, 2001))) == 0


def test_wavefunction_normalization():
    sol = truncated_solution(2, 1.2, truncation_kappa_roots(2, 1.2)[-1])
    psi = assemble_wavefunction(sol, RadialParameters(0.0, 2.3, 0.0, 0.0, 0.0), normalize=True)
    r = np.linspace(0.0, 12.0, 200001)
    assert np.trapezoid(psi(r) ** 2, r) == pytest.approx(1.0, rel=1e-8)


def test_wavefunction_without_linear_term_has_no_linear_exponent():
    spec = PotentialSpec.mie_oscillator(1.0, 1.0, 1.0)
    hp = heun_parameters(radial_parameters(spec, DefectGeometry(0.6), 1, FluxField(0.3)))
    assert exponents(hp.j, hp.chi).c == 0.0


@settings(max_examples=50, deadline=None)
@given(
    mass=st.floats(0.2, 5.0),
    alpha=st.floats(0.1, 1.0),
    beta=st.floats(0.05, 10.0),
    beta1=st.floats(0.05, 10.0),
)
def test_chi_consistency(mass, alpha, beta, beta1):
    spec = PotentialSpec.general(beta=beta, beta1=beta1, beta_m2=0.3)
    hp = heun_parameters(radial_parameters(spec, DefectGeometry(alpha, mass), 0, FluxField()))
    display = (2.0 * mass * beta1**4 / (alpha**2 * beta**3)) ** 0.25
    assert hp.chi == pytest.approx(display, rel=1e-13)
    neg = PotentialSpec.general(beta=beta, beta1=-beta1)
    hp_neg = heun_parameters(radial_parameters(neg, DefectGeometry(alpha, mass), 0, FluxField()))
    assert hp_neg.chi == pytest.approx(-display, rel=1e-13)


def _second_derivative(f, x):
    """Centred differences at h, h/2, h/4 combined by two Richardson steps."""
    h = 0.02 * np.minimum(x, 1.0)

    def d2(step):
        return (f(x + step) - 2.0 * f(x) + f(x - step)) / step**2

    a, b, c = d2(h), d2(h / 2), d2(h / 4)
    ab = (4.0 * b - a) / 3.0
    bc = (4.0 * c - b) / 3.0
    return (16.0 * bc - ab) / 15.0


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 4),
    gamma_m2=st.floats(-0.25, 12.0),
    chi=st.sampled_from([0.0, 0.6, -0.9]),
    pick=st.integers(0, 10),
)
def test_ode_residual_in_dimensionless_form(n, gamma_m2, chi, pick):
    j = math.sqrt(gamma_m2 + 0.25)
    roots = truncation_kappa_roots(n, j, chi)
    kappa = roots[pick % len(roots)]
    sol = truncated_solution(n, j, kappa, chi)
    psi = assemble_wavefunction(sol, RadialParameters(0.0, 1.0, 0.0, 0.0, gamma_m2))
    delta = 2.0 * n + 2.0 + 2.0 * j - chi**2 / 4.0
    x = np.linspace(0.01, 8.0, 400)
    q = delta - chi * x - x**2 - gamma_m2 / x**2 - kappa / x
    resid = _second_derivative(psi, x) + q * psi(x)
    scale = (abs(delta) + abs(chi) * x + x**2 + abs(gamma_m2) / x**2 + abs(kappa) / x) * np.max(np.abs(psi(x)))
    assert np.max(np.abs(resid) / scale) <= 1e-9
