import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monopole_qes.model import (
    ConfigurationError,
    DefectGeometry,
    DomainError,
    FluxField,
    MolecularParams,
    PotentialSpec,
    QuantumNumbers,
    effective_orbital,
    effective_potential,
    potential_value,
    profile,
    reduce_potential,
)

FIG1 = PotentialSpec.mie_oscillator(beta=1.0, beta_m1=1.0, beta_m2=1.0, v0=1.0)


@pytest.mark.parametrize(
    "l, phi, expected",
    [
        (1, 0.0, 1.0),  # zero flux
        (1, 0.75, 0.25),  # figure 1a caption values
        (2, 2.0, 0.0),  # integer flux cancels
    ],
)
def test_effective_orbital(l, phi, expected):
    assert effective_orbital(l, FluxField(phi)) == expected


def test_effective_orbital_rejects_negative_l():
    with pytest.raises(ConfigurationError):
        effective_orbital(-1, FluxField())


@pytest.mark.parametrize("alpha", [0.0, -0.5, 1.5])
def test_geometry_rejects_alpha(alpha):
    with pytest.raises(ConfigurationError):
        DefectGeometry(alpha)


def test_geometry_rejects_mass():
    with pytest.raises(ConfigurationError):
        DefectGeometry(1.0, 0.0)


def test_flux_field():
    f = FluxField(0.5, charge=2.0)
    assert f.flux_quantum == pytest.approx(math.pi)
    assert f.ab_flux == pytest.approx(0.5 * math.pi)
    assert not f.is_integer
    assert FluxField(2.0).is_integer
    assert f.shifted(1).quanta == 1.5
    with pytest.raises(ConfigurationError):
        FluxField(-0.1)


def test_quantum_numbers():
    QuantumNumbers(1, 0)
    QuantumNumbers(2, 3, m=-3)
    with pytest.raises(ConfigurationError):
        QuantumNumbers(0, 0)
    with pytest.raises(ConfigurationError):
        QuantumNumbers(1, 1, m=2)


def test_unknown_family():
    with pytest.raises(ConfigurationError):
        PotentialSpec("Morse")


def test_potential_value_general():
    spec = PotentialSpec.general(beta=1, beta_m1=1, beta_m2=1, v0=1)
    # 1 + 0 + 1 + 1 + 1 at r = 1
    assert potential_value(spec, 1.0) == 4.0


def test_potential_value_kratzer_without_oscillator():
    spec = PotentialSpec.kratzer(D_e=1.0, r0=1.0, omega=0.0)
    # -2 D_e r0 / r + D_e r0^2 / r^2 at r = 1
    assert potential_value(spec, 1.0) == pytest.approx(-1.0, abs=1e-15)


def test_modified_kratzer_vanishes_at_equilibrium():
    spec = PotentialSpec.modified_kratzer(D_e=3.0, r0=1.7, omega=0.0)
    assert potential_value(spec, 1.7) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("r", [0.0, -1.0, np.array([1.0, 0.0])])
def test_potential_value_domain(r):
    with pytest.raises(DomainError):
        potential_value(FIG1, r)


def test_potential_value_vectorized():
    r = np.array([0.5, 1.0, 2.0])
    out = potential_value(FIG1, r)
    assert out.shape == (3,)
    assert out[1] == 4.0


def test_reduce_kratzer():
    g = reduce_potential(PotentialSpec.kratzer(D_e=1.0, r0=1.0, omega=2.0, mass=1.0))
    assert g.family == "General"
    assert (g.beta, g.beta1, g.beta_m1, g.beta_m2, g.v0) == (2.0, 0.0, -2.0, 1.0, 0.0)


def test_reduce_modified_kratzer():
    g = reduce_potential(PotentialSpec.modified_kratzer(D_e=1.0, r0=1.0, omega=0.0))
    assert g.v0 == 1.0
    assert (g.beta_m1, g.beta_m2) == (-2.0, 1.0)


def test_reduce_coulomb_zero_coupling():
    g = reduce_potential(PotentialSpec.coulomb(eta_c=0.0, omega=1.0))
    assert (g.beta, g.beta1, g.beta_m1, g.beta_m2, g.v0) == (0.5, 0.0, 0.0, 0.0, 0.0)


def test_reduce_pseudoharmonic_drops_odd_terms():
    spec = PotentialSpec("Pseudoharmonic", beta=1.0, beta1=3.0, beta_m1=2.0, beta_m2=1.0)
    g = reduce_potential(spec)
    assert g.beta1 == 0.0 and g.beta_m1 == 0.0 and g.beta_m2 == 1.0


def test_reduce_with_family_override():
    spec = PotentialSpec("General", beta=1.0, beta1=2.0, beta_m1=1.0, molecular=MolecularParams(omega=1.0, eta_c=2.0))
    assert reduce_potential(spec, "MieOscillator").beta1 == 0.0
    assert reduce_potential(spec, "Coulomb").beta_m1 == -2.0


@pytest.mark.parametrize("family", ["Kratzer", "ModifiedKratzer", "Coulomb"])
def test_reduce_requires_molecular(family):
    with pytest.raises(ConfigurationError):
        reduce_potential(PotentialSpec(family))


@pytest.mark.parametrize(
    "spec, closed_form",
    [
        (PotentialSpec.kratzer(1.3, 0.8, omega=1.1, mass=2.0),
         lambda r: 0.5 * 2.0 * 1.1**2 * r**2 - 2 * 1.3 * 0.8 / r + 1.3 * 0.8**2 / r**2),
        (PotentialSpec.modified_kratzer(1.3, 0.8, omega=1.1, mass=2.0),
         lambda r: 0.5 * 2.0 * 1.1**2 * r**2 + 1.3 * (r - 0.8) ** 2 / r**2),
        (PotentialSpec.coulomb(0.7, omega=1.5, mass=1.0),
         lambda r: 0.5 * 1.5**2 * r**2 - 0.7 / r),
    ],
)
def test_family_closed_forms(spec, closed_form):
    r = np.linspace(0.1, 6.0, 100)
    np.testing.assert_allclose(potential_value(spec, r), closed_form(r), rtol=1e-14, atol=1e-14)


def test_modified_minus_plain_kratzer_is_constant():
    r = np.linspace(0.2, 5.0, 50)
    a = potential_value(PotentialSpec.modified_kratzer(2.5, 1.2, 0.7), r)
    b = potential_value(PotentialSpec.kratzer(2.5, 1.2, 0.7), r)
    np.testing.assert_allclose(a - b, 2.5, rtol=1e-13)


def test_effective_potential_figure_1a_point():
    # l' = 1/4, alpha^2 = 9/16: (0.3125 / 2 + 4) / 0.5625
    geom = DefectGeometry(0.75)
    v = effective_potential(FIG1, geom, 1, FluxField(0.75), 1.0)
    assert v == pytest.approx((0.3125 / 2 + 4.0) / 0.5625, abs=1e-12)
    assert v == pytest.approx(7.38889, abs=1e-5)


def test_effective_potential_free_cases():
    free = PotentialSpec.general()
    assert effective_potential(free, DefectGeometry(), 0, FluxField(), 3.3) == 0.0
    assert effective_potential(free, DefectGeometry(), 1, FluxField(), 2.0) == 0.25


def test_effective_potential_flat_limit():
    r = np.linspace(0.3, 4.0, 40)
    spec = PotentialSpec.general(0.7, 0.2, -1.0, 0.5, 0.1)
    got = effective_potential(spec, DefectGeometry(1.0, 2.0), 2, FluxField(0.0), r)
    expected = 2 * 3 / (2 * 2.0 * r**2) + potential_value(spec, r)
    np.testing.assert_allclose(got, expected, rtol=1e-14)


@settings(max_examples=60, deadline=None)
@given(
    l1=st.integers(0, 6),
    dl=st.integers(0, 4),
    phi=st.floats(0.0, 3.0),
    alpha=st.floats(0.1, 1.0),
    r=st.floats(0.05, 10.0),
)
def test_effective_potential_depends_on_l_minus_phi(l1, dl, phi, alpha, r):
    geom = DefectGeometry(alpha)
    a = effective_potential(FIG1, geom, l1, FluxField(phi), r)
    b = effective_potential(FIG1, geom, l1 + dl, FluxField(phi + dl), r)
    assert a == pytest.approx(b, rel=1e-12)


def test_profile_trivial():
    p = profile(PotentialSpec.general(), DefectGeometry(), 0, FluxField(), [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(p.values, [0.0, 0.0, 0.0])


def test_profile_figure_1a_has_single_interior_minimum():
    r = np.linspace(0.5, 5.0, 100)
    p = profile(FIG1, DefectGeometry(0.75), 1, FluxField(0.75), r)
    d = np.diff(p.values)
    turns = np.count_nonzero(np.diff(np.sign(d)) != 0)
    assert turns == 1
    r_min, _ = p.minimum()
    assert 0.5 < r_min < 5.0


def test_profile_figure_2c_distinct_per_l():
    spec = PotentialSpec.general(1.0, 1.0, 1.0, 1.0, 1.0)
    r = np.linspace(0.5, 5.0, 100)
    profiles = [profile(spec, DefectGeometry(0.75), l, FluxField(0.75), r).values for l in range(4)]
    for a, b in zip(profiles, profiles[1:]):
        assert np.max(np.abs(a - b)) > 1e-3


@pytest.mark.parametrize("radii", [[], [2.0, 1.0], [[1.0, 2.0]]])
def test_profile_rejects_bad_grid(radii):
    with pytest.raises(ConfigurationError):
        profile(FIG1, DefectGeometry(), 0, FluxField(), radii)
