"""
Closed-form QES energies for the oscillator-plus-Mie potential and its
molecular special cases, with the tuned potential parameter each level needs.

Every constrained record carries the potential it is exact for
(``record.potential``); the explicit closed forms for n = 1, 2 and the
generic kappa-inversion path for arbitrary n are interchangeable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from .heun import (
    RadialWavefunction,
    angular_index,
    assemble_wavefunction,
    centrifugal_coupling,
    heun_parameters,
    kappa_to_constraint,
    radial_parameters,
    select_kappa_root,
    truncated_solution,
    truncation_kappa_roots,
)
from .model import (
    ConfigurationError,
    DefectGeometry,
    FluxField,
    MolecularParams,
    NonPhysicalError,
    PotentialSpec,
    UnsupportedRegimeError,
    effective_orbital,
    reduce_potential,
)

DEFAULT_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumRecord:
    n: int
    l: int
    energy: float
    constrained_param: tuple  # (tag, value), tag in {beta, omega, beta_m1}
    j_or_variant: float
    case: str
    potential: PotentialSpec  # tuned potential the energy is exact for
    geometry: DefectGeometry
    flux: FluxField
    kappa: float
    chi: float = 0.0

    def wavefunction(self, normalize=False) -> RadialWavefunction:
        rp = radial_parameters(self.potential, self.geometry, self.l, self.flux, self.energy)
        sol = truncated_solution(self.n, self.j_or_variant, self.kappa, self.chi)
        return assemble_wavefunction(sol, rp, normalize=normalize)


@dataclass(frozen=True)
class DegeneracyReport:
    alpha: float
    n: int
    levels: tuple  # ((l, E), ...) sorted by l
    collisions: tuple  # ((l1, l2, |dE|), ...)
    tol: float


def angular_j(spec, geom, l, flux) -> float:
    return angular_index(centrifugal_coupling(spec, geom, l, flux))


def _check_mode(n):
    if int(n) != n or n < 1:
        raise ConfigurationError(f"radial mode n must be an integer >= 1, got {n}")


def _oscillator_energy(n, j, beta, geom):
    return geom.alpha * math.sqrt(2.0 * beta / geom.mass) * (n + j + 1.0)


def energy_mie(n, l, spec: PotentialSpec, geom: DefectGeometry, flux: FluxField) -> float:
    """Non-compact level at the potential's own beta (no d_{n+1} condition)."""
    _check_mode(n)
    g = reduce_potential(spec)
    if g.beta1 != 0.0:
        raise ConfigurationError("linear term present; use energy_general_potential")
    if not g.beta > 0.0:
        raise UnsupportedRegimeError(f"beta must be positive, got {g.beta}")
    j = angular_j(g, geom, l, flux)
    return g.v0 + _oscillator_energy(n, j, g.beta, geom)


def energy_unconstrained(n, l, spec, geom, flux) -> float:
    """Non-compact level for any family, linear term included."""
    _check_mode(n)
    g = reduce_potential(spec)
    if not g.beta > 0.0:
        raise UnsupportedRegimeError(f"beta must be positive, got {g.beta}")
    j = angular_j(g, geom, l, flux)
    return g.v0 + _oscillator_energy(n, j, g.beta, geom) - g.beta1**2 / (4.0 * g.beta)


def qes_constraint(n, l, spec, geom, flux, free_param="beta"):
    """Generic route: truncation root -> (kappa, constrained parameter).

    For ``free_param`` beta/omega the given potential's beta is ignored; for beta_m1 the
    potential's beta (and the linear term through chi) is held fixed.
    """
    _check_mode(n)
    g = reduce_potential(spec)
    j = angular_j(g, geom, l, flux)
    chi = kappa_in = 0.0
    if free_param == "beta_m1":
        hp = heun_parameters(radial_parameters(g, geom, l, flux))
        chi, kappa_in = hp.chi, hp.kappa
    elif g.beta1 != 0.0:
        raise ConfigurationError("with a linear term only beta_m1 can be tuned")

    if g.beta_m1 == 0.0 and chi == 0.0:
        if n % 2 == 1:
            raise NonPhysicalError(f"no truncating solution of odd order {n} for beta_m1 = 0")
        if free_param != "beta_m1":
            raise ConfigurationError("beta is free when beta_m1 = 0; nothing to constrain")
        return 0.0, 0.0

    roots = truncation_kappa_roots(n, j, chi)
    if free_param == "beta_m1":
        # the input 1/r coefficient only seeds the choice: take the nearest root
        if not roots:
            raise NonPhysicalError(f"no real truncation root for n = {n}")
        kappa = min(roots, key=lambda k: (abs(k - kappa_in), -k))
    elif g.beta_m1 == 0.0:
        kappa = min(roots, key=abs)
    else:
        kappa = select_kappa_root(roots, math.copysign(1.0, g.beta_m1))
    return kappa, kappa_to_constraint(kappa, free_param, g, geom, l, flux)


def _record(n, l, energy, tag, value, j, case, potential, geom, flux, kappa, chi=0.0):
    return SpectrumRecord(
        n=n, l=l, energy=energy, constrained_param=(tag, value), j_or_variant=j,
        case=case, potential=potential, geometry=geom, flux=flux, kappa=kappa, chi=chi,
    )


def energy_mie_constrained(n, l, spec, geom, flux) -> SpectrumRecord:
    """Level n with beta tuned so that the Heun series truncates."""
    _check_mode(n)
    g = reduce_potential(spec)
    if g.beta1 != 0.0:
        raise ConfigurationError("linear term present; use energy_general_potential")
    if g.beta_m1 == 0.0:
        raise ConfigurationError("beta_m1 must be nonzero to constrain beta")
    j = angular_j(g, geom, l, flux)
    m, a, b = geom.mass, geom.alpha, g.beta_m1
    sign = math.copysign(1.0, b)
    if n == 1:
        beta = m**3 * b**4 / (2.0 * a**6 * (j + 0.5) ** 2)
        energy = g.v0 + (m / a**2) * b**2 * (2.0 + j) / (j + 0.5)
        kappa = sign * 2.0 * math.sqrt(j + 0.5)
    elif n == 2:
        beta = m**3 * b**4 / (32.0 * a**6 * (j + 0.75) ** 2)
        energy = g.v0 + (m / (4.0 * a**2)) * b**2 * (3.0 + j) / (j + 0.75)
        kappa = sign * 4.0 * math.sqrt(j + 0.75)
    else:
        kappa, beta = qes_constraint(n, l, g, geom, flux, "beta")
        energy = g.v0 + _oscillator_energy(n, j, beta, geom)
    tuned = replace(spec, beta=beta) if spec.family in ("MieOscillator", "General") else replace(g, beta=beta)
    return _record(n, l, energy, "beta", beta, j, "MieOscillator", tuned, geom, flux, kappa)


def energy_kratzer(n, l, molecular: MolecularParams, geom, flux, modified=False) -> SpectrumRecord:
    """Oscillator-plus-(modified) Kratzer level with omega tuned per (n, l)."""
    _check_mode(n)
    de, r0 = molecular.D_e, molecular.r0
    if not (de > 0.0 and r0 > 0.0):
        raise ConfigurationError("Kratzer potential needs D_e > 0 and r0 > 0")
    m, a = geom.mass, geom.alpha
    family = "ModifiedKratzer" if modified else "Kratzer"
    lp = effective_orbital(l, flux)
    varsigma = angular_index((lp * (lp + 1.0) + 2.0 * m * de * r0**2) / a**2)
    offset = de if modified else 0.0
    c = m * de**2 * r0**2
    if n == 1:
        omega = 4.0 * c / (a**3 * (varsigma + 0.5))
        energy = offset + (4.0 * c / a**2) * (varsigma + 2.0) / (varsigma + 0.5)
        kappa = -2.0 * math.sqrt(varsigma + 0.5)
    elif n == 2:
        omega = c / (a**3 * (varsigma + 0.75))
        energy = offset + (c / a**2) * (varsigma + 3.0) / (varsigma + 0.75)
        kappa = -4.0 * math.sqrt(varsigma + 0.75)
    else:
        probe = PotentialSpec(family, molecular=replace(molecular, omega=1.0, mass=m))
        kappa, omega = qes_constraint(n, l, probe, geom, flux, "omega")
        energy = offset + a * omega * (n + 1.0 + varsigma)
    tuned = PotentialSpec(family, molecular=replace(molecular, omega=omega, mass=m))
    return _record(n, l, energy, "omega", omega, varsigma, family, tuned, geom, flux, kappa)


def energy_coulomb(n, l, eta_c, geom, flux) -> SpectrumRecord:
    """Oscillator-plus-attractive-Coulomb level with omega tuned per (n, l)."""
    _check_mode(n)
    if not eta_c > 0.0:
        raise ConfigurationError(f"eta_c must be positive, got {eta_c}")
    m, a = geom.mass, geom.alpha
    lp = effective_orbital(l, flux)
    tau = angular_index(lp * (lp + 1.0) / a**2)
    if n == 1:
        omega = m * eta_c**2 / (a**3 * (tau + 0.5))
        kappa = -2.0 * math.sqrt(tau + 0.5)
    elif n == 2:
        omega = m * eta_c**2 / (4.0 * a**3 * (tau + 0.75))
        kappa = -4.0 * math.sqrt(tau + 0.75)
    else:
        probe = PotentialSpec.coulomb(eta_c, 1.0, m)
        kappa, omega = qes_constraint(n, l, probe, geom, flux, "omega")
    energy = omega * ((n + 1.0) * a + math.sqrt(lp * (lp + 1.0) + a**2 / 4.0))
    tuned = PotentialSpec.coulomb(eta_c, omega, m)
    return _record(n, l, energy, "omega", omega, tau, "Coulomb", tuned, geom, flux, kappa)


def energy_general_potential(n, l, spec, geom, flux) -> SpectrumRecord:
    """Pseudoharmonic-plus-Cornell level; beta_m1 is tuned at fixed beta, beta1."""
    _check_mode(n)
    g = reduce_potential(spec)
    if not g.beta > 0.0:
        raise UnsupportedRegimeError(f"beta must be positive, got {g.beta}")
    j = angular_j(g, geom, l, flux)
    energy = g.v0 + _oscillator_energy(n, j, g.beta, geom)
    energy = energy - g.beta1**2 / (4.0 * g.beta)
    chi = heun_parameters(radial_parameters(g, geom, l, flux)).chi
    kappa, beta_m1 = qes_constraint(n, l, g, geom, flux, "beta_m1")
    tuned = replace(g, beta_m1=beta_m1)
    return _record(n, l, energy, "beta_m1", beta_m1, j, "General", tuned, geom, flux, kappa, chi)


def spectrum_record(n, l, spec, geom, flux) -> SpectrumRecord:
    """Dispatch on the potential family."""
    fam = spec.family
    if fam in ("Kratzer", "ModifiedKratzer"):
        mol = spec.molecular
        if mol is None:
            raise ConfigurationError(f"{fam} potential requires molecular parameters")
        return energy_kratzer(n, l, mol, geom, flux, modified=fam == "ModifiedKratzer")
    if fam == "Coulomb":
        if spec.molecular is None:
            raise ConfigurationError("Coulomb potential requires eta_c")
        return energy_coulomb(n, l, spec.molecular.eta_c, geom, flux)
    if fam == "MieOscillator":
        return energy_mie_constrained(n, l, spec, geom, flux)
    # General and Pseudoharmonic
    return energy_general_potential(n, l, spec, geom, flux)


def flux_shift_identity(energy_fn: Callable, n, l, flux: FluxField, nu: int):
    """(E_{n,l}(Phi + nu), E_{n,l-nu}(Phi)) from ``energy_fn(n, l, flux)``.

    Negative ``nu`` gives the ``Phi - |nu|`` branch.
    """
    if int(nu) != nu:
        raise ConfigurationError(f"nu must be an integer, got {nu}")
    if l - nu < 0:
        raise ConfigurationError(f"l - nu = {l - nu} is out of range")
    if flux.quanta + nu < 0:
        raise ConfigurationError(f"Phi + nu = {flux.quanta + nu} is out of range")
    return energy_fn(n, l, flux.shifted(nu)), energy_fn(n, l - nu, flux)


def degeneracy_report(n, l_max, spec, geom, flux, tol=DEFAULT_DEGENERACY_TOL) -> DegeneracyReport:
    """Tabulate E_{n,l} for l = 0..l_max at fixed beta and flag near-coincidences."""
    if l_max < 1:
        raise ConfigurationError("l_max must be >= 1")
    levels = []
    for l in range(l_max + 1):
        levels.append((l, energy_unconstrained(n, l, spec, geom, flux)))
    collisions = []
    for i, (l1, e1) in enumerate(levels):
        for l2, e2 in levels[i + 1:]:
            if abs(e1 - e2) < tol:
                collisions.append((l1, l2, abs(e1 - e2)))
    return DegeneracyReport(geom.alpha, n, tuple(levels), tuple(collisions), tol)
