"""
Geometry, flux, quantum numbers and potential families.

Natural units (hbar = c = 1) are used throughout. The radial problem only
sees the flux through the effective orbital number ``l' = l - Phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

FAMILIES = (
    "General",
    "MieOscillator",
    "Kratzer",
    "ModifiedKratzer",
    "Coulomb",
    "Pseudoharmonic",
)
MOLECULAR_FAMILIES = ("Kratzer", "ModifiedKratzer", "Coulomb")


class ConfigurationError(ValueError):
    """Inconsistent or missing model parameters."""


class DomainError(ValueError):
    """Evaluation outside the domain r > 0."""


class NonPhysicalError(ValueError):
    """Complex angular index j (supercritical inverse-square coupling)."""


class UnsupportedRegimeError(ValueError):
    """Non-confining oscillator coefficient (beta <= 0)."""


@dataclass(frozen=True)
class DefectGeometry:
    """Point-like global monopole background.

    ``alpha`` scales the radial metric component; ``alpha = 1`` is flat space.
    """

    alpha: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ConfigurationError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.mass > 0.0:
            raise ConfigurationError(f"mass must be positive, got {self.mass}")


@dataclass(frozen=True)
class FluxField:
    """Aharonov-Bohm flux line carrying ``quanta`` flux quanta."""

    quanta: float = 0.0
    charge: float = 1.0

    def __post_init__(self):
        if not self.quanta >= 0.0:
            raise ConfigurationError(f"flux quanta must be >= 0, got {self.quanta}")
        if self.charge == 0.0:
            raise ConfigurationError("charge must be nonzero")

    @property
    def flux_quantum(self) -> float:
        return 2.0 * math.pi / self.charge

    @property
    def ab_flux(self) -> float:
        return self.quanta * self.flux_quantum

    @property
    def is_integer(self) -> bool:
        return float(self.quanta).is_integer()

    def shifted(self, nu: float) -> "FluxField":
        return replace(self, quanta=self.quanta + nu)


@dataclass(frozen=True)
class QuantumNumbers:
    """Radial mode ``n`` (counted from 1) and orbital number ``l``.

    ``m`` is carried for bookkeeping only (``l = k + |m|``); no formula uses it.
    """

    n: int
    l: int
    m: Optional[int] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigurationError(f"n must be an integer >= 1, got {self.n}")
        if int(self.l) != self.l or self.l < 0:
            raise ConfigurationError(f"l must be an integer >= 0, got {self.l}")
        if self.m is not None and abs(self.m) > self.l:
            raise ConfigurationError(f"|m| must not exceed l, got m={self.m}")


@dataclass(frozen=True)
class MolecularParams:
    """Molecular constants; ``mass`` enters only through beta = M omega^2 / 2."""

    omega: float = 0.0
    D_e: float = 0.0
    r0: float = 0.0
    eta_c: float = 0.0
    mass: float = 1.0


@dataclass(frozen=True)
class PotentialSpec:
    """Tagged potential family.

    The five coefficients describe
    ``V(r) = beta r^2 + beta1 r + beta_m1 / r + beta_m2 / r^2 + v0``.
    Molecular families keep their constants in ``molecular`` and are mapped
    onto the coefficients by :func:`reduce_potential`.
    """

    family: str = "General"
    beta: float = 0.0
    beta1: float = 0.0
    beta_m1: float = 0.0
    beta_m2: float = 0.0
    v0: float = 0.0
    molecular: Optional[MolecularParams] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(
                f"unknown potential family {self.family!r}; expected one of {FAMILIES}"
            )

    @classmethod
    def general(cls, beta=0.0, beta1=0.0, beta_m1=0.0, beta_m2=0.0, v0=0.0):
        return cls("General", beta, beta1, beta_m1, beta_m2, v0)

    @classmethod
    def mie_oscillator(cls, beta, beta_m1=0.0, beta_m2=0.0, v0=0.0):
        return cls("MieOscillator", beta, 0.0, beta_m1, beta_m2, v0)

    @classmethod
    def pseudoharmonic(cls, beta, beta_m2=0.0, v0=0.0):
        return cls("Pseudoharmonic", beta, 0.0, 0.0, beta_m2, v0)

    @classmethod
    def kratzer(cls, D_e, r0, omega=0.0, mass=1.0):
        return cls("Kratzer", molecular=MolecularParams(omega, D_e, r0, 0.0, mass))

    @classmethod
    def modified_kratzer(cls, D_e, r0, omega=0.0, mass=1.0):
        return cls("ModifiedKratzer", molecular=MolecularParams(omega, D_e, r0, 0.0, mass))

    @classmethod
    def coulomb(cls, eta_c, omega=0.0, mass=1.0):
        return cls("Coulomb", molecular=MolecularParams(omega, 0.0, 0.0, eta_c, mass))

    def coefficients(self) -> tuple[float, float, float, float, float]:
        """(beta, beta1, beta_m1, beta_m2, v0) after the family mapping."""
        g = reduce_potential(self)
        return g.beta, g.beta1, g.beta_m1, g.beta_m2, g.v0

    def with_omega(self, omega: float) -> "PotentialSpec":
        """Same molecular potential at a different oscillator frequency."""
        if self.molecular is None:
            raise ConfigurationError(f"{self.family} has no oscillator frequency")
        return replace(self, molecular=replace(self.molecular, omega=omega))


def reduce_potential(spec: PotentialSpec, family: Optional[str] = None) -> PotentialSpec:
    """Map a family onto the five General coefficients.

    ``family`` overrides ``spec.family`` (e.g. reading a General spec that
    carries molecular constants as a Kratzer potential).
    """
    family = spec.family if family is None else family
    if family not in FAMILIES:
        raise ConfigurationError(f"unknown potential family {family!r}")

    if family == "General":
        return replace(spec, family="General", molecular=None)
    if family == "MieOscillator":
        return PotentialSpec.general(spec.beta, 0.0, spec.beta_m1, spec.beta_m2, spec.v0)
    if family == "Pseudoharmonic":
        return PotentialSpec.general(spec.beta, 0.0, 0.0, spec.beta_m2, spec.v0)

    mol = spec.molecular
    if mol is None:
        raise ConfigurationError(f"{family} potential requires molecular parameters")
    beta = 0.5 * mol.mass * mol.omega**2
    if family == "Coulomb":
        return PotentialSpec.general(beta, 0.0, -mol.eta_c, 0.0, 0.0)
    v0 = mol.D_e if family == "ModifiedKratzer" else 0.0
    return PotentialSpec.general(beta, 0.0, -2.0 * mol.D_e * mol.r0, mol.D_e * mol.r0**2, v0)


def effective_orbital(l, flux: FluxField) -> float:
    """Effective orbital number l' = l - Phi."""
    if l < 0:
        raise ConfigurationError(f"l must be >= 0, got {l}")
    return l - flux.quanta


def _check_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("radius must be strictly positive")
    return r


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def potential_value(spec: PotentialSpec, r):
    """V(r) for scalar or array ``r``."""
    rr = _check_radius(r)
    beta, beta1, beta_m1, beta_m2, v0 = spec.coefficients()
    v = beta * rr**2 + beta1 * rr + beta_m1 / rr + beta_m2 / rr**2 + v0
    return _scalar_or_array(v, r)


def effective_potential(spec: PotentialSpec, geom: DefectGeometry, l, flux: FluxField, r):
    """Centrifugal-plus-potential term of the radial equation, scaled by 1/alpha^2."""
    rr = _check_radius(r)
    lp = effective_orbital(l, flux)
    a2 = geom.alpha**2
    v = lp * (lp + 1.0) / (2.0 * geom.mass * a2 * rr**2) + np.asarray(potential_value(spec, rr)) / a2
    return _scalar_or_array(v, r)


@dataclass(frozen=True)
class EffectivePotentialProfile:
    radii: np.ndarray
    values: np.ndarray
    spec: PotentialSpec
    geometry: DefectGeometry
    l: int
    flux: FluxField

    def minimum(self) -> tuple[float, float]:
        i = int(np.argmin(self.values))
        return float(self.radii[i]), float(self.values[i])


def profile(spec, geom, l, flux, radii) -> EffectivePotentialProfile:
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0:
        raise ConfigurationError("radii must be a non-empty 1-d grid")
    if np.any(np.diff(radii) <= 0.0):
        raise ConfigurationError("radii must be strictly increasing")
    values = np.asarray(effective_potential(spec, geom, l, flux, radii), dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError("effective potential is not finite on the grid")
    return EffectivePotentialProfile(radii, values, spec, geom, l, flux)
