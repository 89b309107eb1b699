"""
Biconfluent Heun reduction of the radial equation and its polynomial solutions.

With ``x = gamma2**(1/4) r`` the radial equation becomes

    psi'' + [Delta - chi x - x^2 - gamma_m2 / x^2 - kappa / x] psi = 0

and ``psi = x**((1 + 2j)/2) exp(-x^2/2 - chi x / 2) H(x)``. ``H`` is a
polynomial of degree ``n`` when ``Sigma = 2n`` (fixes the energy) and
``d_{n+1} = 0`` (fixes one potential parameter through ``kappa``).

Radial modes are counted from ``n = 1``; ``n = 0`` would be the trivial
constant polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, optimize

from .model import (
    ConfigurationError,
    DefectGeometry,
    FluxField,
    NonPhysicalError,
    PotentialSpec,
    UnsupportedRegimeError,
    effective_orbital,
    reduce_potential,
)


@dataclass(frozen=True)
class RadialParameters:
    lam: float
    gamma2: float
    gamma1: float
    gamma_m1: float
    gamma_m2: float


@dataclass(frozen=True)
class HeunParameters:
    delta: float
    kappa: float
    chi: float
    j: float


@dataclass(frozen=True)
class Exponents:
    a: float
    b: float
    c: float


@dataclass(frozen=True)
class HeunSolution:
    """Truncated series ``H(x) = sum d_i x^i`` with ``d_0 = 1``."""

    exponents: Exponents
    order: int
    coeffs: tuple
    kappa_root: float
    trunc_param: float
    j: float
    chi: float
    tail: tuple = (0.0, 0.0)  # d_{n+1}, d_{n+2} from the recurrence

    def polynomial(self) -> Polynomial:
        return Polynomial(self.coeffs)

    def certificate(self) -> float:
        """max(|d_{n+1}|, |d_{n+2}|) relative to max |d_i|."""
        scale = max(abs(c) for c in self.coeffs)
        return max(abs(t) for t in self.tail) / scale


def angular_index(gamma_m2: float) -> float:
    """j = sqrt(gamma_m2 + 1/4); raises for a complex index."""
    arg = gamma_m2 + 0.25
    if arg < 0.0:
        raise NonPhysicalError(
            f"complex angular index: gamma_m2 + 1/4 = {arg:.6g} < 0"
        )
    return math.sqrt(arg)


def centrifugal_coupling(spec: PotentialSpec, geom: DefectGeometry, l, flux: FluxField) -> float:
    """gamma_m2 = [l'(l'+1) + 2 M beta_m2] / alpha^2."""
    lp = effective_orbital(l, flux)
    beta_m2 = reduce_potential(spec).beta_m2
    return (lp * (lp + 1.0) + 2.0 * geom.mass * beta_m2) / geom.alpha**2


def radial_parameters(spec, geom, l, flux, energy: float = 0.0) -> RadialParameters:
    g = reduce_potential(spec)
    if not g.beta > 0.0:
        raise UnsupportedRegimeError(
            f"oscillator coefficient beta must be positive, got {g.beta}"
        )
    k = 2.0 * geom.mass / geom.alpha**2
    return RadialParameters(
        lam=k * (energy - g.v0),
        gamma2=k * g.beta,
        gamma1=k * g.beta1,
        gamma_m1=k * g.beta_m1,
        gamma_m2=centrifugal_coupling(g, geom, l, flux),
    )


def heun_parameters(rp: RadialParameters) -> HeunParameters:
    if not rp.gamma2 > 0.0:
        raise UnsupportedRegimeError("gamma2 must be positive")
    return HeunParameters(
        delta=rp.lam / math.sqrt(rp.gamma2),
        kappa=rp.gamma_m1 / rp.gamma2**0.25,
        chi=rp.gamma1 / rp.gamma2**0.75,
        j=angular_index(rp.gamma_m2),
    )


def exponents(j: float, chi: float = 0.0) -> Exponents:
    return Exponents(a=0.5 * (1.0 + 2.0 * j), b=0.5, c=0.5 * chi)


def seed_coefficient(j, kappa, chi=0.0):
    """d_1 for d_0 = 1; works elementwise on polynomials in kappa."""
    zeta = kappa + 0.5 * chi * (1.0 + 2.0 * j)
    return zeta / (1.0 + 2.0 * j)


def recurrence_step(j, kappa, chi, trunc_param, d_prev2, d_prev1, index):
    """d_{index+2} from d_index and d_{index+1}.

    ``trunc_param`` is Pi (chi = 0) or Sigma; truncation at degree n needs
    ``trunc_param = 2 n``.
    """
    k = index
    num = (kappa + chi * (k + j + 1.5)) * d_prev1 - (trunc_param - 2.0 * k) * d_prev2
    return num / ((k + 2.0) * (k + 2.0 + 2.0 * j))


def series_coefficients(j, kappa, chi, trunc_param, count) -> list:
    """First ``count`` coefficients d_0..d_{count-1} with d_0 = 1."""
    d = [1.0, seed_coefficient(j, kappa, chi)]
    while len(d) < count:
        k = len(d) - 2
        d.append(recurrence_step(j, kappa, chi, trunc_param, d[k], d[k + 1], k))
    return d[:count]


def truncation_polynomial(n: int, j: float, chi: float = 0.0) -> Polynomial:
    """d_{n+1} as a polynomial of degree n+1 in kappa (Sigma = 2n)."""
    if n < 1:
        raise ConfigurationError(f"truncation order must be >= 1, got {n}")
    kappa = Polynomial([0.0, 1.0])
    d = series_coefficients(j, kappa, chi, 2.0 * n, n + 2)
    return d[n + 1]


def _kappa_bracket(n, j):
    return 10.0 * math.sqrt(n * (n + 2.0 * j + 2.0))


def truncation_kappa_roots(n: int, j: float, chi: float = 0.0, include_zero=False) -> list:
    """Real kappa roots of d_{n+1} = 0, ascending.

    For chi = 0 and even n the polynomial is odd in kappa, so kappa = 0 is
    always a root (the pure pseudoharmonic case); it is dropped unless
    ``include_zero`` is set.
    """
    poly = truncation_polynomial(n, j, chi)
    zero_root = chi == 0.0 and n % 2 == 0
    if zero_root:
        # deflate the exact kappa = 0 factor
        poly = Polynomial(poly.coef[1:])

    bound = _kappa_bracket(n, j) * (1.0 + abs(chi))
    grid = np.linspace(-bound, bound, 400 * (n + 2) + 1)
    vals = poly(grid)
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0.0:
            roots.append(optimize.brentq(poly, a, b, xtol=1e-15, rtol=1e-15, maxiter=200))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    if zero_root and include_zero:
        roots.append(0.0)
    return sorted(roots)


def select_kappa_root(roots, sign: float) -> float:
    """Largest-magnitude root whose sign matches ``sign`` (the sign of beta_m1)."""
    if sign == 0.0:
        raise ConfigurationError("kappa sign undefined for beta_m1 = 0")
    matching = [k for k in roots if k * sign > 0.0]
    if not matching:
        raise NonPhysicalError("no truncation root with the required sign")
    return max(matching, key=abs)


def kappa_to_constraint(kappa_root, free_param, spec, geom, l=0, flux=None) -> float:
    """Invert kappa = gamma_m1 / gamma2^(1/4) for one potential parameter.

    ``free_param`` is ``"beta"``, ``"omega"`` (sqrt(2 beta / M)) or
    ``"beta_m1"`` (with beta held fixed). ``l`` and ``flux`` are accepted for
    call-site symmetry; j is already folded into ``kappa_root``.
    """
    g = reduce_potential(spec)
    k = 2.0 * geom.mass / geom.alpha**2
    if free_param in ("beta", "omega"):
        if g.beta_m1 == 0.0 or kappa_root == 0.0:
            raise ConfigurationError(
                "beta_m1 and kappa root must both be nonzero to fix beta"
            )
        if (g.beta_m1 > 0.0) != (kappa_root > 0.0):
            raise ConfigurationError("sign of kappa root must match sign of beta_m1")
        gamma2 = (k * g.beta_m1 / kappa_root) ** 4
        beta = gamma2 / k
        if free_param == "beta":
            return beta
        return math.sqrt(2.0 * beta / geom.mass)
    if free_param == "beta_m1":
        if not g.beta > 0.0:
            raise UnsupportedRegimeError("beta must be positive to fix beta_m1")
        gamma2 = k * g.beta
        return kappa_root * gamma2**0.25 / k
    raise ConfigurationError(f"unknown constrained parameter {free_param!r}")


def truncated_solution(n: int, j: float, kappa: float, chi: float = 0.0) -> HeunSolution:
    d = series_coefficients(j, kappa, chi, 2.0 * n, n + 3)
    return HeunSolution(
        exponents=exponents(j, chi),
        order=n,
        coeffs=tuple(d[: n + 1]),
        kappa_root=kappa,
        trunc_param=2.0 * n,
        j=j,
        chi=chi,
        tail=(d[n + 1], d[n + 2]),
    )


class RadialWavefunction:
    """Evaluator r -> x^a exp(-x^2/2 - c x) H(x), x = gamma2^(1/4) r."""

    def __init__(self, sol: HeunSolution, gamma2: float, norm: float = 1.0):
        self.solution = sol
        self.scale = gamma2**0.25
        self.norm = norm
        self._poly = sol.polynomial()

    def __call__(self, r):
        x = self.scale * np.asarray(r, dtype=float)
        ex = self.solution.exponents
        with np.errstate(under="ignore"):
            val = x**ex.a * np.exp(-0.5 * x * x - ex.c * x) * self._poly(x)
        return self.norm * val

    def polynomial_factor(self, r):
        return self._poly(self.scale * np.asarray(r, dtype=float))

    def normalized(self) -> "RadialWavefunction":
        """Unit L2 norm over [0, inf) with measure dr."""
        raw = RadialWavefunction(self.solution, self.scale**4)
        total, _ = integrate.quad(lambda r: raw(r) ** 2, 0.0, np.inf, epsabs=1e-14, epsrel=1e-10, limit=200)
        return RadialWavefunction(self.solution, self.scale**4, 1.0 / math.sqrt(total))


def assemble_wavefunction(sol: HeunSolution, rp: RadialParameters, normalize=False) -> RadialWavefunction:
    if sol.order < 1:
        raise ConfigurationError("wavefunction order must be >= 1")
    psi = RadialWavefunction(sol, rp.gamma2)
    return psi.normalized() if normalize else psi
