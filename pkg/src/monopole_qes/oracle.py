"""
Numerical radial eigen-solver used to certify the analytic spectra.

The radial equation

    -(alpha^2 / 2M) psi'' + [V(r) + l'(l'+1) / (2 M r^2)] psi = E psi

is discretized after factoring out the small-r behaviour ``psi = r^s u``
(``s = 1/2 + j``, with ``j`` from the indicial equation). In Sturm-Liouville
form ``-(r^{2s} u')' + k r^{2s} V~ u = k E r^{2s} u`` (``k = 2M/alpha^2``,
``V~`` the potential without its 1/r^2 part) the coefficients stay bounded at
the origin, so a finite-volume scheme on a uniform grid converges at second
order even when ``j < 1/2``. The origin is a natural-boundary node and
``u(r_max) = 0``.

Nothing here uses the Heun series or the closed-form energies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.linalg import eigh_tridiagonal

from .heun import angular_index, centrifugal_coupling
from .model import (
    DefectGeometry,
    FluxField,
    PotentialSpec,
    UnsupportedRegimeError,
    effective_orbital,
    potential_value,
    reduce_potential,
)

MIN_POINTS = 200


class OracleConvergenceError(RuntimeError):
    """Grid refinement did not reach the requested tolerance."""


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid ``r_min .. r_max`` with ``points`` nodes."""

    r_min: float
    r_max: float
    points: int

    def __post_init__(self):
        if not (0.0 < self.r_min < self.r_max):
            raise ValueError(f"need 0 < r_min < r_max, got {self.r_min}, {self.r_max}")
        if self.points < MIN_POINTS:
            raise ValueError(f"need at least {MIN_POINTS} points, got {self.points}")

    @classmethod
    def for_solver(cls, r_max: float, points: int = 400) -> "RadialGrid":
        """Solver grid: first node one spacing from the origin."""
        return cls(r_max / points, r_max, points)

    @property
    def spacing(self) -> float:
        return (self.r_max - self.r_min) / (self.points - 1)

    @property
    def radii(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.points)

    def refined(self) -> "RadialGrid":
        """Half the spacing over the same interval."""
        return RadialGrid(self.r_min, self.r_max, 2 * self.points - 1)


@dataclass
class RadialSpectrum:
    energies: np.ndarray  # Richardson-extrapolated
    raw_energies: np.ndarray  # finest grid
    radii: np.ndarray  # finest grid, origin included, r_max last
    functions: np.ndarray  # psi on ``radii``, one row per level, unit L2 norm
    grid: RadialGrid
    history: list = field(default_factory=list)
    converged: bool = True

    def node_counts(self) -> list:
        return [count_nodes(f) for f in self.functions]


@dataclass(frozen=True)
class OracleReport:
    target_energy: float
    matched_energy: float
    abs_gap: float
    rel_gap: float
    node_count: int
    spectral_index: int
    residual_norm: float
    residual_order: float
    converged: bool
    shooting_energy: float = float("nan")
    r_max: float = float("nan")
    note: str = ""


def _log_cell_integral(q, a, b):
    """log of the integral of r^q over [a, b], q > -1, elementwise."""
    q1 = q + 1.0
    out = np.empty_like(b)
    at_origin = a == 0.0
    out[at_origin] = q1 * np.log(b[at_origin]) - math.log(q1)
    rest = ~at_origin
    ratio = np.log(b[rest] / a[rest])
    out[rest] = q1 * np.log(a[rest]) + np.log(np.expm1(q1 * ratio) / q1)
    return out


def _discretize(coef, s, k, r_max, n):
    """Symmetric tridiagonal (diag, off) and log cell masses on n unknowns."""
    beta, beta1, beta_m1, v0 = coef
    h = r_max / n
    r = np.arange(n) * h
    a = np.maximum(r - 0.5 * h, 0.0)
    b = r + 0.5 * h
    log_mass = _log_cell_integral(2.0 * s, a, b)

    pot = np.full(n, float(v0))
    for power, c in ((2, beta), (1, beta1), (-1, beta_m1)):
        if c != 0.0:
            pot += c * np.exp(_log_cell_integral(2.0 * s + power, a, b) - log_mass)

    log_flux = 2.0 * s * np.log(b)  # weight r^{2s} at r_{i+1/2}
    log_flux_left = np.concatenate(([-np.inf], log_flux[:-1]))
    diag = (np.exp(log_flux - log_mass) + np.exp(log_flux_left - log_mass)) / (h * k) + pot
    off = -np.exp(log_flux[:-1] - 0.5 * (log_mass[:-1] + log_mass[1:])) / (h * k)
    return diag, off, r, log_mass


def _fv_levels(coef, s, k, r_max, n, count, vectors=False):
    diag, off, r, log_mass = _discretize(coef, s, k, r_max, n)
    if not vectors:
        return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, count - 1))
    w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
    # y = sqrt(k m) u, psi = r^s u, so psi = y sqrt(r^{2s} / (k m)); unit norm in dr
    with np.errstate(divide="ignore"):
        log_r = np.log(r)
    amp = np.exp(s * log_r - 0.5 * (log_mass + math.log(k)))
    amp[0] = 0.0
    psi = (v * amp[:, None]).T
    radii = np.append(r, r_max)
    psi = np.hstack([psi, np.zeros((count, 1))])
    for row in psi:
        i = int(np.argmax(np.abs(row)))
        if row[i] < 0.0:
            row *= -1.0
    return w, radii, psi


def turning_radius(spec, geom, l, flux, energy) -> float:
    """Outermost r with V(r) + l'(l'+1)/(2 M r^2) = E."""
    g = reduce_potential(spec)
    length = (2.0 * geom.mass * g.beta / geom.alpha**2) ** -0.25
    lp = effective_orbital(l, flux)

    def excess(r):
        return potential_value(g, r) + lp * (lp + 1.0) / (2.0 * geom.mass * r * r) - energy

    r = np.geomspace(1e-4 * length, 1e3 * length, 4000)
    f = excess(r)
    below = np.nonzero(f < 0.0)[0]
    if below.size == 0:
        return length
    i = below[-1]
    if i == r.size - 1:
        return float(r[-1])
    return optimize.brentq(excess, r[i], r[i + 1])


def _oscillator_estimate(g, geom, j, level):
    omega_eff = geom.alpha * math.sqrt(2.0 * g.beta / geom.mass)
    return g.v0 + omega_eff * (2.0 * level + 1.0 + j) - g.beta1**2 / (4.0 * g.beta)


def _tail_ratio(psi_row, frac=0.1):
    m = np.max(np.abs(psi_row))
    cut = int(len(psi_row) * (1.0 - frac))
    return float(np.max(np.abs(psi_row[cut:-1])) / m)


def solve_radial_spectrum(
    spec: PotentialSpec,
    geom: DefectGeometry,
    l,
    flux: FluxField,
    grid: RadialGrid | None = None,
    count: int = 3,
    *,
    energy_hint: float | None = None,
    rtol: float = 1e-8,
    max_points: int = 409600,
) -> RadialSpectrum:
    """Lowest ``count`` eigenpairs, grid-converged by successive doubling.

    Each doubling gives a Richardson estimate ``(4 E_{h/2} - E_h) / 3``;
    refinement stops once two successive estimates agree to ``rtol``.
    Without ``grid``, ``r_max`` is three times the outer turning radius of
    the highest requested level (or ``energy_hint`` if larger) and is widened
    while the highest eigenfunction keeps a tail above 1e-8 near ``r_max``.
    """
    g = reduce_potential(spec)
    if not g.beta > 0.0:
        raise UnsupportedRegimeError("oracle needs a confining oscillator term (beta > 0)")
    j = angular_index(centrifugal_coupling(g, geom, l, flux))
    s = 0.5 + j
    k = 2.0 * geom.mass / geom.alpha**2
    coef = (g.beta, g.beta1, g.beta_m1, g.v0)

    if grid is None:
        e_ref = _oscillator_estimate(g, geom, j, count)
        if energy_hint is not None:
            e_ref = max(e_ref, energy_hint)
        r_max = 3.0 * turning_radius(g, geom, l, flux, e_ref)
        for _ in range(8):
            w, radii, psi = _fv_levels(coef, s, k, r_max, 800, count, vectors=True)
            e_top = max(w[-1], e_ref)
            r_need = 3.0 * turning_radius(g, geom, l, flux, e_top)
            if r_need <= r_max * (1.0 + 1e-12) and _tail_ratio(psi[-1]) < 1e-8:
                break
            r_max = max(r_need, 1.5 * r_max)
        grid = RadialGrid.for_solver(r_max, 400)

    n = grid.points
    r_max = grid.r_max
    history = []
    prev_levels = None
    prev_extrap = None
    extrap = None
    converged = False
    while n <= max_points:
        levels = _fv_levels(coef, s, k, r_max, n, count)
        history.append((n, levels))
        if prev_levels is not None:
            extrap = (4.0 * levels - prev_levels) / 3.0
            if prev_extrap is not None:
                scale = np.maximum(np.abs(extrap), 1e-12)
                if np.all(np.abs(extrap - prev_extrap) <= rtol * scale):
                    converged = True
                    break
            prev_extrap = extrap
        prev_levels = levels
        n *= 2
    if not converged:
        raise OracleConvergenceError(
            f"eigenvalues not converged to {rtol:g} by {max_points} points"
        )

    _, radii, psi = _fv_levels(coef, s, k, r_max, n, count, vectors=True)
    return RadialSpectrum(
        energies=extrap,
        raw_energies=history[-1][1],
        radii=radii,
        functions=psi,
        grid=RadialGrid.for_solver(r_max, n),
        history=history,
        converged=True,
    )


def count_nodes(values, rel_floor=1e-12) -> int:
    """Strict sign changes, ignoring samples below rel_floor * max|psi|."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return 0
    floor = rel_floor * np.max(np.abs(v))
    signs = np.sign(v[np.abs(v) > floor])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _radial_coefficient(spec, geom, l, flux, energy, r):
    """q(r) with psi'' + q psi = 0."""
    lp = effective_orbital(l, flux)
    v = np.asarray(potential_value(spec, r))
    return (2.0 * geom.mass * (energy - v) - lp * (lp + 1.0) / r**2) / geom.alpha**2


def ode_residual(psi, energy, spec, geom, l, flux, grid: RadialGrid) -> float:
    """Max-norm residual of psi'' + q psi on the grid interior.

    The second derivative is a centred three-point difference. Each point is
    scaled by ``max|psi|`` times the local coefficient magnitude
    ``[2M(|E| + |V|) + |l'(l'+1)| / r^2] / alpha^2``, so the result is
    dimensionless and O(h^2) for an exact solution.
    """
    r = grid.radii
    h = grid.spacing
    y = np.asarray(psi(r), dtype=float)
    peak = np.max(np.abs(y))
    if not peak > 0.0:
        raise ValueError("residual undefined for a vanishing wavefunction")
    rr = r[1:-1]
    d2 = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / h**2
    qy = _radial_coefficient(spec, geom, l, flux, energy, rr) * y[1:-1]
    lp = effective_orbital(l, flux)
    v = np.abs(np.asarray(potential_value(spec, rr)))
    local = (2.0 * geom.mass * (abs(energy) + v) + abs(lp * (lp + 1.0)) / rr**2) / geom.alpha**2
    return float(np.max(np.abs(d2 + qy) / (peak * local)))


def residual_sequence(psi, energy, spec, geom, l, flux, grid: RadialGrid, halvings=2):
    """Residuals on ``grid`` and ``halvings`` successively halved grids."""
    out = []
    for _ in range(halvings + 1):
        out.append(ode_residual(psi, energy, spec, geom, l, flux, grid))
        grid = grid.refined()
    return out


def default_residual_grid(spec, geom, energy, l, flux, points=2000) -> RadialGrid:
    """Bulk of the bound state: [0.25, 1.5 * turning radius] in oscillator units."""
    g = reduce_potential(spec)
    length = (2.0 * geom.mass * g.beta / geom.alpha**2) ** -0.25
    r_hi = 1.5 * turning_radius(g, geom, l, flux, energy)
    return RadialGrid(0.25 * length, max(r_hi, 2.0 * length), points)


def shooting_energy(spec, geom, l, flux, guess, r_max, window, steps=8000) -> float:
    """Numerov shooting cross-check for the level nearest ``guess``.

    Integrates phi = psi / sqrt(r) on a uniform grid in t = ln r, where the
    equation phi'' = [j^2 - k (E - V~(e^t)) e^{2t}] phi has smooth
    coefficients, from a Frobenius start near the origin to ``r_max``.
    The energy is the root of phi(r_max) inside ``guess +/- window``.
    """
    g = reduce_potential(spec)
    j = angular_index(centrifugal_coupling(g, geom, l, flux))
    s = 0.5 + j
    k = 2.0 * geom.mass / geom.alpha**2
    length = (k * g.beta) ** -0.25
    r0 = 1e-4 * min(length, r_max)
    t = np.linspace(math.log(r0), math.log(r_max), steps + 1)
    h = t[1] - t[0]
    e2t = np.exp(2.0 * t)
    rr = np.exp(t)
    vt = g.beta * rr**2 + g.beta1 * rr + g.beta_m1 / rr + g.v0
    static = (j * j + k * vt * e2t).tolist()
    e2t_l = e2t.tolist()
    c12 = h * h / 12.0
    c1 = k * g.beta_m1 / (2.0 * s)

    def end_value(energy):
        c2 = (k * g.beta_m1 * c1 - k * (energy - g.v0)) / (2.0 + 4.0 * s)
        y0 = math.exp(j * t[0]) * (1.0 + c1 * rr[0] + c2 * rr[0] ** 2)
        y1 = math.exp(j * t[1]) * (1.0 + c1 * rr[1] + c2 * rr[1] ** 2)
        f0 = static[0] - k * energy * e2t_l[0]
        f1 = static[1] - k * energy * e2t_l[1]
        w0 = (1.0 - c12 * f0) * y0
        w1 = (1.0 - c12 * f1) * y1
        for i in range(2, len(static)):
            f = static[i] - k * energy * e2t_l[i]
            # w = (1 - h^2 f / 12) y satisfies w_{i+1} = 2 w_i - w_{i-1} + h^2 f_i y_i
            w2 = 2.0 * w1 - w0 + 12.0 * c12 * f1 * w1 / (1.0 - c12 * f1)
            w0, w1, f1 = w1, w2, f
            if abs(w1) > 1e250:
                w0 *= 1e-250
                w1 *= 1e-250
        return w1 / (1.0 - c12 * f1)

    lo, hi = guess - window, guess + window
    flo, fhi = end_value(lo), end_value(hi)
    if flo * fhi > 0.0:
        return float("nan")
    return optimize.brentq(end_value, lo, hi, xtol=1e-13, rtol=1e-13, maxiter=100)


VERIFY_RTOL = 1e-6
MISMATCH_RTOL = 0.1


def verify_analytic(
    record,
    spec: PotentialSpec | None = None,
    geom: DefectGeometry | None = None,
    flux: FluxField | None = None,
    grid: RadialGrid | None = None,
    *,
    shooting: bool = False,
    energy_offset: float = 0.0,
) -> OracleReport:
    """Certify one analytic level against the numerical spectrum.

    ``spec`` defaults to the tuned potential stored on the record.
    ``energy_offset`` perturbs the analytic energy (negative control).
    Mismatches are reported with ``converged=False``, never raised.
    """
    spec = record.potential if spec is None else spec
    geom = record.geometry if geom is None else geom
    flux = record.flux if flux is None else flux
    l = record.l
    target = record.energy + energy_offset

    psi = record.wavefunction()
    count = max(3, record.n + 3)
    spectrum = solve_radial_spectrum(spec, geom, l, flux, grid, count, energy_hint=target)
    nodes = count_nodes(psi(spectrum.radii[1:-1]))

    energies = spectrum.energies
    idx = int(np.argmin(np.abs(energies - target)))
    matched = float(energies[idx])
    abs_gap = abs(matched - target)
    rel_gap = abs_gap / max(abs(target), 1e-300)

    res_grid = default_residual_grid(spec, geom, target, l, flux)
    res = residual_sequence(psi, target, spec, geom, l, flux, res_grid)
    order = 0.5 * (math.log2(res[0] / res[1]) + math.log2(res[1] / res[2]))

    shoot = float("nan")
    if shooting:
        others = np.delete(energies, idx)
        window = 0.5 * float(np.min(np.abs(others - matched))) if others.size else 0.5
        shoot = shooting_energy(spec, geom, l, flux, matched, spectrum.grid.r_max, window)

    note = ""
    if rel_gap > MISMATCH_RTOL:
        note = "no numerical eigenvalue within 10% of the analytic energy"
    elif idx != nodes:
        note = f"spectral index {idx} differs from node count {nodes}"
    converged = rel_gap <= VERIFY_RTOL and idx == nodes
    return OracleReport(
        target_energy=target,
        matched_energy=matched,
        abs_gap=abs_gap,
        rel_gap=rel_gap,
        node_count=nodes,
        spectral_index=idx,
        residual_norm=res[0],
        residual_order=order,
        converged=converged,
        shooting_energy=shoot,
        r_max=spectrum.grid.r_max,
        note=note,
    )
