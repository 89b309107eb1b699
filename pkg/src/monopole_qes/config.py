"""
Run configuration for the command-line front end.

A run is described by one flat JSON document whose keys follow the physical
symbols (``alpha``, ``phi_quanta``, ``beta_m1`` for the 1/r coefficient, ...).
Unknown keys are rejected so that typos never fall back to silent defaults.
"""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

from .model import (
    FAMILIES,
    ConfigurationError,
    DefectGeometry,
    FluxField,
    PotentialSpec,
)


class ConfigError(ConfigurationError):
    """Invalid run configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class GridSettings:
    r_min: float = 0.5
    r_max: float = 5.0
    points: int = 100


@dataclass
class OracleSettings:
    points: int = 400
    r_max: Optional[float] = None
    rtol: float = 1e-8


@dataclass
class SweepSettings:
    axis: str = "phi"
    start: float = 0.0
    stop: float = 1.0
    step: float = 0.1
    alpha_values: Optional[list] = None  # l sweeps: one column group per alpha


@dataclass
class VerifySuite:
    families: list = field(default_factory=lambda: ["MieOscillator", "Kratzer", "ModifiedKratzer", "Coulomb", "General"])
    n: list = field(default_factory=lambda: [1, 2])
    l: list = field(default_factory=lambda: [0, 1])
    alpha: list = field(default_factory=lambda: [1.0, 0.75])
    phi: list = field(default_factory=lambda: [0.0])


@dataclass
class OutputSettings:
    path: Optional[str] = None
    format: str = "csv"


@dataclass
class RunConfig:
    case: str = "MieOscillator"
    alpha: float = 1.0
    mass: float = 1.0
    phi_quanta: float = 0.0
    charge: float = 1.0
    beta: float = 0.0
    beta1: float = 0.0
    beta_m1: float = 0.0
    beta_m2: float = 0.0
    v0: float = 0.0
    omega: float = 0.0
    D_e: float = 0.0
    r0: float = 0.0
    eta_c: float = 0.0
    l: int = 0
    modes: list = field(default_factory=lambda: [[1, 0]])
    profiles: Optional[list] = None
    grid: GridSettings = field(default_factory=GridSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)
    sweep: Optional[SweepSettings] = None
    verify: Optional[VerifySuite] = None
    integer_flux: bool = False
    constrained: bool = False
    degeneracy_tol: float = 1e-9
    output: OutputSettings = field(default_factory=OutputSettings)

    # -- derived objects -------------------------------------------------

    def geometry(self, alpha=None) -> DefectGeometry:
        return DefectGeometry(self.alpha if alpha is None else alpha, self.mass)

    def flux(self, quanta=None) -> FluxField:
        return FluxField(self.phi_quanta if quanta is None else quanta, self.charge)

    def potential(self, case=None) -> PotentialSpec:
        return build_potential(case or self.case, asdict(self))

    def to_dict(self) -> dict:
        return asdict(self)


# Coefficients used when a verification suite expands a family.
SUITE_COEFFICIENTS = {
    "MieOscillator": dict(beta=1.0, beta_m1=1.0, beta_m2=1.0, v0=1.0),
    "Kratzer": dict(D_e=1.0, r0=1.0),
    "ModifiedKratzer": dict(D_e=1.0, r0=1.0),
    "Coulomb": dict(eta_c=1.0),
    "General": dict(beta=1.0, beta1=1.0, beta_m1=1.0, beta_m2=1.0, v0=1.0),
    "Pseudoharmonic": dict(beta=1.0, beta_m2=1.0, v0=0.0),
}


def build_potential(case: str, values: dict) -> PotentialSpec:
    get = lambda k: float(values.get(k, 0.0))  # noqa: E731
    mass = get("mass") or 1.0
    if case == "General":
        return PotentialSpec.general(get("beta"), get("beta1"), get("beta_m1"), get("beta_m2"), get("v0"))
    if case == "MieOscillator":
        return PotentialSpec.mie_oscillator(get("beta"), get("beta_m1"), get("beta_m2"), get("v0"))
    if case == "Pseudoharmonic":
        return PotentialSpec.pseudoharmonic(get("beta"), get("beta_m2"), get("v0"))
    if case == "Kratzer":
        return PotentialSpec.kratzer(get("D_e"), get("r0"), get("omega"), mass)
    if case == "ModifiedKratzer":
        return PotentialSpec.modified_kratzer(get("D_e"), get("r0"), get("omega"), mass)
    if case == "Coulomb":
        return PotentialSpec.coulomb(get("eta_c"), get("omega"), mass)
    raise ConfigError("case", f"unknown potential family {case!r}; expected one of {FAMILIES}")


_FIG1 = dict(case="MieOscillator", l=1, mass=1.0, beta=1.0, beta_m2=1.0, beta_m1=1.0, v0=1.0,
             grid=dict(r_min=0.5, r_max=5.0, points=100))
_FIG2 = dict(_FIG1, case="General", beta1=1.0)
_ALPHAS = [0.4, 0.6, 0.8, 1.0]
_PHIS = [0.25, 0.5, 0.75, 1.0]

PRESETS = {
    "fig1a": dict(_FIG1, phi_quanta=0.75, profiles=[{"alpha": a} for a in _ALPHAS]),
    "fig1b": dict(_FIG1, alpha=0.75, profiles=[{"phi_quanta": p} for p in _PHIS]),
    "fig1c": dict(_FIG1, alpha=0.75, phi_quanta=1.0, profiles=[{}]),
    "fig1d": dict(_FIG1, profiles=[{"alpha": a, "phi_quanta": p} for a in (0.5, 1.0) for p in (0.0, 1.0)]),
    "fig2a": dict(_FIG2, phi_quanta=0.75, profiles=[{"alpha": a} for a in _ALPHAS]),
    "fig2b": dict(_FIG2, alpha=0.75, profiles=[{"phi_quanta": p} for p in _PHIS]),
    "fig2c": dict(_FIG2, alpha=0.75, phi_quanta=0.75, profiles=[{"l": l} for l in range(4)]),
    "fig2d": dict(_FIG2, profiles=[{"alpha": a} for a in _ALPHAS]),
    "verify-default": dict(verify={}),
    "verify-acceptance": dict(
        verify=dict(l=[0, 1, 2], alpha=[1.0, 0.75, 0.5], phi=[0.0, 0.5, 0.75]),
    ),
}
FIGURE_PRESETS = tuple(k for k in PRESETS if k.startswith("fig"))

_NESTED = {
    "grid": GridSettings,
    "oracle": OracleSettings,
    "sweep": SweepSettings,
    "verify": VerifySuite,
    "output": OutputSettings,
}
_FLOAT_KEYS = {"alpha", "mass", "phi_quanta", "charge", "beta", "beta1", "beta_m1", "beta_m2",
               "v0", "omega", "D_e", "r0", "eta_c", "degeneracy_tol"}


def _number(key, value, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _build_nested(key, cls, raw):
    if not isinstance(raw, dict):
        raise ConfigError(key, "expected an object")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(raw) - names)
    if unknown:
        raise ConfigError(f"{key}.{unknown[0]}", "unknown key")
    return cls(**raw)


def parse_config(raw: dict) -> RunConfig:
    """Validate a decoded JSON document into a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    names = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(raw) - names)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")

    kw = {}
    for key, value in raw.items():
        if key in _NESTED:
            kw[key] = None if value is None else _build_nested(key, _NESTED[key], value)
        elif key in _FLOAT_KEYS:
            kw[key] = _number(key, value)
        elif key == "l":
            kw[key] = _number(key, value, integer=True)
        elif key in ("integer_flux", "constrained"):
            if not isinstance(value, bool):
                raise ConfigError(key, "expected true or false")
            kw[key] = value
        else:
            kw[key] = value
    cfg = RunConfig(**kw)
    validate(cfg)
    return cfg


def _check_modes(modes):
    if not isinstance(modes, list):
        raise ConfigError("modes", "expected a list of [n, l] pairs")
    out = []
    for i, pair in enumerate(modes):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise ConfigError(f"modes[{i}]", "expected an [n, l] pair")
        n = _number(f"modes[{i}].n", pair[0], integer=True)
        l = _number(f"modes[{i}].l", pair[1], integer=True)
        if n < 1:
            raise ConfigError(f"modes[{i}].n", "radial mode must be >= 1")
        if l < 0:
            raise ConfigError(f"modes[{i}].l", "orbital number must be >= 0")
        out.append([n, l])
    return out


def validate(cfg: RunConfig) -> None:
    if cfg.case not in FAMILIES:
        raise ConfigError("case", f"unknown potential family {cfg.case!r}")
    if not (0.0 < cfg.alpha <= 1.0):
        raise ConfigError("alpha", "must lie in (0, 1]")
    if not cfg.mass > 0.0:
        raise ConfigError("mass", "must be positive")
    if cfg.phi_quanta < 0.0:
        raise ConfigError("phi_quanta", "must be >= 0")
    if cfg.integer_flux and not float(cfg.phi_quanta).is_integer():
        raise ConfigError("phi_quanta", "integer flux quanta required (integer_flux is set)")
    if cfg.charge == 0.0:
        raise ConfigError("charge", "must be nonzero")
    if cfg.l < 0:
        raise ConfigError("l", "must be >= 0")
    cfg.modes = _check_modes(cfg.modes)

    if cfg.verify is not None:
        pass  # suites build their own potentials
    elif cfg.case in ("Kratzer", "ModifiedKratzer"):
        if not cfg.D_e > 0.0:
            raise ConfigError("D_e", f"{cfg.case} needs D_e > 0")
        if not cfg.r0 > 0.0:
            raise ConfigError("r0", f"{cfg.case} needs r0 > 0")
    elif cfg.case == "Coulomb":
        if not cfg.eta_c > 0.0:
            raise ConfigError("eta_c", "Coulomb case needs eta_c > 0")
    elif not cfg.beta > 0.0:
        raise ConfigError("beta", f"{cfg.case} needs a confining beta > 0")

    g = cfg.grid
    for key in ("r_min", "r_max"):
        _number(f"grid.{key}", getattr(g, key))
    _number("grid.points", g.points, integer=True)
    if not g.r_min > 0.0:
        raise ConfigError("grid.r_min", "radii must be positive")
    if not g.r_max > g.r_min:
        raise ConfigError("grid.r_max", "must exceed grid.r_min")
    if g.points < 2:
        raise ConfigError("grid.points", "need at least 2 points")

    o = cfg.oracle
    _number("oracle.points", o.points, integer=True)
    if o.points < 200:
        raise ConfigError("oracle.points", "need at least 200 points")
    if o.r_max is not None and not _number("oracle.r_max", o.r_max) > 0.0:
        raise ConfigError("oracle.r_max", "must be positive")
    if not _number("oracle.rtol", o.rtol) > 0.0:
        raise ConfigError("oracle.rtol", "must be positive")

    if cfg.profiles is not None:
        if not isinstance(cfg.profiles, list):
            raise ConfigError("profiles", "expected a list of objects")
        for i, p in enumerate(cfg.profiles):
            if not isinstance(p, dict):
                raise ConfigError(f"profiles[{i}]", "expected an object")
            for key, value in p.items():
                if key not in ("alpha", "phi_quanta", "l"):
                    raise ConfigError(f"profiles[{i}].{key}", "unknown key")
                _number(f"profiles[{i}].{key}", value, integer=key == "l")
            a = p.get("alpha", cfg.alpha)
            if not (0.0 < a <= 1.0):
                raise ConfigError(f"profiles[{i}].alpha", "must lie in (0, 1]")
            if p.get("phi_quanta", 0.0) < 0.0:
                raise ConfigError(f"profiles[{i}].phi_quanta", "must be >= 0")
            if p.get("l", 0) < 0:
                raise ConfigError(f"profiles[{i}].l", "must be >= 0")

    s = cfg.sweep
    if s is not None:
        if s.axis not in ("phi", "alpha", "l"):
            raise ConfigError("sweep.axis", "expected phi, alpha or l")
        for key in ("start", "stop", "step"):
            _number(f"sweep.{key}", getattr(s, key))
        if not s.step > 0.0:
            raise ConfigError("sweep.step", "must be positive")
        if s.stop < s.start:
            raise ConfigError("sweep.stop", "must not be below sweep.start")
        if s.axis == "alpha" and not (0.0 < s.start and s.stop <= 1.0):
            raise ConfigError("sweep.start", "alpha range must lie in (0, 1]")
        if s.axis == "phi" and s.start < 0.0:
            raise ConfigError("sweep.start", "flux must be >= 0")
        if s.axis == "l":
            if s.start < 0 or int(s.start) != s.start or int(s.step) != s.step:
                raise ConfigError("sweep.start", "l sweeps need integer start and step >= 0")
            for a in s.alpha_values or []:
                if not (0.0 < _number("sweep.alpha_values", a) <= 1.0):
                    raise ConfigError("sweep.alpha_values", "alpha must lie in (0, 1]")

    v = cfg.verify
    if v is not None:
        for fam in v.families:
            if fam not in FAMILIES:
                raise ConfigError("verify.families", f"unknown family {fam!r}")
        for n in v.n:
            if _number("verify.n", n, integer=True) < 1:
                raise ConfigError("verify.n", "radial mode must be >= 1")
        for l in v.l:
            if _number("verify.l", l, integer=True) < 0:
                raise ConfigError("verify.l", "orbital number must be >= 0")
        for a in v.alpha:
            if not (0.0 < _number("verify.alpha", a) <= 1.0):
                raise ConfigError("verify.alpha", "alpha must lie in (0, 1]")
        for p in v.phi:
            if _number("verify.phi", p) < 0.0:
                raise ConfigError("verify.phi", "flux must be >= 0")

    if cfg.output.format not in ("csv", "json"):
        raise ConfigError("output.format", "expected csv or json")
    if not cfg.degeneracy_tol > 0.0:
        raise ConfigError("degeneracy_tol", "must be positive")


def merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(text: Optional[str] = None, preset: Optional[str] = None) -> RunConfig:
    """Decode JSON ``text`` on top of an optional named preset."""
    raw = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("preset", f"unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
        raw = copy.deepcopy(PRESETS[preset])
    if text is not None and text.strip():
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<json>", str(exc)) from None
        if not isinstance(doc, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
        raw = merge(raw, doc)
    return parse_config(raw)
