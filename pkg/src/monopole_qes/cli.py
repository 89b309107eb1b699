"""
Command-line front end: ``python -m monopole_qes <command> [options]``.

Commands
--------
spectrum   closed-form levels with the tuned potential parameter
potential  effective-potential profiles on a radial grid
verify     certify analytic levels against the numerical oracle
sweep      energies along a flux, curvature or orbital-number axis

Exit status is 0 on success, 1 when a verification fails and 2 for a
configuration problem (including a complex angular index).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import (
    PRESETS,
    SUITE_COEFFICIENTS,
    ConfigError,
    RunConfig,
    build_potential,
    load_config,
)
from .model import ConfigurationError, DomainError, NonPhysicalError, UnsupportedRegimeError, profile
from .oracle import OracleConvergenceError, RadialGrid, verify_analytic
from .spectra import energy_unconstrained, spectrum_record

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2

_USER_ERRORS = (ConfigurationError, DomainError, NonPhysicalError, UnsupportedRegimeError)


@dataclass
class OutputTable:
    header: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.metadata):
            buf.write(f"# {key}: {json.dumps(self.metadata[key], sort_keys=True)}\n")
        writer = csv.writer(buf, delimiter=",", lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([format_cell(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "metadata": self.metadata,
            "header": self.header,
            "rows": [[_json_cell(v) for v in row] for row in self.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "nan" if math.isnan(value) else f"{float(value):.12g}"
    return str(value)


def _json_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return None if math.isnan(value) else float(value)
    return value


def read_csv_table(text: str):
    """(header, rows) from CSV written by :class:`OutputTable`, metadata skipped."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def _metadata(cfg: RunConfig, command: str, **extra) -> dict:
    meta = {"command": command, "version": __version__, "config": cfg.to_dict()}
    meta.update(extra)
    return meta


def _label(value: float) -> str:
    return f"{value:.12g}"


# -- spectrum ---------------------------------------------------------------

def cmd_spectrum(cfg: RunConfig) -> OutputTable:
    """One row per requested mode: (n, l, j, <constrained parameter>, energy)."""
    spec = cfg.potential()
    geom, flux = cfg.geometry(), cfg.flux()
    records = [spectrum_record(n, l, spec, geom, flux) for n, l in cfg.modes]
    tag = records[0].constrained_param[0] if records else _constrained_tag(cfg.case)
    rows = [[r.n, r.l, r.j_or_variant, r.constrained_param[1], r.energy] for r in records]
    return OutputTable(["n", "l", "j", tag, "energy"], rows, _metadata(cfg, "spectrum"))


def _constrained_tag(case: str) -> str:
    if case in ("Kratzer", "ModifiedKratzer", "Coulomb"):
        return "omega"
    return "beta" if case == "MieOscillator" else "beta_m1"


# -- potential --------------------------------------------------------------

def _profile_combinations(cfg: RunConfig) -> list:
    combos = cfg.profiles if cfg.profiles is not None else [{}]
    out = []
    for c in combos:
        out.append((float(c.get("alpha", cfg.alpha)), float(c.get("phi_quanta", cfg.phi_quanta)), int(c.get("l", cfg.l))))
    return out


def cmd_potential(cfg: RunConfig, split: bool = False) -> list:
    """Effective-potential tables.

    Wide format (default) gives one table with a column per combination;
    ``split`` gives one two-column table per combination.
    """
    spec = cfg.potential()
    radii = np.linspace(cfg.grid.r_min, cfg.grid.r_max, cfg.grid.points)
    combos = _profile_combinations(cfg)
    columns = []
    for alpha, phi, l in combos:
        prof = profile(spec, cfg.geometry(alpha), l, cfg.flux(phi), radii)
        columns.append((f"V_eff[alpha={_label(alpha)};phi={_label(phi)};l={l}]", prof.values))

    if split:
        tables = []
        for (name, values), (alpha, phi, l) in zip(columns, combos):
            meta = _metadata(cfg, "potential", profile={"alpha": alpha, "phi_quanta": phi, "l": l})
            rows = [[float(r), float(v)] for r, v in zip(radii, values)]
            tables.append(OutputTable(["r", "V_eff"], rows, meta))
        return tables
    header = ["r"] + [name for name, _ in columns]
    rows = [[float(r)] + [float(vals[i]) for _, vals in columns] for i, r in enumerate(radii)]
    return [OutputTable(header, rows, _metadata(cfg, "potential"))]


# -- verify -----------------------------------------------------------------

VERIFY_HEADER = [
    "case", "alpha", "phi", "n", "l", "analytic_energy", "matched_energy", "rel_gap",
    "node_count", "spectral_index", "residual", "residual_order", "converged", "status",
]


def _suite_jobs(cfg: RunConfig) -> list:
    """(case, spec, alpha, phi, n, l, skip_nonphysical) tuples in a fixed order."""
    if cfg.verify is None:
        spec = cfg.potential()
        return [(cfg.case, spec, cfg.alpha, cfg.phi_quanta, n, l, False) for n, l in cfg.modes]
    suite = cfg.verify
    jobs = []
    for fam in suite.families:
        spec = build_potential(fam, dict(SUITE_COEFFICIENTS[fam], mass=cfg.mass))
        for alpha in suite.alpha:
            for phi in suite.phi:
                for n in suite.n:
                    for l in suite.l:
                        jobs.append((fam, spec, float(alpha), float(phi), int(n), int(l), True))
    return jobs


def cmd_verify(cfg: RunConfig, corrupt_energy: float = 0.0, shooting: bool = False) -> OutputTable:
    """Certify each analytic level; the table's ``exit_code`` carries the verdict.

    In an explicit mode list a complex angular index is reported as a
    ``nonphysical`` row (exit 2); suites skip such combinations.
    """
    header = VERIFY_HEADER + (["shooting_energy"] if shooting else [])
    rows, skipped = [], 0
    failed = nonphysical = False
    for case, spec, alpha, phi, n, l, skip in _suite_jobs(cfg):
        geom, flux = cfg.geometry(alpha), cfg.flux(phi)
        try:
            rec = spectrum_record(n, l, spec, geom, flux)
        except NonPhysicalError:
            if skip:
                skipped += 1
                continue
            nonphysical = True
            nan = float("nan")
            row = [case, alpha, phi, n, l, nan, nan, nan, -1, -1, nan, nan, False, "nonphysical"]
            rows.append(row + ([nan] if shooting else []))
            continue
        grid = None
        if cfg.oracle.r_max is not None:
            grid = RadialGrid.for_solver(cfg.oracle.r_max, cfg.oracle.points)
        rep = verify_analytic(rec, grid=grid, shooting=shooting, energy_offset=corrupt_energy)
        status = "ok" if rep.converged else "mismatch"
        failed |= not rep.converged
        row = [case, alpha, phi, n, l, rep.target_energy, rep.matched_energy, rep.rel_gap,
               rep.node_count, rep.spectral_index, rep.residual_norm, rep.residual_order,
               rep.converged, status]
        rows.append(row + ([rep.shooting_energy] if shooting else []))
    code = EXIT_CONFIG if nonphysical else (EXIT_VERIFY if failed else EXIT_OK)
    meta = _metadata(cfg, "verify", skipped_nonphysical=skipped, corrupt_energy=corrupt_energy)
    return OutputTable(header, rows, meta, code)


# -- sweep ------------------------------------------------------------------

def sweep_values(start: float, stop: float, step: float) -> list:
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def _energy_fn(cfg: RunConfig, spec):
    if cfg.constrained:
        return lambda n, l, geom, flux: spectrum_record(n, l, spec, geom, flux).energy
    return lambda n, l, geom, flux: energy_unconstrained(n, l, spec, geom, flux)


def cmd_sweep(cfg: RunConfig) -> OutputTable:
    s = cfg.sweep
    if s is None:
        raise ConfigError("sweep", "the sweep command needs a sweep block")
    spec = cfg.potential()
    energy = _energy_fn(cfg, spec)
    values = sweep_values(s.start, s.stop, s.step)
    meta = _metadata(cfg, "sweep", energies="constrained" if cfg.constrained else "fixed-potential")

    if s.axis == "phi":
        header = ["phi", "n", "l", "energy", "partner_l", "partner_energy", "difference"]
        rows = []
        geom = cfg.geometry()
        for phi in values:
            nu = int(round(phi - s.start))
            for n, l in cfg.modes:
                e = energy(n, l, geom, cfg.flux(phi))
                if l - nu >= 0:
                    partner = energy(n, l - nu, geom, cfg.flux(s.start))
                else:
                    partner = float("nan")
                rows.append([phi, n, l, e, l - nu, partner, e - partner])
        return OutputTable(header, rows, meta)

    if s.axis == "alpha":
        rows = [[a, n, l, energy(n, l, cfg.geometry(a), cfg.flux())] for a in values for n, l in cfg.modes]
        return OutputTable(["alpha", "n", "l", "energy"], rows, meta)

    # orbital-number axis with degeneracy flags per curvature value
    alphas = [float(a) for a in (s.alpha_values or [cfg.alpha])]
    ls = [int(v) for v in values]
    header = ["n", "l"]
    for a in alphas:
        header += [f"energy[alpha={_label(a)}]", f"degenerate[alpha={_label(a)}]"]
    radial = sorted({n for n, _ in cfg.modes}) or [1]
    rows = []
    for n in radial:
        table = {}
        for a in alphas:
            es = [energy(n, l, cfg.geometry(a), cfg.flux()) for l in ls]
            flags = [any(abs(e - o) < cfg.degeneracy_tol for k, o in enumerate(es) if k != i) for i, e in enumerate(es)]
            table[a] = (es, flags)
        for i, l in enumerate(ls):
            row = [n, l]
            for a in alphas:
                row += [table[a][0][i], table[a][1][i]]
            rows.append(row)
    return OutputTable(header, rows, meta)


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration, '-' for stdin")
    common.add_argument("--preset", choices=sorted(PRESETS), help="start from a named configuration")
    common.add_argument("--output", metavar="PATH", help="write here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")

    parser = argparse.ArgumentParser(prog="monopole-qes", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="closed-form levels")
    pot = sub.add_parser("potential", parents=[common], help="effective-potential profiles")
    pot.add_argument("--split", action="store_true", help="one output file per combination")
    ver = sub.add_parser("verify", parents=[common], help="certify levels against the oracle")
    ver.add_argument("--shooting", action="store_true", help="add a shooting-method cross-check column")
    ver.add_argument("--corrupt-energy", type=float, default=0.0, metavar="DELTA",
                     help="shift every analytic energy by DELTA (negative control)")
    sub.add_parser("sweep", parents=[common], help="energies along a parameter axis")
    return parser


def _read_config_text(path: Optional[str]) -> Optional[str]:
    if path is None:
        return None
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None


def _split_path(path: Path, index: int) -> Path:
    return path.with_name(f"{path.stem}_{index}{path.suffix}")


def _emit(tables: list, fmt: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write("".join(t.render(fmt) for t in tables))
        return
    target = Path(out)
    if len(tables) == 1:
        target.write_text(tables[0].render(fmt))
        return
    for i, t in enumerate(tables):
        _split_path(target, i).write_text(t.render(fmt))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(_read_config_text(args.config), args.preset)
        fmt = args.format or cfg.output.format
        out = args.output or cfg.output.path
        if args.command == "spectrum":
            tables = [cmd_spectrum(cfg)]
        elif args.command == "potential":
            if args.split and out is None:
                raise ConfigError("--output", "--split needs an output path")
            tables = cmd_potential(cfg, split=args.split)
        elif args.command == "verify":
            tables = [cmd_verify(cfg, args.corrupt_energy, args.shooting)]
        else:
            tables = [cmd_sweep(cfg)]
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OracleConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    _emit(tables, fmt, out)
    return max(t.exit_code for t in tables)


if __name__ == "__main__":
    sys.exit(main())
