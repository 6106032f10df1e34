"""
Command-line front end.

Every subcommand writes CSV (default) or JSON.  CSV output starts with
``#`` comment lines that echo the package version and the fully resolved
configuration, so any file can be regenerated from its own header.

Parameters come from, in increasing priority: built-in defaults, a
``key = value`` config file given with ``--config``, and explicit flags.
Angles are in degrees and energies in eV unless the flag name says keV.

Exit status: 0 on success, 1 for invalid parameters, 2 for numerical
non-convergence or a failed oracle check.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .amplitudes import HelicityLabels, m_coefficient
from .epa import epa_polarization, epa_pl_reference, epa_mean_helicity_reference
from .errors import ConvergenceError, DomainError
from .evolved import (
    CSV_FIELDS,
    ModeTruncation,
    SpaceTimePoint,
    coefficient_rows,
    evolved_pw_coefficients,
    evolved_pw_state,
    evolved_tw_coefficients,
    evolved_tw_state,
    default_omega_truncation,
    sample_wavefunction,
)
from .kinematics import M_E, MediumModel, cherenkov_angle, total_energy
from .observables import MapGrid, pl_curve, pl_map
from .oracles import run_oracle_suite

COMMANDS = ("cone", "amplitude", "evolved-pw", "evolved-tw", "polarization-curve",
            "polarization-map", "epa", "oracle-check", "sample-wf", "figure")


class Table:
    """Column names plus rows; rendered as CSV or JSON."""

    def __init__(self, columns: Sequence[str], rows: Sequence[Sequence[Any]]):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]


def fmt(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if math.isnan(x):
            return ""
        return "%.9g" % (x + 0.0)
    return str(x)


def _json_value(x: Any) -> Any:
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return None if math.isnan(x) else float("%.9g" % x)
    return x


def header_lines(command: str, config: Dict[str, Any]) -> List[str]:
    lines = [f"vc_twist {__version__}", f"command = {command}"]
    lines += [f"{k} = {config[k]}" for k in sorted(config)]
    return lines


def render(table: Table, command: str, config: Dict[str, Any], form: str) -> str:
    if form == "json":
        doc = {"version": __version__, "command": command, "config": config,
               "columns": table.columns,
               "rows": [{c: _json_value(v) for c, v in zip(table.columns, r)} for r in table.rows]}
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    for line in header_lines(command, config):
        buf.write(f"# {line}\n")
    buf.write(",".join(table.columns) + "\n")
    for r in table.rows:
        buf.write(",".join(fmt(v) for v in r) + "\n")
    return buf.getvalue()


# -----------------------------------------------------------------------------
# Parameter handling
# -----------------------------------------------------------------------------


def _electron_energy(cfg: Dict[str, Any]) -> float:
    if cfg.get("energy_eV") is not None:
        E = float(cfg["energy_eV"])
    else:
        E = total_energy(float(cfg["kinetic_keV"]) * 1e3)
    if E <= M_E:
        raise DomainError("electron energy must exceed the rest mass")
    return E


def _medium(cfg: Dict[str, Any]) -> MediumModel:
    if cfg.get("medium_file"):
        return MediumModel.from_table_file(cfg["medium_file"])
    n = float(cfg["n"])
    if n <= 1:
        raise DomainError("refractive index must exceed 1 for Cherenkov emission")
    return MediumModel.constant(n)


def _half(x: Any) -> float:
    # accepts 0.5, -1/2, 3/2 ...
    s = str(x).strip()
    if "/" in s:
        a, b = s.split("/")
        return float(a) / float(b)
    return float(s)


def _truncation(cfg: Dict[str, Any]) -> ModeTruncation:
    return ModeTruncation(max_abs_m=int(cfg["max_abs_m"]), theta_grid_size=int(cfg.get("theta_grid_size", 32)))


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------


def cmd_cone(cfg):
    E = _electron_energy(cfg)
    medium = _medium(cfg)
    omega = float(cfg["omega_eV"])
    theta0 = cherenkov_angle(E, omega, medium)
    return Table(["omega_eV", "n", "theta0_deg"], [[omega, medium.n(omega), math.degrees(theta0)]])


def cmd_amplitude(cfg):
    E = _electron_energy(cfg)
    omega = float(cfg["omega_eV"])
    th, thp, thg = (math.radians(float(cfg[k])) for k in ("theta_deg", "theta_p_deg", "theta_g_deg"))
    rows = []
    for l2 in (1, -1):
        for lp2 in (1, -1):
            for lg in (1, -1):
                for s2 in (1, -1):
                    for sg in (0, s2):
                        labels = HelicityLabels(l2 / 2, lp2 / 2, lg, s2 / 2, sg)
                        rows.append([l2, lp2, lg, s2, sg, m_coefficient(labels, E, omega, th, thp, thg)])
    return Table(["lambda2", "lambda_prime2", "lambda_gamma", "sigma2", "sigma_gamma", "M"], rows)


def _omega_mode(cfg) -> bool:
    return cfg.get("omega_eV") is not None


def cmd_evolved_pw(cfg):
    E = _electron_energy(cfg)
    medium = _medium(cfg)
    tr = _truncation(cfg)
    lam = _half(cfg["lambda"])
    if _omega_mode(cfg):
        coeffs = evolved_pw_coefficients(E, lam, medium, float(cfg["omega_eV"]), tr)
    else:
        tr = default_omega_truncation(E, medium, float(cfg["omega_min_eV"]), float(cfg["omega_max_eV"]),
                                      int(cfg["n_omega"]), tr.max_abs_m)
        coeffs = evolved_pw_state(E, lam, medium, tr)
    return Table(list(CSV_FIELDS), coefficient_rows(coeffs))


def cmd_evolved_tw(cfg):
    E = _electron_energy(cfg)
    medium = _medium(cfg)
    tr = _truncation(cfg)
    lam, m = _half(cfg["lambda"]), _half(cfg["m"])
    theta = math.radians(float(cfg["theta_deg"]))
    omega = float(cfg["omega_eV"])
    if cfg.get("theta_g_deg") is not None:
        coeffs = evolved_tw_coefficients(E, lam, m, theta, medium, omega,
                                         math.radians(float(cfg["theta_g_deg"])), tr)
    else:
        tr = ModeTruncation(max_abs_m=tr.max_abs_m, omega_grid=(omega,), theta_grid_size=tr.theta_grid_size)
        coeffs = evolved_tw_state(E, lam, m, theta, medium, tr)
    return Table(list(CSV_FIELDS), coefficient_rows(coeffs))


def cmd_polarization_curve(cfg):
    pts = pl_curve(math.radians(float(cfg["theta_deg"])), math.radians(float(cfg["theta0_deg"])),
                   int(cfg["m_gamma"]), int(cfg["n_points"]))
    return Table(["theta_g_deg", "P_l"], [[math.degrees(p.theta_g), p.P_l] for p in pts])


def _axis(lo, hi, n) -> np.ndarray:
    return np.radians(np.linspace(float(lo), float(hi), int(n)))


def cmd_polarization_map(cfg):
    grid = MapGrid(theta=_axis(cfg["theta_min_deg"], cfg["theta_max_deg"], cfg["n_theta"]),
                   theta_g=_axis(cfg["theta_g_min_deg"], cfg["theta_g_max_deg"], cfg["n_theta_g"]))
    res = pl_map(math.radians(float(cfg["theta0_deg"])), int(cfg["m_gamma"]), grid)
    rows = []
    for i, th in enumerate(res.theta):
        for j, tg in enumerate(res.theta_g):
            rows.append([math.degrees(th), math.degrees(tg), float(res.values[i, j])])
    return Table(["theta_deg", "theta_g_deg", "P_l"], rows)


def cmd_epa(cfg):
    E = _electron_energy(cfg)
    lam = _half(cfg["lambda"])
    theta_g = math.radians(float(cfg["theta_g_deg"]))
    if cfg.get("omega_eV") is not None:
        omegas = [float(cfg["omega_eV"])]
    else:
        omegas = list(np.linspace(float(cfg["x_min"]), float(cfg["x_max"]), int(cfg["n_x"])) * E)
    rows = []
    for w in omegas:
        pol = epa_polarization(E, lam, w, theta_g)
        rows.append([w, w / E, math.degrees(theta_g), pol.g1, pol.g2, pol.P_l, epa_pl_reference(E, w),
                     pol.mean_helicity, epa_mean_helicity_reference(E, w, lam)])
    return Table(["omega_eV", "x", "theta_g_deg", "g1", "g2", "P_l", "P_l_leading", "mean_helicity",
                  "mean_helicity_leading"], rows)


def cmd_oracle_check(cfg):
    results = run_oracle_suite(int(cfg["n_cases"]), int(cfg["seed"]))
    for r in results:
        print(r.line(), file=sys.stderr)
    table = Table(["check", "error", "tolerance", "passed"],
                  [[r.name, r.error, r.tolerance, r.passed] for r in results])
    table.failed = not all(r.passed for r in results)
    return table


def _point(cfg, prefix: str) -> SpaceTimePoint:
    return SpaceTimePoint(t=float(cfg[f"{prefix}_t"]), r_perp=float(cfg[f"{prefix}_r"]),
                          phi_r=math.radians(float(cfg[f"{prefix}_phi_deg"])), z=float(cfg[f"{prefix}_z"]))


def cmd_sample_wf(cfg):
    E = _electron_energy(cfg)
    medium = _medium(cfg)
    tr = _truncation(cfg)
    lam = _half(cfg["lambda"])
    omega = float(cfg["omega_eV"])
    if cfg.get("m") is None:
        coeffs = evolved_pw_coefficients(E, lam, medium, omega, tr)
    else:
        tr = ModeTruncation(max_abs_m=tr.max_abs_m, omega_grid=(omega,), theta_grid_size=tr.theta_grid_size)
        coeffs = evolved_tw_state(E, lam, _half(cfg["m"]), math.radians(float(cfg["theta_deg"])), medium, tr)
    s = sample_wavefunction(coeffs, _point(cfg, "xe"), _point(cfg, "xg"), tail_tol=float(cfg["tail_tol"]))
    rows = [[a, b, complex(s.values[a, b]).real, complex(s.values[a, b]).imag, s.tail_estimate, s.warning]
            for a in range(4) for b in range(3)]
    return Table(["spinor_index", "vector_index", "re", "im", "tail_estimate", "warning"], rows)


HANDLERS: Dict[str, Callable[[Dict[str, Any]], Table]] = {
    "cone": cmd_cone,
    "amplitude": cmd_amplitude,
    "evolved-pw": cmd_evolved_pw,
    "evolved-tw": cmd_evolved_tw,
    "polarization-curve": cmd_polarization_curve,
    "polarization-map": cmd_polarization_map,
    "epa": cmd_epa,
    "oracle-check": cmd_oracle_check,
    "sample-wf": cmd_sample_wf,
}


# -----------------------------------------------------------------------------
# Figure data
# -----------------------------------------------------------------------------

FIG3_THETAS = (6.0, 12.0, 18.0)
FIG4_M_GAMMAS = (1, 4)


def emit_figure_data(which: str, overrides: Optional[Dict[str, Any]] = None,
                     out_dir: str = ".", form: str = "csv") -> List[Path]:
    """Write the curve (fig3) or map (fig4) files; returns their paths."""
    cfg = dict(FIGURE_DEFAULTS[which])
    cfg.update({k: v for k, v in (overrides or {}).items() if v is not None})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    ext = "json" if form == "json" else "csv"
    if which == "fig3":
        thetas = [float(t) for t in str(cfg["thetas_deg"]).split(",")]
        for th in thetas:
            sub = {"theta0_deg": cfg["theta0_deg"], "theta_deg": th, "m_gamma": cfg["m_gamma"],
                   "n_points": cfg["n_points"]}
            path = out / f"fig3_theta{th:g}_m{int(cfg['m_gamma'])}.{ext}"
            path.write_text(render(cmd_polarization_curve(sub), "polarization-curve", sub, form),
                            encoding="utf-8", newline="\n")
            paths.append(path)
    elif which == "fig4":
        for mg in [int(x) for x in str(cfg["m_gammas"]).split(",")]:
            sub = {k: cfg[k] for k in ("theta0_deg", "theta_min_deg", "theta_max_deg", "n_theta",
                                       "theta_g_min_deg", "theta_g_max_deg", "n_theta_g")}
            sub["m_gamma"] = mg
            path = out / f"fig4_m{mg}.{ext}"
            path.write_text(render(cmd_polarization_map(sub), "polarization-map", sub, form),
                            encoding="utf-8", newline="\n")
            paths.append(path)
    else:
        raise DomainError(f"unknown figure {which!r}")
    return paths


FIGURE_DEFAULTS = {
    "fig3": {"theta0_deg": 14.5, "thetas_deg": "6,12,18", "m_gamma": 1, "n_points": 401},
    "fig4": {"theta0_deg": 14.5, "m_gammas": "1,4", "theta_min_deg": 0.5, "theta_max_deg": 30.0,
             "n_theta": 120, "theta_g_min_deg": 0.5, "theta_g_max_deg": 45.0, "n_theta_g": 180},
}


# -----------------------------------------------------------------------------
# Parser
# -----------------------------------------------------------------------------

ELECTRON = {"kinetic_keV": 300.0, "energy_eV": None, "n": 1.33, "medium_file": None}
DEFAULTS: Dict[str, Dict[str, Any]] = {
    "cone": {**ELECTRON, "omega_eV": 2.25},
    "amplitude": {**ELECTRON, "omega_eV": 2.25, "theta_deg": 0.0, "theta_p_deg": 0.0, "theta_g_deg": 14.5},
    "evolved-pw": {**ELECTRON, "lambda": "1/2", "omega_eV": None, "omega_min_eV": 1.5,
                   "omega_max_eV": 3.5, "n_omega": 16, "max_abs_m": 4},
    "evolved-tw": {**ELECTRON, "lambda": "1/2", "m": "1/2", "theta_deg": 12.0, "omega_eV": 2.25,
                   "theta_g_deg": None, "max_abs_m": 4, "theta_grid_size": 16},
    "polarization-curve": {"theta0_deg": 14.5, "theta_deg": 12.0, "m_gamma": 1, "n_points": 201},
    "polarization-map": {"theta0_deg": 14.5, "m_gamma": 1, "theta_min_deg": 0.5, "theta_max_deg": 30.0,
                         "n_theta": 60, "theta_g_min_deg": 0.5, "theta_g_max_deg": 45.0, "n_theta_g": 90},
    "epa": {"kinetic_keV": None, "energy_eV": 5.11e9, "lambda": "1/2", "theta_g_deg": 0.5,
            "omega_eV": None, "x_min": 0.001, "x_max": 0.05, "n_x": 50},
    "oracle-check": {"n_cases": 50, "seed": 12345},
    "sample-wf": {**ELECTRON, "lambda": "1/2", "m": None, "theta_deg": 12.0, "omega_eV": 2.25,
                  "max_abs_m": 32, "theta_grid_size": 16, "tail_tol": 1e-6,
                  "xe_t": 0.0, "xe_r": 1e-6, "xe_phi_deg": 0.0, "xe_z": 0.0,
                  "xg_t": 0.0, "xg_r": 1e-6, "xg_phi_deg": 0.0, "xg_z": 0.0},
}
TYPES = {"kinetic_keV": float, "energy_eV": float, "n": float, "medium_file": str, "omega_eV": float,
         "omega_min_eV": float, "omega_max_eV": float, "n_omega": int, "theta_deg": float,
         "theta_p_deg": float, "theta_g_deg": float, "theta0_deg": float, "lambda": str, "m": str,
         "m_gamma": int, "n_points": int, "max_abs_m": int, "theta_grid_size": int,
         "theta_min_deg": float, "theta_max_deg": float, "n_theta": int, "theta_g_min_deg": float,
         "theta_g_max_deg": float, "n_theta_g": int, "x_min": float, "x_max": float, "n_x": int,
         "n_cases": int, "seed": int, "tail_tol": float, "xe_t": float, "xe_r": float,
         "xe_phi_deg": float, "xe_z": float, "xg_t": float, "xg_r": float, "xg_phi_deg": float,
         "xg_z": float, "thetas_deg": str, "m_gammas": str}


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vc-twist", description="Vavilov-Cherenkov emission by twisted electrons")
    parser.add_argument("--version", action="version", version=f"vc_twist {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        keys = FIGURE_DEFAULTS["fig3"].keys() | FIGURE_DEFAULTS["fig4"].keys() if cmd == "figure" else DEFAULTS[cmd]
        if cmd == "figure":
            p.add_argument("which", choices=("fig3", "fig4"))
            p.add_argument("--out-dir", default=".")
        for key in sorted(keys):
            # SUPPRESS keeps unset flags out of the namespace so the config file can fill them
            p.add_argument(_flag(key), dest=key, type=TYPES[key], default=argparse.SUPPRESS)
        p.add_argument("--config", default=None, help="key = value file; explicit flags take precedence")
        if cmd != "figure":
            p.add_argument("--output", "-o", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def read_config_file(path: str, allowed: Sequence[str]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in allowed:
            raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = None if value.lower() in ("", "none") else TYPES[key](value)
    return out


def resolve_config(args: argparse.Namespace) -> Dict[str, Any]:
    cmd = args.command
    base = dict(FIGURE_DEFAULTS[args.which]) if cmd == "figure" else dict(DEFAULTS[cmd])
    allowed = list(FIGURE_DEFAULTS["fig3"].keys() | FIGURE_DEFAULTS["fig4"].keys()) if cmd == "figure" \
        else list(DEFAULTS[cmd])
    if args.config:
        base.update(read_config_file(args.config, allowed))
    ns = vars(args)
    base.update({k: ns[k] for k in allowed if k in ns})
    # an explicitly given energy overrides the kinetic default and vice versa
    if "energy_eV" in ns and "kinetic_keV" not in ns and "kinetic_keV" in base:
        base["kinetic_keV"] = None
    if "kinetic_keV" in ns and "energy_eV" in base and "energy_eV" not in ns:
        base["energy_eV"] = None
    if cmd == "figure":
        base = {k: v for k, v in base.items() if k in FIGURE_DEFAULTS[args.which]}
    return base


def _write(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "figure":
            paths = emit_figure_data(args.which, cfg, args.out_dir, args.format)
            for p in paths:
                print(p)
            return 0
        table = HANDLERS[args.command](cfg)
        _write(render(table, args.command, cfg, args.format), args.output)
        if getattr(table, "failed", False):
            return 2
        return 0
    except ConvergenceError as exc:
        print(f"error: numerical non-convergence: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
