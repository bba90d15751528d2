"""Command-line interface: ``dwpurity {evolve,qfunction,sweep,critical}``.

Data go to CSV (or a single JSON document with ``--format json``); scalars,
fits and the fully resolved configuration go to a JSON sidecar next to the
CSV. Exit codes: 0 ok, 2 validation, 3 numeric failure, 4 range error.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import backend_name
from .errors import ContractError, CriticalRangeError, NumericalError, ValidationError
from .model import derive_params, params_from_eta
from .observables import SphereGrid, angular_separation, count_local_maxima, generalized_purity, husimi_q
from .qpt import (
    DEFAULT_LADDER,
    DegeneracyWarning,
    critical_ladder,
    find_critical,
    gp_vs_x,
    highest_energy_state,
    planted_points,
    power_law_fit,
    uniform_grid,
)
from .spectral import evolve_series
from .spin_algebra import SpinSpace, build_spin_operators, coherent_state

SIG = 9

PRESETS = {
    "fig1-mst": {"command": "evolve", "n": 100, "omega": 1.0, "kappa_n": 2.0, "eta_ratio": 0.01,
                 "theta0": math.pi / 2, "phi0": 0.0, "tmax": 300.0, "dt": 0.05},
    "fig1-jo": {"command": "evolve", "n": 100, "omega": 1.0, "kappa_n": 2.0, "eta_ratio": 0.1,
                "theta0": math.pi / 2, "phi0": 0.0, "tmax": 300.0, "dt": 0.05},
    "fig2a": {"command": "qfunction", "n": 100, "omega": 1.0, "kappa_n": 0.0, "eta_ratio": 0.0,
              "top_eigenstate": True},
    "fig2b": {"command": "qfunction", "n": 100, "omega": 1.0, "kappa_n": 0.5, "eta_ratio": 0.0,
              "top_eigenstate": True},
    "fig2c": {"command": "qfunction", "n": 100, "omega": 1.0, "kappa_n": 1.0, "eta_ratio": 0.0,
              "top_eigenstate": True},
    "fig2d": {"command": "qfunction", "n": 100, "omega": 1.0, "kappa_n": 2.0, "eta_ratio": 0.1,
              "top_eigenstate": True},
    "fig3": {"command": "sweep", "n_ladder": [50, 100, 200, 400], "omega": 1.0, "epsilon": 0.0,
             "x_min": 0.0, "x_max": 2.0, "x_step": 0.002},
    "fig4": {"command": "sweep", "n_ladder": [50, 100, 200, 400], "omega": 1.0, "epsilon": 0.0,
             "x_min": 0.0, "x_max": 2.0, "x_step": 0.002},
}

DEFAULTS = {
    "evolve": {"n": 100, "omega": 1.0, "kappa": 0.0, "epsilon": 0.0, "theta0": math.pi / 2,
               "phi0": 0.0, "tmax": 300.0, "dt": 0.05},
    "qfunction": {"n": 100, "omega": 1.0, "kappa": 0.0, "epsilon": 0.0, "theta0": math.pi / 2,
                  "phi0": 0.0, "grid_theta": 128, "grid_phi": 256, "floor": 0.2,
                  "top_eigenstate": False},
    "sweep": {"n_ladder": [50, 100, 200, 400], "omega": 1.0, "epsilon": 0.0,
              "x_min": 0.0, "x_max": 2.0, "x_step": 0.002},
    "critical": {"n_ladder": list(DEFAULT_LADDER), "omega": 1.0, "epsilon": 0.0,
                 "x_min": 0.0, "x_max": 2.0, "x_step": 0.002, "self_test": False},
}


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if v == 0.0:
        return "0"
    return format(v, f".{SIG}g")


def _round(v):
    """JSON-safe value with the same fixed precision as the CSV."""
    if isinstance(v, dict):
        return {k: _round(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_round(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(fmt(v))
    return v


# -- argument parsing ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("validation", message)
        sys.exit(2)


def _ladder(text):
    try:
        out = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty N ladder")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--omega", type=float)
    common.add_argument("--output", "-o", required=True, help="data file path")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the creation time from metadata (golden-file runs)")

    model = _Parser(add_help=False)
    model.add_argument("--n", type=int, help="number of particles N")
    model.add_argument("--kappa", type=float)
    cross = model.add_mutually_exclusive_group()
    cross.add_argument("--eta", type=float, help="cross-collision rate; sets epsilon = sqrt(eta/kappa)")
    cross.add_argument("--epsilon", type=float, help="mode overlap in [0, 1)")

    state = _Parser(add_help=False)
    state.add_argument("--theta0", type=float)
    state.add_argument("--phi0", type=float)

    xgrid = _Parser(add_help=False)
    xgrid.add_argument("--x-min", type=float)
    xgrid.add_argument("--x-max", type=float)
    xgrid.add_argument("--x-step", type=float)
    xgrid.add_argument("--n-ladder", type=_ladder, help="comma-separated particle numbers")
    xgrid.add_argument("--epsilon", type=float, help="fixed mode overlap during the sweep")

    p = _Parser(prog="dwpurity", description="Two-mode BEC in a symmetric double well: "
                "generalized purity, Q-function and top-state transition.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("evolve", parents=[common, model, state], help="GP and Bloch vector versus Omega t")
    ev.add_argument("--tmax", type=float)
    ev.add_argument("--dt", type=float)

    qf = sub.add_parser("qfunction", parents=[common, model, state], help="Husimi Q on the sphere")
    qf.add_argument("--top-eigenstate", action="store_true", default=None,
                    help="use the highest-energy eigenstate instead of a coherent state")
    qf.add_argument("--grid-theta", type=int)
    qf.add_argument("--grid-phi", type=int)
    qf.add_argument("--floor", type=float, help="relative floor for peak detection")

    sw = sub.add_parser("sweep", parents=[common, xgrid], help="top-state GP versus x = kappa N / Omega")
    sw.add_argument("--n", type=int, help="single N (overrides --n-ladder)")

    cr = sub.add_parser("critical", parents=[common, xgrid], help="critical points and power-law fit")
    cr.add_argument("--self-test", action="store_true", default=None,
                    help="fit a planted power law instead of running sweeps")
    return p


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS[args.command])
    if args.preset:
        preset = PRESETS[args.preset]
        if preset["command"] != args.command:
            raise ValidationError("preset", f"{args.preset} belongs to '{preset['command']}', "
                                  f"not '{args.command}'")
        cfg.update({k: v for k, v in preset.items() if k != "command"})
        if "kappa_n" in preset:
            cfg.pop("kappa", None)
        if "eta_ratio" in preset:
            cfg.pop("epsilon", None)
    explicit = {k: v for k, v in vars(args).items()
                if v is not None and k not in ("command", "preset", "output", "format", "no_timestamp")}
    if "kappa" in explicit:
        cfg.pop("kappa_n", None)
    if "eta" in explicit or "epsilon" in explicit:
        cfg.pop("eta_ratio", None)
        cfg.pop("epsilon", None)
    if args.command == "sweep" and "n" in explicit:
        cfg["n_ladder"] = [explicit.pop("n")]
    cfg.update(explicit)
    cfg["command"] = args.command
    cfg["preset"] = args.preset
    cfg["format"] = args.format
    return cfg


def model_params(cfg):
    n, omega = cfg["n"], cfg["omega"]
    if not isinstance(n, int) or n < 1:
        raise ValidationError("n", f"must be a positive integer, got {n!r}")
    if omega is None or not omega > 0:
        raise ValidationError("omega", f"must be > 0, got {omega!r}")
    kappa = cfg["kappa"] if "kappa" in cfg else cfg["kappa_n"] * omega / n
    if "eta" in cfg:
        return params_from_eta(omega, kappa, cfg["eta"], n)
    if "eta_ratio" in cfg:
        return params_from_eta(omega, kappa, cfg["eta_ratio"] * kappa, n)
    return derive_params(omega, kappa, cfg.get("epsilon", 0.0), n)


# -- output -------------------------------------------------------------------

def _sidecar_path(output: Path) -> Path:
    return output.with_suffix(".json") if output.suffix.lower() == ".csv" else Path(str(output) + ".json")


def write_outputs(output, fmt_tag, columns, rows, metadata, no_timestamp):
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    meta = _round(metadata)
    meta["backend"] = backend_name()
    meta["version"] = __version__
    if not no_timestamp:
        meta["created"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    if fmt_tag == "json":
        doc = {"metadata": meta, "columns": list(columns),
               "rows": [[_round(v) for v in row] for row in rows]}
        output.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return [output]
    lines = [",".join(columns)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    output.write_text("\n".join(lines) + "\n")
    side = _sidecar_path(output)
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return [output, side]


# -- subcommands --------------------------------------------------------------

def _time_grid(cfg):
    tmax, dt = cfg["tmax"], cfg["dt"]
    if not dt > 0:
        raise ValidationError("dt", f"must be > 0, got {dt}")
    if tmax < 0:
        raise ValidationError("tmax", f"must be >= 0, got {tmax}")
    count = int(math.floor(tmax / dt + 1e-9)) + 1
    return dt * np.arange(count)


def cmd_evolve(cfg):
    params = model_params(cfg)
    space = SpinSpace(params.n_particles)
    ops = build_spin_operators(space)
    psi0 = coherent_state(space, cfg["theta0"], cfg["phi0"], ops)
    series = evolve_series(params, space, psi0, _time_grid(cfg))
    meta = {"command": "evolve", "config": cfg, "params": params.as_dict(),
            "time_unit": "Omega t", "components_normalized_by": "J"}
    return ("t", "gp", "jx", "jy", "jz"), list(series.rows()), meta


def cmd_qfunction(cfg):
    params = model_params(cfg)
    space = SpinSpace(params.n_particles)
    grid = SphereGrid(cfg["grid_theta"], cfg["grid_phi"])
    info = {}
    if cfg["top_eigenstate"]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegeneracyWarning)
            top = highest_energy_state(params, space)
        state = top.state
        info = {"source": "top_eigenstate", "energy": top.energy, "parity": top.parity,
                "degenerate": top.degenerate}
    else:
        state = coherent_state(space, cfg["theta0"], cfg["phi0"])
        info = {"source": "coherent_state"}
    info["gp"] = generalized_purity(state)
    field = husimi_q(state, grid)
    count, locs = count_local_maxima(field, cfg["floor"])
    maxima = {"count": count,
              "locations": [{"theta": t, "phi": p, "theta_deg": math.degrees(t), "phi_deg": math.degrees(p)}
                            for t, p in locs]}
    if count == 2:
        maxima["separation"] = angular_separation(locs[0], locs[1])
        maxima["separation_deg"] = math.degrees(maxima["separation"])
    meta = {"command": "qfunction", "config": cfg, "params": params.as_dict(), "state": info,
            "maxima": maxima, "normalization": field.normalization()}
    th, ph = grid.thetas, grid.phis
    rows = [(th[a], ph[b], field.values[a, b]) for a in range(grid.n_theta) for b in range(grid.n_phi)]
    return ("theta", "phi", "q"), rows, meta


def _x_grid(cfg):
    return uniform_grid(cfg["x_min"], cfg["x_max"], cfg["x_step"])


def _check_ladder(cfg):
    for n in cfg["n_ladder"]:
        derive_params(cfg["omega"], 0.0, cfg["epsilon"], n)


def cmd_sweep(cfg):
    x = _x_grid(cfg)
    _check_ladder(cfg)
    rows = []
    degenerate = {}
    for n in cfg["n_ladder"]:
        s = gp_vs_x(n, x, cfg["omega"], cfg["epsilon"])
        rows.extend(zip([n] * x.size, s.x_grid, s.gp, s.dgp_dx))
        degenerate[str(n)] = int(s.degenerate.sum())
    meta = {"command": "sweep", "config": cfg,
            "grid": {"x_min": float(x[0]), "x_max": float(x[-1]), "x_step": cfg["x_step"], "nodes": int(x.size)},
            "x_definition": "kappa N / Omega", "degenerate_nodes": degenerate}
    return ("n", "x", "gp", "dgp_dx"), rows, meta


def cmd_critical(cfg):
    ladder = cfg["n_ladder"]
    if cfg["self_test"]:
        planted = {"exponent": -0.657, "prefactor_log": 0.31}
        points = planted_points(ladder, omega=cfg["omega"], **planted)
    else:
        _check_ladder(cfg)
        x = _x_grid(cfg)
        _, points = critical_ladder(ladder, x, cfg["omega"], cfg["epsilon"])
    fit = power_law_fit(points)
    rows = [(p.n_particles, p.x_star, p.kappa_c_q, p.delta) for p in points]
    meta = {"command": "critical", "config": cfg,
            "fit": {"exponent": fit.exponent, "prefactor_log": fit.prefactor_log,
                    "stderr_exponent": fit.stderr_exponent, "stderr_prefactor": fit.stderr_prefactor,
                    "residual_rms": fit.residual_rms, "full_exponent": fit.full_exponent,
                    "n_ladder": list(ladder), "x_grid_step": cfg["x_step"]},
            "model": "ln(N (kappa_c_q - kappa_c) / Omega) = prefactor_log + exponent ln N"}
    if cfg["self_test"]:
        ok = (abs(fit.exponent - planted["exponent"]) < 1e-9
              and abs(fit.prefactor_log - planted["prefactor_log"]) < 1e-9)
        meta["self_test"] = {"planted": planted, "recovered": ok}
        if not ok:
            raise NumericalError("self-test failed to recover the planted power law")
    return ("n", "x_star", "kappa_c_q", "delta"), rows, meta


COMMANDS = {"evolve": cmd_evolve, "qfunction": cmd_qfunction, "sweep": cmd_sweep, "critical": cmd_critical}


def _emit_error(kind, message, field=None):
    rec = {"error": kind, "message": " ".join(str(message).split())}
    if field is not None:
        rec["field"] = field
    sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        columns, rows, meta = COMMANDS[args.command](cfg)
        write_outputs(args.output, args.format, columns, rows, meta, args.no_timestamp)
    except ValidationError as exc:
        _emit_error("validation", exc.message, exc.field)
        return 2
    except ContractError as exc:
        _emit_error("validation", exc)
        return 2
    except CriticalRangeError as exc:
        _emit_error("range", f"{exc} (e.g. raise --x-max or lower --x-min)")
        return 4
    except NumericalError as exc:
        _emit_error("numeric", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
