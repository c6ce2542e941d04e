"""Command-line front end: reproducible sweeps written as CSV or JSON.

Frequencies in config files are plain Hz; they are converted to angular
frequencies at this boundary and nowhere else.  Every output file starts
with a comment header echoing the fully resolved configuration, so a run
can be repeated from its own artifact.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import pdeoracle
from .bloch import PulseParams
from .doppler import asymmetric_overlap, two_point_shift
from .errors import ConfigError, ConvergenceError, RecoilSpecError
from .metrology import recoil_sensitivity
from .phasespace import (CatState, FockSuperposition, FPParams, GaussianState,
                         overlap_after, state_qfi)
from .recoil import compute_coefficients
from .stateopt import (OptimizationProblem, optimize_fock_superposition,
                       single_photon_budget)

TWO_PI = 2.0 * math.pi

DEFAULT_CONFIG = {
    "pulse": {
        "rabi_hz": 5.6e6,
        "linewidth_hz": 34e6,
        "detuning_hz": 17e6,
        "lamb_dicke": 0.108,
        "mode_freq_hz": 1.92e6,
        "pulse_duration_s": 50e-9,
    },
    "state": {"family": "vacuum", "r": 0.0, "beta": 2.0, "n": 2,
              "coeffs": None},
    "coeffs": {"detuning_hz_min": -68e6, "detuning_hz_max": 68e6,
               "points": 1},
    "resonance": {"tbar": 10.0, "detuning_hz_min": -68e6,
                  "detuning_hz_max": 68e6, "points": 41,
                  "include_doppler": True},
    "sensitivity": {"epsilon_min": 1e-3, "epsilon_max": 0.3, "points": 7,
                    "log_grid": True, "mode": "drift-only", "p0": 0.5,
                    "states": ["vacuum", "squeezed:1.44", "cat:2.0"],
                    "allow_large_epsilon": False},
    "shift": {"p0": 0.5, "neglect_diffusion": False},
    "optimize": {"basis": [2, 4], "nbar_max": 4.0, "epsilon": 0.1,
                 "p0": 0.5, "mode": "drift-only", "restarts": 8},
    "budget": {"p0": 0.5},
    "oracle_check": {"alpha_points": 3, "d_points": 2, "tolerance": 1e-4},
}


def _merge(base: dict, extra: dict, path: str = "") -> dict:
    out = dict(base)
    for k, v in extra.items():
        if k not in out:
            raise ConfigError(f"unknown config key '{path}{k}'")
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v, f"{path}{k}.")
        else:
            out[k] = v
    return out


def load_config(path: str | None, overrides: list[str]) -> dict:
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        cfg = _merge(cfg, user)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.get(part)
            if not isinstance(node, dict):
                raise ConfigError(f"unknown config section in {key!r}")
        if parts[-1] not in node:
            raise ConfigError(f"unknown config key {key!r}")
        node[parts[-1]] = value
    return cfg


def pulse_from_config(cfg: dict) -> PulseParams:
    p = cfg["pulse"]
    try:
        return PulseParams(rabi=TWO_PI * float(p["rabi_hz"]),
                           linewidth=TWO_PI * float(p["linewidth_hz"]),
                           detuning=TWO_PI * float(p["detuning_hz"]),
                           lamb_dicke=float(p["lamb_dicke"]),
                           mode_freq=TWO_PI * float(p["mode_freq_hz"]),
                           pulse_duration=float(p["pulse_duration_s"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad pulse section: {exc}") from exc


def state_from_spec(spec, state_cfg: dict | None = None):
    """Build a motional state from 'vacuum', 'squeezed:r', 'cat:beta',
    'fock:n' or from the structured state section."""
    if isinstance(spec, dict):
        fam = spec.get("family", "vacuum")
        if fam == "vacuum":
            return GaussianState.vacuum()
        if fam == "squeezed":
            return GaussianState.squeezed(float(spec.get("r", 0.0)))
        if fam == "cat":
            return CatState(float(spec.get("beta", 0.0)))
        if fam == "fock":
            return FockSuperposition.fock(int(spec.get("n", 0)))
        if fam == "superposition":
            entries = spec.get("coeffs")
            if not entries:
                raise ConfigError("superposition family needs a coeffs map")
            return FockSuperposition.from_dict(
                {int(k): complex(v) for k, v in entries.items()})
        raise ConfigError(f"unknown state family {fam!r}")
    name, _, arg = str(spec).partition(":")
    if name == "vacuum":
        return GaussianState.vacuum()
    if name == "squeezed":
        return GaussianState.squeezed(float(arg or 0.0))
    if name == "cat":
        return CatState(float(arg or 0.0))
    if name == "fock":
        return FockSuperposition.fock(int(arg or 0))
    raise ConfigError(f"unknown state spec {spec!r}")


def _header_lines(cfg: dict, command: str) -> list[str]:
    resolved = json.dumps({"command": command, "config": cfg},
                          sort_keys=True, separators=(",", ":"))
    return [f"# recoilspec {command}", f"# {resolved}"]


def write_table(out, fmt: str, cfg: dict, command: str,
                columns: list[str], rows: list[list]) -> str:
    def fmt_cell(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return format(v, ".12g")
        return str(v)

    if fmt == "csv":
        buf = io.StringIO()
        for line in _header_lines(cfg, command):
            buf.write(line + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt_cell(v) for v in row])
        text = buf.getvalue()
    else:
        payload = {"command": command, "config": cfg, "columns": columns,
                   "rows": [[None if v is None else v for v in row]
                            for row in rows]}
        text = json.dumps(payload, sort_keys=True, indent=2,
                          default=float) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)
    return text


def _grid(lo: float, hi: float, n: int, log: bool = False) -> np.ndarray:
    if n < 1:
        raise ConfigError("grid needs at least one point")
    if n == 1:
        return np.array([0.5 * (lo + hi)])
    if log:
        if lo <= 0 or hi <= 0:
            raise ConfigError("log grid needs positive bounds")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def cmd_coeffs(cfg: dict, threads: int):
    sec = cfg["coeffs"]
    base = pulse_from_config(cfg)
    deltas = _grid(float(sec["detuning_hz_min"]),
                   float(sec["detuning_hz_max"]), int(sec["points"]))
    if int(sec["points"]) == 1:
        deltas = np.array([cfg["pulse"]["detuning_hz"]], dtype=float)

    def one(delta_hz):
        p = base.with_detuning(TWO_PI * float(delta_hz))
        c = compute_coefficients(p)
        return [float(delta_hz), c.alpha_p, c.alpha_x, c.d_pp, c.d_xx,
                c.d_xp, c.epsilon, c.g, c.n1]

    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        rows = list(ex.map(one, deltas))
    cols = ["detuning_hz", "alpha_p", "alpha_x", "d_pp", "d_xx", "d_xp",
            "epsilon", "g", "n1"]
    return cols, rows


def cmd_resonance(cfg: dict, threads: int):
    sec = cfg["resonance"]
    base = pulse_from_config(cfg)
    state = state_from_spec(cfg["state"])
    tbar = float(sec["tbar"])
    include_doppler = bool(sec["include_doppler"])
    if include_doppler and not isinstance(state, GaussianState):
        raise ConfigError(
            "Doppler asymmetry is only available for Gaussian states")
    deltas = _grid(float(sec["detuning_hz_min"]),
                   float(sec["detuning_hz_max"]), int(sec["points"]))

    def one(delta_hz):
        p = base.with_detuning(TWO_PI * float(delta_hz))
        c = compute_coefficients(p, with_damping=include_doppler)
        if include_doppler:
            ps, dp, _ = asymmetric_overlap(
                state, FPParams(alpha=c.alpha_p, d=c.d_pp, tbar=tbar, g=c.g))
        else:
            ps = overlap_after(state,
                               FPParams(alpha=c.alpha_p, d=c.d_pp, tbar=tbar))
            dp = 0.0
        return [float(delta_hz), ps, dp]

    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        rows = list(ex.map(one, deltas))
    return ["detuning_hz", "p_sym", "delta_p"], rows


def cmd_sensitivity(cfg: dict, threads: int):
    sec = cfg["sensitivity"]
    eps = _grid(float(sec["epsilon_min"]), float(sec["epsilon_max"]),
                int(sec["points"]), log=bool(sec["log_grid"]))
    specs = list(sec["states"])
    states = [state_from_spec(s) for s in specs]
    mode = str(sec["mode"])
    p0 = float(sec["p0"])
    allow = bool(sec["allow_large_epsilon"])

    def one(cell):
        e, state = cell
        try:
            r = recoil_sensitivity(state, float(e), p0=p0, mode=mode,
                                   allow_large_epsilon=allow)
            return r.s_abs, r.qfi_bound, ""
        except RecoilSpecError as exc:
            return None, None, type(exc).__name__

    cells = [(e, st) for e in eps for st in states]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        results = list(ex.map(one, cells))
    rows = []
    k = 0
    for e in eps:
        row = [float(e)]
        diagnostics = []
        for spec in specs:
            s_abs, bound, diag = results[k]
            k += 1
            row.extend([s_abs, bound])
            if diag:
                diagnostics.append(f"{spec}:{diag}")
        row.append(";".join(diagnostics))
        rows.append(row)
    cols = ["epsilon"]
    for spec in specs:
        tag = str(spec).replace(":", "_")
        cols.extend([f"s_{tag}", f"qfi_bound_{tag}"])
    cols.append("diagnostics")
    return cols, rows


def cmd_shift(cfg: dict, threads: int):
    sec = cfg["shift"]
    pulse = pulse_from_config(cfg)
    state = state_from_spec(cfg["state"])
    if not isinstance(state, GaussianState):
        raise ConfigError("shift command requires a Gaussian state")
    res = two_point_shift(state, pulse, p0=float(sec["p0"]),
                          neglect_diffusion=bool(sec["neglect_diffusion"]))
    cols = ["p0", "tstar", "p_sym", "delta_p", "c_const", "shift_hz",
            "shift_analytic_hz", "dp_ddelta_per_hz"]
    rows = [[float(sec["p0"]), res.tstar, res.p_sym, res.delta_p_asym,
             res.c_const, res.shift / TWO_PI, res.shift_analytic / TWO_PI,
             res.dp_ddelta * TWO_PI]]
    return cols, rows


def cmd_optimize(cfg: dict, threads: int, seed: int):
    sec = cfg["optimize"]
    prob = OptimizationProblem(basis=tuple(int(n) for n in sec["basis"]),
                               nbar_max=float(sec["nbar_max"]),
                               epsilon=float(sec["epsilon"]),
                               p0=float(sec["p0"]), mode=str(sec["mode"]))
    res = optimize_fock_superposition(prob, n_restarts=int(sec["restarts"]),
                                      seed=seed)
    state = FockSuperposition.from_dict(
        {n: c for n, c in zip(prob.basis, res.coeffs)})
    cols = ([f"c_{n}" for n in prob.basis]
            + ["s_abs", "nbar_used", "constraint_slack", "qfi"])
    rows = [[*(float(c) for c in res.coeffs), res.s_abs, res.nbar_used,
             res.constraint_slack, state_qfi(state)]]
    return cols, rows


def cmd_budget(cfg: dict, threads: int):
    pulse = pulse_from_config(cfg)
    b = single_photon_budget(pulse, p0=float(cfg["budget"]["p0"]))
    cols = ["alpha_p", "d_pp", "epsilon", "n1", "tstar", "r_required",
            "squeezing_db", "nbar", "enhancement"]
    rows = [[b.coeffs.alpha_p, b.coeffs.d_pp, b.coeffs.epsilon, b.coeffs.n1,
             b.tstar, b.r_required, b.squeezing_db, b.nbar, b.enhancement]]
    return cols, rows


def cmd_oracle_check(cfg: dict, threads: int):
    sec = cfg["oracle_check"]
    fps = [FPParams(alpha=float(a), d=float(d), tbar=1.0)
           for a in np.linspace(0.0, 2.0, int(sec["alpha_points"]))
           for d in np.linspace(0.0, 0.3, int(sec["d_points"]))]
    families = [("vacuum", GaussianState.vacuum()),
                ("squeezed_1.44", GaussianState.squeezed(1.44)),
                ("cat_2.0", CatState(2.0)),
                ("fock_2", FockSuperposition.fock(2))]
    tol = float(sec["tolerance"])
    rows = []
    worst_overall = 0.0
    for name, state in families:
        pde = pdeoracle.overlap_pde_batch(state, fps)
        worst = max(abs(overlap_after(state, fp) - p)
                    for fp, p in zip(fps, pde))
        worst_overall = max(worst_overall, worst)
        rows.append([name, len(fps), worst, "pass" if worst <= tol
                     else "fail"])
    if worst_overall > tol:
        raise ConvergenceError(
            f"PDE-vs-analytic deviation {worst_overall:.3e} exceeds {tol}")
    return ["family", "points", "worst_abs_error", "status"], rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recoilspec",
        description="Photon-recoil spectroscopy model calculations")
    parser.add_argument("command",
                        choices=["coeffs", "resonance", "sensitivity",
                                 "shift", "optimize", "budget",
                                 "oracle-check"])
    parser.add_argument("--config", default=None,
                        help="JSON config file; defaults used when omitted")
    parser.add_argument("--set", action="append", default=[], metavar="K=V",
                        help="dotted-key config override, e.g. pulse.rabi_hz=1e6")
    parser.add_argument("--out", default="-",
                        help="output path, '-' for stdout")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        if args.command == "coeffs":
            cols, rows = cmd_coeffs(cfg, args.threads)
        elif args.command == "resonance":
            cols, rows = cmd_resonance(cfg, args.threads)
        elif args.command == "sensitivity":
            cols, rows = cmd_sensitivity(cfg, args.threads)
        elif args.command == "shift":
            cols, rows = cmd_shift(cfg, args.threads)
        elif args.command == "optimize":
            cols, rows = cmd_optimize(cfg, args.threads, args.seed)
        elif args.command == "budget":
            cols, rows = cmd_budget(cfg, args.threads)
        else:
            cols, rows = cmd_oracle_check(cfg, args.threads)
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 3
    except RecoilSpecError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    write_table(args.out, args.format, cfg, args.command, cols, rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
