"""Batch front-end: ``elastodg converge | simulate | rupture | quad-check``.

Runs are described by an INI file (see ``configs/`` for annotated examples).
Every numeric output is a comma-separated text file with a single header
line; floats carry 17 significant digits unless ``ELASTODG_PRECISION`` says
otherwise.  Exit codes: 0 success, 1 acceptance-band failure, 2 solver or
configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .diagnostics import (
    ErrorTracker,
    MmsSpec,
    convergence_rates,
    discrete_energy,
    energy_rate_audit,
    energy_rate_from_rhs,
)
from .domain import (
    FaceRegistry,
    build_uniform_mesh,
    constant_profile,
    sample_material,
    sinusoidal_profile,
)
from .physics import (
    Frictionless,
    FrictionLaw,
    HatSolveError,
    LinearShearResistance,
    Locked,
    SlipWeakening,
)
from .solver import (
    PHYSICS,
    RUSANOV,
    SemiDiscreteSystem,
    TimeStepper,
    advance,
    cfl_dt,
    scaled_dt,
)
from .spectral import GL, GLL, build_operators, build_quadrature

EXIT_OK = 0
EXIT_BAND = 1
EXIT_ERROR = 2

PRECISION_ENV = "ELASTODG_PRECISION"

# Units are whatever consistent system the config uses; the shipped examples
# use SI for rupture and km / s / g cm^-3 / GPa for the manufactured solution.
DEFAULTS: Dict[str, Dict[str, str]] = {
    "mesh": {"L": "10.0", "K": "80"},
    "discretization": {"N": "4", "nodes": GLL, "flux": PHYSICS},
    "material": {
        "profile": "constant",
        "rho": "2.7",
        "cs": "3.343",
        "c0": "3.343",
        "eps": "0.1",
        "n_osc": "20",
    },
    "boundaries": {"r0": "1.0", "rL": "1.0", "forcing": "none", "data": "none"},
    "faces": {"default": "locked", "alpha": "1.0"},
    "initial": {
        "kind": "gaussian",
        "center": "",
        "width": "0.25",
        "amplitude": "1.0",
        "direction": "0",
        "v": "0.0",
        "sigma": "0.0",
    },
    "time": {"cfl": "0.5", "T": "1.0", "integrator": "rk4", "order": "4", "dt": ""},
    "output": {
        "directory": "out",
        "snapshot_interval": "0",
        "series_interval": "0",
        "audit_tolerance": "1e-10",
    },
    "mms": {"k": "2.0", "wavenumber": "2.0", "a0": "10.0"},
    "converge": {
        "levels": "10,20,40,80,160",
        "rate_band": "4.7,5.3",
        "asymptotic": "2",
        "step_scaling": "true",
    },
}


class ConfigError(ValueError):
    pass


# --- configuration ---------------------------------------------------------


def load_config(path: Optional[str]) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser(interpolation=None)
    cfg.optionxform = str
    cfg.read_dict(DEFAULTS)
    if path is not None:
        if not Path(path).is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            cfg.read(path)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
    return cfg


def _float(cfg, section, key, positive=False) -> float:
    try:
        val = cfg.getfloat(section, key)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from exc
    if positive and not val > 0.0:
        raise ConfigError(f"[{section}] {key} must be positive, got {val}")
    return val


def _int(cfg, section, key, minimum=None) -> int:
    try:
        val = cfg.getint(section, key)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from exc
    if minimum is not None and val < minimum:
        raise ConfigError(f"[{section}] {key} must be >= {minimum}, got {val}")
    return val


def _choice(cfg, section, key, options) -> str:
    val = cfg.get(section, key).strip().lower()
    if val not in options:
        raise ConfigError(f"[{section}] {key} must be one of {sorted(options)}, got {val!r}")
    return val


def _float_list(text: str, what: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from exc


def parse_law(sec) -> FrictionLaw:
    """Friction law from a config section (``law`` plus its parameters)."""
    name = sec.get("law", "locked").strip().lower()
    try:
        if name == "locked":
            return Locked()
        if name == "frictionless":
            return Frictionless()
        if name == "linear":
            return LinearShearResistance(float(sec["alpha"]))
        if name == "slip_weakening":
            return SlipWeakening(
                f_s=float(sec["f_s"]),
                f_d=float(sec["f_d"]),
                d_c=float(sec["d_c"]),
                sigma_n=float(sec["sigma_n"]),
            )
    except KeyError as exc:
        raise ConfigError(f"friction law {name!r} needs parameter {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"friction law {name!r}: {exc}") from exc
    raise ConfigError(f"unknown friction law {name!r}")


@dataclass
class Run:
    """Everything derived from a config for one mesh resolution."""

    system: SemiDiscreteSystem
    state0: object
    stepper: TimeStepper
    mms: Optional[MmsSpec]
    faults: Dict[int, FrictionLaw]
    fault_x: Dict[int, float]


def fault_sections(cfg) -> List[str]:
    return [s for s in cfg.sections() if s == "fault" or s.startswith("fault.")]


def build_run(cfg, K: Optional[int] = None) -> Run:
    L = _float(cfg, "mesh", "L", positive=True)
    K = _int(cfg, "mesh", "K", minimum=1) if K is None else K
    N = _int(cfg, "discretization", "N", minimum=1)
    nodes = _choice(cfg, "discretization", "nodes", {GLL, GL})
    flux = _choice(cfg, "discretization", "flux", {PHYSICS, RUSANOV})

    profile = _choice(cfg, "material", "profile", {"constant", "sinusoidal"})
    rho0 = _float(cfg, "material", "rho", positive=True)
    if profile == "constant":
        cs = _float(cfg, "material", "cs", positive=True)
        rho_fn, mu_fn = constant_profile(rho0, rho0 * cs**2)
    else:
        c0 = _float(cfg, "material", "c0", positive=True)
        eps = _float(cfg, "material", "eps")
        if abs(eps) >= c0:
            raise ConfigError("[material] |eps| must be smaller than c0")
        rho_fn, mu_fn = sinusoidal_profile(c0, eps, _float(cfg, "material", "n_osc"), L, rho0)

    r0 = _float(cfg, "boundaries", "r0")
    rL = _float(cfg, "boundaries", "rL")
    for name, r in (("r0", r0), ("rL", rL)):
        if abs(r) > 1.0:
            raise ConfigError(f"[boundaries] {name} must satisfy |r| <= 1, got {r}")
    forcing = _choice(cfg, "boundaries", "forcing", {"none", "mms"})
    data_kind = _choice(cfg, "boundaries", "data", {"none", "mms", "initial"})

    mms = None
    source = left_data = right_data = None
    if forcing == "mms" or data_kind == "mms":
        mms = MmsSpec(
            k=_float(cfg, "mms", "k"),
            wavenumber=_float(cfg, "mms", "wavenumber"),
            a0=_float(cfg, "mms", "a0"),
        )
    if forcing == "mms":
        source = mms.source(rho_fn, mu_fn)
        data_kind = "mms"
    if data_kind == "mms":
        left_data, right_data = mms.boundary_data(0.0), mms.boundary_data(L)
    elif data_kind == "initial":
        if _choice(cfg, "initial", "kind", {"gaussian", "uniform", "mms"}) != "uniform":
            raise ConfigError("[boundaries] data = initial needs a uniform initial state")
        far = (_float(cfg, "initial", "v"), _float(cfg, "initial", "sigma"))
        left_data = right_data = lambda t: far

    mesh = build_uniform_mesh(L, K)
    default = parse_law({**cfg["faces"], "law": cfg.get("faces", "default")})
    overrides: Dict[int, FrictionLaw] = {}
    fault_x: Dict[int, float] = {}
    for name in fault_sections(cfg):
        sec = cfg[name]
        if "x" not in sec:
            raise ConfigError(f"[{name}] needs a position x")
        x = float(sec["x"])
        if not mesh.faces[0] < x < mesh.faces[-1]:
            raise ConfigError(f"[{name}] x = {x} lies outside the domain interior")
        face = mesh.nearest_face(x)
        if not 1 <= face <= K - 1:
            raise ConfigError(f"[{name}] x = {x} does not snap to an interior face")
        if face in overrides:
            raise ConfigError(f"[{name}] snaps to face {face}, which is already configured")
        overrides[face] = parse_law(sec)
        fault_x[face] = float(mesh.faces[face])

    try:
        rule = build_quadrature(nodes, N)
        ops = build_operators(rule)
        material = sample_material(mesh, rule, rho_fn, mu_fn)
        faces = FaceRegistry.uniform(
            K, r0, rL, default=default, overrides=overrides,
            left_data=left_data, right_data=right_data,
        )
        system = SemiDiscreteSystem(mesh, material, ops, faces, source=source, flux=flux)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    state0 = initial_state(cfg, system, mms, L)

    cfl = _float(cfg, "time", "cfl", positive=True)
    T = _float(cfg, "time", "T")
    if T < 0.0:
        raise ConfigError("[time] T must be non-negative")
    dt_text = cfg.get("time", "dt").strip()
    try:
        dt = float(dt_text) if dt_text else cfl_dt(material, mesh, N, cfl)
        stepper = TimeStepper(
            dt=dt, T=T,
            scheme=_choice(cfg, "time", "integrator", {"rk4", "taylor"}),
            order=_int(cfg, "time", "order", minimum=1),
            cfl=cfl,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return Run(system, state0, stepper, mms, overrides, fault_x)


def initial_state(cfg, system: SemiDiscreteSystem, mms: Optional[MmsSpec], L: float):
    kind = _choice(cfg, "initial", "kind", {"gaussian", "uniform", "mms"})
    x = system.x
    if kind == "mms":
        if mms is None:
            raise ConfigError("[initial] kind = mms requires [boundaries] forcing = mms")
        v0, s0 = mms.fields(x, 0.0)
    elif kind == "uniform":
        v0 = np.full_like(x, _float(cfg, "initial", "v"))
        s0 = np.full_like(x, _float(cfg, "initial", "sigma"))
    else:
        c_text = cfg.get("initial", "center").strip()
        center = float(c_text) if c_text else 0.5 * L
        width = _float(cfg, "initial", "width", positive=True)
        g = _float(cfg, "initial", "amplitude") * np.exp(-(((x - center) / width) ** 2))
        direction = _int(cfg, "initial", "direction")
        if direction not in (-1, 0, 1):
            raise ConfigError("[initial] direction must be -1, 0 or 1")
        v0 = g
        s0 = -direction * system.material.Z * g
    return system.state_from_fields(v0, s0)


# --- output ----------------------------------------------------------------


def float_format() -> str:
    text = os.environ.get(PRECISION_ENV, "").strip()
    digits = 17
    if text:
        try:
            digits = int(text)
        except ValueError:
            raise ConfigError(f"{PRECISION_ENV} must be an integer, got {text!r}")
        if not 1 <= digits <= 17:
            raise ConfigError(f"{PRECISION_ENV} must lie in [1, 17]")
    return f"%.{digits}g"


def write_table(path: Path, columns: List[str], rows, int_columns=()) -> None:
    fmt = float_format()
    fmts = ["%d" if c in int_columns else fmt for c in columns]
    arr = np.asarray(rows, dtype=float).reshape(-1, len(columns))
    np.savetxt(path, arr, fmt=fmts, delimiter=",", header=",".join(columns), comments="")


def write_snapshot(path: Path, system: SemiDiscreteSystem, state) -> None:
    K, n1 = system.x.shape
    elem = np.repeat(np.arange(K), n1)
    rows = np.column_stack([elem, system.x.ravel(), state.v.ravel(), state.sigma.ravel()])
    write_table(path, ["element", "x", "v", "sigma"], rows, int_columns=("element",))


def manifest(cfg, command: str, extra: dict) -> dict:
    return {
        "command": command,
        "version": __version__,
        "config": {s: dict(cfg[s]) for s in cfg.sections()},
        **extra,
    }


def write_manifest(out: Path, data: dict) -> None:
    with open(out / "manifest.json", "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_manifest(run: Run) -> dict:
    s = run.system
    return {
        "dt": run.stepper.dt,
        "c_max": s.material.c_max,
        "K": s.K,
        "N": s.N,
        "dof": 2 * s.K * (s.N + 1),
        "boundary_r": [s.faces.left.r, s.faces.right.r],
        "fault_faces": {str(f): x for f, x in run.fault_x.items()},
    }


class Sampler:
    """Fires at ``t0``, every ``interval`` thereafter, and at the final time."""

    def __init__(self, interval: float, T: float):
        self.interval, self.T = interval, T
        self.next = 0.0

    def __call__(self, t: float) -> bool:
        fire = t >= self.next - 1e-9 * max(1.0, abs(t)) or t == self.T
        if fire and self.interval > 0.0:
            while self.next <= t + 1e-9 * max(1.0, abs(t)):
                self.next += self.interval
        elif fire:
            self.next = math.inf
        return fire


def _apply_overrides(cfg, args) -> None:
    if getattr(args, "nodes", None):
        cfg.set("discretization", "nodes", args.nodes)
    if getattr(args, "flux", None):
        cfg.set("discretization", "flux", args.flux)


def _out_dir(cfg, args) -> Path:
    out = Path(args.out or cfg.get("output", "directory"))
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- commands --------------------------------------------------------------


def cmd_converge(cfg, args) -> int:
    if cfg.get("boundaries", "forcing").strip().lower() != "mms":
        raise ConfigError("converge needs [boundaries] forcing = mms")
    if args.levels is not None:
        if args.levels < 1:
            raise ConfigError("--levels must be >= 1")
        K0 = _int(cfg, "mesh", "K", minimum=1)
        levels = [K0 * 2**i for i in range(args.levels)]
    else:
        levels = [int(k) for k in _float_list(cfg.get("converge", "levels"), "[converge] levels")]
    if not levels or any(k < 1 for k in levels):
        raise ConfigError("refinement levels must be positive element counts")
    band = _float_list(cfg.get("converge", "rate_band"), "[converge] rate_band")
    if len(band) != 2 or band[0] > band[1]:
        raise ConfigError("[converge] rate_band must be 'low,high'")
    n_asym = _int(cfg, "converge", "asymptotic", minimum=1)
    step_scaling = cfg.getboolean("converge", "step_scaling")
    out = _out_dir(cfg, args)

    rows, errors, dts = [], [], []
    dt0 = dx0 = None
    for K in levels:
        run = build_run(cfg, K)
        s = run.system
        dt = run.stepper.dt
        dx = float(np.min(s.mesh.dx))
        if dt0 is None:
            dt0, dx0 = dt, dx
        elif step_scaling:
            dt = scaled_dt(dt0, dx0, dx, s.N, dt)
        stepper = TimeStepper(dt=dt, T=run.stepper.T, scheme=run.stepper.scheme, order=run.stepper.order)
        final = advance(s, stepper, run.state0)
        ve, se = run.mms.fields(s.x, stepper.T)
        tracker = ErrorTracker()
        v0, s0 = run.mms.fields(s.x, 0.0)
        tracker.update(run.state0.v, run.state0.sigma, v0, s0, 0.0)
        err = tracker.update(final.v, final.sigma, ve, se, stepper.T)
        errors.append(err)
        dts.append(dt)
        rows.append([K, 2 * K * (s.N + 1), err])
        print(f"K={K:5d} dof={2 * K * (s.N + 1):7d} dt={dt:.4e} error={err:.6e}", flush=True)

    rates = [math.nan] + (convergence_rates(errors) if len(errors) > 1 else [])
    table = [r + [rate] for r, rate in zip(rows, rates)]
    write_table(out / "convergence.csv", ["K", "dof", "error", "rate"], table, int_columns=("K", "dof"))

    status = EXIT_OK
    notes = []
    if len(errors) > 1:
        if any(not b < a for a, b in zip(errors[:-1], errors[1:])):
            status = EXIT_BAND
            notes.append("error does not decrease monotonically")
        asym = rates[1:][-n_asym:]
        if any(not (band[0] <= r <= band[1]) for r in asym):
            status = EXIT_BAND
            notes.append(f"asymptotic rates {asym} outside band {band}")
        print("rates: " + ", ".join(f"{r:.4f}" for r in rates[1:]))
    write_manifest(out, manifest(cfg, "converge", {
        "levels": levels, "dt": dts, "rate_band": band, "errors": errors,
        "rates": rates[1:], "status": status, "notes": notes,
    }))
    for n in notes:
        print("FAIL: " + n, file=sys.stderr)
    return status


def _energy_row(system, state, t, audit: bool):
    E = discrete_energy(state, system.material, system.mesh, system.ops.rule)
    if audit:
        a = energy_rate_audit(system, state, t)
        return [t, E, a.rate_rhs, a.rate_formula, a.relative_defect]
    return [t, E, energy_rate_from_rhs(system, state, t), math.nan, math.nan]


def _can_audit(system: SemiDiscreteSystem) -> bool:
    f = system.faces
    return (
        system.flux == PHYSICS
        and system.source is None
        and f.left.data is None
        and f.right.data is None
    )


def _snapshot_observer(cfg, run: Run, out: Path, index: list):
    sampler = Sampler(_float(cfg, "output", "snapshot_interval"), run.stepper.T)

    def observe(t, u):
        if sampler(t):
            i = len(index)
            write_snapshot(out / f"snapshot_{i:05d}.csv", run.system, u)
            index.append([i, t])

    return observe


def cmd_simulate(cfg, args) -> int:
    run = build_run(cfg)
    out = _out_dir(cfg, args)
    s = run.system
    audit = _can_audit(s)
    tol = _float(cfg, "output", "audit_tolerance", positive=True)
    series = Sampler(_float(cfg, "output", "series_interval"), run.stepper.T)
    energy_rows, error_rows, snaps = [], [], []
    snap = _snapshot_observer(cfg, run, out, snaps)
    tracker = ErrorTracker() if run.mms is not None else None

    def observe(t, u):
        if series(t):
            energy_rows.append(_energy_row(s, u, t, audit))
            if tracker is not None:
                ve, se = run.mms.fields(s.x, t)
                error_rows.append([t, tracker.update(u.v, u.sigma, ve, se, t)])
        snap(t, u)

    advance(s, run.stepper, run.state0, observer=observe)
    write_table(out / "energy.csv", ["t", "E", "dEdt_rhs", "dEdt_formula", "defect"], energy_rows)
    write_table(out / "snapshots.csv", ["index", "t"], snaps, int_columns=("index",))
    if tracker is not None:
        write_table(out / "error.csv", ["t", "error"], error_rows)

    max_defect = max((r[4] for r in energy_rows if not math.isnan(r[4])), default=math.nan)
    status = EXIT_BAND if audit and max_defect > tol else EXIT_OK
    extra = run_manifest(run)
    extra.update({"energy_audit": audit, "max_defect": max_defect, "status": status})
    if tracker is not None:
        extra["final_error"] = tracker.final
    write_manifest(out, manifest(cfg, "simulate", extra))
    E = [r[1] for r in energy_rows]
    print(f"steps to T={run.stepper.T}: E0={E[0]:.6e} E(T)={E[-1]:.6e} max audit defect={max_defect:.3e}")
    if tracker is not None:
        print(f"final relative error {tracker.final:.6e}")
    if status != EXIT_OK:
        print(f"FAIL: energy audit defect {max_defect:.3e} exceeds {tol:.1e}", file=sys.stderr)
    return status


def cmd_rupture(cfg, args) -> int:
    run = build_run(cfg)
    sw = [f for f, law in run.faults.items() if isinstance(law, SlipWeakening)]
    if len(sw) != 1:
        raise ConfigError(f"rupture needs exactly one slip-weakening fault, found {len(sw)}")
    if _choice(cfg, "initial", "kind", {"gaussian", "uniform", "mms"}) != "uniform":
        raise ConfigError("rupture needs a uniform initial state ([initial] kind = uniform)")
    face = sw[0]
    m = face - 1
    out = _out_dir(cfg, args)
    s = run.system
    series = Sampler(_float(cfg, "output", "series_interval"), run.stepper.T)
    rows, snaps = [], []
    snap = _snapshot_observer(cfg, run, out, snaps)

    def observe(t, u):
        if series(t):
            fs = s.face_solution(u, t)
            rows.append([t, fs.slip_rate[m], fs.sigma_hat_left[face], fs.slip[m]])
        snap(t, u)

    advance(s, run.stepper, run.state0, observer=observe)
    write_table(out / "fault.csv", ["t", "V", "tau", "S"], rows)
    write_table(out / "snapshots.csv", ["index", "t"], snaps, int_columns=("index",))
    extra = run_manifest(run)
    extra.update({"fault_face": face, "fault_x": run.fault_x[face]})
    write_manifest(out, manifest(cfg, "rupture", extra))
    last = rows[-1]
    print(f"fault face {face} at x={run.fault_x[face]}: V={last[1]:.6g} tau={last[2]:.6g} S={last[3]:.6g}")
    return EXIT_OK


QUAD_TOL = {"sbp": 1e-13, "exactness": 1e-12, "row_sum": 1e-13}


def quad_check_rows(families, max_degree: int):
    rows = []
    for fam_id, kind in enumerate(families):
        for N in range(1, max_degree + 1):
            rule = build_quadrature(kind, N)
            ops = build_operators(rule)
            sbp = float(np.max(np.abs(ops.Q + ops.Q.T - ops.B)))
            row_sum = float(np.max(np.abs(ops.Q.sum(axis=1))))
            exact = 0.0
            for j in range(rule.exactness + 1):
                ref = (1.0 - (-1.0) ** (j + 1)) / (j + 1)
                exact = max(exact, abs(float(rule.weights @ rule.nodes**j) - ref))
            rows.append([fam_id, N, sbp, exact, row_sum])
    return rows


def cmd_quad_check(cfg, args) -> int:
    families = [args.nodes] if args.nodes else [GLL, GL]
    if args.max_degree < 1:
        raise ConfigError("--max-degree must be >= 1")
    out = _out_dir(cfg, args)
    rows = quad_check_rows(families, args.max_degree)
    write_table(out / "quad_check.csv", ["family", "N", "sbp_defect", "exactness_defect", "row_sum"],
                rows, int_columns=("family", "N"))
    status = EXIT_OK
    for fam_id, N, sbp, exact, row_sum in rows:
        ok = sbp <= QUAD_TOL["sbp"] and exact <= QUAD_TOL["exactness"] and row_sum <= QUAD_TOL["row_sum"]
        status = status if ok else EXIT_BAND
        print(f"{families[int(fam_id)]:>3} N={int(N):2d} sbp={sbp:.2e} exact={exact:.2e} "
              f"rowsum={row_sum:.2e} {'ok' if ok else 'FAIL'}")
    write_manifest(out, manifest(cfg, "quad-check", {
        "families": families, "max_degree": args.max_degree, "tolerances": QUAD_TOL, "status": status,
    }))
    return status


COMMANDS = {
    "converge": cmd_converge,
    "simulate": cmd_simulate,
    "rupture": cmd_rupture,
    "quad-check": cmd_quad_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elastodg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="INI run description")
        p.add_argument("--out", help="output directory (default: [output] directory)")
        p.add_argument("--nodes", choices=[GLL, GL])
        p.add_argument("--flux", choices=[PHYSICS, RUSANOV])
        if name == "converge":
            p.add_argument("--levels", type=int, help="number of levels doubling from [mesh] K")
        if name == "quad-check":
            p.add_argument("--max-degree", type=int, default=10)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        _apply_overrides(cfg, args)
        return COMMANDS[args.command](cfg, args)
    except HatSolveError as exc:
        print(f"error: hat solve failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ConfigError, ValueError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
