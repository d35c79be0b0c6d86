"""Command-line front end.

    nhsw analytic {thacker,soliton,stationary} [params] --out DIR
    nhsw verify {thacker,soliton,stationary} --variant nh --n 128,256,512 --out DIR
    nhsw simulate scenario.ini --out DIR

Exit codes: 0 success, 1 usage/configuration error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .analytic import (
    BUMP_FLOW,
    SolitonParams,
    SolitonSampler,
    StationarySampler,
    StationarySpec,
    ThackerParams,
    ThackerSampler,
    generate_stationary,
    integrate_f,
    solution_residual,
    soliton_state,
    thacker_depth_averaged,
)
from .bathymetry import Bathymetry, FlatBottom, ParabolicBottom, SampledBottom, read_bathymetry_csv, write_bathymetry_csv
from .errors import ConfigError, ContractError, NHSWError, OutOfDomainError
from .grid import Grid1D
from .model import PhysParams, State, read_state_csv, write_columns_csv
from .pressure import lambda_coeff, write_regime_csv
from .solver import BoundaryCondition, SolverConfig, run
from .verify import convergence_study, energy_budget, pde_residual, write_levels_csv, write_report_json

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3

# (target, variant) pairs whose residuals should vanish; all others are
# expected not to converge
CONVERGENT = {
    ("soliton", "nh"), ("soliton", "nh+forcing"), ("soliton", "ns"),
    ("thacker", "nh+forcing"),
    ("stationary", "nh"), ("stationary", "nh+forcing"), ("stationary", "ns"),
}


def _write_meta(out: Path, meta: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _n_list(text: str) -> List[int]:
    try:
        ns = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise argparse.ArgumentTypeError("need at least two strictly increasing grid sizes")
    return ns


# ------------------------------------------------------------------ analytic

def _thacker_params(a) -> ThackerParams:
    return ThackerParams(H0=a.h0, b1=a.b1, b2=a.b2, f0=a.f0, t0=a.t0, g=a.g)


def _soliton_params(a) -> SolitonParams:
    return SolitonParams(d=a.d, l=a.l, H0=a.h0, g=a.g, x0=a.x0)


def _stationary_spec(a) -> StationarySpec:
    return StationarySpec(Q0=a.q0, H_exit=a.h_exit, a=a.a, b=a.b, c=a.c, L=a.L, n=getattr(a, "gen_n", BUMP_FLOW.n))


def cmd_analytic(a) -> int:
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"command": "analytic", "kind": a.kind, "version": __version__}
    meta["params"] = {k: v for k, v in vars(a).items() if k not in ("func", "command", "out")}
    if a.kind == "thacker":
        p = _thacker_params(a)
        traj = integrate_f(p, a.t_end, a.dt)
        write_columns_csv(out / "trajectory.csv", {"t": traj.t[:: a.stride], "F": traj.F[:: a.stride],
                                                   "f": traj.f[:: a.stride], "df": traj.df[:: a.stride]})
        x = Grid1D.from_domain(a.x_left, a.x_right - a.x_left, a.n).x
        times = np.linspace(p.t0, a.t_end, a.snapshots)
        for k, t in enumerate(times):
            fl = thacker_depth_averaged(x, t, p, traj)
            write_columns_csv(out / f"fields_{k}.csv", {"x": x, "H": fl.H, "u": fl.u, "w": fl.w,
                                                        "pnh": fl.pnh, "zb": fl.zb, "s": fl.s})
        meta["snapshot_times"] = times
        meta["f_range"] = [float(traj.f.min()), float(traj.f.max())]
    elif a.kind == "soliton":
        p = _soliton_params(a)
        x = Grid1D.from_domain(p.x0 - a.half_width * p.l, 2 * a.half_width * p.l, a.n).x
        fl = soliton_state(x, a.t, p)
        write_columns_csv(out / "soliton.csv", {"x": x, "H": fl.H, "u": fl.u, "w": fl.w,
                                                "pnh": fl.pnh, "zb": fl.zb})
        meta.update({"c0": p.c0, "a": p.a})
    else:
        spec = _stationary_spec(a)
        sol = generate_stationary(spec, a.g)
        write_columns_csv(out / "stationary.csv", sol.columns())
        write_bathymetry_csv(out / "bathymetry.csv", sol.x, sol.zb)
        h = sol.x[1] - sol.x[0]
        grid = Grid1D(sol.x[0] - 0.5 * h, h, sol.x.size)
        write_regime_csv(out / "regime.csv", sol.x, lambda_coeff(sol.H, sol.bathymetry, grid))
        meta.update({"ode_residual": solution_residual(sol),
                     "energy_flux_deviation": sol.energy_flux_deviation(),
                     "H_min": float(sol.H.min()), "H_max": float(sol.H.max())})
    meta["params"]["g"] = a.g
    _write_meta(out, meta)
    print(f"wrote {out}")
    return EXIT_OK


# -------------------------------------------------------------------- verify

def _sampler(a):
    if a.target == "thacker":
        return ThackerSampler(_thacker_params(a), t_eval=a.t_eval, dt=a.dt, x_range=(a.x_left, a.x_right))
    if a.target == "soliton":
        return SolitonSampler(_soliton_params(a), t_eval=a.t_eval, half_width=a.half_width)
    return StationarySampler(_stationary_spec(a), a.g)


def cmd_verify(a) -> int:
    out = Path(a.out) if a.out else None
    sampler = _sampler(a)
    phys = PhysParams(g=a.g)
    rep = convergence_study(sampler, a.variant, a.levels, p=phys)
    energy = None
    expect = (a.target, a.variant) in CONVERGENT
    if expect:
        ok = rep.within(2.0, a.tol)
        status = "converges at the expected order" if ok else "order outside the expected band"
    else:
        ok = any(o != "saturated" and o < 1.0 for o in rep.orders.values())
        status = "non-convergent as expected" if ok else "unexpectedly convergent"
    checks = {}
    if not expect and a.target == "thacker":
        ref = pde_residual(sampler, "nh+forcing", a.levels[-1], p=phys)
        checks["ratio_to_nh_forcing"] = max(rep.finest().max.values()) / max(ref.max.values())
        status += f" (residual {checks['ratio_to_nh_forcing']:.1f}x the nh+forcing one at n={a.levels[-1]})"
    if a.target == "stationary":
        sol = generate_stationary(sampler.spec, a.g)
        checks["energy_flux_deviation"] = sol.energy_flux_deviation()
        checks["ode_residual"] = solution_residual(sol)
        flux_ok = checks["energy_flux_deviation"] <= 1e-6 and max(checks["ode_residual"].values()) <= 1e-6
        ok = ok and flux_ok
        status += "; flux constancy " + ("passes" if flux_ok else "fails")
    elif expect:
        energy = convergence_study(sampler, "energy", a.levels, p=phys)
        checks["energy_orders"] = energy.orders
        e_ok = energy.within(2.0, a.tol)
        ok = ok and e_ok
        status += "; energy balance " + ("converges" if e_ok else "does not converge")
    for eq, o in rep.orders.items():
        print(f"{eq:12s} order {o if isinstance(o, str) else f'{o:.3f}'}  finest max {rep.finest().max[eq]:.3e}")
    print(f"{a.target}/{a.variant}: {status}")
    if out:
        out.mkdir(parents=True, exist_ok=True)
        write_report_json(out / "report.json", rep)
        write_levels_csv(out / "levels.csv", rep)
        if energy is not None:
            write_levels_csv(out / "energy_levels.csv", energy)
        meta = {"command": "verify", "target": a.target, "variant": a.variant, "n_list": a.levels,
                "tol": a.tol, "g": a.g, "passed": ok, "status": status, "checks": checks,
                "params": {k: v for k, v in vars(a).items() if k not in ("func", "command", "out")}}
        _write_meta(out, meta)
    return EXIT_OK if ok else EXIT_VERIFY


# ------------------------------------------------------------------ simulate

INITIAL_KINDS = ("thacker", "soliton", "stationary", "dam-break", "lake-at-rest", "csv")
BATHYMETRY_KINDS = ("flat", "parabolic", "csv", "generated")


@dataclass
class ScenarioConfig:
    """Flat ``key = value`` description of one solver run."""

    variant: str = "nh"  # nh, sv (hydrostatic) or ns (nh with viscosity/friction)
    initial: str = "lake-at-rest"
    x_left: float = 0.0
    length: float = 10.0
    n: int = 200
    bathymetry: str = "flat"
    b1: float = 0.0
    b2: float = 0.0
    bathymetry_file: str = ""
    initial_file: str = ""
    # initial-condition parameters
    eta: float = 1.0
    h_left: float = 2.0
    h_right: float = 1.0
    x_dam: float = 5.0
    h0: float = 1.0
    l: float = 2.0
    d: float = 1.0
    x0: float = 0.0
    f0: float = 1.0
    t0: float = 0.0
    q0: float = 1.8
    h_exit: float = 1.0
    a: float = 5.0
    b: float = 3.4
    c: float = 1.5
    forcing: str = "auto"  # auto: Thacker forcing for thacker runs; none
    # physics
    g: float = 9.81
    mu: float = 0.0
    kappa: float = 0.0
    h_min: float = 1e-6
    # solver
    t_end: float = 1.0
    cfl: float = 0.5
    bc_left: str = "reflective"
    bc_right: str = "reflective"
    h_nh: float = 1e-2
    enable_nh: bool = True
    order: int = 1
    nh_rhs: str = "projection"
    snapshot_interval: float = 0.0
    max_steps: int = 10_000_000
    out: str = ""

    def validate(self) -> None:
        if self.variant not in ("nh", "sv", "ns"):
            raise ConfigError(f"variant must be nh, sv or ns, got {self.variant!r}")
        if self.initial not in INITIAL_KINDS:
            raise ConfigError(f"initial must be one of {INITIAL_KINDS}, got {self.initial!r}")
        if self.bathymetry not in BATHYMETRY_KINDS:
            raise ConfigError(f"bathymetry must be one of {BATHYMETRY_KINDS}, got {self.bathymetry!r}")
        if self.forcing not in ("auto", "none"):
            raise ConfigError("forcing must be auto or none")
        if self.bathymetry == "csv" and not self.bathymetry_file:
            raise ConfigError("bathymetry = csv needs bathymetry_file")
        if self.initial == "csv" and not self.initial_file:
            raise ConfigError("initial = csv needs initial_file")
        if self.n < 3 or not self.length > 0:
            raise ConfigError("need n >= 3 and length > 0")
        self.solver_config()

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            t_end=self.t_end, cfl=self.cfl,
            bc_left=BoundaryCondition.parse(self.bc_left), bc_right=BoundaryCondition.parse(self.bc_right),
            h_min=self.h_min, h_nh=self.h_nh, enable_nh=self.enable_nh and self.variant != "sv",
            mu=self.mu if self.variant == "ns" else 0.0, kappa=self.kappa if self.variant == "ns" else 0.0,
            order=self.order, nh_rhs=self.nh_rhs,
            snapshot_interval=self.snapshot_interval or None, max_steps=self.max_steps,
        )

    def phys(self) -> PhysParams:
        cfg = self.solver_config()
        return PhysParams(g=self.g, mu=cfg.mu, kappa=cfg.kappa, h_min=self.h_min)


_BOOL = {"true": True, "yes": True, "on": True, "1": True, "false": False, "no": False, "off": False, "0": False}


def parse_scenario(text: str, source: str = "<config>") -> ScenarioConfig:
    """Parse ``key = value`` lines; ``#``/``;`` start comments and ``[section]`` headers are ignored.

    Every problem is collected and reported with its line number in one
    :class:`ConfigError`.
    """
    types = {f.name: f.type for f in fields(ScenarioConfig)}
    values: Dict[str, object] = {}
    problems = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        key, sep, val = line.partition("=")
        if not sep:
            key, sep, val = line.partition(":")
        key, val = key.strip().replace("-", "_"), val.strip()
        if not sep or not key:
            problems.append(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        if key not in types:
            problems.append(f"{source}:{lineno}: unknown key {key!r}")
            continue
        if key in values:
            problems.append(f"{source}:{lineno}: duplicate key {key!r}")
            continue
        kind = types[key]
        try:
            if kind == "bool":
                if val.lower() not in _BOOL:
                    raise ValueError(val)
                values[key] = _BOOL[val.lower()]
            elif kind == "int":
                values[key] = int(val)
            elif kind == "float":
                values[key] = float(val)
            else:
                values[key] = val
        except ValueError:
            problems.append(f"{source}:{lineno}: {key} expects {kind}, got {val!r}")
    if problems:
        raise ConfigError("\n".join(problems))
    cfg = ScenarioConfig(**values)
    try:
        cfg.validate()
    except (ConfigError, ContractError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return cfg


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    sc = parse_scenario(text, str(path))
    # data files are looked up next to the scenario file
    for key in ("bathymetry_file", "initial_file"):
        val = getattr(sc, key)
        if val and not Path(val).is_absolute():
            setattr(sc, key, str(path.parent / val))
        if val and not Path(getattr(sc, key)).is_file():
            raise ConfigError(f"{path}: {key} {getattr(sc, key)} does not exist")
    return sc


def _bathymetry(sc: ScenarioConfig) -> Bathymetry:
    if sc.bathymetry == "parabolic":
        return ParabolicBottom(sc.b1, sc.b2)
    if sc.bathymetry == "csv":
        return read_bathymetry_csv(sc.bathymetry_file)
    return FlatBottom(sc.b1)


def build_scenario(sc: ScenarioConfig):
    """Grid, bathymetry, initial state, forcing and extra summary data of a scenario."""
    cfg = sc.solver_config()
    bc_mode = "periodic" if cfg.periodic else "extrapolate"
    grid = Grid1D(sc.x_left, sc.length / sc.n, sc.n, bc_mode)
    x = grid.x
    forcing = None
    extra: dict = {}
    if sc.initial == "thacker":
        p = ThackerParams(H0=sc.h0, b1=sc.b1, b2=sc.b2, f0=sc.f0, t0=sc.t0, g=sc.g)
        b = p.bathymetry
        traj = integrate_f(p, sc.t_end + 1e-3, 1e-4)
        fl = thacker_depth_averaged(x, sc.t0, p, traj)
        state = State.from_primitive(grid, fl.H, fl.u, fl.w, fl.pnh)
        if sc.forcing == "auto":
            def forcing(xx, t, _p=p, _traj=traj):
                return _p.b2 * xx * _traj.at(t)[2]
        extra["reference"] = "thacker"
    elif sc.initial == "soliton":
        p = SolitonParams(d=sc.d, l=sc.l, H0=sc.h0, g=sc.g, x0=sc.x0)
        b = p.bathymetry
        fl = soliton_state(x, 0.0, p)
        state = State.from_primitive(grid, fl.H, fl.u, fl.w, fl.pnh)
        extra.update({"c0": p.c0, "amplitude": p.a})
    elif sc.initial == "stationary":
        spec = StationarySpec(Q0=sc.q0, H_exit=sc.h_exit, a=sc.a, b=sc.b, c=sc.c, L=sc.length)
        if sc.x_left != 0.0:
            raise ConfigError("stationary scenarios need x_left = 0")
        full = generate_stationary(spec, sc.g)
        b = full.bathymetry
        sol = StationarySampler(spec, sc.g).solution(x)
        state = State.from_primitive(grid, sol.H, sol.u, sol.w, sol.pnh)
        extra["energy_flux"] = float(np.mean(full.energy_flux()))
    elif sc.initial == "csv":
        state, zb = read_state_csv(sc.initial_file, bc_mode)
        grid = state.grid
        b = _bathymetry(sc) if sc.bathymetry != "flat" or sc.bathymetry_file else SampledBottom(grid.x, zb)
    else:
        b = _bathymetry(sc)
        zb = b.eval(x)[0]
        if sc.initial == "dam-break":
            level = np.where(x < sc.x_dam, sc.h_left, sc.h_right)
            H = np.maximum(level - zb, 0.0) if sc.bathymetry != "flat" else level
        else:
            H = np.maximum(sc.eta - zb, 0.0)
        state = State.from_primitive(grid, H, 0.0)
    return grid, b, state, forcing, extra


def cmd_simulate(a) -> int:
    sc = load_scenario(a.config)
    out = Path(a.out or sc.out or "run")
    grid, b, state, forcing, extra = build_scenario(sc)
    cfg = sc.solver_config()
    phys = sc.phys()
    meta = {"command": "simulate", "version": __version__, "scenario": asdict(sc), "g": sc.g,
            "solver": cfg.to_dict(), "config_file": str(a.config)}
    try:
        res = run(state, b, cfg, phys, forcing=forcing, t0=sc.t0 if sc.initial == "thacker" else 0.0)
    except NHSWError as exc:
        partial = getattr(exc, "result", None)
        if partial is not None:
            partial.meta.update(meta)
            partial.meta["error"] = str(exc)
            partial.save(out, b, phys)
        else:
            _write_meta(out, {**meta, "error": str(exc)})
        raise
    budget = energy_budget(res)
    summary = {"energy": budget.summary(), "mass_start": res.mass[0], "mass_end": res.mass[-1],
               "mass_drift": (res.mass[-1] - res.mass[0]) / res.mass[0] if res.mass[0] else 0.0,
               "max_constraint_residual": max(res.constraint_residual), "h_min_final": float(res.final.H.min())}
    if "amplitude" in extra:
        crest = float(res.final.H.max() - sc.h0)
        summary["amplitude_retention"] = crest / extra["amplitude"]
    res.meta.update(meta)
    res.meta["extra"] = extra
    res.meta["summary"] = summary
    res.save(out, b, phys)
    print(f"{res.meta['steps']} steps to t={res.series_t[-1]:.6g}; wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------- main

def _add_thacker(p):
    p.add_argument("--h0", type=float, default=1.0)
    p.add_argument("--b1", type=float, default=0.0)
    p.add_argument("--b2", type=float, default=0.5)
    p.add_argument("--f0", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=1e-4, help="RK4 step of the trajectory")
    p.add_argument("--x-left", type=float, default=-3.0)
    p.add_argument("--x-right", type=float, default=3.0)


def _add_soliton(p):
    p.add_argument("--h0", type=float, default=1.0)
    p.add_argument("--l", type=float, default=2.0)
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--half-width", type=float, default=10.0, help="domain half-width in units of l")


def _add_stationary(p):
    p.add_argument("--q0", type=float, default=BUMP_FLOW.Q0)
    p.add_argument("--h-exit", type=float, default=BUMP_FLOW.H_exit)
    p.add_argument("--a", type=float, default=BUMP_FLOW.a)
    p.add_argument("--b", type=float, default=BUMP_FLOW.b)
    p.add_argument("--c", type=float, default=BUMP_FLOW.c)
    p.add_argument("--L", type=float, default=BUMP_FLOW.L)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nhsw", description="Depth-averaged non-hydrostatic shallow water tools")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analytic", help="write exact or quasi-analytical solutions")
    an_sub = an.add_subparsers(dest="kind", required=True)
    th = an_sub.add_parser("thacker")
    _add_thacker(th)
    th.add_argument("--t-end", type=float, default=10.0)
    th.add_argument("--n", type=int, default=400)
    th.add_argument("--snapshots", type=int, default=5)
    th.add_argument("--stride", type=int, default=100, help="keep every k-th trajectory sample")
    so = an_sub.add_parser("soliton")
    _add_soliton(so)
    so.add_argument("--t", type=float, default=0.0)
    so.add_argument("--n", type=int, default=1000)
    st = an_sub.add_parser("stationary")
    _add_stationary(st)
    st.add_argument("--n", dest="gen_n", type=int, default=BUMP_FLOW.n, help="number of samples on [0, L]")
    for p in (th, so, st):
        p.add_argument("--g", type=float, default=9.81)
        p.add_argument("--out", default="out")
        p.set_defaults(func=cmd_analytic)

    ve = sub.add_parser("verify", help="convergence study of a model variant on an exact solution")
    ve_sub = ve.add_subparsers(dest="target", required=True)
    vth = ve_sub.add_parser("thacker")
    _add_thacker(vth)
    vth.add_argument("--t-eval", type=float, default=0.5)
    vso = ve_sub.add_parser("soliton")
    _add_soliton(vso)
    vso.add_argument("--t-eval", type=float, default=0.0)
    vst = ve_sub.add_parser("stationary")
    _add_stationary(vst)
    for p in (vth, vso, vst):
        p.add_argument("--variant", choices=("nh", "nh+forcing", "gn", "sv", "ns"), default=None)
        p.add_argument("--n-list", dest="levels", type=_n_list, default=[128, 256, 512],
                       help="comma-separated grid sizes (also accepted as --n)")
        p.add_argument("--tol", type=float, default=0.3, help="half-width of the accepted order band")
        p.add_argument("--g", type=float, default=9.81)
        p.add_argument("--out", default=None)
        p.set_defaults(func=cmd_verify)

    si = sub.add_parser("simulate", help="run the solver on a scenario file")
    si.add_argument("config")
    si.add_argument("--out", default=None)
    si.set_defaults(func=cmd_simulate)
    return parser


def _normalize_verify(a) -> None:
    if a.variant is None:
        a.variant = "nh+forcing" if a.target == "thacker" else "nh"


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # `verify ... --n 128,256,512` is accepted as the level list
    if argv[:1] == ["verify"]:
        argv = ["--n-list" if tok == "--n" else tok for tok in argv]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command == "verify":
        _normalize_verify(args)
    try:
        return args.func(args)
    except (ConfigError, ContractError, OutOfDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NHSWError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
