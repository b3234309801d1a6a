"""Command-line front end.

Internal units have hbar = 1.  ``--hbar`` rescales at the boundary:
positions (xi, widths, dx) are multiplied by hbar on output and divided on
input, and a harmonic frequency enters as omega * hbar.
"""

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, io, kernels, overlap, solver, transform, verify
from .errors import ConfigurationError, DomainError, NoMinimumError, QuasiposError
from .mlstate import MLParams, ml_wavefunction, solve_ml_params, verify_ml_conditions
from .model import kinematic_scales, model_from_dict, model_to_dict
from .quadrature import build_grid
from .wavefunction import random_smooth_state

COMMANDS = ("model", "mlstate", "transform", "overlap", "solve", "compare", "verify", "sweep")
OUT_ENV = "QUASIPOS_OUT"
DEFAULT_OUT = "quasipos-out"

_SCHEMA = {
    "command": None,
    "model": None,
    "numeric": {"grid_n", "epsilon", "tolerance", "levels", "xi", "workers", "oversampling",
                "seed", "betas", "cutoff", "hbar"},
    "physics": {"mass", "potential", "omega", "width", "coefficients", "prescription"},
    "output": {"dir", "format"},
}
_DEFAULTS = {
    "numeric": {"grid_n": 256, "epsilon": 0.0, "tolerance": 1e-6, "levels": 5, "xi": [0.0],
                "workers": 1, "oversampling": 4, "seed": 0, "betas": None, "cutoff": None,
                "hbar": 1.0},
    "physics": {"mass": 1.0, "potential": "harmonic", "omega": 1.0, "width": math.pi,
                "coefficients": None, "prescription": "derivative_corrected"},
    "output": {"dir": None, "format": "both"},
}


@dataclass
class RunConfig:
    command: str
    model: dict
    numeric: dict = field(default_factory=dict)
    physics: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc):
        """Validate against the strict schema; unknown keys are rejected."""
        if not isinstance(doc, dict):
            raise ConfigurationError("config must be a JSON object")
        unknown = set(doc) - set(_SCHEMA)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        command = doc.get("command")
        if command not in COMMANDS:
            raise ConfigurationError(f"command must be one of {COMMANDS}, got {command!r}")
        sections = {}
        for name in ("numeric", "physics", "output"):
            block = doc.get(name, {}) or {}
            if not isinstance(block, dict):
                raise ConfigurationError(f"{name} must be an object")
            bad = set(block) - _SCHEMA[name]
            if bad:
                raise ConfigurationError(f"unknown keys in {name}: {sorted(bad)}")
            sections[name] = {**_DEFAULTS[name], **block}
        model = doc.get("model", {"name": "kmm", "beta": 1.0})
        if not isinstance(model, dict):
            raise ConfigurationError("model must be an object")
        cfg = cls(command, dict(model), **sections)
        cfg.validate()
        return cfg

    def validate(self):
        num = self.numeric
        if int(num["grid_n"]) < 16:
            raise ConfigurationError("grid_n must be at least 16")
        if not float(num["hbar"]) > 0:
            raise ConfigurationError("hbar must be positive")
        if not float(num["tolerance"]) > 0:
            raise ConfigurationError("tolerance must be positive")
        if int(num["levels"]) < 1 or int(num["workers"]) < 1:
            raise ConfigurationError("levels and workers must be positive")
        if self.physics["prescription"] not in solver.PRESCRIPTIONS:
            raise ConfigurationError(f"prescription must be one of {solver.PRESCRIPTIONS}")
        if self.physics["potential"] not in ("harmonic", "well", "polynomial"):
            raise ConfigurationError("potential must be harmonic, well or polynomial")
        if self.output["format"] not in ("csv", "json", "both"):
            raise ConfigurationError("format must be csv, json or both")
        model_from_dict(self.model)

    def to_dict(self):
        return {"command": self.command, "model": self.model, "numeric": self.numeric,
                "physics": self.physics, "output": self.output}


def _float_list(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (strict schema)")
    common.add_argument("--model", help="identity, kmm, sqrt or a JSON model file")
    common.add_argument("--beta", type=float)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--grid-n", type=int, dest="grid_n")
    common.add_argument("--xi", type=_float_list, help="comma-separated positions")
    common.add_argument("--levels", type=int)
    common.add_argument("--prescription", choices=solver.PRESCRIPTIONS)
    common.add_argument("--potential", choices=("harmonic", "well", "polynomial"))
    common.add_argument("--omega", type=float)
    common.add_argument("--mass", type=float)
    common.add_argument("--width", type=float, help="infinite-well width")
    common.add_argument("--coefficients", type=_float_list, help="polynomial c0,c1,...")
    common.add_argument("--betas", type=_float_list, help="beta values for sweeps")
    common.add_argument("--hbar", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--format", choices=("csv", "json", "both"))
    common.add_argument("--workers", type=int)
    common.add_argument("--tolerance", type=float)
    parser = argparse.ArgumentParser(prog="quasipos",
                                     description="Quasi-position GUP quantum mechanics toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "model": "print rho_max and the minimal position uncertainty",
        "mlstate": "solve ML parameters and sample ML states",
        "transform": "generalized Fourier transform of an ML or random state",
        "overlap": "ML-state overlap matrix and position overlaps",
        "solve": "spectrum for one potential prescription",
        "compare": "compare the three potential prescriptions",
        "verify": "run the invariant suites",
        "sweep": "independent jobs over beta (and xi) grids",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


_FLAG_MAP = {
    "numeric": ("grid_n", "epsilon", "tolerance", "levels", "xi", "workers", "seed", "betas",
                "hbar"),
    "physics": ("mass", "potential", "omega", "width", "coefficients", "prescription"),
}


def config_from_args(args):
    doc = io.read_json(args.config) if args.config else {}
    if not isinstance(doc, dict):
        raise ConfigurationError("config must be a JSON object")
    doc = {**doc, "command": args.command}
    if args.model is not None:
        path = Path(args.model)
        if path.suffix == ".json" or path.exists():
            doc["model"] = io.read_json(path)
        else:
            doc["model"] = {**doc.get("model", {}), "family": args.model}
    if args.beta is not None:
        doc.setdefault("model", {"name": "kmm"})
        doc["model"] = {**doc["model"], "beta": args.beta}
    for section, names in _FLAG_MAP.items():
        block = dict(doc.get(section, {}) or {})
        for name in names:
            val = getattr(args, name)
            if val is not None:
                block[name] = val
        if block:
            doc[section] = block
    out = dict(doc.get("output", {}) or {})
    if args.out is not None:
        out["dir"] = args.out
    if args.format is not None:
        out["format"] = args.format
    if out:
        doc["output"] = out
    return RunConfig.from_dict(doc)


class Run:
    """Output bookkeeping for one command invocation."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.out = Path(cfg.output["dir"] or os.environ.get(OUT_ENV) or DEFAULT_OUT)
        self.outputs = []
        self.checks = {}
        self.tolerances = {"tolerance": cfg.numeric["tolerance"]}
        self.hbar = float(cfg.numeric["hbar"])

    @property
    def csv(self):
        return self.cfg.output["format"] in ("csv", "both")

    @property
    def json(self):
        return self.cfg.output["format"] in ("json", "both")

    def write(self, writer, name, *args):
        path = writer(*args, self.out / name)
        self.outputs.append(str(path.relative_to(self.out)))
        return path

    def manifest(self, status):
        doc = {"command": self.cfg.command, "version": __version__, "backend": kernels.BACKEND,
               "config": self.cfg.to_dict(), "tolerances": self.tolerances,
               "outputs": sorted(self.outputs), "checks": self.checks, "status": status,
               "passed": all(self.checks.values()) if self.checks else True}
        io.write_json(doc, self.out / "manifest.json")


def _model(cfg):
    return model_from_dict(cfg.model)


def cmd_model(run):
    model = _model(run.cfg)
    scales = kinematic_scales(model)
    dx = scales.delta_x_min * run.hbar
    print(f"model={model.name} beta={model.beta!r}")
    print(f"rho_max={round(scales.rho_max, 7)!r}")
    print(f"delta_x_min={round(dx, 10)!r}")
    if run.json:
        run.write(io.write_json, "model.json",
                  {"model": model_to_dict(model), "rho_max": scales.rho_max,
                   "rho_lo": scales.rho_lo, "rho_hi": scales.rho_hi, "delta_x_min": dx,
                   "hbar": run.hbar})
    return 0


def _xi_internal(run):
    return [x / run.hbar for x in run.cfg.numeric["xi"]]


def cmd_mlstate(run):
    model = _model(run.cfg)
    ml = solve_ml_params(model)
    grid = build_grid(model, run.cfg.numeric["grid_n"], epsilon=run.cfg.numeric["epsilon"])
    tol = run.cfg.numeric["tolerance"]
    reports = []
    for i, xi in enumerate(_xi_internal(run)):
        state = ml_wavefunction(model, ml.with_xi(xi), grid)
        rep = None if grid.epsilon else verify_ml_conditions(state, grid, tol)
        if run.csv:
            run.write(io.write_wavefunction_csv, f"mlstate_{i}.csv", state.samples)
        if rep is not None:
            run.checks[f"ml_conditions_{i}"] = rep.passed
            reports.append({"xi": xi * run.hbar, **rep.to_dict()})
    params = ml.to_dict()
    params["achieved_delta_x"] *= run.hbar
    print(f"mean_p={ml.mean_p!r} delta_p={ml.delta_p!r} mean_f={ml.mean_f!r} "
          f"delta_x={params['achieved_delta_x']!r}")
    if run.json:
        run.write(io.write_json, "mlstate.json", {"params": params, "checks": reports})
    if run.csv:
        run.write(io.write_grid_csv, "grid.csv", grid)
    return 0 if all(run.checks.values()) else 1


def _params_or_ordinary(model):
    try:
        return solve_ml_params(model)
    except NoMinimumError:
        return MLParams.ordinary()


def _state_grid(model, n, cutoff):
    if kinematic_scales(model).finite and cutoff is None:
        return build_grid(model, n)
    return build_grid(model, n, cutoff=cutoff or 12.0)


def cmd_transform(run):
    model = _model(run.cfg)
    num = run.cfg.numeric
    grid = _state_grid(model, num["grid_n"], num["cutoff"])
    ml = _params_or_ordinary(model)
    psi = random_smooth_state(grid, np.random.default_rng(num["seed"]))
    xg = transform.xi_grid(grid, oversampling=num["oversampling"])
    q = transform.to_quasiposition(grid, psi, xg, ml)
    back = transform.to_momentum(q, grid, ml)
    err = math.sqrt(float(np.sum(grid.weights * np.abs(back.values - psi.values) ** 2)))
    run.checks["round_trip"] = err <= num["tolerance"]
    run.tolerances["round_trip"] = num["tolerance"]
    print(f"round_trip_error={err!r}")
    if run.csv:
        run.write(io.write_wavefunction_csv, "state_momentum.csv", psi)
        scaled = q.replace(grid=transform.XiGrid(q.grid.nodes * run.hbar, q.grid.weights * run.hbar,
                                                 q.grid.spacing * run.hbar, q.grid.full_period))
        run.write(io.write_wavefunction_csv, "state_quasiposition.csv", scaled)
    if run.json:
        run.write(io.write_json, "transform.json", {"round_trip_error": err, "xi_points": xg.size,
                                                    "ml": ml.to_dict()})
    return 0 if all(run.checks.values()) else 1


def cmd_overlap(run):
    model = _model(run.cfg)
    scales = kinematic_scales(model)
    if not scales.finite:
        raise NoMinimumError("overlaps need a model with finite rho_max")
    ml = solve_ml_params(model)
    num = run.cfg.numeric
    xis = num["xi"] if len(num["xi"]) > 1 else list(
        np.linspace(-3, 3, 13) * scales.delta_x_min * run.hbar)
    xi_int = np.asarray(xis, dtype=float) / run.hbar
    grid = build_grid(model, num["grid_n"])
    mat = overlap.overlap_matrix(model, ml, xi_int, grid)
    pos = np.array([[float(overlap.position_overlap(model, a - b)) for b in xi_int] for a in xi_int])
    herm = float(np.max(np.abs(mat - mat.conj().T)))
    run.checks["hermitian"] = herm <= num["tolerance"]
    if run.csv:
        run.write(io.write_overlap_csv, "ml_overlap.csv", list(xis), mat)
        run.write(io.write_overlap_csv, "position_overlap.csv", list(xis), pos.astype(complex))
    if run.json:
        run.write(io.write_json, "overlap.json", {"xi": list(xis), "hermiticity": herm,
                                                  "delta_x_min": scales.delta_x_min * run.hbar})
    print(f"points={len(xis)} hermiticity={herm!r}")
    return 0 if all(run.checks.values()) else 1


def _spec(run, model=None, prescription=None):
    phys = run.cfg.physics
    model = model or _model(run.cfg)
    kind = phys["potential"]
    if kind == "harmonic":
        pot = solver.Potential.harmonic(phys["omega"] * run.hbar)
    elif kind == "well":
        pot = solver.Potential.well(phys["width"] / run.hbar)
    else:
        if not phys["coefficients"]:
            raise ConfigurationError("polynomial potential needs --coefficients")
        pot = solver.Potential.polynomial([c * run.hbar ** k
                                           for k, c in enumerate(phys["coefficients"])])
    n = int(run.cfg.numeric["grid_n"])
    return solver.HamiltonianSpec(model, pot, mass=phys["mass"],
                                  prescription=prescription or phys["prescription"],
                                  basis_size=max(n, 4 * int(run.cfg.numeric["levels"]), 32))


def cmd_solve(run):
    spec = _spec(run)
    sp = solver.solve_spectrum(spec, run.cfg.numeric["levels"])
    for n, e in enumerate(sp.eigenvalues):
        print(f"E[{n}]={float(e)!r}")
    run.checks["converged"] = bool(np.all(sp.converged))
    run.tolerances["convergence_rtol"] = solver.CONVERGENCE_RTOL
    if run.csv:
        run.write(io.write_spectrum_csv, "spectrum.csv", sp)
    if run.json:
        run.write(io.write_json, "spectrum.json", sp.to_dict())
    return 0 if all(run.checks.values()) else 1


def cmd_compare(run):
    spec = _spec(run)
    rep = solver.compare_prescriptions(spec, run.cfg.numeric["levels"],
                                       betas=run.cfg.numeric["betas"])
    tol = run.cfg.numeric["tolerance"]
    run.checks["similarity"] = rep.similarity_max_relative <= tol
    print(f"similarity_max_relative={rep.similarity_max_relative!r}")
    print(f"naive_max_abs={rep.naive_max_abs!r}")
    if rep.sweep:
        print(f"naive_gap_slope={rep.sweep['naive_gap_slope']!r}")
        print(f"x2_gap_slope={rep.sweep['x2_gap_slope']!r}")
    if run.csv:
        run.write(io.write_spectra_csv, "spectra.csv", rep)
    if run.json:
        run.write(io.write_json, "compare.json", rep.to_dict())
    return 0 if all(run.checks.values()) else 1


def cmd_verify(run):
    model = _model(run.cfg)
    results = verify.run_verification(model, n=max(int(run.cfg.numeric["grid_n"]), 512),
                                      seed=run.cfg.numeric["seed"])
    for r in results:
        run.checks[r.name] = r.passed
        run.tolerances[r.name] = r.tolerance
        state = "SKIP" if r.skipped else ("PASS" if r.passed else "FAIL")
        print(f"{state} {r.name}")
    if run.json:
        run.write(io.write_json, "verify.json", [r.to_dict() for r in results])
    return 0 if all(r.passed for r in results) else 1


def _sweep_job(job):
    kind, model_doc, value, grid_n, hbar = job
    model = model_from_dict({**model_doc, "beta": value} if kind == "beta" else model_doc)
    scales = kinematic_scales(model)
    out = {"kind": kind, "value": value, "rho_max": scales.rho_max,
           "delta_x_min": scales.delta_x_min * hbar}
    if kind == "beta" and scales.finite:
        ml = solve_ml_params(model)
        out["ml"] = {**ml.to_dict(), "achieved_delta_x": ml.achieved_delta_x * hbar}
    if kind == "xi":
        ml = solve_ml_params(model)
        grid = build_grid(model, grid_n)
        val = overlap.ml_overlap(model, ml, value / hbar, 0.0, grid)
        out["overlap_with_origin"] = {"re": val.real, "im": val.imag}
        out["position_overlap"] = float(overlap.position_overlap(model, value / hbar))
    return out


def cmd_sweep(run):
    num = run.cfg.numeric
    betas = num["betas"] or []
    xis = num["xi"] if len(num["xi"]) > 1 else []
    if not betas and not xis:
        raise ConfigurationError("sweep needs --betas and/or several --xi values")
    base = dict(run.cfg.model)
    jobs = [("beta", base, float(b), num["grid_n"], run.hbar) for b in betas]
    jobs += [("xi", base, float(x), num["grid_n"], run.hbar) for x in xis]
    if num["workers"] > 1:
        with ProcessPoolExecutor(max_workers=num["workers"]) as pool:
            results = list(pool.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(j) for j in jobs]
    for res in results:
        run.write(io.write_json, f"sweep/{res['kind']}_{io.fmt(res['value'])}.json", res)
    merged = sorted(results, key=lambda r: (r["kind"], r["value"]))
    run.write(io.write_json, "sweep_summary.json", merged)
    if run.csv:
        rows = ((r["kind"], r["value"], r["rho_max"], r["delta_x_min"]) for r in merged)
        path = io.write_rows(run.out / "sweep_summary.csv",
                             ["kind", "value", "rho_max", "delta_x_min"], rows)
        run.outputs.append(str(path.relative_to(run.out)))
    print(f"jobs={len(results)}")
    return 0


HANDLERS = {"model": cmd_model, "mlstate": cmd_mlstate, "transform": cmd_transform,
            "overlap": cmd_overlap, "solve": cmd_solve, "compare": cmd_compare,
            "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigurationError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    run = Run(cfg)
    try:
        code = HANDLERS[cfg.command](run)
    except (ConfigurationError, DomainError, NoMinimumError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        run.manifest("configuration_error")
        return 2
    except QuasiposError as exc:
        print(f"error: {exc}", file=sys.stderr)
        run.checks["completed"] = False
        run.manifest("error")
        return 1
    run.manifest("ok" if code == 0 else "verification_failure")
    return code


if __name__ == "__main__":
    sys.exit(main())
