"""Command-line front end: rates tables, cooling curves, pulse sweeps, Wigner maps.

Subcommands
-----------
rates    closed-form and sideband-resolved decoherence rates for a device
cool     two-phonon cooling infidelity curves and their minima
pipulse  pi-pulse fidelity statistics over the Bloch sphere vs lambda
wigner   Wigner map of the post-pulse mechanical state

Every run writes ``manifest.json`` into the output directory with the
resolved parameters, output file list, and convergence-check deltas.
CSV output is deterministic: identical configuration gives byte-identical
files.  Exit codes: 0 success, 2 configuration/usage error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .circuit import (
    CircuitParams,
    DriveParams,
    MembraneParams,
    compute_rates,
    coupling_ratio,
    sm_rates,
)
from .dynamics import IntegrationError, SimulationConfig, evolve_full
from .fock import two_phonon_target, uhlmann_fidelity
from .protocols import (
    QubitState,
    cooling_infidelity_curve,
    default_tau_grid,
    min_infidelity,
    pi_pulse,
    pi_pulse_fidelity_sweep,
    pi_pulse_wigner,
    rates_from_lambda,
    pulse_drive,
)
from .wigner import default_grid, origin_parity_value

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

STEP_HALVING_LIMIT = 1e-6
TRUNCATION_LIMIT = 1e-5

CONFIG_KEYS = {
    # device
    "omega_m": float, "omega_s": float, "omega_a": float, "gamma": float,
    "gamma_m": float, "delta": float, "R": float, "R0": float, "L": float,
    "L0": float, "C0": float, "Z_out": float, "d0": float, "mass": float,
    "mass_factor": float, "alpha": float, "A_in": float, "n_bar_e": float,
    "n_bar_m": float, "g1": float, "g2": float,
    # scenario
    "lambda": float, "ratio_b_over_r": float, "n_bar": float,
    "dim": int, "dt": float, "tau_max": float,
}


class ConfigError(Exception):
    pass


def parse_config_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = CONFIG_KEYS[key](val) if CONFIG_KEYS[key] is int \
                else float(val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}")
    return values


def load_config(path: str | None, overrides: list[str]) -> dict:
    values = {}
    if path:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}")
        values.update(parse_config_text(text, source=path))
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r} in --set")
        try:
            values[key] = CONFIG_KEYS[key](val) if CONFIG_KEYS[key] is int \
                else float(val)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}")
    return values


def require_keys(values: dict, keys: list[str]) -> None:
    missing = [k for k in keys if k not in values]
    if missing:
        raise ConfigError(f"missing config key(s): {', '.join(missing)}")


def format_float(x: float) -> str:
    return f"{x:.17g}"


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if cell is None:
                cells.append("")
            elif isinstance(cell, str):
                cells.append(cell)
            else:
                cells.append(format_float(float(cell)))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class ManifestWriter:
    def __init__(self, command: str, out_dir: Path, params: dict):
        self.data = {
            "command": command,
            "tool_version": __version__,
            "parameters": {k: params[k] for k in sorted(params)},
            "outputs": [],
            "convergence": {},
            "summary": {},
        }
        self.out_dir = out_dir
        self._t0 = time.monotonic()

    def add_output(self, path: Path):
        self.data["outputs"].append(path.name)

    def finish(self) -> Path:
        self.data["duration_seconds"] = time.monotonic() - self._t0
        for name in self.data["outputs"]:
            if not (self.out_dir / name).exists():
                raise IntegrationError(f"declared output {name} was not written")
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(self.data, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        return path

    def check_convergence(self):
        conv = self.data["convergence"]
        halving = conv.get("step_halving_delta")
        trunc = conv.get("truncation_delta")
        if halving is not None and halving > STEP_HALVING_LIMIT:
            raise IntegrationError(
                f"step-halving delta {halving:.3e} exceeds {STEP_HALVING_LIMIT}")
        if trunc is not None and trunc > TRUNCATION_LIMIT:
            raise IntegrationError(
                f"truncation delta {trunc:.3e} exceeds {TRUNCATION_LIMIT}")


def parse_lambda(token: str) -> float:
    val = math.inf if token.strip().lower() in ("inf", "infinity") else float(token)
    if not val > 0:
        raise ConfigError(f"lambda must be > 0, got {token!r}")
    return val


def parse_lambda_list(text: str) -> list[float]:
    return [parse_lambda(tok) for tok in text.split(",") if tok.strip()]


# ---------------------------------------------------------------------------
# rates
# ---------------------------------------------------------------------------

def _build_device(values: dict):
    require_keys(values, ["omega_m", "d0", "mass", "gamma", "delta"])
    mem = MembraneParams(
        omega_m=values["omega_m"], mass=values["mass"], d0=values["d0"],
        gamma_m=values.get("gamma_m", 0.0), n_bar_m=values.get("n_bar_m", 0.0),
        mass_factor=values.get("mass_factor", 1.0))
    circ = CircuitParams(
        omega_s=values.get("omega_s", 0.0), omega_a=values.get("omega_a", 0.0),
        gamma=values["gamma"], R=values.get("R", 0.0), R0=values.get("R0", 0.0),
        L=values.get("L", 0.0), L0=values.get("L0", 0.0),
        C0=values.get("C0", 0.0), delta=values["delta"],
        Z_out=values.get("Z_out", 0.0), n_bar_e=values.get("n_bar_e", 0.0))
    g1 = values.get("g1", 1.0)
    g2 = values.get("g2", g1 * coupling_ratio(mem))
    drive = DriveParams.for_device(mem, circ, alpha=values.get("alpha", 1.0),
                                   A_in=values.get("A_in", 0.0))
    return mem, circ, drive, g1, g2


def cmd_rates(args, values: dict, out_dir: Path, manifest: ManifestWriter) -> None:
    mem, circ, drive, g1, g2 = _build_device(values)
    main = compute_rates(mem, circ, drive, g1, g2)
    gen = sm_rates(mem, circ, drive, g1, g2)
    gen_set = gen.rate_set()

    def rel(a, b):
        if b == 0 or not math.isfinite(b):
            return 0.0 if a == b else math.inf
        return abs(a - b) / abs(b)

    rows = [
        ("gamma2", main.gamma2, gen_set.gamma2, rel(gen_set.gamma2, main.gamma2)),
        ("gamma1_r", main.gamma1_r, gen_set.gamma1_r,
         rel(gen_set.gamma1_r, main.gamma1_r)),
        ("gamma1_b", main.gamma1_b, gen_set.gamma1_b,
         rel(gen_set.gamma1_b, main.gamma1_b)),
    ]
    print(f"coupling ratio g2/g1 = {g2 / g1:.6e}")
    print(f"{'rate':>10} {'closed form':>16} {'sideband sums':>16} {'rel dev':>10}")
    for name, a, b, r in rows:
        print(f"{name:>10} {a:16.9e} {b:16.9e} {r:10.3e}")
    print(f"{'lambda_r':>10} {main.lambda_r:16.9e}")
    print(f"{'lambda_m':>10} {main.lambda_m:16.9e}")
    print(f"{'lambda':>10} {main.lambda_total:16.9e}")
    print(f"heating asymmetry (symmetric channel): {gen.heating_asymmetry_r:.6f}"
          f"  (1/9 = {1/9:.6f})")
    if args.csv:
        path = out_dir / args.csv
        write_csv(path,
                  ["rate", "closed_form", "sideband_sums", "rel_deviation"],
                  [(n, a, b, r) for n, a, b, r in rows]
                  + [("lambda_r", main.lambda_r, gen_set.lambda_r,
                      rel(gen_set.lambda_r, main.lambda_r)),
                     ("lambda_m", main.lambda_m, gen_set.lambda_m,
                      rel(gen_set.lambda_m, main.lambda_m)),
                     ("lambda", main.lambda_total, gen_set.lambda_total,
                      rel(gen_set.lambda_total, main.lambda_total))])
        manifest.add_output(path)
    manifest.data["summary"] = {
        "g_ratio": g2 / g1,
        "lambda_r": main.lambda_r, "lambda_m": main.lambda_m,
        "lambda": main.lambda_total,
        "heating_asymmetry_r": gen.heating_asymmetry_r,
    }


# ---------------------------------------------------------------------------
# cool
# ---------------------------------------------------------------------------

def _cool_one(task):
    idx, lam, ratio, n_bar, dim, dt, tau_grid = task
    curve = cooling_infidelity_curve(lam, ratio, n_bar, tau_grid, dim=dim, dt=dt)
    tau_min, inf_min = min_infidelity(lam, ratio, n_bar, dim=dim, dt=dt,
                                      tau_grid=tau_grid)
    return idx, curve, (tau_min, inf_min)


def _run_pool(tasks, worker, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks))


def cmd_cool(args, values: dict, out_dir: Path, manifest: ManifestWriter) -> None:
    lambdas = parse_lambda_list(args.lambdas) if args.lambdas \
        else [values.get("lambda", 34.0)]
    ratio = args.ratio if args.ratio is not None \
        else values.get("ratio_b_over_r", 1.0)
    n_bar = args.nbar if args.nbar is not None else values.get("n_bar", 4.0)
    dim = args.dim or values.get("dim")
    dt = args.dt or values.get("dt")
    tau_max = args.tau_max if args.tau_max is not None \
        else values.get("tau_max", 100.0)
    tau_grid = default_tau_grid(tau_max, args.tau_points)

    tasks = [(i, lam, ratio, n_bar, dim, dt, tau_grid)
             for i, lam in enumerate(lambdas)]
    results = sorted(_run_pool(tasks, _cool_one, args.jobs), key=lambda r: r[0])

    curve_rows, minima_rows = [], []
    for (idx, curve, (tau_min, inf_min)), lam in zip(results, lambdas):
        for tau, inf, inf_ov in curve:
            curve_rows.append((tau, lam, inf, inf_ov))
        minima_rows.append((lam, tau_min, inf_min, n_bar))
    curves_path = out_dir / "cool_curves.csv"
    minima_path = out_dir / "cool_minima.csv"
    write_csv(curves_path,
              ["tau", "lambda", "infidelity", "infidelity_overlap"], curve_rows)
    write_csv(minima_path,
              ["lambda", "tau_min", "infidelity_min", "n_bar"], minima_rows)
    manifest.add_output(curves_path)
    manifest.add_output(minima_path)
    manifest.data["summary"] = {
        "minima": [{"lambda": lam, "tau_min": t, "infidelity_min": v}
                   for lam, t, v, _ in minima_rows]}

    # Convergence probe on the first lambda: infidelity at its optimum
    # recomputed with a halved step and a deepened truncation.
    lam0 = lambdas[0]
    tau0, inf0 = results[0][2]
    probe_tau = max(tau0, tau_grid[1])
    base = _cool_probe(lam0, ratio, n_bar, dim, dt, probe_tau)
    g1r, g1b = rates_from_lambda(lam0, ratio)
    cfg = SimulationConfig(gamma2=1.0, gamma1_r=g1r, gamma1_b=g1b,
                           dim=dim or default_cool_dim(n_bar), dt=dt,
                           initial=float(n_bar))
    half = _cool_probe(lam0, ratio, n_bar, dim, cfg.timestep() / 2.0, probe_tau)
    deeper = _cool_probe(lam0, ratio, n_bar, cfg.dim + 5, dt, probe_tau)
    manifest.data["convergence"] = {
        "probe": {"lambda": lam0, "tau": probe_tau},
        "step_halving_delta": abs(half - base),
        "truncation_delta": abs(deeper - base),
    }
    manifest.check_convergence()


def default_cool_dim(n_bar: float) -> int:
    from .fock import default_thermal_dim
    return default_thermal_dim(n_bar)


def _cool_probe(lam, ratio, n_bar, dim, dt, tau) -> float:
    g1r, g1b = rates_from_lambda(lam, ratio)
    cfg = SimulationConfig(gamma2=1.0, gamma1_r=g1r, gamma1_b=g1b,
                           dim=dim or default_cool_dim(n_bar), dt=dt,
                           initial=float(n_bar))
    target = two_phonon_target(cfg.initial_state())
    rho = evolve_full(cfg, [tau])[0]
    return uhlmann_fidelity(rho, target)


# ---------------------------------------------------------------------------
# pipulse
# ---------------------------------------------------------------------------

def cmd_pipulse(args, values: dict, out_dir: Path, manifest: ManifestWriter) -> None:
    lambdas = parse_lambda_list(args.lambdas) if args.lambdas \
        else [values.get("lambda", 100.0)]
    ratio = args.ratio if args.ratio is not None \
        else values.get("ratio_b_over_r", 1.0)
    dim = args.dim or values.get("dim") or 12
    dt = args.dt or values.get("dt")
    full_lambdas = parse_lambda_list(args.full) if args.full else []
    rows = pi_pulse_fidelity_sweep(lambdas, ratio, n_theta=args.sphere,
                                   n_phi=args.sphere,
                                   full_lambdas=full_lambdas, dim=dim, dt=dt)
    path = out_dir / "pipulse.csv"
    write_csv(path,
              ["lambda", "F_min", "F_max", "F_mean",
               "F_asymptotic_min", "F_asymptotic_max",
               "F_full_min", "F_full_max", "F_full_mean"],
              [(r.lam, r.f_min, r.f_max, r.f_mean, r.f_asym_min, r.f_asym_max,
                r.f_full_min, r.f_full_max, r.f_full_mean) for r in rows])
    manifest.add_output(path)
    manifest.data["summary"] = {
        "lambdas": [r.lam for r in rows],
        "f_mean": [r.f_mean for r in rows],
    }

    # Convergence probe: ground-state pulse at the first lambda.
    lam0 = lambdas[0]
    state = QubitState(1.0, 0.0)
    base = pi_pulse(state, lam0, ratio, model="full", dim=dim, dt=dt)
    cfg_dt = SimulationConfig(gamma2=1.0, drive=pulse_drive(lam0, ratio),
                              dim=dim, dt=dt).timestep()
    half = pi_pulse(state, lam0, ratio, model="full", dim=dim, dt=cfg_dt / 2.0)
    deeper = pi_pulse(state, lam0, ratio, model="full", dim=dim + 5, dt=dt)
    manifest.data["convergence"] = {
        "probe": {"lambda": lam0, "model": "full"},
        "step_halving_delta": abs(half.fidelity - base.fidelity),
        "truncation_delta": abs(deeper.fidelity - base.fidelity),
    }
    manifest.check_convergence()


# ---------------------------------------------------------------------------
# wigner
# ---------------------------------------------------------------------------

def cmd_wigner(args, values: dict, out_dir: Path, manifest: ManifestWriter) -> None:
    lam = parse_lambda(args.lam) if args.lam else values.get("lambda", 20.0)
    ratio = args.ratio if args.ratio is not None \
        else values.get("ratio_b_over_r", 1.0)
    dim = args.dim or values.get("dim") or 12
    dt = args.dt or values.get("dt")
    coords = default_grid(args.extent, args.step)
    grid = pi_pulse_wigner(lam, ratio, coords, coords, dim=dim, dt=dt)
    rows = []
    for i, x in enumerate(grid.x_values):
        for j, p in enumerate(grid.p_values):
            rows.append((x, p, grid.values[i, j]))
    path = out_dir / "wigner.csv"
    write_csv(path, ["x", "p", "W"], rows)
    manifest.add_output(path)
    w00 = grid.value_at(0.0, 0.0)
    w_min = float(grid.values.min())
    integral = grid.integral()
    print(f"W(0,0) = {w00:.6f}   min W = {w_min:.6f}   integral = {integral:.6f}")
    manifest.data["summary"] = {
        "lambda": lam, "W_origin": w00, "W_min": w_min, "grid_integral": integral}

    base = pi_pulse(QubitState(1.0, 0.0), lam, ratio, model="full",
                    dim=dim, dt=dt)
    cfg_dt = SimulationConfig(gamma2=1.0, drive=base.drive, dim=dim,
                              dt=dt).timestep()
    half = pi_pulse(QubitState(1.0, 0.0), lam, ratio, model="full",
                    dim=dim, dt=cfg_dt / 2.0)
    deeper = pi_pulse(QubitState(1.0, 0.0), lam, ratio, model="full",
                      dim=dim + 5, dt=dt)
    manifest.data["convergence"] = {
        "probe": {"lambda": lam, "model": "full"},
        "step_halving_delta": abs(half.fidelity - base.fidelity),
        "truncation_delta": abs(deeper.fidelity - base.fidelity),
    }
    manifest.check_convergence()


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mechqubit",
        description="Two-phonon cooling and mechanical-qubit pulse simulations.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VAL",
                       help="override a config key (repeatable)")
        p.add_argument("--out-dir", default=".", help="output directory")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker processes for sweeps")
        p.add_argument("--dim", type=int, help="Fock truncation dimension")
        p.add_argument("--dt", type=float, help="integrator step override")
        p.add_argument("--ratio", type=float,
                       help="linear-channel ratio Gamma_1b/Gamma_1r")

    p = sub.add_parser("rates", help="decoherence rates for a device config")
    common(p)
    p.add_argument("--csv", metavar="NAME", help="also write a CSV table")

    p = sub.add_parser("cool", help="cooling infidelity curves and minima")
    common(p)
    p.add_argument("--lambdas", help="comma list, e.g. 34,340,3400 or inf")
    p.add_argument("--nbar", type=float, help="initial thermal occupation")
    p.add_argument("--tau-max", type=float, dest="tau_max")
    p.add_argument("--tau-points", type=int, default=400, dest="tau_points")

    p = sub.add_parser("pipulse", help="pulse fidelity sweep over lambda")
    common(p)
    p.add_argument("--lambdas", help="comma list of lambda values")
    p.add_argument("--sphere", type=int, default=24,
                   help="Bloch grid resolution per angle")
    p.add_argument("--full", metavar="LAMBDAS",
                   help="lambda values that also get full-model statistics")

    p = sub.add_parser("wigner", help="Wigner map after a pi pulse from |0>")
    common(p)
    p.add_argument("--lambda", dest="lam", help="cooling figure of merit")
    p.add_argument("--extent", type=float, default=3.5)
    p.add_argument("--step", type=float, default=0.05)
    return parser


COMMANDS = {"rates": cmd_rates, "cool": cmd_cool,
            "pipulse": cmd_pipulse, "wigner": cmd_wigner}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        values = load_config(args.config, args.set)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    resolved = dict(values)
    for key in ("dim", "dt", "ratio", "jobs"):
        val = getattr(args, key, None)
        if val is not None:
            resolved[key] = val
    manifest = ManifestWriter(args.command, out_dir, resolved)
    try:
        COMMANDS[args.command](args, values, out_dir, manifest)
        manifest.finish()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
