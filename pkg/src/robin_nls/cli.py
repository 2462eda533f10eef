"""
Command-line driver for the Robin NLS toolkit.

    robin-nls scatter --generator defocusing_soliton --param omega=1 --param alpha=1
    robin-nls zeros --profile u0.json
    robin-nls soliton --lambda -1 --omega 1 --phi 0.5 --grid 0:20:401
    robin-nls asymptotics --profile u0.json --t-list 16,32 --x-list 0,4,8
    robin-nls evolve --profile u0.json --tfinal 10 --snap 1
    robin-nls compare --profile u0.json --t0 16

Exit codes: 0 success, 1 invalid input, 2 numerical failure or failed
comparison, 3 violated assumption.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from .asymptotics import ReflectionCoefficient, classify_regime, predict
from .compare import run_compare, run_stability
from .config import RunConfig, load_tolerances
from .errors import RegimeMismatch, RobinNLSError, ValidationFailure
from .pde import evolve, initial_state
from .scattering import build_table
from .serialization import (
    load_config_profile,
    write_conserved_log,
    write_csv,
    write_json,
    write_predictions,
    write_snapshot,
    write_spectrum,
    write_table,
)
from .solitons import SolitonParams, soliton_profile, soliton_spectral_functions, stationary_soliton
from .zeros import discrete_spectrum

logger = logging.getLogger("robin_cli")


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _grid(text: str) -> np.ndarray:
    """start:stop:n"""
    try:
        start, stop, n = text.split(":")
        return np.linspace(float(start), float(stop), int(n))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:n, got '{text}'")


def _params(pairs: Optional[List[str]]) -> Dict[str, object]:
    params = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ValidationFailure(f"--param expects key=value, got '{pair}'")
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            params[key] = value
    return params


def _k_grid(args) -> np.ndarray:
    return np.linspace(-args.k_max, args.k_max, args.n_k)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robin-nls", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--tolerance-file", type=Path, help="JSON overrides for the numerical tolerances")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out-dir", type=Path, default=Path("."))
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def with_profile(p):
        source = p.add_mutually_exclusive_group()
        source.add_argument("--profile", type=Path, help="profile JSON")
        source.add_argument("--generator", help="built-in profile generator")
        p.add_argument("--param", action="append", metavar="KEY=VALUE", help="generator parameter (repeatable)")
        p.add_argument("--k-max", type=float, default=8.0)
        p.add_argument("--n-k", type=int, default=513)
        return p

    with_profile(sub.add_parser("scatter", help="spectral table a, b, Delta, r on a real grid"))

    p = with_profile(sub.add_parser("zeros", help="discrete spectrum with residue constants"))
    p.add_argument("--strict", action="store_true", help="fail on a common zero of a and Delta")

    p = sub.add_parser("soliton", help="stationary soliton samples and closed-form spectral functions")
    p.add_argument("--lambda", dest="lam", type=int, choices=(1, -1), required=True)
    p.add_argument("--omega", type=float, required=True)
    shape = p.add_mutually_exclusive_group(required=True)
    shape.add_argument("--phi", type=float)
    shape.add_argument("--alpha", type=float)
    p.add_argument("--grid", type=_grid, default=_grid("0:20:401"), help="x grid as start:stop:n")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--k-grid", type=_grid, default=_grid("-8:8:257"), help="k grid as start:stop:n")

    p = with_profile(sub.add_parser("asymptotics", help="long-time prediction on an (x, t) list"))
    p.add_argument("--regime", choices=("defocusing_qneg", "defocusing_qpos", "focusing"))
    p.add_argument("--t-list", type=_float_list, required=True)
    p.add_argument("--x-list", type=_float_list, required=True)
    p.add_argument("--K", type=float, help="focusing velocity window [0, K]")

    p = with_profile(sub.add_parser("evolve", help="Crank-Nicolson run with snapshots"))
    p.add_argument("--tfinal", type=float, required=True)
    p.add_argument("--snap", type=float)
    p.add_argument("--dx", type=float, default=0.01)
    p.add_argument("--dt", type=float, default=0.001)
    p.add_argument("--L-sim", dest="L_sim", type=float)
    p.add_argument("--linear", action="store_true", help="drop the cubic term")

    p = with_profile(sub.add_parser("compare", help="PDE against asymptotics on a t-ladder"))
    p.add_argument("--experiment", choices=("ladder", "stability"), default="ladder")
    p.add_argument("--regime", choices=("defocusing_qneg", "defocusing_qpos", "focusing"))
    p.add_argument("--t0", type=float)
    p.add_argument("--dx", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--zeta-list", type=_float_list)
    return parser


def _config(args) -> RunConfig:
    options = {
        key: value
        for key, value in vars(args).items()
        if key not in ("tolerance_file", "threads", "out_dir", "verbose", "subcommand", "profile", "generator", "param")
        and value is not None
    }
    if args.subcommand == "compare":
        options = {
            {"zeta_list": "zeta"}.get(key, key): value
            for key, value in options.items()
            if key in ("regime", "t0", "dx", "dt", "epsilon", "zeta_list", "k_max", "n_k")
        }
    return RunConfig(
        subcommand=args.subcommand,
        profile_path=getattr(args, "profile", None),
        generator=getattr(args, "generator", None),
        generator_params=_params(getattr(args, "param", None)),
        tolerances=load_tolerances(args.tolerance_file),
        threads=args.threads,
        out_dir=args.out_dir,
        options=options,
    )


def cmd_scatter(config: RunConfig, args) -> int:
    profile = load_config_profile(config)
    table = build_table(profile, _k_grid(args), config.tolerances, config.threads)
    write_table(config.out_dir / "table.csv", table)
    write_json(config.out_dir / "table_checks.json", {**table.checks, "violations": list(table.violations)})
    print(f"{table.k_grid.size} nodes, max |r| = {table.checks['max_abs_r']:.3e}, {len(table.violations)} violations")
    return 0


def cmd_zeros(config: RunConfig, args) -> int:
    profile = load_config_profile(config)
    table = build_table(profile, _k_grid(args), config.tolerances, config.threads)
    spectrum = discrete_spectrum(profile, table, config.tolerances, strict=args.strict)
    write_spectrum(config.out_dir / "spectrum.json", spectrum)
    for xi, c in zip(spectrum.xi, spectrum.c or ()):
        print(f"xi = {xi:.10g}   c = {c:.10g}")
    print(f"M = {spectrum.M}")
    return 0


def cmd_soliton(config: RunConfig, args) -> int:
    params = SolitonParams(lam=args.lam, omega=args.omega, phi=args.phi, alpha=args.alpha)
    x = args.grid
    u = stationary_soliton(params, x, args.t) if args.t else soliton_profile(params, x)
    write_csv(config.out_dir / "soliton_samples.csv", ["x", "Re u", "Im u", "|u|"],
              [[xv, uv.real, uv.imag, abs(uv)] for xv, uv in zip(x, np.asarray(u, dtype=complex))])
    k = args.k_grid
    a, b, delta = soliton_spectral_functions(params, k)
    write_csv(config.out_dir / "soliton_spectral.csv", ["k", "Re a", "Im a", "Re b", "Im b", "Re Δ", "Im Δ"],
              np.column_stack([k, a.real, a.imag, b.real, b.imag, delta.real, delta.imag]))
    print(f"q = {params.q_s:.12g}, xi1 = {params.xi1:.12g}, c1 = {params.c1:.12g}")
    return 0


def cmd_asymptotics(config: RunConfig, args) -> int:
    tol = config.tolerances
    profile = load_config_profile(config)
    table = build_table(profile, _k_grid(args), tol, config.threads)
    spectrum = discrete_spectrum(profile, table, tol)
    regime = classify_regime(profile.lam, profile.q, spectrum.M if profile.lam == 1 else None)
    if args.regime and args.regime != regime:
        raise RegimeMismatch(f"regime '{args.regime}' does not match lambda = {profile.lam}, q = {profile.q:g}")
    reflection = ReflectionCoefficient.from_table(table, tol)
    profiles = []
    for t in args.t_list:
        profiles.extend(predict(regime, reflection, spectrum, args.x_list, t, K=args.K, tol=tol))
    write_predictions(config.out_dir / "asymptotics.csv", profiles)
    print(f"{len(profiles)} predictions ({regime}) written to {config.out_dir / 'asymptotics.csv'}")
    return 0


def cmd_evolve(config: RunConfig, args) -> int:
    profile = load_config_profile(config)
    state = initial_state(profile, args.dx, args.dt, args.tfinal, L_sim=args.L_sim, nonlinear=not args.linear)
    counter = {"n": 0}

    def save(snapshot):
        write_snapshot(config.out_dir / f"snapshot_{counter['n']:04d}.csv", snapshot)
        counter["n"] += 1

    trajectory = evolve(state, args.tfinal, snap=args.snap, tol=config.tolerances, on_snapshot=save)
    write_conserved_log(config.out_dir / "conserved.csv", trajectory.log)
    last = trajectory.log[-1]
    print(f"t = {last.t:g}: mass drift {last.mass_drift:.3e}, energy drift {last.energy_drift:.3e}, {counter['n']} snapshots")
    return 0


def cmd_compare(config: RunConfig, args) -> int:
    if args.experiment == "stability":
        report = run_stability(config)
        name = "stability_report.json"
    else:
        report = run_compare(config)
        name = "comparison_report.json"
    write_json(config.out_dir / name, report)
    print(f"{'PASS' if report.passed else 'FAIL'}: report written to {config.out_dir / name}")
    return 0 if report.passed else 2


COMMANDS = {
    "scatter": cmd_scatter,
    "zeros": cmd_zeros,
    "soliton": cmd_soliton,
    "asymptotics": cmd_asymptotics,
    "evolve": cmd_evolve,
    "compare": cmd_compare,
}


def main(args=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(args)
    logging.basicConfig(
        level=logging.DEBUG if ns.verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = _config(ns)
        config.out_dir.mkdir(parents=True, exist_ok=True)
        return COMMANDS[ns.subcommand](config, ns)
    except ValidationError as e:
        logger.error(f"invalid configuration: {e.errors()[0]['msg']}")
        return 1
    except RobinNLSError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
