"""PDE-versus-asymptotics comparison runs."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .asymptotics import ReflectionCoefficient, classify_regime, effective_soliton, predict
from .config import RunConfig, Tolerances
from .errors import RegimeMismatch, ValidationFailure
from .models import ComparisonReport, StabilityReport
from .pde import PROBE_FRACTION, default_length, evolve, initial_state
from .profiles import scaled
from .scattering import InitialProfile, SpectralTable, build_table
from .serialization import load_config_profile
from .solitons import SolitonParams
from .zeros import DiscreteSpectrum, discrete_spectrum

logger = logging.getLogger("robin_compare")

DEFAULT_ZETA = tuple(np.linspace(0.0, 2.0, 21))


@dataclass
class ScatteringRun:
    profile: InitialProfile
    table: SpectralTable
    spectrum: DiscreteSpectrum
    reflection: ReflectionCoefficient


def scatter_and_locate(profile: InitialProfile, options: dict, tol: Tolerances, threads: int = 1) -> ScatteringRun:
    k_max = float(options.get("k_max", 8.0))
    n_k = int(options.get("n_k", 513))
    table = build_table(profile, np.linspace(-k_max, k_max, n_k), tol, threads)
    spectrum = discrete_spectrum(profile, table, tol)
    return ScatteringRun(profile, table, spectrum, ReflectionCoefficient.from_table(table, tol))


def simulation_length(run: ScatteringRun, x_max: float, t_max: float, tol: Tolerances) -> float:
    """
    Wall position keeping the radiation front away from the probe point.

    Radiation at spectral parameter k moves with speed 4|k|; only k with
    |r(k)| >= reflect_tol count.
    """
    r = np.abs(run.reflection.r)
    loud = run.reflection.k[r >= tol.reflect_tol]
    k_rad = float(np.max(np.abs(loud))) if loud.size else 0.0
    front = x_max + 4.0 * k_rad * t_max
    return max(default_length(t_max), front / PROBE_FRACTION + 5.0, run.profile.L / PROBE_FRACTION + 5.0)


def fit_exponent(t_values: Sequence[float], errors: Sequence[float]) -> Optional[float]:
    """p in E(t) ~ C t^{-p} by least squares in log-log."""
    t = np.asarray(t_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    if t.size < 2 or np.any(e <= 0):
        return None
    slope, _ = np.polyfit(np.log(t), np.log(e), 1)
    return float(-slope)


def run_compare(config: RunConfig) -> ComparisonReport:
    """
    Sup-norm gap between the PDE solution and the asymptotic prediction on a t-ladder.

    Options (config.options):
        regime: requested regime; must agree with (lambda, q)
        t0: ladder base, the run uses t0, 2 t0, 4 t0 (default 16)
        zeta: x/t values where both sides are compared (default 0..2)
        dx, dt: PDE resolution (defaults 0.05, 0.01)
        K: focusing velocity window (default max zeta)
        zeta_ref: x/t of the modulus check (default 1)
        threshold: sup error accepted for soliton regimes (default 1e-3)
        min_exponent: decay exponent accepted otherwise (default 0.6)
    """
    tol = config.tolerances
    options = dict(config.options)
    profile = load_config_profile(config)

    natural = classify_regime(profile.lam, profile.q)
    regime = options.get("regime", natural)
    if regime != natural:
        raise RegimeMismatch(f"regime '{regime}' does not match lambda = {profile.lam}, q = {profile.q:g}")

    run = scatter_and_locate(profile, options, tol, config.threads)
    if profile.lam == 1:
        classify_regime(profile.lam, profile.q, run.spectrum.M)

    t0 = float(options.get("t0", 16.0))
    ladder = [t0, 2 * t0, 4 * t0]
    zeta = np.asarray(options.get("zeta", DEFAULT_ZETA), dtype=float)
    K = float(options.get("K", max(float(zeta.max()), 1e-3)))
    dx = float(options.get("dx", 0.05))
    dt = float(options.get("dt", 0.01))
    zeta_ref = float(options.get("zeta_ref", 1.0))

    L_sim = float(options.get("L_sim", simulation_length(run, float(zeta.max()) * ladder[-1], ladder[-1], tol)))
    state = initial_state(profile, dx, dt, ladder[-1], L_sim=L_sim)
    logger.info(f"Comparing {regime} on t = {ladder} with L_sim = {state.L_sim:g}")
    trajectory = evolve(state, ladder[-1], snap=t0, tol=tol)

    errors, modulus_errors, leading, pde_modulus = [], [], [], []
    for t in ladder:
        snapshot = trajectory.at_time(t)
        xs = zeta * t
        predictions = predict(regime, run.reflection, run.spectrum, xs, t, K=K, tol=tol)
        u_pred = np.array([p.total for p in predictions])
        u_pde = snapshot.at(xs)
        errors.append(float(np.max(np.abs(u_pde - u_pred))))
        modulus_errors.append(float(np.max(np.abs(np.abs(u_pde) - np.abs(u_pred)))))

        reference = predict(regime, run.reflection, run.spectrum, [zeta_ref * t], t, K=K, tol=tol)[0]
        leading.append(abs(reference.total))
        pde_modulus.append(float(abs(snapshot.at(zeta_ref * t))))
        logger.info(f"t = {t:g}: sup error {errors[-1]:.3e}, modulus error {modulus_errors[-1]:.3e}")

    radiation_only = regime == "defocusing_qneg"
    fitted = fit_exponent(ladder, modulus_errors if radiation_only else errors)
    if radiation_only:
        threshold = float(options.get("min_exponent", 0.6))
        passed = fitted is not None and fitted >= threshold
    else:
        threshold = float(options.get("threshold", 1e-3))
        passed = max(errors) <= threshold

    notes = [f"{len(run.table.violations)} spectral-table violations"] if run.table.violations else []
    return ComparisonReport(
        regime=regime,
        lam=profile.lam,
        q=profile.q,
        t_values=ladder,
        errors=errors,
        exponent=fitted,
        threshold=threshold,
        passed=passed,
        modulus_errors=modulus_errors,
        leading_modulus=leading,
        pde_modulus=pde_modulus,
        notes=notes,
    )


def _soliton_params(config: RunConfig) -> SolitonParams:
    if config.generator not in ("defocusing_soliton", "focusing_soliton"):
        raise ValidationFailure("the stability experiment starts from a soliton generator")
    params = {k: v for k, v in config.generator_params.items() if k in ("omega", "alpha", "phi")}
    params["lam"] = 1 if config.generator == "defocusing_soliton" else -1
    return SolitonParams(**params)


def run_stability(config: RunConfig) -> StabilityReport:
    """
    Perturbed soliton (1 + epsilon) u_s0 against the soliton its spectrum predicts.

    Passes when the sup residual over the soliton window shrinks from the
    first to the last time in `t_values` (default 8 and 32).
    """
    tol = config.tolerances
    options = dict(config.options)
    epsilon = float(options.get("epsilon", 0.05))
    t_values: List[float] = [float(t) for t in options.get("t_values", (8.0, 32.0))]
    dx = float(options.get("dx", 0.05))
    dt = float(options.get("dt", 0.01))
    window = float(options.get("x_window", 20.0))

    params = _soliton_params(config)
    base = load_config_profile(config)
    profile = scaled(base, 1.0 + epsilon)
    run = scatter_and_locate(profile, options, tol, config.threads)
    regime = classify_regime(profile.lam, profile.q)
    if run.spectrum.M < 1:
        raise RegimeMismatch("the perturbed soliton lost its discrete spectrum")

    xi_exact = params.xi1
    j = int(np.argmin([abs(z - xi_exact) for z in run.spectrum.xi]))
    xi_perturbed = run.spectrum.xi[j]
    logger.info(f"xi1 moved from {xi_exact:.6g} to {xi_perturbed:.6g} under epsilon = {epsilon:g}")

    t_max = max(t_values)
    L_sim = float(options.get("L_sim", simulation_length(run, window, t_max, tol)))
    state = initial_state(profile, dx, dt, t_max, L_sim=L_sim)
    snap = float(options.get("snap", min(t_values)))
    trajectory = evolve(state, t_max, snap=snap, tol=tol)

    xs = np.linspace(0.0, window, 201)
    residuals = []
    for t in t_values:
        predictions = predict(regime, run.reflection, run.spectrum, xs, t, K=window / t, tol=tol)
        u_sol = np.array([p.u_sol for p in predictions])
        residuals.append(float(np.max(np.abs(trajectory.at_time(t).at(xs) - u_sol))))
        logger.info(f"t = {t:g}: soliton residual {residuals[-1]:.3e}")

    fitted_alpha = None
    if profile.lam == 1:
        _, fitted_alpha, _ = effective_soliton(xi_perturbed, run.spectrum.c[j])

    return StabilityReport(
        epsilon=epsilon,
        xi_exact=(xi_exact.real, xi_exact.imag),
        xi_perturbed=(xi_perturbed.real, xi_perturbed.imag),
        xi_shift=float(abs(xi_perturbed - xi_exact)),
        t_values=t_values,
        residuals=residuals,
        fitted_omega=float(np.real(-4 * xi_perturbed ** 2)),
        fitted_alpha=fitted_alpha,
        passed=residuals[-1] < residuals[0],
    )
