"""
Direct scattering for the half-line NLS with a Robin boundary condition.

The second column psi = (psi1, psi2) of the Jost solution solves

    psi1' = -2ik psi1 + u0 psi2,    psi2' = lam conj(u0) psi1,

with psi -> (0, 1) as x -> infinity. The profile is truncated at x = L and the
system is integrated from L down to 0; a(k) = psi2(0) and b(k) = psi1(0).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    DeltaVanishes,
    MissingReflection,
    NonDecayingTail,
    StepUnderflow,
    ValidationFailure,
)

logger = logging.getLogger("robin_scattering")


def theta(x, t, k):
    """Phase theta(x, t, k) = k x + 2 k^2 t."""
    return k * x + 2 * k * k * t


@dataclass(frozen=True)
class PhasePoint:
    x: float
    t: float
    k: complex

    @property
    def theta(self) -> complex:
        return theta(self.x, self.t, self.k)


@dataclass(frozen=True, eq=False)
class InitialProfile:
    """Initial datum u0 sampled on x_i = i*h, i = 0..N, plus the sign lam and Robin parameter q"""
    samples: np.ndarray
    h: float
    lam: int
    q: float

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.ndim != 1 or samples.size < 3:
            raise ValidationFailure("profile needs N >= 2 (at least three samples)")
        if not np.all(np.isfinite(samples)):
            raise ValidationFailure("profile samples must be finite")
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValidationFailure(f"grid spacing must be positive, got {self.h}")
        if self.lam not in (1, -1):
            raise ValidationFailure(f"lambda must be +1 or -1, got {self.lam}")
        if not np.isfinite(self.q) or self.q == 0:
            raise ValidationFailure("q must be a nonzero real number")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "lam", int(self.lam))
        object.__setattr__(self, "q", float(self.q))

    @property
    def N(self) -> int:
        return self.samples.size - 1

    @property
    def L(self) -> float:
        return self.N * self.h

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.h

    @cached_property
    def _splines(self) -> Tuple[CubicSpline, CubicSpline]:
        x = self.x
        return CubicSpline(x, self.samples.real), CubicSpline(x, self.samples.imag)

    def potential(self, x) -> np.ndarray:
        """Cubic-spline interpolant of the samples, zero beyond L."""
        x = np.asarray(x, dtype=float)
        re, im = self._splines
        values = re(x) + 1j * im(x)
        return np.where((x >= 0) & (x <= self.L), values, 0.0)


@dataclass(frozen=True)
class JostColumn:
    """Second Jost column at x = 0"""
    psi1: complex
    psi2: complex


@dataclass(frozen=True)
class SpectralSample:
    k: complex
    lam: int
    q: float
    a: complex
    b: complex
    delta: complex
    r: Optional[complex] = None
    delta_a: Optional[complex] = None
    delta_b: Optional[complex] = None
    delta_vanishes: bool = False

    @property
    def is_real(self) -> bool:
        return complex(self.k).imag == 0

    def unit_residual(self) -> float:
        """| |a|^2 - lam |b|^2 - 1 |, meaningful on the real line only."""
        return abs(abs(self.a) ** 2 - self.lam * abs(self.b) ** 2 - 1.0)

    def reflection_identity_residual(self) -> Optional[float]:
        """| (1 - lam |r|^2) - |Delta_a|^-2 |"""
        if self.r is None or self.delta_a is None:
            return None
        return abs((1.0 - self.lam * abs(self.r) ** 2) - abs(self.delta_a) ** -2)


@dataclass(frozen=True, eq=False)
class SpectralTable:
    q: float
    lam: int
    k_grid: np.ndarray
    samples: Tuple[SpectralSample, ...]
    checks: Dict[str, float] = field(default_factory=dict)
    violations: Tuple[str, ...] = ()

    @property
    def k_max(self) -> float:
        return float(self.k_grid[-1])

    @property
    def a(self) -> np.ndarray:
        return np.array([s.a for s in self.samples])

    @property
    def b(self) -> np.ndarray:
        return np.array([s.b for s in self.samples])

    @property
    def delta(self) -> np.ndarray:
        return np.array([s.delta for s in self.samples])

    @property
    def r(self) -> np.ndarray:
        """Reflection coefficient on the grid; NaN where Delta vanished."""
        return np.array([np.nan if s.r is None else s.r for s in self.samples], dtype=complex)

    @property
    def delta_a(self) -> np.ndarray:
        return np.array([np.nan if s.delta_a is None else s.delta_a for s in self.samples], dtype=complex)

    @property
    def delta_b(self) -> np.ndarray:
        return np.array([np.nan if s.delta_b is None else s.delta_b for s in self.samples], dtype=complex)

    @property
    def flagged(self) -> np.ndarray:
        return np.array([s.delta_vanishes for s in self.samples], dtype=bool)


# ============================================================================
# JOST INTEGRATOR
# ============================================================================

def _lawson_rk4(u_nodes: np.ndarray, lam: int, ks: np.ndarray, length: float, n_steps: int):
    """
    Integrating-factor RK4 in s = L - x, vectorised over ks.

    Inside a step psi1 = e^{2ik tau} v1, so the oscillation is carried exactly and
    RK4 only sees the smooth coupling. u_nodes holds u0 at s = j*H/2, j = 0..2*n_steps.
    """
    H = length / n_steps
    half = 0.5 * H
    e_half = np.exp(1j * ks * H)
    e_full = e_half * e_half
    inv_half = 1.0 / e_half
    inv_full = inv_half * inv_half
    u_bar = np.conj(u_nodes)
    psi1 = np.zeros_like(ks)
    psi2 = np.ones_like(ks)

    for n in range(n_steps):
        j = 2 * n
        u0, um, u1 = u_nodes[j], u_nodes[j + 1], u_nodes[j + 2]
        if u0 == 0 and um == 0 and u1 == 0:
            psi1 = e_full * psi1
            continue
        c0, cm, c1 = lam * u_bar[j], lam * u_bar[j + 1], lam * u_bar[j + 2]
        v1, v2 = psi1, psi2

        k1a = -u0 * v2
        k1b = -c0 * v1
        k2a = -um * inv_half * (v2 + half * k1b)
        k2b = -cm * e_half * (v1 + half * k1a)
        k3a = -um * inv_half * (v2 + half * k2b)
        k3b = -cm * e_half * (v1 + half * k2a)
        k4a = -u1 * inv_full * (v2 + H * k3b)
        k4b = -c1 * e_full * (v1 + H * k3a)

        psi1 = e_full * (v1 + (H / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a))
        psi2 = v2 + (H / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)

    return psi1, psi2


def _integrate(profile: InitialProfile, ks: np.ndarray, n_steps: int):
    s_nodes = np.linspace(0.0, profile.L, 2 * n_steps + 1)
    u_nodes = profile.potential(profile.L - s_nodes)
    return _lawson_rk4(u_nodes, profile.lam, ks, profile.L, n_steps)


def _check_tail(profile: InitialProfile, tol: Tolerances):
    tail = abs(profile.samples[-1])
    if tail > tol.tail_tol:
        raise NonDecayingTail(f"|u0(L)| = {tail:.3e} exceeds tail_tol = {tol.tail_tol:.1e}")


def solve_jost_batch(
    profile: InitialProfile,
    ks: Sequence[complex],
    tol: Tolerances = DEFAULT_TOLERANCES,
    converge: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Jost column at x = 0 for many spectral parameters at once.

    Args:
        profile: Initial datum
        ks: Spectral parameters with Im k >= 0
        tol: Tolerances (tail_tol, conv_tol, max_refinements)
        converge: Refine the step until successive levels agree to conv_tol and
            return the Richardson-extrapolated value. When False a single pass at
            one step per sample interval is returned.

    Returns:
        (psi1, psi2) arrays, i.e. (b, a).
    """
    _check_tail(profile, tol)
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    if np.any(ks.imag < 0):
        raise ValidationFailure("the Jost column is defined for Im k >= 0 only")

    n_steps = profile.N
    coarse = _integrate(profile, ks, n_steps)
    if not converge:
        return coarse

    for level in range(1, tol.max_refinements + 1):
        fine = _integrate(profile, ks, n_steps * 2 ** level)
        change = max(np.max(np.abs(fine[0] - coarse[0])), np.max(np.abs(fine[1] - coarse[1])))
        logger.debug(f"Jost refinement level {level}: max change {change:.3e} over {ks.size} nodes")
        if change <= tol.conv_tol:
            return (16.0 * fine[0] - coarse[0]) / 15.0, (16.0 * fine[1] - coarse[1]) / 15.0
        coarse = fine

    raise StepUnderflow(
        f"Jost column not converged to {tol.conv_tol:.1e} after {tol.max_refinements} refinements"
    )


def solve_jost(profile: InitialProfile, k: complex, tol: Tolerances = DEFAULT_TOLERANCES) -> JostColumn:
    psi1, psi2 = solve_jost_batch(profile, [k], tol)
    return JostColumn(psi1=complex(psi1[0]), psi2=complex(psi2[0]))


def _solve_parallel(profile: InitialProfile, ks: np.ndarray, tol: Tolerances, threads: int, converge: bool = True):
    if threads <= 1 or ks.size < 2 * threads:
        return solve_jost_batch(profile, ks, tol, converge)
    chunks = np.array_split(ks, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda chunk: solve_jost_batch(profile, chunk, tol, converge), chunks))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


# ============================================================================
# SPECTRAL FUNCTIONS
# ============================================================================

def assemble_delta(lam: int, q: float, k, a, b, a_mirror, b_mirror):
    """Delta(k) = (2k - iq) a(k) conj(a(-conj k)) + lam (2k + iq) b(k) conj(b(-conj k))."""
    return (2 * k - 1j * q) * a * np.conj(a_mirror) + lam * (2 * k + 1j * q) * b * np.conj(b_mirror)


def assemble_reflection(q: float, k, a, b, a_mirror, b_mirror, delta):
    """r(k) on the real line."""
    numerator = (2 * k - 1j * q) * np.conj(b * a_mirror) + (2 * k + 1j * q) * np.conj(a * b_mirror)
    return numerator / delta


def evaluate_delta(
    profile: InitialProfile,
    ks: Sequence[complex],
    tol: Tolerances = DEFAULT_TOLERANCES,
    converge: bool = False,
) -> Dict[str, np.ndarray]:
    """Delta, a, b and the mirrored values a(-conj k), b(-conj k) on arbitrary points of the closed upper half-plane."""
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    psi1, psi2 = solve_jost_batch(profile, np.concatenate([ks, -np.conj(ks)]), tol, converge)
    n = ks.size
    a, b = psi2[:n], psi1[:n]
    a_mirror, b_mirror = psi2[n:], psi1[n:]
    delta = assemble_delta(profile.lam, profile.q, ks, a, b, a_mirror, b_mirror)
    return {"k": ks, "a": a, "b": b, "a_mirror": a_mirror, "b_mirror": b_mirror, "delta": delta}


def _make_sample(lam, q, k, a, b, a_mirror, b_mirror, tol: Tolerances, strict: bool) -> SpectralSample:
    k = complex(k)
    delta = complex(assemble_delta(lam, q, k, a, b, a_mirror, b_mirror))
    r = None
    vanishes = False
    if k.imag == 0:
        if abs(delta) < tol.singular_tol:
            if strict:
                raise DeltaVanishes(f"|Delta({k.real:.6g})| = {abs(delta):.3e} on the real line")
            vanishes = True
        else:
            r = complex(assemble_reflection(q, k, a, b, a_mirror, b_mirror, delta))
    factor_a = 2 * k - 1j * q
    factor_b = 2 * k + 1j * q
    return SpectralSample(
        k=k,
        lam=lam,
        q=q,
        a=complex(a),
        b=complex(b),
        delta=delta,
        r=r,
        delta_a=delta / factor_a if abs(factor_a) > tol.singular_tol else None,
        delta_b=delta / factor_b if abs(factor_b) > tol.singular_tol else None,
        delta_vanishes=vanishes,
    )


def spectral_sample(
    profile: InitialProfile,
    k: complex,
    tol: Tolerances = DEFAULT_TOLERANCES,
    strict: bool = True,
) -> SpectralSample:
    """
    a, b, Delta (and r on the real line) at one spectral parameter.

    With strict=False a vanishing Delta on the real line is flagged on the
    sample instead of raising DeltaVanishes.
    """
    k = complex(k)
    if k.imag < 0:
        raise ValidationFailure("spectral samples are defined for Im k >= 0")
    psi1, psi2 = solve_jost_batch(profile, [k, -k.conjugate()], tol)
    return _make_sample(profile.lam, profile.q, k, psi2[0], psi1[0], psi2[1], psi1[1], tol, strict)


def build_table(
    profile: InitialProfile,
    k_grid: Sequence[float],
    tol: Tolerances = DEFAULT_TOLERANCES,
    threads: int = 1,
) -> SpectralTable:
    """
    Spectral samples on a real grid symmetric about 0.

    The mirrored values needed by Delta and r are read from the same solve
    (k and -k are both grid nodes). Invariant checks are recorded in
    `checks`; breaches are listed in `violations` and logged.
    """
    k_grid = np.asarray(k_grid, dtype=float)
    if k_grid.ndim != 1 or k_grid.size < 2:
        raise ValidationFailure("k_grid needs at least two nodes")
    if np.any(np.diff(k_grid) <= 0):
        raise ValidationFailure("k_grid must be strictly increasing")
    scale = max(1.0, float(np.max(np.abs(k_grid))))
    if np.max(np.abs(k_grid + k_grid[::-1])) > 1e-12 * scale:
        raise ValidationFailure("k_grid must be symmetric about 0")
    k_grid = 0.5 * (k_grid - k_grid[::-1])

    logger.info(f"Building spectral table on {k_grid.size} nodes in [{k_grid[0]:g}, {k_grid[-1]:g}]")
    psi1, psi2 = _solve_parallel(profile, k_grid.astype(complex), tol, threads)
    a, b = psi2, psi1
    a_mirror, b_mirror = a[::-1], b[::-1]

    samples = tuple(
        _make_sample(profile.lam, profile.q, k_grid[i], a[i], b[i], a_mirror[i], b_mirror[i], tol, strict=False)
        for i in range(k_grid.size)
    )
    checks, violations = _table_checks(profile, k_grid, samples, tol)
    for message in violations:
        logger.warning(f"Spectral table: {message}")
    return SpectralTable(
        q=profile.q,
        lam=profile.lam,
        k_grid=k_grid,
        samples=samples,
        checks=checks,
        violations=tuple(violations),
    )


def _table_checks(profile, k_grid, samples, tol: Tolerances):
    a = np.array([s.a for s in samples])
    b = np.array([s.b for s in samples])
    delta = np.array([s.delta for s in samples])
    unit = max(s.unit_residual() for s in samples)
    identity = [s.reflection_identity_residual() for s in samples]
    identity = max((v for v in identity if v is not None), default=0.0)
    symmetry = float(np.max(np.abs(np.conj(delta[::-1]) + delta)))

    far = np.abs(k_grid) >= min(4.0, 0.5 * k_grid[-1])
    large_k_a = float(np.max(np.abs(k_grid[far]) * np.abs(a[far] - 1.0)))
    large_k_b = float(np.max(np.abs(k_grid[far]) * np.abs(b[far])))
    r = np.array([abs(s.r) for s in samples if s.r is not None])
    max_r = float(np.max(r)) if r.size else float("nan")

    checks = {
        "unit_residual": float(unit),
        "reflection_identity_residual": float(identity),
        "symmetry_residual": symmetry,
        "large_k_a": large_k_a,
        "large_k_b": large_k_b,
        "max_abs_r": max_r,
        "flagged_nodes": float(sum(s.delta_vanishes for s in samples)),
    }
    violations = []
    if unit > tol.unit_tol:
        violations.append(f"unit relation residual {unit:.3e} > {tol.unit_tol:.1e}")
    if identity > tol.unit_tol:
        violations.append(f"1 - lam|r|^2 = |Delta_a|^-2 residual {identity:.3e} > {tol.unit_tol:.1e}")
    if symmetry > tol.unit_tol:
        violations.append(f"Delta symmetry residual {symmetry:.3e} > {tol.unit_tol:.1e}")
    if profile.lam == 1 and r.size and max_r >= 1.0:
        violations.append(f"defocusing bound broken: max |r| = {max_r:.6f}")
    if checks["flagged_nodes"]:
        violations.append(f"Delta vanishes at {int(checks['flagged_nodes'])} real nodes")
    return checks, violations


def eval_jump_matrix(sample: SpectralSample, x: float, t: float) -> np.ndarray:
    """Jump matrix v(x, t, k) of the Riemann-Hilbert problem at a real sample."""
    if sample.r is None:
        raise MissingReflection(f"no reflection coefficient at k = {sample.k}")
    phase = theta(x, t, sample.k)
    r = sample.r
    return np.array(
        [
            [1.0 - sample.lam * abs(r) ** 2, np.conj(r) * np.exp(-2j * phase)],
            [-sample.lam * r * np.exp(2j * phase), 1.0],
        ],
        dtype=complex,
    )
