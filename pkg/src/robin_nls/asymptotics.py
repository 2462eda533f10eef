r"""
Long-time asymptotics of the Robin IBVP.

All integrals over (-inf, k0] of the log-weight g(s) = ln(1 - lam |r(s)|^2) are
truncated at k_min, the last grid node left of the first |r| >= reflection_cut,
and evaluated by composite Gauss-Legendre panels on a cubic-spline interpolant
of g. chi carries the log singularity at s = k0; after integrating by parts
against g(s) - g(k0) the integrand is regular:

    chi = -(1/2 pi i) [ -ln(k0 - k_min) (g(k_min) - g(k0)) + \int (g(s) - g(k0)) / (k0 - s) ds ].
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline
from scipy.special import loggamma

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import RealZero, ReflectionTail, RegimeMismatch, SolitonDenominator, ValidationFailure
from .scattering import SpectralTable, theta
from .solitons import ReflectionlessData, ReflectionlessSolution, RenormalizedBox
from .zeros import DiscreteSpectrum

logger = logging.getLogger("robin_asymptotics")

Regime = Literal["defocusing_qneg", "defocusing_qpos", "focusing"]
REGIMES = ("defocusing_qneg", "defocusing_qpos", "focusing")


def classify_regime(lam: int, q: float, M: Optional[int] = None) -> Regime:
    """Regime from (lambda, q); M, when given, must agree with the defocusing zero count."""
    if lam == -1:
        return "focusing"
    expected = 0 if q < 0 else 1
    if M is not None and M != expected:
        raise RegimeMismatch(f"lam = 1, q = {q:g} has {expected} discrete zeros, got M = {M}")
    return "defocusing_qneg" if q < 0 else "defocusing_qpos"


def nu(y: complex, lam: int) -> float:
    """nu(y) = (1/2 pi) ln(1 - lam |y|^2)"""
    return float(np.log(1.0 - lam * abs(y) ** 2) / (2 * np.pi))


def beta(y: complex, lam: int) -> complex:
    """beta(y) = sqrt|nu| exp(i (pi/4 - arg y - arg Gamma(i nu)))"""
    if y == 0:
        return 0j
    n = nu(y, lam)
    arg_gamma = float(np.imag(loggamma(1j * n)))
    return complex(np.sqrt(abs(n)) * np.exp(1j * (np.pi / 4 - np.angle(y) - arg_gamma)))


# ============================================================================
# REFLECTION COEFFICIENT
# ============================================================================

@dataclass(frozen=True, eq=False)
class ReflectionCoefficient:
    """r(s) sampled on an increasing real grid; zero outside it"""
    k: np.ndarray
    r: np.ndarray
    lam: int
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        r = np.asarray(self.r, dtype=complex)
        if k.ndim != 1 or k.size != r.size or k.size < 4:
            raise ValidationFailure("reflection samples need matching 1-D grids of at least 4 nodes")
        if np.any(np.diff(k) <= 0):
            raise ValidationFailure("reflection grid must be strictly increasing")
        if not np.all(np.isfinite(r)):
            raise RealZero("reflection coefficient undefined at some nodes (Delta vanishes)")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "r", r)

    @classmethod
    def from_table(cls, table: SpectralTable, tol: Tolerances = DEFAULT_TOLERANCES) -> "ReflectionCoefficient":
        return cls(k=table.k_grid, r=table.r, lam=table.lam, tol=tol)

    @classmethod
    def zero(cls, lam: int, k_max: float = 8.0, n: int = 257, tol: Tolerances = DEFAULT_TOLERANCES) -> "ReflectionCoefficient":
        k = np.linspace(-k_max, k_max, n)
        return cls(k=k, r=np.zeros(n, dtype=complex), lam=lam, tol=tol)

    @classmethod
    def from_function(cls, k: Sequence[float], func: Callable, lam: int, tol: Tolerances = DEFAULT_TOLERANCES) -> "ReflectionCoefficient":
        k = np.asarray(k, dtype=float)
        return cls(k=k, r=np.asarray(func(k), dtype=complex), lam=lam, tol=tol)

    @cached_property
    def _splines(self) -> Tuple[CubicSpline, CubicSpline, CubicSpline]:
        weight = np.log(1.0 - self.lam * np.abs(self.r) ** 2)
        return CubicSpline(self.k, self.r.real), CubicSpline(self.k, self.r.imag), CubicSpline(self.k, weight)

    def _inside(self, s):
        return (s >= self.k[0]) & (s <= self.k[-1])

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        re, im, _ = self._splines
        return np.where(self._inside(s), re(s) + 1j * im(s), 0.0)

    def log_weight(self, s):
        """g(s) = ln(1 - lam |r(s)|^2)"""
        s = np.asarray(s, dtype=float)
        _, _, g = self._splines
        return np.where(self._inside(s), g(s), 0.0)

    def k_min(self, k0: float) -> Optional[float]:
        """Left truncation point of the (-inf, k0] integrals; None when r is negligible there."""
        if abs(self.r[0]) > self.tol.reflection_tail_tol:
            raise ReflectionTail(f"|r({self.k[0]:g})| = {abs(self.r[0]):.3e} at the grid edge")
        significant = np.nonzero(np.abs(self.r) >= self.tol.reflection_cut)[0]
        if significant.size == 0:
            return None
        start = float(self.k[max(significant[0] - 1, 0)])
        return start if start < k0 else None

    def _integrate(self, integrand: Callable, a: float, b: float) -> complex:
        inner = self.k[(self.k > a) & (self.k < b)]
        edges = np.concatenate([[a], inner, [b]])
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])

        def panel_sum(order):
            nodes, weights = leggauss(order)
            s = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
            w = (half[:, None] * weights[None, :]).ravel()
            return complex(np.sum(w * integrand(s)))

        order = 8
        previous = panel_sum(order)
        while order < 128:
            order *= 2
            current = panel_sum(order)
            if abs(current - previous) <= self.tol.quad_tol:
                return current
            previous = current
        logger.warning(f"quadrature on [{a:g}, {b:g}] not converged to {self.tol.quad_tol:.1e}")
        return previous

    def cauchy_integral(self, k0: float, k: complex) -> complex:
        """\\int_{-inf}^{k0} g(s) / (s - k) ds for Im k != 0."""
        a = self.k_min(k0)
        if a is None:
            return 0j
        return self._integrate(lambda s: self.log_weight(s) / (s - k), a, k0)

    def delta(self, k0: float, k: complex) -> complex:
        """delta(zeta, k) = exp[(1/2 pi i) \\int_{-inf}^{k0} g(s)/(s - k) ds]"""
        return complex(np.exp(self.cauchy_integral(k0, k) / (2j * np.pi)))

    def chi(self, k0: float) -> complex:
        """chi(zeta, k0) = -(1/2 pi i) \\int_{-inf}^{k0} ln(k0 - s) dg(s)"""
        a = self.k_min(k0)
        if a is None:
            return 0j
        g0 = float(self.log_weight(k0))
        boundary = -np.log(k0 - a) * (float(self.log_weight(a)) - g0)
        regular = self._integrate(lambda s: (self.log_weight(s) - g0) / (k0 - s), a, k0)
        return complex(-(boundary + regular) / (2j * np.pi))


def _as_reflection(source: Union[SpectralTable, ReflectionCoefficient], tol: Tolerances) -> ReflectionCoefficient:
    if isinstance(source, ReflectionCoefficient):
        return source
    return ReflectionCoefficient.from_table(source, tol)


# ============================================================================
# COEFFICIENTS
# ============================================================================

@dataclass(frozen=True, eq=False)
class AsymptoticCoefficients:
    x: float
    t: float
    zeta: float
    k0: float
    r_k0: complex
    nu: float
    beta: complex
    chi: complex
    delta0: complex
    phi_k0: complex
    d1: Optional[complex]
    reflection: ReflectionCoefficient

    def delta_at(self, k: complex) -> complex:
        return self.reflection.delta(self.k0, k)

    def m1_x(self, lam: int) -> np.ndarray:
        """Leading coefficient of the parabolic-cylinder local model."""
        return 1j * np.array([[0, -self.beta], [lam * np.conj(self.beta), 0]], dtype=complex)


def coefficients(
    source: Union[SpectralTable, ReflectionCoefficient],
    spectrum: Optional[DiscreteSpectrum],
    x: float,
    t: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> AsymptoticCoefficients:
    """
    Scalar ingredients of the asymptotic formulas at (x, t).

    Args:
        source: Spectral table or interpolated reflection coefficient
        spectrum: Discrete spectrum with residue constants; d1 is set when it has one pole
        x, t: x >= 0, t > 0
    """
    if t <= 0 or x < 0:
        raise ValidationFailure(f"asymptotics need x >= 0 and t > 0, got x = {x}, t = {t}")
    reflection = _as_reflection(source, tol)
    lam = reflection.lam
    zeta = x / t
    k0 = -zeta / 4.0
    r_k0 = complex(reflection(k0))
    n = nu(r_k0, lam)
    chi = reflection.chi(k0)
    delta0 = complex((8.0 * t) ** (0.5j * n) * np.exp(chi))

    d1 = None
    if spectrum is not None and spectrum.M == 1 and spectrum.c is not None:
        xi1, c1 = spectrum.xi[0], spectrum.c[0]
        d1 = complex(c1 * np.exp(2j * theta(x, t, xi1)) / (xi1 - np.conj(xi1)))

    return AsymptoticCoefficients(
        x=x,
        t=t,
        zeta=zeta,
        k0=k0,
        r_k0=r_k0,
        nu=n,
        beta=beta(r_k0, lam),
        chi=chi,
        delta0=delta0,
        phi_k0=complex(-4j * k0 ** 2),
        d1=d1,
        reflection=reflection,
    )


# ============================================================================
# REGIMES
# ============================================================================

@dataclass(frozen=True)
class AsymptoticProfile:
    x: float
    t: float
    regime: Regime
    u_sol: complex
    u_rad1: complex
    u_rad2: complex
    u_rad: complex
    total: complex
    error_order: float = 0.75


def asymp_defocusing_qneg(coeffs: AsymptoticCoefficients, x: float, t: float) -> AsymptoticProfile:
    """Pure radiation: u ~ beta (8t)^{i nu} e^{2 chi} e^{4itk0^2} / sqrt(2t)."""
    if coeffs.reflection.lam != 1:
        raise RegimeMismatch("the radiation-only formula is for the defocusing equation")
    k0 = coeffs.k0
    u_rad = coeffs.beta * (8.0 * t) ** (1j * coeffs.nu) * np.exp(2 * coeffs.chi) * np.exp(4j * t * k0 ** 2) / np.sqrt(2.0)
    u_rad = complex(u_rad)
    return AsymptoticProfile(
        x=x, t=t, regime="defocusing_qneg",
        u_sol=0j, u_rad1=u_rad, u_rad2=0j, u_rad=u_rad,
        total=u_rad / np.sqrt(t),
    )


def _single_imaginary_pole(spectrum: DiscreteSpectrum, tol: Tolerances) -> Tuple[complex, complex]:
    if spectrum.M != 1 or spectrum.c is None:
        raise RegimeMismatch(f"expected exactly one pole with a residue constant, got M = {spectrum.M}")
    xi1, c1 = spectrum.xi[0], spectrum.c[0]
    if abs(xi1.real) > tol.loc_tol:
        raise RegimeMismatch(f"defocusing pole {xi1} is not on the imaginary axis")
    return 1j * xi1.imag, c1


def asymp_defocusing_qpos(
    source: Union[SpectralTable, ReflectionCoefficient],
    spectrum: DiscreteSpectrum,
    x: float,
    t: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> AsymptoticProfile:
    """Soliton plus radiation for lam = 1, q > 0, after removing the pole from r."""
    if spectrum.lam != 1 or spectrum.q <= 0:
        raise RegimeMismatch("soliton-plus-radiation asymptotics need lam = 1 and q > 0")
    xi1, _ = _single_imaginary_pole(spectrum, tol)
    coeffs = coefficients(source, spectrum, x, t, tol)
    lam = 1
    k0, d1 = coeffs.k0, coeffs.d1

    r_reg = coeffs.r_k0 * (k0 - xi1) / (k0 - np.conj(xi1))
    n = nu(r_reg, lam)
    b = beta(r_reg, lam)
    delta_xi = coeffs.delta_at(xi1)
    delta4 = abs(delta_xi) ** 4
    denominator = lam * abs(d1) ** 2 - delta4
    if abs(denominator) < tol.singular_tol:
        raise SolitonDenominator(f"lam|d1|^2 - |delta(xi1)|^4 = {denominator:.3e} at x = {x}, t = {t}")

    u_sol = lam * 4j * xi1 * np.conj(d1) * delta_xi ** 2 / denominator
    u_rad1 = b * (8.0 * t) ** (1j * n) * np.exp(2 * coeffs.chi) * np.exp(4j * t * k0 ** 2) / np.sqrt(2.0)

    gap = abs(k0 - xi1) ** 2
    phase = np.exp(-4j * t * k0 ** 2) * coeffs.delta0 ** 2
    first = (-lam * np.sqrt(2.0) * xi1 * b * phase
             * (abs(d1) ** 2 * (k0 + xi1) + lam * delta4 * (k0 - xi1)) / (gap * denominator))
    second = (lam * 4 * np.sqrt(2.0) * xi1 ** 2 * np.conj(d1) * delta_xi ** 2
              * np.real(d1 * b * phase * np.conj(delta_xi) ** 2) / (gap * denominator ** 2))
    u_rad2 = first + second

    u_sol, u_rad1, u_rad2 = complex(u_sol), complex(u_rad1), complex(u_rad2)
    return AsymptoticProfile(
        x=x, t=t, regime="defocusing_qpos",
        u_sol=u_sol, u_rad1=u_rad1, u_rad2=u_rad2, u_rad=u_rad1 + u_rad2,
        total=u_sol + (u_rad1 + u_rad2) / np.sqrt(t),
    )


def effective_soliton(xi1: complex, c1: complex, delta_xi: complex = 1.0) -> Tuple[float, float, float]:
    """
    Stationary soliton matching the defocusing u_sol.

    Returns:
        (omega, alpha, phase) with u_sol = e^{-i phase} u_s(x, t; alpha, omega).
    """
    omega = float(np.real(-4 * xi1 ** 2))
    c_s = c1 / delta_xi ** 2
    alpha = 2 * omega * abs(c_s) / (omega - abs(c_s) ** 2)
    return omega, float(alpha), float(np.angle(c_s) - np.pi / 2)


@dataclass(frozen=True)
class ModifiedScatteringData:
    """Modified pole data inside the velocity window, with the flipped poles"""
    data: ReflectionlessData
    box: RenormalizedBox
    z_minus: Tuple[complex, ...]
    k0: float


def modified_residues(
    source: Union[SpectralTable, ReflectionCoefficient],
    spectrum: DiscreteSpectrum,
    zeta: float,
    K: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ModifiedScatteringData:
    """
    Modified residue constants for the focusing problem at zeta = x/t in [0, K].

    Poles with -K/2 <= Re xi <= 0 are kept; those left of -K/2 enter only
    through the Blaschke-type product; kept poles with Re xi < k0 form the box.
    """
    if spectrum.lam != -1:
        raise RegimeMismatch("modified residues belong to the focusing problem")
    if K <= 0 or not 0 <= zeta <= K:
        raise ValidationFailure(f"zeta = {zeta} outside [0, K = {K}]")
    if spectrum.M and spectrum.c is None:
        raise RegimeMismatch("residue constants are needed for the soliton part")
    reflection = _as_reflection(source, tol)
    k0 = -zeta / 4.0
    xi = list(spectrum.xi)
    c = list(spectrum.c or ())

    window = [j for j, z in enumerate(xi) if -K / 2 <= z.real <= tol.loc_tol]
    z_minus = [xi[j] for j, z in enumerate(xi) if z.real < -K / 2]

    new_xi, new_c, box = [], [], []
    for j in window:
        product = 1.0 + 0j
        for z in z_minus:
            product *= ((xi[j] - z) / (xi[j] - np.conj(z))) ** 2
        new_c.append(complex(c[j] * product / reflection.delta(k0, xi[j]) ** 2))
        if xi[j].real < k0 - tol.loc_tol:
            box.append(len(new_xi))
        new_xi.append(xi[j])

    return ModifiedScatteringData(
        data=ReflectionlessData(xi=tuple(new_xi), c=tuple(new_c), lam=-1),
        box=RenormalizedBox(frozenset(box)),
        z_minus=tuple(z_minus),
        k0=k0,
    )


def asymp_focusing(
    source: Union[SpectralTable, ReflectionCoefficient],
    spectrum: DiscreteSpectrum,
    x: float,
    t: float,
    K: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> AsymptoticProfile:
    """Solitons in the window [0, K] plus radiation for the focusing equation."""
    reflection = _as_reflection(source, tol)
    if t <= 0:
        raise ValidationFailure("t must be positive")
    modified = modified_residues(reflection, spectrum, x / t, K, tol)
    coeffs = coefficients(reflection, None, x, t, tol)
    k0 = coeffs.k0

    solution = ReflectionlessSolution.solve(modified.data, x, t, tol)
    u_sol = solution.u
    a_box = complex(modified.box.a_box(k0, modified.data.xi))
    m_box = solution.m(k0) @ np.diag([a_box, 1.0 / a_box])

    arg_sum = sum(np.angle(k0 - modified.data.xi[j]) for j in modified.box.box)
    # chi is imaginary, so exp(2 pi i chi) is a real positive factor on |beta|
    alpha =coeffs.beta * np.exp(1j * (2 * np.pi * coeffs.chi - 4 * arg_sum))
    phase = np.exp(1j * (x * x / (4 * t) + coeffs.nu * np.log(8 * t)))
    u_rad = complex(m_box[0, 0] ** 2 * alpha * phase + m_box[0, 1] ** 2 * np.conj(alpha) / phase)

    return AsymptoticProfile(
        x=x, t=t, regime="focusing",
        u_sol=u_sol, u_rad1=u_rad, u_rad2=0j, u_rad=u_rad,
        total=u_sol + u_rad / np.sqrt(2 * t),
    )


def predict(
    regime: Regime,
    source: Union[SpectralTable, ReflectionCoefficient],
    spectrum: Optional[DiscreteSpectrum],
    xs: Sequence[float],
    t: float,
    K: Optional[float] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list:
    """Asymptotic profiles along a list of x at one time."""
    reflection = _as_reflection(source, tol)
    profiles = []
    for x in np.atleast_1d(np.asarray(xs, dtype=float)):
        x = float(x)
        if regime == "defocusing_qneg":
            profiles.append(asymp_defocusing_qneg(coefficients(reflection, spectrum, x, t, tol), x, t))
        elif regime == "defocusing_qpos":
            profiles.append(asymp_defocusing_qpos(reflection, spectrum, x, t, tol))
        elif regime == "focusing":
            window = K if K is not None else max(x / t, 1.0)
            profiles.append(asymp_focusing(reflection, spectrum, x, t, window, tol))
        else:
            raise ValidationFailure(f"unknown regime '{regime}'")
    logger.debug(f"Predicted {len(profiles)} {regime} values at t = {t:g}")
    return profiles
